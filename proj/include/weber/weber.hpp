#pragma once

#include "weber/error.hpp"
#include "weber/geometry.hpp"
#include "weber/unifacility.hpp"
#include "weber/bifacility.hpp"
#include "weber/dynamics.hpp"
#include "weber/multifacility.hpp"

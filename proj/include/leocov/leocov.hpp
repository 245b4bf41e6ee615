#pragma once

#include "leocov/bounds.hpp"
#include "leocov/curve_io.hpp"
#include "leocov/geometry.hpp"
#include "leocov/monte_carlo.hpp"
#include "leocov/point_process.hpp"
#include "leocov/pointset_io.hpp"
#include "leocov/quadrature.hpp"
#include "leocov/rng.hpp"
#include "leocov/tle.hpp"
#include "leocov/version.hpp"

#pragma once

/// @file traceforge.hpp
/// @brief Convenience header pulling in the whole library.

#include "traceforge/analytic_checks.hpp"
#include "traceforge/cache.hpp"
#include "traceforge/cm_engine.hpp"
#include "traceforge/curve_model.hpp"
#include "traceforge/ec_point.hpp"
#include "traceforge/errors.hpp"
#include "traceforge/io.hpp"
#include "traceforge/lseries_sums.hpp"
#include "traceforge/modarith.hpp"
#include "traceforge/nagao_surface.hpp"
#include "traceforge/primes.hpp"
#include "traceforge/summation.hpp"
#include "traceforge/trace_engine.hpp"

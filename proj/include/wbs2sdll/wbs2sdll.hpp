#pragma once

/** @file
 * Umbrella header for the library (everything except the CLI front end).
 */

#include "wbs2sdll/timeseries.hpp"
#include "wbs2sdll/rng.hpp"
#include "wbs2sdll/dgp.hpp"
#include "wbs2sdll/cusum.hpp"
#include "wbs2sdll/wbs2.hpp"
#include "wbs2sdll/sdll.hpp"
#include "wbs2sdll/montecarlo.hpp"
#include "wbs2sdll/diagnostics.hpp"
#include "wbs2sdll/io.hpp"

#pragma once

#include "hyperstar/estimator.hpp"
#include "hyperstar/experiments.hpp"
#include "hyperstar/generators.hpp"
#include "hyperstar/hypertree.hpp"
#include "hyperstar/json_io.hpp"
#include "hyperstar/noise.hpp"
#include "hyperstar/rng.hpp"
#include "hyperstar/spreading.hpp"

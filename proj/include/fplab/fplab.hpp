#pragma once

#include "fplab/estimators.hpp"
#include "fplab/exact.hpp"
#include "fplab/experiments.hpp"
#include "fplab/numeric.hpp"
#include "fplab/quadrature.hpp"
#include "fplab/recursion.hpp"
#include "fplab/rng.hpp"
#include "fplab/series.hpp"
#include "fplab/version.hpp"
#include "fplab/walk.hpp"

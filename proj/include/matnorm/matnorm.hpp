#pragma once

#include "matnorm/bayes.hpp"
#include "matnorm/errors.hpp"
#include "matnorm/estimators.hpp"
#include "matnorm/format.hpp"
#include "matnorm/inequalities.hpp"
#include "matnorm/io.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/parallel.hpp"
#include "matnorm/priors.hpp"
#include "matnorm/risk.hpp"
#include "matnorm/rng.hpp"
#include "matnorm/scenarios.hpp"
#include "matnorm/spectral.hpp"

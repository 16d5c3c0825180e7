#pragma once

#include "diagnostics.hpp"
#include "error.hpp"
#include "expression.hpp"
#include "integrator.hpp"
#include "likert.hpp"
#include "logistic.hpp"
#include "model.hpp"
#include "observations.hpp"
#include "participation_fit.hpp"
#include "perception_fit.hpp"
#include "posterior.hpp"
#include "rng.hpp"
#include "simulation.hpp"

#pragma once

// Umbrella header.

#include "glv/dynamics.hpp"
#include "glv/errors.hpp"
#include "glv/experiment.hpp"
#include "glv/integrals.hpp"
#include "glv/linalg.hpp"
#include "glv/poisson.hpp"
#include "glv/rng.hpp"
#include "glv/system.hpp"
#include "glv/verify.hpp"

#pragma once

// Umbrella header.

#include "erkc/convergence.hpp"
#include "erkc/delay.hpp"
#include "erkc/errors.hpp"
#include "erkc/history.hpp"
#include "erkc/integrator.hpp"
#include "erkc/operators.hpp"
#include "erkc/phi.hpp"
#include "erkc/problems.hpp"
#include "erkc/verification.hpp"

#pragma once

// Phase I dose-finding designs: the 3+3 family of rule-based designs, the
// toxicity-probability-interval Bayesian design, isotonic-regression MTD
// estimation, closed-form worst-case safety bounds, and the simulation and
// exact-enumeration machinery to study them.

#include "dosefind/beta.hpp"
#include "dosefind/equivalence.hpp"
#include "dosefind/isotonic.hpp"
#include "dosefind/monitoring.hpp"
#include "dosefind/rng.hpp"
#include "dosefind/rule_design.hpp"
#include "dosefind/simulate.hpp"
#include "dosefind/tpi.hpp"
#include "dosefind/trial.hpp"
#include "dosefind/worstcase.hpp"

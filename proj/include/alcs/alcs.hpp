// Umbrella header for the active-learning case-selection library.
#pragma once

#include "alcs/encode.hpp"
#include "alcs/gp.hpp"
#include "alcs/harness.hpp"
#include "alcs/learner.hpp"
#include "alcs/metrics.hpp"
#include "alcs/oracle.hpp"
#include "alcs/stats.hpp"
#include "alcs/version.hpp"

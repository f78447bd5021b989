#pragma once

#include "panelfuse/admm.hpp"
#include "panelfuse/csv.hpp"
#include "panelfuse/error.hpp"
#include "panelfuse/inference.hpp"
#include "panelfuse/linear_system.hpp"
#include "panelfuse/metrics.hpp"
#include "panelfuse/panel.hpp"
#include "panelfuse/penalty.hpp"
#include "panelfuse/random.hpp"
#include "panelfuse/ridge_init.hpp"
#include "panelfuse/simulation.hpp"
#include "panelfuse/tuning.hpp"

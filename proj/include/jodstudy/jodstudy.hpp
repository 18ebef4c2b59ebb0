#pragma once

#include "jodstudy/attention.hpp"
#include "jodstudy/config.hpp"
#include "jodstudy/error.hpp"
#include "jodstudy/event_log.hpp"
#include "jodstudy/golden_pool.hpp"
#include "jodstudy/jod_solver.hpp"
#include "jodstudy/metrics.hpp"
#include "jodstudy/model.hpp"
#include "jodstudy/normal.hpp"
#include "jodstudy/pcm.hpp"
#include "jodstudy/quiz.hpp"
#include "jodstudy/rater_sim.hpp"
#include "jodstudy/service.hpp"
#include "jodstudy/sim_driver.hpp"

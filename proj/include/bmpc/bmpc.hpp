#pragma once

#include "bmpc/belief_planning.hpp"
#include "bmpc/config.hpp"
#include "bmpc/controllers.hpp"
#include "bmpc/diagnostics.hpp"
#include "bmpc/estimation.hpp"
#include "bmpc/experiments.hpp"
#include "bmpc/io.hpp"
#include "bmpc/linalg.hpp"
#include "bmpc/optimizer.hpp"
#include "bmpc/rng.hpp"
#include "bmpc/rollout.hpp"
#include "bmpc/stats.hpp"
#include "bmpc/system_model.hpp"

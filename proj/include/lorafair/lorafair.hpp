#pragma once

#include "lorafair/allocation.hpp"
#include "lorafair/baselines.hpp"
#include "lorafair/channel.hpp"
#include "lorafair/config.hpp"
#include "lorafair/experiment.hpp"
#include "lorafair/metrics.hpp"
#include "lorafair/phy.hpp"
#include "lorafair/random.hpp"
#include "lorafair/sim.hpp"

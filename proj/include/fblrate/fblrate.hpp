// Umbrella header.
#pragma once

#include "fblrate/channel.hpp"
#include "fblrate/effective.hpp"
#include "fblrate/fbl.hpp"
#include "fblrate/numerics.hpp"
#include "fblrate/optimize.hpp"
#include "fblrate/queuesim.hpp"

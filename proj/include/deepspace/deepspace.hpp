#pragma once

#include "deepspace/errors.hpp"
#include "deepspace/constants.hpp"
#include "deepspace/numerics.hpp"
#include "deepspace/rng.hpp"
#include "deepspace/parallel.hpp"
#include "deepspace/config.hpp"
#include "deepspace/antenna.hpp"
#include "deepspace/plasma.hpp"
#include "deepspace/thermal_noise.hpp"
#include "deepspace/link_budget.hpp"
#include "deepspace/harness.hpp"
#include "deepspace/report.hpp"
#include "deepspace/presets.hpp"

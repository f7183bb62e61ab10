// Umbrella header for the tidal lagoon scheduling library.

#pragma once

#include "lagoon/core.hpp"
#include "lagoon/dp.hpp"
#include "lagoon/io.hpp"
#include "lagoon/milp.hpp"
#include "lagoon/physics.hpp"
#include "lagoon/sim.hpp"
#include "lagoon/storage.hpp"

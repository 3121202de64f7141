#pragma once

#include "uxcharge/types.hpp"
#include "uxcharge/adjust.hpp"
#include "uxcharge/shift.hpp"
#include "uxcharge/auction.hpp"
#include "uxcharge/settle.hpp"
#include "uxcharge/sim.hpp"
#include "uxcharge/scenario.hpp"

// Umbrella header.
#pragma once

#include "wqs/errors.hpp"
#include "wqs/lattice.hpp"
#include "wqs/market.hpp"
#include "wqs/market_io.hpp"
#include "wqs/matching.hpp"
#include "wqs/oracle.hpp"
#include "wqs/tarski.hpp"
#include "wqs/types.hpp"
#include "wqs/verify.hpp"

#pragma once

#include "netsel/chain.hpp"
#include "netsel/error.hpp"
#include "netsel/model.hpp"
#include "netsel/montecarlo.hpp"
#include "netsel/protocols.hpp"
#include "netsel/replicator.hpp"

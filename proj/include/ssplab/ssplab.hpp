// Umbrella header: the full tabular SSP regret-minimization laboratory.
#pragma once

#include "ssplab/agent.hpp"
#include "ssplab/baselines.hpp"
#include "ssplab/bench.hpp"
#include "ssplab/chain.hpp"
#include "ssplab/common.hpp"
#include "ssplab/confidence.hpp"
#include "ssplab/environment.hpp"
#include "ssplab/evi.hpp"
#include "ssplab/inner_min.hpp"
#include "ssplab/instance.hpp"
#include "ssplab/json_io.hpp"
#include "ssplab/m_infinity.hpp"
#include "ssplab/rng.hpp"
#include "ssplab/scenarios.hpp"
#include "ssplab/solvers.hpp"
#include "ssplab/svg.hpp"

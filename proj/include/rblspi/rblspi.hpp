#pragma once

#include "rblspi/agents/offline.hpp"
#include "rblspi/agents/online.hpp"
#include "rblspi/checkpoint.hpp"
#include "rblspi/env/collect.hpp"
#include "rblspi/env/registry.hpp"
#include "rblspi/eval.hpp"
#include "rblspi/features.hpp"
#include "rblspi/harness/chain_report.hpp"
#include "rblspi/harness/experiment.hpp"
#include "rblspi/numerics.hpp"

#pragma once

// Data handling
#include "carbcast/csv.hpp"
#include "carbcast/date.hpp"
#include "carbcast/panel.hpp"
#include "carbcast/synth.hpp"

// Diagnostics and models
#include "carbcast/garch.hpp"
#include "carbcast/rnn.hpp"
#include "carbcast/rnn_train.hpp"
#include "carbcast/stats.hpp"

// Rolling harness and scoring
#include "carbcast/harness.hpp"
#include "carbcast/importance.hpp"
#include "carbcast/metrics.hpp"
#include "carbcast/records.hpp"

// Procurement strategy
#include "carbcast/strategy.hpp"

// Orchestration
#include "carbcast/pipeline.hpp"
#include "carbcast/plot.hpp"
#include "carbcast/version.hpp"

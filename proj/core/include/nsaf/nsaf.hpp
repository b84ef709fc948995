#pragma once

#include "nsaf/adaptive.hpp"
#include "nsaf/config.hpp"
#include "nsaf/decomposer.hpp"
#include "nsaf/experiment.hpp"
#include "nsaf/filterbank.hpp"
#include "nsaf/report.hpp"
#include "nsaf/rng.hpp"
#include "nsaf/signal_lab.hpp"
#include "nsaf/theory.hpp"

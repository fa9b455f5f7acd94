#pragma once

#include "nestmc/batch.hpp"
#include "nestmc/config.hpp"
#include "nestmc/distributions.hpp"
#include "nestmc/errors.hpp"
#include "nestmc/estimators.hpp"
#include "nestmc/harness.hpp"
#include "nestmc/linalg.hpp"
#include "nestmc/outer_function.hpp"
#include "nestmc/partition.hpp"
#include "nestmc/problem.hpp"
#include "nestmc/problems.hpp"
#include "nestmc/report_io.hpp"
#include "nestmc/rng.hpp"
#include "nestmc/svg_plot.hpp"

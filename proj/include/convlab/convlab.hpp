#pragma once

#include "convlab/checks.hpp"
#include "convlab/convex_fn.hpp"
#include "convlab/convolution.hpp"
#include "convlab/errors.hpp"
#include "convlab/extremal_search.hpp"
#include "convlab/group_model.hpp"
#include "convlab/interval_union.hpp"
#include "convlab/io.hpp"
#include "convlab/report.hpp"
#include "convlab/step_fn.hpp"

#pragma once

#include "asclab/asc.hpp"
#include "asclab/choice.hpp"
#include "asclab/core_ops.hpp"
#include "asclab/dataset.hpp"
#include "asclab/errors.hpp"
#include "asclab/experiments.hpp"
#include "asclab/method.hpp"
#include "asclab/parallel.hpp"
#include "asclab/params.hpp"
#include "asclab/problems.hpp"
#include "asclab/rate_fit.hpp"
#include "asclab/regularizers.hpp"

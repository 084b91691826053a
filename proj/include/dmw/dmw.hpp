#pragma once

// Distance-matrix Wasserstein statistics: umbrella header.

#include "dmw/core.hpp"
#include "dmw/estimators.hpp"
#include "dmw/exact_ot.hpp"
#include "dmw/experiments.hpp"
#include "dmw/gw.hpp"
#include "dmw/kernels.hpp"
#include "dmw/matrix_law.hpp"
#include "dmw/ot1d.hpp"
#include "dmw/rng.hpp"
#include "dmw/sinkhorn.hpp"
#include "dmw/spaces.hpp"
#include "dmw/tu_io.hpp"
#include "dmw/twosample.hpp"

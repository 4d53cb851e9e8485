#ifndef LOGSHOT_LOGSHOT_HPP
#define LOGSHOT_LOGSHOT_HPP

// Umbrella header: the whole library in one include.

#include "logshot/analysis.hpp"
#include "logshot/errors.hpp"
#include "logshot/hfbm.hpp"
#include "logshot/io.hpp"
#include "logshot/kernels.hpp"
#include "logshot/noise.hpp"
#include "logshot/quadrature.hpp"
#include "logshot/rng.hpp"
#include "logshot/shotnoise.hpp"
#include "logshot/specfun.hpp"

#endif  // LOGSHOT_LOGSHOT_HPP

#pragma once

#include "tfub/bounds.hpp"
#include "tfub/combinatorics.hpp"
#include "tfub/feasibility.hpp"
#include "tfub/gabor.hpp"
#include "tfub/group.hpp"
#include "tfub/parallel.hpp"
#include "tfub/rank.hpp"
#include "tfub/rational.hpp"
#include "tfub/sparse_recovery.hpp"

namespace tfub {
inline constexpr const char* kVersion = "0.1.0";
}

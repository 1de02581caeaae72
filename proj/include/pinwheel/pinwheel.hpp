#pragma once

#include "pinwheel/completion.hpp"
#include "pinwheel/config.hpp"
#include "pinwheel/formats.hpp"
#include "pinwheel/grid.hpp"
#include "pinwheel/parallel.hpp"
#include "pinwheel/simgroup.hpp"
#include "pinwheel/specmath.hpp"
#include "pinwheel/transforms.hpp"

namespace pw {
inline constexpr const char* kVersion = "0.1.0";
}

#pragma once

#include <cstdint>
#include <vector>

namespace dmsim {

/// Timestamped price samples at fixed spacing. `collapsed` marks a run that
/// ended early because every trader wanted to sell, which would have driven
/// the price to zero.
struct PriceSeries {
    std::int64_t t0 = 0;
    double dt = 1.0;
    std::vector<double> values;
    bool collapsed = false;
};

}  // namespace dmsim

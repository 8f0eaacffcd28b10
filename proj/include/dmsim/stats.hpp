#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmsim/series.hpp"

namespace dmsim {

/// Interval returns derived from a price series.
struct ReturnSeries {
    std::int64_t interval = 1;   ///< window length in samples (= seconds here)
    std::vector<double> values;  ///< relative (or log) returns
};

enum class ReturnKind { relative, log };

/// Returns over non-overlapping windows: r_k = (S((k+1)d) - S(kd)) / S(kd).
/// Output length is floor((n - 1) / interval).
[[nodiscard]] inline ReturnSeries make_returns(const PriceSeries& prices,
                                               std::int64_t interval,
                                               ReturnKind kind = ReturnKind::relative) {
    if (interval < 1)
        throw std::invalid_argument("make_returns: interval must be >= 1");
    const auto n = static_cast<std::int64_t>(prices.values.size());
    if (n <= interval)
        throw std::invalid_argument("make_returns: series not longer than interval");
    ReturnSeries out;
    out.interval = interval;
    out.values.reserve(static_cast<std::size_t>((n - 1) / interval));
    for (std::int64_t k = 0; (k + 1) * interval < n; ++k) {
        const double a = prices.values[static_cast<std::size_t>(k * interval)];
        const double b = prices.values[static_cast<std::size_t>((k + 1) * interval)];
        out.values.push_back(kind == ReturnKind::relative ? (b - a) / a : std::log(b / a));
    }
    return out;
}

/// Sample moments about the mean. Kurtosis is Pearson m4/m2^2 (normal = 3).
struct MomentSummary {
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< population second central moment
    double skewness = 0.0;
    double kurtosis = 0.0;
};

[[nodiscard]] inline MomentSummary moment_summary(std::span<const double> xs) {
    const auto n = static_cast<std::int64_t>(xs.size());
    if (n < 1) throw std::invalid_argument("moment_summary: empty sample");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    MomentSummary out;
    out.n = n;
    out.mean = mean;
    out.variance = m2;
    out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    return out;
}

/// Pearson kurtosis m4/m2^2 with population moments about the sample mean.
[[nodiscard]] inline double kurtosis(std::span<const double> xs) {
    if (xs.size() < 4)
        throw std::invalid_argument("kurtosis: need at least 4 samples");
    const MomentSummary m = moment_summary(xs);
    if (!(m.variance > 0.0))
        throw std::invalid_argument("kurtosis: sample has zero variance");
    return m.kurtosis;
}

/// Summary of persistent one-sided pressure in an imbalance series.
struct ImbalanceStats {
    double variance = 0.0;
    double lag1_autocorr = 0.0;               ///< 0 for a constant series
    std::int64_t longest_one_sided_run = 0;   ///< consecutive samples of equal sign
};

[[nodiscard]] inline ImbalanceStats imbalance_stats(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("imbalance_stats: empty series");
    const auto n = static_cast<std::int64_t>(xs.size());
    bool constant = true;
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
        constant = constant && x == xs[0];
    }
    mean /= static_cast<double>(n);
    double var_sum = 0.0, cov_sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = xs[static_cast<std::size_t>(i)] - mean;
        var_sum += d * d;
        if (i + 1 < n) cov_sum += d * (xs[static_cast<std::size_t>(i + 1)] - mean);
    }
    ImbalanceStats out;
    // An exactly constant series carries no signal; rounding noise in the
    // two-pass sums must not masquerade as autocorrelation.
    out.variance = constant ? 0.0 : var_sum / static_cast<double>(n);
    out.lag1_autocorr = (!constant && var_sum > 0.0) ? cov_sum / var_sum : 0.0;

    const auto sign = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
    std::int64_t best = 0, run = 0;
    int prev = 2;  // sentinel
    for (double x : xs) {
        const int s = sign(x);
        run = (s == prev) ? run + 1 : 1;
        prev = s;
        best = std::max(best, run);
    }
    out.longest_one_sided_run = best;
    return out;
}

/// One histogram bin plus the matched normal density at its center.
struct HistogramBin {
    double center = 0.0;
    double density = 0.0;
    double normal_density = 0.0;
};

/// Density-normalized histogram over [min, max] with a normal overlay that
/// carries the sample's mean and variance exactly.
[[nodiscard]] inline std::vector<HistogramBin> histogram(std::span<const double> xs, int bins) {
    if (bins < 2) throw std::invalid_argument("histogram: bins must be >= 2");
    if (xs.empty()) throw std::invalid_argument("histogram: empty sample");
    double lo = xs[0], hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (lo == hi) {  // degenerate sample: give it unit width
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bins;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double x : xs) {
        auto idx = static_cast<std::int64_t>((x - lo) / width);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        ++counts[static_cast<std::size_t>(idx)];
    }
    const MomentSummary m = moment_summary(xs);
    const double sigma = std::sqrt(m.variance);
    const double inv_norm = 1.0 / (static_cast<double>(xs.size()) * width);
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
        HistogramBin& b = out[static_cast<std::size_t>(i)];
        b.center = lo + (i + 0.5) * width;
        b.density = static_cast<double>(counts[static_cast<std::size_t>(i)]) * inv_norm;
        if (sigma > 0.0) {
            const double z = (b.center - m.mean) / sigma;
            b.normal_density = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        }
    }
    return out;
}

}  // namespace dmsim

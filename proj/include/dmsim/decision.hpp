#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dmsim {

/// Binary market stance of one trader: buy (+1) or sell (-1). There is no
/// neutral state.
class Expectation {
public:
    static constexpr Expectation buy() noexcept { return Expectation{+1}; }
    static constexpr Expectation sell() noexcept { return Expectation{-1}; }

    [[nodiscard]] constexpr int value() const noexcept { return value_; }
    [[nodiscard]] constexpr bool is_buy() const noexcept { return value_ > 0; }
    [[nodiscard]] constexpr Expectation flipped() const noexcept { return Expectation{-value_}; }

    friend constexpr bool operator==(Expectation, Expectation) noexcept = default;

private:
    constexpr explicit Expectation(int v) noexcept : value_{v} {}
    int value_;
};

/// Parameters of the trader decision rule.
struct DecisionParams {
    double alpha = 0.5;  ///< estimate adjustment rate per step, in [0, 1]
    double beta = 0.5;   ///< inverse tolerance, >= 0; beta = 0 never flips
    double dt = 1.0;     ///< step length, seconds

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("DecisionParams: alpha must lie in [0, 1]");
        if (!(beta >= 0.0))
            throw std::invalid_argument("DecisionParams: beta must be >= 0");
        if (!(dt > 0.0))
            throw std::invalid_argument("DecisionParams: dt must be > 0");
    }
};

/// One trader: stance, private appropriate-price estimate, and the second
/// it was last brought up to date.
struct TraderState {
    Expectation m = Expectation::buy();
    double s = 0.0;
    std::int64_t last_update = 0;
};

/// Appropriate price right after a stance change: 0 for a fresh seller,
/// twice the current price for a fresh buyer.
[[nodiscard]] inline double reset_estimate(double price, Expectation m) {
    if (!(price > 0.0))
        throw std::invalid_argument("reset_estimate: price must be positive");
    return price * (1.0 + m.value());
}

/// One relaxation step of the estimate toward the latest price. The result
/// is a convex combination, so it always lies between s and next_price.
[[nodiscard]] inline double evolve_estimate(double s, double next_price, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("evolve_estimate: alpha must lie in [0, 1]");
    if (!(next_price > 0.0))
        throw std::invalid_argument("evolve_estimate: next_price must be positive");
    return (1.0 - alpha) * s + alpha * next_price;
}

/// Closed form of k relaxation steps against a price held constant. Used
/// when a trader catches up after skipping k-1 seconds.
[[nodiscard]] inline double evolve_estimate_lagged(double s, double current_price,
                                                   double alpha, std::int64_t k) {
    if (k < 1)
        throw std::invalid_argument("evolve_estimate_lagged: k must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("evolve_estimate_lagged: alpha must lie in [0, 1]");
    if (!(current_price > 0.0))
        throw std::invalid_argument("evolve_estimate_lagged: current_price must be positive");
    const double keep = std::pow(1.0 - alpha, static_cast<double>(k));
    return keep * s + (1.0 - keep) * current_price;
}

/// Relative deviation of the private estimate from the market price,
/// (s - price) / price. Exactly -1 for a fresh seller, +1 for a fresh buyer.
[[nodiscard]] inline double mispricing(double s, double price) {
    if (!(price > 0.0))
        throw std::invalid_argument("mispricing: price must be positive");
    return (s - price) / price;
}

/// Probability of changing stance. Zero whenever m*h >= 0 (no incentive),
/// min(1, -beta*m*h) otherwise. 1/beta is how much adverse mispricing a
/// trader tolerates; beta = 0 tolerates anything.
[[nodiscard]] inline double flip_probability(Expectation m, double h, double beta) {
    if (!(beta >= 0.0))
        throw std::invalid_argument("flip_probability: beta must be >= 0");
    const double mh = m.value() * h;
    if (mh >= 0.0) return 0.0;
    return std::min(1.0, -beta * mh);
}

/// Advances one trader against a new price. Order is fixed: relax the
/// estimate, evaluate the mispricing, then maybe flip and reset. The
/// uniform draw u is supplied by the caller; this module holds no
/// generator state.
[[nodiscard]] inline TraderState step_agent(TraderState state, double next_price,
                                            const DecisionParams& params, double u) {
    state.s = evolve_estimate(state.s, next_price, params.alpha);
    const double h = mispricing(state.s, next_price);
    if (u < flip_probability(state.m, h, params.beta)) {
        state.m = state.m.flipped();
        state.s = reset_estimate(next_price, state.m);
    }
    return state;
}

}  // namespace dmsim

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmsim/decision.hpp"
#include "dmsim/parallel.hpp"
#include "dmsim/random.hpp"
#include "dmsim/series.hpp"

namespace dmsim {

/// Configuration of one supply-demand balance run.
struct EquilibriumConfig {
    int n_agents = 101;  ///< must be odd so the mean stance is never zero
    std::int64_t steps = 100'000;
    DecisionParams params{};
    double initial_price = 100.0;
    int initial_buyers = 51;  ///< agents 0..initial_buyers-1 start as buyers
    std::uint64_t seed = 1;

    void validate() const {
        if (n_agents < 1 || n_agents % 2 == 0)
            throw std::invalid_argument("EquilibriumConfig: n_agents must be odd and positive");
        if (steps < 0)
            throw std::invalid_argument("EquilibriumConfig: steps must be >= 0");
        if (!(initial_price > 0.0))
            throw std::invalid_argument("EquilibriumConfig: initial_price must be positive");
        if (initial_buyers < 0 || initial_buyers > n_agents)
            throw std::invalid_argument("EquilibriumConfig: initial_buyers out of range");
        params.validate();
    }
};

/// Mean stance of all traders; the relative price change of one step.
/// Never exactly zero for an odd number of traders.
[[nodiscard]] inline double aggregate_return(std::span<const Expectation> expectations) {
    if (expectations.empty() || expectations.size() % 2 == 0)
        throw std::invalid_argument("aggregate_return: need a nonempty, odd-length sequence");
    std::int64_t sum = 0;
    for (Expectation m : expectations) sum += m.value();
    return static_cast<double>(sum) / static_cast<double>(expectations.size());
}

struct MarketStep {
    double new_price = 0.0;
    bool collapsed = false;  ///< every trader wanted to sell; price would hit zero
};

/// One market step: the price moves by the mean stance, then every trader
/// is advanced against the new price, consuming one uniform draw each in
/// index order.
inline MarketStep step_market(std::vector<TraderState>& states, double price,
                              const DecisionParams& params, Rng& rng) {
    if (states.empty() || states.size() % 2 == 0)
        throw std::invalid_argument("step_market: need a nonempty, odd number of traders");
    if (!(price > 0.0))
        throw std::invalid_argument("step_market: price must be positive");
    std::int64_t sum = 0;
    for (const TraderState& st : states) sum += st.m.value();
    if (sum == -static_cast<std::int64_t>(states.size()))
        return {0.0, true};
    const double r = static_cast<double>(sum) / static_cast<double>(states.size());
    const double new_price = price * (1.0 + r);
    for (TraderState& st : states) {
        st = step_agent(st, new_price, params, uniform01(rng));
    }
    return {new_price, false};
}

/// Terminal summary of a run that never materializes the price as a double,
/// so strong-drift regimes cannot overflow.
struct EquilibriumSummary {
    double terminal_log_price = 0.0;  ///< -inf when collapsed
    std::int64_t steps_run = 0;
    bool collapsed = false;
};

namespace detail {

/// Core of the equilibrium loop. Prices are kept rescaled by an exact power
/// of two so the dynamics stay in double range; scaling by powers of two is
/// exact, and every quantity the traders see is a ratio, so the trajectory
/// is bit-identical to the unscaled one.
class EquilibriumRunner {
public:
    explicit EquilibriumRunner(const EquilibriumConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg.validate();
        price_ = cfg.initial_price;
        log_price_ = std::log(cfg.initial_price);
        states_.reserve(static_cast<std::size_t>(cfg.n_agents));
        for (int i = 0; i < cfg.n_agents; ++i) {
            const Expectation m = i < cfg.initial_buyers ? Expectation::buy() : Expectation::sell();
            states_.push_back(TraderState{m, reset_estimate(cfg.initial_price, m), 0});
            sum_m_ += m.value();
        }
    }

    /// Advances one step; returns false on collapse.
    bool step() {
        const double r = static_cast<double>(sum_m_) / static_cast<double>(cfg_.n_agents);
        if (sum_m_ == -cfg_.n_agents) {
            collapsed_ = true;
            return false;
        }
        price_ *= (1.0 + r);
        log_price_ += std::log1p(r);
        rescale_if_needed();
        for (TraderState& st : states_) {
            const int before = st.m.value();
            st = step_agent(st, price_, cfg_.params, uniform01(rng_));
            sum_m_ += st.m.value() - before;
        }
        ++t_;
        return true;
    }

    [[nodiscard]] double price() const { return std::ldexp(price_, pow2_); }
    [[nodiscard]] double log_price() const {
        return collapsed_ ? -std::numeric_limits<double>::infinity() : log_price_;
    }
    [[nodiscard]] bool collapsed() const { return collapsed_; }
    [[nodiscard]] std::int64_t steps_run() const { return t_; }

private:
    void rescale_if_needed() {
        // 2^512 headroom on either side; estimates scale with the price.
        if (price_ > 0x1.0p512) {
            price_ = std::ldexp(price_, -512);
            for (TraderState& st : states_) st.s = std::ldexp(st.s, -512);
            pow2_ += 512;
        } else if (price_ < 0x1.0p-512) {
            price_ = std::ldexp(price_, 512);
            for (TraderState& st : states_) st.s = std::ldexp(st.s, 512);
            pow2_ -= 512;
        }
    }

    EquilibriumConfig cfg_;
    Rng rng_;
    std::vector<TraderState> states_;
    std::int64_t sum_m_ = 0;
    double price_ = 0.0;      // rescaled by 2^pow2_
    double log_price_ = 0.0;  // ln S, maintained additively
    int pow2_ = 0;
    std::int64_t t_ = 0;
    bool collapsed_ = false;
};

}  // namespace detail

/// Full price series of one run. Deterministic in the config: same seed,
/// bit-identical series. Stops early with collapsed = true on total sell
/// consensus.
[[nodiscard]] inline PriceSeries run_equilibrium(const EquilibriumConfig& cfg) {
    detail::EquilibriumRunner runner(cfg);
    PriceSeries out;
    out.t0 = 0;
    out.dt = cfg.params.dt;
    out.values.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    out.values.push_back(cfg.initial_price);
    for (std::int64_t t = 0; t < cfg.steps; ++t) {
        if (!runner.step()) {
            out.collapsed = true;
            break;
        }
        out.values.push_back(runner.price());
    }
    return out;
}

/// Same dynamics as run_equilibrium without storing the series; the
/// terminal price is reported in log domain.
[[nodiscard]] inline EquilibriumSummary run_equilibrium_summary(const EquilibriumConfig& cfg) {
    detail::EquilibriumRunner runner(cfg);
    for (std::int64_t t = 0; t < cfg.steps; ++t) {
        if (!runner.step()) break;
    }
    return {runner.log_price(), runner.steps_run(), runner.collapsed()};
}

/// One sweep cell: ln of the across-seed mean terminal price. Collapsed
/// replicates contribute a terminal price of zero to the mean.
struct SweepCell {
    double mean_log_terminal_price = 0.0;
    int n_seeds = 0;
    int n_collapsed = 0;
};

/// Grid of seed-averaged terminal statistics. For the one-dimensional
/// sweep over the order-book adjustment rate, beta_grid stays empty.
struct SweepResult {
    std::vector<double> alpha_grid;
    std::vector<double> beta_grid;
    std::vector<SweepCell> cells;  ///< row-major: alpha index * n_beta + beta index

    [[nodiscard]] const SweepCell& cell(std::size_t ai, std::size_t bi) const {
        return cells[ai * beta_grid.size() + bi];
    }
};

/// ln of the mean of exp(log_values), evaluated without leaving log domain.
/// Entries of -inf (collapsed runs) count toward n but add nothing.
[[nodiscard]] inline double log_mean_from_logs(std::span<const double> log_values) {
    if (log_values.empty()) throw std::invalid_argument("log_mean_from_logs: empty input");
    double peak = -std::numeric_limits<double>::infinity();
    for (double lv : log_values) peak = std::max(peak, lv);
    if (std::isinf(peak) && peak < 0.0) return peak;  // all collapsed
    double acc = 0.0;
    for (double lv : log_values) {
        if (!(std::isinf(lv) && lv < 0.0)) acc += std::exp(lv - peak);
    }
    return peak + std::log(acc / static_cast<double>(log_values.size()));
}

/// Seed-averaged phase diagram over an (alpha, beta) grid. Replicate seeds
/// are derived from the base seed, the cell index and the replicate index,
/// so cells may be computed in any order or in parallel with identical
/// results.
[[nodiscard]] inline SweepResult sweep_phase_diagram(std::span<const double> alpha_grid,
                                                     std::span<const double> beta_grid,
                                                     int seeds,
                                                     const EquilibriumConfig& base_cfg,
                                                     unsigned n_threads = 0) {
    if (alpha_grid.empty() || beta_grid.empty())
        throw std::invalid_argument("sweep_phase_diagram: grids must be nonempty");
    if (seeds < 1)
        throw std::invalid_argument("sweep_phase_diagram: seeds must be >= 1");
    SweepResult out;
    out.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
    out.beta_grid.assign(beta_grid.begin(), beta_grid.end());
    out.cells.resize(alpha_grid.size() * beta_grid.size());

    parallel_for(out.cells.size(), n_threads, [&](std::size_t idx) {
        const std::size_t ai = idx / beta_grid.size();
        const std::size_t bi = idx % beta_grid.size();
        EquilibriumConfig cfg = base_cfg;
        cfg.params.alpha = alpha_grid[ai];
        cfg.params.beta = beta_grid[bi];
        std::vector<double> logs(static_cast<std::size_t>(seeds));
        int collapsed = 0;
        for (int rep = 0; rep < seeds; ++rep) {
            cfg.seed = derive_seed(base_cfg.seed, idx, static_cast<std::uint64_t>(rep));
            const EquilibriumSummary s = run_equilibrium_summary(cfg);
            logs[static_cast<std::size_t>(rep)] = s.terminal_log_price;
            collapsed += s.collapsed ? 1 : 0;
        }
        out.cells[idx] = SweepCell{log_mean_from_logs(logs), seeds, collapsed};
    });
    return out;
}

}  // namespace dmsim

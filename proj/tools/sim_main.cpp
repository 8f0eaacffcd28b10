// Command-line front end: five experiment modes, CSV artifacts, and a
// run_meta.json recording the resolved configuration, the seed policy and
// artifact checksums. Everything is a pure function of the configuration
// and the seed; no wall-clock time is ever read.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmsim/config.hpp"
#include "dmsim/csv.hpp"
#include "dmsim/equilibrium.hpp"
#include "dmsim/simulation.hpp"
#include "dmsim/stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoStatistics = 3;
constexpr int kExitIo = 4;

/// Raised when a run finishes but yields nothing to compute statistics on
/// (early collapse, or a horizon that leaves no samples).
class NoStatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Configuration file (flat key = value)");
    cmd->add_option("--out", args.out_dir, "Output directory (default: current)");
    cmd->add_option("--set", args.sets, "Override a config key, e.g. --set decision.beta=0.3")
        ->take_all();
    cmd->add_option("--seed", args.seed, "Master seed (overrides run.seed)")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

dmsim::Config load_config(const CommonArgs& args) {
    dmsim::Config cfg;
    if (!args.config_path.empty()) cfg = dmsim::parse_config(args.config_path);
    for (const std::string& assignment : args.sets) dmsim::apply_override(cfg, assignment);
    if (args.seed_given) cfg.seed = args.seed;
    return cfg;
}

void write_run_meta(dmsim::ArtifactWriter& writer, const dmsim::Config& cfg,
                    const std::string& command) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["seed"] = cfg.seed;
    meta["rng"] = dmsim::kRngName;
    meta["seed_derivation"] =
        "splitmix64(master ^ 0x9E3779B97F4A7C15*(cell+1)) -> "
        "splitmix64(. ^ 0xC2B2AE3D27D4EB4F*(replicate+1))";
    meta["checksum"] = "fnv1a64";
    nlohmann::json conf;
    for (const auto& key : dmsim::detail::config_keys()) conf[key.name] = key.get(cfg);
    meta["config"] = conf;
    nlohmann::json artifacts;
    for (const auto& [name, sum] : writer.checksums()) artifacts[name] = sum;
    meta["artifacts"] = artifacts;
    writer.write("run_meta.json", meta.dump(2) + "\n");
}

std::string prices_csv(const dmsim::PriceSeries& series) {
    std::string out = "t,price\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += std::to_string(series.t0 + static_cast<std::int64_t>(i));
        out += ',';
        out += dmsim::csv_double(series.values[i]);
        out += '\n';
    }
    return out;
}

std::string returns_csv(const dmsim::ReturnSeries& rs, std::int64_t t0) {
    std::string out = "t,return\n";
    for (std::size_t k = 0; k < rs.values.size(); ++k) {
        out += std::to_string(t0 + static_cast<std::int64_t>(k + 1) * rs.interval);
        out += ',';
        out += dmsim::csv_double(rs.values[k]);
        out += '\n';
    }
    return out;
}

std::string hist_csv(const std::vector<dmsim::HistogramBin>& bins) {
    std::string out = "center,density,normal_density\n";
    for (const auto& b : bins) {
        out += dmsim::csv_double(b.center);
        out += ',';
        out += dmsim::csv_double(b.density);
        out += ',';
        out += dmsim::csv_double(b.normal_density);
        out += '\n';
    }
    return out;
}

void run_equilibrium_cmd(const dmsim::Config& cfg, dmsim::ArtifactWriter& writer) {
    dmsim::EquilibriumConfig eq = cfg.equilibrium;
    eq.seed = cfg.seed;
    const dmsim::PriceSeries series = dmsim::run_equilibrium(eq);
    writer.write("prices.csv", prices_csv(series));
    if (series.values.size() < 2)
        throw NoStatisticsError("run produced no returns (collapsed or zero steps)");
    const dmsim::ReturnSeries rs = dmsim::make_returns(
        series, 1,
        cfg.returns.log_returns ? dmsim::ReturnKind::log : dmsim::ReturnKind::relative);
    writer.write("returns.csv", returns_csv(rs, series.t0));
    const dmsim::MomentSummary m = dmsim::moment_summary(rs.values);
    std::string summary = "n,mean,variance,skewness,kurtosis,collapsed\n";
    summary += std::to_string(m.n) + ',' + dmsim::csv_double(m.mean) + ',' +
               dmsim::csv_double(m.variance) + ',' + dmsim::csv_double(m.skewness) + ',' +
               dmsim::csv_double(m.kurtosis) + ',' + (series.collapsed ? "1" : "0") + '\n';
    writer.write("summary.csv", summary);
}

void run_orderbook_cmd(dmsim::Config cfg, dmsim::ArtifactWriter& writer, bool baseline) {
    cfg.orderbook.seed = cfg.seed;
    if (baseline) cfg.orderbook.decision_cfg.count = 0;
    const dmsim::SimOutput out = dmsim::run_orderbook_sim(cfg.orderbook);
    writer.write("prices.csv", prices_csv(out.prices));

    if (static_cast<std::int64_t>(out.prices.values.size()) <= cfg.returns.interval)
        throw NoStatisticsError("price series shorter than the return interval");
    const dmsim::ReturnSeries rs = dmsim::make_returns(
        out.prices, cfg.returns.interval,
        cfg.returns.log_returns ? dmsim::ReturnKind::log : dmsim::ReturnKind::relative);
    writer.write("returns.csv", returns_csv(rs, out.prices.t0));
    writer.write("hist.csv", hist_csv(dmsim::histogram(rs.values, cfg.hist.bins)));

    std::string imb = "t,imbalance\n";
    for (std::size_t i = 0; i < out.imbalance.size(); ++i) {
        imb += std::to_string(out.imbalance_times[i]) + ',' +
               dmsim::csv_double(out.imbalance[i]) + '\n';
    }
    writer.write("imbalance.csv", imb);

    const dmsim::MomentSummary m = dmsim::moment_summary(rs.values);
    const dmsim::ImbalanceStats is = dmsim::imbalance_stats(out.imbalance);
    std::string summary =
        "n,mean,variance,skewness,kurtosis,imb_variance,imb_lag1_autocorr,"
        "imb_longest_run,trades,empty_book_seconds\n";
    summary += std::to_string(m.n) + ',' + dmsim::csv_double(m.mean) + ',' +
               dmsim::csv_double(m.variance) + ',' + dmsim::csv_double(m.skewness) + ',' +
               dmsim::csv_double(m.kurtosis) + ',' + dmsim::csv_double(is.variance) + ',' +
               dmsim::csv_double(is.lag1_autocorr) + ',' +
               std::to_string(is.longest_one_sided_run) + ',' + std::to_string(out.trades) +
               ',' + std::to_string(out.empty_book_seconds) + '\n';
    writer.write("summary.csv", summary);

    if (cfg.orderbook.log_events) {
        std::string events = "time,event,side,price,volume,order_id\n";
        for (const dmsim::EventRecord& e : out.events) {
            events += std::to_string(e.time);
            events += ',';
            events += dmsim::to_string(e.kind);
            events += ',';
            events += e.side == dmsim::Side::buy ? "buy" : "sell";
            events += ',';
            events += dmsim::csv_double(static_cast<double>(e.price_tick) *
                                        cfg.orderbook.tick_size);
            events += ',';
            events += std::to_string(e.volume);
            events += ',';
            events += std::to_string(e.order_id);
            events += '\n';
        }
        writer.write("events.csv", events);
    }
}

void run_sweep_eq_cmd(const dmsim::Config& cfg, dmsim::ArtifactWriter& writer) {
    dmsim::EquilibriumConfig base = cfg.equilibrium;
    base.steps = cfg.sweep.steps;
    base.seed = cfg.seed;
    const dmsim::SweepResult result = dmsim::sweep_phase_diagram(
        cfg.sweep.alpha, cfg.sweep.beta, cfg.sweep.seeds, base, cfg.threads);
    std::string out = "alpha,beta,ln_mean_S,n_collapsed\n";
    for (std::size_t ai = 0; ai < result.alpha_grid.size(); ++ai) {
        for (std::size_t bi = 0; bi < result.beta_grid.size(); ++bi) {
            const dmsim::SweepCell& cell = result.cell(ai, bi);
            out += dmsim::csv_double(result.alpha_grid[ai]) + ',' +
                   dmsim::csv_double(result.beta_grid[bi]) + ',' +
                   dmsim::csv_double(cell.mean_log_terminal_price) + ',' +
                   std::to_string(cell.n_collapsed) + '\n';
        }
    }
    writer.write("sweep.csv", out);
}

void run_sweep_abm_cmd(const dmsim::Config& cfg, dmsim::ArtifactWriter& writer) {
    dmsim::OrderBookSimConfig base = cfg.orderbook;
    base.horizon = cfg.sweep.horizon;
    base.seed = cfg.seed;
    const dmsim::SweepResult result =
        dmsim::sweep_alpha_abm(cfg.sweep.alpha_abm, cfg.sweep.seeds, base, cfg.threads);
    std::string out = "alpha_abm,mean_S,n_seeds\n";
    for (std::size_t i = 0; i < result.alpha_grid.size(); ++i) {
        out += dmsim::csv_double(result.alpha_grid[i]) + ',' +
               dmsim::csv_double(std::exp(result.cells[i].mean_log_terminal_price)) + ',' +
               std::to_string(result.cells[i].n_seeds) + '\n';
    }
    writer.write("sweep.csv", out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based market simulator: equilibrium and order-book pricing"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* eq_cmd = app.add_subcommand("equilibrium", "One supply-demand balance run");
    std::int64_t eq_steps = -1;
    add_common_options(eq_cmd, common);
    eq_cmd->add_option("--steps", eq_steps, "Number of simulation steps");

    auto* ob_cmd = app.add_subcommand("orderbook", "One order-book market run");
    auto* base_cmd = app.add_subcommand("baseline",
                                        "Order-book run with decision traders disabled");
    std::int64_t ob_horizon = -1;
    bool ob_events = false;
    for (CLI::App* cmd : {ob_cmd, base_cmd}) {
        add_common_options(cmd, common);
        cmd->add_option("--horizon", ob_horizon, "Simulated seconds including warm-up");
        cmd->add_flag("--events", ob_events, "Write the append-only event log");
    }

    auto* sweep_eq_cmd = app.add_subcommand("sweep-eq", "(alpha, beta) phase diagram");
    auto* sweep_abm_cmd = app.add_subcommand("sweep-abm", "Adjustment-rate sweep (order book)");
    std::string grid_alpha, grid_beta, grid_abm;
    int sweep_seeds = -1;
    std::int64_t sweep_steps = -1, sweep_horizon = -1;
    unsigned threads = 0;
    bool threads_given = false;
    for (CLI::App* cmd : {sweep_eq_cmd, sweep_abm_cmd}) {
        add_common_options(cmd, common);
        cmd->add_option("--seeds", sweep_seeds, "Replicates per cell");
        cmd->add_option("--threads", threads, "Worker threads (0 = hardware)")
            ->each([&threads_given](const std::string&) { threads_given = true; });
    }
    sweep_eq_cmd->add_option("--alpha", grid_alpha, "Grid: start:stop:count or v1,v2,...");
    sweep_eq_cmd->add_option("--beta", grid_beta, "Grid: start:stop:count or v1,v2,...");
    sweep_eq_cmd->add_option("--steps", sweep_steps, "Steps per run");
    sweep_abm_cmd->add_option("--alpha-abm", grid_abm,
                              "Rates: start:stop:count (geometric) or v1,v2,...");
    sweep_abm_cmd->add_option("--horizon", sweep_horizon, "Seconds per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        dmsim::Config cfg = load_config(common);
        if (eq_steps >= 0) cfg.equilibrium.steps = eq_steps;
        if (ob_horizon >= 0) cfg.orderbook.horizon = ob_horizon;
        if (ob_events) cfg.orderbook.log_events = true;
        if (sweep_seeds >= 1) cfg.sweep.seeds = sweep_seeds;
        if (sweep_steps >= 0) cfg.sweep.steps = sweep_steps;
        if (sweep_horizon >= 1) cfg.sweep.horizon = sweep_horizon;
        if (threads_given) cfg.threads = threads;
        if (!grid_alpha.empty()) cfg.sweep.alpha = dmsim::detail::parse_grid(grid_alpha, false);
        if (!grid_beta.empty()) cfg.sweep.beta = dmsim::detail::parse_grid(grid_beta, false);
        if (!grid_abm.empty()) cfg.sweep.alpha_abm = dmsim::detail::parse_grid(grid_abm, true);
        cfg.validate();

        dmsim::ArtifactWriter writer(common.out_dir);
        std::string command;
        if (app.got_subcommand(eq_cmd)) {
            command = "equilibrium";
            run_equilibrium_cmd(cfg, writer);
        } else if (app.got_subcommand(ob_cmd)) {
            command = "orderbook";
            run_orderbook_cmd(cfg, writer, false);
        } else if (app.got_subcommand(base_cmd)) {
            command = "baseline";
            run_orderbook_cmd(cfg, writer, true);
        } else if (app.got_subcommand(sweep_eq_cmd)) {
            command = "sweep-eq";
            run_sweep_eq_cmd(cfg, writer);
        } else {
            command = "sweep-abm";
            run_sweep_abm_cmd(cfg, writer);
        }
        write_run_meta(writer, cfg, command);
        std::cout << command << ": wrote " << writer.checksums().size()
                  << " artifacts to " << writer.dir().string() << "\n";
        return kExitOk;
    } catch (const dmsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoStatisticsError& e) {
        std::cerr << "no statistics: " << e.what() << "\n";
        return kExitNoStatistics;
    } catch (const dmsim::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

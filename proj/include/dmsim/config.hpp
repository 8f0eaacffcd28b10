#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmsim/equilibrium.hpp"
#include "dmsim/simulation.hpp"

namespace dmsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Return-series construction settings (order-book experiments).
struct ReturnsConfig {
    std::int64_t interval = 120;  ///< seconds per non-overlapping window
    bool log_returns = false;     ///< relative returns by default
};

struct HistConfig {
    int bins = 61;
};

/// Sweep grids and desk-scale run lengths. Full paper scale is reached by
/// raising seeds/steps/horizon.
struct SweepConfig {
    std::vector<double> alpha;      ///< equilibrium grid, default 20 values on [0.05, 1]
    std::vector<double> beta;       ///< equilibrium grid, default 20 values on [0.05, 1]
    std::vector<double> alpha_abm;  ///< default {1e-6 .. 1e-2}, geometric
    int seeds = 10;
    std::int64_t steps = 10'000;      ///< equilibrium sweep run length
    std::int64_t horizon = 200'000;   ///< order-book sweep run length
};

/// Evenly spaced grid, endpoints included.
[[nodiscard]] inline std::vector<double> linear_grid(double start, double stop, int count) {
    if (count < 1) throw std::invalid_argument("linear_grid: count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            count == 1 ? start : start + (stop - start) * i / (count - 1);
    }
    return out;
}

/// Geometrically spaced grid, endpoints included. Requires positive bounds.
[[nodiscard]] inline std::vector<double> geometric_grid(double start, double stop, int count) {
    if (count < 1) throw std::invalid_argument("geometric_grid: count must be >= 1");
    if (!(start > 0.0 && stop > 0.0))
        throw std::invalid_argument("geometric_grid: bounds must be positive");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double ratio = stop / start;
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            count == 1 ? start : start * std::pow(ratio, static_cast<double>(i) / (count - 1));
    }
    return out;
}

/// Everything the command line can run. One master seed; per-run seeds are
/// derived from it.
struct Config {
    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    EquilibriumConfig equilibrium{};
    OrderBookSimConfig orderbook{};
    ReturnsConfig returns{};
    HistConfig hist{};
    SweepConfig sweep{};

    Config() {
        // The decay regime of the phase diagram sits at high inverse
        // tolerance, so the beta axis is sampled geometrically.
        sweep.alpha = linear_grid(0.05, 1.0, 20);
        sweep.beta = geometric_grid(0.05, 8.0, 20);
        sweep.alpha_abm = geometric_grid(1e-6, 1e-2, 5);
    }

    void validate() const {
        equilibrium.validate();
        orderbook.validate();
        if (returns.interval < 1) throw ConfigError("returns.interval must be >= 1");
        if (hist.bins < 2) throw ConfigError("hist.bins must be >= 2");
        if (sweep.seeds < 1) throw ConfigError("sweep.seeds must be >= 1");
        if (sweep.steps < 0) throw ConfigError("sweep.steps must be >= 0");
        if (sweep.horizon < 1) throw ConfigError("sweep.horizon must be >= 1");
        if (sweep.alpha.empty() || sweep.beta.empty() || sweep.alpha_abm.empty())
            throw ConfigError("sweep grids must be nonempty");
    }
};

namespace detail {

[[nodiscard]] inline std::string trim(std::string_view sv) {
    std::size_t b = 0, e = sv.size();
    while (b < e && std::isspace(static_cast<unsigned char>(sv[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(sv[e - 1]))) --e;
    return std::string(sv.substr(b, e - b));
}

[[nodiscard]] inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[nodiscard]] inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("trailing characters in number: '" + s + "'");
    return v;
}

[[nodiscard]] inline std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("trailing characters in integer: '" + s + "'");
    return v;
}

[[nodiscard]] inline std::uint64_t parse_uint(const std::string& s) {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an unsigned integer: '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("trailing characters in integer: '" + s + "'");
    return v;
}

[[nodiscard]] inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("not a boolean (true/false): '" + s + "'");
}

/// Grid values from either `a,b,c` or `start:stop:count`. Range syntax is
/// linear unless `geometric` is set (used for the adjustment-rate sweep,
/// whose natural spacing is logarithmic).
[[nodiscard]] inline std::vector<double> parse_grid(const std::string& s, bool geometric) {
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(trim(item));
        if (parts.size() != 3)
            throw std::invalid_argument("range must be start:stop:count: '" + s + "'");
        const double start = parse_double(parts[0]);
        const double stop = parse_double(parts[1]);
        const auto count = static_cast<int>(parse_int(parts[2]));
        return geometric ? geometric_grid(start, stop, count) : linear_grid(start, stop, count);
    }
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    if (out.empty()) throw std::invalid_argument("empty grid: '" + s + "'");
    return out;
}

[[nodiscard]] inline std::string format_grid(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

struct KeyBinding {
    const char* name;
    std::function<std::string(const Config&)> get;
    std::function<void(Config&, const std::string&)> set;
};

inline void check_range(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

inline const std::vector<KeyBinding>& config_keys() {
    static const std::vector<KeyBinding> keys = [] {
        std::vector<KeyBinding> k;
        const auto add = [&](const char* name, auto get, auto set) {
            k.push_back(KeyBinding{name, get, set});
        };

        add("run.seed",
            [](const Config& c) { return std::to_string(c.seed); },
            [](Config& c, const std::string& v) { c.seed = parse_uint(v); });
        add("run.threads",
            [](const Config& c) { return std::to_string(c.threads); },
            [](Config& c, const std::string& v) {
                c.threads = static_cast<unsigned>(parse_uint(v));
            });

        add("equilibrium.n_agents",
            [](const Config& c) { return std::to_string(c.equilibrium.n_agents); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1 && n % 2 == 1, "must be a positive odd integer");
                c.equilibrium.n_agents = static_cast<int>(n);
            });
        add("equilibrium.steps",
            [](const Config& c) { return std::to_string(c.equilibrium.steps); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.equilibrium.steps = n;
            });
        add("equilibrium.alpha",
            [](const Config& c) { return format_double(c.equilibrium.params.alpha); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x >= 0.0 && x <= 1.0, "must lie in [0, 1]");
                c.equilibrium.params.alpha = x;
            });
        add("equilibrium.beta",
            [](const Config& c) { return format_double(c.equilibrium.params.beta); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x >= 0.0, "must be >= 0");
                c.equilibrium.params.beta = x;
            });
        add("equilibrium.dt",
            [](const Config& c) { return format_double(c.equilibrium.params.dt); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0, "must be > 0");
                c.equilibrium.params.dt = x;
            });
        add("equilibrium.initial_price",
            [](const Config& c) { return format_double(c.equilibrium.initial_price); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0, "must be > 0");
                c.equilibrium.initial_price = x;
            });
        add("equilibrium.initial_buyers",
            [](const Config& c) { return std::to_string(c.equilibrium.initial_buyers); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.equilibrium.initial_buyers = static_cast<int>(n);
            });

        add("orderbook.horizon",
            [](const Config& c) { return std::to_string(c.orderbook.horizon); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.horizon = n;
            });
        add("orderbook.warmup",
            [](const Config& c) { return std::to_string(c.orderbook.warmup); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.orderbook.warmup = n;
            });
        add("orderbook.initial_price",
            [](const Config& c) { return format_double(c.orderbook.initial_price); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0, "must be > 0");
                c.orderbook.initial_price = x;
            });
        add("orderbook.tick_size",
            [](const Config& c) { return format_double(c.orderbook.tick_size); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0, "must be > 0");
                c.orderbook.tick_size = x;
            });
        add("orderbook.snapshot_every",
            [](const Config& c) { return std::to_string(c.orderbook.snapshot_every); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.snapshot_every = n;
            });
        add("orderbook.snapshot_depth",
            [](const Config& c) { return std::to_string(c.orderbook.snapshot_depth); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.snapshot_depth = static_cast<int>(n);
            });
        add("orderbook.log_events",
            [](const Config& c) { return c.orderbook.log_events ? "true" : "false"; },
            [](Config& c, const std::string& v) { c.orderbook.log_events = parse_bool(v); });

        add("random.count",
            [](const Config& c) { return std::to_string(c.orderbook.random_cfg.count); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.orderbook.random_cfg.count = static_cast<int>(n);
            });
        add("random.activation_prob",
            [](const Config& c) { return format_double(c.orderbook.random_cfg.activation_prob); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0 && x <= 1.0, "must lie in (0, 1]");
                c.orderbook.random_cfg.activation_prob = x;
            });
        add("random.price_stddev",
            [](const Config& c) { return format_double(c.orderbook.random_cfg.price_stddev); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0, "must be > 0");
                c.orderbook.random_cfg.price_stddev = x;
            });
        add("random.order_volume",
            [](const Config& c) { return std::to_string(c.orderbook.random_cfg.order_volume); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.random_cfg.order_volume = n;
            });
        add("random.lifetime",
            [](const Config& c) { return std::to_string(c.orderbook.random_cfg.lifetime); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.random_cfg.lifetime = n;
            });

        add("decision.count",
            [](const Config& c) { return std::to_string(c.orderbook.decision_cfg.count); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.orderbook.decision_cfg.count = static_cast<int>(n);
            });
        add("decision.activation_prob",
            [](const Config& c) {
                return format_double(c.orderbook.decision_cfg.activation_prob);
            },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x > 0.0 && x <= 1.0, "must lie in (0, 1]");
                c.orderbook.decision_cfg.activation_prob = x;
            });
        add("decision.alpha_abm",
            [](const Config& c) { return format_double(c.orderbook.decision_cfg.alpha_abm); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x >= 0.0 && x <= 1.0, "must lie in [0, 1]");
                c.orderbook.decision_cfg.alpha_abm = x;
            });
        add("decision.beta",
            [](const Config& c) { return format_double(c.orderbook.decision_cfg.beta); },
            [](Config& c, const std::string& v) {
                const double x = parse_double(v);
                check_range(x >= 0.0, "must be >= 0");
                c.orderbook.decision_cfg.beta = x;
            });
        add("decision.order_volume",
            [](const Config& c) { return std::to_string(c.orderbook.decision_cfg.order_volume); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.orderbook.decision_cfg.order_volume = n;
            });

        add("returns.interval",
            [](const Config& c) { return std::to_string(c.returns.interval); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.returns.interval = n;
            });
        add("returns.log",
            [](const Config& c) { return c.returns.log_returns ? "true" : "false"; },
            [](Config& c, const std::string& v) { c.returns.log_returns = parse_bool(v); });

        add("hist.bins",
            [](const Config& c) { return std::to_string(c.hist.bins); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 2, "must be >= 2");
                c.hist.bins = static_cast<int>(n);
            });

        add("sweep.alpha",
            [](const Config& c) { return format_grid(c.sweep.alpha); },
            [](Config& c, const std::string& v) { c.sweep.alpha = parse_grid(v, false); });
        add("sweep.beta",
            [](const Config& c) { return format_grid(c.sweep.beta); },
            [](Config& c, const std::string& v) { c.sweep.beta = parse_grid(v, false); });
        add("sweep.alpha_abm",
            [](const Config& c) { return format_grid(c.sweep.alpha_abm); },
            [](Config& c, const std::string& v) { c.sweep.alpha_abm = parse_grid(v, true); });
        add("sweep.seeds",
            [](const Config& c) { return std::to_string(c.sweep.seeds); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.sweep.seeds = static_cast<int>(n);
            });
        add("sweep.steps",
            [](const Config& c) { return std::to_string(c.sweep.steps); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 0, "must be >= 0");
                c.sweep.steps = n;
            });
        add("sweep.horizon",
            [](const Config& c) { return std::to_string(c.sweep.horizon); },
            [](Config& c, const std::string& v) {
                const auto n = parse_int(v);
                check_range(n >= 1, "must be >= 1");
                c.sweep.horizon = n;
            });
        return k;
    }();
    return keys;
}

[[nodiscard]] inline const KeyBinding* find_key(const std::string& name) {
    for (const KeyBinding& k : config_keys()) {
        if (name == k.name) return &k;
    }
    return nullptr;
}

}  // namespace detail

/// Applies one `key = value` assignment.
inline void apply_key_value(Config& cfg, const std::string& key, const std::string& value,
                            const std::string& where) {
    const detail::KeyBinding* binding = detail::find_key(key);
    if (binding == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
        binding->set(cfg, value);
    } catch (const std::exception& e) {
        throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
}

/// Applies a `--set key=value` override.
inline void apply_override(Config& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    apply_key_value(cfg, detail::trim(assignment.substr(0, eq)),
                    detail::trim(assignment.substr(eq + 1)), "--set");
}

/// Parses the flat `section.key = value` format. Blank lines and lines
/// starting with '#' are ignored; unknown keys are errors. An empty file
/// yields all defaults.
[[nodiscard]] inline Config parse_config_text(std::string_view text,
                                              const std::string& origin = "config") {
    Config cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        apply_key_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)),
                        where);
    }
    return cfg;
}

/// Reads and parses a config file.
[[nodiscard]] inline Config parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

/// Canonical emission: one `key = value` line per key, in schema order.
/// parse_config_text(emit_config(c)) reproduces c exactly.
[[nodiscard]] inline std::string emit_config(const Config& cfg) {
    std::string out;
    for (const detail::KeyBinding& k : detail::config_keys()) {
        out += k.name;
        out += " = ";
        out += k.get(cfg);
        out += '\n';
    }
    return out;
}

}  // namespace dmsim

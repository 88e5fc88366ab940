#include "kgscatter/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "kgscatter/bound_states.hpp"
#include "kgscatter/errors.hpp"
#include "kgscatter/ode_oracle.hpp"
#include "kgscatter/potential.hpp"
#include "kgscatter/scattering.hpp"

namespace kgscatter::cli {

namespace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// validate thresholds
constexpr double kMaxCoefficientError = 1e-5;
constexpr double kMaxUnitarityDefect = 1e-8;
constexpr double kMaxPairingGap = 1e-6;

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "nan"; }

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> as_list(const json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array() && !j.empty()) {
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError(fmt::format("config key '{}' must hold numbers", key));
            out.push_back(v.get<double>());
        }
        return out;
    }
    throw ConfigError(fmt::format("config key '{}' must be a number or a non-empty array", key));
}

struct Explicit {
    std::set<std::string> keys;
    bool has(const std::string& k) const { return keys.count(k) > 0; }
};

void apply_json(RunConfig& cfg, const json& j, Explicit& seen) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "mass") cfg.mass = value.get<double>();
            else if (key == "alpha") cfg.alpha = as_list(value, key);
            else if (key == "q") cfg.q = as_list(value, key);
            else if (key == "lambda") cfg.lambda = as_list(value, key);
            else if (key == "v0") cfg.v0 = as_list(value, key);
            else if (key == "emin") cfg.energy.min = value.get<double>();
            else if (key == "emax") cfg.energy.max = value.get<double>();
            else if (key == "en") cfg.energy.n = value.get<int>();
            else if (key == "xmin") cfg.x.min = value.get<double>();
            else if (key == "xmax") cfg.x.max = value.get<double>();
            else if (key == "xn") cfg.x.n = value.get<int>();
            else if (key == "grid_n") cfg.grid_n = value.get<int>();
            else if (key == "figure") cfg.figure = value.get<int>();
            else if (key == "out") cfg.out = value.get<std::string>();
            else if (key == "format") cfg.format = value.get<std::string>();
            else if (key == "keep_going") cfg.keep_going = value.get<bool>();
            else if (key == "no_oracle") cfg.no_oracle = value.get<bool>();
            else throw ConfigError(fmt::format("unknown config key '{}'", key));
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("config key '{}': {}", key, e.what()));
        }
        seen.keys.insert(key);
    }
}

// Figure presets for the potential profiles; lambda defaults to 2.
void apply_figure(RunConfig& cfg, const Explicit& seen) {
    if (!cfg.figure) return;
    std::vector<double> q, alpha;
    switch (*cfg.figure) {
        case 1: q = {1.0}; alpha = {1.0, 2.0, 3.0}; break;
        case 2: q = {3.0}; alpha = {1.0, 2.0, 3.0}; break;
        case 3: q = {1.0, 3.0, 5.0}; alpha = {1.0}; break;
        case 4: q = {1.0, 0.75, 0.5}; alpha = {0.05}; break;
        default: throw ConfigError(fmt::format("unknown figure {}", *cfg.figure));
    }
    if (!seen.has("q")) cfg.q = q;
    if (!seen.has("alpha")) cfg.alpha = alpha;
    if (*cfg.figure == 4) {
        if (!seen.has("xmin")) cfg.x.min = -100.0;
        if (!seen.has("xmax")) cfg.x.max = 100.0;
    }
}

struct ParamSet {
    double strength;  // lambda or v0
    double q;
    double alpha;
};

std::vector<ParamSet> product(const std::vector<double>& s, const std::vector<double>& q,
                              const std::vector<double>& alpha) {
    std::vector<ParamSet> out;
    for (double a : s)
        for (double b : q)
            for (double c : alpha) out.push_back({a, b, c});
    return out;
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KGSCATTER_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) {
            throw ConfigError(fmt::format("KGSCATTER_THREADS='{}' is not a positive integer", env));
        }
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void check_common(const RunConfig& cfg) {
    if (!(cfg.mass > 0.0)) throw ConfigError("--mass must be positive");
    for (double a : cfg.alpha)
        if (!(a > 0.0)) throw ConfigError("--alpha values must be positive");
    for (double q : cfg.q)
        if (!(q > 0.0)) throw ConfigError("--q values must be positive");
    if (cfg.format != "csv" && cfg.format != "json") {
        throw ConfigError(fmt::format("--format must be csv or json, got '{}'", cfg.format));
    }
    if (cfg.lambda && cfg.v0) throw ConfigError("set exactly one of --lambda and --v0");
}

// Tabular output shared by potential/scatter/bound.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<int> set_ids;
    json meta;
};

void write_table(std::ostream& os, const Table& t, const std::string& format, bool with_ids) {
    if (format == "csv") {
        for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
        if (with_ids) os << ",params";
        os << '\n';
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
                os << (c ? "," : "");
                // integral columns (n, nodes) print without exponent
                const double v = t.rows[r][c];
                if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15 &&
                    (t.columns[c] == "n" || t.columns[c] == "nodes")) {
                    os << static_cast<long long>(v);
                } else {
                    os << num(v);
                }
            }
            if (with_ids) os << ',' << t.set_ids[r];
            os << '\n';
        }
        return;
    }
    json rows = json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        json row = json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const double v = t.rows[r][c];
            if (t.columns[c] == "n" || t.columns[c] == "nodes") {
                row[t.columns[c]] = std::isfinite(v) ? json(static_cast<long long>(v)) : json(nullptr);
            } else {
                row[t.columns[c]] = num_json(v);
            }
        }
        if (with_ids) row["params"] = t.set_ids[r];
        rows.push_back(row);
    }
    os << json{{"meta", t.meta}, {"rows", rows}}.dump(2) << '\n';
}

json meta_block(const std::string& command, const RunConfig& cfg, const std::vector<ParamSet>& sets,
                const char* strength_key) {
    json params = json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        params.push_back({{"id", i},
                          {strength_key, sets[i].strength},
                          {"q", sets[i].q},
                          {"alpha", sets[i].alpha},
                          {"mass", cfg.mass}});
    }
    return {{"command", command},
            {"version", kVersion},
            {"params", params},
            {"tolerances",
             {{"unitarity_defect", kMaxUnitarityDefect},
              {"coefficient_error", kMaxCoefficientError},
              {"pairing_gap", kMaxPairingGap}}}};
}

class Output {
  public:
    Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError(fmt::format("cannot open output '{}'", path));
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

  private:
    std::ofstream file_;
    std::ostream* stream_;
};

int cmd_potential(const RunConfig& cfg, std::ostream& out) {
    const bool well = cfg.v0.has_value();
    const auto sets = product(well ? *cfg.v0 : cfg.lambda.value_or(std::vector<double>{2.0}), cfg.q,
                              cfg.alpha);
    Table t{{"x", "V"}, {}, {}, meta_block("potential", cfg, sets, well ? "v0" : "lambda")};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::variant<PotentialParams, WellParams> params;
        if (well) {
            params = WellParams{sets[i].strength, sets[i].q, sets[i].alpha, cfg.mass};
        } else {
            params = PotentialParams{sets[i].strength, sets[i].q, sets[i].alpha, cfg.mass};
        }
        std::vector<ProfilePoint> pts;
        try {
            pts = profile(params, cfg.x.min, cfg.x.max, cfg.x.n);
        } catch (const BadRange& e) {
            throw ConfigError(e.what());
        }
        for (const auto& p : pts) {
            t.rows.push_back({p.x, p.v});
            t.set_ids.push_back(static_cast<int>(i));
        }
    }
    Output o(cfg.out, out);
    write_table(o.get(), t, cfg.format, sets.size() > 1);
    return kSuccess;
}

int cmd_scatter(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.v0) throw ConfigError("scatter takes --lambda, not --v0");
    if (cfg.energy.n < 1) throw ConfigError("energy grid is empty");
    const auto grid = make_grid(cfg.energy);
    for (double e : grid) {
        if (!(e > cfg.mass)) throw ConfigError(fmt::format("E = {} is not above the mass {}", e, cfg.mass));
    }
    const auto sets = product(cfg.lambda.value_or(std::vector<double>{2.0}), cfg.q, cfg.alpha);
    const unsigned threads = sweep_threads();

    Table t{{"E", "R", "T", "defect"}, {}, {}, meta_block("scatter", cfg, sets, "lambda")};
    double max_defect = 0.0;
    int failed = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const PotentialParams p{sets[i].strength, sets[i].q, sets[i].alpha, cfg.mass};
        for (const auto& row : sweep(p, grid, threads)) {
            const double nan = std::nan("");
            if (row.result) {
                max_defect = std::max(max_defect, row.result->unitarity_defect);
                t.rows.push_back({row.energy, row.result->reflection, row.result->transmission,
                                  row.result->unitarity_defect});
            } else {
                ++failed;
                err << fmt::format("E = {}: {}\n", num(row.energy), row.error);
                t.rows.push_back({row.energy, nan, nan, nan});
            }
            t.set_ids.push_back(static_cast<int>(i));
        }
    }
    Output o(cfg.out, out);
    write_table(o.get(), t, cfg.format, sets.size() > 1);
    err << fmt::format("points={} failed={} max_defect={:.3e}\n", t.rows.size(), failed, max_defect);
    return failed > 0 && !cfg.keep_going ? kComputationError : kSuccess;
}

int cmd_bound(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.lambda) throw ConfigError("bound takes --v0, not --lambda");
    if (cfg.grid_n < 64) throw ConfigError("--grid-n must be at least 64");
    for (double v : cfg.v0.value_or(std::vector<double>{}))
        if (!(v >= 0.0)) throw ConfigError("--v0 values must be non-negative");
    const auto sets = product(cfg.v0.value_or(std::vector<double>{10.0}), cfg.q, cfg.alpha);

    Table t{{"n", "E", "residual", "nodes"}, {}, {}, meta_block("bound", cfg, sets, "v0")};
    bool lost = false;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const WellParams w{sets[i].strength, sets[i].q, sets[i].alpha, cfg.mass};
        BoundSearchOptions opts;
        opts.grid_n = cfg.grid_n;
        opts.cross_validate = !cfg.no_oracle;
        const auto res = find_bound_states(w, opts);
        for (const auto& l : res.lost) err << "root lost: " << l << '\n';
        lost = lost || !res.lost.empty();
        for (std::size_t n = 0; n < res.energies.size(); ++n) {
            t.rows.push_back({static_cast<double>(n), res.energies[n], res.residuals[n],
                              static_cast<double>(res.node_counts[n])});
            t.set_ids.push_back(static_cast<int>(i));
            if (opts.cross_validate && !res.oracle_energies[n]) {
                err << fmt::format("warning: E = {} has no shooting partner\n", num(res.energies[n]));
            }
        }
    }
    Output o(cfg.out, out);
    write_table(o.get(), t, cfg.format, sets.size() > 1);
    return lost ? kComputationError : kSuccess;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    struct Case {
        double lambda, q, alpha;
    };
    const std::vector<Case> battery{{2.0, 1.0, 1.0}, {1.5, 0.5, 2.0}, {3.0, 5.0, 0.5},
                                    {4.0, 0.5, 0.5}, {1.2, 2.0, 1.5}, {0.0, 1.0, 1.0}};
    const auto grid = make_grid({1.001 * cfg.mass, 4.0 * cfg.mass, 20});
    const bool oracle_on = !cfg.no_oracle;

    double max_r = 0.0, max_t = 0.0, max_defect = 0.0;
    json rows = json::array();
    bool computation_failed = false;
    for (const auto& c : battery) {
        const PotentialParams p{c.lambda, c.q, c.alpha, cfg.mass};
        double row_r = 0.0, row_t = 0.0, row_defect = 0.0;
        for (double e : grid) {
            try {
                const auto a = solve_matching(e, p);
                row_defect = std::max(row_defect, a.unitarity_defect);
                if (oracle_on) {
                    const auto o = oracle::integrate_scattering(e, p);
                    row_r = std::max(row_r, std::abs(a.reflection - o.reflection));
                    row_t = std::max(row_t, std::abs(a.transmission - o.transmission));
                }
            } catch (const Error&) {
                computation_failed = true;
                row_defect = INFINITY;
            }
        }
        max_r = std::max(max_r, row_r);
        max_t = std::max(max_t, row_t);
        max_defect = std::max(max_defect, row_defect);
        rows.push_back({{"lambda", c.lambda},
                        {"q", c.q},
                        {"alpha", c.alpha},
                        {"R_err", oracle_on ? num_json(row_r) : json(nullptr)},
                        {"T_err", oracle_on ? num_json(row_t) : json(nullptr)},
                        {"unitarity_defect", num_json(row_defect)}});
    }

    json pairing = nullptr;
    bool pairing_ok = true;
    if (oracle_on) {
        pairing = json::array();
        for (double v0 : {2.0, 10.0}) {
            const WellParams w{v0, 1.0, 1.0, cfg.mass};
            const auto res = find_bound_states(w, {});
            const auto numeric = oracle::find_bound_states_numeric(w);
            bool ok = res.energies.size() == numeric.size() && res.lost.empty();
            double gap = 0.0;
            for (std::size_t i = 0; ok && i < numeric.size(); ++i) {
                gap = std::max(gap, std::abs(res.energies[i] - numeric[i].energy));
                ok = res.node_counts[i] == numeric[i].nodes;
            }
            ok = ok && gap < kMaxPairingGap * cfg.mass;
            pairing_ok = pairing_ok && ok;
            pairing.push_back({{"v0", v0},
                               {"analytic", res.energies.size()},
                               {"oracle", numeric.size()},
                               {"max_gap", gap},
                               {"paired", ok}});
        }
    }

    const json report{{"max_R_err", oracle_on ? num_json(max_r) : json(nullptr)},
                      {"max_T_err", oracle_on ? num_json(max_t) : json(nullptr)},
                      {"max_unitarity_defect", num_json(max_defect)},
                      {"bound_state_pairing", pairing},
                      {"rows", rows},
                      {"meta",
                       {{"command", "validate"},
                        {"version", kVersion},
                        {"mass", cfg.mass},
                        {"tolerances",
                         {{"unitarity_defect", kMaxUnitarityDefect},
                          {"coefficient_error", kMaxCoefficientError},
                          {"pairing_gap", kMaxPairingGap}}}}}};
    Output o(cfg.out, out);
    o.get() << report.dump(2) << '\n';

    if (computation_failed) return kComputationError;
    const bool ok = max_defect < kMaxUnitarityDefect &&
                    (!oracle_on || (max_r < kMaxCoefficientError && max_t < kMaxCoefficientError && pairing_ok));
    return ok ? kSuccess : kValidationBreach;
}

}  // namespace

std::vector<double> make_grid(const GridSpec& g) {
    std::vector<double> out;
    if (g.n <= 0) return out;
    if (g.n == 1) return {g.min};
    out.reserve(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        out.push_back(i == g.n - 1 ? g.max : g.min + (g.max - g.min) * i / (g.n - 1));
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Klein-Gordon scattering and bound states for the q-deformed Poschl-Teller potential",
                 "kgscatter"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct Flags {
        double mass = 1.0;
        std::vector<double> alpha, q, lambda, v0;
        double emin = 0, emax = 0, xmin = 0, xmax = 0;
        int en = 0, xn = 0, grid_n = 0, figure = 0;
        std::string out, format, config;
        bool keep_going = false, no_oracle = false;
    } f;
    std::vector<std::pair<std::string, CLI::Option*>> tracked;

    auto add_common = [&](CLI::App* sub) {
        auto track = [&](const std::string& key, CLI::Option* opt) { tracked.emplace_back(key, opt); };
        track("mass", sub->add_option("--mass", f.mass, "particle mass m"));
        track("alpha", sub->add_option("--alpha", f.alpha, "range parameter(s)")->delimiter(','));
        track("q", sub->add_option("--q", f.q, "deformation parameter(s)")->delimiter(','));
        track("lambda", sub->add_option("--lambda", f.lambda, "barrier height parameter(s)")->delimiter(','));
        track("v0", sub->add_option("--v0", f.v0, "well depth(s)")->delimiter(','));
        track("emin", sub->add_option("--emin", f.emin, "lowest energy"));
        track("emax", sub->add_option("--emax", f.emax, "highest energy"));
        track("en", sub->add_option("--en", f.en, "number of energies"));
        track("xmin", sub->add_option("--xmin", f.xmin, "left end of the x grid"));
        track("xmax", sub->add_option("--xmax", f.xmax, "right end of the x grid"));
        track("xn", sub->add_option("--xn", f.xn, "number of x samples"));
        track("out", sub->add_option("--out", f.out, "output file (default stdout)"));
        track("format", sub->add_option("--format", f.format, "csv or json"));
        track("keep_going", sub->add_flag("--keep-going", f.keep_going, "exit 0 despite failed points"));
        track("no_oracle", sub->add_flag("--no-oracle", f.no_oracle, "skip direct-integration checks"));
        track("grid_n", sub->add_option("--grid-n", f.grid_n, "bound-state scan points"));
        track("figure", sub->add_option("--figure", f.figure, "potential figure preset 1-4"));
        sub->add_option("--config", f.config, "JSON config file; flags override it");
    };
    for (const char* name : {"potential", "scatter", "bound", "validate"}) {
        add_common(app.add_subcommand(name, fmt::format("{} subcommand", name)));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        err << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        app.exit(e, msg, msg);
        err << msg.str();
        return e.get_exit_code() == 0 ? kSuccess : kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        Explicit seen;
        if (!f.config.empty()) {
            std::ifstream in(f.config);
            if (!in) throw ConfigError(fmt::format("cannot read config '{}'", f.config));
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError(fmt::format("config '{}': {}", f.config, e.what()));
            }
            apply_json(cfg, j, seen);
        }
        for (const auto& [key, opt] : tracked) {
            if (opt->count() == 0) continue;
            seen.keys.insert(key);
            if (key == "mass") cfg.mass = f.mass;
            else if (key == "alpha") cfg.alpha = f.alpha;
            else if (key == "q") cfg.q = f.q;
            else if (key == "lambda") { cfg.lambda = f.lambda; cfg.v0.reset(); }
            else if (key == "v0") { cfg.v0 = f.v0; cfg.lambda.reset(); }
            else if (key == "emin") cfg.energy.min = f.emin;
            else if (key == "emax") cfg.energy.max = f.emax;
            else if (key == "en") cfg.energy.n = f.en;
            else if (key == "xmin") cfg.x.min = f.xmin;
            else if (key == "xmax") cfg.x.max = f.xmax;
            else if (key == "xn") cfg.x.n = f.xn;
            else if (key == "out") cfg.out = f.out;
            else if (key == "format") cfg.format = f.format;
            else if (key == "keep_going") cfg.keep_going = f.keep_going;
            else if (key == "no_oracle") cfg.no_oracle = f.no_oracle;
            else if (key == "grid_n") cfg.grid_n = f.grid_n;
            else if (key == "figure") cfg.figure = f.figure;
        }
        // both flags on the command line is a conflict, not an override
        if (seen.has("lambda") && seen.has("v0") && !cfg.lambda != !cfg.v0) {
            bool both_flags = false;
            int count = 0;
            for (const auto& [key, opt] : tracked)
                if ((key == "lambda" || key == "v0") && opt->count() > 0) ++count;
            both_flags = count == 2;
            if (both_flags) throw ConfigError("set exactly one of --lambda and --v0");
        }
        if (cfg.figure && command != "potential") throw ConfigError("--figure applies to potential only");
        apply_figure(cfg, seen);
        check_common(cfg);

        if (command == "potential") return cmd_potential(cfg, out);
        if (command == "scatter") return cmd_scatter(cfg, out, err);
        if (command == "bound") return cmd_bound(cfg, out, err);
        return cmd_validate(cfg, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const BadRange& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "computation error: " << e.what() << '\n';
        return kComputationError;
    }
}

}  // namespace kgscatter::cli

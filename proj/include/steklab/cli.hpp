#pragma once

// =============================================================================
// Workflow layer behind the command-line tool: run configuration (flat
// key = value config files, round-trippable), the four commands, and their
// CSV/JSON emitters. Exit-code contract:
//   0 success, 1 I/O, 2 domain/validity, 3 oracle disagreement,
//   4 invariant violation, 64 usage.
// =============================================================================

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steklab/ball.hpp"
#include "steklab/blockop.hpp"
#include "steklab/galerkin.hpp"
#include "steklab/io.hpp"
#include "steklab/verify.hpp"

namespace steklab {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_domain = 2,
    exit_oracle_disagreement = 3,
    exit_invariant = 4,
    exit_usage = 64
};

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;  // ball-spectrum | model-verify | tau-curves | modified
    double omega = 1.0;
    int n_max = 5;
    ModelDims dims{20, 20, 10};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    double window_lo = 0.0, window_hi = 0.0;
    int grid = 200;
    int basis = 16;
    int branches = 6;
    std::string side = "w1";  // tau-curves: w1 | v
    std::string format = "csv";
    std::string out;  // file (csv commands) or directory (model-verify)

    bool operator==(const RunConfig&) const = default;
};

// -----------------------------------------------------------------------------
// Config file: flat `key = value`, '#' comments, unknown keys rejected.
// -----------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw usage_error("bad numeric value for '" + key + "': " + s);
    }
}

inline long parse_long(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw usage_error("bad integer value for '" + key + "': " + s);
    }
}

}  // namespace detail

/// Applies one key = value pair; throws usage_error on unknown keys.
inline void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_long;
    if (key == "omega") {
        cfg.omega = parse_double(value, key);
    } else if (key == "n-max") {
        cfg.n_max = static_cast<int>(parse_long(value, key));
    } else if (key == "dims") {
        const auto p = detail::split(value, ',');
        if (p.size() != 3) throw usage_error("dims wants V,W1,W2");
        cfg.dims = {static_cast<std::size_t>(parse_long(detail::trim(p[0]), key)),
                    static_cast<std::size_t>(parse_long(detail::trim(p[1]), key)),
                    static_cast<std::size_t>(parse_long(detail::trim(p[2]), key))};
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& s : detail::split(value, ','))
            cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long(detail::trim(s), key)));
    } else if (key == "window") {
        const auto p = detail::split(value, ',');
        if (p.size() != 2) throw usage_error("window wants a,b");
        cfg.window_lo = parse_double(detail::trim(p[0]), key);
        cfg.window_hi = parse_double(detail::trim(p[1]), key);
    } else if (key == "grid") {
        cfg.grid = static_cast<int>(parse_long(value, key));
    } else if (key == "basis") {
        cfg.basis = static_cast<int>(parse_long(value, key));
    } else if (key == "branches") {
        cfg.branches = static_cast<int>(parse_long(value, key));
    } else if (key == "side") {
        cfg.side = value;
    } else if (key == "format") {
        cfg.format = value;
    } else if (key == "out") {
        cfg.out = value;
    } else {
        throw usage_error("unknown config key: " + key);
    }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot read config: " + path);
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw usage_error("config line without '=': " + line);
        config_set(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

/// Flat key = value rendering; parsing it back reproduces the config.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string s;
    s += "omega = " + format_g17(cfg.omega) + "\n";
    s += "n-max = " + std::to_string(cfg.n_max) + "\n";
    s += "dims = " + std::to_string(cfg.dims.v) + "," + std::to_string(cfg.dims.w1) + "," +
         std::to_string(cfg.dims.w2) + "\n";
    s += "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        s += (i ? "," : "") + std::to_string(cfg.seeds[i]);
    s += "\n";
    s += "window = " + format_g17(cfg.window_lo) + "," + format_g17(cfg.window_hi) + "\n";
    s += "grid = " + std::to_string(cfg.grid) + "\n";
    s += "basis = " + std::to_string(cfg.basis) + "\n";
    s += "branches = " + std::to_string(cfg.branches) + "\n";
    s += "side = " + cfg.side + "\n";
    s += "format = " + cfg.format + "\n";
    s += "out = " + cfg.out + "\n";
    return s;
}

inline RunConfig parse_config_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw usage_error("config line without '=': " + line);
        config_set(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

// -----------------------------------------------------------------------------
// Output path resolution.
// -----------------------------------------------------------------------------

inline std::string default_out_dir() {
    const char* env = std::getenv("STEKLAB_OUT_DIR");
    return env && *env ? env : ".";
}

inline std::string resolve_out(const RunConfig& cfg, const std::string& fallback_name) {
    if (!cfg.out.empty()) return cfg.out;
    return default_out_dir() + "/" + fallback_name;
}

// -----------------------------------------------------------------------------
// Commands.
// -----------------------------------------------------------------------------

inline void validate_common(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json")
        throw usage_error("format must be csv or json");
    if (cfg.omega <= 0.0) throw usage_error("omega must be positive");
}

/// ball-spectrum: one row per mode, sorted by lambda.
inline int cmd_ball_spectrum(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.n_max < 1) throw usage_error("n-max must be >= 1");
    const auto spec = ball_spectrum(cfg.omega, cfg.n_max);
    const std::string path = resolve_out(cfg, std::string("ball_spectrum.") + cfg.format);
    if (cfg.format == "csv") {
        csv_writer w({"family", "degree", "omega", "lambda", "multiplicity", "residual"});
        for (const auto& r : spec)
            w.row({to_string(r.mode.family), std::to_string(r.mode.degree), format_g17(r.omega),
                   format_g17(r.lambda), std::to_string(r.multiplicity),
                   format_g17(r.residual)});
        write_text_file(path, w.str());
    } else {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& r : spec)
            j.push_back({{"family", to_string(r.mode.family)},
                         {"degree", r.mode.degree},
                         {"omega", r.omega},
                         {"lambda", r.lambda},
                         {"multiplicity", r.multiplicity},
                         {"residual", r.residual}});
        write_text_file(path, j.dump(2) + "\n");
    }
    return exit_ok;
}

namespace detail {

inline nlohmann::ordered_json report_json(const ModelVerifyReport& r) {
    nlohmann::ordered_json j;
    j["model"] = {{"dims", {r.dims.v, r.dims.w1, r.dims.w2}},
                  {"seed", r.seed},
                  {"omega", r.omega}};
    auto eig = nlohmann::ordered_json::array();
    for (const auto& e : r.eigenvalues)
        eig.push_back({{"lambda", e.lambda},
                       {"multiplicity", e.multiplicity},
                       {"method", e.method},
                       {"side", e.side}});
    j["eigenvalues"] = eig;
    double emp_min = 0.0, emp_max = 0.0;
    if (!r.eigenvalues.empty()) {
        emp_min = r.eigenvalues.front().lambda;
        emp_max = r.eigenvalues.back().lambda;
    }
    j["gap"] = {{"c0", r.gap.c0},
                {"c_infty", r.gap.c_infty},
                {"neumann_norm", r.gap.neumann_norm},
                {"schur_radius", r.gap.schur_radius},
                {"c0_neumann", r.gap.c0_neumann},
                {"w1_window_radius", r.gap.w1_window_radius},
                {"c_infty_pd", r.gap.c_infty_pd},
                {"left_gap_certified", r.gap.left_gap_certified},
                {"empirical_min", emp_min},
                {"empirical_max", emp_max},
                {"check_pass", r.gap_check_result.pass},
                {"right_violations", r.gap_check_result.right_violations},
                {"left_violations", r.gap_check_result.left_violations}};
    nlohmann::ordered_json audits;
    for (const auto& a : r.audits)
        audits[a.name] = {{"pass", a.pass}, {"condition", a.condition}};
    j["audits"] = audits;
    nlohmann::ordered_json pen = {{"lambdas", r.penalty.lambdas},
                                  {"errors", r.penalty.errors},
                                  {"errors_decreasing", r.penalty.errors_decreasing}};
    if (r.penalty.slope)
        pen["slope"] = *r.penalty.slope;
    else
        pen["slope"] = nullptr;
    j["penalty"] = pen;
    auto side_json = [](const AgreementSide& a) {
        return nlohmann::ordered_json{{"window", {a.window_lo, a.window_hi}},
                                      {"direct", a.direct_in_window},
                                      {"fixed_point", a.fixed_point},
                                      {"max_deviation", a.max_deviation},
                                      {"counts_match", a.counts_match},
                                      {"pass", a.pass}};
    };
    j["agreement"] = {{"W1side", side_json(r.agreement_w1)},
                      {"Vside", side_json(r.agreement_v)},
                      {"tolerance", kAgreementTolerance}};
    j["checks"] = {{"abstract_lemma",
                    {{"ig_invertible", r.abstract_lemma.ig_invertible},
                     {"kernel_condition_ok", r.abstract_lemma.kernel_condition_ok},
                     {"max_mismatch", r.abstract_lemma.max_mismatch},
                     {"max_imaginary", r.abstract_lemma.max_imaginary},
                     {"negative_count_symmetric", r.abstract_lemma.negative_count_symmetric},
                     {"negative_count_general", r.abstract_lemma.negative_count_general},
                     {"spectra_match", r.abstract_lemma.spectra_match},
                     {"negative_counts_match", r.abstract_lemma.negative_counts_match}}},
                   {"w2_component_max", r.w2_component_max},
                   {"pass_non_audit", r.pass_non_audit}};
    return j;
}

}  // namespace detail

/// model-verify: one JSON report per seed; exit 0 only when every non-audit
/// check passes, exit 3 on fixed-point/direct disagreement beyond tolerance.
inline int cmd_model_verify(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.dims.w1 < 1) throw usage_error("dims: W1 must be >= 1");
    if (cfg.seeds.empty()) throw usage_error("seeds must be non-empty");
    const std::string dir = cfg.out.empty() ? default_out_dir() : cfg.out;
    std::filesystem::create_directories(dir);
    bool agreement_ok = true, rest_ok = true;
    for (std::uint64_t seed : cfg.seeds) {
        const DiscreteModel m = make_model(cfg.dims, seed, cfg.omega);
        const ModelVerifyReport rep = verify_model(m);
        write_text_file(dir + "/verify_seed_" + std::to_string(seed) + ".json",
                        detail::report_json(rep).dump(2) + "\n");
        agreement_ok = agreement_ok && rep.agreement_w1.pass && rep.agreement_v.pass;
        rest_ok = rest_ok && rep.pass_non_audit;
    }
    if (!agreement_ok) return exit_oracle_disagreement;
    return rest_ok ? exit_ok : exit_oracle_disagreement;
}

/// tau-curves: branch curves over a parameter grid plus the companion
/// fixed-point file.
inline int cmd_tau_curves(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.side != "w1" && cfg.side != "v") throw usage_error("side must be w1 or v");
    if (cfg.grid < 2) throw usage_error("grid must be >= 2");
    if (cfg.branches < 1) throw usage_error("branches must be >= 1");
    if (!(cfg.window_lo < cfg.window_hi)) throw usage_error("window a,b needs a < b");
    const SchurSide side = cfg.side == "w1" ? SchurSide::w1 : SchurSide::v;
    const DiscreteModel m = make_model(cfg.dims, cfg.seeds.empty() ? 0 : cfg.seeds.front(),
                                       cfg.omega);

    std::vector<double> grid(cfg.grid);
    for (int i = 0; i < cfg.grid; ++i)
        grid[i] = cfg.window_lo + (cfg.window_hi - cfg.window_lo) * i / (cfg.grid - 1.0);
    const auto curves = tau_curves(m, side, grid, static_cast<std::size_t>(cfg.branches));
    const auto fixed = fixed_point_eigensolve(m, side, {cfg.window_lo, cfg.window_hi},
                                              static_cast<std::size_t>(cfg.branches),
                                              static_cast<std::size_t>(cfg.grid));

    const std::string path = resolve_out(cfg, "tau_curves.csv");
    csv_writer w({"side", "branch", "lambda", "tau"});
    for (const auto& c : curves)
        for (const auto& [lam, tau] : c.samples)
            w.row({to_string(c.side), std::to_string(c.branch), format_g17(lam),
                   format_g17(tau)});
    write_text_file(path, w.str());

    std::string fixed_path = path;
    const auto dotpos = fixed_path.rfind('.');
    fixed_path = (dotpos == std::string::npos ? fixed_path : fixed_path.substr(0, dotpos)) +
                 "_fixed_points.csv";
    csv_writer wf({"side", "branch", "lambda_star"});
    for (const auto& r : fixed.roots)
        wf.row({to_string(side), std::to_string(r.branch), format_g17(r.location)});
    write_text_file(fixed_path, wf.str());
    return exit_ok;
}

/// modified: ScalarLB and SProjection spectra per degree with
/// convergence-study rows across basis sizes.
inline int cmd_modified(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.n_max < 1) throw usage_error("n-max must be >= 1");
    if (cfg.basis < 4) throw usage_error("basis must be >= 4");
    std::vector<int> sizes{4, 8, 16, 32};
    if (std::find(sizes.begin(), sizes.end(), cfg.basis) == sizes.end())
        sizes.push_back(cfg.basis);
    std::sort(sizes.begin(), sizes.end());

    csv_writer w({"problem", "degree", "basis_size", "lambda"});
    for (int l = 1; l <= cfg.n_max; ++l)
        for (int mth : sizes) {
            const auto r = scalar_lb_solve(l, mth);
            for (double lam : r.eigenvalues)
                w.row({to_string(r.problem), std::to_string(l), std::to_string(mth),
                       format_g17(lam)});
        }
    for (int n = 1; n <= cfg.n_max; ++n)
        for (int mth : sizes) {
            const auto r = s_projection_solve(n, cfg.omega, mth);
            for (double lam : r.eigenvalues)
                w.row({to_string(r.problem), std::to_string(n), std::to_string(mth),
                       format_g17(lam)});
        }
    write_text_file(resolve_out(cfg, "modified.csv"), w.str());
    return exit_ok;
}

/// Dispatch with the exit-code contract applied to thrown errors.
inline int run_command(const RunConfig& cfg) {
    try {
        if (cfg.command == "ball-spectrum") return cmd_ball_spectrum(cfg);
        if (cfg.command == "model-verify") return cmd_model_verify(cfg);
        if (cfg.command == "tau-curves") return cmd_tau_curves(cfg);
        if (cfg.command == "modified") return cmd_modified(cfg);
        throw usage_error("unknown command: " + cfg.command);
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    } catch (const pole_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return exit_domain;
    } catch (const validity_error& e) {
        std::fprintf(stderr, "validity error: %s\n", e.what());
        return exit_domain;
    } catch (const singular_pencil_error& e) {
        std::fprintf(stderr, "singular pencil: %s\n", e.what());
        return exit_domain;
    } catch (const model_invariant_error& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return exit_invariant;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return exit_io;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return exit_domain;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }
}

}  // namespace steklab

#pragma once

// Command implementations behind the qsecure tool. Each command returns a
// result carrying an exit code (0 affirmative, 1 negative or inconclusive,
// 2 usage or parse error), a JSON document and a text rendering.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsecure/behavior.hpp"
#include "qsecure/cert222.hpp"
#include "qsecure/csystem.hpp"
#include "qsecure/error.hpp"
#include "qsecure/io.hpp"
#include "qsecure/lhv.hpp"
#include "qsecure/qubitmodel.hpp"

namespace qsecure::cli {

using json = nlohmann::json;

enum class Format { Text, Json, Csv };

struct RunConfig {
    unsigned seed = 42;
    std::optional<double> tol;   ///< overrides the validation tolerance
    std::size_t grid = 0;        ///< 0: command default
    Format format = Format::Text;
    std::string out;             ///< empty: stdout

    double tolerance() const { return tol.value_or(validation_tol); }
};

struct CommandResult {
    int exit_code = 0;
    json data = json::object();
    std::string text;
    std::string csv; ///< scan rows
};

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string matrix_text(const RealMatrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + num(m(i, j));
        s += "]";
    }
    return s + "]";
}

inline CommandResult cmd_validate(const Behavior& b, const RunConfig& cfg = {}) {
    const auto r = validate(b);
    CommandResult out;
    const bool ok = r.valid(cfg.tolerance());
    out.exit_code = ok ? 0 : 1;
    out.data = {{"valid", ok},
                {"normalization_defect", r.normalization_defect},
                {"negativity_defect", r.negativity_defect},
                {"signaling_defect", r.signaling_defect},
                {"tolerance", cfg.tolerance()}};
    out.text = std::string(ok ? "valid" : "invalid") + "\nnormalization_defect=" + num(r.normalization_defect) +
               "\nnegativity_defect=" + num(r.negativity_defect) + "\nsignaling_defect=" + num(r.signaling_defect) + "\n";
    return out;
}

inline CommandResult cmd_lhv(const Behavior& b, const RunConfig& = {}) {
    const auto m = membership(b);
    CommandResult out;
    out.exit_code = m.inside ? 0 : 1;
    out.data["inside"] = m.inside;
    out.data["lp_iterations"] = m.lp_iterations;
    std::ostringstream t;
    if (m.inside) {
        json w = json::array();
        t << "inside\nreconstruction_error=" << num(m.reconstruction_error) << "\nweights:\n";
        for (std::size_t v = 0; v < m.weights.size(); ++v) {
            if (m.weights[v] <= 1e-12) continue;
            w.push_back({{"vertex", v}, {"weight", m.weights[v]}});
            t << "  vertex " << v << ": " << num(m.weights[v]) << "\n";
        }
        out.data["weights"] = w;
        out.data["reconstruction_error"] = m.reconstruction_error;
    } else {
        const double ratio = m.separating_value / m.classical_bound;
        out.data["separating"] = io::to_json(*m.separating);
        out.data["classical_bound"] = m.classical_bound;
        out.data["value"] = m.separating_value;
        out.data["ratio"] = ratio;
        out.data["visibility"] = m.visibility;
        t << "outside\nseparating functional value=" << num(m.separating_value)
          << " classical_bound=" << num(m.classical_bound) << " ratio=" << num(ratio)
          << "\nvisibility=" << num(m.visibility) << "\ncoefficients:";
        for (double c : m.separating->c) t << ' ' << num(c);
        t << "\n";
    }
    out.text = t.str();
    return out;
}

inline std::optional<BellFunctional> builtin_functional(const std::string& name) {
    if (name == "chsh") return chsh_functional();
    if (name == "mermin3") return mermin_functional(3);
    if (name == "mermin5") return mermin_functional(5);
    return std::nullopt;
}

inline CommandResult cmd_bounds(const BellFunctional& f, const RunConfig& cfg = {}) {
    CommandResult out;
    const auto cm = classical_max(f);
    out.data["label"] = f.label;
    out.data["classical"] = cm.value;
    std::ostringstream t;
    t << "functional=" << f.label << "\nclassical=" << num(cm.value) << "\n";
    const auto& sc = f.scenario;
    if (sc.settings == 2 && sc.outcomes == 2 && sc.parties <= 6) {
        MaximizationOptions opt;
        opt.grid_steps = cfg.grid;
        const auto q = quantum_max(f, opt);
        out.data["quantum"] = q.value;
        out.data["eigen_gap"] = q.eigen_gap;
        out.data["unique_flag"] = q.unique_flag;
        out.data["angles"] = q.best.angles;
        out.data["grid_steps"] = q.grid_steps;
        t << "quantum=" << num(q.value) << "\n";
        if (std::abs(cm.value) > 1e-12) {
            out.data["ratio"] = q.value / cm.value;
            t << "ratio=" << num(q.value / cm.value) << "\n";
        } else {
            out.data["ratio"] = nullptr;
            t << "ratio=undefined\n";
        }
        t << "eigen_gap=" << num(q.eigen_gap) << " unique=" << (q.unique_flag ? "true" : "false") << "\nangles=";
        for (double a : q.best.angles) t << ' ' << num(a);
        t << "\n";
    } else {
        out.data["quantum"] = nullptr;
        t << "quantum=unavailable (qubit model covers (N,2,2), N <= 6)\n";
    }
    out.text = t.str();
    return out;
}

inline json report_json(const VerificationReport& r) {
    return {{"annihilation_residual", r.annihilation_residual},
            {"alpha_diagonality", r.alpha_diagonality},
            {"beta_diagonality", r.beta_diagonality},
            {"saturation_defect", r.saturation_defect},
            {"min_eigenvalue", r.min_eigenvalue},
            {"sos_residual", r.sos_residual},
            {"min_random_expectation", r.min_random_expectation},
            {"nontrivial", r.nontrivial},
            {"passed", r.passed()}};
}

inline bool chsh_equivalent(const Certificate222& c) {
    const double a = std::abs(c.coeffs(0, 0));
    for (double v : c.coeffs.entries())
        if (std::abs(std::abs(v) - a) > 1e-9) return false;
    return a > 1e-12;
}

inline CommandResult cmd_certify222(const RepParams222& rep, const RunConfig& cfg = {}) {
    CommandResult out;
    out.data["x"] = rep.x;
    out.data["sign"] = to_string(rep.sign);
    out.data["theta_A"] = rep.theta_a;
    out.data["theta_B"] = rep.theta_b;
    std::variant<Certificate222, NotApplicable> built;
    try {
        built = build_certificate(rep);
    } catch (const Error& e) {
        out.exit_code = 1;
        out.data["error"] = to_string(e.code());
        out.data["message"] = e.what();
        out.text = std::string("error: ") + e.what() + "\n";
        return out;
    }
    if (const auto* na = std::get_if<NotApplicable>(&built)) {
        out.exit_code = 1;
        out.data["applicable"] = false;
        out.data["lambda_squared"] = na->lambda_sq;
        out.data["reason"] = na->reason;
        out.text = "not applicable: " + na->reason + " (lambda^2=" + num(na->lambda_sq) + ")\n";
        return out;
    }
    const auto& c = std::get<Certificate222>(built);
    const auto r = verify_certificate(c, rep, {1000, cfg.seed});
    out.exit_code = r.passed() ? 0 : 1;
    out.data["applicable"] = true;
    out.data["lambda_squared"] = c.lambda_sq;
    out.data["alpha"] = io::to_json(c.alpha);
    out.data["beta"] = io::to_json(c.beta);
    out.data["coefficients"] = io::to_json(c.coeffs);
    out.data["bound"] = c.bound;
    out.data["classical_bound"] = c.classical_bound;
    out.data["ratio"] = c.ratio();
    out.data["chsh_equivalent"] = chsh_equivalent(c);
    out.data["verification"] = report_json(r);
    std::ostringstream t;
    t << "lambda^2=" << num(c.lambda_sq) << "\ncoefficients=" << matrix_text(c.coeffs) << "\nbound=" << num(c.bound)
      << "\nclassical_bound=" << num(c.classical_bound) << "\nratio=" << num(c.ratio()) << "\n";
    if (chsh_equivalent(c)) t << "note: CHSH-equivalent inequality\n";
    t << "annihilation_residual=" << num(r.annihilation_residual) << "\nalpha_diagonality=" << num(r.alpha_diagonality)
      << "\nbeta_diagonality=" << num(r.beta_diagonality) << "\nsaturation_defect=" << num(r.saturation_defect)
      << "\nmin_eigenvalue=" << num(r.min_eigenvalue) << "\nsos_residual=" << num(r.sos_residual)
      << "\nmin_random_expectation=" << num(r.min_random_expectation)
      << "\nnontrivial=" << (r.nontrivial ? "true" : "false") << "\nverified=" << (r.passed() ? "true" : "false")
      << "\n";
    out.text = t.str();
    return out;
}

inline CommandResult cmd_scan(double theta_a, Sign sign, const RunConfig& cfg = {}) {
    const std::size_t steps = cfg.grid ? cfg.grid : 50;
    const auto rows = ratio_scan(theta_a, {0.0, pi / 4, steps}, {0.0, pi, steps}, sign);
    CommandResult out;
    std::ostringstream csv;
    io::write_scan_csv(csv, rows);
    out.csv = csv.str();
    const ScanRow* best = nullptr;
    std::size_t applicable = 0;
    for (const auto& r : rows) {
        if (!r.applicable) continue;
        ++applicable;
        if (!best || r.ratio > best->ratio) best = &r;
    }
    out.data = {{"theta_A", theta_a}, {"steps", steps}, {"rows", rows.size()}, {"applicable", applicable}};
    std::ostringstream t;
    t << "rows=" << rows.size() << " applicable=" << applicable << "\n";
    if (best) {
        out.data["max_ratio"] = best->ratio;
        out.data["argmax"] = {{"x", best->x}, {"theta_B", best->theta_b}};
        t << "max_ratio=" << num(best->ratio) << " at x=" << num(best->x) << " theta_B=" << num(best->theta_b) << "\n";
    }
    out.exit_code = best ? 0 : 1;
    out.text = t.str();
    return out;
}

/// Rank analysis of one c-system.
inline void analyze_csystem(const CSystem& cs, CommandResult& out, std::ostringstream& t) {
    const auto rb = rank_bounds_check(cs.rank, cs.settings);
    out.data["rank"] = cs.rank;
    out.data["rank_bounds"] = {{"leq_M", rb.leq_m}, {"quadratic", rb.quadratic}, {"triangular", rb.triangular}};
    t << "rank=" << cs.rank << "\nrank_bounds: r<=M " << (rb.leq_m ? "true" : "false") << ", r<=-1/2+sqrt(1/4+4M) "
      << (rb.quadratic ? "true" : "false") << ", r(r+1)/2<=2M-1 " << (rb.triangular ? "true" : "false") << "\n";
    try {
        const bool sym = symmetric_span_check(cs);
        out.data["symmetric_span"] = sym;
        t << "symmetric_span=" << (sym ? "true" : "false") << "\n";
    } catch (const Error& e) {
        out.data["symmetric_span"] = to_string(e.code());
        t << "symmetric_span=" << to_string(e.code()) << "\n";
    }
    if (cs.marginals_zero) {
        out.data["marginals_zero"] = *cs.marginals_zero;
        t << "marginals_zero=" << (*cs.marginals_zero ? "true" : "false") << "\n";
    }
    try {
        const auto parity = classify_rank_parity(cs);
        out.data["classification"] = to_string(parity);
        t << "classification=" << to_string(parity) << "\n";
        out.exit_code = 0;
    } catch (const Error& e) {
        out.data["classification"] = nullptr;
        out.data["precondition"] = e.what();
        t << "classification=none (" << e.what() << ")\n";
        out.exit_code = 1;
    }
}

inline CommandResult cmd_csystem_table(const RealMatrix& c, std::optional<bool> marginals_zero = std::nullopt,
                                       const RunConfig& = {}) {
    CommandResult out;
    std::ostringstream t;
    const auto comp = complete_from_table(c);
    out.data["table"] = io::to_json(c);
    out.data["completion"] = {{"converged", comp.converged}, {"defect", comp.defect}, {"iterations", comp.iterations}};
    t << "completion: " << (comp.converged ? "converged" : "failed") << " defect=" << num(comp.defect)
      << " iterations=" << comp.iterations << "\n";
    if (!comp.converged) {
        out.exit_code = 1;
        t << "no c-system reproduces the table (PSD defect persists)\n";
        out.text = t.str();
        return out;
    }
    CSystem cs = comp.system;
    cs.marginals_zero = marginals_zero;
    analyze_csystem(cs, out, t);
    out.text = t.str();
    return out;
}

inline CommandResult cmd_csystem_rep(const std::vector<double>& angles_a, const std::vector<double>& angles_b,
                                     double x, Sign sign, const RunConfig& = {}) {
    CommandResult out;
    std::ostringstream t;
    const auto psi = state_of(x, sign);
    const CSystem cs = from_representation(angles_a, angles_b, psi);
    out.data["table"] = io::to_json(cs.table);
    t << "table=" << matrix_text(cs.table) << "\n";
    analyze_csystem(cs, out, t);
    out.text = t.str();
    return out;
}

/// Behaviors reachable by name: pr-box, uniform, chsh-optimal, mermin3-optimal.
inline Behavior generate(const std::string& name, const RunConfig& cfg = {}) {
    if (name == "pr-box") return pr_box();
    if (name == "uniform") return uniform_behavior({2, 2, 2});
    if (name == "chsh-optimal") return behavior_of(representation_of(chsh_optimal_params()));
    if (name == "mermin3-optimal") {
        MaximizationOptions opt;
        opt.grid_steps = cfg.grid;
        return behavior_of(quantum_max(mermin_functional(3), opt).best);
    }
    throw Error(ErrorCode::ParseError, "unknown behavior '" + name + "'");
}

inline CommandResult cmd_classify(const Behavior& b, const RunConfig& cfg = {}) {
    CommandResult out;
    std::vector<std::string> notes;
    ClassificationEvidence ev;
    const auto& sc = b.scenario;

    const auto vr = validate(b);
    if (!vr.valid(cfg.tolerance())) {
        out.exit_code = 1;
        out.data = {{"classification", to_string(SecurityClass::Unknown)}, {"trail", {"behavior is not valid"}}};
        out.text = "classification=Unknown\n  behavior is not valid\n";
        return out;
    }
    const auto mem = membership(b);
    ev.classical = mem.inside;

    if (!mem.inside) {
        if (sc == Scenario{2, 2, 2}) {
            if (const auto rep = fit_representation(b)) {
                notes.push_back("fitted representation x=" + num(rep->x) + " sign=" + to_string(rep->sign) +
                                " theta_A=" + num(rep->theta_a) + " theta_B=" + num(rep->theta_b));
                try {
                    const auto built = build_certificate(*rep);
                    if (const auto* c = std::get_if<Certificate222>(&built)) {
                        const auto r = verify_certificate(*c, *rep, {1000, cfg.seed});
                        ev.certificate_verified = r.passed();
                        out.data["certificate"] = {{"coefficients", io::to_json(c->coeffs)},
                                                   {"bound", c->bound},
                                                   {"classical_bound", c->classical_bound},
                                                   {"verification", report_json(r)}};
                    } else {
                        notes.push_back("certificate not applicable: " + std::get<NotApplicable>(built).reason);
                    }
                } catch (const Error& e) {
                    notes.push_back(std::string("certificate: ") + e.what());
                }
                try {
                    const auto psi = state_of(rep->x, rep->sign);
                    const CSystem cs = from_representation({0.0, rep->theta_a}, {0.0, rep->theta_b}, psi);
                    ev.even_rank = classify_rank_parity(cs) == RankParity::AlgebraicallySecure;
                    out.data["csystem_rank"] = cs.rank;
                } catch (const Error& e) {
                    notes.push_back(std::string("c-system: ") + e.what());
                }
            }
        }
        if (sc.parties == 2 && sc.outcomes == 2 && !ev.even_rank) {
            const auto comp = complete_from_table(correlation_table(b).correlators);
            if (comp.converged) {
                CSystem cs = comp.system;
                cs.marginals_zero = marginals_zero_check(b);
                out.data["csystem_rank"] = cs.rank;
                try {
                    ev.even_rank = classify_rank_parity(cs) == RankParity::AlgebraicallySecure;
                } catch (const Error& e) {
                    notes.push_back(std::string("c-system: ") + e.what());
                }
            } else {
                notes.push_back("c-system completion failed, defect " + num(comp.defect));
            }
        }
        if (sc.settings == 2 && sc.outcomes == 2 && sc.parties <= 5) {
            std::vector<BellFunctional> candidates;
            if (sc.parties == 2) candidates.push_back(chsh_functional());
            if (sc.parties >= 3) candidates.push_back(mermin_functional(sc.parties));
            if (sc.parties <= 3 && mem.separating) candidates.push_back(*mem.separating);
            for (const auto& f : candidates) {
                const double v = evaluate(f, b);
                if (!(v > classical_max(f).value + 1e-8)) continue;
                MaximizationOptions opt;
                if (sc.parties <= 3) opt.grid_steps = cfg.grid;
                const auto q = quantum_max(f, opt);
                if (std::abs(v - q.value) > 1e-6) continue;
                notes.push_back("saturates " + f.label + " at its quantum maximum " + num(q.value));
                out.data["saturated_functional"] = {{"label", f.label},
                                                    {"value", v},
                                                    {"quantum_max", q.value},
                                                    {"eigen_gap", q.eigen_gap},
                                                    {"unique_flag", q.unique_flag},
                                                    {"face_point_unique", q.face_point_unique}};
                if (q.face_point_unique) {
                    ev.saturated_unique_face = true;
                    ev.unique_representation = q.unique_flag;
                    break;
                }
            }
        }
    }

    const auto cls = classify(ev);
    json trail = json::array();
    std::ostringstream t;
    t << "classification=" << to_string(cls.verdict) << "\n";
    for (const auto& s : cls.trail) {
        trail.push_back(s);
        t << "  " << s << "\n";
    }
    for (const auto& s : notes) {
        trail.push_back(s);
        t << "  " << s << "\n";
    }
    out.data["classification"] = to_string(cls.verdict);
    out.data["trail"] = trail;
    out.exit_code = cls.verdict == SecurityClass::Unknown ? 1 : 0;
    out.text = t.str();
    return out;
}

inline std::string render(const CommandResult& r, Format f) {
    switch (f) {
    case Format::Json: return r.data.dump(2) + "\n";
    case Format::Csv: return r.csv;
    case Format::Text: return r.text;
    }
    return r.text;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path);
    f << text;
}

/// Parses argv-style arguments (without the program name) and runs one command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qsecure: classical, quantum and certificate analysis of correlation tables"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    double tol = 0.0;
    std::string format = "text";
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--tol", tol, "validation tolerance override (positive)");
    app.add_option("--grid", cfg.grid, "grid steps per axis (0: command default)");
    app.add_option("--format", format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--out", cfg.out, "write output to PATH");

    std::string path, name, x_s, sign_s = "plus", ta_s = "pi/2", tb_s, angles_a_s, angles_b_s;

    auto* validate_cmd = app.add_subcommand("validate", "check normalization, positivity and no-signaling");
    validate_cmd->add_option("behavior", path, "behavior JSON")->required();

    auto* lhv_cmd = app.add_subcommand("lhv", "local hidden variable membership");
    lhv_cmd->add_option("behavior", path, "behavior JSON")->required();

    auto* bounds_cmd = app.add_subcommand("bounds", "classical and quantum maxima of a Bell functional");
    bounds_cmd->add_option("functional", name, "chsh, mermin3, mermin5 or a functional JSON")->required();

    auto* cert_cmd = app.add_subcommand("certify222", "Tsirelson certificate for a (2,2,2) representation");
    cert_cmd->add_option("x", x_s)->required();
    cert_cmd->add_option("sign", sign_s)->required();
    cert_cmd->add_option("theta_A", ta_s)->required();
    cert_cmd->add_option("theta_B", tb_s)->required();

    auto* scan_cmd = app.add_subcommand("scan", "quantum/classical ratio over x in [0, pi/4), theta_B in [0, pi)");
    scan_cmd->add_option("--theta-a", ta_s, "theta_A")->capture_default_str();
    scan_cmd->add_option("--sign", sign_s, "plus or minus")->capture_default_str();

    auto* cs_cmd = app.add_subcommand("csystem", "c-system rank analysis");
    cs_cmd->add_option("input", path, "table or (2,M,2) behavior JSON");
    cs_cmd->add_option("--angles-a", angles_a_s, "comma-separated setting angles of party A");
    cs_cmd->add_option("--angles-b", angles_b_s, "comma-separated setting angles of party B");
    cs_cmd->add_option("--x", x_s, "state parameter x");
    cs_cmd->add_option("--sign", sign_s, "state sign");

    auto* classify_cmd = app.add_subcommand("classify", "overall security classification");
    classify_cmd->add_option("behavior", path, "behavior JSON")->required();

    auto* gen_cmd = app.add_subcommand("generate", "write a named behavior as JSON");
    gen_cmd->add_option("name", name, "pr-box, uniform, chsh-optimal or mermin3-optimal")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    if (app.count("--tol")) {
        if (!(tol > 0.0)) {
            err << "usage error: --tol must be positive\n";
            return 2;
        }
        cfg.tol = tol;
    }
    cfg.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;

    try {
        CommandResult r;
        if (*validate_cmd) {
            r = cmd_validate(io::behavior_from_json(io::load_json(path)), cfg);
        } else if (*lhv_cmd) {
            r = cmd_lhv(io::behavior_from_json(io::load_json(path)), cfg);
        } else if (*bounds_cmd) {
            const auto f = builtin_functional(name);
            r = cmd_bounds(f ? *f : io::functional_from_json(io::load_json(name)), cfg);
        } else if (*cert_cmd) {
            const RepParams222 rep{io::parse_angle(x_s), io::parse_sign(sign_s), io::parse_angle(ta_s),
                                   io::parse_angle(tb_s)};
            r = cmd_certify222(rep, cfg);
        } else if (*scan_cmd) {
            r = cmd_scan(io::parse_angle(ta_s), io::parse_sign(sign_s), cfg);
            if (!cfg.out.empty()) {
                emit(r.csv, cfg.out, out);
                cfg.out.clear();
                if (cfg.format == Format::Csv) cfg.format = Format::Text;
            }
        } else if (*cs_cmd) {
            if (!angles_a_s.empty() || !angles_b_s.empty()) {
                if (angles_a_s.empty() || angles_b_s.empty() || x_s.empty()) {
                    err << "usage error: --angles-a, --angles-b and --x go together\n";
                    return 2;
                }
                r = cmd_csystem_rep(io::parse_angle_list(angles_a_s), io::parse_angle_list(angles_b_s),
                                    io::parse_angle(x_s), io::parse_sign(sign_s), cfg);
            } else if (!path.empty()) {
                const auto doc = io::load_json(path);
                if (doc.contains("scenario")) {
                    const Behavior b = io::behavior_from_json(doc);
                    r = cmd_csystem_table(correlation_table(b).correlators, marginals_zero_check(b), cfg);
                } else {
                    r = cmd_csystem_table(io::table_from_json(doc), std::nullopt, cfg);
                }
            } else {
                err << "usage error: csystem needs an input file or --angles-a/--angles-b/--x\n";
                return 2;
            }
        } else if (*classify_cmd) {
            r = cmd_classify(io::behavior_from_json(io::load_json(path)), cfg);
        } else if (*gen_cmd) {
            const Behavior b = generate(name, cfg);
            r.data = io::to_json(b);
            r.text = r.data.dump() + "\n";
        }
        if (cfg.format == Format::Csv && r.csv.empty()) {
            err << "usage error: csv output is only produced by scan\n";
            return 2;
        }
        emit(render(r, cfg.format), cfg.out, out);
        return r.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ParseError ? 2 : 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: ParseError: " << e.what() << "\n";
        return 2;
    }
}

} // namespace qsecure::cli

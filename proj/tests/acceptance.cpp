// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qsecure/cli.hpp"

using namespace qsecure;

namespace {

const double s2 = std::sqrt(2.0);

struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s: got %.15g want %.15g (tol %.1e)", what.c_str(), got, want, tol);
            failures.push_back(buf);
        }
    }
    void at_most(double got, double limit, const std::string& what) {
        if (!(got <= limit)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s: %.3e exceeds %.1e", what.c_str(), got, limit);
            failures.push_back(buf);
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<void(Check&)> body;
};

// ---------------------------------------------------------------------------

void chsh_bounds(Check& c) {
    const auto r = cli::cmd_bounds(chsh_functional());
    c.expect(r.data.at("classical").get<double>() == 2.0, "classical CHSH bound is not exactly 2");
    c.near(r.data.at("quantum").get<double>(), 2 * s2, 1e-6, "quantum CHSH bound");
}

void pr_box_anchor(Check& c) {
    c.expect(evaluate(chsh_functional(), pr_box()) == 4.0, "CHSH(PR box) != 4");
    c.expect(!membership(pr_box()).inside, "PR box classified inside the local polytope");
}

void peak_certificate(Check& c) {
    const RepParams222 rep{pi / 8, Sign::Plus, pi / 2, pi / 2};
    const auto built = build_certificate(rep);
    const auto* cert = std::get_if<Certificate222>(&built);
    if (!cert) {
        c.expect(false, "certificate not applicable at the peak");
        return;
    }
    c.near(cert->lambda_sq, 1.0, 1e-9, "lambda^2");
    c.at_most((cert->coeffs - RealMatrix{{s2, -s2}, {s2, s2}}).max_abs(), 1e-9, "coefficient matrix error");
    c.near(cert->bound, 4.0, 1e-9, "bound");
    c.near(cert->classical_bound, 2 * s2, 1e-8, "classical bound");
    c.near(cert->ratio(), s2, 1e-6, "ratio");
    c.at_most(verify_certificate(*cert, rep).saturation_defect, 1e-8, "saturation defect");
}

void ratio_scan_peak(Check& c) {
    const std::size_t n = 50;
    const auto rows = ratio_scan(pi / 2, {0.0, pi / 4, n}, {0.0, pi, n});
    const ScanRow* best = nullptr;
    for (const auto& r : rows)
        if (r.applicable && (!best || r.ratio > best->ratio)) best = &r;
    if (!best) {
        c.expect(false, "no applicable scan point");
        return;
    }
    c.near(best->ratio, s2, 1e-4, "scan maximum");
    // Grid point nearest (pi/8, pi/2).
    const ScanRange xs{0.0, pi / 4, n}, ts{0.0, pi, n};
    std::size_t bi = 0, bj = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(xs.at(k) - pi / 8) < std::abs(xs.at(bi) - pi / 8)) bi = k;
        if (std::abs(ts.at(k) - pi / 2) < std::abs(ts.at(bj) - pi / 2)) bj = k;
    }
    c.near(best->x, xs.at(bi), 1e-12, "argmax x");
    c.near(best->theta_b, ts.at(bj), 1e-12, "argmax theta_B");

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(0.0, pi / 4), ut(0.0, pi);
    int paired = 0, attempts = 0;
    while (paired < 20 && attempts < 10'000) {
        ++attempts;
        const double x = ux(rng), t = ut(rng);
        const auto a = ratio_at(x, t, pi / 2), b = ratio_at(x + pi / 4, t, pi / 2);
        if (a.applicable != b.applicable) {
            c.expect(false, "applicability differs between x and x + pi/4");
            continue;
        }
        if (!a.applicable) continue;
        c.near(a.ratio, b.ratio, 1e-6, "pi/4 periodicity");
        ++paired;
    }
    c.expect(paired == 20, "fewer than 20 applicable periodicity pairs");
}

void certificate_grid(Check& c) {
    const std::size_t n = 30;
    const ScanRange xs{0.0, pi / 4, n}, ts{0.0, pi, n};
    std::size_t applicable = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const RepParams222 rep{xs.at(i), Sign::Plus, pi / 2, ts.at(j)};
            std::variant<Certificate222, NotApplicable> built;
            try {
                built = build_certificate(rep);
            } catch (const Error&) {
                continue; // boundary of the parameter domain
            }
            const auto* cert = std::get_if<Certificate222>(&built);
            if (!cert) continue;
            ++applicable;
            const auto r = verify_certificate(*cert, rep, {1000, 42});
            const std::string at = " at i=" + std::to_string(i) + " j=" + std::to_string(j);
            c.at_most(r.annihilation_residual, 1e-9, "annihilation residual" + at);
            c.at_most(r.alpha_diagonality, 1e-10, "alpha diagonality" + at);
            c.at_most(r.beta_diagonality, 1e-10, "beta diagonality" + at);
            c.expect(r.min_random_expectation >= -1e-8, "negative T expectation" + at);
            c.at_most(r.saturation_defect, 1e-8, "saturation" + at);
        }
    c.expect(applicable > 0, "no applicable grid point");
}

void eta_properties(Check& c) {
    double worst_orth = 0.0, worst_res = 0.0;
    for (int k = 0; k < 1000; ++k)
        for (Sign s : {Sign::Plus, Sign::Minus}) {
            const auto psi = state_of(pi * k / 1000.0, s);
            const RealMatrix eta = eta_of(psi);
            worst_orth = std::max(worst_orth, orthogonality_defect(eta));
            worst_res = std::max(worst_res, eta_residual(psi, eta));
        }
    c.at_most(worst_orth, 1e-9, "eta eta^T - 1");
    c.at_most(worst_res, 1e-9, "intertwining residual");
}

void mermin(Check& c) {
    const auto f = mermin_functional(3);
    c.expect(vertex_count(f.scenario) == 64, "vertex count for (3,2,2) is not 64");
    const auto r = cli::cmd_bounds(f);
    c.expect(r.data.at("classical").get<double>() == 2.0, "classical Mermin bound is not exactly 2");
    c.near(r.data.at("quantum").get<double>(), 4.0, 1e-6, "quantum Mermin bound");
    c.expect(r.data.at("eigen_gap").get<double>() > 1e-6, "eigen gap at the maximizer is not above 1e-6");
    const auto cls = cli::cmd_classify(cli::generate("mermin3-optimal"));
    c.expect(cls.data.at("classification") == "AlgebraicallySecureCandidate",
             "Mermin optimum classified " + cls.data.at("classification").dump());
}

void csystem_checks(Check& c) {
    const auto rep = chsh_optimal_params();
    const Behavior b = behavior_of(representation_of(rep));
    const CSystem cs = from_representation({0.0, rep.theta_a}, {0.0, rep.theta_b}, state_of(rep.x, rep.sign));
    c.expect(cs.rank == 2, "rank is " + std::to_string(cs.rank));
    c.expect(rank_bounds_check(cs.rank, cs.settings).all(), "rank inequalities");
    c.expect(symmetric_span_check(cs), "symmetric span");
    c.expect(marginals_zero_check(b, 1e-10), "marginals not zero");
    c.expect(classify_rank_parity(cs) == RankParity::AlgebraicallySecure, "parity");

    const auto comp = complete_from_table(correlation_table(pr_box()).correlators);
    c.expect(!comp.converged, "PR-box correlators completed to a c-system");
    c.expect(comp.defect > 1e-3, "PR-box PSD defect " + std::to_string(comp.defect));
}

void lhv_round_trip(Check& c) {
    std::mt19937_64 rng(42);
    std::exponential_distribution<double> e(1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Scenario sc = trial % 2 ? Scenario{3, 2, 2} : Scenario{2, 2, 2};
        const std::size_t terms = 1 + rng() % 8;
        std::vector<Behavior> parts;
        std::vector<double> w;
        double total = 0.0;
        for (std::size_t k = 0; k < terms; ++k) {
            parts.push_back(vertex_at(sc, rng() % vertex_count(sc)).behavior());
            w.push_back(e(rng));
            total += w.back();
        }
        for (auto& v : w) v /= total;
        const auto m = membership(mix(parts, w));
        c.expect(m.inside, "mixture " + std::to_string(trial) + " classified outside");
        if (m.inside) c.at_most(m.reconstruction_error, 1e-8, "reconstruction error");
    }

    // Quantum points violating CHSH, accepted until 20 are found.
    std::uniform_real_distribution<double> ua(0.0, pi);
    std::normal_distribution<double> g;
    int found = 0;
    for (int attempt = 0; found < 20 && attempt < 100'000; ++attempt) {
        std::vector<cplx> psi(4);
        for (auto& a : psi) a = cplx(g(rng), g(rng));
        const double nv = norm2(psi);
        for (auto& a : psi) a /= nv;
        const Behavior b = behavior_of(QubitRepresentation({ua(rng), ua(rng)}, psi));
        if (evaluate(chsh_functional(), b) <= 2.0 + 1e-3) continue;
        ++found;
        const auto m = membership(b);
        c.expect(!m.inside, "CHSH-violating behavior classified inside");
        if (m.inside || !m.separating) continue;
        double worst = -1e300;
        for_each_vertex(b.scenario, [&](const DeterministicVertex& v) {
            worst = std::max(worst, evaluate_at_vertex(*m.separating, v));
        });
        c.at_most(worst, m.classical_bound + 1e-9, "separating functional exceeds its bound on a vertex");
        c.expect(evaluate(*m.separating, b) > worst + 1e-9, "separating functional does not separate");
    }
    c.expect(found == 20, "fewer than 20 CHSH-violating samples");
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "CHSH bounds: classical 2, quantum 2*sqrt2", 10, chsh_bounds},
        {2, "PR box: CHSH value 4, outside the local polytope", 1, pr_box_anchor},
        {3, "certificate at x=pi/8, theta_A=theta_B=pi/2", 5, peak_certificate},
        {4, "50x50 ratio scan: peak sqrt2 at (pi/8, pi/2), pi/4-periodic", 60, ratio_scan_peak},
        {5, "certificate properties on a 30x30 grid", 300, certificate_grid},
        {6, "eta orthogonality and intertwining over 1000 x, both signs", 10, eta_properties},
        {7, "Mermin3: classical 2, quantum 4, AlgebraicallySecureCandidate", 300, mermin},
        {8, "c-system of the CHSH point; PR-box completion fails", 30, csystem_checks},
        {9, "LHV round trip and quantum separation", 120, lhv_round_trip},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > cr.time_limit_s) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "runtime %.2f s exceeds %.0f s", dt, cr.time_limit_s);
            check.failures.push_back(buf);
        }
        const bool ok = check.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("[%s] %d %s (%.2f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), dt);
        for (const auto& f : check.failures) std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

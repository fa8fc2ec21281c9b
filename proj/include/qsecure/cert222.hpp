#pragma once

// Lowest-order Tsirelson certificates for (2,2,2) points realized by real
// maximally entangled states phi_x^+- and observables A_1 = sigma_3,
// A_2 = sin(theta) sigma_1 + cos(theta) sigma_3 on each side.
//
// A certificate is a pair alpha = diag(1, lambda), beta = alpha gamma with
// P_i = sum_j (alpha_ij A_j (x) 1 - beta_ij 1 (x) B_j) annihilating the state.
// When alpha^T alpha and beta^T beta are diagonal, sum_i P_i^T P_i equals
// tr(alpha^T alpha + beta^T beta) - sum_jk coeffs_jk A_j (x) B_k for any
// dichotomic observables, which is the inequality being certified.

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qsecure/behavior.hpp"
#include "qsecure/error.hpp"
#include "qsecure/lhv.hpp"
#include "qsecure/numkernel.hpp"
#include "qsecure/qubitmodel.hpp"

namespace qsecure {

enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline std::string to_string(Sign s) { return s == Sign::Plus ? "plus" : "minus"; }

inline constexpr double degenerate_tol = 1e-12;

struct RepParams222 {
    double x = 0.0;
    Sign sign = Sign::Plus;
    double theta_a = pi / 2;
    double theta_b = pi / 2;

    void check() const {
        if (!(x >= 0.0 && x < pi)) throw Error(ErrorCode::AngleOutOfRange, "x must lie in [0, pi)");
        for (double t : {theta_a, theta_b}) {
            if (!(t > 0.0 && t < pi) || std::abs(std::sin(t)) <= degenerate_tol) {
                throw Error(ErrorCode::AngleOutOfRange, "theta_A, theta_B must lie in (0, pi)");
            }
        }
    }
};

/// Rows give A_1, A_2 in the basis X_1 = sigma_1, X_2 = sigma_3.
inline RealMatrix t_matrix(double theta) { return RealMatrix{{0.0, 1.0}, {std::sin(theta), std::cos(theta)}}; }

inline std::vector<double> state_of(double x, Sign sign) {
    const double sg = sign_value(sign);
    const double r = 1.0 / std::sqrt(2.0);
    return {r * std::cos(x), -sg * r * std::sin(x), r * std::sin(x), sg * r * std::cos(x)};
}

/// psi_hat(a, b) = psi[2a + b].
inline RealMatrix psi_hat(const std::vector<double>& psi) {
    if (psi.size() != 4) throw Error(ErrorCode::DimensionMismatch, "two-qubit state expected");
    return RealMatrix{{psi[0], psi[1]}, {psi[2], psi[3]}};
}

/// psi_hat^T psi_hat is a positive multiple of the identity.
inline bool psi_hat_condition(const std::vector<double>& psi, double tol = 1e-10) {
    const RealMatrix h = psi_hat(psi);
    const RealMatrix g = h.transpose() * h;
    return std::abs(g(0, 1)) <= tol && std::abs(g(0, 0) - g(1, 1)) <= tol && g(0, 0) > tol;
}

inline RealMatrix pauli_x() { return RealMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
inline RealMatrix pauli_z() { return RealMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

inline RealMatrix eta_of(const std::vector<double>& psi) {
    const RealMatrix h = psi_hat(psi);
    const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    if (std::abs(det) <= degenerate_tol) throw Error(ErrorCode::SingularPsiHat, "psi_hat is not invertible");
    if (!psi_hat_condition(psi)) {
        throw Error(ErrorCode::ConditionViolated, "psi_hat^T psi_hat is not proportional to the identity");
    }
    const RealMatrix hinv = inverse(h);
    const RealMatrix xs[2] = {pauli_x(), pauli_z()};
    RealMatrix eta(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const RealMatrix m = hinv * xs[i] * h * xs[j];
            eta(i, j) = 0.5 * (m(0, 0) + m(1, 1));
        }
    return eta;
}

/// max_i || X_i psi_hat - sum_j eta_ij psi_hat X_j ||_max
inline double eta_residual(const std::vector<double>& psi, const RealMatrix& eta) {
    const RealMatrix h = psi_hat(psi);
    const RealMatrix xs[2] = {pauli_x(), pauli_z()};
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        RealMatrix r = xs[i] * h;
        for (std::size_t j = 0; j < 2; ++j) r -= eta(i, j) * (h * xs[j]);
        worst = std::max(worst, r.max_abs());
    }
    return worst;
}

inline double orthogonality_defect(const RealMatrix& m) {
    return (m * m.transpose() - RealMatrix::identity(m.rows())).max_abs();
}

/// gamma = t(theta_A) eta t(theta_B)^{-1}
inline RealMatrix gamma_constructive(const RepParams222& rep) {
    rep.check();
    const RealMatrix eta = eta_of(state_of(rep.x, rep.sign));
    return t_matrix(rep.theta_a) * eta * inverse(t_matrix(rep.theta_b));
}

inline RealMatrix gamma_closed_form(const RepParams222& rep) {
    rep.check();
    const double sg = sign_value(rep.sign);
    const double x2 = 2.0 * rep.x, a = rep.theta_a, b = sg * rep.theta_b;
    const double k = 1.0 / std::sin(rep.theta_b);
    return RealMatrix{{sg * k * std::sin(x2 + b), -sg * k * std::sin(x2)},
                      {sg * k * std::sin(x2 - a + b), -sg * k * std::sin(x2 - a)}};
}

inline RealMatrix gamma_of(const RepParams222& rep) { return gamma_constructive(rep); }

namespace detail {

inline double lambda_denominator(const RepParams222& rep) {
    const double sg = sign_value(rep.sign);
    const double x2 = 2.0 * rep.x;
    return std::sin(x2 - rep.theta_a) * std::sin(x2 - rep.theta_a + sg * rep.theta_b);
}

inline void require_nondegenerate(const RepParams222& rep) {
    if (std::abs(lambda_denominator(rep)) <= degenerate_tol) {
        throw Error(ErrorCode::DegenerateDenominator, "sin(2x - theta_A) sin(2x - theta_A +- theta_B) vanishes");
    }
}

} // namespace detail

/// -sin(2x) sin(2x +- theta_B) / (sin(2x - theta_A) sin(2x - theta_A +- theta_B))
inline double lambda_squared_sine_form(const RepParams222& rep) {
    rep.check();
    detail::require_nondegenerate(rep);
    const double sg = sign_value(rep.sign);
    const double x2 = 2.0 * rep.x;
    return -std::sin(x2) * std::sin(x2 + sg * rep.theta_b) / detail::lambda_denominator(rep);
}

/// lambda^2 = -gamma_11 gamma_12 / (gamma_21 gamma_22)
inline double lambda_squared(const RepParams222& rep) {
    rep.check();
    detail::require_nondegenerate(rep);
    const RealMatrix g = gamma_of(rep);
    return -(g(0, 0) * g(0, 1)) / (g(1, 0) * g(1, 1));
}

/// Embeds a correlator coefficient matrix as outcome-level coefficients
/// c(x, y | i, j) = (-1)^(x + y) coeffs_ij.
inline BellFunctional correlator_functional(const RealMatrix& coeffs, std::string label = "tsirelson") {
    const std::size_t m = coeffs.rows();
    const Scenario sc{2, m, 2};
    std::vector<double> w(sc.setting_tuples());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) w[i + m * j] = coeffs(i, j);
    return full_correlator_functional(sc, w, std::move(label));
}

struct Certificate222 {
    RealMatrix alpha;
    RealMatrix beta;
    double lambda_sq = 0.0;
    RealMatrix coeffs;
    double bound = 0.0;
    BellFunctional functional;
    double classical_bound = 0.0;

    double ratio() const { return bound / classical_bound; }
};

struct NotApplicable {
    double lambda_sq = 0.0;
    bool boundary = false; ///< lambda^2 in (0, 1e-12]
    std::string reason;
};

/// alpha, beta, coefficient matrix and bound from lambda^2 and gamma.
inline Certificate222 assemble_certificate(const RealMatrix& gamma, double lambda_sq) {
    Certificate222 c;
    c.lambda_sq = lambda_sq;
    c.alpha = RealMatrix{{1.0, 0.0}, {0.0, std::sqrt(lambda_sq)}};
    c.beta = c.alpha * gamma;
    const RealMatrix ab = c.alpha.transpose() * c.beta;
    c.coeffs = ab + (c.beta.transpose() * c.alpha).transpose();
    const RealMatrix aa = c.alpha.transpose() * c.alpha;
    const RealMatrix bb = c.beta.transpose() * c.beta;
    c.bound = aa(0, 0) + aa(1, 1) + bb(0, 0) + bb(1, 1);
    c.functional = correlator_functional(c.coeffs);
    c.classical_bound = classical_max(c.functional).value;
    return c;
}

inline std::variant<Certificate222, NotApplicable> build_certificate(const RepParams222& rep) {
    const double l2 = lambda_squared(rep);
    if (l2 <= 0.0) return NotApplicable{l2, false, "lambda^2 <= 0"};
    if (l2 <= degenerate_tol) return NotApplicable{l2, true, "boundary: lambda^2 in (0, 1e-12]"};
    return assemble_certificate(gamma_of(rep), l2);
}

/// 2/sin(theta_B) [[+-sin(2x +- theta_B), -+sin 2x], lambda^2 [+-sin(2x - theta_A +- theta_B), -+sin(2x - theta_A)]]
inline RealMatrix coeffs_closed_form(const RepParams222& rep) {
    const double l2 = lambda_squared_sine_form(rep);
    RealMatrix g = gamma_closed_form(rep);
    RealMatrix c(2, 2);
    for (std::size_t j = 0; j < 2; ++j) {
        c(0, j) = 2.0 * g(0, j);
        c(1, j) = 2.0 * l2 * g(1, j);
    }
    return c;
}

/// -2 sin(theta_A) sin(4x - theta_A +- theta_B) / (sin(2x - theta_A) sin(2x - theta_A +- theta_B))
inline double bound_closed_form(const RepParams222& rep) {
    rep.check();
    detail::require_nondegenerate(rep);
    const double sg = sign_value(rep.sign);
    return -2.0 * std::sin(rep.theta_a) * std::sin(4.0 * rep.x - rep.theta_a + sg * rep.theta_b) /
           detail::lambda_denominator(rep);
}

/// phi_{pi/8}^- with theta_A = theta_B = pi/2 reaches 2 sqrt 2 on the CHSH
/// functional with correlators [[s, s], [s, -s]], s = 1/sqrt 2.
inline RepParams222 chsh_optimal_params() { return {pi / 8, Sign::Minus, pi / 2, pi / 2}; }

inline QubitRepresentation representation_of(const RepParams222& rep) {
    const auto psi = state_of(rep.x, rep.sign);
    return QubitRepresentation({rep.theta_a, rep.theta_b}, std::vector<cplx>(psi.begin(), psi.end()));
}

struct VerificationOptions {
    std::size_t samples = 1000;
    unsigned seed = 42;
};

struct VerificationReport {
    double annihilation_residual = 0.0;  ///< max_i ||P_i psi||
    double alpha_diagonality = 0.0;      ///< |off-diagonal of alpha^T alpha|
    double beta_diagonality = 0.0;       ///< |off-diagonal of beta^T beta|
    double saturation_defect = 0.0;      ///< |<functional> - bound| on the representation's behavior
    double min_eigenvalue = 0.0;         ///< of bound - sum coeffs A_j (x) B_k at the representation
    double sos_residual = 0.0;           ///< ||sum P_i^T P_i - (bound - sum coeffs A_j (x) B_k)||_max
    double min_random_expectation = 0.0; ///< smallest <T> over random real observables and states
    bool nontrivial = false;             ///< classical bound < bound - 1e-8

    bool passed() const {
        return annihilation_residual <= 1e-9 && alpha_diagonality <= 1e-10 && beta_diagonality <= 1e-10 &&
               saturation_defect <= 1e-8 && min_eigenvalue >= -1e-9 && sos_residual <= 1e-9 &&
               min_random_expectation >= -1e-8 && nontrivial;
    }
};

namespace detail {

inline RealMatrix tsirelson_operator(const Certificate222& c, const RealMatrix (&a)[2], const RealMatrix (&b)[2]) {
    RealMatrix t = c.bound * RealMatrix::identity(4);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k) t -= c.coeffs(j, k) * kron(a[j], b[k]);
    return t;
}

inline double quadratic_form(const RealMatrix& m, const std::vector<double>& v) {
    const auto mv = m * v;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * mv[i];
    return s;
}

inline RealMatrix plane_observable(double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return RealMatrix{{c, s}, {s, -c}};
}

} // namespace detail

inline VerificationReport verify_certificate(const Certificate222& cert, const RepParams222& rep,
                                             const VerificationOptions& opt = {}) {
    VerificationReport r;
    const auto psi = state_of(rep.x, rep.sign);
    const RealMatrix a[2] = {qubit_observable(rep.theta_a, 0), qubit_observable(rep.theta_a, 1)};
    const RealMatrix b[2] = {qubit_observable(rep.theta_b, 0), qubit_observable(rep.theta_b, 1)};
    const RealMatrix id = RealMatrix::identity(2);

    RealMatrix sos(4, 4);
    for (std::size_t i = 0; i < 2; ++i) {
        RealMatrix p(4, 4);
        for (std::size_t j = 0; j < 2; ++j) {
            p += cert.alpha(i, j) * kron(a[j], id);
            p -= cert.beta(i, j) * kron(id, b[j]);
        }
        r.annihilation_residual = std::max(r.annihilation_residual, norm2(p * psi));
        sos += p.transpose() * p;
    }

    const RealMatrix aa = cert.alpha.transpose() * cert.alpha;
    const RealMatrix bb = cert.beta.transpose() * cert.beta;
    r.alpha_diagonality = std::max(std::abs(aa(0, 1)), std::abs(aa(1, 0)));
    r.beta_diagonality = std::max(std::abs(bb(0, 1)), std::abs(bb(1, 0)));

    const RealMatrix t = detail::tsirelson_operator(cert, a, b);
    r.sos_residual = (sos - t).max_abs();
    r.min_eigenvalue = symmetric_eigenvalues(t).front();
    r.saturation_defect = std::abs(evaluate(cert.functional, behavior_of(representation_of(rep))) - cert.bound);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
    std::normal_distribution<double> gauss;
    r.min_random_expectation = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opt.samples; ++k) {
        const RealMatrix ra[2] = {detail::plane_observable(angle(rng)), detail::plane_observable(angle(rng))};
        const RealMatrix rb[2] = {detail::plane_observable(angle(rng)), detail::plane_observable(angle(rng))};
        std::vector<double> v(4);
        for (auto& e : v) e = gauss(rng);
        const double nv = norm2(v);
        for (auto& e : v) e /= nv;
        r.min_random_expectation =
            std::min(r.min_random_expectation, detail::quadratic_form(detail::tsirelson_operator(cert, ra, rb), v));
    }
    if (opt.samples == 0) r.min_random_expectation = 0.0;
    r.nontrivial = cert.classical_bound < cert.bound - 1e-8;
    return r;
}

struct ScanRow {
    double x = 0.0;
    double theta_b = 0.0;
    bool applicable = false;
    double quantum_bound = 0.0;
    double classical_max = 0.0;
    double ratio = 0.0;
    std::string note;
};

struct ScanRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 2;

    /// Half-open grid lo + k (hi - lo) / steps, k = 0 .. steps - 1.
    double at(std::size_t k) const { return lo + static_cast<double>(k) * (hi - lo) / static_cast<double>(steps); }
};

/// Certificate at one point, or the reason none exists.
inline ScanRow ratio_at(double x, double theta_b, double theta_a, Sign sign = Sign::Plus) {
    ScanRow row{x, theta_b, false, 0.0, 0.0, 0.0, {}};
    const RepParams222 rep{x, sign, theta_a, theta_b};
    try {
        const auto built = build_certificate(rep);
        if (const auto* na = std::get_if<NotApplicable>(&built)) {
            row.note = na->boundary ? "boundary" : "lambda^2<=0";
            return row;
        }
        const auto& cert = std::get<Certificate222>(built);
        if (!(cert.classical_bound > 0.0)) {
            row.note = "classical_max<=0";
            return row;
        }
        row.applicable = true;
        row.quantum_bound = cert.bound;
        row.classical_max = cert.classical_bound;
        row.ratio = cert.ratio();
    } catch (const Error& e) {
        row.note = std::string(to_string(e.code()));
    }
    return row;
}

/// Rows ordered by x, then theta_B.
inline std::vector<ScanRow> ratio_scan(double theta_a, const ScanRange& xs, const ScanRange& thetas,
                                       Sign sign = Sign::Plus) {
    if (xs.steps < 2 || thetas.steps < 2) throw Error(ErrorCode::ShapeMismatch, "scan needs at least 2 steps per axis");
    std::vector<ScanRow> rows;
    rows.reserve(xs.steps * thetas.steps);
    for (std::size_t i = 0; i < xs.steps; ++i)
        for (std::size_t j = 0; j < thetas.steps; ++j) rows.push_back(ratio_at(xs.at(i), thetas.at(j), theta_a, sign));
    return rows;
}

/// Searches the phi_x^+- family for a representation reproducing a (2,2,2)
/// behavior within tol. Candidates with an applicable certificate are preferred.
inline std::optional<RepParams222> fit_representation(const Behavior& b, double tol = 1e-7) {
    if (!(b.scenario == Scenario{2, 2, 2})) return std::nullopt;
    const CorrelationTable t = correlation_table(b);
    for (double m : {t.marginals_a[0], t.marginals_a[1], t.marginals_b[0], t.marginals_b[1]})
        if (std::abs(m) > tol) return std::nullopt;

    auto wrap = [](double a) {
        a = std::fmod(a, 2.0 * pi);
        return a < 0.0 ? a + 2.0 * pi : a;
    };
    auto branches = [&](double c) {
        const double a = std::acos(std::clamp(c, -1.0, 1.0));
        return std::vector<double>{a, -a};
    };
    const RealMatrix& c = t.correlators;

    std::optional<RepParams222> fallback;
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
        const double sg = sign_value(sign);
        // <A(a) (x) B(b)> = cos(a - sg b - 2x) on phi_x^+-.
        for (double u : branches(c(0, 0))) {
            const double x = wrap(-u) / 2.0;
            for (double va : branches(c(1, 0))) {
                const double ta = wrap(va + 2.0 * x);
                for (double vb : branches(c(0, 1))) {
                    const double tb = wrap(sg * (-vb - 2.0 * x));
                    const RepParams222 rep{x, sign, ta, tb};
                    try {
                        rep.check();
                    } catch (const Error&) {
                        continue;
                    }
                    if (max_abs_difference(behavior_of(representation_of(rep)), b) > tol) continue;
                    try {
                        if (std::holds_alternative<Certificate222>(build_certificate(rep))) return rep;
                    } catch (const Error&) {
                    }
                    if (!fallback) fallback = rep;
                }
            }
        }
    }
    return fallback;
}

} // namespace qsecure

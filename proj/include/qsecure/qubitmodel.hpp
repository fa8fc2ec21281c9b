#pragma once

// Irreducible qubit representations of the (N,2,2) scenario. Party i
// measures sigma_3 on setting 1 and sin(theta_i) sigma_1 + cos(theta_i)
// sigma_3 on setting 2; outcome 1 is the +1 eigenspace. Party 0 is the most
// significant qubit of the state vector.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qsecure/behavior.hpp"
#include "qsecure/error.hpp"
#include "qsecure/numkernel.hpp"

namespace qsecure {

inline constexpr double pi = std::numbers::pi;
inline constexpr double angle_slack = 1e-12;

inline void require_angle(double theta) {
    if (!(theta >= -angle_slack && theta <= pi + angle_slack)) {
        throw Error(ErrorCode::AngleOutOfRange, "angle " + std::to_string(theta) + " outside [0, pi]");
    }
}

/// Dichotomic observable of a party at the given setting (0 or 1).
inline RealMatrix qubit_observable(double theta, std::size_t setting) {
    if (setting == 0) return RealMatrix{{1.0, 0.0}, {0.0, -1.0}};
    const double s = std::sin(theta), c = std::cos(theta);
    return RealMatrix{{c, s}, {s, -c}};
}

/// F(x|s) for x, s in {0, 1}: projectors[x][s].
using ProjectorSet = std::array<std::array<ComplexMatrix, 2>, 2>;

inline ProjectorSet measurement_projectors(double theta) {
    require_angle(theta);
    ProjectorSet f;
    for (std::size_t s = 0; s < 2; ++s) {
        const RealMatrix o = qubit_observable(theta, s);
        for (std::size_t x = 0; x < 2; ++x) {
            const double sign = x == 0 ? 1.0 : -1.0;
            ComplexMatrix m(2, 2);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) m(i, j) = 0.5 * ((i == j ? 1.0 : 0.0) + sign * o(i, j));
            f[x][s] = m;
        }
    }
    return f;
}

struct QubitRepresentation {
    std::vector<double> angles; ///< one angle per party, each in [0, pi]
    std::vector<cplx> psi;      ///< unit vector of dimension 2^N

    QubitRepresentation() = default;
    QubitRepresentation(std::vector<double> thetas, std::vector<cplx> state)
        : angles(std::move(thetas)), psi(std::move(state)) {
        if (angles.empty() || angles.size() > 10) {
            throw Error(ErrorCode::UnsupportedN, "qubit model supports 1..10 parties");
        }
        for (double t : angles) require_angle(t);
        if (psi.size() != (std::size_t{1} << angles.size())) {
            throw Error(ErrorCode::DimensionMismatch, "state dimension must be 2^N");
        }
        const double nrm = norm2(psi);
        if (std::abs(nrm - 1.0) > 1e-6) throw Error(ErrorCode::InvalidState, "state is not normalized");
        for (auto& a : psi) a /= nrm;
    }

    std::size_t parties() const { return angles.size(); }
};

inline std::vector<cplx> product_zero_state(std::size_t n) {
    std::vector<cplx> psi(std::size_t{1} << n, 0.0);
    psi[0] = 1.0;
    return psi;
}

/// p(x|s) = <psi| (x) F_i(x_i|s_i) |psi>, computed by rotating each qubit
/// into the eigenbasis of its measured observable.
inline Behavior behavior_of(const QubitRepresentation& rep) {
    const std::size_t n = rep.parties();
    const std::size_t dim = std::size_t{1} << n;
    Scenario sc{n, 2, 2};
    std::vector<double> p(sc.table_size());
    std::vector<cplx> amp(dim);
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s) {
        amp = rep.psi;
        for (std::size_t i = 0; i < n; ++i) {
            if (sc.setting_of(s, i) == 0) continue;
            // Rows are the +1 / -1 eigenvectors of the setting-2 observable.
            const double c = std::cos(rep.angles[i] / 2.0), sn = std::sin(rep.angles[i] / 2.0);
            const std::size_t bit = std::size_t{1} << (n - 1 - i);
            for (std::size_t r = 0; r < dim; ++r) {
                if (r & bit) continue;
                const cplx a0 = amp[r], a1 = amp[r | bit];
                amp[r] = c * a0 + sn * a1;
                amp[r | bit] = -sn * a0 + c * a1;
            }
        }
        for (std::size_t r = 0; r < dim; ++r) {
            std::size_t x = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (r & (std::size_t{1} << (n - 1 - i))) x |= std::size_t{1} << i;
            p[sc.index(s, x)] = std::norm(amp[r]);
        }
    }
    return Behavior(sc, std::move(p));
}

inline void require_qubit_scenario(const Scenario& sc) {
    if (sc.settings != 2 || sc.outcomes != 2) {
        throw Error(ErrorCode::ScenarioMismatch, "qubit model needs an (N,2,2) functional");
    }
}

/// Builds C(theta) = sum c(x|s) F(x|s) repeatedly for one functional. The
/// coefficients are first re-expressed in the {1, sigma_1, sigma_3} basis per
/// party; every resulting Pauli string is a signed permutation matrix.
class BellOperatorBuilder {
public:
    explicit BellOperatorBuilder(const BellFunctional& f) : n_(f.scenario.parties) {
        require_qubit_scenario(f.scenario);
        if (n_ > 10) throw Error(ErrorCode::UnsupportedN, "too many parties for a Bell operator");
        const auto& sc = f.scenario;
        interleaved_.assign(Scenario::ipow(4, n_), 0.0);
        for (std::size_t s = 0; s < sc.setting_tuples(); ++s)
            for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) {
                std::size_t j = 0, mul = 1;
                for (std::size_t i = 0; i < n_; ++i) {
                    j += (sc.outcome_of(x, i) + 2 * sc.setting_of(s, i)) * mul;
                    mul *= 4;
                }
                interleaved_[j] = f.c[sc.index(s, x)];
            }
    }

    std::size_t parties() const { return n_; }

    RealMatrix build(const std::vector<double>& angles) const {
        if (angles.size() != n_) throw Error(ErrorCode::DimensionMismatch, "one angle per party");
        for (double t : angles) require_angle(t);

        // Contract party by party: radix 4 (x + 2s) -> radix 3 (1, sigma_1, sigma_3).
        std::vector<double> cur = interleaved_;
        for (std::size_t i = 0; i < n_; ++i) {
            const double st = std::sin(angles[i]), ct = std::cos(angles[i]);
            // coef[j][p] : F(x|s) = sum_p coef[x + 2s][p] P_p
            const double coef[4][3] = {{0.5, 0.0, 0.5}, {0.5, 0.0, -0.5}, {0.5, 0.5 * st, 0.5 * ct},
                                       {0.5, -0.5 * st, -0.5 * ct}};
            const std::size_t low = Scenario::ipow(3, i);
            const std::size_t high = Scenario::ipow(4, n_ - i - 1);
            std::vector<double> next(low * 3 * high, 0.0);
            for (std::size_t h = 0; h < high; ++h)
                for (std::size_t j = 0; j < 4; ++j)
                    for (std::size_t l = 0; l < low; ++l) {
                        const double v = cur[l + low * (j + 4 * h)];
                        if (v == 0.0) continue;
                        for (std::size_t p = 0; p < 3; ++p) next[l + low * (p + 3 * h)] += v * coef[j][p];
                    }
            cur = std::move(next);
        }

        const std::size_t dim = std::size_t{1} << n_;
        RealMatrix c(dim, dim);
        for (std::size_t word = 0; word < cur.size(); ++word) {
            const double w = cur[word];
            if (w == 0.0) continue;
            std::size_t xmask = 0, zmask = 0, rest = word;
            for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t bit = std::size_t{1} << (n_ - 1 - i);
                const std::size_t pauli = rest % 3;
                rest /= 3;
                if (pauli == 1) xmask |= bit;
                if (pauli == 2) zmask |= bit;
            }
            for (std::size_t r = 0; r < dim; ++r) {
                const double sign = (std::popcount(r & zmask) & 1) ? -1.0 : 1.0;
                c(r ^ xmask, r) += sign * w;
            }
        }
        return c;
    }

private:
    std::size_t n_;
    std::vector<double> interleaved_;
};

inline RealMatrix bell_operator(const BellFunctional& f, const std::vector<double>& angles) {
    return BellOperatorBuilder(f).build(angles);
}

inline double expectation(const RealMatrix& op, const std::vector<cplx>& psi) {
    if (op.rows() != psi.size()) throw Error(ErrorCode::DimensionMismatch, "expectation");
    double s = 0.0;
    for (std::size_t i = 0; i < op.rows(); ++i) {
        cplx row{};
        for (std::size_t j = 0; j < op.cols(); ++j) row += op(i, j) * psi[j];
        s += (std::conj(psi[i]) * row).real();
    }
    return s;
}

struct MaximizationOptions {
    std::size_t grid_steps = 0;         ///< 0: 60 for N <= 3, otherwise min(20, budget-limited even count)
    std::size_t refine_iters = 60;      ///< golden-section iterations per coordinate pass
    std::size_t seeds = 8;              ///< grid local maxima that get refined
    std::size_t max_grid_cells = 250'000;
    double value_tol = 1e-7;            ///< optima within this of the best value are kept
    double gap_tol = 1e-6;              ///< eigen gap at or below this counts as degenerate
    double angle_merge_tol = 1e-4;      ///< optima closer than this (after symmetry quotient) coincide
};

struct MaximizationResult {
    double value = 0.0;
    QubitRepresentation best;
    double eigen_gap = 0.0;
    std::vector<std::vector<double>> angle_optima; ///< canonical representatives
    bool unique_flag = false;
    bool face_point_unique = false; ///< every optimum yields the same behavior
    std::size_t grid_steps = 0;
    std::size_t evaluations = 0;
};

/// Canonical representative under theta -> pi - theta (with the outcome
/// relabeling of setting 2 that realizes it unitarily).
inline std::vector<double> canonical_angles(std::vector<double> angles) {
    for (auto& t : angles) t = std::min(t, pi - t);
    return angles;
}

inline std::size_t default_grid_steps(std::size_t parties, std::size_t max_cells) {
    if (parties <= 3) return 60;
    std::size_t steps = 20;
    while (steps > 2) {
        double cells = 1.0;
        for (std::size_t i = 0; i < parties; ++i) cells *= static_cast<double>(steps);
        if (cells <= static_cast<double>(max_cells)) break;
        steps -= 2;
    }
    return steps;
}

namespace detail {

inline double top_value(const BellOperatorBuilder& builder, const std::vector<double>& angles) {
    return symmetric_eigenvalues(builder.build(angles)).back();
}

// Golden-section maximization of g on [lo, hi]; returns (argmax, value).
template <class G>
std::pair<double, double> golden_max(G&& g, double lo, double hi, std::size_t iters) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    for (std::size_t k = 0; k < iters; ++k) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

} // namespace detail

/// Maximizes <psi|C(theta)|psi> over theta in [0, pi)^N and unit psi. The
/// inner problem is the exact top eigenvalue; the outer one is a grid scan
/// followed by coordinate-wise golden-section refinement of the best grid
/// local maxima.
inline MaximizationResult quantum_max(const BellFunctional& f, const MaximizationOptions& opt = {}) {
    require_qubit_scenario(f.scenario);
    const std::size_t n = f.scenario.parties;
    if (n > 6) throw Error(ErrorCode::BudgetExceeded, "quantum_max supports at most 6 parties");
    const BellOperatorBuilder builder(f);

    const std::size_t steps = opt.grid_steps ? opt.grid_steps : default_grid_steps(n, opt.max_grid_cells);
    if (steps < 2) throw Error(ErrorCode::BudgetExceeded, "grid needs at least 2 steps per axis");
    double cells_d = 1.0;
    for (std::size_t i = 0; i < n; ++i) cells_d *= static_cast<double>(steps);
    if (cells_d > static_cast<double>(opt.max_grid_cells)) {
        throw Error(ErrorCode::BudgetExceeded, std::to_string(steps) + "^" + std::to_string(n) +
                                                   " grid cells exceed the budget of " +
                                                   std::to_string(opt.max_grid_cells));
    }
    const std::size_t cells = static_cast<std::size_t>(cells_d);
    const double h = pi / static_cast<double>(steps);

    auto angles_of = [&](std::size_t cell) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(cell % steps) * h;
            cell /= steps;
        }
        return a;
    };

    MaximizationResult res;
    res.grid_steps = steps;
    std::vector<double> grid(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) grid[cell] = detail::top_value(builder, angles_of(cell));
    res.evaluations = cells;

    // Grid local maxima (axis neighbours, non-periodic).
    std::vector<std::size_t> peaks;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        bool is_peak = true;
        std::size_t stride = 1;
        for (std::size_t i = 0; i < n && is_peak; ++i) {
            const std::size_t k = (cell / stride) % steps;
            if (k > 0 && grid[cell - stride] > grid[cell]) is_peak = false;
            if (k + 1 < steps && grid[cell + stride] > grid[cell]) is_peak = false;
            stride *= steps;
        }
        if (is_peak) peaks.push_back(cell);
    }
    // Highest first; ties by lexicographic angle order (party 0 first).
    auto lex_less = [&](std::size_t a, std::size_t b) {
        const auto aa = angles_of(a), bb = angles_of(b);
        return aa < bb;
    };
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
        if (grid[a] != grid[b]) return grid[a] > grid[b];
        return lex_less(a, b);
    });
    if (peaks.size() > opt.seeds) peaks.resize(opt.seeds);

    struct Candidate {
        std::vector<double> angles;
        double value;
    };
    std::vector<Candidate> refined;
    for (std::size_t cell : peaks) {
        std::vector<double> a = angles_of(cell);
        double val = grid[cell];
        for (int sweep = 0; sweep < 30; ++sweep) {
            const double before = val;
            for (std::size_t i = 0; i < n; ++i) {
                const double lo = std::max(0.0, a[i] - h), hi = std::min(pi, a[i] + h);
                std::vector<double> trial = a;
                auto g = [&](double t) {
                    trial[i] = t;
                    ++res.evaluations;
                    return detail::top_value(builder, trial);
                };
                const auto [t_best, v_best] = detail::golden_max(g, lo, hi, opt.refine_iters);
                if (v_best > val) {
                    val = v_best;
                    a[i] = t_best;
                }
            }
            if (val - before <= 1e-15 * std::max(1.0, std::abs(val))) break;
        }
        refined.push_back({a, val});
    }

    std::size_t best_k = 0;
    for (std::size_t k = 1; k < refined.size(); ++k)
        if (refined[k].value > refined[best_k].value ||
            (refined[k].value == refined[best_k].value && refined[k].angles < refined[best_k].angles))
            best_k = k;

    const auto top = top_eigenpair(to_complex(builder.build(refined[best_k].angles)));
    res.value = top.value;
    res.eigen_gap = top.gap;
    res.best = QubitRepresentation(refined[best_k].angles, top.vector);

    std::vector<std::vector<double>> raw_optima;
    for (const auto& c : refined) {
        if (c.value < res.value - opt.value_tol) continue;
        bool dup_raw = false;
        for (const auto& o : raw_optima) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(o[i] - c.angles[i]));
            if (d < opt.angle_merge_tol) dup_raw = true;
        }
        if (!dup_raw) raw_optima.push_back(c.angles);

        const auto canon = canonical_angles(c.angles);
        bool dup = false;
        for (const auto& o : res.angle_optima) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(o[i] - canon[i]));
            if (d < opt.angle_merge_tol) dup = true;
        }
        if (!dup) res.angle_optima.push_back(canon);
    }

    const Behavior best_behavior = behavior_of(res.best);
    res.face_point_unique = res.eigen_gap > opt.gap_tol;
    for (const auto& a : raw_optima) {
        if (!res.face_point_unique) break;
        const auto tp = top_eigenpair(to_complex(builder.build(a)));
        if (tp.gap <= opt.gap_tol) {
            res.face_point_unique = false;
            break;
        }
        const Behavior other = behavior_of(QubitRepresentation(a, tp.vector));
        if (max_abs_difference(other, best_behavior) > 1e-4) res.face_point_unique = false;
    }
    res.unique_flag = res.eigen_gap > opt.gap_tol && res.angle_optima.size() == 1;
    return res;
}

enum class SecurityClass { Classical, SecureCandidate, AlgebraicallySecureCandidate, Unknown };

inline std::string to_string(SecurityClass c) {
    switch (c) {
    case SecurityClass::Classical: return "Classical";
    case SecurityClass::SecureCandidate: return "SecureCandidate";
    case SecurityClass::AlgebraicallySecureCandidate: return "AlgebraicallySecureCandidate";
    case SecurityClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

/// Evidence gathered by the lhv, cert222, csystem and quantum_max routines.
struct ClassificationEvidence {
    std::optional<bool> classical;      ///< LHV membership verdict
    bool certificate_verified = false;  ///< saturated, positive, nontrivial Tsirelson certificate
    bool saturated_unique_face = false; ///< b attains Q_c of a functional whose maximizing face is one point
    bool unique_representation = false; ///< quantum_max unique_flag for that functional
    std::optional<bool> even_rank;      ///< c-system rank parity (true: even)
};

struct Classification {
    SecurityClass verdict = SecurityClass::Unknown;
    std::vector<std::string> trail;
};

/// Candidate labels only: the underlying evidence is numerical.
inline Classification classify(const ClassificationEvidence& ev) {
    Classification out;
    if (!ev.classical) {
        out.trail.push_back("no LHV membership verdict; insufficient evidence");
        return out;
    }
    if (*ev.classical) {
        out.verdict = SecurityClass::Classical;
        out.trail.push_back("inside the classical polytope");
        return out;
    }
    out.trail.push_back("outside the classical polytope");
    const bool witness = ev.certificate_verified || ev.saturated_unique_face;
    if (ev.certificate_verified) out.trail.push_back("verified Tsirelson certificate saturated");
    if (ev.saturated_unique_face) out.trail.push_back("saturates a Tsirelson functional at a unique face point");
    if (!witness) {
        out.trail.push_back("no extremality witness");
        return out;
    }
    const bool odd = ev.even_rank.has_value() && !*ev.even_rank;
    const bool unique = !odd && (ev.unique_representation || ev.even_rank.value_or(false));
    if (ev.unique_representation) out.trail.push_back("unique maximizing angles and nondegenerate top eigenvector");
    if (ev.even_rank) out.trail.push_back(*ev.even_rank ? "c-system rank even" : "c-system rank odd");
    out.verdict = unique ? SecurityClass::AlgebraicallySecureCandidate : SecurityClass::SecureCandidate;
    return out;
}

} // namespace qsecure

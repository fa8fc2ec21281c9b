#pragma once

// Correlation tables P(x|s) for N parties with M settings and K outcomes.
//
// Flat layout: p[s * K^N + x] where s and x are mixed-radix little-endian
// by party (party 0 is the least significant digit). Outcomes are 0..K-1
// internally (1..K in user-facing text); for K = 2 the dichotomic value of
// outcome x is (-1)^x.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qsecure/error.hpp"
#include "qsecure/numkernel.hpp"

namespace qsecure {

inline constexpr double validation_tol = 1e-9;

struct Scenario {
    std::size_t parties = 2;
    std::size_t settings = 2;
    std::size_t outcomes = 2;

    friend bool operator==(const Scenario&, const Scenario&) = default;

    static std::size_t ipow(std::size_t base, std::size_t exp) {
        std::size_t r = 1;
        for (std::size_t i = 0; i < exp; ++i) {
            if (r > (std::size_t{1} << 40) / std::max<std::size_t>(base, 1)) {
                throw Error(ErrorCode::TooLarge, "scenario size overflows");
            }
            r *= base;
        }
        return r;
    }

    void check() const {
        if (parties < 1 || settings < 1 || outcomes < 2) {
            throw Error(ErrorCode::ShapeMismatch, "scenario needs N >= 1, M >= 1, K >= 2");
        }
    }

    std::size_t outcome_tuples() const { return ipow(outcomes, parties); }
    std::size_t setting_tuples() const { return ipow(settings, parties); }
    std::size_t table_size() const { return outcome_tuples() * setting_tuples(); }

    std::size_t index(std::size_t setting_tuple, std::size_t outcome_tuple) const {
        return setting_tuple * outcome_tuples() + outcome_tuple;
    }

    /// Digit of `party` in a little-endian mixed-radix tuple index.
    static std::size_t digit(std::size_t tuple, std::size_t party, std::size_t radix) {
        for (std::size_t i = 0; i < party; ++i) tuple /= radix;
        return tuple % radix;
    }

    std::size_t outcome_of(std::size_t outcome_tuple, std::size_t party) const {
        return digit(outcome_tuple, party, outcomes);
    }
    std::size_t setting_of(std::size_t setting_tuple, std::size_t party) const {
        return digit(setting_tuple, party, settings);
    }
};

struct Behavior {
    Scenario scenario;
    std::vector<double> p;

    Behavior() = default;
    Behavior(Scenario sc, std::vector<double> table) : scenario(sc), p(std::move(table)) {
        scenario.check();
        if (p.size() != scenario.table_size()) {
            throw Error(ErrorCode::ShapeMismatch,
                        "table has " + std::to_string(p.size()) + " entries, scenario needs " +
                            std::to_string(scenario.table_size()));
        }
    }

    double operator()(std::size_t setting_tuple, std::size_t outcome_tuple) const {
        return p[scenario.index(setting_tuple, outcome_tuple)];
    }
};

struct BellFunctional {
    Scenario scenario;
    std::vector<double> c;
    std::string label;

    BellFunctional() = default;
    BellFunctional(Scenario sc, std::vector<double> coeffs, std::string name = {})
        : scenario(sc), c(std::move(coeffs)), label(std::move(name)) {
        scenario.check();
        if (c.size() != scenario.table_size()) {
            throw Error(ErrorCode::ShapeMismatch, "coefficient count does not match scenario");
        }
        for (double v : c) {
            if (!std::isfinite(v)) throw Error(ErrorCode::ShapeMismatch, "non-finite coefficient");
        }
    }
};

struct ValidationReport {
    double normalization_defect = 0.0;
    double negativity_defect = 0.0;
    double signaling_defect = 0.0;

    bool valid(double tol = validation_tol) const {
        return normalization_defect <= tol && negativity_defect <= tol && signaling_defect <= tol;
    }
};

namespace detail {

// Marginal of the parties in `mask` for every full setting tuple. Returns
// max over (marginal outcome, marginal setting) of the spread across the
// complement's settings.
inline double signaling_spread(const Behavior& b, std::size_t mask) {
    const auto& sc = b.scenario;
    const std::size_t n = sc.parties;
    const std::size_t nk = sc.outcome_tuples();
    const std::size_t ns = sc.setting_tuples();

    auto project = [&](std::size_t tuple, std::size_t radix) {
        std::size_t key = 0, mul = 1;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t d = tuple % radix;
            tuple /= radix;
            if (mask & (std::size_t{1} << i)) {
                key += d * mul;
                mul *= radix;
            }
        }
        return key;
    };
    std::size_t sub = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) ++sub;
    const std::size_t sub_k = Scenario::ipow(sc.outcomes, sub);
    const std::size_t sub_s = Scenario::ipow(sc.settings, sub);

    std::vector<double> lo(sub_k * sub_s, 1e300), hi(sub_k * sub_s, -1e300);
    std::vector<double> marg(sub_k);
    for (std::size_t s = 0; s < ns; ++s) {
        std::fill(marg.begin(), marg.end(), 0.0);
        for (std::size_t x = 0; x < nk; ++x) marg[project(x, sc.outcomes)] += b(s, x);
        const std::size_t skey = project(s, sc.settings);
        for (std::size_t k = 0; k < sub_k; ++k) {
            const std::size_t slot = skey * sub_k + k;
            lo[slot] = std::min(lo[slot], marg[k]);
            hi[slot] = std::max(hi[slot], marg[k]);
        }
    }
    double spread = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) spread = std::max(spread, hi[k] - lo[k]);
    return spread;
}

} // namespace detail

/// Max-norm defects of normalization, positivity and no-signaling. The
/// no-signaling check covers the marginal of every proper subset of parties.
inline ValidationReport validate(const Behavior& b) {
    const auto& sc = b.scenario;
    sc.check();
    if (b.p.size() != sc.table_size()) throw Error(ErrorCode::ShapeMismatch, "table length");
    ValidationReport r;
    const std::size_t nk = sc.outcome_tuples();
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s) {
        double sum = 0.0;
        for (std::size_t x = 0; x < nk; ++x) {
            const double v = b(s, x);
            sum += v;
            r.negativity_defect = std::max(r.negativity_defect, -v);
        }
        r.normalization_defect = std::max(r.normalization_defect, std::abs(sum - 1.0));
    }
    const std::size_t full = (std::size_t{1} << sc.parties) - 1;
    for (std::size_t mask = 1; mask < full; ++mask) {
        r.signaling_defect = std::max(r.signaling_defect, detail::signaling_spread(b, mask));
    }
    return r;
}

inline double evaluate(const BellFunctional& f, const Behavior& b) {
    if (!(f.scenario == b.scenario)) throw Error(ErrorCode::ScenarioMismatch, "evaluate");
    double s = 0.0;
    for (std::size_t k = 0; k < f.c.size(); ++k) s += f.c[k] * b.p[k];
    return s;
}

/// Single-party marginal p_i(x|s), read at the other parties' first setting.
inline RealMatrix party_marginal(const Behavior& b, std::size_t party) {
    const auto& sc = b.scenario;
    RealMatrix m(sc.outcomes, sc.settings);
    std::size_t stride = 1;
    for (std::size_t i = 0; i < party; ++i) stride *= sc.settings;
    for (std::size_t si = 0; si < sc.settings; ++si) {
        const std::size_t s = si * stride;
        for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) m(sc.outcome_of(x, party), si) += b(s, x);
    }
    return m;
}

/// True iff p factorizes into its single-party marginals within tol.
inline bool is_product(const Behavior& b, double tol = validation_tol) {
    const auto& sc = b.scenario;
    std::vector<RealMatrix> marg;
    for (std::size_t i = 0; i < sc.parties; ++i) marg.push_back(party_marginal(b, i));
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s)
        for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) {
            double prod = 1.0;
            for (std::size_t i = 0; i < sc.parties; ++i) prod *= marg[i](sc.outcome_of(x, i), sc.setting_of(s, i));
            if (std::abs(prod - b(s, x)) > tol) return false;
        }
    return true;
}

/// Full correlators and single-party expectations of a bipartite
/// dichotomic behavior, indexed by setting.
struct CorrelationTable {
    RealMatrix correlators;
    std::vector<double> marginals_a;
    std::vector<double> marginals_b;

    std::size_t settings() const { return correlators.rows(); }
};

inline void require_bipartite_dichotomic(const Scenario& sc) {
    if (sc.parties != 2 || sc.outcomes != 2) {
        throw Error(ErrorCode::WrongScenario, "needs a (2,M,2) scenario");
    }
}

inline CorrelationTable correlation_table(const Behavior& b) {
    const auto& sc = b.scenario;
    require_bipartite_dichotomic(sc);
    const std::size_t m = sc.settings;
    CorrelationTable t{RealMatrix(m, m), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t s = i + m * j;
            double c = 0.0, a = 0.0, bb = 0.0;
            for (std::size_t x = 0; x < 4; ++x) {
                const double sa = (x & 1) ? -1.0 : 1.0;
                const double sb = (x & 2) ? -1.0 : 1.0;
                c += sa * sb * b(s, x);
                a += sa * b(s, x);
                bb += sb * b(s, x);
            }
            t.correlators(i, j) = c;
            if (j == 0) t.marginals_a[i] = a;
            if (i == 0) t.marginals_b[j] = bb;
        }
    return t;
}

/// p(x,y|i,j) = (1 + a_i (-1)^x + b_j (-1)^y + c_ij (-1)^(x+y)) / 4.
inline Behavior behavior_from_correlations(const CorrelationTable& t) {
    const std::size_t m = t.settings();
    if (t.correlators.cols() != m || t.marginals_a.size() != m || t.marginals_b.size() != m) {
        throw Error(ErrorCode::ShapeMismatch, "correlation table shape");
    }
    Scenario sc{2, m, 2};
    std::vector<double> p(sc.table_size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t x = 0; x < 4; ++x) {
                const double sa = (x & 1) ? -1.0 : 1.0;
                const double sb = (x & 2) ? -1.0 : 1.0;
                p[sc.index(i + m * j, x)] =
                    0.25 * (1.0 + sa * t.marginals_a[i] + sb * t.marginals_b[j] + sa * sb * t.correlators(i, j));
            }
    return Behavior(sc, std::move(p));
}

inline Behavior behavior_from_correlators(const RealMatrix& c) {
    return behavior_from_correlations(
        {c, std::vector<double>(c.rows(), 0.0), std::vector<double>(c.rows(), 0.0)});
}

/// Dichotomic functional sum_s w(s) <prod_i A_i(s_i)>, expanded to outcome
/// coefficients c(x|s) = w(s) (-1)^(x_1 + ... + x_N).
inline BellFunctional full_correlator_functional(const Scenario& sc, const std::vector<double>& weights,
                                                 std::string label = {}) {
    sc.check();
    if (sc.outcomes != 2) throw Error(ErrorCode::WrongScenario, "full correlators need K = 2");
    if (weights.size() != sc.setting_tuples()) throw Error(ErrorCode::ShapeMismatch, "weight count");
    std::vector<double> c(sc.table_size());
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s)
        for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) {
            const int parity = std::popcount(static_cast<unsigned long long>(x)) & 1;
            c[sc.index(s, x)] = parity ? -weights[s] : weights[s];
        }
    return BellFunctional(sc, std::move(c), std::move(label));
}

/// <A1B1> + <A1B2> + <A2B1> - <A2B2>.
inline BellFunctional chsh_functional() {
    return full_correlator_functional({2, 2, 2}, {1.0, 1.0, 1.0, -1.0}, "chsh");
}

/// Mermin expression Im prod_k (A_k^(1) + i A_k^(2)): a setting tuple with m
/// parties on their second setting gets weight sin(m pi / 2).
inline BellFunctional mermin_functional(std::size_t n) {
    if (n < 2 || n > 10) throw Error(ErrorCode::UnsupportedN, "Mermin functional needs 2 <= N <= 10");
    Scenario sc{n, 2, 2};
    std::vector<double> w(sc.setting_tuples());
    for (std::size_t s = 0; s < w.size(); ++s) {
        const int m = std::popcount(static_cast<unsigned long long>(s));
        static constexpr double table[4] = {0.0, 1.0, 0.0, -1.0};
        w[s] = table[m % 4];
    }
    return full_correlator_functional(sc, w, "mermin" + std::to_string(n));
}

inline BellFunctional zero_functional(const Scenario& sc) {
    return BellFunctional(sc, std::vector<double>(sc.table_size(), 0.0), "zero");
}

inline Behavior uniform_behavior(const Scenario& sc) {
    sc.check();
    return Behavior(sc, std::vector<double>(sc.table_size(), 1.0 / static_cast<double>(sc.outcome_tuples())));
}

/// p(x,y|s,t) = 1/2 iff x XOR y = s AND t (0-based labels).
inline Behavior pr_box() {
    Scenario sc{2, 2, 2};
    std::vector<double> p(sc.table_size(), 0.0);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t x = 0; x < 4; ++x) {
            const std::size_t a = x & 1, b = (x >> 1) & 1;
            const std::size_t sa = s & 1, sb = (s >> 1) & 1;
            if ((a ^ b) == (sa & sb)) p[sc.index(s, x)] = 0.5;
        }
    return Behavior(sc, std::move(p));
}

/// Independent parties: local[i](x, s) is party i's outcome distribution.
inline Behavior product_behavior(const Scenario& sc, const std::vector<RealMatrix>& local) {
    sc.check();
    if (local.size() != sc.parties) throw Error(ErrorCode::ShapeMismatch, "one local table per party");
    std::vector<double> p(sc.table_size());
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s)
        for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) {
            double v = 1.0;
            for (std::size_t i = 0; i < sc.parties; ++i) v *= local[i](sc.outcome_of(x, i), sc.setting_of(s, i));
            p[sc.index(s, x)] = v;
        }
    return Behavior(sc, std::move(p));
}

inline Behavior mix(const std::vector<Behavior>& parts, const std::vector<double>& weights) {
    if (parts.empty() || parts.size() != weights.size()) throw Error(ErrorCode::ShapeMismatch, "mix");
    std::vector<double> p(parts.front().p.size(), 0.0);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!(parts[k].scenario == parts.front().scenario)) throw Error(ErrorCode::ScenarioMismatch, "mix");
        for (std::size_t e = 0; e < p.size(); ++e) p[e] += weights[k] * parts[k].p[e];
    }
    return Behavior(parts.front().scenario, std::move(p));
}

inline double max_abs_difference(const Behavior& a, const Behavior& b) {
    if (!(a.scenario == b.scenario)) throw Error(ErrorCode::ScenarioMismatch, "compare");
    double d = 0.0;
    for (std::size_t k = 0; k < a.p.size(); ++k) d = std::max(d, std::abs(a.p[k] - b.p[k]));
    return d;
}

} // namespace qsecure

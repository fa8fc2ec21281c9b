#pragma once

// The classical polytope: convex hull of deterministic outcome assignments.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qsecure/behavior.hpp"
#include "qsecure/error.hpp"
#include "qsecure/simplex.hpp"

namespace qsecure {

inline constexpr std::size_t default_vertex_cap = 1'000'000;

/// One definite outcome per (party, setting).
struct DeterministicVertex {
    Scenario scenario;
    std::size_t index = 0;
    std::vector<std::size_t> outcomes; ///< outcomes[party * M + setting]

    std::size_t outcome(std::size_t party, std::size_t setting) const {
        return outcomes[party * scenario.settings + setting];
    }

    /// Outcome tuple produced under a joint setting tuple.
    std::size_t outcome_tuple(std::size_t setting_tuple) const {
        std::size_t x = 0, mul = 1;
        for (std::size_t i = 0; i < scenario.parties; ++i) {
            x += outcome(i, scenario.setting_of(setting_tuple, i)) * mul;
            mul *= scenario.outcomes;
        }
        return x;
    }

    Behavior behavior() const {
        std::vector<double> p(scenario.table_size(), 0.0);
        for (std::size_t s = 0; s < scenario.setting_tuples(); ++s) p[scenario.index(s, outcome_tuple(s))] = 1.0;
        return Behavior(scenario, std::move(p));
    }
};

inline std::size_t vertex_count(const Scenario& sc, std::size_t cap = default_vertex_cap) {
    sc.check();
    const std::size_t per_party = Scenario::ipow(sc.outcomes, sc.settings);
    std::size_t total = 1;
    for (std::size_t i = 0; i < sc.parties; ++i) {
        if (total > cap / per_party) {
            throw Error(ErrorCode::TooLarge, "vertex count exceeds cap " + std::to_string(cap));
        }
        total *= per_party;
    }
    if (total > cap) throw Error(ErrorCode::TooLarge, "vertex count exceeds cap " + std::to_string(cap));
    return total;
}

/// Vertex number `index` in enumeration order: little-endian by party, and
/// within a party little-endian by setting over the outcome digits.
inline DeterministicVertex vertex_at(const Scenario& sc, std::size_t index) {
    DeterministicVertex v{sc, index, std::vector<std::size_t>(sc.parties * sc.settings)};
    std::size_t rest = index;
    for (std::size_t i = 0; i < sc.parties; ++i)
        for (std::size_t s = 0; s < sc.settings; ++s) {
            v.outcomes[i * sc.settings + s] = rest % sc.outcomes;
            rest /= sc.outcomes;
        }
    return v;
}

/// Visits every vertex exactly once in enumeration order.
inline void for_each_vertex(const Scenario& sc, const std::function<void(const DeterministicVertex&)>& visit,
                            std::size_t cap = default_vertex_cap) {
    const std::size_t n = vertex_count(sc, cap);
    for (std::size_t k = 0; k < n; ++k) visit(vertex_at(sc, k));
}

inline std::vector<DeterministicVertex> vertices(const Scenario& sc, std::size_t cap = default_vertex_cap) {
    std::vector<DeterministicVertex> out;
    out.reserve(vertex_count(sc, cap));
    for_each_vertex(sc, [&](const DeterministicVertex& v) { out.push_back(v); }, cap);
    return out;
}

inline double evaluate_at_vertex(const BellFunctional& f, const DeterministicVertex& v) {
    if (!(f.scenario == v.scenario)) throw Error(ErrorCode::ScenarioMismatch, "vertex evaluation");
    const auto& sc = f.scenario;
    double s = 0.0;
    for (std::size_t st = 0; st < sc.setting_tuples(); ++st) s += f.c[sc.index(st, v.outcome_tuple(st))];
    return s;
}

struct ClassicalMax {
    double value = 0.0;
    DeterministicVertex argmax;
};

/// Exact maximum over all vertices; the first maximizer in enumeration order wins ties.
inline ClassicalMax classical_max(const BellFunctional& f, std::size_t cap = default_vertex_cap) {
    ClassicalMax best;
    bool first = true;
    for_each_vertex(
        f.scenario,
        [&](const DeterministicVertex& v) {
            const double val = evaluate_at_vertex(f, v);
            if (first || val > best.value) {
                best = {val, v};
                first = false;
            }
        },
        cap);
    return best;
}

struct MembershipResult {
    bool inside = false;
    std::vector<double> weights;            ///< convex weights per vertex (inside)
    double reconstruction_error = 0.0;      ///< max |sum w_v D_v - p| (inside)
    std::optional<BellFunctional> separating; ///< Bell functional with classical bound 1 (outside)
    double classical_bound = 1.0;
    double separating_value = 0.0;          ///< separating functional evaluated on p
    double visibility = 1.0;                ///< largest t with t p + (1-t) uniform classical
    std::size_t lp_iterations = 0;
};

namespace detail {

inline std::vector<double> column_of(const DeterministicVertex& v) {
    const auto& sc = v.scenario;
    std::vector<double> col(sc.table_size() + 1, 0.0);
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s) col[sc.index(s, v.outcome_tuple(s))] = 1.0;
    col.back() = 1.0;
    return col;
}

// Shift so the uniform behavior scores 0, then scale so the classical maximum is 1.
inline std::optional<BellFunctional> normalize_witness(std::vector<double> coeffs, const Behavior& b) {
    const auto& sc = b.scenario;
    const Behavior u = uniform_behavior(sc);
    BellFunctional f(sc, std::move(coeffs), "separating");
    const double shift = -evaluate(f, u) / static_cast<double>(sc.setting_tuples());
    for (auto& c : f.c) c += shift;
    const double bound = classical_max(f).value;
    const double value = evaluate(f, b);
    if (!(bound > 0.0) || !(value > bound)) return std::nullopt;
    for (auto& c : f.c) c /= bound;
    return f;
}

} // namespace detail

/// LHV membership by a phase-1 feasibility LP over the vertex weights. An
/// outside point gets a separating Bell functional: the optimal dual of the
/// white-noise robustness LP (max t s.t. t p + (1-t) u is classical), shifted
/// to vanish on the uniform behavior and scaled to classical bound 1, so its
/// value on p is 1 / t*.
inline MembershipResult membership(const Behavior& b, std::size_t cap = default_vertex_cap) {
    const auto report = validate(b);
    if (!report.valid()) throw Error(ErrorCode::InvalidBehavior, "membership needs a valid behavior");
    const auto& sc = b.scenario;
    const std::size_t nv = vertex_count(sc, cap);
    const std::size_t rows = sc.table_size() + 1;

    lp::ColumnMatrix cols;
    cols.reserve(nv + 1);
    for_each_vertex(sc, [&](const DeterministicVertex& v) { cols.push_back(detail::column_of(v)); }, cap);
    std::vector<double> rhs(b.p);
    rhs.push_back(1.0);

    MembershipResult out;
    const auto feas = lp::find_feasible(cols, rhs);
    out.lp_iterations = feas.iterations;
    if (feas.status == lp::Status::Optimal) {
        out.inside = true;
        out.weights = feas.x;
        std::vector<double> recon(sc.table_size(), 0.0);
        for (std::size_t v = 0; v < nv; ++v)
            if (out.weights[v] != 0.0)
                for (std::size_t e = 0; e < recon.size(); ++e) recon[e] += out.weights[v] * cols[v][e];
        for (std::size_t e = 0; e < recon.size(); ++e)
            out.reconstruction_error = std::max(out.reconstruction_error, std::abs(recon[e] - b.p[e]));
        return out;
    }

    const Behavior u = uniform_behavior(sc);
    std::vector<double> t_col(rows, 0.0);
    for (std::size_t e = 0; e < sc.table_size(); ++e) t_col[e] = -(b.p[e] - u.p[e]);
    cols.push_back(t_col);
    std::vector<double> rhs_u(u.p);
    rhs_u.push_back(1.0);
    std::vector<double> cost(nv + 1, 0.0);
    cost.back() = -1.0;
    const auto rob = lp::minimize(cols, rhs_u, cost);
    out.lp_iterations += rob.iterations;

    std::optional<BellFunctional> witness;
    if (rob.status == lp::Status::Optimal) {
        out.visibility = rob.x.back();
        witness = detail::normalize_witness(
            std::vector<double>(rob.duals.begin(), rob.duals.begin() + static_cast<std::ptrdiff_t>(sc.table_size())), b);
    }
    if (!witness) {
        // Farkas ray of the phase-1 problem.
        witness = detail::normalize_witness(
            std::vector<double>(feas.duals.begin(), feas.duals.begin() + static_cast<std::ptrdiff_t>(sc.table_size())), b);
    }
    if (!witness) throw Error(ErrorCode::LPStall, "could not extract a separating functional");
    out.classical_bound = classical_max(*witness, cap).value;
    out.separating_value = evaluate(*witness, b);
    out.separating = std::move(witness);
    return out;
}

} // namespace qsecure

#pragma once

// Vector systems {x_i, y_j} with c_ij = <x_i, y_j> for (2,M,2) correlation
// tables, and the rank analysis that separates extremal points with one
// quantum representation from those with two.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qsecure/behavior.hpp"
#include "qsecure/error.hpp"
#include "qsecure/numkernel.hpp"
#include "qsecure/qubitmodel.hpp"

namespace qsecure {

inline constexpr double csystem_tol = 1e-9;

struct CSystem {
    std::size_t settings = 0;
    std::vector<std::vector<double>> x_vectors;
    std::vector<std::vector<double>> y_vectors;
    RealMatrix table;
    std::size_t rank = 0;
    std::vector<double> norms_x;
    std::vector<double> norms_y;
    std::optional<bool> marginals_zero; ///< known only when built from a state
    double defect = 0.0;                ///< max |<x_i, y_j> - c_ij| against the source table

    std::vector<std::vector<double>> all_vectors() const {
        auto v = x_vectors;
        v.insert(v.end(), y_vectors.begin(), y_vectors.end());
        return v;
    }
};

/// Fills table, norms and rank from the vectors.
inline CSystem from_vectors(std::vector<std::vector<double>> xs, std::vector<std::vector<double>> ys) {
    if (xs.empty() || xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "need M x- and M y-vectors");
    CSystem cs;
    cs.settings = xs.size();
    cs.x_vectors = std::move(xs);
    cs.y_vectors = std::move(ys);
    cs.table = RealMatrix(cs.settings, cs.settings);
    for (std::size_t i = 0; i < cs.settings; ++i)
        for (std::size_t j = 0; j < cs.settings; ++j) cs.table(i, j) = inner(cs.x_vectors[i], cs.y_vectors[j]);
    for (const auto& v : cs.x_vectors) cs.norms_x.push_back(norm2(v));
    for (const auto& v : cs.y_vectors) cs.norms_y.push_back(norm2(v));
    cs.rank = gram_rank(cs.all_vectors());
    return cs;
}

/// x_i = (A_i (x) 1) psi and y_j = (1 (x) B_j) psi for dichotomic observables
/// cos(phi) sigma_3 + sin(phi) sigma_1 at the given per-setting angles.
inline CSystem from_representation(const std::vector<double>& angles_a, const std::vector<double>& angles_b,
                                   const std::vector<cplx>& psi) {
    if (angles_a.empty() || angles_a.size() != angles_b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "both sides need the same number of settings");
    }
    if (psi.size() != 4) throw Error(ErrorCode::DimensionMismatch, "two-qubit state expected");
    std::vector<double> v(4);
    for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(psi[k].imag()) > 1e-12) throw Error(ErrorCode::NonRealState, "c-systems need a real state");
        v[k] = psi[k].real();
    }
    const double nv = norm2(v);
    if (std::abs(nv - 1.0) > 1e-9) throw Error(ErrorCode::InvalidState, "state is not normalized");

    const RealMatrix id = RealMatrix::identity(2);
    std::vector<std::vector<double>> xs, ys;
    bool marg_zero = true;
    for (double phi : angles_a) {
        xs.push_back(kron(qubit_observable(phi, 1), id) * v);
        marg_zero = marg_zero && std::abs(inner(v, xs.back())) <= 1e-10;
    }
    for (double phi : angles_b) {
        ys.push_back(kron(id, qubit_observable(phi, 1)) * v);
        marg_zero = marg_zero && std::abs(inner(v, ys.back())) <= 1e-10;
    }
    CSystem cs = from_vectors(std::move(xs), std::move(ys));
    cs.marginals_zero = marg_zero;
    return cs;
}

inline CSystem from_representation(const std::vector<double>& angles_a, const std::vector<double>& angles_b,
                                   const std::vector<double>& psi) {
    return from_representation(angles_a, angles_b, std::vector<cplx>(psi.begin(), psi.end()));
}

struct CompletionResult {
    bool converged = false;
    double defect = 0.0; ///< distance of the PSD iterate from the constraint set (max norm)
    std::size_t iterations = 0;
    CSystem system;      ///< factorization of the final PSD iterate
};

namespace detail {

inline void impose_constraints(RealMatrix& g, const RealMatrix& c) {
    const std::size_t m = c.rows();
    for (std::size_t i = 0; i < 2 * m; ++i) g(i, i) = 1.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            g(i, m + j) = c(i, j);
            g(m + j, i) = c(i, j);
        }
}

inline double constraint_defect(const RealMatrix& g, const RealMatrix& c) {
    const std::size_t m = c.rows();
    double d = 0.0;
    for (std::size_t i = 0; i < 2 * m; ++i) d = std::max(d, std::abs(g(i, i) - 1.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) d = std::max(d, std::abs(g(i, m + j) - c(i, j)));
    return d;
}

// Rows of V sqrt(Lambda) over the eigenvalues above the rank tolerance.
inline std::vector<std::vector<double>> factor_gram(const RealMatrix& g) {
    const auto eig = hermitian_eig(g);
    const std::size_t n = g.rows();
    const double top = std::max(eig.values.back(), 0.0);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < n; ++k)
        if (eig.values[k] > default_rank_tol * top) keep.push_back(k);
    std::vector<std::vector<double>> rows(n, std::vector<double>(keep.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < keep.size(); ++a)
            rows[i][a] = eig.vectors(i, keep[a]) * std::sqrt(eig.values[keep[a]]);
    return rows;
}

} // namespace detail

inline void check_table(const RealMatrix& c) {
    if (c.rows() == 0 || !c.square()) throw Error(ErrorCode::InvalidTable, "correlation table must be square, M >= 1");
    for (double v : c.entries())
        if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) throw Error(ErrorCode::InvalidTable, "|c_ij| must be <= 1");
}

/// Gram completion [[Gx, c], [c^T, Gy]] by alternating projections between
/// the PSD cone and the unit-diagonal, fixed-cross-block affine set.
inline CompletionResult complete_from_table(const RealMatrix& c, std::size_t max_iters = 10'000,
                                            double tol = csystem_tol) {
    check_table(c);
    const std::size_t m = c.rows();
    RealMatrix g = RealMatrix::identity(2 * m);
    detail::impose_constraints(g, c);

    CompletionResult out;
    RealMatrix best;
    double best_defect = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= max_iters; ++it) {
        RealMatrix p = psd_project(g);
        const double d = detail::constraint_defect(p, c);
        out.iterations = it;
        if (d < best_defect) {
            best_defect = d;
            best = p;
        }
        if (d < tol) break;
        g = std::move(p);
        detail::impose_constraints(g, c);
    }
    out.defect = best_defect;
    out.converged = best_defect < tol;

    const auto rows = detail::factor_gram(best);
    std::vector<std::vector<double>> xs(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<std::vector<double>> ys(rows.begin() + static_cast<std::ptrdiff_t>(m), rows.end());
    if (!xs.front().empty()) {
        out.system = from_vectors(std::move(xs), std::move(ys));
    } else {
        out.system.settings = m;
        out.system.table = RealMatrix(m, m);
    }
    double repro = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) repro = std::max(repro, std::abs(out.system.table(i, j) - c(i, j)));
    out.system.defect = repro;
    return out;
}

struct RankBounds {
    bool leq_m = false;
    bool quadratic = false;
    bool triangular = false;

    bool all() const { return leq_m && quadratic && triangular; }
};

/// r <= M, r <= -1/2 + sqrt(1/4 + 4M), r(r+1)/2 <= 2M - 1.
inline RankBounds rank_bounds_check(std::size_t r, std::size_t m) {
    const double rd = static_cast<double>(r), md = static_cast<double>(m);
    return {r <= m, rd <= -0.5 + std::sqrt(0.25 + 4.0 * md) + 1e-12, r * (r + 1) / 2 + 1 <= 2 * m};
}

namespace detail {

// Orthonormal basis (as rows) of span(vectors).
inline std::vector<std::vector<double>> span_basis(const std::vector<std::vector<double>>& vectors) {
    const std::size_t d = vectors.front().size();
    RealMatrix s(d, d);
    for (const auto& v : vectors)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) s(a, b) += v[a] * v[b];
    const auto eig = hermitian_eig(s);
    const double top = std::max(eig.values.back(), 0.0);
    std::vector<std::vector<double>> basis;
    for (std::size_t k = 0; k < d; ++k)
        if (eig.values[k] > default_rank_tol * top) basis.push_back(eig.vectors.column(k));
    return basis;
}

} // namespace detail

/// The hulls of {x_i} and {y_j} coincide.
inline bool hulls_coincide(const CSystem& cs) {
    const std::size_t rx = gram_rank(cs.x_vectors), ry = gram_rank(cs.y_vectors);
    const std::size_t ru = gram_rank(cs.all_vectors());
    return rx == ru && ry == ru;
}

/// {v (x) v} over all 2M vectors spans the symmetric subspace of R^r (x) R^r.
inline bool symmetric_span_check(const CSystem& cs) {
    if (!hulls_coincide(cs)) throw Error(ErrorCode::HullMismatch, "span{x_i} differs from span{y_j}");
    const auto all = cs.all_vectors();
    const auto basis = detail::span_basis(all);
    const std::size_t r = basis.size();
    std::vector<std::vector<double>> sym;
    for (const auto& v : all) {
        std::vector<double> coords(r);
        for (std::size_t a = 0; a < r; ++a) coords[a] = inner(basis[a], v);
        std::vector<double> w;
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a; b < r; ++b) w.push_back(a == b ? coords[a] * coords[a] : std::sqrt(2.0) * coords[a] * coords[b]);
        sym.push_back(std::move(w));
    }
    return gram_rank(sym) == r * (r + 1) / 2;
}

inline bool marginals_zero_check(const Behavior& b, double tol = 1e-10) {
    const CorrelationTable t = correlation_table(b);
    for (double v : t.marginals_a)
        if (std::abs(v) > tol) return false;
    for (double v : t.marginals_b)
        if (std::abs(v) > tol) return false;
    return true;
}

/// Gram matrices of [x_1..x_M, y_1..y_M] agree.
inline bool isometric(const CSystem& a, const CSystem& b, double tol = 1e-8) {
    if (a.settings != b.settings) return false;
    const auto va = a.all_vectors(), vb = b.all_vectors();
    for (std::size_t i = 0; i < va.size(); ++i)
        for (std::size_t j = 0; j < va.size(); ++j)
            if (std::abs(inner(va[i], va[j]) - inner(vb[i], vb[j])) > tol) return false;
    return true;
}

enum class RankParity { AlgebraicallySecure, SecureTwoReps };

inline std::string to_string(RankParity p) {
    return p == RankParity::AlgebraicallySecure ? "AlgebraicallySecure" : "SecureTwoReps";
}

/// Even rank: one representation; odd rank: two inequivalent ones. Only
/// meaningful for systems that pass the extremality preconditions.
inline RankParity classify_rank_parity(const CSystem& cs) {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::PreconditionNotMet, why); };
    for (double n : cs.norms_x)
        if (std::abs(n - 1.0) > csystem_tol) fail("vectors are not unit norm");
    for (double n : cs.norms_y)
        if (std::abs(n - 1.0) > csystem_tol) fail("vectors are not unit norm");
    if (cs.marginals_zero.has_value() && !*cs.marginals_zero) fail("local marginals do not vanish");
    if (cs.rank <= 1) fail("deterministic table (rank 1)");
    if (!hulls_coincide(cs)) fail("hulls of x and y vectors differ");
    if (!symmetric_span_check(cs)) fail("v (x) v does not span the symmetric subspace");
    return cs.rank % 2 == 0 ? RankParity::AlgebraicallySecure : RankParity::SecureTwoReps;
}

} // namespace qsecure

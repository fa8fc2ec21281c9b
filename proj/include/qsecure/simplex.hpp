#pragma once

// Dense tableau simplex for   min c^T z  s.t.  A z = b, z >= 0.
// Artificial variables start the basis (phase 1); Bland's rule picks both
// entering and leaving variables, so the method cannot cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "qsecure/error.hpp"

namespace qsecure::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Options {
    double pivot_tol = 1e-11;
    double optimality_tol = 1e-10;
    double feasibility_tol = 1e-9;
    std::size_t max_iterations = 0; ///< 0: 50 (m + n) + 1000
};

struct Result {
    Status status = Status::Infeasible;
    std::vector<double> x;       ///< primal solution (feasible point for phase 1)
    std::vector<double> duals;   ///< y with c_j - y^T A_j >= 0 at optimality
    double objective = 0.0;
    double infeasibility = 0.0;  ///< phase-1 optimum: sum of artificial values
    std::size_t iterations = 0;
};

/// Columns of A are stored contiguously: columns[j][i] = A(i, j).
using ColumnMatrix = std::vector<std::vector<double>>;

class Tableau {
public:
    Tableau(const ColumnMatrix& columns, const std::vector<double>& b, Options opt)
        : m_(b.size()), n_(columns.size()), width_(n_ + m_ + 1), opt_(opt),
          t_(m_ * width_, 0.0), cost_(width_, 0.0), sign_(m_, 1.0), basis_(m_) {
        for (const auto& col : columns) {
            if (col.size() != m_) throw Error(ErrorCode::DimensionMismatch, "LP column length");
        }
        for (std::size_t i = 0; i < m_; ++i) {
            sign_[i] = b[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign_[i] * columns[j][i];
            at(i, n_ + i) = 1.0;
            at(i, width_ - 1) = sign_[i] * b[i];
            basis_[i] = n_ + i;
        }
        if (opt_.max_iterations == 0) opt_.max_iterations = 50 * (m_ + n_) + 1000;
    }

    /// Phase 1. Returns the minimal sum of artificial variables.
    double phase_one() {
        std::vector<double> c(n_ + m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) c[n_ + i] = 1.0;
        set_costs(c);
        run(n_ + m_);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) infeas += std::max(0.0, at(i, width_ - 1));
        return infeas;
    }

    /// Pivots zero-level artificials out of the basis where a structural
    /// column allows it. Rows where none does are redundant equalities; their
    /// artificial stays basic at zero and is never touched again.
    void expel_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            std::size_t best = n_;
            double best_abs = 1e-9;
            for (std::size_t j = 0; j < n_; ++j) {
                if (std::abs(at(i, j)) > best_abs) {
                    best_abs = std::abs(at(i, j));
                    best = j;
                }
            }
            if (best < n_) pivot(i, best);
        }
    }

    /// Phase 2 over structural columns only. Returns false if unbounded.
    bool phase_two(const std::vector<double>& c) {
        std::vector<double> full(n_ + m_, 0.0);
        std::copy(c.begin(), c.end(), full.begin());
        set_costs(full);
        return run(n_);
    }

    std::vector<double> primal() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, at(i, width_ - 1));
        return x;
    }

    /// y = c_B^T B^{-1}, read from the artificial block (which started as the
    /// identity of the sign-normalized system).
    std::vector<double> duals() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += costs_[basis_[i]] * at(i, n_ + k);
            y[k] = sign_[k] * s;
        }
        return y;
    }

    double objective() const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i) s += costs_[basis_[i]] * at(i, width_ - 1);
        return s;
    }

    std::size_t iterations() const { return iterations_; }

private:
    double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }

    void set_costs(const std::vector<double>& c) {
        costs_ = c;
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] = c[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) cost_[j] -= cb * at(i, j);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const double inv = 1.0 / at(row, col);
        for (std::size_t j = 0; j < width_; ++j) at(row, j) *= inv;
        at(row, col) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
            at(i, col) = 0.0;
        }
        const double f = cost_[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width_; ++j) cost_[j] -= f * at(row, j);
            cost_[col] = 0.0;
        }
        basis_[row] = col;
    }

    // Bland's rule over columns [0, allowed).
    bool run(std::size_t allowed) {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (cost_[j] < -opt_.optimality_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= opt_.pivot_tol) continue;
                const double ratio = std::max(0.0, at(i, width_ - 1)) / a;
                if (ratio < best_ratio - 1e-14 ||
                    (ratio <= best_ratio + 1e-14 && leave < m_ && basis_[i] < basis_[leave])) {
                    best_ratio = std::min(best_ratio, ratio);
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
            if (++iterations_ > opt_.max_iterations) {
                throw Error(ErrorCode::LPStall, "simplex iteration cap reached");
            }
        }
    }

    std::size_t m_, n_, width_;
    Options opt_;
    std::vector<double> t_;
    std::vector<double> cost_;  ///< reduced costs; last entry is -objective
    std::vector<double> costs_; ///< original costs of the current phase
    std::vector<double> sign_;
    std::vector<std::size_t> basis_;
    std::size_t iterations_ = 0;
};

/// Phase 1 only: is {z >= 0 : A z = b} nonempty? On infeasibility the duals
/// y satisfy y^T A_j <= 0 for every column and y^T b > 0.
inline Result find_feasible(const ColumnMatrix& columns, const std::vector<double>& b, Options opt = {}) {
    Tableau tab(columns, b, opt);
    Result r;
    r.infeasibility = tab.phase_one();
    r.iterations = tab.iterations();
    r.duals = tab.duals();
    r.objective = r.infeasibility;
    if (r.infeasibility > opt.feasibility_tol) {
        r.status = Status::Infeasible;
        return r;
    }
    r.status = Status::Optimal;
    r.x = tab.primal();
    return r;
}

/// Two-phase simplex.
inline Result minimize(const ColumnMatrix& columns, const std::vector<double>& b, const std::vector<double>& c,
                       Options opt = {}) {
    if (c.size() != columns.size()) throw Error(ErrorCode::DimensionMismatch, "cost vector length");
    Tableau tab(columns, b, opt);
    Result r;
    r.infeasibility = tab.phase_one();
    if (r.infeasibility > opt.feasibility_tol) {
        r.status = Status::Infeasible;
        r.iterations = tab.iterations();
        return r;
    }
    tab.expel_artificials();
    const bool bounded = tab.phase_two(c);
    r.iterations = tab.iterations();
    r.status = bounded ? Status::Optimal : Status::Unbounded;
    r.x = tab.primal();
    r.duals = tab.duals();
    r.objective = tab.objective();
    return r;
}

} // namespace qsecure::lp

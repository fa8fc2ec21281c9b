#pragma once

// Dense linear algebra sized for 2^N x 2^N operators with N <= 6.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "qsecure/error.hpp"

namespace qsecure {

using cplx = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
inline T conj_of(const T& v) {
    if constexpr (is_complex<T>::value) {
        return std::conj(v);
    } else {
        return v;
    }
}

template <class T>
inline double real_of(const T& v) {
    if constexpr (is_complex<T>::value) {
        return v.real();
    } else {
        return v;
    }
}

/// Row-major dense matrix over double or std::complex<double>.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) {
            throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows*cols");
        }
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj_of((*this)(i, j));
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, T s) { return a *= s; }
    friend Matrix operator*(T s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error(ErrorCode::DimensionMismatch, "matrix product");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend std::vector<T> operator*(const Matrix& a, std::span<const T> v) {
        if (a.cols_ != v.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
        std::vector<T> out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T s{};
            for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }
    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
        return a * std::span<const T>(v);
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw Error(ErrorCode::DimensionMismatch, "shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline ComplexMatrix to_complex(const RealMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

/// Conjugate-linear in the first argument.
template <class T>
T inner(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "inner product");
    T s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += conj_of(a[i]) * b[i];
    return s;
}
template <class T>
T inner(const std::vector<T>& a, const std::vector<T>& b) {
    return inner(std::span<const T>(a), std::span<const T>(b));
}

template <class T>
double norm2(std::span<const T> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}
template <class T>
double norm2(const std::vector<T>& v) {
    return norm2(std::span<const T>(v));
}

/// Largest |m(i,j) - conj(m(j,i))|.
template <class T>
double hermitian_defect(const Matrix<T>& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            d = std::max(d, std::abs(m(i, j) - conj_of(m(j, i))));
    return d;
}

template <class T>
struct EigenDecomposition {
    std::vector<double> values; ///< ascending
    Matrix<T> vectors;          ///< orthonormal columns, column k pairs with values[k]
};

namespace detail {

// Cyclic Jacobi on a Hermitian matrix. For complex entries each rotation is
// preceded by a diagonal phase that makes the pivot real, after which the
// ordinary real rotation annihilates it.
template <class T, bool WantVectors = true>
EigenDecomposition<T> jacobi(Matrix<T> a) {
    const std::size_t n = a.rows();
    Matrix<T> v = WantVectors ? Matrix<T>::identity(n) : Matrix<T>();
    const double scale = a.frobenius();

    for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += std::norm(a(i, j));
        if (std::sqrt(off) < 1e-12 * scale) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag < 1e-300) continue;

                if constexpr (is_complex<T>::value) {
                    const T phase = a(p, q) / mag;
                    if (phase != T{1}) {
                        const T dq = std::conj(phase);
                        for (std::size_t k = 0; k < n; ++k) a(k, q) *= dq;
                        for (std::size_t k = 0; k < n; ++k) a(q, k) *= phase;
                        if constexpr (WantVectors)
                            for (std::size_t k = 0; k < n; ++k) v(k, q) *= dq;
                    }
                }

                const double app = real_of(a(p, p));
                const double aqq = real_of(a(q, q));
                const double apq = real_of(a(p, q));
                const double theta = (aqq - app) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const T akp = a(k, p);
                    const T akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const T apk = a(p, k);
                    const T aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = T{};
                a(q, p) = T{};
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                if constexpr (WantVectors)
                for (std::size_t k = 0; k < n; ++k) {
                    const T vkp = v(k, p);
                    const T vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return real_of(a(i, i)) < real_of(a(j, j));
    });
    EigenDecomposition<T> out{std::vector<double>(n), WantVectors ? Matrix<T>(n, n) : Matrix<T>()};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = real_of(a(order[k], order[k]));
        if constexpr (WantVectors)
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

template <class T>
void require_hermitian(const Matrix<T>& m) {
    if (!m.square()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    if (hermitian_defect(m) > 1e-10 * m.max_abs()) {
        throw Error(ErrorCode::NonHermitian, "symmetry violated beyond 1e-10 relative");
    }
}

template <class T>
Matrix<T> hermitian_part(const Matrix<T>& m) {
    Matrix<T> h(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + conj_of(m(j, i)));
    return h;
}

} // namespace detail

/// Full eigendecomposition of a Hermitian (or real symmetric) matrix.
/// Complex input with vanishing imaginary parts is solved on the real path.
template <class T>
EigenDecomposition<T> hermitian_eig(const Matrix<T>& m) {
    detail::require_hermitian(m);
    if constexpr (is_complex<T>::value) {
        bool real_valued = true;
        for (const auto& v : m.entries()) {
            if (v.imag() != 0.0) {
                real_valued = false;
                break;
            }
        }
        if (real_valued) {
            RealMatrix r(m.rows(), m.cols());
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).real();
            auto re = detail::jacobi(detail::hermitian_part(r));
            return {std::move(re.values), to_complex(re.vectors)};
        }
    }
    return detail::jacobi(detail::hermitian_part(m));
}

namespace detail {

// Householder reduction to tridiagonal form (diagonal d, subdiagonal e[1..n-1]).
inline void tridiagonalize(RealMatrix a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                const double f = a(i, l);
                const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                double ff = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    double gg = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) gg += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) gg += a(k, j) * a(i, k);
                    e[j] = gg / h;
                    ff += e[j] * a(i, j);
                }
                const double hh = ff / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    const double fj = a(i, j);
                    const double gj = e[j] - hh * fj;
                    e[j] = gj;
                    for (std::size_t k = 0; k <= j; ++k) a(j, k) -= fj * e[k] + gj * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    if (n > 0) e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        for (int iter = 0;; ++iter) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (iter == 60) throw Error(ErrorCode::DimensionMismatch, "tridiagonal QL failed to converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
            double s = 1.0, c = 1.0, p = 0.0;
            std::size_t i = m;
            bool underflow = false;
            while (i-- > l) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

} // namespace detail

/// Ascending eigenvalues without eigenvectors, by Householder reduction and
/// implicit QL. Used where only the spectrum is needed in tight loops.
inline std::vector<double> symmetric_eigenvalues(const RealMatrix& m) {
    detail::require_hermitian(m);
    std::vector<double> d, e;
    detail::tridiagonalize(detail::hermitian_part(m), d, e);
    detail::tridiagonal_ql(d, e);
    std::sort(d.begin(), d.end());
    return d;
}

template <class T>
struct TopEigenpair {
    double value = 0.0;
    std::vector<T> vector;
    double gap = 0.0; ///< largest minus second-largest eigenvalue; 0 in dimension 1
};

template <class T>
TopEigenpair<T> top_eigenpair(const Matrix<T>& m) {
    auto eig = hermitian_eig(m);
    const std::size_t n = eig.values.size();
    if (n == 0) throw Error(ErrorCode::EmptyInput, "empty matrix");
    TopEigenpair<T> out;
    out.value = eig.values[n - 1];
    out.vector = eig.vectors.column(n - 1);
    out.gap = n > 1 ? eig.values[n - 1] - eig.values[n - 2] : 0.0;
    return out;
}

inline constexpr double default_rank_tol = 1e-9;

/// Rank from the Gram matrix spectrum: eigenvalues above rel_tol times the largest.
inline std::size_t gram_rank(const std::vector<std::vector<double>>& vectors,
                             double rel_tol = default_rank_tol) {
    if (vectors.empty()) throw Error(ErrorCode::EmptyInput, "no vectors");
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, "vectors differ in dimension");
    }
    const std::size_t k = vectors.size();
    RealMatrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) g(i, j) = g(j, i) = inner(vectors[i], vectors[j]);
    const auto eig = hermitian_eig(g);
    const double top = eig.values.back();
    if (top <= 0.0) return 0;
    return static_cast<std::size_t>(std::count_if(eig.values.begin(), eig.values.end(),
                                                  [&](double ev) { return ev > rel_tol * top; }));
}

/// Nearest positive semidefinite matrix in Frobenius norm.
inline RealMatrix psd_project(const RealMatrix& m) {
    if (!m.square()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    if (hermitian_defect(m) > 1e-10 * std::max(1.0, m.max_abs())) {
        throw Error(ErrorCode::NonSymmetric, "psd_project needs a symmetric matrix");
    }
    const auto eig = hermitian_eig(m);
    const std::size_t n = m.rows();
    RealMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ev = eig.values[k];
        if (ev <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = ev * eig.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * eig.vectors(j, k);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
    return out;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(RealMatrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (!a.square() || b.size() != n) throw Error(ErrorCode::DimensionMismatch, "solve");
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) <= 1e-14 * scale) {
            throw Error(ErrorCode::SingularMatrix, "matrix is singular to working precision");
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

inline RealMatrix inverse(const RealMatrix& a) {
    const std::size_t n = a.rows();
    if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
    RealMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const auto col = solve(a, std::move(e));
        for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
    }
    return out;
}

} // namespace qsecure

#pragma once

// Small dense linear algebra: row-major matrices, LU with partial pivoting,
// and a cyclic Jacobi eigensolver for symmetric matrices. Everything is
// templated on the scalar so the Kato checks can run in extended precision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mcbern/error.hpp"

#if defined(__GNUC__) && !defined(__clang__) && defined(__SIZEOF_FLOAT128__)
#define MCBERN_HAS_FLOAT128 1
#include <quadmath.h>
#endif

namespace mcbern {

#ifdef MCBERN_HAS_FLOAT128
using extended_float = __float128;
#else
using extended_float = long double;
#endif

namespace num {

inline double sqrt_of(double x) { return std::sqrt(x); }
inline long double sqrt_of(long double x) { return std::sqrt(x); }
inline double abs_of(double x) { return std::fabs(x); }
inline long double abs_of(long double x) { return std::fabs(x); }
inline double exp_of(double x) { return std::exp(x); }
inline long double exp_of(long double x) { return std::exp(x); }

#ifdef MCBERN_HAS_FLOAT128
inline __float128 sqrt_of(__float128 x) { return sqrtq(x); }
inline __float128 abs_of(__float128 x) { return fabsq(x); }
inline __float128 exp_of(__float128 x) { return expq(x); }
#endif

template <class T>
constexpr T epsilon_of() {
    if constexpr (std::is_same_v<T, double>) {
        return 2.220446049250313e-16;
    } else if constexpr (std::is_same_v<T, long double>) {
        return static_cast<long double>(1.0842021724855044340e-19L);
    } else {
        // 2^-112 for binary128.
        T e = 1;
        for (int i = 0; i < 112; ++i) e /= 2;
        return e;
    }
}

}  // namespace num

template <class T>
class basic_matrix {
public:
    using value_type = T;

    basic_matrix() = default;
    basic_matrix(std::size_t rows, std::size_t cols, T fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static basic_matrix identity(std::size_t n) {
        basic_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static basic_matrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        basic_matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) raise(Errc::NotSquare, "ragged row " + std::to_string(i));
            for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<T>(rows[i][j]);
        }
        return m;
    }

    /// Diagonal matrix with the given entries.
    static basic_matrix diagonal(const std::vector<T>& d) {
        basic_matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const T> data() const noexcept { return data_; }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i][j] = static_cast<double>((*this)(i, j));
        return out;
    }

    template <class U>
    basic_matrix<U> cast() const {
        basic_matrix<U> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = static_cast<U>((*this)(i, j));
        return m;
    }

    basic_matrix transposed() const {
        basic_matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    basic_matrix& operator+=(const basic_matrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    basic_matrix& operator-=(const basic_matrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    basic_matrix& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend basic_matrix operator+(basic_matrix a, const basic_matrix& b) { return a += b; }
    friend basic_matrix operator-(basic_matrix a, const basic_matrix& b) { return a -= b; }
    friend basic_matrix operator*(basic_matrix a, T s) { return a *= s; }
    friend basic_matrix operator*(T s, basic_matrix a) { return a *= s; }

    friend basic_matrix operator*(const basic_matrix& a, const basic_matrix& b) {
        basic_matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    friend bool operator==(const basic_matrix& a, const basic_matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = basic_matrix<double>;
using Vector = std::vector<double>;

/// y = A x
template <class T>
std::vector<T> matvec(const basic_matrix<T>& a, const std::vector<T>& x) {
    std::vector<T> y(a.rows(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// y^T = x^T A
template <class T>
std::vector<T> vecmat(const std::vector<T>& x, const basic_matrix<T>& a) {
    std::vector<T> y(a.cols(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const T xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * a(i, j);
    }
    return y;
}

template <class T>
T trace(const basic_matrix<T>& a) {
    T s = 0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
    return s;
}

template <class T>
T max_abs(const basic_matrix<T>& a) {
    T m = 0;
    for (const T& v : a.data()) m = std::max(m, num::abs_of(v));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

/// LU factorisation with partial pivoting. A pivot below
/// 64·n·eps·max|A| marks the matrix singular.
template <class T>
class basic_lu {
public:
    explicit basic_lu(basic_matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        if (!lu_.square()) raise(Errc::NotSquare, "LU needs a square matrix");
        const std::size_t n = lu_.rows();
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        const T scale = max_abs(lu_);
        const T tiny = T(64) * static_cast<T>(n == 0 ? 1 : n) * num::epsilon_of<T>() * scale;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            T best = num::abs_of(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const T v = num::abs_of(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best <= tiny || scale == T(0)) {
                singular_ = true;
                continue;
            }
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            const T d = lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const T l = lu_(i, k) / d;
                lu_(i, k) = l;
                if (l == T(0)) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
            }
        }
    }

    bool singular() const noexcept { return singular_; }
    std::size_t size() const noexcept { return lu_.rows(); }

    std::vector<T> solve(const std::vector<T>& b) const {
        if (singular_) raise(Errc::SingularSolve, "matrix is numerically singular");
        const std::size_t n = lu_.rows();
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    basic_matrix<T> inverse() const {
        const std::size_t n = lu_.rows();
        basic_matrix<T> inv(n, n);
        std::vector<T> e(n, T(0));
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), T(0));
            e[j] = T(1);
            const auto col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

private:
    basic_matrix<T> lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

using Lu = basic_lu<double>;

/// Eigenpairs of a symmetric matrix, sorted by decreasing eigenvalue.
/// Column k of `vectors` is the unit eigenvector for values[k].
template <class T>
struct basic_eigensystem {
    std::vector<T> values;
    basic_matrix<T> vectors;
    int sweeps = 0;
};

using Eigensystem = basic_eigensystem<double>;

/// Default off-diagonal tolerance for the Jacobi solver in scalar type T.
template <class T>
constexpr T jacobi_tolerance() {
    if constexpr (std::is_same_v<T, double>) {
        return 1e-13;
    } else {
        return T(1000) * num::epsilon_of<T>();
    }
}

/// Cyclic Jacobi for a symmetric matrix (only symmetric input is meaningful).
/// Sweeps in fixed (p, q) order until the off-diagonal Frobenius norm drops
/// below tol·‖A‖_F; throws EigensolverFailure after max_sweeps.
template <class T>
basic_eigensystem<T> jacobi_eigen(basic_matrix<T> a, T tol = jacobi_tolerance<T>(),
                                  int max_sweeps = 100) {
    if (!a.square()) raise(Errc::NotSquare, "eigensolver needs a square matrix");
    const std::size_t n = a.rows();
    basic_matrix<T> v = basic_matrix<T>::identity(n);

    auto off_norm = [&]() {
        T s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return num::sqrt_of(s);
    };
    T fro = 0;
    for (const T& x : a.data()) fro += x * x;
    fro = num::sqrt_of(fro);
    const T target = tol * (fro > T(0) ? fro : T(1));

    int sweep = 0;
    for (; off_norm() >= target; ++sweep) {
        if (sweep >= max_sweeps)
            raise(Errc::EigensolverFailure,
                  "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = a(p, q);
                if (apq == T(0)) continue;
                const T theta = (a(q, q) - a(p, p)) / (T(2) * apq);
                T t;
                if (num::abs_of(theta) > T(1e100)) {
                    t = T(1) / (T(2) * theta);
                } else {
                    t = T(1) / (num::abs_of(theta) + num::sqrt_of(theta * theta + T(1)));
                    if (theta < T(0)) t = -t;
                }
                const T c = T(1) / num::sqrt_of(t * t + T(1));
                const T s = t * c;
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
                a(p, q) = T(0);
                a(q, p) = T(0);
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
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    basic_eigensystem<T> out;
    out.values.resize(n);
    out.vectors = basic_matrix<T>(n, n);
    out.sweeps = sweep;
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// Largest eigenvalue of a symmetric matrix.
template <class T>
T largest_symmetric_eigenvalue(const basic_matrix<T>& a) {
    if (a.rows() == 0) raise(Errc::InvalidArgument, "empty matrix");
    return jacobi_eigen(a).values.front();
}

}  // namespace mcbern

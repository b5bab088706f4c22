#include "mcbern/kato.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcbern/bounds.hpp"
#include "mcbern/spectral.hpp"

namespace mcbern {

namespace {

template <class T>
struct Tilt {
    basic_matrix<T> p;
    std::vector<T> pi;
    std::vector<T> f;
};

void require_reversible(const FiniteChain& chain, const StationaryDist& pi) {
    if (!is_reversible(chain, pi))
        raise(Errc::NotReversible, "chain fails detailed balance within 1e-10");
}

// Re-solves the bordered stationary system in T and re-centers f there, so
// that extended-precision work does not inherit double rounding from π.
template <class T>
Tilt<T> make_tilt(const FiniteChain& chain, const StationaryDist& pi, const Observable& f) {
    if (f.size() != chain.n_states())
        raise(Errc::InvalidArgument, "observable length does not match the chain");
    const std::size_t n = chain.n_states();
    Tilt<T> s;
    s.p = chain.transition().cast<T>();
    s.pi.assign(pi.pi.begin(), pi.pi.end());
    if constexpr (!std::is_same_v<T, double>) {
        // Rows summing to 1 in T, then pi and f redone at that precision.
        for (std::size_t i = 0; i < n; ++i) {
            T row_sum = 0;
            for (std::size_t j = 0; j < n; ++j) row_sum += s.p(i, j);
            for (std::size_t j = 0; j < n; ++j) s.p(i, j) /= row_sum;
        }
        if (n > 1) {
            basic_matrix<T> a = s.p.transposed() - basic_matrix<T>::identity(n);
            for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = T(1);
            basic_lu<T> lu(a);
            if (lu.singular()) raise(Errc::NonUniqueStationary, "bordered system is singular");
            std::vector<T> rhs(n, T(0));
            rhs[n - 1] = T(1);
            s.pi = lu.solve(rhs);
        }
    }
    s.f.assign(f.values.begin(), f.values.end());
    T mean = 0;
    for (std::size_t x = 0; x < n; ++x) mean += s.pi[x] * s.f[x];
    for (auto& v : s.f) v -= mean;
    return s;
}

template <class T>
T top_eigenvalue(const Tilt<T>& s, T t) {
    const std::size_t n = s.p.rows();
    std::vector<T> e(n), root(n);
    for (std::size_t x = 0; x < n; ++x) {
        e[x] = num::exp_of(t * s.f[x]);
        root[x] = num::sqrt_of(s.pi[x]);
    }
    basic_matrix<T> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = root[i] * num::sqrt_of(e[i]) * s.p(i, j) * num::sqrt_of(e[j]) / root[j];
    basic_matrix<T> sym = (m + m.transposed()) * T(0.5);
    T mu = jacobi_eigen(sym).values.front();
    if constexpr (std::is_same_v<T, double>) {
        return mu;
    } else {
        // Symmetrization hides detailed-balance defects at the level of the
        // double input; inverse iteration on P·E itself removes them.
        basic_matrix<T> a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = s.p(i, j) * e[j];
        basic_matrix<T> shifted = a;
        const T shift = mu * (T(1) + T(1e-20));
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= shift;
        basic_lu<T> lu(shifted);
        if (lu.singular()) return mu;
        std::vector<T> x(n, T(1));
        for (int it = 0; it < 5; ++it) {
            x = lu.solve(x);
            T norm = 0;
            for (const T& v : x) norm += v * v;
            norm = num::sqrt_of(norm);
            for (T& v : x) v /= norm;
        }
        const std::vector<T> ax = matvec(a, x);
        T num_ = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num_ += x[i] * ax[i];
            den += x[i] * x[i];
        }
        return num_ / den;
    }
}

template <class T>
T trace_of_product(const basic_matrix<T>& x, const basic_matrix<T>& y) {
    T s = 0;
    const std::size_t n = x.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += x(i, j) * y(j, i);
    return s;
}

template <class T>
std::vector<T> coefficients(const Tilt<T>& s, std::size_t order) {
    const std::size_t n = s.p.rows();
    basic_matrix<T> proj(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) proj(i, j) = s.pi[j];
    basic_lu<T> lu(basic_matrix<T>::identity(n) - s.p + proj);
    if (lu.singular()) raise(Errc::SingularSolve, "I - P + Pi is singular");
    const basic_matrix<T> z = lu.inverse() - proj;

    // factor[v][k] = P D^v / v! · Z^(k)
    std::vector<basic_matrix<T>> zpow(order);
    if (order > 0) zpow[0] = proj * T(-1);
    for (std::size_t k = 1; k < order; ++k) zpow[k] = k == 1 ? z : zpow[k - 1] * z;
    std::vector<std::vector<basic_matrix<T>>> factor(order + 1);
    for (std::size_t v = 1; v <= order; ++v) {
        basic_matrix<T> pd(n, n);
        T fact = 1;
        for (std::size_t i = 2; i <= v; ++i) fact *= T(static_cast<double>(i));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                T fv = 1;
                for (std::size_t r = 0; r < v; ++r) fv *= s.f[j];
                pd(i, j) = s.p(i, j) * fv / fact;
            }
        factor[v].resize(order);
        for (std::size_t k = 0; k < order; ++k) factor[v][k] = pd * zpow[k];
    }

    std::vector<T> beta(order + 1, T(0));
    beta[0] = T(1);
    for (std::size_t total = 1; total <= order; ++total) {
        T sum_all = 0;
        for (std::size_t p = 1; p <= total; ++p) {
            T sum_p = 0;
            // Walk slots left to right; the last slot takes what is left.
            auto walk = [&](auto&& self, const basic_matrix<T>* prefix, std::size_t slot,
                            std::size_t vleft, std::size_t kleft) -> void {
                if (slot + 1 == p) {
                    const basic_matrix<T>& last = factor[vleft][kleft];
                    if (prefix) {
                        sum_p += trace_of_product(*prefix, last);
                    } else {
                        T tr = 0;
                        for (std::size_t i = 0; i < n; ++i) tr += last(i, i);
                        sum_p += tr;
                    }
                    return;
                }
                const std::size_t slots_after = p - 1 - slot;
                for (std::size_t v = 1; v + slots_after <= vleft; ++v) {
                    for (std::size_t k = 0; k <= kleft; ++k) {
                        const basic_matrix<T> next =
                            prefix ? (*prefix) * factor[v][k] : factor[v][k];
                        self(self, &next, slot + 1, vleft - v, kleft - k);
                    }
                }
            };
            walk(walk, nullptr, 0, total, p - 1);
            sum_all -= sum_p / T(static_cast<double>(p));
        }
        beta[total] = sum_all;
    }
    return beta;
}

void check_order(std::size_t order) {
    if (order > kMaxKatoOrder)
        raise(Errc::OrderTooHigh,
              "order " + std::to_string(order) + " exceeds " + std::to_string(kMaxKatoOrder));
}

void check_gap(const FiniteChain& chain, const StationaryDist& pi) {
    if (l2_gap(chain, pi) >= 1.0 - kGapTol) raise(Errc::NoGap, "L2 spectral gap is absent");
}

bool mul_ok(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return !__builtin_mul_overflow(a, b, &out);
}

}  // namespace

double eigencurve(const FiniteChain& chain, const Observable& f, double t) {
    const StationaryDist pi = stationary(chain);
    require_reversible(chain, pi);
    return top_eigenvalue(make_tilt<double>(chain, pi, f), t);
}

double KatoSeries::evaluate(double t) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * t + coefficients[k];
    return acc;
}

KatoSeries kato_coefficients(const FiniteChain& chain, const Observable& f, std::size_t order) {
    check_order(order);
    const StationaryDist pi = stationary(chain);
    require_reversible(chain, pi);
    check_gap(chain, pi);
    KatoSeries out;
    out.order = order;
    out.coefficients = coefficients(make_tilt<double>(chain, pi, f), order);
    out.t0_lower = convergence_radius(f.c, std::max(right_gap(chain, pi), 0.0));
    return out;
}

std::vector<double> series_residuals(const FiniteChain& chain, const Observable& f,
                                     std::size_t order, const std::vector<double>& t_values) {
    using T = extended_float;
    check_order(order);
    const StationaryDist pi = stationary(chain);
    require_reversible(chain, pi);
    check_gap(chain, pi);
    const Tilt<T> s = make_tilt<T>(chain, pi, f);
    const std::vector<T> beta = coefficients(s, order);
    std::vector<double> out;
    out.reserve(t_values.size());
    for (double td : t_values) {
        const T t = td;
        T series = 0;
        for (std::size_t k = beta.size(); k-- > 0;) series = series * t + beta[k];
        out.push_back(static_cast<double>(num::abs_of(top_eigenvalue(s, t) - series)));
    }
    return out;
}

Rational combinatorial_weight(std::size_t n) {
    if (n < 3) raise(Errc::DomainError, "combinatorial weight needs n >= 3");
    if (n > 30) raise(Errc::TooLarge, "n too large for 64-bit exact arithmetic");
    // Pascal's triangle up to row 2n - 2.
    const std::size_t rows = 2 * n - 1;
    std::vector<std::vector<std::int64_t>> binom(rows, std::vector<std::int64_t>(rows, 0));
    for (std::size_t i = 0; i < rows; ++i) {
        binom[i][0] = 1;
        for (std::size_t j = 1; j <= i; ++j) {
            const std::int64_t a = binom[i - 1][j - 1];
            const std::int64_t b = j < i ? binom[i - 1][j] : 0;
            if (__builtin_add_overflow(a, b, &binom[i][j]))
                raise(Errc::TooLarge, "binomial overflow");
        }
    }
    Rational sum{0, 1};
    for (std::size_t p = 1; p <= n; ++p) {
        std::int64_t term = 0;
        if (!mul_ok(binom[n - 1][p - 1], binom[2 * p - 2][p - 1], term))
            raise(Errc::TooLarge, "term overflow at p = " + std::to_string(p));
        // sum + term / p
        const std::int64_t pp = static_cast<std::int64_t>(p);
        std::int64_t lhs = 0, rhs = 0, den = 0, numer = 0;
        if (!mul_ok(sum.num, pp, lhs) || !mul_ok(term, sum.den, rhs) ||
            !mul_ok(sum.den, pp, den) || __builtin_add_overflow(lhs, rhs, &numer))
            raise(Errc::TooLarge, "rational overflow at p = " + std::to_string(p));
        const std::int64_t g = std::gcd(numer, den);
        sum = Rational{numer / g, den / g};
    }
    return sum;
}

double coefficient_bound(const FiniteChain& chain, const Observable& f, std::size_t n) {
    if (n < 2) raise(Errc::DomainError, "coefficient bound needs n >= 2");
    const StationaryDist pi = stationary(chain);
    require_reversible(chain, pi);
    const double lp = right_gap(chain, pi);
    if (lp < 0.0) raise(Errc::NegativeLambdaPlus, "lambda_plus = " + std::to_string(lp) + " < 0");
    if (lp >= 1.0 - kGapTol) raise(Errc::NoGap, "right spectral gap is absent");
    const double norm = l2_gap(chain, pi);
    const double s2 = f.sigma2;
    if (n == 2) return s2 / 2.0 + norm * s2 / (1.0 - lp);
    double moment = 0.0;
    double fact = 1.0;
    for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<double>(k);
    for (std::size_t x = 0; x < f.size(); ++x)
        moment += pi[x] * std::pow(f.values[x], static_cast<double>(n));
    const double ratio = 5.0 * f.c / (1.0 - lp);
    return moment / fact + s2 * norm / (5.0 * f.c) * std::pow(ratio, static_cast<double>(n - 1));
}

double convergence_radius(double c, double lambda_plus) {
    if (!(c > 0.0)) raise(Errc::DomainError, "c must be positive");
    if (!(lambda_plus >= 0.0 && lambda_plus < 1.0))
        raise(Errc::DomainError, "lambda_plus must lie in [0, 1)");
    return (1.0 - lambda_plus) / ((3.0 - lambda_plus) * c);
}

double lemma33_bound(double t, double sigma2, double c, double lambda_plus,
                     double norm_p_minus_pi) {
    if (lambda_plus < 0.0) raise(Errc::NegativeLambdaPlus, "lambda_plus must be >= 0");
    if (!(lambda_plus < 1.0)) raise(Errc::DomainError, "lambda_plus must be < 1");
    if (!(c > 0.0)) raise(Errc::DomainError, "c must be positive");
    const double pole = (1.0 - lambda_plus) / (5.0 * c);
    if (!(t >= 0.0 && t < pole))
        raise(Errc::OutOfRange, "t outside [0, (1 - lambda_plus)/(5c))");
    const double g1 = sigma2 / (c * c) * expm1_minus_x(t * c);
    const double g2 = sigma2 * norm_p_minus_pi * t * t / (1.0 - lambda_plus - 5.0 * c * t);
    return std::exp(g1 + g2);
}

}  // namespace mcbern

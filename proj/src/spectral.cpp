#include "mcbern/spectral.hpp"

#include <cmath>
#include <iostream>

namespace mcbern {

namespace {

Matrix symmetrize(const Matrix& a) { return (a + a.transposed()) * 0.5; }

// D^{1/2} A D^{-1/2}
Matrix weighted_similarity(const Matrix& a, const StationaryDist& pi) {
    const std::size_t n = a.rows();
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double si = std::sqrt(pi[i]);
        for (std::size_t j = 0; j < n; ++j) b(i, j) = si * a(i, j) / std::sqrt(pi[j]);
    }
    return b;
}

double norm1(const Matrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::fabs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double inner(const Vector& a, const Vector& b, const StationaryDist& pi) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += pi[i] * a[i] * b[i];
    return s;
}

Vector centered(Vector v, const StationaryDist& pi) {
    const double m = expectation(pi, v);
    for (auto& x : v) x -= m;
    return v;
}

}  // namespace

double weighted_operator_norm(const Matrix& a, const StationaryDist& pi) {
    if (!a.square() || a.rows() != pi.size())
        raise(Errc::InvalidArgument, "operator and distribution sizes differ");
    for (std::size_t i = 0; i < pi.size(); ++i)
        if (!(pi[i] >= kSupportFloor)) raise(Errc::DegenerateSupport, "pi must be positive");
    const Matrix b = weighted_similarity(a, pi);
    const Matrix gram = symmetrize(b.transposed() * b);
    const double top = largest_symmetric_eigenvalue(gram);
    return std::sqrt(std::max(0.0, top));
}

double l2_gap(const FiniteChain& chain, const StationaryDist& pi) {
    return weighted_operator_norm(chain.transition() - stationary_projector(pi), pi);
}

double l2_gap(const FiniteChain& chain) { return l2_gap(chain, stationary(chain)); }

double right_gap(const FiniteChain& chain, const StationaryDist& pi) {
    const std::size_t n = chain.n_states();
    if (n == 1) return -1.0;
    const Matrix r = additive_reversiblization(chain, pi);
    Matrix s = symmetrize(weighted_similarity(r, pi));
    Vector root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(pi[i]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) -= 3.0 * root[i] * root[j];
    const Eigensystem es = jacobi_eigen(s);
    double overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) overlap += es.vectors(i, 0) * root[i];
    if (std::fabs(overlap) > 1e-10)
        raise(Errc::EigensolverFailure, "top eigenvector is not orthogonal to sqrt(pi)");
    return std::min(1.0, es.values.front());
}

double right_gap(const FiniteChain& chain) { return right_gap(chain, stationary(chain)); }

ReducedResolvent reduced_resolvent(const FiniteChain& chain, const StationaryDist& pi) {
    const double lambda = l2_gap(chain, pi);
    if (lambda >= 1.0 - kGapTol)
        raise(Errc::NoGap, "L2 spectral gap is absent (lambda = 1)");
    const std::size_t n = chain.n_states();
    const Matrix proj = stationary_projector(pi);
    const Matrix a = Matrix::identity(n) - chain.transition() + proj;
    Lu lu(a);
    if (lu.singular()) raise(Errc::SingularSolve, "I - P + Pi is singular");
    const Matrix inv = lu.inverse();
    const double cond = norm1(a) * norm1(inv);
    if (cond > 1e12)
        std::clog << "mcbern: warning: I - P + Pi is ill-conditioned (cond ~ " << cond << ")\n";
    return ReducedResolvent{inv - proj};
}

double asymptotic_variance(const ReducedResolvent& z, const StationaryDist& pi,
                           const Observable& f) {
    const Vector zf = matvec(z.z, f.values);
    double s = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x)
        s += pi[x] * (2.0 * zf[x] - f.values[x]) * f.values[x];
    return s;
}

double asymptotic_variance(const FiniteChain& chain, const StationaryDist& pi,
                           const Observable& f) {
    return asymptotic_variance(reduced_resolvent(chain, pi), pi, f);
}

double finite_horizon_second_moment(const FiniteChain& chain, const StationaryDist& pi,
                                    const Observable& f, std::size_t n,
                                    SecondMomentMethod method) {
    if (n == 0) raise(Errc::InvalidArgument, "horizon must be positive");
    const Matrix& p = chain.transition();
    const double nn = static_cast<double>(n);

    if (method == SecondMomentMethod::direct_sum) {
        double total = nn * inner(f.values, f.values, pi);
        Vector g = f.values;
        for (std::size_t k = 1; k < n; ++k) {
            g = centered(matvec(p, g), pi);
            total += 2.0 * static_cast<double>(n - k) * inner(g, f.values, pi);
        }
        return total;
    }

    if (!is_reversible(chain, pi))
        raise(Errc::NotReversible, "closed-form second moment requires a reversible chain");
    const ReducedResolvent z = reduced_resolvent(chain, pi);
    Vector pn = f.values;
    for (std::size_t k = 0; k < n; ++k) pn = matvec(p, pn);
    Vector h(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) h[x] = f.values[x] - pn[x];
    const Vector zzph = matvec(z.z, matvec(z.z, matvec(p, h)));
    const Vector zf = matvec(z.z, f.values);
    Vector v(f.size());
    for (std::size_t x = 0; x < f.size(); ++x)
        v[x] = nn * (2.0 * zf[x] - f.values[x]) - 2.0 * zzph[x];
    return inner(v, f.values, pi);
}

SpectralReport analyze(const FiniteChain& chain, const StationaryDist& pi, const Observable* f) {
    SpectralReport rep;
    rep.lambda = l2_gap(chain, pi);
    rep.lambda_plus = right_gap(chain, pi);
    rep.has_gap = rep.lambda < 1.0 - kGapTol;
    rep.has_right_gap = rep.lambda_plus < 1.0 - kGapTol;
    rep.reversible = is_reversible(chain, pi);
    if (f && rep.has_gap) rep.sigma2_asy = asymptotic_variance(chain, pi, *f);
    return rep;
}

}  // namespace mcbern

#include "mcbern/leonperron.hpp"

#include <cmath>
#include <string>

#include "mcbern/bounds.hpp"

namespace mcbern {

namespace {

constexpr double kMergeTol = 1e-14;

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        raise(Errc::DomainError, "lambda must lie in [0, 1), got " + std::to_string(lambda));
}

void check_distribution(const Vector& mu) {
    double total = 0.0;
    for (double w : mu) {
        if (!(w >= 0.0)) raise(Errc::InvalidArgument, "weights must be nonnegative");
        total += w;
    }
    if (mu.empty() || std::fabs(total - 1.0) > 1e-12)
        raise(Errc::InvalidArgument, "weights must sum to 1");
}

void merge_into(SimpleFunction& s, double value, double weight) {
    for (std::size_t j = 0; j < s.values.size(); ++j) {
        if (std::fabs(s.values[j] - value) <= kMergeTol) {
            s.weights[j] += weight;
            return;
        }
    }
    s.values.push_back(value);
    s.weights.push_back(weight);
}

}  // namespace

double SimpleFunction::sigma2() const {
    double s = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) s += weights[j] * values[j] * values[j];
    return s;
}

FiniteChain lp_matrix(double lambda, const Vector& mu) {
    check_lambda(lambda);
    check_distribution(mu);
    const std::size_t k = mu.size();
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m(i, j) = (1.0 - lambda) * mu[j] + (i == j ? lambda : 0.0);
    return validate_chain(m);
}

SimpleFunction pushforward(const StationaryDist& pi, const Observable& f) {
    if (pi.size() != f.size())
        raise(Errc::InvalidArgument, "observable length does not match pi");
    SimpleFunction s;
    s.c = f.c;
    for (std::size_t x = 0; x < f.size(); ++x) merge_into(s, f.values[x], pi[x]);
    return s;
}

Discretized discretize(const Vector& values, const Vector& weights, double c, std::size_t k) {
    if (values.size() != weights.size())
        raise(Errc::InvalidArgument, "values and weights differ in length");
    if (!(c > 0.0)) raise(Errc::InvalidArgument, "c must be positive");
    if (k == 0) raise(Errc::InvalidArgument, "k must be at least 1");
    check_distribution(weights);
    const double kk = static_cast<double>(k);
    const double mesh = c / (3.0 * kk);
    Discretized d;
    d.grid.resize(values.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::fabs(v) > c)
            raise(Errc::OutOfBound, "sample " + std::to_string(i) + " exceeds c in magnitude");
        const double idx = std::ceil((v + c) * 3.0 * kk / c);
        d.grid[i] = idx * mesh - c;
        mean += weights[i] * d.grid[i];
    }
    const double shrink = 1.0 + 1.0 / (3.0 * kk);
    d.normalized.resize(values.size());
    d.simple.c = c;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d.normalized[i] = (d.grid[i] - mean) / shrink;
        merge_into(d.simple, d.normalized[i], weights[i]);
    }
    return d;
}

double lp_perturbed_norm(double lambda, const SimpleFunction& simple, double t) {
    check_lambda(lambda);
    Vector root, half;
    for (std::size_t j = 0; j < simple.size(); ++j) {
        if (simple.weights[j] <= 0.0) continue;
        root.push_back(std::sqrt(simple.weights[j]));
        half.push_back(std::exp(0.5 * t * simple.values[j]));
    }
    if (root.empty()) raise(Errc::InvalidArgument, "simple function has no support");
    const std::size_t k = root.size();
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m(i, j) = half[i] * ((1.0 - lambda) * root[i] * root[j] + (i == j ? lambda : 0.0)) *
                      half[j];
    return largest_symmetric_eigenvalue(m);
}

double lemma31_bound(double t, double sigma2, double c, double lambda) {
    check_lambda(lambda);
    if (!(c > 0.0)) raise(Errc::InvalidArgument, "c must be positive");
    const double pole = (1.0 - lambda) / (5.0 * c);
    if (!(t >= 0.0 && t < pole)) raise(Errc::OutOfRange, "t outside [0, (1 - lambda)/(5c))");
    const GComponents g = g_components(t, sigma2, c, lambda);
    return std::exp(g.g1 + g.g2);
}

double mgf_envelope_timevarying(double lambda, const StationaryDist& pi,
                                const std::vector<Observable>& fs, double t) {
    if (t < 0.0) raise(Errc::OutOfRange, "t must be nonnegative");
    double prod = 1.0;
    for (const Observable& f : fs) prod *= lp_perturbed_norm(lambda, pushforward(pi, f), t);
    return prod;
}

}  // namespace mcbern

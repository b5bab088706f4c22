#pragma once

#include <cstddef>
#include <vector>

#include "mcbern/chain.hpp"

namespace mcbern {

/// A centered simple function: value y_j taken with probability μ_j.
struct SimpleFunction {
    Vector values;
    Vector weights;
    double c = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double sigma2() const;
};

/// λI + (1 - λ) 1μᵀ. μ must be a distribution (sum within 1e-12).
FiniteChain lp_matrix(double lambda, const Vector& mu);

/// Distinct values of f (merged within 1e-14, first appearance order) with
/// their π-masses.
SimpleFunction pushforward(const StationaryDist& pi, const Observable& f);

struct Discretized {
    Vector grid;        // ⌈(f + c)/(c/3k)⌉·(c/3k) - c per sample
    Vector normalized;  // (grid - mean) / (1 + 1/(3k)) per sample
    SimpleFunction simple;
};

/// Lattice approximation of weighted samples on the mesh c/(3k), recentered
/// and shrunk so that the result is again bounded by c. OutOfBound when some
/// |value| > c.
Discretized discretize(const Vector& values, const Vector& weights, double c, std::size_t k);

/// Largest eigenvalue of E^{ty/2}(λI + (1 - λ)Π_μ)E^{ty/2} in the μ-weighted
/// space, which is its μ-weighted operator norm.
double lp_perturbed_norm(double lambda, const SimpleFunction& simple, double t);

/// exp(g₁(t) + g₂(t)) for 0 <= t < (1 - λ)/(5c).
double lemma31_bound(double t, double sigma2, double c, double lambda);

/// Π_i lp_perturbed_norm(λ, pushforward(π, f_i), t).
double mgf_envelope_timevarying(double lambda, const StationaryDist& pi,
                                const std::vector<Observable>& fs, double t);

}  // namespace mcbern

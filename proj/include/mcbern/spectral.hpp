#pragma once

#include <cstddef>
#include <optional>

#include "mcbern/chain.hpp"

namespace mcbern {

/// Gap parameters at or above 1 - kGapTol are reported as "gap absent".
inline constexpr double kGapTol = 1e-12;

/// |||A|||_π: largest singular value of D^{1/2} A D^{-1/2}, taken as the
/// square root of the top eigenvalue of the symmetrized Gram matrix.
double weighted_operator_norm(const Matrix& a, const StationaryDist& pi);

/// λ(P) = |||P - Π|||_π. May equal 1 (no gap); callers that need a gap check it.
double l2_gap(const FiniteChain& chain, const StationaryDist& pi);
double l2_gap(const FiniteChain& chain);

/// λ⁺: top of the spectrum of (P + P*)/2 on mean-zero functions. The √π
/// direction is shifted to -2 before the eigensolve so it can never be the
/// top eigenvalue. A single-state chain has no mean-zero functions and
/// reports -1.
double right_gap(const FiniteChain& chain, const StationaryDist& pi);
double right_gap(const FiniteChain& chain);

/// Z = (I - P + Π)^{-1} - Π.
struct ReducedResolvent {
    Matrix z;
};

/// Throws NoGap when λ(P) >= 1 - 1e-12 and SingularSolve if the solve fails.
ReducedResolvent reduced_resolvent(const FiniteChain& chain, const StationaryDist& pi);

/// σ²_asy = <(2Z - I) f, f>_π.
double asymptotic_variance(const ReducedResolvent& z, const StationaryDist& pi,
                           const Observable& f);
double asymptotic_variance(const FiniteChain& chain, const StationaryDist& pi,
                           const Observable& f);

enum class SecondMomentMethod { closed_form, direct_sum };

/// E_π[(Σ_{i=1}^n f(X_i))²]. direct_sum adds <(P - Π)^{|i-j|} f, f>_π over all
/// pairs; closed_form evaluates <[n(2Z - I) - 2Z²P(I - P^n)] f, f>_π and is
/// only accepted for reversible chains (NotReversible otherwise).
double finite_horizon_second_moment(const FiniteChain& chain, const StationaryDist& pi,
                                    const Observable& f, std::size_t n,
                                    SecondMomentMethod method);

struct SpectralReport {
    double lambda = 1.0;
    double lambda_plus = 1.0;
    bool has_gap = false;        // λ < 1
    bool has_right_gap = false;  // λ⁺ < 1
    bool reversible = false;
    std::optional<double> sigma2_asy;  // set when an observable is given and Z exists
};

SpectralReport analyze(const FiniteChain& chain, const StationaryDist& pi,
                       const Observable* f = nullptr);

}  // namespace mcbern

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcbern/chain.hpp"

namespace mcbern {

inline constexpr std::size_t kMaxKatoOrder = 8;

/// Largest eigenvalue of P·diag(e^{tf}) for a reversible chain, computed on
/// the symmetric similarity transform D^{1/2} E^{tf/2} P E^{tf/2} D^{-1/2}.
double eigencurve(const FiniteChain& chain, const Observable& f, double t);

struct KatoSeries {
    std::vector<double> coefficients;  // β⁽⁰⁾ .. β⁽ᴺ⁾
    std::size_t order = 0;
    double t0_lower = 0.0;

    /// Σ_{n <= order} β⁽ⁿ⁾ tⁿ.
    double evaluate(double t) const;
};

/// Taylor coefficients of the eigencurve from the trace expansion over
/// compositions, with Z⁽⁰⁾ = -Π and Z⁽ᵏ⁾ = Zᵏ.
KatoSeries kato_coefficients(const FiniteChain& chain, const Observable& f, std::size_t order);

/// |eigencurve(t) - Σ_{n<=order} β⁽ⁿ⁾tⁿ| for each t. Both sides are evaluated
/// in extended precision so the truncation error is not hidden by rounding.
std::vector<double> series_residuals(const FiniteChain& chain, const Observable& f,
                                     std::size_t order, const std::vector<double>& t_values);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    bool is_integer() const noexcept { return den == 1; }
};

/// Σ_{p=1}^n (1/p) C(n-1, p-1) C(2p-2, p-1) in exact arithmetic. Throws
/// DomainError for n < 3 and TooLarge on 64-bit overflow.
Rational combinatorial_weight(std::size_t n);

double coefficient_bound(const FiniteChain& chain, const Observable& f, std::size_t n);

/// (1 - λ⁺) / ((3 - λ⁺) c).
double convergence_radius(double c, double lambda_plus);

double lemma33_bound(double t, double sigma2, double c, double lambda_plus,
                     double norm_p_minus_pi);

}  // namespace mcbern

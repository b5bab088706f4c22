#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcbern/linalg.hpp"

namespace mcbern {

/// Tolerances shared across the chain and spectral code. They are fixed so
/// that test baselines stay bit-stable.
inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kSupportFloor = 1e-14;
inline constexpr double kStationaryResidualTol = 1e-10;
inline constexpr double kUniquenessTol = 1e-8;
inline constexpr double kDetailedBalanceTol = 1e-10;

/// A validated row-stochastic transition matrix. Only validate_chain()
/// constructs one, so every instance satisfies the invariants.
class FiniteChain {
public:
    std::size_t n_states() const noexcept { return transition_.rows(); }
    const Matrix& transition() const noexcept { return transition_; }
    double operator()(std::size_t i, std::size_t j) const { return transition_(i, j); }

private:
    explicit FiniteChain(Matrix m) : transition_(std::move(m)) {}
    friend FiniteChain validate_chain(const Matrix& matrix);

    Matrix transition_;
};

/// Checks squareness, nonnegativity, and unit row sums (|sum - 1| <= 1e-12).
/// Throws NegativeEntry or RowSumViolation naming the offending row/column.
FiniteChain validate_chain(const Matrix& matrix);
FiniteChain validate_chain(const std::vector<std::vector<double>>& rows);

struct StationaryDist {
    Vector pi;

    std::size_t size() const noexcept { return pi.size(); }
    double operator[](std::size_t i) const { return pi[i]; }
};

/// Unique invariant distribution. Solved by LU on (P^T - I) with the last
/// row replaced by ones; uniqueness is cross-checked against a seeded power
/// iteration on the lazy chain (I + P)/2.
StationaryDist stationary(const FiniteChain& chain);

/// π-weighted mean Σ π(x) v(x).
double expectation(const StationaryDist& pi, std::span<const double> values);

/// Π = 1 π^T, the projection onto constants.
Matrix stationary_projector(const StationaryDist& pi);

/// Time reversal P*(x, y) = π(y) P(y, x) / π(x).
Matrix adjoint(const FiniteChain& chain, const StationaryDist& pi);

/// (P + P*) / 2.
Matrix additive_reversiblization(const FiniteChain& chain, const StationaryDist& pi);

/// Detailed balance π(x)P(x,y) = π(y)P(y,x) within `tol`.
bool is_reversible(const Matrix& p, const StationaryDist& pi, double tol = kDetailedBalanceTol);
bool is_reversible(const FiniteChain& chain, const StationaryDist& pi,
                   double tol = kDetailedBalanceTol);

/// A centered, bounded observable: π(values) = 0, |values| <= c, sigma2 = π(values²).
struct Observable {
    Vector values;
    double c = 0.0;
    double sigma2 = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

/// Centers `raw` under π. The bound defaults to max|raw - π(raw)|; an explicit
/// bound smaller than that raises BoundTooSmall.
Observable make_observable(std::span<const double> raw, const StationaryDist& pi,
                           std::optional<double> c = std::nullopt);

}  // namespace mcbern

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcbern {

/// Gap parameters below this are treated as exactly zero (the A₂ = 1/3 branch).
inline constexpr double kLambdaZeroTol = 1e-12;

/// Which Markov-chain inequality to evaluate. thm11 takes the L2 gap
/// parameter λ and allows time-varying observables; thm12 takes λ⁺ for a
/// fixed observable and clamps it at zero.
enum class Variant { thm11, thm12 };

enum class ClassicalKind { hoeffding, bennett, bernstein };

enum class BoundKind {
    thm11,
    thm12,
    thm11_chernoff,
    thm12_chernoff,
    hoeffding,
    bennett,
    bernstein,
};

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(ClassicalKind k) noexcept;
std::string_view to_string(BoundKind k) noexcept;

struct BoundQuery {
    std::size_t n = 1;
    double eps = 0.0;
    double sigma2 = 0.0;
    double c = 1.0;
    double gap = 0.0;  // λ for thm11, λ⁺ for thm12
};

/// probability_bound = exp(-n · exponent); `exponent` is per step.
struct BoundValue {
    double probability_bound = 1.0;
    double exponent = 0.0;
    BoundKind kind = BoundKind::thm11;
};

/// λ for thm11, max(λ⁺, 0) for thm12, then snapped to 0 below kLambdaZeroTol.
double effective_gap(double gap, Variant variant);

/// e^x - 1 - x without cancellation near 0.
double expm1_minus_x(double x);

/// h(u) = (1 + u) log(1 + u) - u.
double bennett_h(double u);

/// h₂(u) = √(1 + u) + u/2 + 1.
double conjugate_h2(double u);

struct GComponents {
    double g1 = 0.0;
    double g2 = 0.0;
};

/// g₁(t) = (σ²/c²)(e^{tc} - 1 - tc) and g₂(t) = σ²λt²/(1 - λ - 5ct). g₂ is
/// +infinity from the pole t = (1 - λ)/(5c) on, and identically 0 when λ = 0.
GComponents g_components(double t, double sigma2, double c, double lambda);

/// exp(n (g₁ + g₂)) with the variant's effective gap. OutOfRange unless
/// 0 <= t < (1 - λ̄)/(5c).
double mgf_bound(std::size_t n, double t, double sigma2, double c, double gap, Variant variant);

/// exp(-nε² / (2(A₁σ² + A₂cε))).
BoundValue tail_bound(const BoundQuery& query, Variant variant);

BoundValue classical_bound(ClassicalKind kind, std::size_t n, double eps, double sigma2, double c);

struct Conjugates {
    double g1_star = 0.0;
    std::optional<double> g2_star;  // only defined for λ > 0
};

Conjugates conjugate_closed_forms(double eps1, double eps2, double sigma2, double c,
                                  double lambda);

/// sup_{0 < t < t_max} { tε - g(t) } by golden-section search. g may return
/// +infinity to mark its domain edge. Throws NonConcaveDetected when the
/// objective sampled on a grid is visibly not concave.
double fenchel_numeric(const std::function<double(double)>& g, double eps, double t_max);

/// Per-step Chernoff exponent sup_t { tε - g₁(t) - g₂(t) }.
double chernoff_exponent(double eps, double sigma2, double c, double effective_lambda);

/// exp(-n · sup_t { tε - g₁(t) - g₂(t) }): the optimised form the closed
/// tail_bound relaxes.
BoundValue chernoff_optimize(const BoundQuery& query, Variant variant);

/// inf_{ε₁ + ε₂ = ε} g₁*(ε₁) + g₂*(ε₂), minimised numerically (λ > 0 only).
double infimal_convolution(double eps, double sigma2, double c, double lambda);

/// ε² / (2((1+λ)/(1-λ) σ² + 5cε/(1-λ))), the closed lower bound on the
/// infimal convolution for λ > 0.
double infimal_lower_bound(double eps, double sigma2, double c, double lambda);

struct ProxyRow {
    int table = 1;  // 1: time-varying observables, 2: fixed observable
    std::string type;
    std::string reference;
    std::string condition;
    double proxy = 0.0;
    std::string note;
};

/// Variance proxies of the published inequalities next to the two Markov
/// Bernstein variants, in the published row order.
std::vector<ProxyRow> proxy_table(double sigma2, double c, double lambda, double lambda_plus);

}  // namespace mcbern

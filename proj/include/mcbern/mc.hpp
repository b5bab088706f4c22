#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mcbern/chain.hpp"
#include "mcbern/leonperron.hpp"

namespace mcbern {

/// Upper limit on transitions visited by the exact tail recursion, counted
/// as s² · C(n + m - 1, m) for s states and m distinct values of f.
inline constexpr std::size_t kExactTailWorkCap = std::size_t{1} << 26;

/// E_π[exp(t Σ_{i=1}^n f(X_i))] = πᵀ E (P E)^{n-1} 1.
double exact_mgf(const FiniteChain& chain, const Observable& f, std::size_t n, double t);

/// log of exact_mgf, accumulated with rescaling so it stays finite where the
/// MGF itself would overflow.
double exact_log_mgf(const FiniteChain& chain, const Observable& f, std::size_t n, double t);

/// E_π[exp(t Σ_i f_i(X_i))] for one observable per step.
double exact_mgf_timevarying(const FiniteChain& chain, const std::vector<Observable>& fs,
                             double t);

/// True when the sample mean strictly exceeds eps after allowing for
/// rounding in the sum (ties count as non-exceedance).
bool exceeds(double sum, std::size_t n, double eps, double c);

/// P_π((1/n) Σ f(X_i) > eps), exact for any finite-valued f. Throws TooLarge
/// when the recursion would exceed kExactTailWorkCap.
double exact_tail(const FiniteChain& chain, const Observable& f, std::size_t n, double eps);

struct TrialPlan {
    std::uint64_t base_seed = 0;
    std::size_t trials = 1;
    std::size_t n = 1;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

/// Key of the random stream for one trial; depends only on (seed, index).
std::uint64_t trial_key(std::uint64_t base_seed, std::uint64_t trial_index);

/// Counter-based stream: the i-th draw is mix(key + (i + 1)·γ).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64();
    double uniform();  // [0, 1)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// X₁ ~ π and X_{i+1} ~ P(X_i, ·) by inverse CDF, length plan.n.
std::vector<std::size_t> sample_chain_path(const FiniteChain& chain, const StationaryDist& pi,
                                           const TrialPlan& plan, std::uint64_t trial_index);

/// Ŷ₁ = f(Z₁), Ŷ_i = B_i Ŷ_{i-1} + (1 - B_i) f(Z_i) with B_i ~ Bernoulli(λ)
/// and Z_i ~ μ.
Vector sample_lp_path(double lambda, const SimpleFunction& innovation, const TrialPlan& plan,
                      std::uint64_t trial_index);

/// Produces the observed values f(X_1..X_n) of one trial.
using PathSampler = std::function<Vector(std::uint64_t trial_index)>;

PathSampler chain_sampler(const FiniteChain& chain, const StationaryDist& pi,
                          const Observable& f, const TrialPlan& plan);
PathSampler lp_sampler(double lambda, const SimpleFunction& innovation, const TrialPlan& plan);

struct TailEstimate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double point = 0.0;
    double cp_low = 0.0;
    double cp_high = 1.0;

    /// Consistent with an upper bound: cp_low <= bound.
    bool dominated_by(double bound) const { return cp_low <= bound; }
};

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Exact two-sided binomial interval at the given confidence level.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.99);

/// threads = 0 uses the hardware concurrency. Results do not depend on it.
TailEstimate estimate_tail(const PathSampler& sampler, double eps, double c,
                           const TrialPlan& plan, unsigned threads = 1);

/// Sample mean of exp(t S_n) over the trials.
double estimate_mgf(const PathSampler& sampler, double t, const TrialPlan& plan,
                    unsigned threads = 1);

/// Unbiased sample variance of S_n/√n over the trials.
double scaled_variance(const PathSampler& sampler, const TrialPlan& plan, unsigned threads = 1);

}  // namespace mcbern

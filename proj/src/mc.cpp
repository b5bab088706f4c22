#include "mcbern/mc.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

namespace mcbern {

namespace {

constexpr double kBig = 1e300;
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

struct Scaled {
    double value = 0.0;
    double log_scale = 0.0;
};

// Evaluates πᵀ E₁ P E₂ ... P E_n 1 right to left, pulling out powers when
// entries leave [1e-300, 1e300].
Scaled transfer(const FiniteChain& chain, const StationaryDist& pi,
                const std::vector<const Observable*>& fs, double t) {
    const std::size_t s = chain.n_states();
    for (const Observable* f : fs)
        if (f->size() != s) raise(Errc::InvalidArgument, "observable length does not match");
    Scaled out;
    Vector v(s, 1.0);
    // exp(t f - shift), with the shift moved into the log scale once t f is
    // large enough to overflow on its own.
    auto weight = [&](const Observable& f) {
        Vector w(s);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < s; ++x) top = std::max(top, t * f.values[x]);
        const double shift = std::fabs(top) > 300.0 ? top : 0.0;
        for (std::size_t x = 0; x < s; ++x) w[x] = std::exp(t * f.values[x] - shift);
        out.log_scale += shift;
        return w;
    };
    for (std::size_t i = fs.size(); i-- > 1;) {
        const Vector w = weight(*fs[i]);
        for (std::size_t x = 0; x < s; ++x) v[x] *= w[x];
        v = matvec(chain.transition(), v);
        const double top = *std::max_element(v.begin(), v.end());
        if (top > kBig || (top > 0.0 && top < 1.0 / kBig)) {
            for (double& e : v) e /= top;
            out.log_scale += std::log(top);
        }
    }
    const Vector w = weight(*fs[0]);
    double acc = 0.0;
    for (std::size_t x = 0; x < s; ++x) acc += pi[x] * w[x] * v[x];
    out.value = acc;
    return out;
}

Scaled transfer_fixed(const FiniteChain& chain, const Observable& f, std::size_t n, double t) {
    if (n == 0) raise(Errc::InvalidArgument, "n must be positive");
    const std::vector<const Observable*> fs(n, &f);
    return transfer(chain, stationary(chain), fs, t);
}

double finish(const Scaled& s) {
    return s.log_scale == 0.0 ? s.value : std::exp(std::log(s.value) + s.log_scale);
}

std::size_t draw_index(const Vector& probs, double u) {
    double cum = 0.0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (probs[j] <= 0.0) continue;
        cum += probs[j];
        last = j;
        if (u < cum) return j;
    }
    return last;
}

unsigned resolve_threads(unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return threads;
}

// Calls body(i) for i in [0, count) split into contiguous blocks.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(count, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string format_work(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", w);
    return buf;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace

double exact_mgf(const FiniteChain& chain, const Observable& f, std::size_t n, double t) {
    return finish(transfer_fixed(chain, f, n, t));
}

double exact_log_mgf(const FiniteChain& chain, const Observable& f, std::size_t n, double t) {
    const Scaled s = transfer_fixed(chain, f, n, t);
    return std::log(s.value) + s.log_scale;
}

double exact_mgf_timevarying(const FiniteChain& chain, const std::vector<Observable>& fs,
                             double t) {
    if (fs.empty()) raise(Errc::InvalidArgument, "need at least one observable");
    std::vector<const Observable*> ptrs;
    for (const auto& f : fs) ptrs.push_back(&f);
    return finish(transfer(chain, stationary(chain), ptrs, t));
}

bool exceeds(double sum, std::size_t n, double eps, double c) {
    const double nn = static_cast<double>(n);
    return sum - nn * eps > 1e-12 * nn * (c + std::fabs(eps));
}

double exact_tail(const FiniteChain& chain, const Observable& f, std::size_t n, double eps) {
    if (n == 0) raise(Errc::InvalidArgument, "n must be positive");
    const std::size_t s = chain.n_states();
    if (f.size() != s) raise(Errc::InvalidArgument, "observable length does not match");
    const StationaryDist pi = stationary(chain);

    Vector levels;
    std::vector<std::size_t> level_of(s);
    for (std::size_t x = 0; x < s; ++x) {
        std::size_t j = 0;
        while (j < levels.size() && std::fabs(levels[j] - f.values[x]) > 1e-14) ++j;
        if (j == levels.size()) levels.push_back(f.values[x]);
        level_of[x] = j;
    }
    const std::size_t m = levels.size();
    // Count vectors over all steps: sum_k C(k + m - 2, m - 1) = C(n + m - 1, m).
    double work = static_cast<double>(s) * static_cast<double>(s);
    for (std::size_t i = 1; i <= m; ++i)
        work *= static_cast<double>(n + i - 1) / static_cast<double>(i);
    if (work > static_cast<double>(kExactTailWorkCap))
        raise(Errc::TooLarge, "exact tail needs about " + format_work(work) + " transitions (n = " +
                                  std::to_string(n) + ", " + std::to_string(m) + " distinct values)");

    std::vector<std::vector<std::size_t>> states_at(m);
    for (std::size_t y = 0; y < s; ++y) states_at[level_of[y]].push_back(y);

    // Binomials C(a, r) for r < m, to rank count vectors in the combinatorial
    // number system: the partial sums c_0 + ... + c_i + i form an (m-1)-subset.
    const std::size_t top_a = n + m;
    std::vector<double> binom(top_a * m, 0.0);
    auto choose = [&](std::size_t a, std::size_t r) -> double& { return binom[a * m + r]; };
    for (std::size_t a = 0; a < top_a; ++a) {
        choose(a, 0) = 1.0;
        for (std::size_t r = 1; r < m && r <= a; ++r)
            choose(a, r) = choose(a - 1, r - 1) + (r <= a - 1 ? choose(a - 1, r) : 0.0);
    }
    auto rank = [&](const std::uint32_t* k) {
        std::size_t r = 0, partial = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            partial += k[i];
            r += static_cast<std::size_t>(choose(partial + i, i + 1));
        }
        return r;
    };
    constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);

    // Layer k holds every reachable count vector with total k, and for each
    // one the mass of paths ending in each state.
    std::vector<std::uint32_t> keys;  // m counts per entry
    Vector mass;
    for (std::size_t j = 0; j < m; ++j) {
        keys.resize(keys.size() + m, 0);
        keys[j * m + j] = 1;
        mass.resize(mass.size() + s, 0.0);
        for (std::size_t x : states_at[j]) mass[j * s + x] = pi[x];
    }
    const Matrix& p = chain.transition();
    std::vector<std::size_t> slot;
    for (std::size_t step = 1; step < n; ++step) {
        const std::size_t layer_size =
            m == 1 ? 1 : static_cast<std::size_t>(choose(step + m, m - 1));
        slot.assign(layer_size, kEmpty);
        std::vector<std::uint32_t> next_keys;
        std::vector<std::uint32_t> k2(m);
        Vector next_mass;
        Vector moved(s);
        for (std::size_t a = 0; a * m < keys.size(); ++a) {
            const double* src = &mass[a * s];
            for (std::size_t y = 0; y < s; ++y) {
                double acc = 0.0;
                for (std::size_t x = 0; x < s; ++x) acc += src[x] * p(x, y);
                moved[y] = acc;
            }
            for (std::size_t j = 0; j < m; ++j) {
                bool any = false;
                for (std::size_t y : states_at[j]) any = any || moved[y] != 0.0;
                if (!any) continue;
                std::copy_n(&keys[a * m], m, k2.begin());
                ++k2[j];
                std::size_t& at = slot[rank(k2.data())];
                if (at == kEmpty) {
                    at = next_keys.size() / m;
                    next_keys.insert(next_keys.end(), k2.begin(), k2.end());
                    next_mass.resize(next_mass.size() + s, 0.0);
                }
                double* dst = &next_mass[at * s];
                for (std::size_t y : states_at[j]) dst[y] += moved[y];
            }
        }
        keys = std::move(next_keys);
        mass = std::move(next_mass);
    }
    double prob = 0.0;
    for (std::size_t a = 0; a * m < keys.size(); ++a) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += static_cast<double>(keys[a * m + j]) * levels[j];
        if (!exceeds(sum, n, eps, f.c)) continue;
        for (std::size_t x = 0; x < s; ++x) prob += mass[a * s + x];
    }
    return std::min(prob, 1.0);
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t trial_key(std::uint64_t base_seed, std::uint64_t trial_index) {
    return splitmix64_mix(splitmix64_mix(base_seed + kGamma) ^ (trial_index * kGamma + 1));
}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGamma);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> sample_chain_path(const FiniteChain& chain, const StationaryDist& pi,
                                           const TrialPlan& plan, std::uint64_t trial_index) {
    CounterRng rng(trial_key(plan.base_seed, trial_index));
    std::vector<std::size_t> path(plan.n);
    if (plan.n == 0) return path;
    const Matrix& p = chain.transition();
    const std::size_t s = chain.n_states();
    Vector row(s);
    path[0] = draw_index(pi.pi, rng.uniform());
    for (std::size_t i = 1; i < plan.n; ++i) {
        for (std::size_t y = 0; y < s; ++y) row[y] = p(path[i - 1], y);
        path[i] = draw_index(row, rng.uniform());
    }
    return path;
}

Vector sample_lp_path(double lambda, const SimpleFunction& innovation, const TrialPlan& plan,
                      std::uint64_t trial_index) {
    if (!(lambda >= 0.0 && lambda < 1.0)) raise(Errc::DomainError, "lambda must lie in [0, 1)");
    CounterRng rng(trial_key(plan.base_seed, trial_index));
    Vector out(plan.n);
    for (std::size_t i = 0; i < plan.n; ++i) {
        const bool hold = i > 0 && rng.uniform() < lambda;
        if (hold) {
            out[i] = out[i - 1];
        } else {
            out[i] = innovation.values[draw_index(innovation.weights, rng.uniform())];
        }
    }
    return out;
}

PathSampler chain_sampler(const FiniteChain& chain, const StationaryDist& pi,
                          const Observable& f, const TrialPlan& plan) {
    return [chain, pi, f, plan](std::uint64_t idx) {
        const auto path = sample_chain_path(chain, pi, plan, idx);
        Vector vals(path.size());
        for (std::size_t i = 0; i < path.size(); ++i) vals[i] = f.values[path[i]];
        return vals;
    };
}

PathSampler lp_sampler(double lambda, const SimpleFunction& innovation, const TrialPlan& plan) {
    return [lambda, innovation, plan](std::uint64_t idx) {
        return sample_lp_path(lambda, innovation, plan, idx);
    };
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0 || successes > trials)
        raise(Errc::InvalidArgument, "need 0 <= successes <= trials and trials > 0");
    const double alpha = 1.0 - confidence;
    const double k = static_cast<double>(successes);
    const double n = static_cast<double>(trials);
    Interval iv;
    iv.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    iv.high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return iv;
}

TailEstimate estimate_tail(const PathSampler& sampler, double eps, double c,
                           const TrialPlan& plan, unsigned threads) {
    if (plan.trials < 100) raise(Errc::InvalidArgument, "estimate_tail needs at least 100 trials");
    if (plan.n == 0) raise(Errc::InvalidArgument, "n must be positive");
    std::vector<unsigned char> hit(plan.trials, 0);
    parallel_for(plan.trials, threads, [&](std::size_t i) {
        const Vector vals = sampler(i);
        double sum = 0.0;
        for (double v : vals) sum += v;
        hit[i] = exceeds(sum, plan.n, eps, c) ? 1 : 0;
    });
    TailEstimate est;
    est.trials = plan.trials;
    for (unsigned char h : hit) est.successes += h;
    est.point = static_cast<double>(est.successes) / static_cast<double>(est.trials);
    const Interval iv = clopper_pearson(est.successes, est.trials, 0.99);
    est.cp_low = std::min(iv.low, est.point);
    est.cp_high = std::max(iv.high, est.point);
    return est;
}

double estimate_mgf(const PathSampler& sampler, double t, const TrialPlan& plan,
                    unsigned threads) {
    if (plan.trials == 0 || plan.n == 0) raise(Errc::InvalidArgument, "empty trial plan");
    Vector values(plan.trials);
    parallel_for(plan.trials, threads, [&](std::size_t i) {
        const Vector vals = sampler(i);
        values[i] = std::exp(t * pairwise_sum(vals.data(), vals.size()));
    });
    return pairwise_sum(values.data(), values.size()) / static_cast<double>(plan.trials);
}

double scaled_variance(const PathSampler& sampler, const TrialPlan& plan, unsigned threads) {
    if (plan.trials < 1000)
        raise(Errc::InvalidArgument, "scaled_variance needs at least 1000 trials");
    if (plan.n == 0) raise(Errc::InvalidArgument, "n must be positive");
    Vector scaled(plan.trials);
    const double root_n = std::sqrt(static_cast<double>(plan.n));
    parallel_for(plan.trials, threads, [&](std::size_t i) {
        const Vector vals = sampler(i);
        scaled[i] = pairwise_sum(vals.data(), vals.size()) / root_n;
    });
    const double count = static_cast<double>(plan.trials);
    const double mean = pairwise_sum(scaled.data(), scaled.size()) / count;
    Vector sq(plan.trials);
    for (std::size_t i = 0; i < plan.trials; ++i) sq[i] = (scaled[i] - mean) * (scaled[i] - mean);
    return pairwise_sum(sq.data(), sq.size()) / (count - 1.0);
}

}  // namespace mcbern

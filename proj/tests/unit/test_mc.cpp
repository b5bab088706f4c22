#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mcbern/bounds.hpp"
#include "mcbern/leonperron.hpp"
#include "mcbern/mc.hpp"
#include "mcbern/spectral.hpp"
#include "test_support.hpp"

using namespace mcbern;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mcbern::Error");
    return Errc::InvalidArgument;
}

std::size_t brute_force_depth(const testing::Fixture& fx) {
    return fx.chain.n_states() <= 2 ? 10 : (fx.chain.n_states() <= 3 ? 7 : 6);
}

}  // namespace

TEST_CASE("exact MGF") {
    const auto fx = testing::two_state();
    CHECK(exact_mgf(fx.chain, fx.f, 2, 0.1) == doctest::Approx(1.0140467289333531).epsilon(1e-14));
    CHECK(exact_mgf(fx.chain, fx.f, 7, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(exact_mgf(fx.chain, fx.f, 1, 0.3) == doctest::Approx(std::cosh(0.3)).epsilon(1e-15));

    testing::ChainFactory factory(51);
    std::vector<testing::Fixture> chains = testing::all_fixtures();
    for (int k = 0; k < 6; ++k) chains.push_back(factory.nonreversible());
    for (const auto& c : chains) {
        const std::size_t depth = brute_force_depth(c);
        for (std::size_t n = 1; n <= depth; ++n)
            for (double t : {-0.7, 0.05, 0.4}) {
                CAPTURE(c.name);
                CHECK(testing::rel_diff(exact_mgf(c.chain, c.f, n, t), testing::brute_force_mgf(c, n, t)) < 1e-12);
            }
    }

    CHECK(exact_log_mgf(fx.chain, fx.f, 5, 0.2) == doctest::Approx(std::log(exact_mgf(fx.chain, fx.f, 5, 0.2))).epsilon(1e-13));
    // Far beyond double range; the all-(+1) path alone has mass 0.5 * 0.7^3999.
    const double huge = exact_log_mgf(fx.chain, fx.f, 4000, 500.0);
    CHECK(std::isfinite(huge));
    CHECK(huge >= 4000 * 500.0 + std::log(0.5) + 3999 * std::log(0.7) - 1e-6);
    CHECK(huge < 4000 * 500.0);
    CHECK(code_of([&] { exact_mgf(fx.chain, fx.f, 0, 0.1); }) == Errc::InvalidArgument);
}

TEST_CASE("exact MGF for time-varying observables") {
    const auto fx = testing::birth_death();
    CHECK(exact_mgf_timevarying(fx.chain, {fx.f, fx.f, fx.f}, 0.3) ==
          doctest::Approx(exact_mgf(fx.chain, fx.f, 3, 0.3)).epsilon(1e-14));

    Observable g = fx.f;
    for (double& v : g.values) v = -v;
    double brute = 0.0;
    testing::for_each_path(fx.chain, fx.pi, 4, [&](const std::vector<std::size_t>& path, double prob) {
        const double s = fx.f.values[path[0]] + g.values[path[1]] + fx.f.values[path[2]] + g.values[path[3]];
        brute += prob * std::exp(0.4 * s);
    });
    CHECK(exact_mgf_timevarying(fx.chain, {fx.f, g, fx.f, g}, 0.4) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("exact tail") {
    const auto fx = testing::two_state();
    CHECK(exact_tail(fx.chain, fx.f, 3, 0.5) == doctest::Approx(0.245).epsilon(1e-14));
    CHECK(exact_tail(fx.chain, fx.f, 5, 1.0) == 0.0);
    CHECK(exact_tail(fx.chain, fx.f, 5, 1.3) == 0.0);
    CHECK(exact_tail(fx.chain, fx.f, 1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Sum of 2 at n=2 is exactly a mean of 1 = c; a mean of exactly 0 is a tie.
    CHECK(exact_tail(fx.chain, fx.f, 2, 0.0) == doctest::Approx(0.35).epsilon(1e-14));

    const auto skew = testing::birth_death_skewed();
    double positive = 0.0;
    for (std::size_t x = 0; x < 3; ++x)
        if (skew.f.values[x] > 0) positive += skew.pi[x];
    CHECK(exact_tail(skew.chain, skew.f, 1, 0.0) == doctest::Approx(positive).epsilon(1e-15));

    testing::ChainFactory factory(53);
    std::vector<testing::Fixture> chains = testing::all_fixtures();
    for (int k = 0; k < 6; ++k) chains.push_back(factory.nonreversible());
    for (const auto& c : chains) {
        const std::size_t depth = brute_force_depth(c);
        for (std::size_t n = 1; n <= depth; ++n)
            for (double frac : {0.0, 0.1, 0.3, 0.5, 0.8}) {
                CAPTURE(c.name);
                CAPTURE(n);
                const double eps = frac * c.f.c;
                CHECK(std::fabs(exact_tail(c.chain, c.f, n, eps) - testing::brute_force_tail(c, n, eps)) < 1e-13);
            }
    }

    const auto random = factory.reversible();
    if (random.chain.n_states() == 5)
        CHECK(code_of([&] { exact_tail(random.chain, random.f, 400, 0.1); }) == Errc::TooLarge);
    const auto path = testing::path_four();
    CHECK(code_of([&] { exact_tail(path.chain, path.f, 20000, 0.1); }) == Errc::TooLarge);
}

TEST_CASE("tie rule") {
    CHECK_FALSE(exceeds(1.5, 3, 0.5, 1.0));
    CHECK(exceeds(1.5 + 1e-9, 3, 0.5, 1.0));
    CHECK_FALSE(exceeds(0.1 + 0.2, 3, 0.1, 1.0));
    CHECK_FALSE(exceeds(-0.3, 1, -0.3, 1.0));
}

TEST_CASE("random streams") {
    CHECK(trial_key(1, 0) != trial_key(1, 1));
    CHECK(trial_key(1, 0) != trial_key(2, 0));
    CounterRng a(trial_key(9, 3)), b(trial_key(9, 3));
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }

    const auto permutation = validate_chain(std::vector<std::vector<double>>{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    const auto pi = stationary(permutation);
    const TrialPlan p1{1, 1, 12}, p2{777, 1, 12};
    const auto path1 = sample_chain_path(permutation, pi, p1, 0);
    const auto path2 = sample_chain_path(permutation, pi, p2, 5);
    for (std::size_t i = 1; i < 12; ++i) {
        CHECK(path1[i] == (path1[i - 1] + 1) % 3);
        CHECK(path2[i] == (path2[i - 1] + 1) % 3);
    }

    const auto fx = testing::birth_death();
    const TrialPlan plan{2024, 1, 100000};
    const auto x = sample_chain_path(fx.chain, fx.pi, plan, 0);
    CHECK(x == sample_chain_path(fx.chain, fx.pi, plan, 0));
    CHECK(x != sample_chain_path(fx.chain, fx.pi, plan, 1));
    // The sample mean of the indicator has variance σ²_asy(1_s)/n.
    for (std::size_t s = 0; s < 3; ++s) {
        Vector ind(3, 0.0);
        ind[s] = 1.0;
        const Observable g = make_observable(ind, fx.pi);
        const double se = std::sqrt(asymptotic_variance(fx.chain, fx.pi, g) / plan.n);
        const double freq = static_cast<double>(std::count(x.begin(), x.end(), s)) / plan.n;
        CHECK(std::fabs(freq - fx.pi[s]) < 3.0 * se);
    }
}

TEST_CASE("León-Perron sampler") {
    const SimpleFunction mu{{1.0, -1.0}, {0.5, 0.5}, 1.0};
    const TrialPlan iid{5, 1, 100000};
    const Vector v = sample_lp_path(0.0, mu, iid, 0);
    CHECK(v == sample_lp_path(0.0, mu, iid, 0));
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    CHECK(std::fabs(mean) < 3.0 / std::sqrt(100000.0));
    std::size_t repeats = 0;
    for (std::size_t i = 1; i < v.size(); ++i) repeats += v[i] == v[i - 1];
    CHECK(std::fabs(repeats / double(v.size() - 1) - 0.5) < 3.0 * 0.5 / std::sqrt(100000.0));

    // Runs of a single constant segment: with λ = 0.999 a refresh happens w.p. 0.001
    // and draws the same value again w.p. 1/2, so observed runs average 1/(0.0005).
    const TrialPlan sticky{6, 1, 400000};
    const Vector w = sample_lp_path(0.999, mu, sticky, 0);
    std::size_t runs = 1;
    for (std::size_t i = 1; i < w.size(); ++i) runs += w[i] != w[i - 1];
    const double run_mean = static_cast<double>(w.size()) / runs;
    CHECK(run_mean == doctest::Approx(2000.0).epsilon(0.2));
}

TEST_CASE("Clopper-Pearson") {
    const Interval zero = clopper_pearson(0, 100);
    CHECK(zero.low == 0.0);
    CHECK(zero.high == doctest::Approx(1.0 - std::pow(0.005, 0.01)).epsilon(1e-10));
    const Interval all = clopper_pearson(100, 100);
    CHECK(all.high == 1.0);
    CHECK(all.low == doctest::Approx(std::pow(0.005, 0.01)).epsilon(1e-10));
    const Interval mid = clopper_pearson(30, 100);
    CHECK(mid.low < 0.3);
    CHECK(mid.high > 0.3);
    CHECK(clopper_pearson(300, 1000).high - clopper_pearson(300, 1000).low < mid.high - mid.low);
}

TEST_CASE("tail estimation") {
    const auto fx = testing::two_state();
    const TrialPlan plan{1, 100000, 3};
    const auto est = estimate_tail(chain_sampler(fx.chain, fx.pi, fx.f, plan), 0.5, fx.f.c, plan, 4);
    CHECK(est.trials == 100000);
    CHECK(est.point == static_cast<double>(est.successes) / est.trials);
    CHECK(est.cp_low <= est.point);
    CHECK(est.point <= est.cp_high);
    CHECK(est.cp_low <= 0.245);
    CHECK(0.245 <= est.cp_high);

    const auto none = estimate_tail(chain_sampler(fx.chain, fx.pi, fx.f, plan), 1.5, fx.f.c, plan, 2);
    CHECK(none.successes == 0);
    CHECK(none.cp_low == 0.0);

    const TrialPlan small{1, 50, 3};
    CHECK(code_of([&] { estimate_tail(chain_sampler(fx.chain, fx.pi, fx.f, small), 0.5, 1.0, small); }) ==
          Errc::InvalidArgument);

    for (const auto& c : testing::all_fixtures()) {
        const TrialPlan p{17, 20000, 6};
        const auto e = estimate_tail(chain_sampler(c.chain, c.pi, c.f, p), 0.3 * c.f.c, c.f.c, p, 0);
        const SpectralReport rep = analyze(c.chain, c.pi, &c.f);
        const BoundQuery q{p.n, 0.3 * c.f.c, c.f.sigma2, c.f.c, rep.lambda};
        CHECK(e.dominated_by(tail_bound(q, Variant::thm11).probability_bound));
    }
}

TEST_CASE("thread count does not change results") {
    const auto fx = testing::drift_cycle();
    const TrialPlan plan{99, 3001, 9};
    const auto sampler = chain_sampler(fx.chain, fx.pi, fx.f, plan);
    const auto one = estimate_tail(sampler, 0.2, fx.f.c, plan, 1);
    const double m1 = estimate_mgf(sampler, 0.3, plan, 1);
    const double v1 = scaled_variance(sampler, TrialPlan{99, 3001, 9}, 1);
    for (unsigned threads : {2u, 4u, 7u, 16u}) {
        const auto other = estimate_tail(sampler, 0.2, fx.f.c, plan, threads);
        CHECK(other.successes == one.successes);
        CHECK(other.cp_low == one.cp_low);
        CHECK(estimate_mgf(sampler, 0.3, plan, threads) == m1);
        CHECK(scaled_variance(sampler, plan, threads) == v1);
    }
}

TEST_CASE("scaled variance and MGF estimates") {
    const SimpleFunction mu{{1.0, -1.0}, {0.5, 0.5}, 1.0};
    const TrialPlan iid{3, 20000, 50};
    CHECK(scaled_variance(lp_sampler(0.0, mu, iid), iid, 0) == doctest::Approx(1.0).epsilon(0.05));
    const TrialPlan single{4, 20000, 1};
    CHECK(scaled_variance(lp_sampler(0.6, mu, single), single, 0) == doctest::Approx(1.0).epsilon(0.05));
    const TrialPlan few{4, 500, 10};
    CHECK(code_of([&] { scaled_variance(lp_sampler(0.6, mu, few), few); }) == Errc::InvalidArgument);

    const auto fx = testing::two_state();
    const TrialPlan plan{8, 50000, 6};
    const double exact = exact_mgf(fx.chain, fx.f, 6, 0.2);
    CHECK(estimate_mgf(chain_sampler(fx.chain, fx.pi, fx.f, plan), 0.2, plan, 0) ==
          doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("MGF is dominated by the perturbed norm power") {
    testing::ChainFactory factory(59);
    std::vector<testing::Fixture> chains = testing::reversible_fixtures();
    for (int k = 0; k < 8; ++k) chains.push_back(factory.reversible());
    for (const auto& c : chains) {
        const double lp = std::max(right_gap(c.chain, c.pi), 0.0);
        const SimpleFunction s = pushforward(c.pi, c.f);
        for (std::size_t n : {1u, 3u, 10u})
            for (double t : {0.05, 0.2, 0.5}) {
                CAPTURE(c.name);
                CHECK(exact_mgf(c.chain, c.f, n, t) <=
                      std::pow(lp_perturbed_norm(lp, s, t), static_cast<double>(n)) * (1 + 1e-12));
            }
    }
}

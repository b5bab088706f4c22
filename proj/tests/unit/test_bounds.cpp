#include <doctest.h>

#include <cmath>
#include <random>

#include "mcbern/bounds.hpp"
#include "mcbern/error.hpp"

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

}  // namespace

TEST_CASE("helper functions against high-precision values") {
    CHECK(expm1_minus_x(1e-5) == doctest::Approx(5.0000166667083334e-11).epsilon(1e-14));
    CHECK(expm1_minus_x(0.5) == doctest::Approx(0.14872127070012815).epsilon(1e-14));
    CHECK(expm1_minus_x(0.0) == 0.0);
    CHECK(bennett_h(1e-3) == doctest::Approx(4.9983341661669998e-7).epsilon(1e-13));
    CHECK(bennett_h(0.1) == doctest::Approx(0.004841197784757346).epsilon(1e-13));
    CHECK(bennett_h(1.0) == doctest::Approx(0.3862943611198906).epsilon(1e-14));
    CHECK(conjugate_h2(0.0) == 2.0);
}

TEST_CASE("g components") {
    const auto g = g_components(0.1, 1.0, 1.0, 0.4);
    CHECK(g.g1 == doctest::Approx(0.005170918075647625).epsilon(1e-14));
    CHECK(g.g2 == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(g_components(0.1, 1.0, 1.0, 0.0).g2 == 0.0);
    CHECK(std::isinf(g_components(0.12, 1.0, 1.0, 0.4).g2));
    CHECK(std::isinf(g_components(0.2, 1.0, 1.0, 0.4).g2));
}

TEST_CASE("mgf envelope") {
    CHECK(mgf_bound(2, 0.1, 1.0, 1.0, 0.4, Variant::thm11) ==
          doctest::Approx(1.0945483759666850).epsilon(1e-14));
    CHECK(mgf_bound(7, 0.0, 1.0, 1.0, 0.4, Variant::thm11) == 1.0);
    CHECK(code_of([] { mgf_bound(2, 0.12, 1.0, 1.0, 0.4, Variant::thm11); }) == Errc::OutOfRange);
    CHECK(code_of([] { mgf_bound(2, -0.01, 1.0, 1.0, 0.4, Variant::thm11); }) == Errc::OutOfRange);
    CHECK(code_of([] { mgf_bound(2, 0.01, 1.0, 1.0, 1.0, Variant::thm11); }) == Errc::NoGap);
    // thm12 clamps negative λ⁺ to the independent case.
    CHECK(mgf_bound(5, 0.1, 0.5, 1.0, -0.6, Variant::thm12) ==
          mgf_bound(5, 0.1, 0.5, 1.0, 0.0, Variant::thm11));
    // λ = 0 is the Bennett envelope.
    const double t = 0.1, s2 = 0.7, c = 1.5;
    CHECK(mgf_bound(10, t, s2, c, 0.0, Variant::thm11) ==
          doctest::Approx(std::exp(10 * s2 / (c * c) * (std::exp(t * c) - 1 - t * c))).epsilon(1e-12));
}

TEST_CASE("closed-form tail bounds") {
    CHECK(tail_bound({1000, 0.1, 1.0, 1.0, 0.0}, Variant::thm11).probability_bound ==
          doctest::Approx(0.0079172632871697).epsilon(1e-13));
    CHECK(tail_bound({1000, 0.1, 1.0, 1.0, 0.4}, Variant::thm11).probability_bound ==
          doctest::Approx(0.2061920282514089).epsilon(1e-13));
    CHECK(tail_bound({500, 0.2, 0.5, 1.0, 0.4}, Variant::thm12).probability_bound ==
          doctest::Approx(0.029322159123893818).epsilon(1e-13));
    CHECK(tail_bound({500, 0.2, 0.5, 1.0, -0.3}, Variant::thm12).probability_bound ==
          tail_bound({500, 0.2, 0.5, 1.0, 0.0}, Variant::thm11).probability_bound);
    CHECK(code_of([] { tail_bound({10, 0.1, 1.0, 1.0, -0.1}, Variant::thm11); }) == Errc::DomainError);
    CHECK(code_of([] { tail_bound({10, 0.0, 1.0, 1.0, 0.1}, Variant::thm11); }) == Errc::InvalidArgument);
    CHECK(code_of([] { tail_bound({10, 0.1, 2.0, 1.0, 0.1}, Variant::thm11); }) == Errc::InvalidArgument);
}

TEST_CASE("classical bounds") {
    CHECK(classical_bound(ClassicalKind::hoeffding, 400, 0.1, 1.0, 1.0).probability_bound ==
          doctest::Approx(0.1353352832366127).epsilon(1e-13));
    CHECK(classical_bound(ClassicalKind::bennett, 100, 0.1, 0.25, 1.0).probability_bound ==
          doctest::Approx(0.16922462886375433).epsilon(1e-13));
    CHECK(classical_bound(ClassicalKind::bernstein, 1, 0.1, 1.0, 1.0).exponent ==
          doctest::Approx(0.004838709677419355).epsilon(1e-14));
    CHECK(classical_bound(ClassicalKind::bennett, 10, 0.1, 0.0, 1.0).probability_bound == 0.0);

    // Bennett is never weaker than Bernstein.
    for (double s2 : {0.01, 0.1, 0.5, 1.0})
        for (double eps : {0.01, 0.1, 0.5, 0.9})
            CHECK(classical_bound(ClassicalKind::bennett, 50, eps, s2, 1.0).probability_bound <=
                  classical_bound(ClassicalKind::bernstein, 50, eps, s2, 1.0).probability_bound * (1 + 1e-12));
}

TEST_CASE("thm11 at lambda = 0 is Bernstein, bit for bit") {
    for (std::size_t n : {1u, 7u, 1000u})
        for (double eps : {0.01, 0.3, 2.0})
            for (double s2 : {0.0, 0.2, 1.0}) {
                const BoundQuery q{n, eps, s2, 1.0, 0.0};
                CHECK(tail_bound(q, Variant::thm11).probability_bound ==
                      classical_bound(ClassicalKind::bernstein, n, eps, s2, 1.0).probability_bound);
            }
}

TEST_CASE("conjugates: closed forms against numerical suprema") {
    const Conjugates cj = conjugate_closed_forms(0.1, 0.1, 1.0, 1.0, 0.4);
    CHECK(cj.g1_star == doctest::Approx(0.004841197784757346).epsilon(1e-13));
    REQUIRE(cj.g2_star);
    CHECK(*cj.g2_star == doctest::Approx(0.0024).epsilon(1e-13));
    CHECK_FALSE(conjugate_closed_forms(0.1, 0.1, 1.0, 1.0, 0.0).g2_star);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double c = 0.2 + 2.0 * u(rng);
        const double s2 = c * c * (0.01 + 0.99 * u(rng));
        const double lambda = 0.01 + 0.9 * u(rng);
        const double eps = c * (0.01 + u(rng));
        const Conjugates closed = conjugate_closed_forms(eps, eps, s2, c, lambda);
        auto g1 = [&](double t) { return g_components(t, s2, c, 0.0).g1; };
        auto g2 = [&](double t) { return g_components(t, s2, c, lambda).g2; };
        const double t1 = 2.0 * std::log1p(c * eps / s2) / c + 1.0 / c;
        CHECK(fenchel_numeric(g1, eps, t1) == doctest::Approx(closed.g1_star).epsilon(1e-8));
        CHECK(fenchel_numeric(g2, eps, (1.0 - lambda) / (5.0 * c)) ==
              doctest::Approx(*closed.g2_star).epsilon(1e-8));
    }
}

TEST_CASE("fenchel_numeric flags non-concave objectives") {
    auto convex_phi = [](double t) { return -t * t; };
    CHECK(code_of([&] { fenchel_numeric(convex_phi, 0.1, 1.0); }) == Errc::NonConcaveDetected);
    auto nan_g = [](double) { return std::nan(""); };
    CHECK(code_of([&] { fenchel_numeric(nan_g, 0.1, 1.0); }) == Errc::NonConcaveDetected);
}

TEST_CASE("Chernoff optimisation and the infimal convolution") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double c = 0.5 + u(rng);
        const BoundQuery q{1 + static_cast<std::size_t>(500 * u(rng)), c * (0.02 + u(rng)),
                           c * c * (0.01 + 0.99 * u(rng)), c, 0.95 * u(rng)};
        const auto closed = tail_bound(q, Variant::thm11);
        const auto opt = chernoff_optimize(q, Variant::thm11);
        CHECK(opt.exponent >= closed.exponent * (1.0 - 1e-12));
        CHECK(opt.kind == BoundKind::thm11_chernoff);
        const double lb = effective_gap(q.gap, Variant::thm11);
        if (lb > 0.0) {
            const double ic = infimal_convolution(q.eps, q.sigma2, q.c, lb);
            CHECK(ic >= infimal_lower_bound(q.eps, q.sigma2, q.c, lb) * (1.0 - 1e-12));
            // The joint conjugate is at least the infimal convolution.
            CHECK(opt.exponent >= ic * (1.0 - 1e-9));
        }
    }
    // σ² = 0 and λ = 0: no fluctuations, infinite exponent.
    CHECK(chernoff_optimize({10, 0.1, 0.0, 1.0, 0.0}, Variant::thm11).probability_bound == 0.0);
}

TEST_CASE("variance proxy tables") {
    const auto rows = proxy_table(1.0, 1.0, 0.5, 0.5);
    REQUIRE(rows.size() == 17);
    auto find = [&](int table, const std::string& ref) {
        for (const auto& r : rows)
            if (r.table == table && r.reference == ref) return r.proxy;
        FAIL("missing row " << ref);
        return 0.0;
    };
    CHECK(find(2, "thm12") == doctest::Approx(3.0));
    CHECK(find(2, "Paulin (2015), (3.21)") == doctest::Approx(4.0));
    CHECK(find(2, "Lezaud (1998a), (1)") == doctest::Approx(4.0));
    CHECK(find(2, "Lezaud (1998a), (13)") == doctest::Approx(8.0));
    CHECK(find(2, "Paulin (2015), (3.20)") == doctest::Approx(3.8));
    CHECK(find(1, "thm11") == doctest::Approx(3.0));
    CHECK(find(1, "Paulin (2015), (3.22)") == doctest::Approx(16.0 / 3.0));

    // λ⁺ < 0 is clamped wherever the table writes λ⁺ ∨ 0.
    const auto neg = proxy_table(2.0, 1.0, 0.3, -0.4);
    for (const auto& r : neg)
        if (r.table == 2 && r.reference == "thm12") CHECK(r.proxy == doctest::Approx(2.0));
    CHECK(code_of([] { proxy_table(1.0, 1.0, 1.0, 0.5); }) == Errc::DomainError);
}

TEST_CASE("names") {
    CHECK(to_string(BoundKind::thm12_chernoff) == "thm12-chernoff");
    CHECK(to_string(Variant::thm11) == "thm11");
    CHECK(to_string(ClassicalKind::bennett) == "bennett");
}

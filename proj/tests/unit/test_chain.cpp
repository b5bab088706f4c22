#include <doctest.h>

#include "mcbern/chain.hpp"
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

}  // namespace

TEST_CASE("validate_chain rejects malformed matrices") {
    CHECK(code_of([] { validate_chain(std::vector<std::vector<double>>{{1.0, 0.0}}); }) ==
          Errc::NotSquare);
    CHECK(code_of([] { validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {1.0}}); }) ==
          Errc::NotSquare);
    CHECK(code_of([] {
              validate_chain(std::vector<std::vector<double>>{{1.1, -0.1}, {0.5, 0.5}});
          }) == Errc::NegativeEntry);
    CHECK(code_of([] {
              validate_chain(std::vector<std::vector<double>>{{0.6, 0.3}, {0.5, 0.5}});
          }) == Errc::RowSumViolation);

    try {
        validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {0.2, 0.7}});
        FAIL("accepted a bad row");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("row sums within 1e-12 are accepted") {
    CHECK_NOTHROW(validate_chain(std::vector<std::vector<double>>{{0.5, 0.5 + 5e-13}, {0.5, 0.5}}));
}

TEST_CASE("stationary distributions of the fixtures") {
    const auto two = testing::two_state();
    CHECK(two.pi[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two.pi[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto bd = testing::birth_death();
    CHECK(bd.pi[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bd.pi[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bd.pi[2] == doctest::Approx(0.25).epsilon(1e-14));

    const auto cyc = testing::drift_cycle();
    for (std::size_t x = 0; x < 4; ++x) CHECK(cyc.pi[x] == doctest::Approx(0.25).epsilon(1e-14));

    const auto one = validate_chain(std::vector<std::vector<double>>{{1.0}});
    CHECK(stationary(one).pi == Vector{1.0});
}

TEST_CASE("stationary solves πP = π on random chains") {
    testing::ChainFactory factory(17);
    for (int k = 0; k < 40; ++k) {
        const auto fx = k % 2 ? factory.reversible() : factory.nonreversible();
        const Vector moved = vecmat(fx.pi.pi, fx.chain.transition());
        double total = 0.0;
        for (std::size_t x = 0; x < fx.pi.size(); ++x) {
            CHECK(std::fabs(moved[x] - fx.pi[x]) < 1e-13);
            total += fx.pi[x];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("reducible and degenerate chains are refused") {
    const auto reducible = validate_chain(std::vector<std::vector<double>>{
        {1.0, 0.0, 0.0}, {0.0, 0.5, 0.5}, {0.0, 0.5, 0.5}});
    CHECK(code_of([&] { stationary(reducible); }) == Errc::NonUniqueStationary);

    // State 0 is transient, so π(0) = 0.
    const auto transient = validate_chain(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}});
    const Errc c = code_of([&] { stationary(transient); });
    CHECK((c == Errc::DegenerateSupport || c == Errc::NonUniqueStationary));
}

TEST_CASE("adjoint and reversibility") {
    const auto bd = testing::birth_death();
    CHECK(is_reversible(bd.chain, bd.pi));
    CHECK(max_abs_diff(adjoint(bd.chain, bd.pi), bd.chain.transition()) < 1e-15);

    const auto cyc = testing::drift_cycle();
    CHECK_FALSE(is_reversible(cyc.chain, cyc.pi));
    const Matrix adj = adjoint(cyc.chain, cyc.pi);
    CHECK(adj(0, 1) == doctest::Approx(0.1));
    CHECK(adj(1, 0) == doctest::Approx(0.4));
    const Matrix r = additive_reversiblization(cyc.chain, cyc.pi);
    CHECK(is_reversible(r, cyc.pi));
    for (std::size_t i = 0; i < 4; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += r(i, j);
        CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("make_observable centers and bounds") {
    const auto chain = validate_chain(std::vector<std::vector<double>>{{0.7, 0.3}, {0.3, 0.7}});
    const auto pi = stationary(chain);
    const Vector raw{3.0, 1.0};
    const Observable f = make_observable(raw, pi);
    CHECK(f.values[0] == doctest::Approx(1.0));
    CHECK(f.values[1] == doctest::Approx(-1.0));
    CHECK(f.c == doctest::Approx(1.0));
    CHECK(f.sigma2 == doctest::Approx(1.0));
    CHECK(make_observable(raw, pi, 2.0).c == 2.0);
    CHECK(code_of([&] { make_observable(raw, pi, 0.5); }) == Errc::BoundTooSmall);
}

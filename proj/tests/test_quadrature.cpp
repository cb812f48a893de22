#include <doctest.h>

#include "dlimit/errors.hpp"
#include "dlimit/quadrature.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace dlimit;

TEST_CASE("polynomials and smooth functions integrate to tolerance") {
    const QuadratureSpec spec;
    CHECK(integrate([](double t) { return t * t; }, 0.0, 3.0, {}, spec).value == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(integrate([](double t) { return std::sin(t); }, 0.0, M_PI, {}, spec).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    const auto r = integrate([](double t) { return std::exp(-t); }, 0.0, 40.0, {}, spec);
    CHECK(std::abs(r.value - (1 - std::exp(-40.0))) <= 1e-10);
    CHECK(r.error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value)));
}

TEST_CASE("bump integral matches the frozen value") {
    const QuadratureSpec spec;
    const auto r = integrate([](double u) { return static_cast<double>(oracle::psi(u)); }, -1.0, 1.0, {}, spec);
    CHECK(std::abs(r.value - oracle::kBumpIntegral) <= 1e-10);
}

TEST_CASE("steep boundary layer is resolved with layer splits") {
    const QuadratureSpec spec;
    const double i = 4096;
    const auto splits = layer_splits_from_left(0.0, 1.0, 1.0 / i);
    const auto r = integrate([&](double t) { return i * std::exp(-i * t); }, 0.0, 1.0, splits, spec);
    CHECK(std::abs(r.value - (1 - std::exp(-i))) <= 1e-9);
}

TEST_CASE("layer split construction") {
    const auto left = layer_splits_from_left(0.0, 1.0, 0.01);
    REQUIRE(left.size() >= 10);
    CHECK(left[0] == doctest::Approx(0.01));
    CHECK(left[9] == doctest::Approx(0.10));
    for (double s : left) CHECK((s > 0.0 && s < 1.0));
    const auto right = layer_splits_from_right(0.0, 1.0, 0.01);
    REQUIRE(right.size() == left.size());
    for (std::size_t k = 0; k < left.size(); ++k) {
        const bool mirrored = std::find_if(right.begin(), right.end(), [&](double x) {
                                  return std::abs(x - (1.0 - left[k])) < 1e-15;
                              }) != right.end();
        CHECK(mirrored);
    }
}

TEST_CASE("vector integrand") {
    const QuadratureSpec spec;
    auto f = [](double t, double* out) {
        out[0] = 1.0;
        out[1] = t;
        out[2] = std::cos(t);
    };
    const auto r = integrate_vector(f, 3, 0.0, 2.0, {}, spec);
    CHECK(r.value(0) == doctest::Approx(2.0));
    CHECK(r.value(1) == doctest::Approx(2.0));
    CHECK(r.value(2) == doctest::Approx(std::sin(2.0)));
}

TEST_CASE("empty and reversed intervals") {
    const QuadratureSpec spec;
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0, {}, spec).value == 0.0);
    CHECK(integrate([](double) { return 1.0; }, 2.0, 1.0, {}, spec).value == doctest::Approx(-1.0));
}

TEST_CASE("failure modes") {
    QuadratureSpec tight;
    tight.abs_tol = 1e-14;
    tight.rel_tol = 1e-14;
    tight.max_subdivisions = 3;
    CHECK_THROWS_AS(integrate([](double t) { return std::sin(200 * t); }, 0.0, 10.0, {}, tight), QuadratureFailure);
    CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0, {}, QuadratureSpec{}), QuadratureFailure);
    QuadratureSpec bad;
    bad.abs_tol = -1;
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("extra breakpoints are honoured") {
    QuadratureSpec spec;
    spec.extra_breakpoints = {0.5};
    // A jump at 0.5 only integrates to full precision with the split.
    const auto r = integrate([](double t) { return t <= 0.5 ? 1.0 : 0.0; }, 0.0, 1.0, {}, spec);
    CHECK(std::abs(r.value - 0.5) <= 1e-14);
}

#include <doctest.h>

#include "dlimit/errors.hpp"
#include "dlimit/test_function.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace dlimit;

namespace {

int degree(const std::vector<double>& p) {
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) {
        if (p[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
}

Vector e(int n, int k) {
    Vector v = Vector::Zero(n);
    v(k) = 1.0;
    return v;
}

}  // namespace

TEST_CASE("unit bump values") {
    CHECK(unit_bump(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(unit_bump(0.0, 1) == 0.0);
    CHECK(unit_bump(1.0) == 0.0);
    CHECK(unit_bump(-1.2, 3) == 0.0);
    for (int k = 0; k < 5; ++k) {
        CHECK(unit_bump(0.5, k) == doctest::Approx(oracle::kPsiDerivsAtHalf[static_cast<std::size_t>(k)]).epsilon(1e-13));
    }
}

TEST_CASE("third derivative agrees with five-point differences of the second") {
    const double h = 1e-3;
    const double fd = (-unit_bump(0.5 + 2 * h, 2) + 8 * unit_bump(0.5 + h, 2) - 8 * unit_bump(0.5 - h, 2) +
                       unit_bump(0.5 - 2 * h, 2)) /
                      (12 * h);
    CHECK(std::abs(fd - unit_bump(0.5, 3)) <= 1e-6 * std::abs(unit_bump(0.5, 3)));
}

TEST_CASE("recurrence polynomial degrees") {
    CHECK(degree(bump_polynomial(0)) == 0);
    CHECK(degree(bump_polynomial(1)) == 1);
    // P_1 = -2u is the one step that does not add three.
    for (int n = 1; n <= 10; ++n) CHECK(degree(bump_polynomial(n + 1)) == degree(bump_polynomial(n)) + 3);
}

TEST_CASE("scaled, shifted and modulated profiles") {
    const TestFunction phi(2.0, 0.5, e(1, 0));
    CHECK(phi.support_begin() == 1.5);
    CHECK(phi.support_end() == 2.5);
    CHECK(phi.profile(2.0) == doctest::Approx(std::exp(-1.0)));
    // Chain rule: d/dt = (1/r) d/du.
    CHECK(phi.profile(2.25, 1) == doctest::Approx(unit_bump(0.5, 1) / 0.5).epsilon(1e-13));
    CHECK(phi.profile(2.25, 2) == doctest::Approx(unit_bump(0.5, 2) / 0.25).epsilon(1e-13));

    // m(u) = 1 + u, derivative (psi m)' = psi' m + psi.
    const TestFunction mod(0.0, 1.0, e(1, 0), {1.0, 1.0});
    CHECK(mod.profile(0.5, 1) == doctest::Approx(unit_bump(0.5, 1) * 1.5 + unit_bump(0.5)).epsilon(1e-13));
    CHECK(mod.derivative(1).profile(0.5) == doctest::Approx(mod.profile(0.5, 1)));
    CHECK(mod.derivative(2).derivative_offset() == 2);

    const TestFunction v(0.0, 1.0, e(3, 1));
    const Vector val = bump_eval(v, 0.0, 0);
    CHECK(val(0) == 0.0);
    CHECK(val(1) == doctest::Approx(std::exp(-1.0)));
    CHECK(val(2) == 0.0);
}

TEST_CASE("derivatives vanish at the support endpoints") {
    for (const auto& phi : standard_bank(1, 3)) {
        for (int k = 0; k <= 6; ++k) {
            CHECK(std::abs(phi.profile(phi.support_begin() + 1e-9, k)) <= 1e-8);
            CHECK(std::abs(phi.profile(phi.support_end() - 1e-9, k)) <= 1e-8);
        }
    }
}

TEST_CASE("invalid test functions are rejected") {
    CHECK_THROWS_AS(TestFunction(0.0, 0.0, e(1, 0)), InputError);
    CHECK_THROWS_AS(TestFunction(0.0, 1.0, Vector::Constant(2, 1.0)), InputError);
    CHECK_THROWS_AS(TestFunction(0.0, 1.0, Vector::Zero(0)), InputError);
}

TEST_CASE("standard bank") {
    const auto one = standard_bank(1, 1);
    REQUIRE(one.size() == 4);
    CHECK(one[0].profile(0.0) == doctest::Approx(std::exp(-1.0)));
    const auto two = standard_bank(2, 2);
    REQUIRE(two.size() == 8);
    int along_first = 0;
    for (const auto& phi : two) {
        CHECK(phi.direction().norm() == doctest::Approx(1.0));
        if (phi.direction()(0) == 1.0) ++along_first;
        CHECK(phi.support_end() <= 4.5);
        CHECK(phi.eval(5.0, 0).norm() == 0.0);
    }
    CHECK(along_first == 4);
    CHECK_THROWS_AS(standard_bank(1, 0), InputError);
}

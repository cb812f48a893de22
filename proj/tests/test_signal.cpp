#include <doctest.h>

#include "dlimit/errors.hpp"
#include "dlimit/signal.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace dlimit;

namespace {

// Random expression over the grammar; depth-limited.
Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    switch (pick(rng)) {
        case 0: return Expr::constant(std::round(coef(rng) * 100) / 100);
        case 1: return Expr::variable();
        case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
        case 3: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
        case 4: return -random_expr(rng, depth - 1);
        case 5: return Expr::pow(random_expr(rng, depth - 1), 2 + static_cast<unsigned>(rng() % 2));
        case 6: return Expr::sin(Expr::constant(coef(rng)) * Expr::variable());
        case 7: return Expr::cos(random_expr(rng, depth - 1));
        default: return Expr::exp(Expr::constant(coef(rng) / 2) * Expr::variable());
    }
}

VectorSignal random_signal(std::mt19937& rng, int n, int depth = 3) {
    std::vector<Expr> comps;
    for (int k = 0; k < n; ++k) comps.push_back(random_expr(rng, depth));
    return VectorSignal(std::move(comps));
}

}  // namespace

TEST_CASE("parse examples") {
    const auto s = parse_signal("[t, 1]", 2);
    CHECK(s.dimension() == 2);
    CHECK(s.eval(3.0)(0) == 3.0);
    CHECK(s.eval(3.0)(1) == 1.0);
    CHECK(s.to_string() == "[t, 1]");

    const auto tr = parse_signal("[sin(t), cos(t)]", 2);
    CHECK(tr.eval(0.0)(0) == 0.0);
    CHECK(tr.eval(0.0)(1) == 1.0);
    CHECK(tr.to_string() == "[sin(t), cos(t)]");
}

TEST_CASE("parse errors carry offset and expected set") {
    try {
        parse_signal("[t^", 1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
        CHECK_FALSE(e.expected().empty());
        CHECK(std::string(e.what()).find("offset 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_signal("[t, 1]", 3), DimensionMismatch);
    CHECK_THROWS_AS(parse_signal("t", 1), ParseError);
    CHECK_THROWS_AS(parse_signal("[t +]", 1), ParseError);
    CHECK_THROWS_AS(parse_signal("[log(t)]", 1), ParseError);
    CHECK_THROWS_AS(parse_signal("[t] extra", 1), ParseError);
    CHECK_THROWS_AS(parse_signal("[t^-1]", 1), ParseError);
    CHECK_THROWS_AS(parse_signal("[]", 1), ParseError);
}

TEST_CASE("grammar coverage") {
    CHECK(parse_expr("2*t^2 - 3*t + 1").eval(2.0) == doctest::Approx(3.0));
    CHECK(parse_expr("-t^2").eval(3.0) == doctest::Approx(-9.0));
    CHECK(parse_expr("(t+1)^3").eval(1.0) == doctest::Approx(8.0));
    CHECK(parse_expr("exp(2*t)").eval(0.5) == doctest::Approx(std::exp(1.0)));
    CHECK(parse_expr("1.5e-3 * t").eval(2.0) == doctest::Approx(3e-3));
    CHECK(parse_expr("sin(t^2 + 1)").eval(1.0) == doctest::Approx(std::sin(2.0)));
    CHECK(parse_expr("--t").eval(4.0) == doctest::Approx(4.0));
    CHECK(parse_expr("  t *  ( 1 - t ) ").eval(0.5) == doctest::Approx(0.25));
}

TEST_CASE("printer round trip") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Expr e = random_expr(rng, 4);
        const Expr back = parse_expr(e.to_string());
        for (double t : {0.0, 0.37, 1.9}) {
            const double a = e.eval(t);
            const double b = back.eval(t);
            CHECK(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
        }
        CHECK(back.to_string() == e.to_string());
    }
}

TEST_CASE("differentiation examples") {
    CHECK(parse_signal("[t^2]").differentiate(1).same_as(parse_signal("[2 * t]")));
    CHECK(parse_signal("[sin(t)]").differentiate(2).same_as(parse_signal("[-sin(t)]")));
    CHECK(parse_signal("[exp(2*t)]").differentiate(1).same_as(parse_signal("[2 * exp(2 * t)]")));
    CHECK(parse_signal("[7]").differentiate(1).is_zero());
    CHECK(parse_signal("[t^3]").differentiate(4).is_zero());
}

TEST_CASE("differentiation is linear") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> pt(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_signal(rng, 2);
        const auto g = random_signal(rng, 2);
        const double a = 1.75;
        const auto lhs = VectorSignal::linear_combination(a, f, 1.0, g).differentiate(1);
        const auto df = f.differentiate(1);
        const auto dg = g.differentiate(1);
        for (int k = 0; k < 100; ++k) {
            const double t = pt(rng);
            const Vector expect = a * df.eval(t) + dg.eval(t);
            CHECK((lhs.eval(t) - expect).norm() <= 1e-12 * (1 + expect.norm()));
        }
    }
}

TEST_CASE("symbolic derivative agrees with central differences") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> pt(0.0, 5.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_signal(rng, 1, 2);
        const auto df = f.differentiate(1);
        for (int k = 0; k < 10; ++k) {
            const double t = pt(rng) + h;
            const double fd = (f.eval(t + h)(0) - f.eval(t - h)(0)) / (2 * h);
            const double sym = df.eval(t)(0);
            CHECK(std::abs(sym - fd) <= 1e-7 * (1 + std::abs(sym)) * (1 + std::abs(f.eval(t)(0))));
        }
    }
}

TEST_CASE("simplifying factories") {
    const Expr t = Expr::variable();
    CHECK((t * Expr::constant(0)).is_zero());
    CHECK((t + Expr::constant(0)).same_as(t));
    CHECK((Expr::constant(1) * t).same_as(t));
    CHECK((-(-t)).same_as(t));
    CHECK(Expr::pow(t, 1).same_as(t));
    CHECK(Expr::pow(t, 0).same_as(Expr::constant(1)));
    CHECK((Expr::constant(2) * Expr::constant(3)).same_as(Expr::constant(6)));
    CHECK(Expr::linear_combination(1.0, t, -1.0, t).is_zero());
}

TEST_CASE("piecewise evaluation takes the left piece at a breakpoint") {
    const PiecewiseSignal p({1.0, 2.0}, {parse_signal("[1]"), parse_signal("[2]"), parse_signal("[3]")}, -1);
    CHECK(p.eval(0.5)(0) == 1.0);
    CHECK(p.eval(1.0)(0) == 1.0);
    CHECK(p.eval(1.5)(0) == 2.0);
    CHECK(p.eval(2.0)(0) == 2.0);
    CHECK(p.eval(7.0)(0) == 3.0);
    CHECK(p.max_breakpoint_mismatch(0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(PiecewiseSignal({2.0, 1.0}, {parse_signal("[1]"), parse_signal("[2]"), parse_signal("[3]")}, 0),
                    InputError);
    CHECK_THROWS_AS(PiecewiseSignal({1.0}, {parse_signal("[1]")}, 0), InputError);
}

TEST_CASE("hermite extension examples") {
    const auto ramp = hermite_extend(parse_signal("[1]"), 2.0, 1);
    CHECK(ramp.smoothness() == 0);
    CHECK(ramp.eval(1.0)(0) == 1.0);
    CHECK(ramp.eval(2.5)(0) == doctest::Approx(0.5));
    CHECK(ramp.eval(2.25)(0) == doctest::Approx(3 - 2.25));
    CHECK(ramp.eval(3.5)(0) == 0.0);

    const auto cubic = hermite_extend(parse_signal("[t]"), 1.0, 2);
    for (double t : {1.1, 1.4, 1.75, 2.0}) {
        const double s = t - 1;
        CHECK(cubic.eval(t)(0) == doctest::Approx(3 * s * s * s - 5 * s * s + s + 1).epsilon(1e-12));
    }
    CHECK(cubic.differentiate(1).eval(2.0)(0) == doctest::Approx(0.0).epsilon(1e-12));

    const auto zero = hermite_extend(parse_signal("[0, 0]"), 3.0, 3);
    for (double t : {0.0, 2.0, 3.5, 5.0}) CHECK(zero.eval(t).norm() == 0.0);
}

TEST_CASE("hermite extension matching and identity region") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> bd(0.5, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int q = 1 + trial % 4;
        const double b = bd(rng);
        const auto f = random_signal(rng, 2, 2);
        const auto fb = hermite_extend(f, b, q);
        CHECK(fb.smoothness() == q - 1);
        double scale = 0.0;
        for (int k = 0; k < q; ++k) scale = std::max(scale, f.differentiate(k).eval(b).norm());
        CHECK(fb.max_breakpoint_mismatch(q - 1) <= 1e-10 * (1 + scale));
        CHECK(fb.pieces().front().same_as(f));
        CHECK(fb.pieces().back().is_zero());
        for (double t : {0.0, b / 3, b}) CHECK((fb.eval(t) - f.eval(t)).norm() == 0.0);
    }
}

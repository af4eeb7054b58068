#include "lfadapt/classes.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfa;

TEST_CASE("class grammar round-trips") {
    for (const char* s : {"decreasing+lipschitz(alpha=1,M=1)", "lipschitz(alpha=0.5,M=2)",
                          "left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.25,M=3)",
                          "bounded(B=1)+lipschitz(alpha=1,M=1)"}) {
        CHECK(to_string(parse_class(s)) == s);
        CHECK(to_string(parse_class(to_string(parse_class(s)))) == s);
    }
    CHECK(to_string(parse_class(" decreasing + lipschitz(alpha=1, M=1) ")) == "decreasing+lipschitz(alpha=1,M=1)");
}

TEST_CASE("class grammar rejects bad input") {
    CHECK_THROWS_AS(parse_class("lipschitz(alpha=2,M=1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_class("lipschitz(alpha=0.5)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_class("lipschitz(alpha=0.5,M=-1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_class("smooth(alpha=1,M=1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_class("lipschitz(alpha=1,M=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_class(""), std::invalid_argument);
}

TEST_CASE("membership") {
    Grid g = make_grid(33);
    auto F = build_class(parse_class("decreasing+lipschitz(alpha=1,M=1)"), g);
    auto line = [&](double slope) { return FunctionOnGrid::from(g, [=](double t) { return slope * t; }); };
    CHECK(contains(F, line(-1.0), 1e-12));
    CHECK(contains(F, line(-0.3), 1e-12));
    CHECK_FALSE(contains(F, line(-1.1), 1e-12));
    CHECK_FALSE(contains(F, line(0.2), 1e-12));
    CHECK(F.shift_invariant());

    // sqrt-cusp: Hoelder 1/2 with constant 1 but not Lipschitz
    auto cusp = FunctionOnGrid::from(g, [](double t) { return -std::sqrt(std::abs(t)); });
    auto H = build_class(parse_class("lipschitz(alpha=0.5,M=1)"), g, {1.0});
    CHECK(contains(H, cusp, 1e-12));
    CHECK_FALSE(contains(build_class(parse_class("lipschitz(alpha=1,M=1)"), g), cusp, 1e-12));

    auto B = build_class(parse_class("bounded(B=1)+lipschitz(alpha=1,M=1)"), g);
    CHECK_FALSE(B.shift_invariant());
    CHECK(contains(B, line(1.0), 1e-12));
    auto lifted = line(1.0);
    lifted.v.array() += 0.6;
    CHECK_FALSE(contains(B, lifted, 1e-12));
}

TEST_CASE("one-sided classes constrain only their half") {
    Grid g = make_grid(21);
    auto L = build_class(parse_class("left_lipschitz(alpha=1,M=1)"), g);
    // steep on the right, flat on the left
    auto f = FunctionOnGrid::from(g, [](double t) { return t > 0 ? 5 * t : 0.0; });
    CHECK(contains(L, f, 1e-12));
    auto h = FunctionOnGrid::from(g, [](double t) { return t < 0 ? 5 * t : 0.0; });
    CHECK_FALSE(contains(L, h, 1e-12));
}

TEST_CASE("windowed Hoelder families and cutting-plane helpers") {
    Grid g = make_grid(513);  // large enough that far pairs are left to cuts
    auto H = build_class(parse_class("lipschitz(alpha=0.5,M=1)"), g);
    REQUIRE(H.holder.size() == 1);
    CHECK(H.holder[0].window == static_cast<int>(std::ceil(0.25 * 513)));
    CHECK_FALSE(H.base_is_complete());
    auto L = build_class(parse_class("lipschitz(alpha=1,M=1)"), g);
    CHECK(L.base_is_complete());

    // a spike violates far pairs that the base rows do not list
    Eigen::VectorXd v = Eigen::VectorXd::Zero(513);
    v[300] = 3.0;
    std::vector<DiffRow> rows;
    const std::size_t nviol = H.violated_rows(v, 1e-12, 10, rows);
    CHECK(nviol > 0);
    CHECK(rows.size() <= 10);
    for (auto& r : rows) CHECK(v[r.i] - v[r.j] > r.b);
    CHECK(H.max_violation(v) > 0);
}

TEST_CASE("closed-form leading terms") {
    ExampleParams p;  // a1 = 1, a2 = 1/2, M = 1
    const double eps = 1e-3;
    auto f1 = closed_form_modulus(Example::Ex1, Which::F1, p, eps);
    CHECK(f1.value == doctest::Approx(std::cbrt(1.5) * std::pow(eps, 2.0 / 3)));
    CHECK(f1.exponent == doctest::Approx(2.0 / 3));
    auto f12 = closed_form_modulus(Example::Ex1, Which::F12, p, eps);
    CHECK(f12.value == doctest::Approx(std::cbrt(3.0) * std::pow(eps, 2.0 / 3)));
    auto f2 = closed_form_modulus(Example::Ex1, Which::F2, p, eps);
    CHECK(f2.exponent == doctest::Approx(0.5));
    CHECK(f2.value == doctest::Approx(std::pow(1.0, 0.25) * std::sqrt(eps)));

    ExampleParams q;
    q.a1 = 1, q.a2 = 0.25, q.b1 = 0.5, q.b2 = 1;
    CHECK(closed_form_modulus(Example::Ex2, Which::F12, q, eps).exponent == doctest::Approx(0.5));
    ExampleParams r;
    r.b1 = 1, r.b2 = 0.75, r.a1 = 0.5, r.a2 = 0.25;
    CHECK(closed_form_modulus(Example::Ex3, Which::F12, r, eps).exponent == doctest::Approx(1.5 / 2.5));
    CHECK(closed_form_modulus(Example::Ex3, Which::F21, r, eps).exponent == doctest::Approx(2.0 / 3));
    ExampleParams bad;
    bad.a2 = 1.0;
    CHECK_THROWS_AS(closed_form_modulus(Example::Ex1, Which::F1, bad, eps), std::invalid_argument);
}

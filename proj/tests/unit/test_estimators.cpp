#include "lfadapt/estimators.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfa;

namespace {

struct Setup {
    Grid g;
    Functional T;
    explicit Setup(int m) : g(make_grid(m)), T(point_functional(g)) {}
    ConstraintSystem cls(const char* s) const { return build_class(parse_class(s), g); }
};

}  // namespace

TEST_CASE("ordered estimator meets its variance and bias contract") {
    Setup S(65);
    struct Case {
        const char *F, *H;
        double V, n;
    };
    const Case cases[] = {
        {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)", 0.02, 400},
        {"decreasing+lipschitz(alpha=0.5,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 0.01, 1000},
        {"lipschitz(alpha=1,M=1)", "lipschitz(alpha=1,M=1)", 0.005, 2000},
        {"bounded(B=1)+lipschitz(alpha=1,M=1)", "bounded(B=1)+lipschitz(alpha=1,M=1)", 0.001, 100},
    };
    for (auto& c : cases) {
        auto F = S.cls(c.F), H = S.cls(c.H);
        auto e = ordered_estimator(F, H, S.T, c.V, c.n);
        INFO(c.F, " | ", c.H);
        CHECK(e.variance_at(c.n) == doctest::Approx(c.V).epsilon(1e-12));
        auto bf = bias_range(e, F, S.T), bh = bias_range(e, H, S.T);
        CHECK(bf.sup_bias <= e.prov.supval / 2 + 1e-6);
        CHECK(bh.inf_bias >= -e.prov.supval / 2 - 1e-6);
        // the bounds are attained at the extremal pair
        CHECK(e.prov.supval > 0);
        CHECK(e.prov.slope == doctest::Approx(std::sqrt(c.n * c.V)));
        CHECK(e.prov.kind == "ordered");
    }
}

TEST_CASE("ordered estimator input checks") {
    Setup S(33);
    auto F = S.cls("lipschitz(alpha=1,M=1)");
    CHECK_THROWS_AS(ordered_estimator(F, F, S.T, -1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(ordered_estimator(F, F, S.T, 0.01, 0), std::invalid_argument);
    // s = sqrt(nV) <= 1 cannot control the constant direction
    CHECK_THROWS_AS(ordered_estimator(F, F, S.T, 0.5 / 100, 100), std::invalid_argument);
    auto other = build_class(parse_class("lipschitz(alpha=1,M=1)"), make_grid(17));
    CHECK_THROWS(ordered_estimator(F, other, S.T, 0.05, 100));
}

TEST_CASE("minimax affine risk is optimal along the slope and sandwiched by the modulus") {
    Setup S(129);
    for (const char* spec : {"lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)"}) {
        auto F = S.cls(spec);
        const double n = 4096;
        auto e = minimax_affine(F, S.T, n);
        auto risk = [&](const AffineEstimator& a) {
            return 0.25 * a.prov.supval * a.prov.supval + a.variance_at(n);
        };
        const double r0 = risk(e);
        for (double f : {0.8, 1.25}) {
            const double s = f * e.prov.slope;
            auto alt = ordered_estimator(F, F, S.T, s * s / n, n);
            CHECK(risk(alt) >= r0 * (1 - 1e-4));
        }
        const double w = usual_modulus(F, S.T, 1 / std::sqrt(n)).value;
        INFO(spec);
        CHECK(r0 <= w * w);
        CHECK(r0 >= w * w / 8);
        auto b = bias_range(e, F, S.T);
        CHECK(b.sup_bias == doctest::Approx(e.prov.supval / 2).epsilon(1e-5));
        CHECK(b.inf_bias == doctest::Approx(-e.prov.supval / 2).epsilon(1e-5));
        CHECK(e.prov.kind == "minimax");
    }
}

TEST_CASE("constant families: bounded class with zero slope") {
    // lipschitz with a tiny constant plus a box behaves like the constants
    Setup S(33);
    auto C = S.cls("bounded(B=1)+lipschitz(alpha=1,M=0.001)");
    auto e = minimax_affine(C, S.T, 100);
    // estimating a constant from n = 100: risk close to 1/n (the sample mean)
    const double r = 0.25 * e.prov.supval * e.prov.supval + e.variance_at(100);
    CHECK(r <= 1.0 / 100 * 1.05);
    CHECK(r >= 1.0 / 100 * 0.5);
}

TEST_CASE("structural nesting") {
    Setup S(65);
    auto A = S.cls("decreasing+lipschitz(alpha=1,M=1)");
    auto B = S.cls("decreasing+lipschitz(alpha=0.5,M=1)");
    auto C = S.cls("lipschitz(alpha=1,M=2)");
    auto L = S.cls("left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.5,M=1)");
    auto R = S.cls("left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=1,M=1)");
    CHECK(structurally_nested(A, B));
    CHECK_FALSE(structurally_nested(B, A));
    CHECK(structurally_nested(A, C));
    CHECK_FALSE(structurally_nested(C, A));
    CHECK_FALSE(structurally_nested(L, R));
    CHECK_FALSE(structurally_nested(R, L));
    auto Bx = S.cls("bounded(B=1)+lipschitz(alpha=1,M=1)");
    auto By = S.cls("bounded(B=2)+lipschitz(alpha=1,M=1)");
    CHECK(structurally_nested(Bx, By));
    CHECK_FALSE(structurally_nested(By, Bx));
}

TEST_CASE("hull relaxation contains both classes") {
    Setup S(65);
    auto L = S.cls("left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.5,M=1)");
    auto R = S.cls("left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=1,M=1)");
    auto H = hull_relaxation(L, R);
    for (double eps : {0.02, 0.1}) {
        auto lr = ordered_modulus(L, R, S.T, eps), rl = ordered_modulus(R, L, S.T, eps);
        for (auto* f : {&lr.f_star, &lr.g_star, &rl.f_star, &rl.g_star}) CHECK(contains(H, *f, 1e-9));
    }
    CHECK(structurally_nested(L, H));
    CHECK(structurally_nested(R, H));
}

TEST_CASE("union minimax") {
    Setup S(65);
    auto A = S.cls("decreasing+lipschitz(alpha=1,M=1)");
    auto B = S.cls("decreasing+lipschitz(alpha=0.5,M=1)");
    auto single = union_minimax({&A}, S.T, 1000);
    auto direct = minimax_affine(A, S.T, 1000);
    CHECK(single.w == direct.w);
    CHECK(single.c0 == direct.c0);

    UnionCertificate cert;
    auto u = union_minimax({&A, &B}, S.T, 1000, {}, &cert);
    CHECK(cert.nested);
    CHECK(cert.outer == 1);
    CHECK(u.prov.kind == "union");

    auto L = S.cls("left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.5,M=1)");
    auto R = S.cls("left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=1,M=1)");
    auto h = union_minimax({&L, &R}, S.T, 1000, {}, &cert);
    CHECK_FALSE(cert.nested);
    CHECK(cert.hull_ratio >= 1.0 - 1e-9);
    const double eps = 1 / std::sqrt(1000.0);
    CHECK(union_modulus({&L, &R}, S.T, eps) ==
          doctest::Approx(std::max({usual_modulus(L, S.T, eps).value, usual_modulus(R, S.T, eps).value,
                                    ordered_modulus(L, R, S.T, eps).value, ordered_modulus(R, L, S.T, eps).value})));
    (void)h;
}

TEST_CASE("gaussian fourth moment") {
    CHECK(gaussian_fourth_moment(0, 1) == doctest::Approx(3));
    CHECK(gaussian_fourth_moment(1, 0) == doctest::Approx(1));
    CHECK(gaussian_fourth_moment(1, 1) == doctest::Approx(10));
    CHECK(gaussian_fourth_moment(2, 0.5) == doctest::Approx(16 + 6 * 4 * 0.5 + 3 * 0.25));
}

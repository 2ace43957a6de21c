#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "msqi/multiscale.hpp"

using namespace msqi;

namespace {

const Domain kOmega(-0.95, 0.95, -0.95, 0.95);

double shepard_oracle(const PointSet& ps, const std::vector<double>& vals, const Vec2& x,
                      double delta) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double r = (x - ps.sites()[i]).norm() / delta;
        if (r < 1.0) {
            const double w = wendland_31(r);
            num += w * vals[i];
            den += w;
        }
    }
    return num / den;
}

}  // namespace

TEST_CASE("one-level model equals the direct operator bitwise") {
    auto seq = build_level_sequence(kOmega, 0.375, 0.8, 3.0, 1);
    const ScalarField f = [](const Vec2& p) { return std::sin(p.x()) + p.y(); };
    auto model = multiscale_fit(f, seq);

    std::vector<double> vals(seq.levels[0]->size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(seq.levels[0]->sites()[i]);
    QuasiInterpolant direct(seq.levels[0], vals, seq.support_radii[0]);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 1000; ++k) {
        const Vec2 x(u(rng), u(rng));
        CHECK(model.evaluate(x) == direct.try_evaluate(x));
    }
}

TEST_CASE("constant functions collapse the correction stack") {
    auto seq = build_level_sequence(kOmega, 0.375, 0.8, 3.0, 3);
    auto model = multiscale_fit([](const Vec2&) { return 4.25; }, seq);
    // residual values vanish identically from level 2 on
    for (std::size_t j = 1; j < model.size(); ++j)
        for (double r : model.corrections()[j].values())
            CHECK(std::abs(r) <= 1e-12);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 100; ++k)
        CHECK(model.evaluate({u(rng), u(rng)}) == Catch::Approx(4.25).margin(1e-11));
}

TEST_CASE("two-level recursion matches a hand unroll on a toy set") {
    auto sites = std::make_shared<PointSet>(
        std::vector<Vec2>{{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}}, Domain(-1, 1, -1, 1), 0.05);
    LevelSequence seq;
    seq.levels = {sites, sites};
    seq.nominal_h = {0.5, 0.25};
    seq.support_radii = {2.0, 1.0};
    seq.mu = 0.5;
    seq.nu = 4.0;

    const ScalarField f = [](const Vec2& p) { return 1.0 + 2.0 * p.x() + 4.0 * p.y(); };
    auto model = multiscale_fit(f, seq);

    std::vector<double> fv(3), resid(3);
    for (std::size_t i = 0; i < 3; ++i) fv[i] = f(sites->sites()[i]);
    for (std::size_t i = 0; i < 3; ++i)
        resid[i] = fv[i] - shepard_oracle(*sites, fv, sites->sites()[i], 2.0);

    for (const Vec2 x : {Vec2(0.1, 0.1), Vec2(0.0, 0.0), Vec2(0.3, 0.2)}) {
        const double want =
            shepard_oracle(*sites, fv, x, 2.0) + shepard_oracle(*sites, resid, x, 1.0);
        CHECK(model.evaluate(x) == Catch::Approx(want).margin(1e-13));
    }
}

TEST_CASE("telescoping identity at the sites of each level") {
    auto seq = build_level_sequence(kOmega, 0.375, 0.8, 3.0, 3);
    const ScalarField f = [](const Vec2& p) {
        return 5.0 * std::exp(-p.x() * p.x() - p.y() * p.y());
    };
    auto model = multiscale_fit(f, seq);
    for (std::size_t j = 1; j <= model.size(); ++j) {
        const auto& sites = model.corrections()[j - 1].sites();
        for (std::size_t i = 0; i < sites.size(); i += 7) {
            const Vec2& x = sites.sites()[i];
            const double fj = model.evaluate(x, j);
            const double fj1 = model.evaluate(x, j - 1);
            const double sj = model.corrections()[j - 1].try_evaluate(x);
            REQUIRE(std::abs(fj - fj1 - sj) <= 1e-12);
        }
    }
}

TEST_CASE("linf error metric") {
    const ScalarField f = [](const Vec2& p) { return std::sin(p.x()) * p.y(); };
    const Domain R(-0.5, 0.5, -0.5, 0.5);

    SECTION("identical fields give zero") {
        auto e = linf_error(f, f, R, 0.02);
        CHECK(e.linf == 0.0);
        for (double v : e.values) CHECK(v == 0.0);
    }
    SECTION("constant offset is recovered exactly") {
        const ScalarField g = [&](const Vec2& p) { return f(p) + 0.3; };
        auto e = linf_error(g, f, R, 0.02);
        CHECK(e.linf == Catch::Approx(0.3).margin(1e-14));
    }
    SECTION("grid nodes are x_min + i*h, half open") {
        auto e = linf_error(f, f, Domain(0, 1, 0, 1), 0.3);
        CHECK(e.grid.nx == 4);  // 0, 0.3, 0.6, 0.9
        CHECK(e.grid.node(3, 0).x() == Catch::Approx(0.9));
    }
    SECTION("holes in coverage are an error") {
        auto far = std::make_shared<PointSet>(std::vector<Vec2>{{5.0, 5.0}},
                                              Domain(-1, 6, -1, 6), 0.5);
        QuasiInterpolant sparse(far, {1.0}, 0.2);
        const ScalarField a = [&](const Vec2& p) { return sparse.try_evaluate(p); };
        CHECK_THROWS_AS(linf_error(a, f, R, 0.1), EmptyNeighborhoodError);
    }
}

TEST_CASE("default evaluation rectangle") {
    // nominal rule: inset by delta_1; capped so wide supports never produce
    // an empty rectangle
    const Domain r1 = default_eval_rectangle(kOmega, 0.1);
    CHECK(r1.x_min == Catch::Approx(-0.85));
    const Domain r2 = default_eval_rectangle(kOmega, 1.3125);
    CHECK(r2.x_min == Catch::Approx(-0.475));
    CHECK(r2.x_max == Catch::Approx(0.475));
}

TEST_CASE("multiscale error decays monotonically for the gaussian bump") {
    auto seq = build_level_sequence(kOmega, 0.375, 0.8, 3.0, 5);
    const ScalarField h = [](const Vec2& p) {
        return 5.0 * std::exp(-p.x() * p.x() - p.y() * p.y());
    };
    auto model = multiscale_fit(h, seq);
    const Domain R = default_eval_rectangle(kOmega, seq.support_radii[0]);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= 5; ++j) {
        auto e = linf_error(model.field(j), h, R, 0.05);
        CHECK(e.linf < prev);
        prev = e.linf;
    }
}

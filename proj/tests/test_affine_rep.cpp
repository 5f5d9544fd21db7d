#include "doctest.h"

#include "oracles.hpp"

#include <random>

using namespace gbsde;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}

std::vector<GeneratorSpec> lipschitz_members(int d) {
    return {generators::zero(d), generators::constant(-0.75, d),
            generators::affine(0.5, 0.3, Vec::Constant(d, -0.4)), generators::mu_norm(1.0, d),
            generators::mu_abs_z(0.5, d)};
}

} // namespace

TEST_CASE("grid construction") {
    const GridConfig cfg = GridConfig::uniform(1, 1.0, 0.5, false);
    const ControlGrids g = ControlGrids::resolve(cfg, 1);
    CHECK(g.alpha.rows() == 2);
    CHECK(g.alpha.cols() == 25);
    CHECK(g.alpha.col(0) == vec({-1.0, -1.0}));
    CHECK(g.alpha.col(1) == vec({-1.0, -0.5}));
    CHECK(g.beta.colwise().norm().maxCoeff() <= 1.0 + 1e-12);
    // scaled integer points of the unit disc at resolution 2: 13 points
    CHECK(g.beta.cols() == 13);

    GridConfig bad = cfg;
    bad.alpha_step = 0.0;
    CHECK_THROWS_AS(bad.validate(1), InvalidArgument);
    bad = cfg;
    bad.beta_resolution = 0;
    CHECK_THROWS_AS(bad.validate(1), InvalidArgument);
    bad = cfg;
    bad.alpha_hi(0) = -2.0;
    CHECK_THROWS_AS(bad.validate(1), InvalidArgument);
    CHECK_THROWS_AS(cfg.validate(2), InvalidArgument);
}

TEST_CASE("big_F examples") {
    const GeneratorSpec zero = generators::zero();
    const Vec a = vec({1.5, -2.0});
    const Vec b = vec({0.6, 0.8});
    CHECK(big_F(zero, 0.0, b, a) == 0.0);  // c_rep = 0
    const GeneratorSpec z1 = with_rep_constant(generators::zero(), 2.0);
    CHECK(big_F(z1, 0.0, b, a) == doctest::Approx(-2.0 * (0.9 - 1.6)));

    const GeneratorSpec m = generators::mu_abs_z(1.0);
    CHECK(big_F(m, 0.0, vec({0.0, 1.0}), vec({0.0, 2.0})) == doctest::Approx(2.0 - 2.0 * std::sqrt(2.0)));
    CHECK(big_F(m, 0.0, vec({0.0, 1.0}), vec({0.0, 2.0})) == doctest::Approx(-0.828).epsilon(1e-3));

    const GeneratorSpec n = generators::mu_norm(1.3);
    CHECK(big_F(n, 0.4, vec({0.0, 0.0}), a) == n.at_point(0.4, a));
    CHECK_THROWS_AS(big_F(n, 0.0, vec({1.0, 0.1}), a), InvalidArgument);
}

TEST_CASE("minmax_eval examples") {
    const GridConfig adaptive = GridConfig::uniform(1, 3.0, 0.5, true);
    CHECK(minmax_eval(generators::zero(), 0.0, vec({1.0, -2.0}), adaptive) == 0.0);

    const GeneratorSpec aff = generators::affine(0.5, 0.3, Vec::Constant(1, -0.4));
    CHECK(minmax_eval(aff, 0.0, vec({1.2, 0.7}), adaptive) == aff.at_point(0.0, vec({1.2, 0.7})));
    // without injection: exact once x and b / C sit on the grids
    const GeneratorSpec aff2 = with_rep_constant(generators::affine(0.5, 0.3, Vec::Constant(1, 0.4)), 0.5);
    GridConfig plain = adaptive;
    plain.adaptive = false;
    plain.beta_resolution = 5;
    CHECK(std::abs(minmax_eval(aff2, 0.0, vec({1.0, 0.5}), plain) - aff2.at_point(0.0, vec({1.0, 0.5}))) < 1e-12);
    CHECK(minmax_eval(aff2, 0.0, vec({1.2, 0.7}), plain) <= aff2.at_point(0.0, vec({1.2, 0.7})) + 1e-12);

    const GeneratorSpec m = generators::mu_abs_z(1.0);
    const Vec x = vec({0.0, 2.0});
    CHECK(minmax_eval(m, 0.0, x, adaptive) == 2.0);
    CHECK(std::abs(oracle::literal_minmax(m, 0.0, x, ControlGrids::resolve(adaptive, 1)) - 2.0) < 1e-12);
}

TEST_CASE("identity with adaptive grids, cross-checked against the literal scan") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int d = 1; d <= 2; ++d) {
        const GridConfig cfg = GridConfig::uniform(d, 3.0, 1.0, true);
        const ControlGrids grids = ControlGrids::resolve(cfg, d);
        for (const auto& g : lipschitz_members(d)) {
            for (int i = 0; i < 40; ++i) {
                Vec x(d + 1);
                for (int j = 0; j <= d; ++j)
                    x(j) = u(rng);
                const double t = 0.5 * (u(rng) + 3.0) / 3.0;
                const MinMaxResult r = minmax_eval_detail(g, t, x, grids);
                CHECK(std::abs(r.value - g.at_point(t, x)) <= 1e-12);
                CHECK(r.alpha_index == -1);  // the maximiser is the injected alpha = x
                CHECK(std::abs(oracle::literal_minmax(g, t, x, grids) - g.at_point(t, x)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("uniform grids stay inside the error envelope") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double h : {0.5, 0.25}) {
        GridConfig cfg = GridConfig::uniform(1, 3.0, h, false);
        const ControlGrids grids = ControlGrids::resolve(cfg, 1);
        for (const auto& g : lipschitz_members(1)) {
            for (int i = 0; i < 30; ++i) {
                const Vec x = vec({u(rng), u(rng)});
                const double err = std::abs(minmax_eval_detail(g, 0.0, x, grids).value - g.at_point(0.0, x));
                CHECK(err <= 2.0 * g.c_rep * h * (1.0 + x.norm()));
                CHECK(std::abs(minmax_eval_detail(g, 0.0, x, grids).value - oracle::literal_minmax(g, 0.0, x, grids)) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("monotone in the grids by set inclusion") {
    const GeneratorSpec g = generators::mu_norm(1.0);
    const Vec x = vec({0.37, -1.21});
    // alpha grid of step 0.5 contains the grid of step 1.0 on the same box
    GridConfig coarse = GridConfig::uniform(1, 2.0, 1.0, false);
    GridConfig fine = coarse;
    fine.alpha_step = 0.5;
    CHECK(minmax_eval(g, 0.0, x, fine) >= minmax_eval(g, 0.0, x, coarse));
    // beta resolution 4 contains resolution 2
    GridConfig rb = coarse;
    rb.beta_resolution = 2;
    GridConfig rb2 = coarse;
    rb2.beta_resolution = 4;
    CHECK(minmax_eval(g, 0.0, x, rb2) <= minmax_eval(g, 0.0, x, rb));
}

TEST_CASE("tie-breaking picks the lowest index") {
    // zero generator with zero Euclidean constant: every pair ties at 0
    const ControlGrids grids = ControlGrids::resolve(GridConfig::uniform(1, 1.0, 0.5, false), 1);
    const MinMaxResult r = minmax_eval_detail(generators::zero(), 0.0, vec({0.3, 0.1}), grids);
    CHECK(r.alpha_index == 0);
    CHECK(r.beta_index == 0);
}

TEST_CASE("reversed scan is a diagnostic upper bound") {
    const GeneratorSpec g = generators::mu_norm(1.0);
    const ControlGrids grids = ControlGrids::resolve(GridConfig::uniform(1, 2.0, 0.5, false), 1);
    const Vec x = vec({0.4, -0.6});
    const double maxmin = minmax_eval_detail(g, 0.0, x, grids).value;
    const double minmax = minmax_scan_reversed([&](const Vec& a) { return g.at_point(0.0, a); }, g.c_rep, x, grids);
    CHECK(minmax >= maxmin - 1e-12);
}

TEST_CASE("fenchel_transform examples") {
    const GeneratorSpec g = generators::neg_mu_abs_z(1.0);
    const SupGrid sup;
    CHECK(fenchel_transform(g, 0.0, vec({0.0, 0.5}), sup) == 0.0);
    CHECK(std::isinf(fenchel_transform(g, 0.0, vec({0.0, 2.0}), sup)));
    CHECK(std::isinf(fenchel_transform(g, 0.0, vec({1.0, 0.0}), sup)));
    CHECK(fenchel_transform(g, 0.0, vec({0.0, -1.0}), sup) == 0.0);
    CHECK(fenchel_transform(generators::constant(2.0), 0.0, vec({0.0, 0.0}), sup) == 2.0);
    CHECK(std::isinf(fenchel_transform(generators::constant(2.0), 0.0, vec({0.0, 0.1}), sup)));
}

TEST_CASE("inf representation examples") {
    const GeneratorSpec g = generators::neg_mu_abs_z(1.0);
    const Mat cand = box_points(vec({0.0, -1.0}), vec({0.0, 1.0}), vec({1.0, 0.01}));
    const FenchelDual dual = make_fenchel_dual(g, 0.0, cand, SupGrid{});
    CHECK(dual.size() == 201);
    CHECK(std::abs(inf_representation_eval(dual, 0.0, Vec::Constant(1, 2.0)).value + 2.0) < 1e-12);
    CHECK(inf_representation_eval(dual, 0.0, Vec::Constant(1, 0.0)).value == 0.0);

    const FenchelDual c = make_fenchel_dual(generators::constant(1.5), 0.0, box_points(vec({-1, -1}), vec({1, 1}), vec({1, 1})),
                                            SupGrid{});
    CHECK(c.size() == 1);
    CHECK(inf_representation_eval(c, 3.0, Vec::Constant(1, -4.0)).value == 1.5);
    CHECK_THROWS_AS(inf_representation_eval(FenchelDual{}, 0.0, Vec::Zero(1)), InvalidArgument);
}

TEST_CASE("concave consistency of the inf representation") {
    const GeneratorSpec g = generators::neg_mu_abs_z(0.7);
    const double step = 0.05;
    const Mat cand = box_points(vec({0.0, -1.0}), vec({0.0, 1.0}), vec({1.0, step}));
    const FenchelDual dual = make_fenchel_dual(g, 0.0, cand, SupGrid{});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double y = u(rng);
        const Vec z = Vec::Constant(1, u(rng));
        const double err = std::abs(inf_representation_eval(dual, y, z).value - g(0.0, y, z));
        CHECK(err <= step * (std::abs(y) + z.norm() + 1.0));
    }
}

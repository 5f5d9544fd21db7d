#include "doctest.h"

#include "oracles.hpp"

using namespace gbsde;

namespace {

BSDEProblem reflected(const GeneratorSpec& g, const NodeField& xi, std::vector<NodeField> s) { return {g, xi, std::move(s)}; }

} // namespace

TEST_CASE("solve_rbsde examples") {
    const Lattice l = Lattice::build(1.0, 16, 1);
    const GeneratorSpec g = generators::mu_norm(1.0);
    const NodeField xi = terminals::bt_squared(l, 16);

    const SolutionField inactive = solve_rbsde(reflected(g, xi, obstacles::linear(l, 16, -1e9, 0.0)), l);
    CHECK(max_gap(inactive, solve_bsde({g, xi, std::nullopt}, l)) == 0.0);
    for (const auto& a : inactive.a)
        CHECK(a.values.cwiseAbs().maxCoeff() == 0.0);

    const SolutionField snell = solve_rbsde(reflected(generators::zero(), l.constant(16, 0.0), obstacles::linear(l, 16, 1.0, -1.0)), l);
    CHECK(snell.root() == 1.0);

    const NodeField put = terminals::put(l, 16, 1.0);
    const BSDEProblem am = reflected(generators::zero(), put, obstacles::put_payoff(l, 16, 1.0));
    const SolutionField r = solve_rbsde(am, l);
    const StoppingResult st = linear_optimal_stopping(ControlPolicy::zero(l, 16), am, l, 0.0);
    CHECK(max_gap(r, st.solution) == 0.0);
    // no drift and a convex payoff: early exercise is worthless
    CHECK(std::abs(r.root() - l.level_probabilities(16).dot(put.values)) < 1e-14);
}

TEST_CASE("obstacle validation") {
    const Lattice l = Lattice::build(1.0, 4, 1);
    const BSDEProblem bad = reflected(generators::zero(), l.constant(4, 0.0), obstacles::linear(l, 4, 1.0, 0.0));
    CHECK_THROWS_AS(solve_rbsde(bad, l), ObstacleViolation);
    CHECK_THROWS_AS(mixed_game_dpp(bad, l, GridConfig::uniform(1, 1.0, 0.5, true)), ObstacleViolation);
    auto short_s = obstacles::linear(l, 3, -1.0, 0.0);
    CHECK_THROWS(solve_rbsde(reflected(generators::zero(), l.constant(4, 0.0), short_s), l));
}

TEST_CASE("Skorokhod conditions hold exactly") {
    const Lattice l = Lattice::build(1.0, 16, 1);
    for (const auto& g : {generators::zero(), generators::mu_norm(1.0), generators::neg_mu_abs_z(0.5)}) {
        const BSDEProblem p = reflected(g, terminals::put(l, 16, 1.0), obstacles::put_payoff(l, 16, 1.0));
        const SolutionField s = solve_rbsde(p, l);
        const SkorokhodReport rep = skorokhod_report(s, p);
        CHECK(rep.pass());
        CHECK(rep.complementarity == 0.0);
        CHECK(rep.min_excess >= 0.0);
        CHECK(rep.min_increment >= 0.0);
    }
}

TEST_CASE("monotone in the obstacle") {
    const Lattice l = Lattice::build(1.0, 16, 1);
    const GeneratorSpec g = generators::mu_norm(1.0);
    const NodeField xi = terminals::put(l, 16, 1.0);
    const SolutionField lo = solve_rbsde(reflected(g, xi, obstacles::put_payoff(l, 16, 0.5)), l);
    const SolutionField hi = solve_rbsde(reflected(g, xi, obstacles::put_payoff(l, 16, 1.0)), l);
    for (int k = 0; k <= 16; ++k)
        CHECK((hi.y[static_cast<std::size_t>(k)].values - lo.y[static_cast<std::size_t>(k)].values).minCoeff() >= 0.0);
}

TEST_CASE("linear optimal stopping examples") {
    const Lattice l = Lattice::build(1.0, 8, 1);
    const NodeField xi = terminals::call(l, 8, 0.0);
    const ControlPolicy z = ControlPolicy::zero(l, 8);

    const StoppingResult never = linear_optimal_stopping(z, reflected(generators::zero(), xi, obstacles::linear(l, 8, -1e9, 0.0)), l, 0.0);
    CHECK(never.policy.region_size() == 0);
    NodeField e = xi;
    while (e.level > 0)
        e = cond_expect(e, l);
    CHECK(never.solution.root() == doctest::Approx(e.values(0)).epsilon(1e-15));

    const StoppingResult now =
        linear_optimal_stopping(z, reflected(generators::zero(), l.constant(8, 0.0), obstacles::linear(l, 8, 1.0, -1.0)), l, 0.0);
    CHECK(now.solution.root() == 1.0);
    CHECK(now.policy.stops(0, 0));

    const GeneratorSpec c = generators::constant(0.25);
    const StoppingResult drift = linear_optimal_stopping(z, reflected(c, xi, obstacles::linear(l, 8, -1e9, 0.0)), l, c.c_rep);
    CHECK(std::abs(drift.solution.root() - (e.values(0) + 0.25)) < 1e-14);
}

TEST_CASE("stopped payoff under the returned policy, with path enumeration") {
    const Lattice l = Lattice::build(1.0, 8, 1);
    const GeneratorSpec g = generators::mu_norm(1.0);
    const BSDEProblem p = reflected(g, terminals::put(l, 8, 0.8), obstacles::put_payoff(l, 8, 0.8));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ControlPolicy ctrl = ControlPolicy::random(l, 8, 1.5, seed);
        const StoppingResult st = linear_optimal_stopping(ctrl, p, l, g.c_rep);
        for (int t : {0, 3}) {
            const NodeField v = stopped_value(ctrl, p, l, st.policy, t, g.c_rep);
            CHECK(oracle::max_abs_diff(v.values, st.value(t).values) <= 1e-12);
            CHECK(oracle::max_abs_diff(oracle::stopped_by_paths(ctrl, p, l, st.policy, t, g.c_rep), st.value(t).values) <= 1e-12);
        }
        // flipping any single decision never helps
        for (int k = 0; k < 8; ++k)
            for (Index n = 0; n < l.level_size(k); ++n) {
                StoppingPolicy flipped = st.policy;
                flipped.stop[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = !st.policy.stops(k, n);
                CHECK(stopped_value(ctrl, p, l, flipped, 0, g.c_rep).values(0) <= st.solution.root() + 1e-12);
            }
    }
}

TEST_CASE("mixed game equals the reflected solution") {
    const Lattice l = Lattice::build(1.0, 16, 1);
    const GridConfig cfg = GridConfig::uniform(1, 2.0, 0.5, true);
    const GeneratorSpec m = generators::mu_abs_z(1.0);

    const BSDEProblem inactive = reflected(m, terminals::bt(l, 16), obstacles::linear(l, 16, -1e9, 0.0));
    const GameResult gi = mixed_game_dpp(inactive, l, cfg);
    CHECK(gi.gap_to_primal <= 1e-12);
    CHECK(max_gap(gi.solution, game_dpp_value({m, terminals::bt(l, 16), std::nullopt}, l, cfg).solution) <= 1e-12);
    CHECK(gi.stopping->region_size() == 0);

    const BSDEProblem below = reflected(m, terminals::bt(l, 16),
                                        obstacles::from_function(l, 16, [](double, const Vec& b) { return b(0) - 2.0; }));
    const GameResult gb = mixed_game_dpp(below, l, cfg);
    CHECK(gb.gap_to_primal <= 1e-12);
    for (const auto& a : gb.solution.a)
        CHECK(a.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(gb.root() - 1.0) <= 1e-12);

    const BSDEProblem am = reflected(generators::zero(), terminals::put(l, 16, 1.0), obstacles::put_payoff(l, 16, 1.0));
    const GameResult ga = mixed_game_dpp(am, l, cfg);
    CHECK(ga.gap_to_primal <= 1e-12);
    CHECK(std::abs(ga.root() - solve_rbsde(am, l).root()) <= 1e-12);
    CHECK(ga.stopping->region_size() > 0);
    CHECK(skorokhod_report(ga.solution, am).pass());
}

TEST_CASE("mixed game rejects a plain problem") {
    const Lattice l = Lattice::build(1.0, 4, 1);
    CHECK_THROWS_AS(mixed_game_dpp({generators::zero(), terminals::bt(l, 4), std::nullopt}, l, GridConfig::uniform(1, 1.0, 0.5, true)),
                    InvalidArgument);
}

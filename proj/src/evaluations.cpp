#include "gamebsde/evaluations.hpp"

#include "gamebsde/errors.hpp"

#include <algorithm>
#include <random>

namespace gbsde {

namespace {

void check_levels(const EvaluationOperator& op, int s, int t) {
    if (s < 0 || s > t || t > op.lattice.steps())
        throw LevelMismatch("evaluation levels must satisfy 0 <= s <= t <= N");
}

NodeField random_field(const Lattice& lat, int level, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    NodeField f{level, Vec(lat.level_size(level))};
    for (Index n = 0; n < f.values.size(); ++n)
        f.values(n) = u(rng);
    return f;
}

struct LevelTriple {
    int r;
    int s;
    int t;
};

LevelTriple draw_levels(int steps, std::mt19937_64& rng) {
    const int t = std::uniform_int_distribution<int>(0, steps)(rng);
    const int s = std::uniform_int_distribution<int>(0, t)(rng);
    const int r = std::uniform_int_distribution<int>(0, s)(rng);
    return {r, s, t};
}

double positive_part_max(const Vec& v) {
    return std::max(0.0, v.maxCoeff());
}

} // namespace

NodeField evaluate(const EvaluationOperator& op, int s, int t, const NodeField& x) {
    check_levels(op, s, t);
    if (x.level != t)
        throw LevelMismatch("evaluate: terminal field must live at level t");
    const SolutionField sol = solve_bsde(BSDEProblem{op.generator, x, std::nullopt}, op.lattice);
    return sol.y[static_cast<std::size_t>(s)];
}

double AxiomReport::worst() const {
    return std::max({monotonicity, identity, recursivity, locality});
}

AxiomReport check_axioms(const EvaluationOperator& op, int samples, std::uint64_t seed) {
    const Lattice& lat = op.lattice;
    AxiomReport rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.step_ok = comparison_step_ok(lat, op.generator.c_l1);

    for (int i = 0; i < samples; ++i) {
        // Independent stream per sample.
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
        const auto [r, s, t] = draw_levels(lat.steps(), rng);
        const NodeField x1 = random_field(lat, t, rng);

        NodeField x2 = x1;
        std::uniform_real_distribution<double> gap(0.0, 1.0);
        for (Index n = 0; n < x2.values.size(); ++n)
            x2.values(n) -= gap(rng);
        const NodeField e1 = evaluate(op, s, t, x1);
        const NodeField e2 = evaluate(op, s, t, x2);
        rep.monotonicity = std::max(rep.monotonicity, positive_part_max(e2.values - e1.values));

        rep.identity = std::max(rep.identity, (evaluate(op, t, t, x1).values - x1.values).cwiseAbs().maxCoeff());

        const NodeField nested = evaluate(op, r, s, e1);
        const NodeField direct = evaluate(op, r, t, x1);
        rep.recursivity = std::max(rep.recursivity, (nested.values - direct.values).cwiseAbs().maxCoeff());

        std::vector<bool> in_a(static_cast<std::size_t>(lat.level_size(s)));
        std::bernoulli_distribution coin(0.5);
        for (std::size_t n = 0; n < in_a.size(); ++n)
            in_a[n] = coin(rng);
        const std::vector<bool> cone = lat.cone(s, in_a, t);
        NodeField masked = x1;
        for (Index n = 0; n < masked.values.size(); ++n)
            if (!cone[static_cast<std::size_t>(n)])
                masked.values(n) = 0.0;
        const NodeField em = evaluate(op, s, t, masked);
        for (Index n = 0; n < em.values.size(); ++n)
            if (in_a[static_cast<std::size_t>(n)])
                rep.locality = std::max(rep.locality, std::abs(e1.values(n) - em.values(n)));
    }
    return rep;
}

double DominationReport::worst() const {
    return std::max({increment, lower, upper});
}

DominationReport check_domination(const EvaluationOperator& op, double mu, const std::function<double(double)>& g0,
                                  int samples, std::uint64_t seed) {
    const Lattice& lat = op.lattice;
    const int d = lat.dim();
    DominationReport rep;
    rep.mu = mu;
    rep.samples = samples;
    rep.seed = seed;
    rep.lipschitz_estimate = estimate_lipschitz(op.generator, SampleBox::cube(d, 3.0, lat.horizon()), 4000, seed);

    const EvaluationOperator dom{generators::mu_norm(mu, d), lat};
    const EvaluationOperator upper{
        generators::custom("g0_plus_gmu", d,
                           [mu, g0](double t, double y, const Vec& z) { return g0(t) + mu * (std::abs(y) + z.norm()); },
                           mu),
        lat};
    const EvaluationOperator lower{
        generators::custom("g0_minus_gmu", d,
                           [mu, g0](double t, double y, const Vec& z) { return g0(t) - mu * (std::abs(y) + z.norm()); },
                           mu),
        lat};

    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
        const auto levels = draw_levels(lat.steps(), rng);
        const int s = levels.s;
        const int t = levels.t;
        const NodeField x1 = random_field(lat, t, rng);
        const NodeField x2 = random_field(lat, t, rng);
        const NodeField diff{t, x1.values - x2.values};
        const Vec lhs = evaluate(op, s, t, x1).values - evaluate(op, s, t, x2).values;
        const Vec rhs = evaluate(dom, s, t, diff).values;
        rep.increment = std::max(rep.increment, positive_part_max(lhs - rhs));

        const NodeField zero = lat.constant(t, 0.0);
        const Vec e0 = evaluate(op, s, t, zero).values;
        rep.lower = std::max(rep.lower, positive_part_max(evaluate(lower, s, t, zero).values - e0));
        rep.upper = std::max(rep.upper, positive_part_max(e0 - evaluate(upper, s, t, zero).values));
    }
    return rep;
}

NodeField dual_representation(const EvaluationOperator& op, int s, int t, const NodeField& xi,
                              const GridConfig& grids) {
    check_levels(op, s, t);
    if (xi.level != t)
        throw LevelMismatch("dual_representation: terminal field must live at level t");
    const GameResult g = game_dpp_value(BSDEProblem{op.generator, xi, std::nullopt}, op.lattice, grids);
    return g.value(s);
}

} // namespace gbsde

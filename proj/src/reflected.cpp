#include "gamebsde/reflected.hpp"

#include "gamebsde/errors.hpp"

#include <algorithm>
#include <limits>

namespace gbsde {

namespace {

void require_obstacle(const BSDEProblem& p) {
    if (!p.obstacle)
        throw InvalidArgument("reflected solvers need an obstacle");
}

} // namespace

SolutionField solve_rbsde(const BSDEProblem& p, const Lattice& lat) {
    require_obstacle(p);
    lat.check_field(p.terminal);
    validate_obstacle(p, lat);
    const GeneratorSpec& g = p.generator;
    const int last = p.terminal.level;

    SolutionField sol;
    sol.y.resize(static_cast<std::size_t>(last) + 1);
    sol.z.resize(static_cast<std::size_t>(last));
    sol.a.resize(static_cast<std::size_t>(last) + 1);
    sol.y[static_cast<std::size_t>(last)] = p.terminal;
    sol.a[static_cast<std::size_t>(last)] = lat.constant(last, 0.0);
    if (!comparison_step_ok(lat, g.c_l1))
        sol.warnings.push_back("time step above the comparison threshold: the scheme may not be monotone");

    for (int k = last - 1; k >= 0; --k) {
        const auto& next = sol.y[static_cast<std::size_t>(k) + 1];
        NodeField y = cond_expect(next, lat);
        VectorField z = extract_z(next, lat);
        NodeField a = lat.constant(k, 0.0);
        const Vec& s = (*p.obstacle)[static_cast<std::size_t>(k)].values;
        const double t = lat.time(k);
        for (Index n = 0; n < y.values.size(); ++n) {
            const double ytilde = y.values(n);
            const double free = ytilde + g.at(k, n, t, ytilde, z.values.row(n).transpose()) * lat.dt();
            const double v = std::max(s(n), free);
            y.values(n) = v;
            a.values(n) = v - free;
        }
        sol.y[static_cast<std::size_t>(k)] = std::move(y);
        sol.z[static_cast<std::size_t>(k)] = std::move(z);
        sol.a[static_cast<std::size_t>(k)] = std::move(a);
    }
    return sol;
}

StoppingResult linear_optimal_stopping(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat,
                                       double c_rep) {
    require_obstacle(p);
    lat.check_field(p.terminal);
    validate_obstacle(p, lat);
    require_positive_factors(lat, c_rep);
    const AffineDriver drv = controlled_driver(ctrl, p.generator, lat, p.terminal.level, c_rep);
    const int last = p.terminal.level;
    const int d = lat.dim();

    StoppingResult res;
    SolutionField& sol = res.solution;
    sol.y.resize(static_cast<std::size_t>(last) + 1);
    sol.z.resize(static_cast<std::size_t>(last));
    sol.a.resize(static_cast<std::size_t>(last) + 1);
    sol.y[static_cast<std::size_t>(last)] = p.terminal;
    sol.a[static_cast<std::size_t>(last)] = lat.constant(last, 0.0);
    res.policy.stop.assign(static_cast<std::size_t>(last) + 1, {});
    res.policy.stop[static_cast<std::size_t>(last)].assign(static_cast<std::size_t>(lat.level_size(last)), true);

    for (int k = last - 1; k >= 0; --k) {
        const auto& next = sol.y[static_cast<std::size_t>(k) + 1];
        NodeField v = cond_expect(next, lat);
        VectorField z = extract_z(next, lat);
        NodeField a = lat.constant(k, 0.0);
        const Mat& beta = drv.beta[static_cast<std::size_t>(k)];
        const Vec& running = drv.running[static_cast<std::size_t>(k)];
        const Vec& s = (*p.obstacle)[static_cast<std::size_t>(k)].values;
        std::vector<bool> flags(static_cast<std::size_t>(v.values.size()), false);
        for (Index n = 0; n < v.values.size(); ++n) {
            const double vtilde = v.values(n);
            const double cont =
                vtilde + (c_rep * beta(n, 0) * vtilde + c_rep * beta.row(n).tail(d).dot(z.values.row(n)) + running(n)) *
                             lat.dt();
            if (s(n) >= cont) {
                v.values(n) = s(n);
                a.values(n) = s(n) - cont;
                flags[static_cast<std::size_t>(n)] = true;
            } else {
                v.values(n) = cont;
            }
        }
        res.policy.stop[static_cast<std::size_t>(k)] = std::move(flags);
        sol.y[static_cast<std::size_t>(k)] = std::move(v);
        sol.z[static_cast<std::size_t>(k)] = std::move(z);
        sol.a[static_cast<std::size_t>(k)] = std::move(a);
    }
    return res;
}

NodeField stopped_value(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat,
                        const StoppingPolicy& policy, int level, double c_rep) {
    require_obstacle(p);
    lat.check_field(p.terminal);
    validate_obstacle(p, lat);
    require_positive_factors(lat, c_rep);
    const int last = p.terminal.level;
    if (level < 0 || level > last)
        throw LevelMismatch("stopped_value: level outside [0, terminal level]");
    if (static_cast<int>(policy.stop.size()) < last + 1)
        throw InvalidArgument("stopping policy covers fewer levels than the terminal level");
    const AffineDriver drv = controlled_driver(ctrl, p.generator, lat, last, c_rep);
    const int d = lat.dim();
    const double w = 1.0 / lat.outcomes();

    NodeField value = p.terminal;
    for (int k = last - 1; k >= level; --k) {
        const Mat& beta = drv.beta[static_cast<std::size_t>(k)];
        const Vec& running = drv.running[static_cast<std::size_t>(k)];
        const Vec& s = (*p.obstacle)[static_cast<std::size_t>(k)].values;
        NodeField prev{k, Vec(lat.level_size(k))};
        for (Index n = 0; n < prev.values.size(); ++n) {
            if (policy.stops(k, n)) {
                prev.values(n) = s(n);
                continue;
            }
            double acc = 0.0;
            for (int o = 0; o < lat.outcomes(); ++o) {
                double dot = 0.0;
                for (int i = 0; i < d; ++i)
                    dot += beta(n, 1 + i) * lat.sign(o, i);
                const double m = 1.0 + c_rep * beta(n, 0) * lat.dt() + c_rep * dot * lat.sqrt_dt();
                acc += m * value.values(lat.child(k, n, o));
            }
            prev.values(n) = running(n) * lat.dt() + w * acc;
        }
        value = std::move(prev);
    }
    return value;
}

GameResult mixed_game_dpp(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg, const GameOptions& opts) {
    require_obstacle(p);
    GameResult result = game_backward_pass(p, lat, cfg, opts);
    result.gap_to_primal = max_gap(result.solution, solve_rbsde(p, lat));
    return result;
}

SkorokhodReport skorokhod_report(const SolutionField& sol, const BSDEProblem& p) {
    require_obstacle(p);
    SkorokhodReport r;
    r.min_increment = std::numeric_limits<double>::infinity();
    r.min_excess = std::numeric_limits<double>::infinity();
    const int last = sol.terminal_level();
    for (int k = 0; k <= last; ++k) {
        const Vec& y = sol.y[static_cast<std::size_t>(k)].values;
        const Vec& a = sol.a[static_cast<std::size_t>(k)].values;
        const Vec& s = (*p.obstacle)[static_cast<std::size_t>(k)].values;
        r.complementarity = std::max(r.complementarity, ((y - s).cwiseProduct(a)).cwiseAbs().maxCoeff());
        r.min_increment = std::min(r.min_increment, a.minCoeff());
        r.min_excess = std::min(r.min_excess, (y - s).minCoeff());
    }
    r.terminal_error = (sol.y[static_cast<std::size_t>(last)].values - p.terminal.values).cwiseAbs().maxCoeff();
    return r;
}

} // namespace gbsde

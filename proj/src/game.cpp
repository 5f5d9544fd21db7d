#include "gamebsde/game.hpp"

#include "gamebsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gbsde {

namespace {

struct LevelScan {
    NodeField y;
    VectorField z;
    Mat alpha;
    Mat beta;
};

// One level of the max-min recursion, either order.
LevelScan scan_level(const GeneratorSpec& g, const Lattice& lat, const ControlGrids& grids, const NodeField& next,
                     int k, bool reversed) {
    const int d = lat.dim();
    LevelScan out{cond_expect(next, lat), extract_z(next, lat), Mat::Zero(lat.level_size(k), d + 1),
                  Mat::Zero(lat.level_size(k), d + 1)};
    const double t = lat.time(k);
    Vec x(d + 1);
    for (Index n = 0; n < out.y.values.size(); ++n) {
        const double ytilde = out.y.values(n);
        x(0) = ytilde;
        x.tail(d) = out.z.values.row(n).transpose();
        const auto f_alpha = [&](const Vec& a) { return g.at(k, n, t, a(0), a.tail(d)); };
        double bracket = 0.0;
        if (reversed) {
            bracket = minmax_scan_reversed(f_alpha, g.c_rep, x, grids);
        } else {
            const MinMaxResult r = minmax_scan(f_alpha, g.c_rep, x, grids);
            bracket = r.value;
            out.alpha.row(n) = r.alpha.transpose();
            out.beta.row(n) = r.beta.transpose();
        }
        out.y.values(n) = ytilde + lat.dt() * bracket;
    }
    return out;
}

SolutionField run_pass(const BSDEProblem& p, const Lattice& lat, const ControlGrids& grids, bool reversed,
                       ControlPolicy* policy, StoppingPolicy* stopping) {
    const int last = p.terminal.level;
    SolutionField sol;
    sol.y.resize(static_cast<std::size_t>(last) + 1);
    sol.z.resize(static_cast<std::size_t>(last));
    sol.a.resize(static_cast<std::size_t>(last) + 1);
    sol.y[static_cast<std::size_t>(last)] = p.terminal;
    sol.a[static_cast<std::size_t>(last)] = lat.constant(last, 0.0);
    if (stopping) {
        stopping->stop.assign(static_cast<std::size_t>(last) + 1, {});
        stopping->stop[static_cast<std::size_t>(last)].assign(static_cast<std::size_t>(lat.level_size(last)), true);
    }
    if (policy) {
        policy->alpha.assign(static_cast<std::size_t>(last), Mat());
        policy->beta.assign(static_cast<std::size_t>(last), Mat());
    }
    for (int k = last - 1; k >= 0; --k) {
        LevelScan s = scan_level(p.generator, lat, grids, sol.y[static_cast<std::size_t>(k) + 1], k, reversed);
        NodeField a = lat.constant(k, 0.0);
        if (p.obstacle) {
            const Vec& floor = (*p.obstacle)[static_cast<std::size_t>(k)].values;
            std::vector<bool> flags(static_cast<std::size_t>(floor.size()), false);
            for (Index n = 0; n < floor.size(); ++n) {
                const double cont = s.y.values(n);
                if (floor(n) >= cont) {
                    s.y.values(n) = floor(n);
                    a.values(n) = floor(n) - cont;
                    flags[static_cast<std::size_t>(n)] = true;
                }
            }
            if (stopping)
                stopping->stop[static_cast<std::size_t>(k)] = std::move(flags);
        } else if (stopping) {
            stopping->stop[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(lat.level_size(k)), false);
        }
        if (policy) {
            policy->alpha[static_cast<std::size_t>(k)] = std::move(s.alpha);
            policy->beta[static_cast<std::size_t>(k)] = std::move(s.beta);
        }
        sol.y[static_cast<std::size_t>(k)] = std::move(s.y);
        sol.z[static_cast<std::size_t>(k)] = std::move(s.z);
        sol.a[static_cast<std::size_t>(k)] = std::move(a);
    }
    return sol;
}

} // namespace

double game_bracket(const GeneratorSpec& g, int level, Index node, double t, const Vec& x, const Vec& alpha,
                    const Vec& beta) {
    const int d = g.dim;
    return g.at(level, node, t, alpha(0), alpha.tail(d)) + g.c_rep * beta.dot(x - alpha);
}

GameResult game_backward_pass(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg,
                              const GameOptions& opts) {
    lat.check_field(p.terminal);
    if (p.generator.dim != lat.dim())
        throw InvalidArgument("generator dimension does not match the lattice");
    validate_obstacle(p, lat);
    require_positive_factors(lat, p.generator.c_rep);
    const ControlGrids grids = ControlGrids::resolve(cfg, lat.dim());

    GameResult result;
    result.grids = cfg;
    StoppingPolicy stopping;
    result.solution = run_pass(p, lat, grids, false, &result.policy, p.obstacle ? &stopping : nullptr);
    if (p.obstacle)
        result.stopping = std::move(stopping);
    if (opts.infsup_diagnostic) {
        const SolutionField reversed = run_pass(p, lat, grids, true, nullptr, nullptr);
        result.infsup_gap = max_gap(result.solution, reversed);
    }
    return result;
}

GameResult game_dpp_value(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg, const GameOptions& opts) {
    if (p.reflected())
        throw InvalidArgument("game_dpp_value takes unreflected problems; use mixed_game_dpp");
    GameResult result = game_backward_pass(p, lat, cfg, opts);
    result.gap_to_primal = max_gap(result.solution, solve_bsde(p, lat));
    return result;
}

double bruteforce_policy_count(const Lattice& lat, const GridConfig& cfg, int terminal_level, int level) {
    const ControlGrids grids = ControlGrids::resolve(cfg, lat.dim());
    double nodes = 0.0;
    for (int j = 0; j < terminal_level - level; ++j)
        nodes += std::pow(j + 1.0, lat.dim());
    const double per_node = static_cast<double>(grids.alpha.cols()) * static_cast<double>(grids.beta.cols());
    return std::pow(per_node, nodes);
}

NodeField open_loop_bruteforce(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg, int level) {
    lat.check_field(p.terminal);
    if (p.reflected())
        throw InvalidArgument("open_loop_bruteforce takes unreflected problems");
    const int last = p.terminal.level;
    if (level < 0 || level > last)
        throw LevelMismatch("open_loop_bruteforce: level outside [0, terminal level]");
    if (last > 3)
        throw InvalidArgument("open_loop_bruteforce is limited to lattices with at most 3 steps");
    const double count = bruteforce_policy_count(lat, cfg, last, level);
    if (count > kBruteForceBudget) {
        std::ostringstream msg;
        msg << "open-loop enumeration needs (|A|*|B|)^nodes = " << count << " policy pairs, budget is "
            << kBruteForceBudget;
        throw BudgetExceeded(msg.str());
    }
    require_positive_factors(lat, p.generator.c_rep);
    const ControlGrids grids = ControlGrids::resolve(cfg, lat.dim());
    const Index n_alpha = grids.alpha.cols();
    const Index n_beta = grids.beta.cols();

    NodeField out{level, Vec(lat.level_size(level))};
    for (Index start = 0; start < out.values.size(); ++start) {
        // Policy nodes: the cone of `start` on levels level..last-1.
        std::vector<std::pair<int, Index>> nodes;
        std::vector<bool> mask(static_cast<std::size_t>(lat.level_size(level)), false);
        mask[static_cast<std::size_t>(start)] = true;
        for (int k = level; k < last; ++k) {
            const std::vector<bool> cone = lat.cone(level, mask, k);
            for (std::size_t n = 0; n < cone.size(); ++n)
                if (cone[n])
                    nodes.emplace_back(k, static_cast<Index>(n));
        }

        ControlPolicy policy = ControlPolicy::zero(lat, last);
        std::vector<Index> ai(nodes.size(), 0);
        double best = -std::numeric_limits<double>::infinity();
        for (;;) {
            for (std::size_t i = 0; i < nodes.size(); ++i)
                policy.alpha[static_cast<std::size_t>(nodes[i].first)].row(nodes[i].second) =
                    grids.alpha.col(ai[i]).transpose();
            std::vector<Index> bi(nodes.size(), 0);
            double worst = std::numeric_limits<double>::infinity();
            for (;;) {
                for (std::size_t i = 0; i < nodes.size(); ++i)
                    policy.beta[static_cast<std::size_t>(nodes[i].first)].row(nodes[i].second) =
                        grids.beta.col(bi[i]).transpose();
                const NodeField v = dual_expectation(policy, p, lat, level, p.generator.c_rep);
                worst = std::min(worst, v.values(start));
                std::size_t i = 0;
                for (; i < bi.size(); ++i) {
                    if (++bi[i] < n_beta)
                        break;
                    bi[i] = 0;
                }
                if (i == bi.size())
                    break;
            }
            best = std::max(best, worst);
            std::size_t i = 0;
            for (; i < ai.size(); ++i) {
                if (++ai[i] < n_alpha)
                    break;
                ai[i] = 0;
            }
            if (i == ai.size())
                break;
        }
        out.values(start) = best;
    }
    return out;
}

ConcaveResult concave_inf_solve(const BSDEProblem& p, const Lattice& lat, const FenchelDual& dual) {
    lat.check_field(p.terminal);
    if (!p.generator.concave)
        throw InvalidArgument("concave_inf_value needs a generator flagged concave");
    if (dual.size() == 0)
        throw InvalidArgument("concave_inf_value: empty dual domain");
    if (dual.points.rows() != lat.dim() + 1)
        throw InvalidArgument("concave_inf_value: dual domain has the wrong dimension");
    const int last = p.terminal.level;
    const int d = lat.dim();
    ConcaveResult res;
    SolutionField& sol = res.solution;
    sol.y.resize(static_cast<std::size_t>(last) + 1);
    sol.z.resize(static_cast<std::size_t>(last));
    sol.a.resize(static_cast<std::size_t>(last) + 1);
    sol.y[static_cast<std::size_t>(last)] = p.terminal;
    sol.a[static_cast<std::size_t>(last)] = lat.constant(last, 0.0);
    res.delta_driver.scale = 1.0;
    res.delta_driver.beta.resize(static_cast<std::size_t>(last));
    res.delta_driver.running.resize(static_cast<std::size_t>(last));
    for (int k = last - 1; k >= 0; --k) {
        const auto& next = sol.y[static_cast<std::size_t>(k) + 1];
        NodeField y = cond_expect(next, lat);
        VectorField z = extract_z(next, lat);
        Mat beta(y.values.size(), d + 1);
        Vec running(y.values.size());
        for (Index n = 0; n < y.values.size(); ++n) {
            const double ytilde = y.values(n);
            const InfRepResult r = inf_representation_eval(dual, ytilde, z.values.row(n).transpose());
            y.values(n) = ytilde + lat.dt() * r.value;
            beta.row(n) = dual.points.col(r.index).transpose();
            running(n) = dual.values(r.index);
        }
        res.delta_driver.beta[static_cast<std::size_t>(k)] = std::move(beta);
        res.delta_driver.running[static_cast<std::size_t>(k)] = std::move(running);
        sol.y[static_cast<std::size_t>(k)] = std::move(y);
        sol.z[static_cast<std::size_t>(k)] = std::move(z);
        sol.a[static_cast<std::size_t>(k)] = lat.constant(k, 0.0);
    }
    return res;
}

NodeField concave_inf_value(const BSDEProblem& p, const Lattice& lat, const FenchelDual& dual, int level) {
    ConcaveResult r = concave_inf_solve(p, lat, dual);
    if (level < 0 || level > p.terminal.level)
        throw LevelMismatch("concave_inf_value: level outside [0, terminal level]");
    return r.solution.y[static_cast<std::size_t>(level)];
}

double uniform_grid_envelope(const SolutionField& primal, const Lattice& lat, double c_rep, double h) {
    double max_y = 0.0;
    double max_z = 0.0;
    for (int k = 0; k < primal.terminal_level(); ++k) {
        max_y = std::max(max_y, cond_expect(primal.y[static_cast<std::size_t>(k) + 1], lat).values.cwiseAbs().maxCoeff());
        max_z = std::max(max_z, primal.z[static_cast<std::size_t>(k)].values.rowwise().norm().maxCoeff());
    }
    return 2.0 * c_rep * h * (1.0 + max_y + max_z) * lat.time(primal.terminal_level());
}

double max_gap(const SolutionField& a, const SolutionField& b) {
    const std::size_t levels = std::min(a.y.size(), b.y.size());
    double gap = 0.0;
    for (std::size_t k = 0; k < levels; ++k)
        gap = std::max(gap, (a.y[k].values - b.y[k].values).cwiseAbs().maxCoeff());
    return gap;
}

} // namespace gbsde

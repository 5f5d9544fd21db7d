#include "gamebsde/bsde.hpp"

#include "gamebsde/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace gbsde {

namespace {

constexpr double kBallSlack = 1e-12;

void check_terminal(const NodeField& terminal, const Lattice& lat) {
    lat.check_field(terminal);
}

double factor(const Lattice& lat, double scale, const Mat& beta, Index node, int outcome) {
    double dot = 0.0;
    for (int i = 0; i < lat.dim(); ++i)
        dot += beta(node, 1 + i) * lat.sign(outcome, i);
    return 1.0 + scale * beta(node, 0) * lat.dt() + scale * dot * lat.sqrt_dt();
}

SolutionField empty_solution(const NodeField& terminal, const Lattice& lat) {
    const int last = terminal.level;
    SolutionField sol;
    sol.y.resize(static_cast<std::size_t>(last) + 1);
    sol.z.resize(static_cast<std::size_t>(last));
    sol.a.resize(static_cast<std::size_t>(last) + 1);
    for (int k = 0; k <= last; ++k)
        sol.a[static_cast<std::size_t>(k)] = lat.constant(k, 0.0);
    sol.y[static_cast<std::size_t>(last)] = terminal;
    return sol;
}

} // namespace

ControlPolicy ControlPolicy::zero(const Lattice& lat, int levels) {
    return constant(lat, levels, Vec::Zero(lat.dim() + 1), Vec::Zero(lat.dim() + 1));
}

ControlPolicy ControlPolicy::constant(const Lattice& lat, int levels, const Vec& alpha, const Vec& beta) {
    ControlPolicy c;
    for (int k = 0; k < levels; ++k) {
        const Index n = lat.level_size(k);
        c.alpha.push_back(alpha.transpose().replicate(n, 1));
        c.beta.push_back(beta.transpose().replicate(n, 1));
    }
    c.validate(lat, levels);
    return c;
}

ControlPolicy ControlPolicy::random(const Lattice& lat, int levels, double alpha_half_width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = lat.dim() + 1;
    ControlPolicy c;
    for (int k = 0; k < levels; ++k) {
        const Index nodes = lat.level_size(k);
        Mat a(nodes, n);
        Mat b(nodes, n);
        for (Index i = 0; i < nodes; ++i) {
            for (int j = 0; j < n; ++j)
                a(i, j) = alpha_half_width * unit(rng);
            Vec v(n);
            do {
                for (int j = 0; j < n; ++j)
                    v(j) = unit(rng);
            } while (v.squaredNorm() > 1.0);
            b.row(i) = v.transpose();
        }
        c.alpha.push_back(std::move(a));
        c.beta.push_back(std::move(b));
    }
    return c;
}

void ControlPolicy::validate(const Lattice& lat, int levels) const {
    if (static_cast<int>(alpha.size()) < levels || static_cast<int>(beta.size()) < levels)
        throw InvalidArgument("control policy covers fewer levels than required");
    const int n = lat.dim() + 1;
    for (int k = 0; k < levels; ++k) {
        const auto& a = alpha[static_cast<std::size_t>(k)];
        const auto& b = beta[static_cast<std::size_t>(k)];
        if (a.rows() != lat.level_size(k) || b.rows() != lat.level_size(k) || a.cols() != n || b.cols() != n)
            throw InvalidArgument("control policy has the wrong shape at level " + std::to_string(k));
        if (b.rowwise().norm().maxCoeff() > 1.0 + kBallSlack)
            throw InvalidArgument("beta leaves the closed unit ball at level " + std::to_string(k));
    }
}

Index StoppingPolicy::region_size() const {
    Index count = 0;
    for (std::size_t k = 0; k + 1 < stop.size(); ++k)
        for (bool s : stop[k])
            count += s ? 1 : 0;
    return count;
}

bool comparison_step_ok(const Lattice& lat, double c_l1) {
    return 1.0 - c_l1 * (lat.dt() + std::sqrt(lat.dim() * lat.dt())) >= 0.0;
}

void require_positive_factors(const Lattice& lat, double c_rep) {
    const double bound = c_rep * (lat.sqrt_dt() * std::sqrt(static_cast<double>(lat.dim())) + lat.dt());
    if (bound >= 1.0) {
        std::ostringstream msg;
        msg << "Gamma factors may vanish: C_rep*(sqrt(dt*d) + dt) = " << bound << " >= 1 (C_rep=" << c_rep
            << ", N=" << lat.steps() << "); refine the time grid";
        throw PositivityViolation(msg.str());
    }
}

void validate_obstacle(const BSDEProblem& p, const Lattice& lat) {
    if (!p.obstacle)
        return;
    const auto& s = *p.obstacle;
    const int last = p.terminal.level;
    if (static_cast<int>(s.size()) < last + 1)
        throw LevelMismatch("obstacle covers fewer levels than the terminal level");
    for (int k = 0; k <= last; ++k) {
        const NodeField& f = s[static_cast<std::size_t>(k)];
        if (f.level != k)
            throw LevelMismatch("obstacle field stored at the wrong level");
        lat.check_field(f);
    }
    const Vec& sl = s[static_cast<std::size_t>(last)].values;
    for (Index n = 0; n < sl.size(); ++n) {
        if (sl(n) > p.terminal.values(n)) {
            std::ostringstream msg;
            msg << "obstacle above the terminal condition at terminal node " << n << ": S=" << sl(n)
                << " > xi=" << p.terminal.values(n);
            throw ObstacleViolation(msg.str());
        }
    }
}

SolutionField solve_bsde(const BSDEProblem& p, const Lattice& lat) {
    if (p.reflected())
        throw InvalidArgument("solve_bsde takes unreflected problems; use solve_rbsde");
    check_terminal(p.terminal, lat);
    const GeneratorSpec& g = p.generator;
    SolutionField sol = empty_solution(p.terminal, lat);
    if (!comparison_step_ok(lat, g.c_l1))
        sol.warnings.push_back("time step above the comparison threshold: the scheme may not be monotone");

    for (int k = p.terminal.level - 1; k >= 0; --k) {
        const auto& next = sol.y[static_cast<std::size_t>(k) + 1];
        NodeField y = cond_expect(next, lat);
        VectorField z = extract_z(next, lat);
        const double t = lat.time(k);
        for (Index n = 0; n < y.values.size(); ++n) {
            const double ytilde = y.values(n);
            y.values(n) = ytilde + g.at(k, n, t, ytilde, z.values.row(n).transpose()) * lat.dt();
        }
        sol.y[static_cast<std::size_t>(k)] = std::move(y);
        sol.z[static_cast<std::size_t>(k)] = std::move(z);
    }
    return sol;
}

GammaField gamma_path(const ControlPolicy& ctrl, const Lattice& lat, int start, double c_rep, int last_level) {
    require_positive_factors(lat, c_rep);
    if (start < 0 || start > last_level || last_level > lat.steps())
        throw LevelMismatch("gamma_path: start level outside [0, last level]");
    ctrl.validate(lat, last_level);

    GammaField out;
    out.start = start;
    out.gamma.push_back(lat.constant(start, 1.0));
    Vec mass = lat.level_probabilities(start);
    const double w = 1.0 / lat.outcomes();
    for (int k = start; k < last_level; ++k) {
        const Mat& beta = ctrl.beta[static_cast<std::size_t>(k)];
        Vec next = Vec::Zero(lat.level_size(k + 1));
        for (Index n = 0; n < mass.size(); ++n)
            for (int o = 0; o < lat.outcomes(); ++o)
                next(lat.child(k, n, o)) += w * mass(n) * factor(lat, c_rep, beta, n, o);
        mass = std::move(next);
        out.gamma.push_back({k + 1, mass.cwiseQuotient(lat.level_probabilities(k + 1))});
    }
    return out;
}

GammaField gamma_path(const ControlPolicy& ctrl, const Lattice& lat, int start, double c_rep) {
    return gamma_path(ctrl, lat, start, c_rep, std::min(ctrl.levels(), lat.steps()));
}

AffineDriver controlled_driver(const ControlPolicy& ctrl, const GeneratorSpec& g, const Lattice& lat, int last_level,
                               double c_rep) {
    ctrl.validate(lat, last_level);
    const int d = lat.dim();
    AffineDriver drv;
    drv.scale = c_rep;
    for (int k = 0; k < last_level; ++k) {
        const Mat& a = ctrl.alpha[static_cast<std::size_t>(k)];
        const Mat& b = ctrl.beta[static_cast<std::size_t>(k)];
        const double t = lat.time(k);
        Vec running(a.rows());
        for (Index n = 0; n < a.rows(); ++n) {
            const Vec alpha = a.row(n).transpose();
            const Vec beta = b.row(n).transpose();
            running(n) = g.at(k, n, t, alpha(0), alpha.tail(d)) - c_rep * beta(0) * alpha(0) -
                         c_rep * beta.tail(d).dot(alpha.tail(d));
        }
        drv.beta.push_back(b);
        drv.running.push_back(std::move(running));
    }
    return drv;
}

SolutionField solve_affine_bsde(const AffineDriver& drv, const NodeField& terminal, const Lattice& lat) {
    check_terminal(terminal, lat);
    if (static_cast<int>(drv.running.size()) < terminal.level)
        throw InvalidArgument("affine driver covers fewer levels than the terminal level");
    const int d = lat.dim();
    const double s = drv.scale;
    SolutionField sol = empty_solution(terminal, lat);
    for (int k = terminal.level - 1; k >= 0; --k) {
        const auto& next = sol.y[static_cast<std::size_t>(k) + 1];
        NodeField y = cond_expect(next, lat);
        VectorField z = extract_z(next, lat);
        const Mat& beta = drv.beta[static_cast<std::size_t>(k)];
        const Vec& running = drv.running[static_cast<std::size_t>(k)];
        for (Index n = 0; n < y.values.size(); ++n) {
            const double ytilde = y.values(n);
            const double drift = s * beta(n, 0) * ytilde + s * beta.row(n).tail(d).dot(z.values.row(n)) + running(n);
            y.values(n) = ytilde + drift * lat.dt();
        }
        sol.y[static_cast<std::size_t>(k)] = std::move(y);
        sol.z[static_cast<std::size_t>(k)] = std::move(z);
    }
    return sol;
}

NodeField dual_affine_expectation(const AffineDriver& drv, const NodeField& terminal, const Lattice& lat, int level) {
    check_terminal(terminal, lat);
    if (level < 0 || level > terminal.level)
        throw LevelMismatch("dual expectation: evaluation level outside [0, terminal level]");
    if (static_cast<int>(drv.running.size()) < terminal.level)
        throw InvalidArgument("affine driver covers fewer levels than the terminal level");
    const double w = 1.0 / lat.outcomes();
    NodeField value = terminal;
    for (int k = terminal.level - 1; k >= level; --k) {
        const Mat& beta = drv.beta[static_cast<std::size_t>(k)];
        const Vec& running = drv.running[static_cast<std::size_t>(k)];
        NodeField prev{k, Vec(lat.level_size(k))};
        for (Index n = 0; n < prev.values.size(); ++n) {
            double acc = 0.0;
            for (int o = 0; o < lat.outcomes(); ++o) {
                const double m = factor(lat, drv.scale, beta, n, o);
                if (!(m > 0.0))
                    throw PositivityViolation("non-positive density factor at level " + std::to_string(k) + ", node " +
                                              std::to_string(n));
                acc += m * value.values(lat.child(k, n, o));
            }
            prev.values(n) = running(n) * lat.dt() + w * acc;
        }
        value = std::move(prev);
    }
    return value;
}

SolutionField solve_linear_bsde(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat, double c_rep) {
    return solve_affine_bsde(controlled_driver(ctrl, p.generator, lat, p.terminal.level, c_rep), p.terminal, lat);
}

NodeField dual_expectation(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat, int level,
                           double c_rep) {
    require_positive_factors(lat, c_rep);
    return dual_affine_expectation(controlled_driver(ctrl, p.generator, lat, p.terminal.level, c_rep), p.terminal,
                                   lat, level);
}

} // namespace gbsde

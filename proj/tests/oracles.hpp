#pragma once
// Test-side reference computations, written against the raw lattice geometry only.

#include "gamebsde/gamebsde.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using gbsde::Index;
using gbsde::Lattice;
using gbsde::Mat;
using gbsde::Vec;

/// One path of outcomes from a start node, with the nodes it visits.
struct Path {
    std::vector<int> outcomes;
    std::vector<Index> nodes;  // nodes[j] at level start + j
};

inline void for_each_path(const Lattice& lat, int start, Index node, int last, const std::function<void(const Path&)>& fn) {
    const int steps = last - start;
    const long long per_step = lat.outcomes();
    long long total = 1;
    for (int j = 0; j < steps; ++j)
        total *= per_step;
    Path p;
    p.outcomes.resize(static_cast<std::size_t>(steps));
    p.nodes.resize(static_cast<std::size_t>(steps) + 1);
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        p.nodes[0] = node;
        for (int j = 0; j < steps; ++j) {
            const int o = static_cast<int>(c % per_step);
            c /= per_step;
            p.outcomes[static_cast<std::size_t>(j)] = o;
            p.nodes[static_cast<std::size_t>(j) + 1] = lat.child(start + j, p.nodes[static_cast<std::size_t>(j)], o);
        }
        fn(p);
    }
}

inline double path_probability(const Lattice& lat, int steps) { return std::pow(1.0 / lat.outcomes(), steps); }

/// Row of a policy matrix as a vector.
inline Vec row(const Mat& m, Index n) { return m.row(n).transpose(); }

/// Running payoff f(t, alpha) - c <beta, alpha>, spelled out coordinate by coordinate.
inline double running(const gbsde::GeneratorSpec& g, double t, const Vec& alpha, const Vec& beta, double c) {
    double dot = 0.0;
    for (Index i = 0; i < alpha.size(); ++i)
        dot += beta(i) * alpha(i);
    return g.at_point(t, alpha) - c * dot;
}

/// One-step multiplier 1 + c beta_1 dt + c <beta_2, dB>.
inline double factor(const Lattice& lat, const Vec& beta, int outcome, double c) {
    double v = 1.0 + c * beta(0) * lat.dt();
    for (int i = 0; i < lat.dim(); ++i)
        v += c * beta(i + 1) * lat.sign(outcome, i) * lat.sqrt_dt();
    return v;
}

/// E[sum_k Gamma_k F_k dt + Gamma_L xi | node] by summing over every path.
inline Vec dual_by_paths(const gbsde::ControlPolicy& ctrl, const gbsde::BSDEProblem& p, const Lattice& lat, int start,
                         double c) {
    const int last = p.terminal.level;
    Vec out(lat.level_size(start));
    const double w = path_probability(lat, last - start);
    for (Index n = 0; n < out.size(); ++n) {
        double acc = 0.0;
        for_each_path(lat, start, n, last, [&](const Path& path) {
            double gamma = 1.0;
            double payoff = 0.0;
            for (int j = 0; j < last - start; ++j) {
                const int k = start + j;
                const Index node = path.nodes[static_cast<std::size_t>(j)];
                const Vec a = row(ctrl.alpha[static_cast<std::size_t>(k)], node);
                const Vec b = row(ctrl.beta[static_cast<std::size_t>(k)], node);
                payoff += gamma * running(p.generator, lat.time(k), a, b, c) * lat.dt();
                gamma *= factor(lat, b, path.outcomes[static_cast<std::size_t>(j)], c);
            }
            payoff += gamma * p.terminal.values(path.nodes.back());
            acc += w * payoff;
        });
        out(n) = acc;
    }
    return out;
}

/// Gamma-weighted payoff stopped at the first flagged node, summed over paths.
inline Vec stopped_by_paths(const gbsde::ControlPolicy& ctrl, const gbsde::BSDEProblem& p, const Lattice& lat,
                            const gbsde::StoppingPolicy& pol, int start, double c) {
    const int last = p.terminal.level;
    const auto& S = *p.obstacle;
    Vec out(lat.level_size(start));
    const double w = path_probability(lat, last - start);
    for (Index n = 0; n < out.size(); ++n) {
        double acc = 0.0;
        for_each_path(lat, start, n, last, [&](const Path& path) {
            double gamma = 1.0;
            double payoff = 0.0;
            for (int j = 0; j <= last - start; ++j) {
                const int k = start + j;
                const Index node = path.nodes[static_cast<std::size_t>(j)];
                if (k == last) {
                    payoff += gamma * p.terminal.values(node);
                    break;
                }
                if (pol.stops(k, node)) {
                    payoff += gamma * S[static_cast<std::size_t>(k)].values(node);
                    break;
                }
                const Vec a = row(ctrl.alpha[static_cast<std::size_t>(k)], node);
                const Vec b = row(ctrl.beta[static_cast<std::size_t>(k)], node);
                payoff += gamma * running(p.generator, lat.time(k), a, b, c) * lat.dt();
                gamma *= factor(lat, b, path.outcomes[static_cast<std::size_t>(j)], c);
            }
            acc += w * payoff;
        });
        out(n) = acc;
    }
    return out;
}

/// Predictor-explicit BSDE on the full (non-recombining) path tree; returns the root value.
inline double tree_bsde_root(const gbsde::GeneratorSpec& g, const std::function<double(const Vec&)>& xi,
                             const Lattice& lat, int last) {
    const int d = lat.dim();
    const int m = lat.outcomes();
    std::function<double(int, const Vec&)> value = [&](int k, const Vec& b) -> double {
        if (k == last)
            return xi(b);
        std::vector<double> kids(static_cast<std::size_t>(m));
        double mean = 0.0;
        Vec z = Vec::Zero(d);
        for (int o = 0; o < m; ++o) {
            Vec nb = b;
            for (int i = 0; i < d; ++i)
                nb(i) += lat.sign(o, i) * lat.sqrt_dt();
            const double v = value(k + 1, nb);
            mean += v / m;
            for (int i = 0; i < d; ++i)
                z(i) += lat.sign(o, i) * v / (m * lat.sqrt_dt());
        }
        return mean + g(lat.time(k), mean, z) * lat.dt();
    };
    return value(0, Vec::Zero(d));
}

/// Literal max over alpha of min over beta of F(t, beta, alpha) + C <beta, x>, every pair
/// evaluated through big_F. Adaptive candidates are appended exactly as documented.
inline double literal_minmax(const gbsde::GeneratorSpec& g, double t, const Vec& x, const gbsde::ControlGrids& grids) {
    std::vector<Vec> alphas;
    if (grids.adaptive)
        alphas.push_back(x);
    for (Index j = 0; j < grids.alpha.cols(); ++j)
        alphas.push_back(grids.alpha.col(j));
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& a : alphas) {
        std::vector<Vec> betas;
        for (Index j = 0; j < grids.beta.cols(); ++j)
            betas.push_back(grids.beta.col(j));
        if (grids.adaptive && (a - x).norm() > 0.0)
            betas.push_back((a - x) / (a - x).norm());
        double inner = std::numeric_limits<double>::infinity();
        for (const Vec& b : betas)
            inner = std::min(inner, gbsde::big_F(g, t, b, a) + g.c_rep * b.dot(x));
        best = std::max(best, inner);
    }
    return best;
}

/// Largest l1 difference quotient over all pairs of a regular grid on the box.
inline double lipschitz_pairs(const gbsde::GeneratorSpec& g, double t, const Vec& lo, const Vec& hi, double step) {
    const Mat pts = gbsde::box_points(lo, hi, Vec::Constant(lo.size(), step));
    double best = 0.0;
    for (Index i = 0; i < pts.cols(); ++i)
        for (Index j = i + 1; j < pts.cols(); ++j) {
            const Vec a = pts.col(i);
            const Vec b = pts.col(j);
            const double den = std::abs(a(0) - b(0)) + (a.tail(a.size() - 1) - b.tail(b.size() - 1)).norm();
            if (den > 0.0)
                best = std::max(best, std::abs(g.at_point(t, a) - g.at_point(t, b)) / den);
        }
    return best;
}

inline double max_abs_diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace oracle

#pragma once

#include "gamebsde/generators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gbsde {

/// Node-indexed solution (y, z, a) of a (reflected) BSDE on levels 0..L.
///
/// `a` holds per-level increments of the reflecting process; it is identically zero for
/// unreflected problems and zero at the terminal level.
struct SolutionField {
    std::vector<NodeField> y;    // levels 0..L
    std::vector<VectorField> z;  // levels 0..L-1
    std::vector<NodeField> a;    // levels 0..L
    std::vector<std::string> warnings;

    int terminal_level() const { return static_cast<int>(y.size()) - 1; }
    double root() const { return y.front().values(0); }
};

/// Feedback controls: row n of alpha[k] / beta[k] is the (1+d)-vector used at node n of
/// level k. beta must stay in the closed unit ball.
struct ControlPolicy {
    std::vector<Mat> alpha;
    std::vector<Mat> beta;

    int levels() const { return static_cast<int>(alpha.size()); }

    static ControlPolicy zero(const Lattice& lat, int levels);
    static ControlPolicy constant(const Lattice& lat, int levels, const Vec& alpha, const Vec& beta);
    /// alpha uniform in [-alpha_half_width, alpha_half_width]^{1+d}, beta uniform in the unit ball.
    static ControlPolicy random(const Lattice& lat, int levels, double alpha_half_width, std::uint64_t seed);

    /// Throws InvalidArgument on shape mismatch or a beta outside the unit ball.
    void validate(const Lattice& lat, int levels) const;
};

/// Stop/continue decision per node on levels 0..L; level L always stops.
struct StoppingPolicy {
    std::vector<std::vector<bool>> stop;

    bool stops(int level, Index node) const {
        return stop.at(static_cast<std::size_t>(level)).at(static_cast<std::size_t>(node));
    }
    /// Number of stopping nodes strictly before the terminal level.
    Index region_size() const;
};

/// E[Gamma_{start,k} | node] for k = start..L under the walk started at the root.
struct GammaField {
    int start = 0;
    std::vector<NodeField> gamma;  // gamma[k - start]

    const NodeField& at(int level) const { return gamma.at(static_cast<std::size_t>(level - start)); }
};

/// Coefficients of a linear BSDE  -dY = [s beta_1 Y + s <beta_2, Z> + running] dt - Z dB.
/// `scale` is the constant s (C_rep for the game, 1 for the concave dual).
struct AffineDriver {
    double scale = 0.0;
    std::vector<Mat> beta;     // level k: nodes x (1+d)
    std::vector<Vec> running;  // level k: per-node running payoff
};

/// 1 - c_l1 (dt + sqrt(d dt)) >= 0: the explicit step is then monotone in the next level.
bool comparison_step_ok(const Lattice& lat, double c_l1);

/// Throws PositivityViolation unless c_rep (sqrt(dt) sqrt(d) + dt) < 1.
void require_positive_factors(const Lattice& lat, double c_rep);

/// Obstacle covers levels 0..L with matching sizes and S_L <= xi at every terminal node.
/// Throws ObstacleViolation / LevelMismatch. No-op for unreflected problems.
void validate_obstacle(const BSDEProblem& p, const Lattice& lat);

/// Predictor-explicit scheme: y_k = E[y_{k+1}] + f(t_k, E[y_{k+1}], z_k) dt.
SolutionField solve_bsde(const BSDEProblem& p, const Lattice& lat);

GammaField gamma_path(const ControlPolicy& ctrl, const Lattice& lat, int start, double c_rep, int last_level);
GammaField gamma_path(const ControlPolicy& ctrl, const Lattice& lat, int start, double c_rep);

/// Running payoff F(t_k, beta, alpha) evaluated nodewise, packaged with beta and c_rep.
AffineDriver controlled_driver(const ControlPolicy& ctrl, const GeneratorSpec& g, const Lattice& lat, int last_level,
                               double c_rep);

SolutionField solve_affine_bsde(const AffineDriver& drv, const NodeField& terminal, const Lattice& lat);
/// Gamma-weighted payoff E[sum_k Gamma_{t,k} F_k dt + Gamma_{t,L} xi | node] by a backward
/// adjoint sweep. Throws PositivityViolation if any one-step factor is not positive.
NodeField dual_affine_expectation(const AffineDriver& drv, const NodeField& terminal, const Lattice& lat, int level);

/// Controlled linear BSDE under (alpha, beta).
SolutionField solve_linear_bsde(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat, double c_rep);

/// Dual (Gamma-weighted) form of the controlled linear BSDE at `level`.
NodeField dual_expectation(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat, int level,
                           double c_rep);

} // namespace gbsde

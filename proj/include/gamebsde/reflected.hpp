#pragma once

#include "gamebsde/game.hpp"

namespace gbsde {

/// Reflected BSDE: y_k = max(S_k, y~ + f(t_k, y~, z_k) dt), with the push recorded in `a`.
/// Throws ObstacleViolation when S_L > xi somewhere.
SolutionField solve_rbsde(const BSDEProblem& p, const Lattice& lat);

struct StoppingResult {
    SolutionField solution;  // value process V on levels 0..L
    StoppingPolicy policy;   // stop where S_k >= continuation value (ties stop)

    const NodeField& value(int level) const { return solution.y.at(static_cast<std::size_t>(level)); }
};

/// Optimal stopping of the controlled linear equation under (alpha, beta):
/// V_L = xi, V_k = max(S_k, V~ + [C beta_1 V~ + C <beta_2, Z> + F_k] dt).
StoppingResult linear_optimal_stopping(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat,
                                       double c_rep);

/// Gamma-weighted stopped payoff under a fixed stopping policy, evaluated backward:
/// stop nodes pay S_k (xi at the terminal level), others F_k dt + E[factor * V_{k+1}].
NodeField stopped_value(const ControlPolicy& ctrl, const BSDEProblem& p, const Lattice& lat,
                        const StoppingPolicy& policy, int level, double c_rep);

/// Mixed game: sup over (alpha, stopping) and inf over beta, compared with solve_rbsde.
GameResult mixed_game_dpp(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg,
                          const GameOptions& opts = {});

struct SkorokhodReport {
    double complementarity = 0.0;  // max |(y_k - S_k) * da_k|
    double min_increment = 0.0;    // min da_k, must be >= 0
    double min_excess = 0.0;       // min (y_k - S_k), must be >= 0
    double terminal_error = 0.0;   // max |y_L - xi|

    bool pass() const { return complementarity == 0.0 && min_increment >= 0.0 && min_excess >= 0.0 && terminal_error == 0.0; }
};

SkorokhodReport skorokhod_report(const SolutionField& sol, const BSDEProblem& p);

} // namespace gbsde

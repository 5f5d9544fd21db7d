#pragma once

#include "gamebsde/affine_rep.hpp"
#include "gamebsde/bsde.hpp"

#include <optional>

namespace gbsde {

/// Value process of the sup-inf game together with the feedback controls found by the scan.
struct GameResult {
    SolutionField solution;  // game value y (and reflection increments for the mixed game)
    ControlPolicy policy;    // argmax alpha, argmin beta per node
    std::optional<StoppingPolicy> stopping;
    GridConfig grids;
    double gap_to_primal = 0.0;       // max over nodes of |y_game - y_primal|
    std::optional<double> infsup_gap;  // max over nodes of |sup-inf - inf-sup|, diagnostic only

    const NodeField& value(int level) const { return solution.y.at(static_cast<std::size_t>(level)); }
    double root() const { return solution.root(); }
};

struct GameOptions {
    bool infsup_diagnostic = false;
};

/// f(alpha) + C <beta, x - alpha>: the quantity maximised over alpha and minimised over beta.
double game_bracket(const GeneratorSpec& g, int level, Index node, double t, const Vec& x, const Vec& alpha,
                    const Vec& beta);

/// Backward max-min recursion y_k = max(S_k, y~ + dt * maxmin bracket), the floor applying
/// only when the problem carries an obstacle. No primal comparison is made here.
GameResult game_backward_pass(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg,
                              const GameOptions& opts = {});

/// Sup-inf game value by dynamic programming over the control grids, compared with the
/// primal solution of the same (unreflected) BSDE.
GameResult game_dpp_value(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg,
                          const GameOptions& opts = {});

inline constexpr double kBruteForceBudget = 1e6;

/// Exhaustive max over alpha-policies of min over beta-policies of dual_expectation at `level`,
/// one start node at a time. Uses the static grids only (no adaptive injection).
/// Throws BudgetExceeded when (|A| |B|)^(policy nodes) exceeds kBruteForceBudget.
NodeField open_loop_bruteforce(const BSDEProblem& p, const Lattice& lat, const GridConfig& cfg, int level);

/// Policy count the brute force would enumerate for one start node at `level`.
double bruteforce_policy_count(const Lattice& lat, const GridConfig& cfg, int terminal_level, int level);

/// Concave-driver value y_k = y~ + dt * min over the dual domain of F + beta_1 y~ + <beta_2, z>,
/// with the minimising beta recorded as an unscaled linear driver.
struct ConcaveResult {
    SolutionField solution;
    AffineDriver delta_driver;
};

ConcaveResult concave_inf_solve(const BSDEProblem& p, const Lattice& lat, const FenchelDual& dual);
NodeField concave_inf_value(const BSDEProblem& p, const Lattice& lat, const FenchelDual& dual, int level);

/// 2 C_rep h (1 + max|y~| + max|z~|) T, with y~ = E[y_{k+1} | node] and z~ read off the
/// primal solution: the tolerated game-primal gap for non-adaptive grids of spacing h.
double uniform_grid_envelope(const SolutionField& primal, const Lattice& lat, double c_rep, double h);

/// Largest nodewise difference between two solutions over the levels they share.
double max_gap(const SolutionField& a, const SolutionField& b);

} // namespace gbsde

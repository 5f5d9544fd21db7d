#pragma once

#include "gamebsde/game.hpp"

#include <cstdint>
#include <functional>

namespace gbsde {

/// Nonlinear evaluation X -> E^f_{s,t}[X] induced by a generator on a lattice.
struct EvaluationOperator {
    GeneratorSpec generator;
    Lattice lattice;
};

/// y_s of the BSDE on [t_s, t_t] with terminal X (X at level t).
NodeField evaluate(const EvaluationOperator& op, int s, int t, const NodeField& x);

/// Largest violation of each consistency axiom over the sampled cases.
struct AxiomReport {
    double monotonicity = 0.0;  // max (E[X2] - E[X1])^+ with X1 >= X2
    double identity = 0.0;      // max |E_{t,t}[X] - X|
    double recursivity = 0.0;   // max |E_{r,s}[E_{s,t}[X]] - E_{r,t}[X]|
    double locality = 0.0;      // max over A of |1_A E[X] - 1_A E[1_A X]|
    int samples = 0;
    std::uint64_t seed = 0;
    bool step_ok = true;        // comparison threshold met

    double worst() const;
    bool pass(double tol) const { return worst() <= tol; }
};

/// Samples (r <= s <= t, X1 >= X2, A in the level-s node algebra) and measures the axioms.
/// Events A are unions of level-s nodes; 1_A X is realised on the lattice as X on the cone
/// of A and 0 elsewhere, which is all that the nodes in A can see.
AxiomReport check_axioms(const EvaluationOperator& op, int samples, std::uint64_t seed);

struct DominationReport {
    double increment = 0.0;  // max (E[X1] - E[X2] - E^{g_mu}[X1 - X2])^+
    double lower = 0.0;      // max (E^{-g_mu+g0}[0] - E[0])^+
    double upper = 0.0;      // max (E[0] - E^{g_mu+g0}[0])^+
    double mu = 0.0;
    double lipschitz_estimate = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;

    double worst() const;
    bool pass(double tol) const { return worst() <= tol; }
};

/// Checks domination by g_mu = mu(|y| + |z|) and the two-sided zero bound with drift g0(t).
DominationReport check_domination(const EvaluationOperator& op, double mu, const std::function<double(double)>& g0,
                                  int samples, std::uint64_t seed);

/// Sup-inf game value on the sub-horizon [t_s, t_t] with terminal xi, read at level s.
NodeField dual_representation(const EvaluationOperator& op, int s, int t, const NodeField& xi,
                              const GridConfig& grids);

} // namespace gbsde

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace gbsde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Real-valued field on the nodes of one lattice level.
struct NodeField {
    int level = 0;
    Vec values;
};

/// d-vector-valued field on one level; row n holds the vector at node n.
struct VectorField {
    int level = 0;
    Mat values;
};

/// Recombining random walk approximating a d-dimensional Brownian motion on [0, T].
///
/// Every coordinate moves by +-sqrt(dt) with probability 1/2, independently across
/// coordinates and steps. A level-k node is identified by its per-coordinate up-counts
/// u_i in [0, k]; nodes are ordered lexicographically with the first coordinate most
/// significant, so level k holds (k+1)^d nodes. Outcomes of one step (2^d sign patterns)
/// are ordered the same way, down before up.
class Lattice {
public:
    static Lattice build(double horizon, int steps, int dim);

    double horizon() const { return horizon_; }
    int steps() const { return steps_; }
    int dim() const { return dim_; }
    double dt() const { return dt_; }
    double sqrt_dt() const { return sqrt_dt_; }
    double time(int level) const { return level * dt_; }

    Index level_size(int level) const;
    int outcomes() const { return 1 << dim_; }

    /// Sign (+1/-1) of coordinate i in outcome o.
    int sign(int outcome, int coord) const { return ((outcome >> (dim_ - 1 - coord)) & 1) ? 1 : -1; }
    /// Brownian increment of an outcome, length d.
    Vec increment(int outcome) const;

    Eigen::VectorXi up_counts(int level, Index node) const;
    Index index_of(int level, const Eigen::VectorXi& up) const;
    Index child(int level, Index node, int outcome) const;

    /// Brownian state (2u_i - k) sqrt(dt) of a node.
    Vec brownian(int level, Index node) const;

    NodeField constant(int level, double value) const;
    NodeField from_state(int level, const std::function<double(const Vec&)>& fn) const;
    /// Field (t_k, B) -> fn(t_k, B).
    NodeField from_time_state(int level, const std::function<double(double, const Vec&)>& fn) const;
    NodeField brownian_coordinate(int level, int coord) const;

    /// Probability of each node at a level under the walk started at the root.
    Vec level_probabilities(int level) const;

    /// Nodes at level `to` reachable from the nodes flagged in `from_mask` at level `from`.
    std::vector<bool> cone(int from, const std::vector<bool>& from_mask, int to) const;

    void check_field(const NodeField& f) const;

private:
    Lattice(double horizon, int steps, int dim);

    double horizon_;
    int steps_;
    int dim_;
    double dt_;
    double sqrt_dt_;
};

/// E[f | node] for a field living one level below the root of the step.
NodeField cond_expect(const NodeField& f, const Lattice& lat);

/// Martingale-representation coefficient z_i = E[f * dB_i | node] / dt.
VectorField extract_z(const NodeField& f, const Lattice& lat);

} // namespace gbsde

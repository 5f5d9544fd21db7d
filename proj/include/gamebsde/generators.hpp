#pragma once

#include "gamebsde/lattice.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gbsde {

/// Driver f(t, y, z) of a one-dimensional BSDE together with its Lipschitz data.
///
/// `c_l1` bounds |f(t,y1,z1) - f(t,y2,z2)| by c_l1 * (|y1-y2| + |z1-z2|); `c_rep` is the
/// Euclidean constant used by the affine min-max representation and by every controlled
/// linear equation built from it. It defaults to sqrt(2) * c_l1, which dominates the
/// Euclidean Lipschitz constant of any driver with the given c_l1.
struct GeneratorSpec {
    using Eval = std::function<double(double t, double y, const Vec& z)>;
    /// Optional node-aware form for random (state-dependent) drivers.
    using NodeEval = std::function<double(int level, Index node, double t, double y, const Vec& z)>;

    std::string name;
    int dim = 1;
    Eval eval;
    NodeEval node_eval;
    double c_l1 = 0.0;
    double c_rep = 0.0;
    bool concave = false;

    double operator()(double t, double y, const Vec& z) const { return eval(t, y, z); }

    double at(int level, Index node, double t, double y, const Vec& z) const {
        return node_eval ? node_eval(level, node, t, y, z) : eval(t, y, z);
    }

    /// f(t, x) with x = (y, z) stacked into one (1+d)-vector.
    double at_point(double t, const Vec& x) const { return eval(t, x(0), x.tail(dim)); }
};

/// Parameters for catalog members. Unused fields are ignored by a given member.
struct CatalogParams {
    double c = 0.0;
    double a = 0.0;
    double b1 = 0.0;
    Vec b2;  // length d; empty means zero
    double mu = 0.0;
    std::optional<double> c_rep;  // sharper Euclidean constant, must be >= c_l1
};

namespace generators {

GeneratorSpec zero(int dim = 1);
GeneratorSpec constant(double c, int dim = 1);
/// f = a + b1*y + <b2, z>
GeneratorSpec affine(double a, double b1, const Vec& b2);
/// g_mu(t,y,z) = mu(|y| + |z|)
GeneratorSpec mu_norm(double mu, int dim = 1);
/// f = mu|z|
GeneratorSpec mu_abs_z(double mu, int dim = 1);
/// f = -mu|z|, concave
GeneratorSpec neg_mu_abs_z(double mu, int dim = 1);
GeneratorSpec custom(std::string name, int dim, GeneratorSpec::Eval eval, double c_l1,
                     std::optional<double> c_rep = std::nullopt, bool concave = false);

/// Names accepted by `catalog`.
const std::vector<std::string>& catalog_names();

} // namespace generators

/// Look up a catalog member by name. Throws InvalidArgument for unknown names, negative mu,
/// or a c_rep override below c_l1. "custom" is not constructible from parameters alone.
GeneratorSpec catalog(std::string_view name, const CatalogParams& params, int dim = 1);

/// Copy of `g` with the Euclidean representation constant replaced.
GeneratorSpec with_rep_constant(GeneratorSpec g, double c_rep);

/// Sampling box for Lipschitz estimation: t in [t_lo, t_hi], (y, z) in [lo, hi].
struct SampleBox {
    double t_lo = 0.0;
    double t_hi = 1.0;
    Vec lo;  // length 1 + d
    Vec hi;

    static SampleBox cube(int dim, double half_width, double t_hi = 1.0);
};

/// Largest observed quotient |f(t,x1) - f(t,x2)| / (|y1-y2| + |z1-z2|) over `samples`
/// random pairs sharing the same t. Deterministic for a given seed.
double estimate_lipschitz(const GeneratorSpec& g, const SampleBox& box, int samples, std::uint64_t seed);

/// Terminal condition and optional obstacle of a (reflected) BSDE.
///
/// The terminal field may sit at any level L <= N; solvers then work on [0, t_L].
/// Obstacle fields, when present, cover levels 0..L.
struct BSDEProblem {
    GeneratorSpec generator;
    NodeField terminal;
    std::optional<std::vector<NodeField>> obstacle;

    int terminal_level() const { return terminal.level; }
    bool reflected() const { return obstacle.has_value(); }
};

namespace terminals {

NodeField bt(const Lattice& lat, int level);
NodeField bt_squared(const Lattice& lat, int level);
NodeField call(const Lattice& lat, int level, double strike);
NodeField put(const Lattice& lat, int level, double strike);

} // namespace terminals

namespace obstacles {

/// S evaluated on every node of levels 0..last_level.
std::vector<NodeField> from_function(const Lattice& lat, int last_level,
                                     const std::function<double(double, const Vec&)>& fn);
/// S_t = a + b t
std::vector<NodeField> linear(const Lattice& lat, int last_level, double a, double b);
/// S_t = (K - B_t)^+ on the first coordinate
std::vector<NodeField> put_payoff(const Lattice& lat, int last_level, double strike);

} // namespace obstacles

} // namespace gbsde

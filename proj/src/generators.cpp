#include "gamebsde/generators.hpp"

#include "gamebsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gbsde {

namespace {

const double kSqrt2 = std::sqrt(2.0);

GeneratorSpec make(std::string name, int dim, GeneratorSpec::Eval eval, double c_l1, bool concave) {
    if (dim < 1)
        throw InvalidArgument("generator dimension must be >= 1");
    GeneratorSpec g;
    g.name = std::move(name);
    g.dim = dim;
    g.eval = std::move(eval);
    g.c_l1 = c_l1;
    g.c_rep = kSqrt2 * c_l1;
    g.concave = concave;
    return g;
}

void require_nonnegative_mu(double mu) {
    if (!(mu >= 0.0))
        throw InvalidArgument("mu must be non-negative");
}

} // namespace

namespace generators {

GeneratorSpec zero(int dim) {
    return make("zero", dim, [](double, double, const Vec&) { return 0.0; }, 0.0, true);
}

GeneratorSpec constant(double c, int dim) {
    return make("constant", dim, [c](double, double, const Vec&) { return c; }, 0.0, true);
}

GeneratorSpec affine(double a, double b1, const Vec& b2) {
    const int dim = static_cast<int>(b2.size());
    if (dim < 1)
        throw InvalidArgument("affine generator needs a non-empty z-coefficient");
    const double c_l1 = std::max(std::abs(b1), b2.norm());
    return make(
        "affine", dim, [a, b1, b2](double, double y, const Vec& z) { return a + b1 * y + b2.dot(z); }, c_l1, true);
}

GeneratorSpec mu_norm(double mu, int dim) {
    require_nonnegative_mu(mu);
    return make(
        "mu_norm", dim, [mu](double, double y, const Vec& z) { return mu * (std::abs(y) + z.norm()); }, mu, false);
}

GeneratorSpec mu_abs_z(double mu, int dim) {
    require_nonnegative_mu(mu);
    return make("mu_abs_z", dim, [mu](double, double, const Vec& z) { return mu * z.norm(); }, mu, false);
}

GeneratorSpec neg_mu_abs_z(double mu, int dim) {
    require_nonnegative_mu(mu);
    return make("neg_mu_abs_z", dim, [mu](double, double, const Vec& z) { return -mu * z.norm(); }, mu, true);
}

GeneratorSpec custom(std::string name, int dim, GeneratorSpec::Eval eval, double c_l1, std::optional<double> c_rep,
                     bool concave) {
    if (!(c_l1 >= 0.0))
        throw InvalidArgument("Lipschitz constant must be non-negative");
    GeneratorSpec g = make(std::move(name), dim, std::move(eval), c_l1, concave);
    if (c_rep)
        g = with_rep_constant(std::move(g), *c_rep);
    return g;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"zero",     "constant", "affine",      "mu_norm",
                                                "mu_abs_z", "neg_mu_abs_z", "custom"};
    return names;
}

} // namespace generators

GeneratorSpec catalog(std::string_view name, const CatalogParams& params, int dim) {
    GeneratorSpec g;
    if (name == "zero") {
        g = generators::zero(dim);
    } else if (name == "constant") {
        g = generators::constant(params.c, dim);
    } else if (name == "affine") {
        Vec b2 = params.b2.size() == 0 ? Vec::Zero(dim) : params.b2;
        if (b2.size() != dim)
            throw InvalidArgument("affine: b2 must have length d");
        g = generators::affine(params.a, params.b1, b2);
    } else if (name == "mu_norm") {
        g = generators::mu_norm(params.mu, dim);
    } else if (name == "mu_abs_z") {
        g = generators::mu_abs_z(params.mu, dim);
    } else if (name == "neg_mu_abs_z") {
        g = generators::neg_mu_abs_z(params.mu, dim);
    } else if (name == "custom") {
        throw InvalidArgument("custom generators must be built with generators::custom");
    } else {
        throw InvalidArgument("unknown generator '" + std::string(name) + "'");
    }
    if (params.c_rep)
        g = with_rep_constant(std::move(g), *params.c_rep);
    return g;
}

GeneratorSpec with_rep_constant(GeneratorSpec g, double c_rep) {
    if (!(c_rep >= g.c_l1))
        throw InvalidArgument("representation constant must be >= the l1 Lipschitz constant");
    g.c_rep = c_rep;
    return g;
}

SampleBox SampleBox::cube(int dim, double half_width, double t_hi) {
    return {0.0, t_hi, Vec::Constant(dim + 1, -half_width), Vec::Constant(dim + 1, half_width)};
}

double estimate_lipschitz(const GeneratorSpec& g, const SampleBox& box, int samples, std::uint64_t seed) {
    if (samples < 2)
        throw InvalidArgument("estimate_lipschitz needs at least two samples");
    if (box.lo.size() != g.dim + 1 || box.hi.size() != g.dim + 1)
        throw InvalidArgument("sample box must have dimension 1 + d");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw = [&] {
        Vec x(g.dim + 1);
        for (Index i = 0; i < x.size(); ++i)
            x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * unit(rng);
        return x;
    };
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double t = box.t_lo + (box.t_hi - box.t_lo) * unit(rng);
        const Vec x1 = draw();
        const Vec x2 = draw();
        const double dist = std::abs(x1(0) - x2(0)) + (x1.tail(g.dim) - x2.tail(g.dim)).norm();
        if (dist == 0.0)
            continue;
        best = std::max(best, std::abs(g.at_point(t, x1) - g.at_point(t, x2)) / dist);
    }
    return best;
}

namespace terminals {

NodeField bt(const Lattice& lat, int level) {
    return lat.brownian_coordinate(level, 0);
}

NodeField bt_squared(const Lattice& lat, int level) {
    return lat.from_state(level, [](const Vec& b) { return b.squaredNorm(); });
}

NodeField call(const Lattice& lat, int level, double strike) {
    return lat.from_state(level, [strike](const Vec& b) { return std::max(b(0) - strike, 0.0); });
}

NodeField put(const Lattice& lat, int level, double strike) {
    return lat.from_state(level, [strike](const Vec& b) { return std::max(strike - b(0), 0.0); });
}

} // namespace terminals

namespace obstacles {

std::vector<NodeField> from_function(const Lattice& lat, int last_level,
                                     const std::function<double(double, const Vec&)>& fn) {
    if (last_level < 0 || last_level > lat.steps())
        throw LevelMismatch("obstacle level range outside the lattice");
    std::vector<NodeField> s;
    s.reserve(static_cast<std::size_t>(last_level) + 1);
    for (int k = 0; k <= last_level; ++k) {
        s.push_back(lat.from_time_state(k, fn));
        for (Index n = 0; n < s.back().values.size(); ++n)
            if (!std::isfinite(s.back().values(n)))
                throw InvalidArgument("obstacle must be finite on every node");
    }
    return s;
}

std::vector<NodeField> linear(const Lattice& lat, int last_level, double a, double b) {
    return from_function(lat, last_level, [a, b](double t, const Vec&) { return a + b * t; });
}

std::vector<NodeField> put_payoff(const Lattice& lat, int last_level, double strike) {
    return from_function(lat, last_level, [strike](double, const Vec& x) { return std::max(strike - x(0), 0.0); });
}

} // namespace obstacles

} // namespace gbsde

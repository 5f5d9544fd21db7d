#include "gamebsde/lattice.hpp"

#include "gamebsde/errors.hpp"

#include <cmath>
#include <string>

namespace gbsde {

Lattice::Lattice(double horizon, int steps, int dim)
    : horizon_(horizon), steps_(steps), dim_(dim), dt_(horizon / steps), sqrt_dt_(std::sqrt(horizon / steps)) {}

Lattice Lattice::build(double horizon, int steps, int dim) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidArgument("lattice horizon must be positive and finite");
    if (steps < 1)
        throw InvalidArgument("lattice needs at least one step");
    if (dim < 1 || dim > 3)
        throw InvalidArgument("lattice dimension must be in [1, 3], got " + std::to_string(dim));
    return Lattice(horizon, steps, dim);
}

Index Lattice::level_size(int level) const {
    Index n = 1;
    for (int i = 0; i < dim_; ++i)
        n *= level + 1;
    return n;
}

Vec Lattice::increment(int outcome) const {
    Vec db(dim_);
    for (int i = 0; i < dim_; ++i)
        db(i) = sign(outcome, i) * sqrt_dt_;
    return db;
}

Eigen::VectorXi Lattice::up_counts(int level, Index node) const {
    Eigen::VectorXi up(dim_);
    const Index base = level + 1;
    for (int i = dim_ - 1; i >= 0; --i) {
        up(i) = static_cast<int>(node % base);
        node /= base;
    }
    return up;
}

Index Lattice::index_of(int level, const Eigen::VectorXi& up) const {
    Index idx = 0;
    for (int i = 0; i < dim_; ++i)
        idx = idx * (level + 1) + up(i);
    return idx;
}

Index Lattice::child(int level, Index node, int outcome) const {
    Index idx = 0;
    const Index base = level + 1;
    Index stride = 1;
    // Walk coordinates from least significant; avoids materialising the up-count vector.
    for (int i = dim_ - 1; i >= 0; --i) {
        const Index u = node % base + (sign(outcome, i) > 0 ? 1 : 0);
        node /= base;
        idx += u * stride;
        stride *= base + 1;
    }
    return idx;
}

Vec Lattice::brownian(int level, Index node) const {
    const Eigen::VectorXi up = up_counts(level, node);
    Vec b(dim_);
    for (int i = 0; i < dim_; ++i)
        b(i) = (2 * up(i) - level) * sqrt_dt_;
    return b;
}

NodeField Lattice::constant(int level, double value) const {
    return {level, Vec::Constant(level_size(level), value)};
}

NodeField Lattice::from_state(int level, const std::function<double(const Vec&)>& fn) const {
    NodeField f{level, Vec(level_size(level))};
    for (Index n = 0; n < f.values.size(); ++n)
        f.values(n) = fn(brownian(level, n));
    return f;
}

NodeField Lattice::from_time_state(int level, const std::function<double(double, const Vec&)>& fn) const {
    const double t = time(level);
    return from_state(level, [&](const Vec& b) { return fn(t, b); });
}

NodeField Lattice::brownian_coordinate(int level, int coord) const {
    return from_state(level, [coord](const Vec& b) { return b(coord); });
}

Vec Lattice::level_probabilities(int level) const {
    // Forward propagation keeps every entry a dyadic rational, exact in double for
    // the lattice sizes allowed here.
    Vec p = Vec::Ones(1);
    const double w = 1.0 / outcomes();
    for (int k = 0; k < level; ++k) {
        Vec next = Vec::Zero(level_size(k + 1));
        for (Index n = 0; n < p.size(); ++n)
            for (int o = 0; o < outcomes(); ++o)
                next(child(k, n, o)) += w * p(n);
        p = std::move(next);
    }
    return p;
}

std::vector<bool> Lattice::cone(int from, const std::vector<bool>& from_mask, int to) const {
    if (from > to || static_cast<Index>(from_mask.size()) != level_size(from))
        throw LevelMismatch("cone: bad level range or mask size");
    std::vector<bool> mask = from_mask;
    for (int k = from; k < to; ++k) {
        std::vector<bool> next(static_cast<std::size_t>(level_size(k + 1)), false);
        for (Index n = 0; n < level_size(k); ++n) {
            if (!mask[static_cast<std::size_t>(n)])
                continue;
            for (int o = 0; o < outcomes(); ++o)
                next[static_cast<std::size_t>(child(k, n, o))] = true;
        }
        mask = std::move(next);
    }
    return mask;
}

void Lattice::check_field(const NodeField& f) const {
    if (f.level < 0 || f.level > steps_)
        throw LevelMismatch("field level " + std::to_string(f.level) + " outside [0, " + std::to_string(steps_) + "]");
    if (f.values.size() != level_size(f.level))
        throw LevelMismatch("field at level " + std::to_string(f.level) + " has " + std::to_string(f.values.size()) +
                            " values, expected " + std::to_string(level_size(f.level)));
}

NodeField cond_expect(const NodeField& f, const Lattice& lat) {
    lat.check_field(f);
    if (f.level < 1)
        throw LevelMismatch("cond_expect needs a field at level >= 1");
    const int k = f.level - 1;
    const double w = 1.0 / lat.outcomes();
    NodeField out{k, Vec(lat.level_size(k))};
    for (Index n = 0; n < out.values.size(); ++n) {
        double acc = 0.0;
        for (int o = 0; o < lat.outcomes(); ++o)
            acc += f.values(lat.child(k, n, o));
        out.values(n) = acc * w;
    }
    return out;
}

VectorField extract_z(const NodeField& f, const Lattice& lat) {
    lat.check_field(f);
    if (f.level < 1)
        throw LevelMismatch("extract_z needs a field at level >= 1");
    const int k = f.level - 1;
    const int d = lat.dim();
    const double scale = 1.0 / (lat.outcomes() * lat.sqrt_dt());
    VectorField out{k, Mat::Zero(lat.level_size(k), d)};
    for (Index n = 0; n < out.values.rows(); ++n) {
        for (int o = 0; o < lat.outcomes(); ++o) {
            const double v = f.values(lat.child(k, n, o));
            for (int i = 0; i < d; ++i)
                out.values(n, i) += lat.sign(o, i) * v;
        }
        out.values.row(n) *= scale;
    }
    return out;
}

} // namespace gbsde

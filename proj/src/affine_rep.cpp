#include "gamebsde/affine_rep.hpp"

#include "gamebsde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gbsde {

namespace {

constexpr double kBallSlack = 1e-12;

} // namespace

GridConfig GridConfig::uniform(int dim, double half_width, double step, bool adaptive) {
    GridConfig cfg;
    cfg.alpha_lo = Vec::Constant(dim + 1, -half_width);
    cfg.alpha_hi = Vec::Constant(dim + 1, half_width);
    cfg.alpha_step = step;
    cfg.beta_resolution = std::max(1, static_cast<int>(std::lround(1.0 / step)));
    cfg.adaptive = adaptive;
    return cfg;
}

void GridConfig::validate(int dim) const {
    if (alpha_lo.size() != dim + 1 || alpha_hi.size() != dim + 1)
        throw InvalidArgument("alpha box must have dimension 1 + d");
    if (!(alpha_step > 0.0))
        throw InvalidArgument("alpha step must be positive");
    if ((alpha_hi - alpha_lo).minCoeff() < 0.0)
        throw InvalidArgument("empty alpha grid: lower bound above upper bound");
    if (beta_resolution < 1)
        throw InvalidArgument("empty beta grid: resolution must be >= 1");
}

Mat box_points(const Vec& lo, const Vec& hi, const Vec& step) {
    const Index n = lo.size();
    Eigen::VectorXi counts(n);
    Index total = 1;
    for (Index i = 0; i < n; ++i) {
        if (!(step(i) > 0.0) || hi(i) < lo(i))
            throw InvalidArgument("box_points: invalid box or step");
        counts(i) = static_cast<int>(std::floor((hi(i) - lo(i)) / step(i) + 1e-9)) + 1;
        total *= counts(i);
    }
    Mat pts(n, total);
    Eigen::VectorXi j = Eigen::VectorXi::Zero(n);
    for (Index c = 0; c < total; ++c) {
        for (Index i = 0; i < n; ++i)
            pts(i, c) = lo(i) + j(i) * step(i);
        for (Index i = n - 1; i >= 0; --i) {
            if (++j(i) < counts(i))
                break;
            j(i) = 0;
        }
    }
    return pts;
}

ControlGrids ControlGrids::resolve(const GridConfig& cfg, int dim) {
    cfg.validate(dim);
    ControlGrids g;
    g.adaptive = cfg.adaptive;
    g.alpha = box_points(cfg.alpha_lo, cfg.alpha_hi, Vec::Constant(dim + 1, cfg.alpha_step));

    const int r = cfg.beta_resolution;
    const int n = dim + 1;
    std::vector<Eigen::VectorXi> pts;
    Eigen::VectorXi v = Eigen::VectorXi::Constant(n, -r);
    for (;;) {
        if (v.squaredNorm() <= r * r)
            pts.push_back(v);
        Index i = n - 1;
        for (; i >= 0; --i) {
            if (++v(i) <= r)
                break;
            v(i) = -r;
        }
        if (i < 0)
            break;
    }
    g.beta.resize(n, static_cast<Index>(pts.size()));
    for (std::size_t c = 0; c < pts.size(); ++c)
        g.beta.col(static_cast<Index>(c)) = pts[c].cast<double>() / static_cast<double>(r);
    return g;
}

double big_F(const GeneratorSpec& g, double t, const Vec& beta, const Vec& alpha) {
    if (beta.size() != g.dim + 1 || alpha.size() != g.dim + 1)
        throw InvalidArgument("big_F: beta and alpha must have dimension 1 + d");
    if (beta.norm() > 1.0 + kBallSlack)
        throw InvalidArgument("big_F: beta outside the closed unit ball");
    const double c = g.c_rep;
    return g.at_point(t, alpha) - c * beta(0) * alpha(0) - c * beta.tail(g.dim).dot(alpha.tail(g.dim));
}

namespace {

// dots(b) = <beta_b, w>, summed coordinate by coordinate in a fixed order so that the
// value attached to a grid pair never depends on where it sits in the scan.
void beta_dots(const Mat& beta_t, const Vec& w, Vec& dots) {
    dots.noalias() = beta_t.col(0) * w(0);
    for (Index i = 1; i < w.size(); ++i)
        dots += beta_t.col(i) * w(i);
}

void check_grids(const ControlGrids& grids, const Vec& x) {
    if (grids.alpha.cols() == 0 || grids.beta.cols() == 0)
        throw InvalidArgument("minmax: empty control grid");
    if (grids.alpha.rows() != x.size() || grids.beta.rows() != x.size())
        throw InvalidArgument("minmax: grid dimension does not match the point");
}

} // namespace

MinMaxResult minmax_scan(const std::function<double(const Vec&)>& f_alpha, double c_rep, const Vec& x,
                         const ControlGrids& grids) {
    check_grids(grids, x);

    MinMaxResult best;
    if (grids.adaptive) {
        // alpha = x collapses the bracket to f(x) for every beta.
        best.value = f_alpha(x);
        best.alpha = x;
        best.alpha_index = -1;
        best.beta = grids.beta.col(0);
        best.beta_index = 0;
    }

    const Mat beta_t = grids.beta.transpose();
    const Index n_beta = beta_t.rows();
    Vec dots(n_beta);
    Vec w(x.size());
    Vec alpha(x.size());
    for (Index a = 0; a < grids.alpha.cols(); ++a) {
        alpha = grids.alpha.col(a);
        w = x - alpha;
        beta_dots(beta_t, w, dots);
        Index arg = 0;
        double inner = dots(0);
        for (Index b = 1; b < n_beta; ++b) {
            if (dots(b) < inner) {
                inner = dots(b);
                arg = b;
            }
        }
        bool injected = false;
        Vec injected_beta;
        if (grids.adaptive) {
            const double len = w.norm();
            if (len > 0.0) {
                injected_beta = -w / len;
                const double d = injected_beta.dot(w);
                if (d < inner) {
                    inner = d;
                    injected = true;
                }
            }
        }
        const double value = f_alpha(alpha) + c_rep * inner;
        if (value > best.value) {
            best.value = value;
            best.alpha = alpha;
            best.alpha_index = a;
            best.beta = injected ? injected_beta : Vec(grids.beta.col(arg));
            best.beta_index = injected ? -1 : arg;
        }
    }
    return best;
}

double minmax_scan_reversed(const std::function<double(const Vec&)>& f_alpha, double c_rep, const Vec& x,
                            const ControlGrids& grids) {
    check_grids(grids, x);
    const Mat beta_t = grids.beta.transpose();
    Vec outer = Vec::Constant(beta_t.rows(), -std::numeric_limits<double>::infinity());
    if (grids.adaptive)
        outer.setConstant(f_alpha(x));
    Vec dots(beta_t.rows());
    for (Index a = 0; a < grids.alpha.cols(); ++a) {
        const Vec alpha = grids.alpha.col(a);
        beta_dots(beta_t, x - alpha, dots);
        const double fa = f_alpha(alpha);
        outer = outer.array().max(c_rep * dots.array() + fa).matrix();
    }
    return outer.minCoeff();
}

MinMaxResult minmax_eval_detail(const GeneratorSpec& g, double t, const Vec& x, const ControlGrids& grids) {
    if (x.size() != g.dim + 1)
        throw InvalidArgument("minmax_eval: point must have dimension 1 + d");
    return minmax_scan([&](const Vec& a) { return g.at_point(t, a); }, g.c_rep, x, grids);
}

double minmax_eval(const GeneratorSpec& g, double t, const Vec& x, const GridConfig& grids) {
    return minmax_eval_detail(g, t, x, ControlGrids::resolve(grids, g.dim)).value;
}

double fenchel_transform(const GeneratorSpec& g, double t, const Vec& beta, const SupGrid& sup_grid) {
    const int n = g.dim + 1;
    if (beta.size() != n)
        throw InvalidArgument("fenchel_transform: beta must have dimension 1 + d");
    if (!(sup_grid.step > 0.0) || !(sup_grid.half_width > 0.0))
        throw InvalidArgument("fenchel_transform: invalid sup grid");
    const int m = std::max(1, static_cast<int>(std::lround(sup_grid.half_width / sup_grid.step)));
    const int outer_m = 2 * m;

    const double origin = g.at_point(t, Vec::Zero(n));
    double sup_inner = origin;
    double sup_outer = origin;
    Eigen::VectorXi j = Eigen::VectorXi::Constant(n, -outer_m);
    Vec x(n);
    for (;;) {
        x = j.cast<double>() * sup_grid.step;
        const double v = g.at_point(t, x) - beta.dot(x);
        sup_outer = std::max(sup_outer, v);
        if (j.cwiseAbs().maxCoeff() <= m)
            sup_inner = std::max(sup_inner, v);
        Index i = n - 1;
        for (; i >= 0; --i) {
            if (++j(i) <= outer_m)
                break;
            j(i) = -outer_m;
        }
        if (i < 0)
            break;
    }
    const double gain_inner = sup_inner - origin;
    const double gain_outer = sup_outer - origin;
    const double noise = 1e-9 * (1.0 + std::abs(origin));
    if (gain_outer > 1.5 * gain_inner + noise)
        return std::numeric_limits<double>::infinity();
    return sup_outer;
}

FenchelDual make_fenchel_dual(const GeneratorSpec& g, double t, const Mat& candidates, const SupGrid& sup_grid) {
    if (candidates.rows() != g.dim + 1)
        throw InvalidArgument("make_fenchel_dual: candidates must have 1 + d rows");
    std::vector<Index> keep;
    std::vector<double> vals;
    for (Index c = 0; c < candidates.cols(); ++c) {
        const double v = fenchel_transform(g, t, candidates.col(c), sup_grid);
        if (std::isfinite(v)) {
            keep.push_back(c);
            vals.push_back(v);
        }
    }
    FenchelDual dual;
    dual.t = t;
    dual.points.resize(candidates.rows(), static_cast<Index>(keep.size()));
    dual.values.resize(static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        dual.points.col(static_cast<Index>(i)) = candidates.col(keep[i]);
        dual.values(static_cast<Index>(i)) = vals[i];
    }
    return dual;
}

InfRepResult inf_representation_eval(const FenchelDual& dual, double y, const Vec& z) {
    if (dual.size() == 0)
        throw InvalidArgument("inf representation: empty dual domain");
    if (z.size() != dual.points.rows() - 1)
        throw InvalidArgument("inf representation: z has the wrong dimension");
    InfRepResult best{std::numeric_limits<double>::infinity(), -1};
    for (Index j = 0; j < dual.size(); ++j) {
        const double v = dual.values(j) + dual.points(0, j) * y + dual.points.col(j).tail(z.size()).dot(z);
        if (v < best.value) {
            best.value = v;
            best.index = j;
        }
    }
    return best;
}

} // namespace gbsde

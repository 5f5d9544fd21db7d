#pragma once

#include "gamebsde/generators.hpp"

#include <functional>
#include <limits>

namespace gbsde {

/// Compact discretisation of the control sets: a box grid for alpha in R^{1+d} and the
/// scaled integer points {v / r : |v| <= r} of the closed unit ball for beta.
///
/// In adaptive mode each evaluation at x additionally offers alpha = x, and for every alpha
/// the unit vector (alpha - x)/|alpha - x| as a beta candidate.
struct GridConfig {
    Vec alpha_lo;
    Vec alpha_hi;
    double alpha_step = 0.5;
    int beta_resolution = 4;
    bool adaptive = true;

    /// Cube [-half_width, half_width]^{1+d} with beta resolution round(1/step).
    static GridConfig uniform(int dim, double half_width, double step, bool adaptive);

    int point_dim() const { return static_cast<int>(alpha_lo.size()); }
    void validate(int dim) const;
};

/// Box grid lo + j*step (per coordinate), columns in lexicographic order, first coordinate
/// most significant.
Mat box_points(const Vec& lo, const Vec& hi, const Vec& step);

/// Materialised grids; alpha and beta points are stored column-wise.
struct ControlGrids {
    Mat alpha;
    Mat beta;
    bool adaptive = true;

    static ControlGrids resolve(const GridConfig& cfg, int dim);
};

/// F(t, beta, alpha) = f(t, alpha) - C <beta, alpha> with C = g.c_rep.
double big_F(const GeneratorSpec& g, double t, const Vec& beta, const Vec& alpha);

/// Outcome of one max-min scan. Injected candidates carry index -1.
struct MinMaxResult {
    double value = -std::numeric_limits<double>::infinity();
    Vec alpha;
    Vec beta;
    Index alpha_index = -1;
    Index beta_index = -1;
};

/// max over alpha of min over beta of f(alpha) + C <beta, x - alpha>, with f supplied as a
/// function of the stacked point alpha = (y, z). Ties go to the lowest index; in adaptive
/// mode the injected alpha = x is scanned first.
MinMaxResult minmax_scan(const std::function<double(const Vec&)>& f_alpha, double c_rep, const Vec& x,
                         const ControlGrids& grids);

/// min over beta of max over alpha, same bracket. Diagnostic only.
double minmax_scan_reversed(const std::function<double(const Vec&)>& f_alpha, double c_rep, const Vec& x,
                            const ControlGrids& grids);

/// Max-min representation of g(t, x) over the configured grids.
double minmax_eval(const GeneratorSpec& g, double t, const Vec& x, const GridConfig& grids);
MinMaxResult minmax_eval_detail(const GeneratorSpec& g, double t, const Vec& x, const ControlGrids& grids);

/// Symmetric sup grid {j * step : |j| <= half_width / step}^{1+d} for conjugate evaluation.
struct SupGrid {
    double half_width = 8.0;
    double step = 0.5;
};

/// Grid approximation of sup_{(y,z)} [f(t,y,z) - beta_1 y - <beta_2, z>].
///
/// The sup is taken over the grid and over the grid of twice the half-width; if the gain
/// over f(t,0,0) grows by more than a factor 1.5 the transform is reported as +infinity.
double fenchel_transform(const GeneratorSpec& g, double t, const Vec& beta, const SupGrid& sup_grid);

/// Finite part of a conjugate, sampled on a set of beta points.
struct FenchelDual {
    double t = 0.0;
    Mat points;  // (1+d) x M
    Vec values;  // F at each point

    Index size() const { return values.size(); }
};

/// Evaluate the conjugate at each candidate column and keep those with a finite value.
FenchelDual make_fenchel_dual(const GeneratorSpec& g, double t, const Mat& candidates, const SupGrid& sup_grid);

struct InfRepResult {
    double value = 0.0;
    Index index = -1;
};

/// min over stored beta of F(beta) + beta_1 y + <beta_2, z>.
InfRepResult inf_representation_eval(const FenchelDual& dual, double y, const Vec& z);

} // namespace gbsde

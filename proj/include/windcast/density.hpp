#pragma once

#include "windcast/transforms.hpp"
#include "windcast/truncnorm.hpp"

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace windcast {

/**
 * Density tabulated on m equally spaced points x_i = i / (m - 1) of [0,1],
 * linearly interpolated between nodes. Construction rescales the values so
 * the trapezoid integral is 1; the cdf is the exact integral of the
 * interpolant.
 */
class GriddedDensity {
public:
    explicit GriddedDensity(std::vector<double> pdf_values);

    static GriddedDensity uniform(std::size_t m = 512);
    /// sum_k w_k d_k; weights must be nonnegative and all grids the same size.
    static GriddedDensity mixture(std::span<const GriddedDensity> parts,
                                  std::span<const double> weights);

    std::size_t size() const { return pdf_.size(); }
    double spacing() const { return dx_; }
    double node(std::size_t i) const { return static_cast<double>(i) * dx_; }
    std::span<const double> pdf_values() const { return pdf_; }
    std::span<const double> cdf_values() const { return cdf_; }

    double pdf(double y) const;
    double cdf(double y) const;
    double mean() const;
    double quantile(double p) const;

    /// CSV with columns grid,pdf,cdf.
    void write_csv(std::ostream& os) const;

private:
    std::vector<double> pdf_;
    std::vector<double> cdf_;
    double dx_ = 0.0;
};

using DensityForecast = std::variant<TruncNorm, LogisticNormal, GriddedDensity>;

double density_pdf(const DensityForecast& d, double y);
double density_log_pdf(const DensityForecast& d, double y);
double density_cdf(const DensityForecast& d, double y);
double density_mean(const DensityForecast& d);
double density_quantile(const DensityForecast& d, double p);

/// Equally spaced evaluation points i / (m - 1) on [0,1] with cached logits
/// of the interior points.
class EvalGrid {
public:
    explicit EvalGrid(std::size_t m);

    std::size_t size() const { return points_.size(); }
    std::span<const double> points() const { return points_; }
    std::span<const double> logit_interior() const { return logits_; }

private:
    std::vector<double> points_;
    std::vector<double> logits_;
};

/// cdf at every grid point (out.size() == grid.size()).
void density_cdf_on_grid(const DensityForecast& d, const EvalGrid& grid, std::span<double> out);

}  // namespace windcast

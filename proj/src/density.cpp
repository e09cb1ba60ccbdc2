#include "windcast/density.hpp"

#include "windcast/normal.hpp"
#include "windcast/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace windcast {

GriddedDensity::GriddedDensity(std::vector<double> pdf_values) : pdf_(std::move(pdf_values)) {
    if (pdf_.size() < 2) throw std::invalid_argument("GriddedDensity needs at least 2 nodes");
    dx_ = 1.0 / static_cast<double>(pdf_.size() - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < pdf_.size(); ++i) {
        const double v = pdf_[i];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("GriddedDensity: pdf values must be finite and nonnegative");
        }
        const double w = (i == 0 || i + 1 == pdf_.size()) ? 0.5 : 1.0;
        area += w * v;
    }
    area *= dx_;
    if (!(area > 0.0)) throw std::invalid_argument("GriddedDensity: zero total mass");
    for (double& v : pdf_) v /= area;

    cdf_.resize(pdf_.size());
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i < pdf_.size(); ++i) {
        cdf_[i] = cdf_[i - 1] + 0.5 * dx_ * (pdf_[i - 1] + pdf_[i]);
    }
}

GriddedDensity GriddedDensity::uniform(std::size_t m) {
    return GriddedDensity(std::vector<double>(m, 1.0));
}

GriddedDensity GriddedDensity::mixture(std::span<const GriddedDensity> parts,
                                       std::span<const double> weights) {
    if (parts.empty() || parts.size() != weights.size()) {
        throw std::invalid_argument("mixture: parts and weights must be nonempty and aligned");
    }
    const std::size_t m = parts.front().size();
    std::vector<double> pdf(m, 0.0);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].size() != m) throw std::invalid_argument("mixture: grid sizes differ");
        if (!(weights[k] >= 0.0)) throw std::invalid_argument("mixture: negative weight");
        const auto src = parts[k].pdf_values();
        for (std::size_t i = 0; i < m; ++i) pdf[i] += weights[k] * src[i];
    }
    return GriddedDensity(std::move(pdf));
}

namespace {

struct Cell {
    std::size_t k;
    double u;  // offset from node k
};

Cell locate(double y, double dx, std::size_t m) {
    const double pos = y / dx;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    k = std::min(k, m - 2);
    return {k, y - static_cast<double>(k) * dx};
}

}  // namespace

double GriddedDensity::pdf(double y) const {
    if (y < 0.0 || y > 1.0) return 0.0;
    const auto [k, u] = locate(y, dx_, pdf_.size());
    return pdf_[k] + (pdf_[k + 1] - pdf_[k]) * (u / dx_);
}

double GriddedDensity::cdf(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const auto [k, u] = locate(y, dx_, pdf_.size());
    const double py = pdf_[k] + (pdf_[k + 1] - pdf_[k]) * (u / dx_);
    return std::clamp(cdf_[k] + 0.5 * u * (pdf_[k] + py), 0.0, 1.0);
}

double GriddedDensity::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < pdf_.size(); ++i) {
        const double a = node(i);
        const double b = node(i + 1);
        m += (2.0 * a + b) * pdf_[i] + (a + 2.0 * b) * pdf_[i + 1];
    }
    return m * dx_ / 6.0;
}

double GriddedDensity::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0,1)");
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void GriddedDensity::write_csv(std::ostream& os) const {
    os << "grid,pdf,cdf\n";
    char buf[96];
    for (std::size_t i = 0; i < pdf_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", node(i), pdf_[i], cdf_[i]);
        os << buf;
    }
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

double density_pdf(const DensityForecast& d, double y) {
    return std::visit(Overloaded{[y](const TruncNorm& t) { return truncnorm_pdf(t, y); },
                                 [y](const LogisticNormal& l) { return pushforward_pdf(l, y); },
                                 [y](const GriddedDensity& g) { return g.pdf(y); }},
                      d);
}

double density_log_pdf(const DensityForecast& d, double y) {
    return std::visit(
        Overloaded{[y](const TruncNorm& t) { return truncnorm_log_pdf(t, y); },
                   [y](const LogisticNormal& l) { return pushforward_log_pdf(l, y); },
                   [y](const GriddedDensity& g) { return std::log(g.pdf(y)); }},
        d);
}

double density_cdf(const DensityForecast& d, double y) {
    return std::visit(Overloaded{[y](const TruncNorm& t) { return truncnorm_cdf(t, y); },
                                 [y](const LogisticNormal& l) { return pushforward_cdf(l, y); },
                                 [y](const GriddedDensity& g) { return g.cdf(y); }},
                      d);
}

double density_mean(const DensityForecast& d) {
    return std::visit(Overloaded{[](const TruncNorm& t) { return truncnorm_mean(t); },
                                 [](const LogisticNormal& l) { return pushforward_mean(l); },
                                 [](const GriddedDensity& g) { return g.mean(); }},
                      d);
}

double density_quantile(const DensityForecast& d, double p) {
    return std::visit(
        Overloaded{[p](const TruncNorm& t) { return truncnorm_quantile(t, p); },
                   [p](const LogisticNormal& l) { return pushforward_quantile(l, p); },
                   [p](const GriddedDensity& g) { return g.quantile(p); }},
        d);
}

EvalGrid::EvalGrid(std::size_t m) {
    if (m < 3) throw std::invalid_argument("EvalGrid needs at least 3 points");
    points_.resize(m);
    const double dx = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) points_[i] = static_cast<double>(i) * dx;
    points_.back() = 1.0;
    logits_.resize(m - 2);
    for (std::size_t i = 1; i + 1 < m; ++i) logits_[i - 1] = logistic_fwd(points_[i]);
}

void density_cdf_on_grid(const DensityForecast& d, const EvalGrid& grid, std::span<double> out) {
    const std::size_t m = grid.size();
    if (out.size() != m) throw std::invalid_argument("density_cdf_on_grid: size mismatch");

    if (const auto* ln = std::get_if<LogisticNormal>(&d)) {
        const double inv_sd = 1.0 / std::sqrt(ln->z_var);
        simd::normal_cdf_affine(grid.logit_interior(), inv_sd, -ln->z_mean * inv_sd,
                                out.subspan(1, m - 2));
    } else if (const auto* tn = std::get_if<TruncNorm>(&d)) {
        const double s = tn->scale();
        const double a = -tn->loc / s;
        const double z = tn->normalizer();
        const auto interior = grid.points().subspan(1, m - 2);
        auto dst = out.subspan(1, m - 2);
        if (a > 0.0) {
            // Mass sits in the upper tail: F = (Q(a) - Q(t)) / Z with Q(t) = Phi(-t).
            simd::normal_cdf_affine(interior, -1.0 / s, tn->loc / s, dst);
            const double qa = normal_sf(a);
            for (double& v : dst) v = (qa - v) / z;
        } else {
            simd::normal_cdf_affine(interior, 1.0 / s, -tn->loc / s, dst);
            const double pa = normal_cdf(a);
            for (double& v : dst) v = (v - pa) / z;
        }
        for (double& v : dst) v = std::clamp(v, 0.0, 1.0);
    } else {
        const auto& g = std::get<GriddedDensity>(d);
        const auto pts = grid.points();
        for (std::size_t i = 1; i + 1 < m; ++i) out[i] = g.cdf(pts[i]);
    }
    out[0] = 0.0;
    out[m - 1] = 1.0;
}

}  // namespace windcast

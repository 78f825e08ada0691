#include "glthermo/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "glthermo/parallel.hpp"

namespace glthermo {

namespace {

const double nan_value = std::numeric_limits<double>::quiet_NaN();

struct LinearFit {
  double c0 = 0.0, c1 = 0.0;
  double se0 = 0.0;
  double rms = 0.0;
  double max_resid = 0.0;
  double propagated = 0.0;  // sum |w_i| err_i for the intercept
};

// y = c0 + c1 x by least squares.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& err) {
  const std::size_t n = x.size();
  LinearFit f;
  if (n == 1) {
    f.c0 = y[0];
    f.propagated = err[0];
    return f;
  }
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd Y(n);
  for (std::size_t i = 0; i < n; ++i) A(i, 0) = 1.0, A(i, 1) = x[i], Y[i] = y[i];
  Eigen::Matrix2d inv = (A.transpose() * A).inverse();
  Eigen::Vector2d c = inv * (A.transpose() * Y);
  f.c0 = c[0];
  f.c1 = c[1];
  Eigen::VectorXd r = A * c - Y;
  f.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  f.max_resid = r.cwiseAbs().maxCoeff();
  if (n > 2) f.se0 = std::sqrt(r.squaredNorm() / static_cast<double>(n - 2) * inv(0, 0));
  Eigen::RowVectorXd w = (inv * A.transpose()).row(0);
  for (std::size_t i = 0; i < n; ++i) f.propagated += std::abs(w[static_cast<Eigen::Index>(i)]) * err[i];
  return f;
}

double power_fit_exponent(const std::vector<SeriesPoint>& pts) {
  if (pts.size() < 3) return nan_value;
  std::vector<double> y, zero(pts.size(), 0.0);
  for (const auto& p : pts) y.push_back(p.density);
  auto ssr = [&](double e) {
    std::vector<double> x;
    for (const auto& p : pts) x.push_back(std::pow(p.scale, -e));
    LinearFit f = linear_fit(x, y, zero);
    return f.rms;
  };
  double best = 1.0, best_v = ssr(1.0);
  for (int i = 1; i <= 400; ++i) {
    double e = 0.01 * i;
    double v = ssr(e);
    if (v < best_v) best_v = v, best = e;
  }
  return best;
}

ThermoSeries fit_series(std::vector<SeriesPoint> points, bool require_monotone, double noise) {
  std::sort(points.begin(), points.end(), [](auto& a, auto& b) { return a.scale < b.scale; });
  ThermoSeries s;
  s.points = points;
  if (points.empty()) throw std::invalid_argument("series has no points");
  double lo = points[0].density, hi = points[0].density, perr = 0.0;
  for (const auto& p : points) {
    lo = std::min(lo, p.density);
    hi = std::max(hi, p.density);
    perr = std::max(perr, p.error);
  }
  if (hi - lo <= 1e-14) {
    s.limit = points.back().density;
    s.fit_constant = 0.0;
    s.limit_error = perr;
    s.fit_exponent = nan_value;
    return s;
  }
  std::vector<double> x, y, e;
  for (const auto& p : points) {
    x.push_back(1.0 / p.scale);
    y.push_back(p.density);
    e.push_back(p.error);
  }
  LinearFit f = linear_fit(x, y, e);
  s.limit = f.c0;
  s.fit_constant = f.c1;
  s.residual = f.rms;
  s.limit_error = f.se0 + f.max_resid + f.propagated;
  s.fit_exponent = power_fit_exponent(points);
  if (require_monotone) {
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      double allow = points[i].error + points[i + 1].error + noise;
      if (points[i + 1].density > points[i].density + allow) {
        s.flagged = true;
        s.note = "densities increase with the side beyond solver noise";
      }
    }
    for (const auto& p : points)
      if (p.density < s.limit - s.limit_error - p.error - noise) {
        s.flagged = true;
        if (s.note.empty()) s.note = "a density lies below the fitted limit";
      }
    if (s.flagged) s.limit = nan_value;
  }
  return s;
}

}  // namespace

ThermoSeries fit_inverse_scale(std::vector<SeriesPoint> points, bool require_monotone, double noise) {
  return fit_series(std::move(points), require_monotone, noise);
}

ThermoSeries fit_linear(std::vector<SeriesPoint> points) {
  std::vector<double> x, y, e;
  for (const auto& p : points) {
    x.push_back(p.scale);
    y.push_back(p.density);
    e.push_back(p.error);
  }
  ThermoSeries s;
  s.points = points;
  LinearFit f = linear_fit(x, y, e);
  s.limit = f.c0;
  s.fit_constant = f.c1;
  s.residual = f.rms;
  s.limit_error = f.se0 + f.max_resid + f.propagated;
  return s;
}

ThermoSeries estimate_g(double b, const std::vector<double>& sides, const GOptions& opt) {
  if (sides.size() < 3) throw std::invalid_argument("estimate_g needs at least three sides");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (sides[i] < 4.0) throw std::invalid_argument("estimate_g needs sides >= 4");
    if (i && !(sides[i] > sides[i - 1])) throw std::invalid_argument("sides must increase");
  }
  if (opt.spacings.empty()) throw std::invalid_argument("at least one spacing is required");
  std::vector<SeriesPoint> pts;
  std::vector<OrderParameter> previous(opt.spacings.size());
  double noise = 0.0;
  for (double R : sides) {
    std::vector<MinimizeResult> rs;
    for (std::size_t k = 0; k < opt.spacings.size(); ++k) {
      GridSpec g = make_dirichlet_grid(2, R, opt.spacings[k]);
      MinimizeOptions mo = opt.minimize;
      const OrderParameter& prev = previous[k];
      if (opt.chain_warm_starts && prev.values.size() &&
          std::abs(prev.grid.spacing - g.spacing) <= 1e-12 * g.spacing && prev.grid.points_per_side < g.points_per_side)
        mo.warm_starts.push_back(embed_centered(prev, g));
      rs.push_back(minimize_on_grid(g, b, mo));
      previous[k] = rs.back().field;
    }
    SeriesPoint p;
    p.scale = R;
    const MinimizeResult& fine = rs.back();
    double tol_err = 10.0 * fine.tol_energy * std::max(1.0, std::abs(fine.energy)) / (R * R);
    if (rs.size() > 1) {
      Extrapolation ex = continuum_extrapolate(rs);
      p.density = ex.value / (R * R);
      p.error = ex.residual / (R * R) + tol_err;
      p.extrapolated = true;
    } else {
      p.density = fine.energy / (R * R);
      p.error = tol_err;
    }
    noise = std::max(noise, tol_err);
    pts.push_back(p);
  }
  ThermoSeries s = fit_series(std::move(pts), true, noise);
  s.b = b;
  return s;
}

LatticeSeries estimate_e2_lattice(const std::vector<int>& Ns, double spacing, const LatticeOptions& opt,
                                  bool keep_bands) {
  if (Ns.size() < 3) throw std::invalid_argument("lattice route needs at least three sizes");
  LatticeSeries out;
  out.results.resize(Ns.size());
  std::vector<LandauBand> bands(Ns.size());
  parallel_for(Ns.size(), opt.threads, [&](std::size_t i) {
    bands[i] = lowest_band(Ns[i], spacing, Ns[i] + 1, opt.band);
    out.results[i] = minimize_abrikosov(bands[i], opt.abrikosov);
    if (!keep_bands) bands[i] = LandauBand{bands[i].N, bands[i].side, bands[i].grid, bands[i].kinetic_scale,
                                           bands[i].eigenvalues, {}, {}, bands[i].gap_ratio,
                                           bands[i].band_deviation, bands[i].orthonormality_error,
                                           bands[i].iterations};
  });
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    SeriesPoint p;
    p.scale = bands[i].side;
    p.density = out.results[i].density;
    p.error = 10.0 * opt.abrikosov.tol_energy * std::abs(p.density);
    pts.push_back(p);
  }
  out.series = fit_inverse_scale(std::move(pts));
  out.bands = std::move(bands);
  return out;
}

GlRoute estimate_e2_gl(const std::vector<double>& bs, const GlRouteOptions& opt,
                       const std::vector<std::vector<double>>& explicit_sides) {
  if (bs.size() < 2) throw std::invalid_argument("GL route needs at least two values of b");
  if (!explicit_sides.empty() && explicit_sides.size() != bs.size())
    throw std::invalid_argument("one side list per b is required");
  std::vector<std::vector<double>> side_lists = explicit_sides;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    double b = bs[i];
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("GL route needs 0 < b < 1");
    const double need = std::pow(1.0 - b, -opt.coupling_exponent);
    if (explicit_sides.empty()) {
      side_lists.emplace_back();
      double base = std::max(opt.min_side, need);
      for (double f : opt.side_factors) side_lists.back().push_back(std::ceil(f * base));
    }
    for (double R : side_lists[i])
      if (R < need)
        throw std::invalid_argument("side " + std::to_string(R) + " is below (1-b)^{-" +
                                    std::to_string(opt.coupling_exponent) + "} for b = " + std::to_string(b));
  }
  GlRoute out;
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    double b = bs[i];
    ThermoSeries g = estimate_g(b, side_lists[i], opt.g);
    const double gam = (1.0 - b) * (1.0 - b);
    SeriesPoint p;
    p.scale = 1.0 - b;
    p.density = g.limit / gam;
    p.error = g.limit_error / gam;
    if (g.flagged) out.warnings.push_back("g series flagged at b = " + std::to_string(b) + ": " + g.note);
    if (!(p.density >= -0.5 && p.density < 0.0))
      out.warnings.push_back("ratio outside [-1/2, 0) at b = " + std::to_string(b));
    out.per_b.push_back(std::move(g));
    pts.push_back(p);
  }
  std::vector<SeriesPoint> sorted = pts;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.scale < b.scale; });
  bool up = true, down = true;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    double d = sorted[i + 1].density - sorted[i].density;
    double allow = sorted[i].error + sorted[i + 1].error;
    if (d > allow) down = false;
    if (d < -allow) up = false;
  }
  out.ratios_monotone = up || down;
  if (!out.ratios_monotone) out.warnings.push_back("ratios g(b)/(1-b)^2 are not monotone in b");
  out.series = fit_linear(std::move(pts));
  return out;
}

}  // namespace glthermo

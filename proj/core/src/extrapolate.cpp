#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "glthermo/minimize.hpp"

namespace glthermo {

Extrapolation continuum_extrapolate(std::vector<std::pair<double, double>> pts, double noise) {
  if (pts.size() < 2) throw std::invalid_argument("extrapolation needs at least two spacings");
  std::sort(pts.begin(), pts.end(), [](auto& x, auto& y) { return x.first > y.first; });
  Extrapolation ex;
  const std::size_t k = pts.size();
  double emax = 0.0;
  for (auto& p : pts) emax = std::max(emax, std::abs(p.second));
  const double eps = std::max(noise, 1e-13 * std::max(emax, 1e-300));

  bool same = true, up = true, down = true;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    double d = pts[i + 1].second - pts[i].second;
    if (std::abs(d) > eps) same = false;
    if (d > eps) down = false;
    if (d < -eps) up = false;
  }
  if (same) {
    ex.value = pts.back().second;
    ex.order = std::nan("");
    ex.flagged = true;
    ex.note = "identical energies at every spacing";
    return ex;
  }
  ex.monotone = up || down;
  if (!ex.monotone) {
    ex.flagged = true;
    ex.note = "energy is not monotone in the spacing";
  }

  auto richardson = [](const std::pair<double, double>& c, const std::pair<double, double>& f) {
    double r2 = (c.first / f.first) * (c.first / f.first);
    return f.second + (f.second - c.second) / (r2 - 1.0);
  };
  if (k == 2) {
    ex.value = richardson(pts[0], pts[1]);
    ex.order = std::nan("");
    ex.residual = std::abs(ex.value - pts[1].second);
    if (ex.note.empty()) ex.note = "order not fitted (two spacings)";
    return ex;
  }
  const auto& p1 = pts[k - 3];
  const auto& p2 = pts[k - 2];
  const auto& p3 = pts[k - 1];
  double ratio = (p1.second - p2.second) / (p2.second - p3.second);
  double order = std::nan("");
  if (ratio > 0.0 && std::isfinite(ratio)) {
    auto model = [&](double p) {
      return (std::pow(p1.first, p) - std::pow(p2.first, p)) / (std::pow(p2.first, p) - std::pow(p3.first, p));
    };
    double lo = 0.05, hi = 8.0;
    if ((model(lo) - ratio) * (model(hi) - ratio) <= 0.0) {
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((model(lo) - ratio) * (model(mid) - ratio) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      order = 0.5 * (lo + hi);
    }
  }
  ex.order = order;
  double rich_fine = richardson(p2, p3);
  double rich_coarse = richardson(p1, p2);
  if (order >= 1.5 && order <= 2.5) {
    ex.value = rich_fine;
    ex.residual = std::abs(rich_fine - rich_coarse);
    return ex;
  }
  ex.flagged = true;
  if (ex.note.empty()) ex.note = "fitted order outside [1.5, 2.5]; quadratic fit in the spacing used";
  Eigen::Matrix3d A;
  Eigen::Vector3d y;
  const std::pair<double, double>* q[3] = {&p1, &p2, &p3};
  for (int i = 0; i < 3; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = q[i]->first;
    A(i, 2) = q[i]->first * q[i]->first;
    y[i] = q[i]->second;
  }
  Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  ex.value = coef[0];
  if (k >= 4) {
    Eigen::MatrixXd B(k, 3);
    Eigen::VectorXd z(k);
    for (std::size_t i = 0; i < k; ++i) {
      B(i, 0) = 1.0;
      B(i, 1) = pts[i].first;
      B(i, 2) = pts[i].first * pts[i].first;
      z[i] = pts[i].second;
    }
    Eigen::VectorXd c = B.colPivHouseholderQr().solve(z);
    ex.residual = (B * c - z).norm() / std::sqrt(static_cast<double>(k));
  } else {
    ex.residual = std::abs(coef[0] - rich_fine);
  }
  return ex;
}

Extrapolation continuum_extrapolate(const std::vector<MinimizeResult>& results) {
  if (results.size() < 2) throw std::invalid_argument("extrapolation needs at least two results");
  std::vector<std::pair<double, double>> pts;
  double noise = 0.0;
  for (const auto& r : results) {
    const auto& f = results.front();
    if (std::abs(r.b - f.b) > 1e-12 || std::abs(r.side - f.side) > 1e-12 * f.side || r.bc != f.bc || r.dim != f.dim)
      throw std::invalid_argument("extrapolation inputs differ in b, side or boundary condition");
    pts.emplace_back(r.spacing, r.energy);
    noise = std::max(noise, 10.0 * r.tol_energy * std::max(1.0, std::abs(r.energy)));
  }
  return continuum_extrapolate(std::move(pts), noise);
}

}  // namespace glthermo

#include "glthermo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

namespace glthermo {

namespace {

double rdot(const Field& a, const Field& b) { return a.dot(b).real(); }

double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

struct History {
  std::deque<double> e;
  int window;
  bool flat(double tol) const {
    if (static_cast<int>(e.size()) <= window) return false;
    double now = e.back(), then = e.front();
    return std::abs(then - now) <= 0.1 * tol * std::max(std::abs(now), 1.0);
  }
  void push(double v) {
    e.push_back(v);
    if (static_cast<int>(e.size()) > window + 1) e.pop_front();
  }
};

OptimizerOutcome run_ncg(const Objective& obj, Field u, const OptimizerOptions& opt) {
  OptimizerOutcome out;
  Field g(u.size()), z(u.size()), d(u.size()), gn(u.size()), zn(u.size()), trial(u.size());
  double E = obj.value_gradient(u, g);
  obj.precondition(g, z);
  double gz = rdot(g, z);
  d = -z;
  History hist{{}, opt.window};
  int it = 0;
  bool converged = false;
  for (; it < opt.max_iterations; ++it) {
    double res = obj.residual(g);
    hist.push(E);
    if (res == 0.0 || (res < opt.tol_residual && hist.flat(opt.tol_energy))) {
      converged = true;
      break;
    }
    double slope = rdot(g, d);
    if (!(slope < 0.0)) {
      d = -z;
      slope = -gz;
    }
    auto c = obj.line_polynomial(u, d);
    double t = quartic_argmin(c);
    double En = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && t > 0.0; ++attempt) {
      trial = u + t * d;
      En = obj.value_gradient(trial, gn);
      if (En <= E) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (rdot(d, -z) < 0.999999 * std::sqrt(rdot(d, d) * rdot(z, z))) {
        d = -z;  // retry once along the preconditioned steepest descent
        continue;
      }
      converged = res < opt.tol_residual;
      break;
    }
    u.swap(trial);
    E = En;
    g.swap(gn);
    obj.precondition(g, zn);
    double gzn = rdot(g, zn);
    double beta = gz > 0.0 ? std::max(0.0, (gzn - rdot(g, z)) / gz) : 0.0;
    z.swap(zn);
    gz = gzn;
    d = beta * d - z;
  }
  out.u = std::move(u);
  out.energy = E;
  out.residual = obj.residual(g);
  out.iterations = it;
  out.converged = converged;
  return out;
}

OptimizerOutcome run_lbfgs(const Objective& obj, Field u, const OptimizerOptions& opt) {
  OptimizerOutcome out;
  const int M = std::max(1, opt.lbfgs_memory);
  std::deque<Field> S, Y;
  std::deque<double> rho;
  Field g(u.size()), gn(u.size()), d(u.size()), trial(u.size()), q(u.size());
  double E = obj.value_gradient(u, g);
  History hist{{}, opt.window};
  int it = 0;
  bool converged = false;
  std::vector<double> alpha(M);
  for (; it < opt.max_iterations; ++it) {
    double res = obj.residual(g);
    hist.push(E);
    if (res == 0.0 || (res < opt.tol_residual && hist.flat(opt.tol_energy))) {
      converged = true;
      break;
    }
    q = g;
    const int m = static_cast<int>(S.size());
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * rdot(S[i], q);
      q -= alpha[i] * Y[i];
    }
    double gamma = m ? rdot(S.back(), Y.back()) / rdot(Y.back(), Y.back()) : 1.0 / std::max(1.0, g.norm());
    q *= gamma;
    for (int i = 0; i < m; ++i) {
      double beta = rho[i] * rdot(Y[i], q);
      q += (alpha[i] - beta) * S[i];
    }
    d = -q;
    double slope = rdot(g, d);
    if (!(slope < 0.0)) {
      S.clear(), Y.clear(), rho.clear();
      d = -g / std::max(1.0, g.norm());
      slope = rdot(g, d);
    }
    double t = 1.0, En = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      trial = u + t * d;
      En = obj.value_gradient(trial, gn);
      if (En <= E + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear(), Y.clear(), rho.clear();
        continue;
      }
      converged = res < opt.tol_residual;
      break;
    }
    Field s = trial - u, y = gn - g;
    double sy = rdot(s, y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > M) S.pop_front(), Y.pop_front(), rho.pop_front();
    }
    u.swap(trial);
    g.swap(gn);
    E = En;
  }
  out.u = std::move(u);
  out.energy = E;
  out.residual = obj.residual(g);
  out.iterations = it;
  out.converged = converged;
  return out;
}

}  // namespace

std::vector<double> real_roots(std::vector<double> c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {};
  while (c.size() > 1 && std::abs(c.back()) <= 1e-13 * scale) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<double> roots;
  if (deg < 1) return roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<double> dc(deg);
  for (int k = 1; k <= deg; ++k) dc[k - 1] = k * c[k];
  for (int i = 0; i < deg; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
    double t = z.real();
    for (int k = 0; k < 4; ++k) {
      double dv = poly_eval(dc, t);
      if (dv == 0.0) break;
      double tn = t - poly_eval(c, t) / dv;
      if (!std::isfinite(tn)) break;
      t = tn;
    }
    roots.push_back(t);
  }
  return roots;
}

double quartic_argmin(const std::array<double, 5>& c) {
  if (!(c[1] < 0.0)) return 0.0;
  // rescale t so the derivative polynomial is well balanced
  double T;
  if (c[2] > 0.0)
    T = -c[1] / (2.0 * c[2]);
  else if (c[4] > 0.0)
    T = std::cbrt(-c[1] / c[4]);
  else
    return 0.0;
  if (!(T > 0.0) || !std::isfinite(T)) return 0.0;
  std::vector<double> dp{c[1] * T, 2.0 * c[2] * T * T, 3.0 * c[3] * T * T * T, 4.0 * c[4] * T * T * T * T};
  auto delta = [&](double tau) {
    double t = tau * T;
    return t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
  };
  double best = 0.0, best_val = 0.0;
  for (double tau : real_roots(dp)) {
    if (!(tau > 0.0)) continue;
    double v = delta(tau);
    if (v < best_val) best_val = v, best = tau;
  }
  if (best == 0.0 && c[2] > 0.0 && c[3] == 0.0 && c[4] == 0.0) best = 1.0;
  return best * T;
}

OptimizerOutcome minimize_objective(const Objective& obj, Field u0, const OptimizerOptions& opt) {
  return opt.method == Method::ncg ? run_ncg(obj, std::move(u0), opt) : run_lbfgs(obj, std::move(u0), opt);
}

}  // namespace glthermo

#include <cmath>
#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "glthermo/optimizer.hpp"

using namespace glthermo;

namespace {

double poly(const std::array<double, 5>& c, double t) { return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4]))); }

// E(u) = sum_p w_p (-|u_p|^2 + |u_p|^4 / 2) + sum_p k |u_{p+1} - u_p|^2 on a ring.
class RingObjective : public Objective {
 public:
  explicit RingObjective(int n) : n_(n) {}
  double value_gradient(const Field& u, Field& g) const override {
    g.setZero(u.size());
    double e = 0.0;
    for (int p = 0; p < n_; ++p) {
      double A = std::norm(u[p]);
      e += -A + 0.5 * A * A;
      g[p] += 2.0 * (A - 1.0) * u[p];
      int q = (p + 1) % n_;
      cplx d = u[q] - u[p];
      e += k_ * std::norm(d);
      g[q] += 2.0 * k_ * d;
      g[p] -= 2.0 * k_ * d;
    }
    return e;
  }
  std::array<double, 5> line_polynomial(const Field& u, const Field& d) const override {
    // |u + t d|^2 = A + 2 B t + C t^2
    std::array<double, 5> c{};
    for (int p = 0; p < n_; ++p) {
      double A = std::norm(u[p]), B = (std::conj(u[p]) * d[p]).real(), C = std::norm(d[p]);
      c[0] += -A + 0.5 * A * A;
      c[1] += -2.0 * B + 2.0 * A * B;
      c[2] += -C + 2.0 * B * B + A * C;
      c[3] += 2.0 * B * C;
      c[4] += 0.5 * C * C;
      int q = (p + 1) % n_;
      cplx du = u[q] - u[p], dd = d[q] - d[p];
      c[0] += k_ * std::norm(du);
      c[1] += 2.0 * k_ * (std::conj(du) * dd).real();
      c[2] += k_ * std::norm(dd);
    }
    return c;
  }
  double residual(const Field& g) const override { return g.cwiseAbs().maxCoeff() / 2.0; }

 private:
  int n_;
  double k_ = 0.3;
};

}  // namespace

TEST(Optimizer, RealRootsOfKnownPolynomial) {
  // (t - 1)(t + 2)(t - 3.5) = t^3 - 2.5 t^2 - 5.5 t + 7
  auto r = real_roots({7.0, -5.5, -2.5, 1.0});
  std::sort(r.begin(), r.end());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], -2.0, 1e-12);
  EXPECT_NEAR(r[1], 1.0, 1e-12);
  EXPECT_NEAR(r[2], 3.5, 1e-12);
  EXPECT_TRUE(real_roots({1.0, 0.0, 1.0}).empty());
}

TEST(Optimizer, QuarticArgminMatchesDenseSampling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 5> c{ud(rng), -std::abs(ud(rng)) - 0.01, ud(rng), ud(rng), std::abs(ud(rng)) + 0.01};
    double t = quartic_argmin(c);
    double bound = 1.0 + std::max({std::abs(c[1]), 2.0 * std::abs(c[2]), 3.0 * std::abs(c[3])}) / (4.0 * c[4]);
    double best = 0.0, best_val = poly(c, 0.0);
    for (int i = 1; i <= 400000; ++i) {
      double s = i * bound / 400000.0;
      double v = poly(c, s);
      if (v < best_val) best_val = v, best = s;
    }
    EXPECT_LE(poly(c, t), best_val + 1e-9);
    EXPECT_NEAR(t, best, 2e-5 * bound + 1e-6);
  }
}

TEST(Optimizer, QuarticArgminWithoutDescent) {
  EXPECT_EQ(quartic_argmin({0.0, 1.0, 1.0, 0.0, 1.0}), 0.0);
  EXPECT_NEAR(quartic_argmin({0.0, -2.0, 1.0, 0.0, 0.0}), 1.0, 1e-14);
}

TEST(Optimizer, BothMethodsReachTheSameRingMinimum) {
  RingObjective obj(40);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Field u0(40);
  for (auto& v : u0) v = 0.5 + 0.1 * cplx(nd(rng), nd(rng));
  OptimizerOptions o;
  o.tol_residual = 1e-9;
  auto a = minimize_objective(obj, u0, o);
  o.method = Method::lbfgs;
  auto b = minimize_objective(obj, u0, o);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  // global minimum is any constant of modulus one: energy -n/2
  EXPECT_NEAR(a.energy, -20.0, 1e-8);
  EXPECT_NEAR(b.energy, -20.0, 1e-8);
}

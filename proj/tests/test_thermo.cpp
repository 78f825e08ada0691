#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "glthermo/property_suite.hpp"
#include "glthermo/thermo.hpp"

using namespace glthermo;

namespace {

std::vector<SeriesPoint> synthetic(double g, double C, std::vector<double> sides, double jitter = 0.0,
                                   std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SeriesPoint> pts;
  for (double R : sides) {
    SeriesPoint p;
    p.scale = R;
    p.density = g + C / R + jitter * u(rng);
    p.error = jitter;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(Thermo, InverseScaleFitRecoversExactModel) {
  ThermoSeries s = fit_inverse_scale(synthetic(-0.3, 0.7, {20, 8, 12, 16}));
  EXPECT_NEAR(s.limit, -0.3, 1e-12);
  EXPECT_NEAR(s.fit_constant, 0.7, 1e-11);
  EXPECT_LT(s.residual, 1e-13);
  EXPECT_NEAR(s.fit_exponent, 1.0, 0.011);
  EXPECT_DOUBLE_EQ(s.points.front().scale, 8.0);
}

TEST(Thermo, ErrorBarCoversNoisyData) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ThermoSeries s = fit_inverse_scale(synthetic(-0.25, 0.5, {8, 12, 16, 20, 24}, 1e-4, seed));
    EXPECT_LE(std::abs(s.limit + 0.25), s.limit_error) << seed;
  }
}

TEST(Thermo, ConstantSeriesHasExactLimit) {
  ThermoSeries s = fit_inverse_scale(synthetic(0.0, 0.0, {6, 10, 14}));
  EXPECT_EQ(s.limit, 0.0);
  EXPECT_EQ(s.fit_constant, 0.0);
}

TEST(Thermo, RisingSeriesIsRejected) {
  auto pts = synthetic(-0.3, 0.7, {8, 12, 16});
  pts[2].density = pts[0].density + 0.01;
  ThermoSeries s = fit_inverse_scale(pts, true, 1e-6);
  EXPECT_TRUE(s.flagged);
  EXPECT_TRUE(std::isnan(s.limit));
  ThermoSeries loose = fit_inverse_scale(pts);
  EXPECT_FALSE(loose.flagged);
  EXPECT_TRUE(std::isfinite(loose.limit));
}

TEST(Thermo, LinearFitIntercept) {
  std::vector<SeriesPoint> pts;
  for (double x : {0.1, 0.05, 0.025}) pts.push_back({x, -0.43 + 0.2 * x, 1e-4, false});
  ThermoSeries s = fit_linear(pts);
  EXPECT_NEAR(s.limit, -0.43, 1e-12);
  EXPECT_NEAR(s.fit_constant, 0.2, 1e-11);
  EXPECT_GE(s.limit_error, 1e-4);
}

TEST(Thermo, GAtZeroFieldIsMinusHalf) {
  ThermoSeries s = estimate_g(0.0, {8, 12, 16});
  EXPECT_FALSE(s.flagged);
  EXPECT_NEAR(s.limit, -0.5, 5e-3);
  for (const auto& p : s.points) EXPECT_GE(p.density, -0.5);
}

TEST(Thermo, GVanishesAboveCriticalField) {
  ThermoSeries s = estimate_g(1.2, {6, 8, 10});
  EXPECT_NEAR(s.limit, 0.0, 1e-6);
  for (const auto& p : s.points) EXPECT_NEAR(p.density, 0.0, 1e-12);
}

TEST(Thermo, GAtHalfFieldWithinQuadraticPinch) {
  ThermoSeries a = estimate_g(0.5, {8, 12, 16, 20});
  GOptions other;
  other.minimize.seed = 11;
  ThermoSeries b = estimate_g(0.5, {8, 12, 16, 20}, other);
  ASSERT_FALSE(a.flagged) << a.note;
  EXPECT_GE(a.limit, -0.5 * 0.25);
  EXPECT_LT(a.limit, 0.0);
  EXPECT_NEAR(a.limit, b.limit, 1e-3);
  for (const auto& p : a.points) EXPECT_GE(p.density, a.limit - a.limit_error);
}

TEST(Thermo, GRejectsBadSides) {
  EXPECT_THROW(estimate_g(0.5, {8, 12}), std::invalid_argument);
  EXPECT_THROW(estimate_g(0.5, {3, 8, 12}), std::invalid_argument);
  EXPECT_THROW(estimate_g(0.5, {8, 8, 12}), std::invalid_argument);
}

TEST(Thermo, LatticeRouteInRange) {
  LatticeSeries l = estimate_e2_lattice({4, 9, 16}, 0.25);
  ASSERT_EQ(l.results.size(), 3u);
  EXPECT_TRUE(l.bands.empty() || l.bands[0].basis.empty());
  EXPECT_GE(l.series.limit, -0.5);
  EXPECT_LT(l.series.limit, 0.0);
  for (const auto& p : l.series.points) {
    EXPECT_GE(p.density, -0.5);
    EXPECT_LT(p.density, 0.0);
  }
  EXPECT_THROW(estimate_e2_lattice({4, 9}, 0.25), std::invalid_argument);
}

TEST(Thermo, GlRouteEnforcesSideCoupling) {
  EXPECT_THROW(estimate_e2_gl({0.9, 0.95}, {}, {{8, 10, 12}, {8, 10, 12}}), std::invalid_argument);
  EXPECT_THROW(estimate_e2_gl({0.9}), std::invalid_argument);
  EXPECT_THROW(estimate_e2_gl({0.9, 1.0}), std::invalid_argument);
}

TEST(Thermo, GlRouteSmallRun) {
  GlRoute r = estimate_e2_gl({0.8, 0.9}, {}, {{8, 10, 12}, {8, 10, 12}});
  ASSERT_EQ(r.per_b.size(), 2u);
  for (const auto& p : r.series.points) {
    EXPECT_GE(p.density, -0.5);
    EXPECT_LT(p.density, 0.0);
  }
  EXPECT_TRUE(std::isfinite(r.series.limit));
}

TEST(Trial, CutoffProfile) {
  EXPECT_EQ(cutoff_chi(0.0), 1.0);
  EXPECT_EQ(cutoff_chi(1.0), 1.0);
  EXPECT_EQ(cutoff_chi(-1.0), 1.0);
  EXPECT_EQ(cutoff_chi(2.0), 0.0);
  EXPECT_EQ(cutoff_chi(3.5), 0.0);
  EXPECT_NEAR(cutoff_chi(1.5), 0.5, 1e-15);
  for (double t = 1.0; t < 2.0; t += 0.01) EXPECT_GE(cutoff_chi(t), cutoff_chi(t + 0.01));
  EXPECT_NEAR(default_eta(40.0), 0.1, 1e-15);
}

TEST(Trial, MatchesDirectThreeDimensionalEnergy) {
  const double kappa = 10.0, H = 9.0, eta = 0.15;
  MinimizeResult p = minimize_periodic_2d(H / kappa, 4, 0.25, {});
  TrialConfigReport rep = bulk_trial_energy(kappa, H, 4, eta, 1.0, -0.43, &p);

  // the same field written on a 3D Dirichlet grid whose nodes are the
  // multiples of the periodic spacing, evaluated by the generic kernel
  const GridSpec& pg = p.field.grid;
  const double a = pg.spacing, sq = std::sqrt(kappa * H), L = sq;
  const int M = static_cast<int>(std::ceil(0.5 * L / a)) - 1;
  GridSpec g;
  g.dim = 3;
  g.points_per_side = 2 * M + 2;
  g.spacing = a;
  g.side = a * g.points_per_side;
  g.bc = Boundary::dirichlet;
  OrderParameter psi = OrderParameter::zeros(g);
  const int n = pg.points_per_side;
  auto h = [&](double x) { return (0.5 * L - std::abs(x)) / sq; };
  for (int k = 1; k <= 2 * M + 1; ++k)
    for (int j = 1; j <= 2 * M + 1; ++j)
      for (int i = 1; i <= 2 * M + 1; ++i) {
        int I = i - M - 1, J = j - M - 1, K = k - M - 1;
        int sx = static_cast<int>(std::floor(static_cast<double>(I + n / 2) / n));
        int sy = static_cast<int>(std::floor(static_cast<double>(J + n / 2) / n));
        OrderParameter w = wrap_quasi_periodic(p.field, {sx, sy});
        double d = std::min({h(I * a), h(J * a), h(K * a)});
        psi.values[node_index(g, i, j, k)] =
            (1.0 - cutoff_chi(d / eta)) * w.values[node_index(pg, I + n / 2 - sx * n, J + n / 2 - sy * n)];
      }
  double direct = eval_energy(psi, build_gauge_links(g), H / kappa).total * kappa * kappa * std::pow(kappa * H, -1.5);
  EXPECT_NEAR(rep.energy, direct, 1e-9 * std::abs(direct));
  EXPECT_TRUE(rep.vanishes_on_layer);
  EXPECT_TRUE(rep.matches_outside_double_layer);
  EXPECT_NEAR(rep.bound, -0.43 * 1.0, 1e-12);
  EXPECT_NEAR(rep.slack, rep.energy - rep.bound, 1e-12);
  EXPECT_NEAR(rep.normalized_slack, rep.slack / 10.0, 1e-12);
  EXPECT_NEAR(rep.ell, p.side / sq, 1e-12);
}

TEST(Trial, AtCriticalFieldEverythingVanishes) {
  TrialConfigReport r = bulk_trial_energy(20.0, 20.0, 4, 0.1, 1.0, -0.43);
  EXPECT_EQ(r.energy, 0.0);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_EQ(r.max_modulus, 0.0);
}

TEST(Trial, ModulusBoundedByPeriodicMinimiser) {
  MinimizeResult p = minimize_periodic_2d(0.9, 4, 0.25, {});
  TrialConfigReport r = bulk_trial_energy(20.0, 18.0, 4, 0.1, 1.0, -0.43, &p);
  EXPECT_LE(r.max_modulus, p.field.max_modulus() * (1.0 + 1e-12));
  EXPECT_GT(r.max_modulus, 0.0);
}

TEST(Trial, RejectsBadInput) {
  EXPECT_THROW(bulk_trial_energy(20.0, 10.0, 4, 0.1, 1.0, -0.43), std::invalid_argument);
  EXPECT_THROW(bulk_trial_energy(20.0, 18.0, 4, 0.01, 1.0, -0.43), std::invalid_argument);
  EXPECT_THROW(bulk_trial_energy(20.0, 18.0, 4, 0.4, 1.0, -0.43), std::invalid_argument);
  MinimizeResult p = minimize_periodic_2d(0.8, 4, 0.25, {});
  EXPECT_THROW(bulk_trial_energy(20.0, 18.0, 4, 0.1, 1.0, -0.43, &p), std::invalid_argument);
  EXPECT_THROW(bulk_trial_energy(20.0, 16.0, 16, 0.1, 1.0, -0.43, &p), std::invalid_argument);
}

TEST(PropertySuite, NormalStateEverywherePasses) {
  SuiteConfig c;
  c.bs = {1.05};
  c.abrikosov_bs = {};
  c.sides = {6, 8};
  c.Ns = {4};
  c.tiling_sides = {6};
  SuiteReport r = property_suite(c);
  EXPECT_TRUE(r.all_hard_pass);
  for (const auto& chk : r.checks)
    if (chk.hard) EXPECT_TRUE(chk.pass) << chk.name << ' ' << chk.point;
}

TEST(PropertySuite, SmallConfigPassesAndCorruptionFails) {
  SuiteConfig c;
  c.bs = {0.5, 0.9};
  c.abrikosov_bs = {0.9};
  c.sides = {6, 8};
  c.Ns = {4};
  c.tiling_sides = {6};
  SuiteReport good = property_suite(c);
  for (const auto& chk : good.checks)
    if (chk.hard) EXPECT_TRUE(chk.pass) << chk.name << ' ' << chk.point << ' ' << chk.slack;
  EXPECT_GT(good.calibration.C_hat, 0.0);
  EXPECT_GT(good.calibration.alpha_hat, 0.0);
  EXPECT_LE(good.calibration.alpha_hat, 0.5);

  c.corrupt_amplitude = 2.0;
  SuiteReport bad = property_suite(c);
  EXPECT_FALSE(bad.all_hard_pass);
  bool max_principle_failed = false;
  for (const auto& chk : bad.checks)
    if (chk.name == "max_principle" && !chk.pass) max_principle_failed = true;
  EXPECT_TRUE(max_principle_failed);
}

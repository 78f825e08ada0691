#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "glthermo/grid.hpp"

using namespace glthermo;

namespace {

double principal(double t) { return std::remainder(t, 2.0 * std::numbers::pi); }

Field random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(static_cast<Eigen::Index>(n));
  for (auto& v : f) v = cplx(nd(rng), nd(rng));
  return f;
}

}  // namespace

TEST(Grid, DirichletPlaquettesCarryUnitFlux) {
  for (double target : {0.5, 0.3, 0.125}) {
    GridSpec g = make_dirichlet_grid(2, 7.0, target);
    GaugeLinks L = build_gauge_links(g);
    double a2 = g.spacing * g.spacing;
    for (int j = 0; j < g.points_per_side; ++j)
      for (int i = 0; i < g.points_per_side; ++i) EXPECT_NEAR(plaquette_sum(L, i, j, 0, 0, 1), a2, 1e-12);
  }
}

TEST(Grid, ThreeDimensionalFluxOnlyInPlane) {
  GridSpec g = make_dirichlet_grid(3, 3.0, 0.5);
  GaugeLinks L = build_gauge_links(g);
  for (double th : L.angle[2]) EXPECT_EQ(th, 0.0);
  double a2 = g.spacing * g.spacing;
  const int n = g.points_per_side;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(plaquette_sum(L, i, j, k, 0, 1), a2, 1e-12);
        EXPECT_NEAR(plaquette_sum(L, i, j, k, 0, 2), 0.0, 1e-12);
        EXPECT_NEAR(plaquette_sum(L, i, j, k, 1, 2), 0.0, 1e-12);
      }
}

TEST(Grid, PeriodicTorusHoldsQuantizedFlux) {
  GridSpec g = make_periodic_grid(4, 0.25);
  EXPECT_NEAR(g.side, std::sqrt(8.0 * std::numbers::pi), 1e-14);
  GaugeLinks L = build_gauge_links(g);
  double a2 = g.spacing * g.spacing;
  double total = 0.0;
  for (int j = 0; j < g.points_per_side; ++j)
    for (int i = 0; i < g.points_per_side; ++i) {
      double p = principal(plaquette_sum(L, i, j, 0, 0, 1));
      EXPECT_NEAR(p, a2, 1e-11);
      total += p;
    }
  EXPECT_NEAR(total, 8.0 * std::numbers::pi, 1e-9);
}

TEST(Grid, RejectsUnquantizedTorus) {
  GridSpec g;
  g.dim = 2;
  g.side = 5.0;
  g.points_per_side = 20;
  g.spacing = 0.25;
  g.bc = Boundary::magnetic_periodic;
  EXPECT_THROW(build_gauge_links(g), QuantizationError);
}

TEST(Grid, RejectsCoarseSpacing) {
  GridSpec g;
  g.dim = 2;
  g.side = 6.0;
  g.points_per_side = 10;
  g.spacing = 0.6;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Grid, RejectsInconsistentCellCount) {
  GridSpec g;
  g.dim = 2;
  g.side = 6.0;
  g.points_per_side = 24;
  g.spacing = 0.25 * (1.0 + 1e-9);
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Grid, PeriodicSpacingIsLoweredToEvenCellCount) {
  for (int N : {1, 4, 16, 36}) {
    GridSpec g = make_periodic_grid(N, 0.125);
    EXPECT_LE(g.spacing, 0.125);
    EXPECT_EQ(g.points_per_side % 2, 0);
    EXPECT_EQ(g.flux_quanta(), N);
    EXPECT_NEAR(g.points_per_side * g.spacing, g.side, 1e-12 * g.side);
  }
}

TEST(Grid, SnapReportsDistance) {
  SideSnap s = snap_to_quantized(5.0);
  EXPECT_EQ(s.flux_quanta, 4);
  EXPECT_NEAR(s.distance, std::abs(5.0 - std::sqrt(8.0 * std::numbers::pi)), 1e-14);
}

TEST(Grid, ShiftedOriginChangesLinksByPureGauge) {
  // theta(x + c) - theta(x) equals lambda(end) - lambda(start) with
  // lambda(x) = (c1 x2 - c2 x1) / 2.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  const double a = 0.25;
  for (int t = 0; t < 50; ++t) {
    std::array<double, 3> x{ud(rng), ud(rng), ud(rng)};
    std::array<double, 3> c{a * std::round(ud(rng) / a), a * std::round(ud(rng) / a), 0.0};
    auto lam = [&](double x1, double x2) { return 0.5 * (c[0] * x2 - c[1] * x1); };
    for (int d = 0; d < 2; ++d) {
      std::array<double, 3> xs{x[0] + c[0], x[1] + c[1], x[2]};
      std::array<double, 3> e = x;
      e[d] += a;
      double diff = symmetric_gauge_angle(xs, d, a) - symmetric_gauge_angle(x, d, a);
      EXPECT_NEAR(diff, lam(e[0], e[1]) - lam(x[0], x[1]), 1e-12);
    }
  }
}

TEST(Grid, LinksAreReproducible) {
  GridSpec g = make_periodic_grid(9, 0.2);
  GaugeLinks a = build_gauge_links(g), b = build_gauge_links(g);
  EXPECT_EQ(a.angle[0], b.angle[0]);
  EXPECT_EQ(a.angle[1], b.angle[1]);
  EXPECT_EQ(a.kinetic_scale, b.kinetic_scale);
}

TEST(Grid, WrapIdentityAndModulus) {
  GridSpec g = make_periodic_grid(4, 0.25);
  OrderParameter u{g, random_field(g.node_count(), 1)};
  OrderParameter same = wrap_quasi_periodic(u, {0, 0});
  EXPECT_EQ((same.values - u.values).norm(), 0.0);
  for (auto s : {std::array<int, 2>{1, 0}, {0, 1}, {1, 1}, {-2, 3}}) {
    OrderParameter w = wrap_quasi_periodic(u, s);
    EXPECT_LT((w.values.cwiseAbs() - u.values.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Grid, WrapMatchesDefiningRelations) {
  GridSpec g = make_periodic_grid(3, 0.25);
  OrderParameter u{g, random_field(g.node_count(), 2)};
  OrderParameter wx = wrap_quasi_periodic(u, {1, 0}), wy = wrap_quasi_periodic(u, {0, 1});
  for (int j = 0; j < g.points_per_side; ++j)
    for (int i = 0; i < g.points_per_side; ++i) {
      std::size_t p = node_index(g, i, j);
      double x = g.coord(i), y = g.coord(j), R = g.side;
      EXPECT_LT(std::abs(wx.values[p] - std::polar(1.0, R * y / 2) * u.values[p]), 1e-13);
      EXPECT_LT(std::abs(wy.values[p] - std::polar(1.0, -R * x / 2) * u.values[p]), 1e-13);
    }
}

TEST(Grid, DoubleWrapOrderIndependence) {
  // Composing the one-period wraps gives the same field in either order.
  // The single diagonal translate by (R, R) differs from the composition by
  // (-1)^N, since a translated field lies in the space only up to that sign.
  for (int N : {1, 2, 3, 4}) {
    GridSpec g = make_periodic_grid(N, 0.25);
    OrderParameter u{g, random_field(g.node_count(), 10 + N)};
    OrderParameter xy = wrap_quasi_periodic(wrap_quasi_periodic(u, {1, 0}), {0, 1});
    OrderParameter yx = wrap_quasi_periodic(wrap_quasi_periodic(u, {0, 1}), {1, 0});
    OrderParameter diag = wrap_quasi_periodic(u, {1, 1});
    EXPECT_LT((xy.values - yx.values).cwiseAbs().maxCoeff(), 1e-12);
    double sign = N % 2 ? -1.0 : 1.0;
    EXPECT_LT((diag.values - sign * xy.values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Grid, WrapRejectsDirichlet) {
  GridSpec g = make_dirichlet_grid(2, 4.0, 0.25);
  EXPECT_THROW(wrap_quasi_periodic(OrderParameter::zeros(g), {1, 0}), std::invalid_argument);
}

TEST(Grid, DirichletBoundaryNodes) {
  GridSpec g = make_dirichlet_grid(3, 2.0, 0.5);
  int count = 0;
  const int m = g.nodes_per_side();
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) count += is_boundary_node(g, i, j, k);
  EXPECT_EQ(count, m * m * m - (m - 2) * (m - 2) * (m - 2));
}

TEST(Grid, LatticeGroundEnergyApproachesContinuum) {
  // Harper bottom: phi - phi^2/8 + O(phi^3) for small flux per plaquette.
  for (double phi : {0.0625, 0.015625}) {
    double e = lattice_ground_energy(phi);
    EXPECT_NEAR(e / phi, 1.0 - phi / 8.0, 2.0 * phi * phi);
  }
  EXPECT_NEAR(kinetic_scale(0.125) * lattice_ground_energy(0.015625) / 0.015625, 1.0, 1e-15);
}

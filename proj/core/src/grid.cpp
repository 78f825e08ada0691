#include "glthermo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace glthermo {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int even_cells(double side, double target_spacing) {
  if (!(target_spacing > 0.0) || !(side > 0.0))
    throw std::invalid_argument("side and spacing must be positive");
  int n = static_cast<int>(std::ceil(side / target_spacing - 1e-9));
  if (n < 2) n = 2;
  if (n % 2) ++n;
  return n;
}

// Number of eigenvalues below x of the symmetric tridiagonal matrix with
// diagonal d and unit negative off-diagonal (Sturm sequence).
std::size_t count_below(const std::vector<double>& d, double x) {
  std::size_t neg = 0;
  double q = 1.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    q = d[j] - x - (j ? 1.0 / q : 0.0);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++neg;
  }
  return neg;
}

}  // namespace

const char* to_string(Boundary bc) {
  return bc == Boundary::dirichlet ? "dirichlet" : "periodic";
}

std::size_t GridSpec::node_count() const {
  std::size_t m = static_cast<std::size_t>(nodes_per_side());
  std::size_t c = m * m;
  if (dim == 3) c *= m;
  return c;
}

double GridSpec::cell_weight() const { return dim == 3 ? spacing * spacing * spacing : spacing * spacing; }

int GridSpec::flux_quanta() const {
  return static_cast<int>(std::lround(side * side / two_pi));
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  if (!(side > 0.0) || !(spacing > 0.0) || points_per_side < 1)
    throw std::invalid_argument("grid side, spacing and cell count must be positive");
  if (std::abs(points_per_side * spacing - side) > 1e-12 * side)
    throw std::invalid_argument("cells * spacing differs from side");
  if (spacing > 0.5 + 1e-12)
    throw std::invalid_argument("spacing " + std::to_string(spacing) + " exceeds 0.5");
  if (bc == Boundary::magnetic_periodic) {
    if (dim != 2) throw std::invalid_argument("periodic grids are two-dimensional");
    double n = side * side / two_pi;
    if (std::lround(n) < 1 || std::abs(side * side - two_pi * std::round(n)) > 1e-9)
      throw QuantizationError("periodic side^2 = " + std::to_string(side * side) +
                              " is not a multiple of 2*pi");
    if (points_per_side < 2) throw std::invalid_argument("periodic grid needs two cells per side");
  }
}

bool GridSpec::same_as(const GridSpec& o) const {
  return dim == o.dim && bc == o.bc && points_per_side == o.points_per_side &&
         std::abs(side - o.side) <= 1e-12 * side;
}

double quantized_side(int flux_quanta) {
  if (flux_quanta < 1) throw QuantizationError("flux quanta must be positive");
  return std::sqrt(two_pi * flux_quanta);
}

SideSnap snap_to_quantized(double side) {
  int n = std::max(1, static_cast<int>(std::lround(side * side / two_pi)));
  double s = quantized_side(n);
  return {n, s, std::abs(s - side)};
}

GridSpec make_dirichlet_grid(int dim, double side, double target_spacing) {
  GridSpec g;
  g.dim = dim;
  g.side = side;
  g.points_per_side = even_cells(side, target_spacing);
  g.spacing = side / g.points_per_side;
  g.bc = Boundary::dirichlet;
  g.validate();
  return g;
}

GridSpec make_periodic_grid(int flux_quanta, double target_spacing) {
  GridSpec g;
  g.dim = 2;
  g.side = quantized_side(flux_quanta);
  g.points_per_side = even_cells(g.side, target_spacing);
  g.spacing = g.side / g.points_per_side;
  g.bc = Boundary::magnetic_periodic;
  g.validate();
  return g;
}

OrderParameter OrderParameter::zeros(const GridSpec& g) {
  return {g, Field::Zero(static_cast<Eigen::Index>(g.node_count()))};
}

double OrderParameter::max_modulus() const {
  return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
}

std::size_t node_index(const GridSpec& g, int i, int j, int k) {
  std::size_t m = static_cast<std::size_t>(g.nodes_per_side());
  return static_cast<std::size_t>(i) + m * (static_cast<std::size_t>(j) + m * static_cast<std::size_t>(k));
}

bool is_boundary_node(const GridSpec& g, int i, int j, int k) {
  if (g.bc != Boundary::dirichlet) return false;
  int n = g.points_per_side;
  bool b = i == 0 || j == 0 || i == n || j == n;
  if (g.dim == 3) b = b || k == 0 || k == n;
  return b;
}

double lattice_ground_energy(double phi) {
  if (!(phi > 0.0)) return 0.0;
  double len = std::ceil(6.0 * std::numbers::pi / phi) + 200.0;
  std::size_t J = static_cast<std::size_t>(std::clamp(len, 4001.0, 4000001.0));
  std::vector<double> d(J);
  double mid = 0.5 * static_cast<double>(J);
  for (std::size_t j = 0; j < J; ++j) d[j] = 4.0 - 2.0 * std::cos(phi * (static_cast<double>(j) - mid));
  double lo = 0.0, hi = std::min(4.0, 2.0 * phi + 1e-3);
  while (count_below(d, hi) == 0) hi = std::min(8.0, 2.0 * hi);
  for (int it = 0; it < 200 && hi - lo > 4e-17 * hi; ++it) {
    double x = 0.5 * (lo + hi);
    if (count_below(d, x) >= 1)
      hi = x;
    else
      lo = x;
  }
  return 0.5 * (lo + hi);
}

double kinetic_scale(double spacing) {
  double phi = spacing * spacing;
  return phi / lattice_ground_energy(phi);
}

double symmetric_gauge_angle(const std::array<double, 3>& start, int dir, double a) {
  switch (dir) {
    case 0: return -0.5 * start[1] * a;
    case 1: return 0.5 * start[0] * a;
    default: return 0.0;
  }
}

GaugeLinks build_gauge_links(const GridSpec& g, KineticNormalization norm) {
  g.validate();
  GaugeLinks L;
  L.grid = g;
  L.kinetic_scale = norm == KineticNormalization::calibrated ? kinetic_scale(g.spacing) : 1.0;
  const int m = g.nodes_per_side();
  const int kmax = g.dim == 3 ? m : 1;
  const double a = g.spacing;
  const bool periodic = g.bc == Boundary::magnetic_periodic;
  const std::size_t count = g.node_count();
  for (int d = 0; d < g.dim; ++d) {
    L.angle[d].assign(count, 0.0);
    L.hop[d].assign(count, cplx(1.0, 0.0));
  }
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        std::size_t p = node_index(g, i, j, k);
        std::array<double, 3> x{g.coord(i), g.coord(j), g.dim == 3 ? g.coord(k) : 0.0};
        for (int d = 0; d < g.dim; ++d) {
          double th = symmetric_gauge_angle(x, d, a);
          if (periodic) {
            if (d == 0 && i == m - 1) th -= 0.5 * g.side * x[1];
            if (d == 1 && j == m - 1) th += 0.5 * g.side * x[0];
          }
          L.angle[d][p] = th;
          L.hop[d][p] = std::polar(1.0, -th);
        }
      }
  return L;
}

double plaquette_sum(const GaugeLinks& links, int i, int j, int k, int d1, int d2) {
  const GridSpec& g = links.grid;
  const int m = g.nodes_per_side();
  auto step = [&](std::array<int, 3> c, int d) {
    c[d] += 1;
    if (g.bc == Boundary::magnetic_periodic) c[d] %= m;
    return c;
  };
  auto idx = [&](const std::array<int, 3>& c) { return node_index(g, c[0], c[1], c[2]); };
  std::array<int, 3> p{i, j, k};
  auto p1 = step(p, d1);
  auto p2 = step(p, d2);
  return links.angle[d1][idx(p)] + links.angle[d2][idx(p1)] - links.angle[d1][idx(p2)] -
         links.angle[d2][idx(p)];
}

cplx quasi_periodic_phase(double R, double x, double y, std::array<int, 2> s) {
  double phase = 0.5 * s[0] * R * y - 0.5 * s[1] * R * (x + s[0] * R);
  return std::polar(1.0, phase);
}

OrderParameter wrap_quasi_periodic(const OrderParameter& u, std::array<int, 2> shift) {
  const GridSpec& g = u.grid;
  if (g.bc != Boundary::magnetic_periodic)
    throw std::invalid_argument("quasi-periodic wrap needs a periodic grid");
  OrderParameter w = u;
  if (shift[0] == 0 && shift[1] == 0) return w;
  const int m = g.nodes_per_side();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      std::size_t p = node_index(g, i, j);
      w.values[p] = quasi_periodic_phase(g.side, g.coord(i), g.coord(j), shift) * u.values[p];
    }
  return w;
}

}  // namespace glthermo

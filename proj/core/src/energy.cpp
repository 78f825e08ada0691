#include "glthermo/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glthermo {

namespace {

void require_same(const OrderParameter& u, const GaugeLinks& links) {
  if (!u.grid.same_as(links.grid) || static_cast<std::size_t>(u.values.size()) != links.grid.node_count())
    throw std::invalid_argument("field and links live on different grids");
}

// Visits every stored edge (p -> q along direction d, hop h) row by row.
// `row_done` is called after each (j,k) row so callers can flush partial sums
// in a fixed order.
template <class EdgeFn, class NodeFn, class RowFn>
void traverse(const GaugeLinks& links, EdgeFn&& edge, NodeFn&& node, RowFn&& row_done) {
  const GridSpec& g = links.grid;
  const int m = g.nodes_per_side();
  const int kmax = g.dim == 3 ? m : 1;
  const bool periodic = g.bc == Boundary::magnetic_periodic;
  const std::size_t stride[3] = {1, static_cast<std::size_t>(m), static_cast<std::size_t>(m) * m};
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < m; ++j) {
      const int coord_jk[3] = {0, j, k};
      for (int i = 0; i < m; ++i) {
        const std::size_t p = stride[1] * j + stride[2] * k + i;
        node(p);
        for (int d = 0; d < g.dim; ++d) {
          const int c = d == 0 ? i : coord_jk[d];
          std::size_t q;
          if (c < m - 1)
            q = p + stride[d];
          else if (periodic)
            q = p - stride[d] * (m - 1);
          else
            continue;
          edge(p, q, links.hop[d][p]);
        }
      }
      row_done();
    }
}

}  // namespace

EnergyBreakdown energy_kernel(const GaugeLinks& links, double b, const cplx* u, cplx* grad) {
  const GridSpec& g = links.grid;
  const double a = g.spacing;
  const double w = g.cell_weight();
  const double ck = b * links.kinetic_scale * (g.dim == 3 ? a : 1.0);
  const std::size_t n = g.node_count();
  if (grad) std::fill(grad, grad + n, cplx(0.0, 0.0));

  double kin = 0.0, cond = 0.0, quart = 0.0;
  double rk = 0.0, rc = 0.0, rq = 0.0;
  const double gk = 2.0 * ck;
  traverse(
      links,
      [&](std::size_t p, std::size_t q, cplx h) {
        const cplx d = u[q] * h - u[p];
        rk += std::norm(d);
        if (grad) {
          grad[p] -= gk * d;
          grad[q] += gk * std::conj(h) * d;
        }
      },
      [&](std::size_t p) {
        const double A = std::norm(u[p]);
        rc -= A;
        rq += 0.5 * A * A;
        if (grad) grad[p] += 2.0 * w * (A - 1.0) * u[p];
      },
      [&] {
        kin += rk;
        cond += rc;
        quart += rq;
        rk = rc = rq = 0.0;
      });

  if (grad && g.bc == Boundary::dirichlet) {
    const int m = g.nodes_per_side();
    const int kmax = g.dim == 3 ? m : 1;
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          if (is_boundary_node(g, i, j, k)) grad[node_index(g, i, j, k)] = 0.0;
  }

  EnergyBreakdown e;
  e.b = b;
  e.kinetic = ck * kin;
  e.condensation = w * cond;
  e.quartic = w * quart;
  e.total = e.kinetic + e.condensation + e.quartic;
  return e;
}

double residual_from_gradient(const GridSpec& g, const cplx* grad) {
  const std::size_t n = g.node_count();
  double mx = 0.0;
  for (std::size_t p = 0; p < n; ++p) mx = std::max(mx, std::abs(grad[p]));
  return mx / (2.0 * g.cell_weight());
}

EnergyBreakdown eval_energy(const OrderParameter& u, const GaugeLinks& links, double b) {
  require_same(u, links);
  if (!(b >= 0.0)) throw std::invalid_argument("b must be non-negative");
  return energy_kernel(links, b, u.values.data(), nullptr);
}

OrderParameter eval_gradient(const OrderParameter& u, const GaugeLinks& links, double b) {
  require_same(u, links);
  OrderParameter gout = OrderParameter::zeros(u.grid);
  energy_kernel(links, b, u.values.data(), gout.values.data());
  return gout;
}

double eval_residual(const OrderParameter& u, const GaugeLinks& links, double b) {
  require_same(u, links);
  Field grad(u.values.size());
  energy_kernel(links, b, u.values.data(), grad.data());
  return residual_from_gradient(u.grid, grad.data());
}

std::array<double, 5> line_polynomial(const GaugeLinks& links, double b, const cplx* u, const cplx* d) {
  const GridSpec& g = links.grid;
  const double w = g.cell_weight();
  const double ck = b * links.kinetic_scale * (g.dim == 3 ? g.spacing : 1.0);
  std::array<double, 5> c{}, r{};
  std::array<double, 3> kin{}, rk{};
  traverse(
      links,
      [&](std::size_t p, std::size_t q, cplx h) {
        const cplx wu = u[q] * h - u[p];
        const cplx wd = d[q] * h - d[p];
        rk[0] += std::norm(wu);
        rk[1] += 2.0 * (wu.real() * wd.real() + wu.imag() * wd.imag());
        rk[2] += std::norm(wd);
      },
      [&](std::size_t p) {
        const double A = std::norm(u[p]);
        const double B = u[p].real() * d[p].real() + u[p].imag() * d[p].imag();
        const double C = std::norm(d[p]);
        r[0] += -A + 0.5 * A * A;
        r[1] += -2.0 * B + 2.0 * A * B;
        r[2] += -C + 2.0 * B * B + A * C;
        r[3] += 2.0 * B * C;
        r[4] += 0.5 * C * C;
      },
      [&] {
        for (int i = 0; i < 5; ++i) c[i] += r[i], r[i] = 0.0;
        for (int i = 0; i < 3; ++i) kin[i] += rk[i], rk[i] = 0.0;
      });
  for (auto& x : c) x *= w;
  for (int i = 0; i < 3; ++i) c[i] += ck * kin[i];
  return c;
}

void apply_magnetic_operator(const GaugeLinks& links, const cplx* in, cplx* out) {
  const GridSpec& g = links.grid;
  const double f = links.kinetic_scale / (g.spacing * g.spacing);
  const std::size_t n = g.node_count();
  std::fill(out, out + n, cplx(0.0, 0.0));
  traverse(
      links,
      [&](std::size_t p, std::size_t q, cplx h) {
        const cplx d = in[q] * h - in[p];
        out[p] -= f * d;
        out[q] += f * std::conj(h) * d;
      },
      [](std::size_t) {}, [] {});
  if (g.bc == Boundary::dirichlet) {
    const int m = g.nodes_per_side();
    const int kmax = g.dim == 3 ? m : 1;
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          if (is_boundary_node(g, i, j, k)) out[node_index(g, i, j, k)] = 0.0;
  }
}

cplx inner(const GridSpec& g, const Field& f, const Field& h) { return g.cell_weight() * f.dot(h); }

double quartic_integral(const OrderParameter& u) {
  return u.grid.cell_weight() * u.values.cwiseAbs2().cwiseAbs2().sum();
}

}  // namespace glthermo

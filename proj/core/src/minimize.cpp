#include "glthermo/minimize.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "glthermo/parallel.hpp"
#include "glthermo/torus_solver.hpp"

namespace glthermo {

namespace {

class GridObjective final : public Objective {
 public:
  GridObjective(const GaugeLinks& links, double b, bool precondition) : links_(links), b_(b) {
    if (precondition) {
      double shift = std::max(std::abs(1.0 - b), 0.05);
      pre_ = std::make_unique<FieldPreconditioner>(links, b, shift);
    }
  }
  double value_gradient(const Field& u, Field& g) const override {
    g.resize(u.size());
    return energy_kernel(links_, b_, u.data(), g.data()).total;
  }
  std::array<double, 5> line_polynomial(const Field& u, const Field& d) const override {
    return glthermo::line_polynomial(links_, b_, u.data(), d.data());
  }
  void precondition(const Field& g, Field& out) const override {
    out.resize(g.size());
    if (pre_)
      pre_->apply(g.data(), out.data());
    else
      out = g;
  }
  double residual(const Field& g) const override { return residual_from_gradient(links_.grid, g.data()); }

 private:
  const GaugeLinks& links_;
  double b_;
  std::unique_ptr<FieldPreconditioner> pre_;
};

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void zero_pinned(const GridSpec& g, Field& v) {
  if (g.bc != Boundary::dirichlet) return;
  const int m = g.nodes_per_side();
  const int kmax = g.dim == 3 ? m : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        if (is_boundary_node(g, i, j, k)) v[node_index(g, i, j, k)] = 0.0;
}

struct Candidate {
  std::string origin;
  Field start;
};

struct RunOutcome {
  OptimizerOutcome opt;
  EnergyBreakdown breakdown;
};

bool better(const RunOutcome& x, const RunOutcome& y, double tol) {
  double scale = std::max(std::abs(y.opt.energy), 1.0);
  if (x.opt.energy < y.opt.energy - tol * scale) return true;
  if (x.opt.energy > y.opt.energy + tol * scale) return false;
  return x.opt.residual < y.opt.residual;
}

// Optimal rescaling u -> t u.  E(t u) = t^2 (K + C) + t^4 Q is minimised
// at t^2 = -(K + C) / (2 Q), which never raises the energy.
void scale_polish(const GaugeLinks& links, double b, Field& u) {
  EnergyBreakdown e = energy_kernel(links, b, u.data(), nullptr);
  double quad = e.kinetic + e.condensation;
  if (!(quad < 0.0) || !(e.quartic > 0.0)) return;
  double t = std::sqrt(-quad / (2.0 * e.quartic));
  Field v = t * u;
  if (energy_kernel(links, b, v.data(), nullptr).total <= e.total) u.swap(v);
}

}  // namespace

MinimizeResult minimize_on_grid(const GridSpec& grid, double b, const MinimizeOptions& opt) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be a non-negative number");
  if (opt.restarts < 1) throw std::invalid_argument("at least one restart is required");
  grid.validate();
  if (grid.dim == 3 && grid.node_count() > opt.max_nodes_3d)
    throw std::length_error("3D grid exceeds the configured node cap");
  const GaugeLinks links = build_gauge_links(grid, opt.normalization);
  const Eigen::Index n = static_cast<Eigen::Index>(grid.node_count());

  std::vector<Candidate> cands;
  cands.push_back({"zero", Field::Zero(n)});
  const double amp = std::sqrt(std::max(0.0, 1.0 - b));
  for (int r = 0; r < opt.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(opt.seed, static_cast<std::uint64_t>(r)));
    Field f(n);
    if (r == 0) {
      for (Eigen::Index p = 0; p < n; ++p) f[p] = std::polar(amp, 2.0 * std::numbers::pi * uniform(rng));
    } else {
      for (Eigen::Index p = 0; p < n; ++p) {
        double re = 2.0 * uniform(rng) - 1.0;
        double im = 2.0 * uniform(rng) - 1.0;
        f[p] = 0.5 * cplx(re, im);
      }
    }
    zero_pinned(grid, f);
    cands.push_back({r == 0 ? "phase-seed" : "noise-" + std::to_string(r), std::move(f)});
  }
  for (std::size_t w = 0; w < opt.warm_starts.size(); ++w) {
    const OrderParameter& ws = opt.warm_starts[w];
    if (!ws.grid.same_as(grid) || ws.values.size() != n)
      throw std::invalid_argument("warm start lives on a different grid");
    Field f = ws.values;
    zero_pinned(grid, f);
    cands.push_back({"warm-" + std::to_string(w), std::move(f)});
  }

  OptimizerOptions oo;
  oo.method = opt.method;
  oo.tol_energy = opt.tol_energy;
  oo.tol_residual = opt.tol_residual;
  oo.max_iterations = opt.max_iterations;

  std::vector<RunOutcome> runs(cands.size());
  parallel_for(cands.size(), opt.threads, [&](std::size_t c) {
    if (c == 0) {
      runs[c].opt.u = cands[c].start;
      runs[c].opt.converged = true;
    } else {
      GridObjective obj(links, b, opt.precondition);
      runs[c].opt = minimize_objective(obj, cands[c].start, oo);
    }
    scale_polish(links, b, runs[c].opt.u);
    runs[c].breakdown = energy_kernel(links, b, runs[c].opt.u.data(), nullptr);
    runs[c].opt.energy = runs[c].breakdown.total;
    runs[c].opt.residual = eval_residual({grid, runs[c].opt.u}, links, b);
  });

  std::size_t best = 0;
  int iterations = 0;
  for (std::size_t c = 0; c < runs.size(); ++c) {
    iterations += runs[c].opt.iterations;
    if (c && better(runs[c], runs[best], opt.tol_energy)) best = c;
  }

  MinimizeResult res;
  res.energy = runs[best].opt.energy;
  res.breakdown = runs[best].breakdown;
  res.field = {grid, std::move(runs[best].opt.u)};
  res.residual = runs[best].opt.residual;
  res.iterations = iterations;
  res.restarts_used = static_cast<int>(cands.size()) - 1;
  res.b = b;
  res.side = grid.side;
  res.spacing = grid.spacing;
  res.bc = grid.bc;
  res.dim = grid.dim;
  res.seed = opt.seed;
  res.converged = runs[best].opt.converged && res.residual <= opt.tol_residual;
  res.origin = cands[best].origin;
  res.tol_energy = opt.tol_energy;
  res.tol_residual = opt.tol_residual;

  const double vol = std::pow(grid.side, grid.dim);
  const double lower = -0.5 * std::pow(std::max(0.0, 1.0 - b), 2) * vol;
  const double slack = 1e-10 * std::max(1.0, std::abs(lower));
  if (res.energy < lower - slack || res.energy > slack)
    throw std::logic_error("minimum energy outside the exact bounds; discretisation is inconsistent");
  return res;
}

MinimizeResult minimize_dirichlet_2d(double b, double side, double spacing, const MinimizeOptions& opt) {
  return minimize_on_grid(make_dirichlet_grid(2, side, spacing), b, opt);
}

MinimizeResult minimize_periodic_2d(double b, int flux_quanta, double spacing, const MinimizeOptions& opt) {
  return minimize_on_grid(make_periodic_grid(flux_quanta, spacing), b, opt);
}

MinimizeResult minimize_dirichlet_3d(double b, double side, double spacing, const MinimizeOptions& opt) {
  return minimize_on_grid(make_dirichlet_grid(3, side, spacing), b, opt);
}

double amplitude_constant(const MinimizeResult& r) {
  if (r.b >= 1.0 || r.b <= 0.0) return 0.0;
  return r.field.max_modulus() / std::sqrt(1.0 / r.b - 1.0);
}

OrderParameter embed_centered(const OrderParameter& u, const GridSpec& big) {
  const GridSpec& g = u.grid;
  if (g.bc != Boundary::dirichlet || big.bc != Boundary::dirichlet || g.dim != big.dim)
    throw std::invalid_argument("embedding needs two Dirichlet grids of equal dimension");
  if (std::abs(g.spacing - big.spacing) > 1e-12 * g.spacing || (big.points_per_side - g.points_per_side) % 2 ||
      big.points_per_side < g.points_per_side)
    throw std::invalid_argument("grids are not nested at equal spacing");
  const int off = (big.points_per_side - g.points_per_side) / 2;
  OrderParameter w = OrderParameter::zeros(big);
  const int m = g.nodes_per_side();
  const int kmax = g.dim == 3 ? m : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        w.values[node_index(big, i + off, j + off, g.dim == 3 ? k + off : 0)] = u.values[node_index(g, i, j, k)];
  return w;
}

OrderParameter tile_dirichlet(const OrderParameter& u, int copies) {
  const GridSpec& g = u.grid;
  if (g.bc != Boundary::dirichlet || g.dim != 2) throw std::invalid_argument("tiling needs a 2D Dirichlet field");
  if (copies < 1) throw std::invalid_argument("copies must be positive");
  GridSpec big = g;
  big.side = copies * g.side;
  big.points_per_side = copies * g.points_per_side;
  big.validate();
  OrderParameter w = OrderParameter::zeros(big);
  const int n = g.points_per_side;
  const int M = big.nodes_per_side();
  for (int J = 0; J < M; ++J)
    for (int I = 0; I < M; ++I) {
      int kx = std::min(I / n, copies - 1), ky = std::min(J / n, copies - 1);
      int i = I - kx * n, j = J - ky * n;
      double c1 = (-0.5 * (copies - 1) + kx) * g.side;
      double c2 = (-0.5 * (copies - 1) + ky) * g.side;
      double X = big.coord(I), Y = big.coord(J);
      w.values[node_index(big, I, J)] = std::polar(1.0, 0.5 * (c1 * Y - c2 * X)) * u.values[node_index(g, i, j)];
    }
  return w;
}

OrderParameter tile_periodic(const OrderParameter& u, int copies) {
  const GridSpec& g = u.grid;
  if (g.bc != Boundary::magnetic_periodic) throw std::invalid_argument("tiling needs a periodic field");
  const int n = g.points_per_side;
  GridSpec big = g;
  big.side = copies * g.side;
  big.points_per_side = copies * n;
  big.validate();
  if (((copies - 1) * n) % 2) throw std::invalid_argument("periodic tiling needs aligned nodes");
  const int shift0 = (copies - 1) * n / 2;
  OrderParameter w = OrderParameter::zeros(big);
  const int M = big.nodes_per_side();
  auto split = [&](int I, int& local, int& s) {
    int t = I - shift0;
    s = t >= 0 ? t / n : -((-t + n - 1) / n);
    local = t - s * n;
  };
  for (int J = 0; J < M; ++J)
    for (int I = 0; I < M; ++I) {
      int i, j, sx, sy;
      split(I, i, sx);
      split(J, j, sy);
      cplx ph = quasi_periodic_phase(g.side, g.coord(i), g.coord(j), {sx, sy});
      w.values[node_index(big, I, J)] = ph * u.values[node_index(g, i, j)];
    }
  return w;
}

OrderParameter dirichlet_to_periodic(const OrderParameter& u, const GridSpec& pg) {
  const GridSpec& g = u.grid;
  if (g.bc != Boundary::dirichlet || pg.bc != Boundary::magnetic_periodic || g.dim != 2 ||
      g.points_per_side != pg.points_per_side || std::abs(g.side - pg.side) > 1e-12 * g.side)
    throw std::invalid_argument("Dirichlet and periodic grids must share their nodes");
  OrderParameter w = OrderParameter::zeros(pg);
  const int m = pg.nodes_per_side();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) w.values[node_index(pg, i, j)] = u.values[node_index(g, i, j)];
  return w;
}

OrderParameter slice_3d(const OrderParameter& u, int plane) {
  GridSpec g2 = u.grid;
  if (g2.dim != 3) throw std::invalid_argument("slice needs a 3D field");
  g2.dim = 2;
  OrderParameter w = OrderParameter::zeros(g2);
  const int m = g2.nodes_per_side();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) w.values[node_index(g2, i, j)] = u.values[node_index(u.grid, i, j, plane)];
  return w;
}

OrderParameter extrude_2d(const OrderParameter& u, const GridSpec& cube) {
  const GridSpec& g = u.grid;
  if (cube.dim != 3 || g.dim != 2 || g.points_per_side != cube.points_per_side)
    throw std::invalid_argument("extrusion needs matching 2D and 3D grids");
  OrderParameter w = OrderParameter::zeros(cube);
  const int m = cube.nodes_per_side();
  for (int k = 0; k < m; ++k) {
    double dist = 0.5 * cube.side - std::abs(cube.coord(k));
    double f = std::min(1.0, std::max(0.0, dist));
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) w.values[node_index(cube, i, j, k)] = f * u.values[node_index(g, i, j)];
  }
  return w;
}

SandwichCheck check_3d_sandwich(const MinimizeResult& m3d, const MinimizeResult& m2d, double tol) {
  SandwichCheck s;
  const double R = m3d.side;
  s.lower_slack = m3d.energy - R * m2d.energy;
  s.upper_excess = m3d.energy - (R - 2.0) * m2d.energy;
  s.lower_ok = s.lower_slack >= -10.0 * tol;
  return s;
}

}  // namespace glthermo

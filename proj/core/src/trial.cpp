#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "glthermo/thermo.hpp"

namespace glthermo {

namespace {

double smooth_bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// 0 for x <= 0, 1 for x >= 1, C-infinity in between.
double smooth_step(double x) {
  double f = smooth_bump(x), g = smooth_bump(1.0 - x);
  return f / (f + g);
}

}  // namespace

double cutoff_chi(double t) { return 1.0 - smooth_step(std::abs(t) - 1.0); }

double default_eta(double kappa) { return 0.1 * std::sqrt(40.0 / kappa); }

TrialConfigReport bulk_trial_energy(double kappa, double H, int N, double eta, double box_side, double E2,
                                    const MinimizeResult* periodic, const TrialOptions& opt) {
  if (!(kappa > 0.0) || !(H > 0.0)) throw std::invalid_argument("kappa and H must be positive");
  if (H < 0.8 * kappa) throw std::invalid_argument("H must be at least 0.8 kappa");
  if (!(box_side > 0.0)) throw std::invalid_argument("box side must be positive");
  if (!(eta > 1.0 / kappa && eta < 0.3 * box_side))
    throw std::invalid_argument("eta must lie in (1/kappa, 0.3 box_side)");
  const double b = H / kappa;

  MinimizeResult computed;
  if (!periodic) {
    computed = minimize_periodic_2d(b, N, opt.spacing, opt.minimize);
    periodic = &computed;
  }
  const GridSpec& pg = periodic->field.grid;
  if (pg.bc != Boundary::magnetic_periodic || pg.dim != 2 || pg.flux_quanta() != N)
    throw std::invalid_argument("stored minimiser is not a periodic field with the requested N");
  if (std::abs(periodic->b - b) > 1e-12) throw std::invalid_argument("stored minimiser was computed at another b");

  const double sqkh = std::sqrt(kappa * H);
  const double a = pg.spacing;
  const int n = pg.points_per_side;
  const double R = pg.side;
  const double L = sqkh * box_side;
  const int M = static_cast<int>(std::ceil(0.5 * L / a)) - 1;
  const int m = 2 * M + 1;
  const double s = opt.minimize.normalization == KineticNormalization::calibrated ? kinetic_scale(a) : 1.0;
  const double ck = b * s * a;
  const double w = a * a * a;

  // u on the global in-plane nodes x = I a, |I| <= M
  std::vector<cplx> U(static_cast<std::size_t>(m) * m);
  std::vector<double> dxy(U.size());
  std::vector<cplx> hop_x(U.size()), hop_y(U.size());
  auto floor_div = [](int p, int q) { return p >= 0 ? p / q : -((-p + q - 1) / q); };
  for (int J = -M; J <= M; ++J)
    for (int I = -M; I <= M; ++I) {
      std::size_t p = static_cast<std::size_t>(J + M) * m + (I + M);
      int sx = floor_div(I + n / 2, n), sy = floor_div(J + n / 2, n);
      int i = I + n / 2 - sx * n, j = J + n / 2 - sy * n;
      cplx base = periodic->field.values[node_index(pg, i, j)];
      U[p] = quasi_periodic_phase(R, pg.coord(i), pg.coord(j), {sx, sy}) * base;
      double x = I * a, y = J * a;
      dxy[p] = (0.5 * L - std::max(std::abs(x), std::abs(y))) / sqkh;
      hop_x[p] = std::polar(1.0, 0.5 * y * a);
      hop_y[p] = std::polar(1.0, -0.5 * x * a);
    }

  TrialConfigReport rep;
  rep.vanishes_on_layer = true;
  rep.matches_outside_double_layer = true;
  auto h_of = [&](double d) { return 1.0 - cutoff_chi(d / eta); };

  std::vector<cplx> psi(U.size()), prev(U.size());
  double total = 0.0;
  double interior_slab = 0.0;
  bool have_interior = false;
  bool prev_interior = false;
  for (int K = -M; K <= M; ++K) {
    const double dz = (0.5 * L - std::abs(K * a)) / sqkh;
    const bool interior = dz >= 2.0 * eta;
    if (interior && prev_interior && have_interior) {
      total += interior_slab;
      continue;
    }
    prev.swap(psi);
    for (std::size_t p = 0; p < U.size(); ++p) {
      double d = std::min(dxy[p], dz);
      psi[p] = h_of(d) * U[p];
      double mod = std::abs(psi[p]);
      rep.max_modulus = std::max(rep.max_modulus, mod);
      if (d <= eta && mod != 0.0) rep.vanishes_on_layer = false;
      if (d >= 2.0 * eta && mod != std::abs(U[p])) rep.matches_outside_double_layer = false;
    }
    double slab = 0.0;
    for (int J = 0; J < m; ++J)
      for (int I = 0; I < m; ++I) {
        std::size_t p = static_cast<std::size_t>(J) * m + I;
        double A = std::norm(psi[p]);
        slab += w * (-A + 0.5 * A * A);
        if (I + 1 < m) slab += ck * std::norm(psi[p + 1] * hop_x[p] - psi[p]);
        if (J + 1 < m) slab += ck * std::norm(psi[p + m] * hop_y[p] - psi[p]);
      }
    total += slab;
    if (interior) {
      interior_slab = slab;
      have_interior = true;
    }
    if (K > -M) {
      double zk = 0.0;
      for (std::size_t p = 0; p < U.size(); ++p) zk += std::norm(psi[p] - prev[p]);
      total += ck * zk;
    }
    prev_interior = interior;
  }
  const double to_phys = kappa * kappa * std::pow(kappa * H, -1.5);
  rep.kappa = kappa;
  rep.H = H;
  rep.b = b;
  rep.eta = eta;
  rep.R = R;
  rep.N = N;
  rep.ell = R / sqkh;
  rep.box_side = box_side;
  rep.domain_volume = box_side * box_side * box_side;
  rep.energy = to_phys * total;
  const double gap = std::max(kappa - H, 0.0);
  rep.E2 = E2;
  rep.bound = E2 * rep.domain_volume * gap * gap;
  rep.slack = rep.energy - rep.bound;
  rep.normalized_slack = rep.slack / std::max(kappa, gap * gap);
  rep.scaled_side = L;
  rep.spacing = a;
  return rep;
}

}  // namespace glthermo

#include "glthermo/landau.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "glthermo/parallel.hpp"

namespace glthermo {

namespace {

double uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

cplx gaussian(std::mt19937_64& rng) {
  double r = std::sqrt(-2.0 * std::log(uniform(rng)));
  double t = 2.0 * std::numbers::pi * uniform(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

void apply_block(const GaugeLinks& L, const Eigen::MatrixXcd& X, Eigen::MatrixXcd& Y) {
  Y.resize(X.rows(), X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) apply_magnetic_operator(L, X.col(c).data(), Y.col(c).data());
}

void orthonormalise(Eigen::MatrixXcd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  X = qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), X.cols());
}

// Degree-m Chebyshev filter damping [lo, hi], scaled at `bottom`.
void chebyshev_filter(const GaugeLinks& L, Eigen::MatrixXcd& X, int m, double lo, double hi, double bottom) {
  const double e = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
  double sigma = e / (bottom - c);
  const double tau = 2.0 / sigma;
  Eigen::MatrixXcd AX, Y, Yn;
  apply_block(L, X, AX);
  Y = (AX - c * X) * (sigma / e);
  for (int i = 2; i <= m; ++i) {
    double sn = 1.0 / (tau - sigma);
    apply_block(L, Y, AX);
    Yn = (AX - c * Y) * (2.0 * sn / e) - (sigma * sn) * X;
    X.swap(Y);
    Y.swap(Yn);
    sigma = sn;
  }
  X.swap(Y);
}

class AbrikosovObjective final : public Objective {
 public:
  AbrikosovObjective(const Eigen::MatrixXcd& B, double w) : B_(B), w_(w) {}
  double value_gradient(const Field& c, Field& g) const override {
    Field v = B_ * c;
    double q = 0.0;
    for (Eigen::Index p = 0; p < v.size(); ++p) {
      double A = std::norm(v[p]);
      q += A * A;
      v[p] *= A;
    }
    g = -2.0 * c + (2.0 * w_) * (B_.adjoint() * v);
    return -c.squaredNorm() + 0.5 * w_ * q;
  }
  std::array<double, 5> line_polynomial(const Field& c, const Field& d) const override {
    Field v = B_ * c, e = B_ * d;
    std::array<double, 5> k{};
    for (Eigen::Index p = 0; p < v.size(); ++p) {
      double A = std::norm(v[p]), Bq = (std::conj(v[p]) * e[p]).real(), C = std::norm(e[p]);
      k[0] += 0.5 * A * A;
      k[1] += 2.0 * A * Bq;
      k[2] += 2.0 * Bq * Bq + A * C;
      k[3] += 2.0 * Bq * C;
      k[4] += 0.5 * C * C;
    }
    for (double& x : k) x *= w_;
    k[0] -= c.squaredNorm();
    k[1] -= 2.0 * c.dot(d).real();
    k[2] -= d.squaredNorm();
    return k;
  }
  double residual(const Field& g) const override { return 0.5 * g.cwiseAbs().maxCoeff(); }

 private:
  const Eigen::MatrixXcd& B_;
  double w_;
};

}  // namespace

LandauBand lowest_band(int N, double spacing, int k, const BandOptions& opt) {
  if (N < 1) throw std::invalid_argument("band needs at least one flux quantum");
  if (k < N + 1) throw std::invalid_argument("band needs k >= N + 1 eigenvalues");
  LandauBand band;
  band.N = N;
  band.grid = make_periodic_grid(N, spacing);
  band.side = band.grid.side;
  const GaugeLinks L = build_gauge_links(band.grid, opt.normalization);
  band.kinetic_scale = L.kinetic_scale;
  const Eigen::Index n = static_cast<Eigen::Index>(band.grid.node_count());
  const double a = band.grid.spacing;
  const Eigen::Index p = std::min<Eigen::Index>(n, std::max(k + 4, 2 * N + 4));
  if (p < k) throw std::invalid_argument("grid too small for the requested eigenvalues");
  const double hi = 8.0 * L.kinetic_scale / (a * a) * (1.0 + 1e-12);

  std::mt19937_64 rng(mix_seed(opt.seed, static_cast<std::uint64_t>(N)));
  Eigen::MatrixXcd X(n, p);
  for (Eigen::Index c = 0; c < p; ++c)
    for (Eigen::Index r = 0; r < n; ++r) X(r, c) = gaussian(rng);
  orthonormalise(X);

  Eigen::MatrixXcd AX;
  Eigen::VectorXd theta;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    apply_block(L, X, AX);
    Eigen::MatrixXcd H = X.adjoint() * AX;
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    theta = es.eigenvalues();
    X = X * es.eigenvectors();
    AX = AX * es.eigenvectors();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      double r = (AX.col(i) - theta[i] * X.col(i)).norm();
      worst = std::max(worst, r / std::max(1.0, std::abs(theta[i])));
    }
    if (worst <= opt.tol) {
      converged = true;
      break;
    }
    chebyshev_filter(L, X, opt.filter_degree, theta[p - 1], hi, theta[0]);
    orthonormalise(X);
  }
  if (!converged) throw std::runtime_error("band eigensolver did not converge");
  band.iterations = it;

  band.eigenvalues.assign(theta.data(), theta.data() + k);
  const double threshold = 0.5 * (1.0 + theta[N]);
  int below = 0;
  for (int i = 0; i < k; ++i) below += theta[i] < threshold;
  if (below != N) throw std::runtime_error("lowest band is not separated from the rest of the spectrum");
  for (int i = 0; i < k; ++i) {
    Field f = X.col(i) / a;
    if (i < N)
      band.basis.push_back(std::move(f));
    else
      band.higher.push_back(std::move(f));
  }
  band.gap_ratio = theta[N] / theta[N - 1];
  for (int i = 0; i < N; ++i) band.band_deviation = std::max(band.band_deviation, std::abs(theta[i] - 1.0));
  const double w = band.grid.cell_weight();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      cplx ip = w * band.basis[i].dot(band.basis[j]);
      band.orthonormality_error = std::max(band.orthonormality_error, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  return band;
}

Eigen::VectorXcd band_coefficients(const LandauBand& band, const Field& f) {
  const double w = band.grid.cell_weight();
  Eigen::VectorXcd c(band.N);
  for (int j = 0; j < band.N; ++j) c[j] = w * band.basis[j].dot(f);
  return c;
}

OrderParameter band_field(const LandauBand& band, const Eigen::VectorXcd& coeffs) {
  if (coeffs.size() != band.N) throw std::invalid_argument("coefficient count differs from the band dimension");
  OrderParameter v = OrderParameter::zeros(band.grid);
  for (int j = 0; j < band.N; ++j) v.values += coeffs[j] * band.basis[j];
  return v;
}

BandProjection project_band(const LandauBand& band, const OrderParameter& f) {
  if (!f.grid.same_as(band.grid)) throw std::invalid_argument("field and band live on different grids");
  BandProjection out;
  out.in_band = band_field(band, band_coefficients(band, f.values));
  const double w = band.grid.cell_weight();
  out.out_norm = std::sqrt(w * (f.values - out.in_band.values).squaredNorm());
  out.norm = std::sqrt(w * f.values.squaredNorm());
  return out;
}

AbrikosovResult minimize_abrikosov(const LandauBand& band, const AbrikosovOptions& opt) {
  if (band.N < 1 || static_cast<int>(band.basis.size()) != band.N || band.orthonormality_error > 1e-8)
    throw std::invalid_argument("band basis is rank deficient or not orthonormal");
  if (opt.restarts < 1) throw std::invalid_argument("at least one restart is required");
  const int N = band.N;
  const Eigen::Index n = static_cast<Eigen::Index>(band.grid.node_count());
  const double w = band.grid.cell_weight();
  const double area = band.side * band.side;
  Eigen::MatrixXcd B(n, N);
  for (int j = 0; j < N; ++j) B.col(j) = band.basis[j];
  AbrikosovObjective obj(B, w);

  OptimizerOptions oo;
  oo.tol_energy = opt.tol_energy;
  oo.tol_residual = opt.tol_residual;
  oo.max_iterations = opt.max_iterations;

  std::vector<OptimizerOutcome> runs(opt.restarts);
  parallel_for(runs.size(), opt.threads, [&](std::size_t r) {
    std::mt19937_64 rng(mix_seed(opt.seed, 1000 + r));
    Field c(N);
    for (int j = 0; j < N; ++j) c[j] = gaussian(rng);
    c *= std::sqrt(0.85 * area) / c.norm();
    runs[r] = minimize_objective(obj, c, oo);
    // optimal amplitude for the shape found
    Field v = B * runs[r].u;
    double l2 = w * v.squaredNorm(), l4 = w * v.cwiseAbs2().squaredNorm();
    if (l4 > 0.0) runs[r].u *= std::sqrt(l2 / l4);
    Field g;
    runs[r].energy = obj.value_gradient(runs[r].u, g);
    runs[r].residual = obj.residual(g);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    double scale = std::max(1.0, std::abs(runs[best].energy));
    if (runs[r].energy < runs[best].energy - opt.tol_energy * scale ||
        (runs[r].energy <= runs[best].energy + opt.tol_energy * scale && runs[r].residual < runs[best].residual))
      best = r;
  }
  AbrikosovResult res;
  res.N = N;
  res.coefficients = runs[best].u;
  Field v = B * res.coefficients;
  res.l2 = w * v.squaredNorm();
  res.l4 = w * v.cwiseAbs2().squaredNorm();
  res.c_value = res.l4 > 0.0 ? -res.l2 * res.l2 / (2.0 * res.l4) : 0.0;
  res.density = res.c_value / area;
  res.beta_ratio = res.l4 > 0.0 ? area * res.l4 / (res.l2 * res.l2) : 0.0;
  res.residual = runs[best].residual;
  res.converged = runs[best].converged || res.residual <= opt.tol_residual;
  res.restarts_used = opt.restarts;
  if (!(res.c_value <= 0.0)) throw std::logic_error("Abrikosov minimum is positive");
  return res;
}

}  // namespace glthermo

#include "glthermo/torus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

namespace glthermo {

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct MagneticTorusSolver::Plans {
  fftw_complex* buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buf) fftw_free(buf);
  }
};

MagneticTorusSolver::MagneticTorusSolver(int n, double spacing, int flux_quanta, double kinetic_scale,
                                         double stiffness, const std::vector<double>& shifts)
    : n_(n), a_(spacing), flux_(flux_quanta), s_(kinetic_scale), stiffness_(stiffness) {
  if (n < 3 || flux_quanta < 1 || !(spacing > 0.0))
    throw std::invalid_argument("torus solver needs n >= 3 and positive flux");
  for (double sh : shifts)
    if (!(sh > 0.0)) throw std::invalid_argument("torus solver shifts must be positive");
  const double R = n * a_;
  field_ = 2.0 * std::numbers::pi * flux_ / (R * R);
  floor_ = s_ * lattice_ground_energy(field_ * a_ * a_) / (a_ * a_);
  corner_ = (flux_ % 2) ? -1.0 : 1.0;

  base_diag_.resize(static_cast<std::size_t>(n_) * n_);
  for (int m = 0; m < n_; ++m)
    for (int j = 0; j < n_; ++j) {
      double y = -0.5 * R + j * a_;
      double k = 2.0 * std::numbers::pi * m / n_ + field_ * a_ * y;
      base_diag_[static_cast<std::size_t>(m) * n_ + j] = s_ * (4.0 - 2.0 * std::cos(k)) / (a_ * a_);
    }

  std::vector<char> seen(n_, 0);
  const int step = flux_ % n_;
  for (int m0 = 0; m0 < n_; ++m0) {
    if (seen[m0]) continue;
    Chain c;
    int m = m0;
    do {
      seen[m] = 1;
      c.modes.push_back(m);
      m = (m + step) % n_;
    } while (m != m0);
    chains_.push_back(std::move(c));
  }

  factors_.resize(shifts.size());
  for (std::size_t s = 0; s < shifts.size(); ++s)
    for (const Chain& c : chains_) factors_[s].push_back(factorise(c, shifts[s]));

  gauge_.resize(static_cast<std::size_t>(n_) * n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      double x = -0.5 * R + i * a_, y = -0.5 * R + j * a_;
      gauge_[static_cast<std::size_t>(j) * n_ + i] = std::polar(1.0, -0.5 * field_ * x * y);
    }

  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  plans_->buf = fftw_alloc_complex(static_cast<std::size_t>(n_) * n_);
  int len[1] = {n_};
  plans_->forward = fftw_plan_many_dft(1, len, n_, plans_->buf, nullptr, 1, n_, plans_->buf, nullptr, 1, n_,
                                       FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_dft(1, len, n_, plans_->buf, nullptr, 1, n_, plans_->buf, nullptr, 1,
                                        n_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

MagneticTorusSolver::~MagneticTorusSolver() = default;

MagneticTorusSolver::Factor MagneticTorusSolver::factorise(const Chain& c, double shift) const {
  const int K = static_cast<int>(c.modes.size());
  const int L = K * n_;
  const double hop = -stiffness_ * s_ / (a_ * a_);
  std::vector<double> d(L), e(L - 1);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < n_; ++j) {
      int q = k * n_ + j;
      d[q] = stiffness_ * (diag(c.modes[k], j) - floor_) + shift;
      if (q < L - 1) e[q] = hop * ((q + 1) % n_ == 0 ? corner_ : 1.0);
    }
  const double f = hop * corner_;

  Factor F;
  F.D.resize(L);
  F.l.resize(L - 2);
  F.r.resize(L - 1);
  F.D[0] = d[0];
  for (int i = 0; i + 2 < L; ++i) {
    F.l[i] = e[i] / F.D[i];
    F.D[i + 1] = d[i + 1] - F.l[i] * F.l[i] * F.D[i];
  }
  F.r[0] = f / F.D[0];
  for (int j = 1; j <= L - 2; ++j) {
    double a = (j == L - 2) ? e[L - 2] : 0.0;
    F.r[j] = (a - F.r[j - 1] * F.D[j - 1] * F.l[j - 1]) / F.D[j];
  }
  if (L == 2) F.r[0] = (e[0] + f) / F.D[0];
  double last = d[L - 1];
  for (int j = 0; j <= L - 2; ++j) last -= F.r[j] * F.r[j] * F.D[j];
  F.D[L - 1] = last;
  for (double v : F.D)
    if (!(v > 0.0)) throw std::runtime_error("torus preconditioner is not positive definite");
  return F;
}

void MagneticTorusSolver::solve(cplx* data, std::size_t shift_index) const {
  const std::size_t total = static_cast<std::size_t>(n_) * n_;
  auto* buf = reinterpret_cast<cplx*>(plans_->buf);
  for (std::size_t p = 0; p < total; ++p) buf[p] = data[p] * gauge_[p];
  fftw_execute(plans_->forward);

  std::vector<cplx> x;
  for (std::size_t ci = 0; ci < chains_.size(); ++ci) {
    const Chain& c = chains_[ci];
    const Factor& F = factors_.at(shift_index)[ci];
    const int K = static_cast<int>(c.modes.size());
    const int L = K * n_;
    x.resize(L);
    auto at = [&](int q) -> cplx& {
      int k = q / n_, j = q % n_;
      return buf[static_cast<std::size_t>(j) * n_ + c.modes[k]];
    };
    for (int q = 0; q < L; ++q) x[q] = at(q);
    cplx tail = x[L - 1];
    for (int i = 1; i <= L - 2; ++i) x[i] -= F.l[i - 1] * x[i - 1];
    for (int j = 0; j <= L - 2; ++j) tail -= F.r[j] * x[j];
    x[L - 1] = tail;
    for (int q = 0; q < L; ++q) x[q] /= F.D[q];
    x[L - 2] -= F.r[L - 2] * x[L - 1];
    for (int i = L - 3; i >= 0; --i) x[i] -= F.l[i] * x[i + 1] + F.r[i] * x[L - 1];
    for (int q = 0; q < L; ++q) at(q) = x[q];
  }

  fftw_execute(plans_->backward);
  const double scale = 1.0 / n_;
  for (std::size_t p = 0; p < total; ++p) data[p] = buf[p] * std::conj(gauge_[p]) * scale;
}

std::vector<double> MagneticTorusSolver::spectrum(int count) const {
  std::vector<double> all;
  const double hop = -s_ / (a_ * a_);
  for (const Chain& c : chains_) {
    const int K = static_cast<int>(c.modes.size());
    const int L = K * n_;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < n_; ++j) {
        int q = k * n_ + j;
        A(q, q) = diag(c.modes[k], j);
        int q1 = (q + 1) % L;
        double v = hop * ((q + 1) % n_ == 0 ? corner_ : 1.0);
        A(q, q1) += v;
        A(q1, q) += v;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    for (int i = 0; i < L; ++i) all.push_back(es.eigenvalues()[i]);
  }
  std::sort(all.begin(), all.end());
  if (count < static_cast<int>(all.size())) all.resize(count);
  return all;
}

FieldPreconditioner::FieldPreconditioner(const GaugeLinks& links, double b, double shift)
    : grid_(links.grid) {
  const GridSpec& g = grid_;
  const double a = g.spacing;
  const double s = links.kinetic_scale;
  std::vector<double> shifts{shift};
  int flux = 0;
  if (g.bc == Boundary::magnetic_periodic) {
    torus_n_ = g.points_per_side;
    offset_ = 0;
    flux = g.flux_quanta();
  } else {
    torus_n_ = g.points_per_side + 2;
    offset_ = 1;
    double Rt = torus_n_ * a;
    flux = std::max(1, static_cast<int>(std::lround(Rt * Rt / (2.0 * std::numbers::pi))));
    if (g.dim == 3) {
      const int n = g.points_per_side;
      planes_ = n - 1;
      shifts.clear();
      sine_.resize(planes_, planes_);
      for (int k = 1; k <= planes_; ++k) {
        double lam = (2.0 - 2.0 * std::cos(std::numbers::pi * k / n)) / (a * a);
        shifts.push_back(shift + b * s * lam);
        for (int m = 1; m <= planes_; ++m)
          sine_(k - 1, m - 1) = std::sqrt(2.0 / n) * std::sin(std::numbers::pi * k * m / n);
      }
    }
  }
  solver_ = std::make_unique<MagneticTorusSolver>(torus_n_, a, flux, s, b, shifts);
  buffer_.resize(static_cast<std::size_t>(torus_n_) * torus_n_);
}

FieldPreconditioner::~FieldPreconditioner() = default;

void FieldPreconditioner::apply(const cplx* in, cplx* out) const {
  const GridSpec& g = grid_;
  const int m = g.nodes_per_side();
  const std::size_t tn = static_cast<std::size_t>(torus_n_);
  if (g.bc == Boundary::magnetic_periodic) {
    std::copy(in, in + g.node_count(), out);
    solver_->solve(out, 0);
    return;
  }
  const int n = g.points_per_side;
  auto embed_solve = [&](const cplx* src, cplx* dst, std::size_t shift_index) {
    std::fill(buffer_.begin(), buffer_.end(), cplx(0.0, 0.0));
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        buffer_[(j + offset_) * tn + (i + offset_)] = src[static_cast<std::size_t>(j) * m + i];
    solver_->solve(buffer_.data(), shift_index);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        bool pinned = i == 0 || j == 0 || i == n || j == n;
        dst[static_cast<std::size_t>(j) * m + i] = pinned ? cplx(0.0, 0.0) : buffer_[(j + offset_) * tn + (i + offset_)];
      }
  };
  if (g.dim == 2) {
    embed_solve(in, out, 0);
    return;
  }
  const std::size_t plane = static_cast<std::size_t>(m) * m;
  planes_buf_.resize(static_cast<Eigen::Index>(plane), planes_);
  Eigen::Map<const Eigen::MatrixXcd> src(in + plane, static_cast<Eigen::Index>(plane), planes_);
  planes_buf_.noalias() = src * sine_.cast<cplx>();
  for (int k = 0; k < planes_; ++k) {
    cplx* col = planes_buf_.data() + plane * k;
    embed_solve(col, col, static_cast<std::size_t>(k));
  }
  std::fill(out, out + g.node_count(), cplx(0.0, 0.0));
  Eigen::Map<Eigen::MatrixXcd> dst(out + plane, static_cast<Eigen::Index>(plane), planes_);
  dst.noalias() = planes_buf_ * sine_.cast<cplx>();
}

}  // namespace glthermo

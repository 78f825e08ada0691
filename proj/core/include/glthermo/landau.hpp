#pragma once

#include <cstdint>
#include <vector>

#include "glthermo/energy.hpp"
#include "glthermo/optimizer.hpp"

namespace glthermo {

struct LandauBand {
  int N = 0;
  double side = 0.0;
  GridSpec grid;
  double kinetic_scale = 1.0;
  std::vector<double> eigenvalues;  // lowest k, ascending
  std::vector<Field> basis;         // N fields, orthonormal in the cell-weighted inner product
  std::vector<Field> higher;        // eigenvectors k = N+1 .. of the computed block
  double gap_ratio = 0.0;           // mu_{N+1} / mu_N
  double band_deviation = 0.0;      // max |mu_i - 1| over the band
  double orthonormality_error = 0.0;
  int iterations = 0;
};

struct BandOptions {
  double tol = 1e-9;  // relative eigen-residual
  int max_iterations = 300;
  int filter_degree = 24;
  std::uint64_t seed = 0;
  KineticNormalization normalization = KineticNormalization::calibrated;
};

// Lowest k >= N + 1 eigenpairs of s(-Delta_B) on the N-quantum torus.
// Throws std::runtime_error if the band is not separated (the count of
// eigenvalues below (1 + mu_{N+1}) / 2 differs from N).
LandauBand lowest_band(int N, double spacing, int k, const BandOptions& opt = {});

struct BandProjection {
  OrderParameter in_band;
  double out_norm = 0.0;
  double norm = 0.0;
};
BandProjection project_band(const LandauBand& band, const OrderParameter& f);

// Cell-weighted coefficients <basis_j, f>.
Eigen::VectorXcd band_coefficients(const LandauBand& band, const Field& f);
OrderParameter band_field(const LandauBand& band, const Eigen::VectorXcd& coeffs);

struct AbrikosovOptions {
  double tol_energy = 1e-10;
  double tol_residual = 1e-6;
  int restarts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 20000;
  int threads = 1;
};

struct AbrikosovResult {
  int N = 0;
  double c_value = 0.0;
  Eigen::VectorXcd coefficients;
  double density = 0.0;     // c_value / (2 pi N)
  double beta_ratio = 0.0;  // area * int|v|^4 / (int|v|^2)^2
  double l2 = 0.0;          // int |v|^2
  double l4 = 0.0;          // int |v|^4
  double residual = 0.0;
  bool converged = false;
  int restarts_used = 0;
};

// Minimises -int|v|^2 + 1/2 int|v|^4 over the span of the band basis.
AbrikosovResult minimize_abrikosov(const LandauBand& band, const AbrikosovOptions& opt = {});

}  // namespace glthermo

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glthermo/energy.hpp"
#include "glthermo/optimizer.hpp"

namespace glthermo {

struct MinimizeOptions {
  double tol_energy = 1e-8;
  double tol_residual = 1e-6;
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iterations = 50000;
  Method method = Method::ncg;
  bool precondition = true;
  KineticNormalization normalization = KineticNormalization::calibrated;
  // Extra starting fields on the same grid; any field is a valid start
  // because the result is an upper bound either way.
  std::vector<OrderParameter> warm_starts;
  int threads = 1;
  std::size_t max_nodes_3d = 4'000'000;
};

struct MinimizeResult {
  double energy = 0.0;
  EnergyBreakdown breakdown;
  OrderParameter field;
  double residual = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  double b = 0.0;
  double side = 0.0;
  double spacing = 0.0;
  Boundary bc = Boundary::dirichlet;
  int dim = 2;
  std::uint64_t seed = 0;
  bool converged = false;
  std::string origin;  // which start produced the result
  double tol_energy = 0.0;
  double tol_residual = 0.0;
};

MinimizeResult minimize_on_grid(const GridSpec& grid, double b, const MinimizeOptions& opt);
MinimizeResult minimize_dirichlet_2d(double b, double side, double spacing, const MinimizeOptions& opt);
// The spacing is lowered to the nearest value giving an even cell count on
// the quantized side sqrt(2 pi N).
MinimizeResult minimize_periodic_2d(double b, int flux_quanta, double spacing, const MinimizeOptions& opt);
MinimizeResult minimize_dirichlet_3d(double b, double side, double spacing, const MinimizeOptions& opt);

// Empirical constant in max|u| <= C [1/b - 1]^{1/2}; 0 when b >= 1.
double amplitude_constant(const MinimizeResult& r);

// Same-spacing embedding of a Dirichlet field into a larger centred box.
OrderParameter embed_centered(const OrderParameter& u, const GridSpec& larger);
// n x n copies of a Dirichlet field on K_R joined by magnetic translations,
// giving a field on K_{nR} whose energy is n^2 times the original.
OrderParameter tile_dirichlet(const OrderParameter& u, int copies);
// Periodic field on the N torus seen as a field on the n^2 N torus.
OrderParameter tile_periodic(const OrderParameter& u, int copies);
// Dirichlet field on K_R placed on the periodic grid with the same nodes.
OrderParameter dirichlet_to_periodic(const OrderParameter& u, const GridSpec& periodic);
// Field on the plane x3 = const (interior plane index k) of a 3D grid.
OrderParameter slice_3d(const OrderParameter& u, int plane);
// Extrude a 2D Dirichlet field along x3 with a profile that vanishes at the faces.
OrderParameter extrude_2d(const OrderParameter& u, const GridSpec& cube);

struct Extrapolation {
  double value = 0.0;
  double order = 0.0;  // NaN when it cannot be fitted
  double residual = 0.0;
  bool flagged = false;
  bool monotone = true;
  std::string note;
};

// Spacing/energy pairs in any order.  Richardson with the a^2 model when the
// fitted order lies in [1.5, 2.5]; otherwise the result is flagged and a
// polynomial fit in a (degree 2 through the finest three points) is used.
Extrapolation continuum_extrapolate(std::vector<std::pair<double, double>> points, double noise = 0.0);
Extrapolation continuum_extrapolate(const std::vector<MinimizeResult>& results);

struct SandwichCheck {
  double lower_slack = 0.0;  // M0 - R m0
  double upper_excess = 0.0; // M0 - (R - 2) m0, the value M-hat must cover
  bool lower_ok = false;
};
SandwichCheck check_3d_sandwich(const MinimizeResult& m3d, const MinimizeResult& m2d, double tol);

}  // namespace glthermo

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace glthermo {

using cplx = std::complex<double>;
using Field = Eigen::VectorXcd;

enum class Boundary { dirichlet, magnetic_periodic };

const char* to_string(Boundary bc);

class QuantizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Square (dim 2) or cube (dim 3) centred at the origin.  points_per_side is
// the number of cells per side.  Dirichlet grids store the boundary layer,
// periodic grids store one fundamental cell (node n is identified with 0).
struct GridSpec {
  int dim = 2;
  double side = 0.0;
  double spacing = 0.0;
  int points_per_side = 0;
  Boundary bc = Boundary::dirichlet;

  int nodes_per_side() const {
    return bc == Boundary::dirichlet ? points_per_side + 1 : points_per_side;
  }
  std::size_t node_count() const;
  double coord(int i) const { return -0.5 * side + i * spacing; }
  double cell_weight() const;
  // N = side^2 / (2 pi); only meaningful for periodic grids
  int flux_quanta() const;
  void validate() const;
  bool same_as(const GridSpec& o) const;
};

double quantized_side(int flux_quanta);

struct SideSnap {
  int flux_quanta;
  double side;
  double distance;
};
SideSnap snap_to_quantized(double side);

// Cell count is the smallest even integer with side/n <= target_spacing.
GridSpec make_dirichlet_grid(int dim, double side, double target_spacing);
GridSpec make_periodic_grid(int flux_quanta, double target_spacing);

struct OrderParameter {
  GridSpec grid;
  Field values;

  static OrderParameter zeros(const GridSpec& g);
  double max_modulus() const;
};

std::size_t node_index(const GridSpec& g, int i, int j, int k = 0);
bool is_boundary_node(const GridSpec& g, int i, int j, int k = 0);

enum class KineticNormalization { calibrated, raw };

// Bottom of the spectrum of the infinite-lattice link Laplacian
// 4 - (hops) at flux phi per plaquette, in units of 1/a^2.
double lattice_ground_energy(double flux_per_plaquette);

// Multiplier that puts the bottom of the lattice magnetic Laplacian at
// exactly 1 for unit field at this spacing.
double kinetic_scale(double spacing);

struct GaugeLinks {
  GridSpec grid;
  double kinetic_scale = 1.0;
  // Forward edge leaving each node in direction d.  Periodic grids carry
  // the effective angle of wrap edges (quasi-periodic phase folded in).
  std::array<std::vector<double>, 3> angle;
  std::array<std::vector<cplx>, 3> hop;  // exp(-i angle)
};

// Line integral of the symmetric gauge (with zero x3 component) along the
// edge from `start` to start + a e_dir.
double symmetric_gauge_angle(const std::array<double, 3>& start, int dir, double a);

GaugeLinks build_gauge_links(const GridSpec& g,
                             KineticNormalization norm = KineticNormalization::calibrated);

// Oriented angle sum around the plaquette with lower-left node (i,j,k)
// spanned by directions d1, d2.  Dirichlet plaquettes must lie inside.
double plaquette_sum(const GaugeLinks& links, int i, int j, int k, int d1, int d2);

// Values of u on the cell translated by (sx, sy) periods: u(x + R s).
OrderParameter wrap_quasi_periodic(const OrderParameter& u, std::array<int, 2> shift);

// Phase relating u(x + R s) to u(x) for a field of the periodic space.
cplx quasi_periodic_phase(double side, double x, double y, std::array<int, 2> shift);

}  // namespace glthermo

#pragma once

#include <array>

#include "glthermo/grid.hpp"

namespace glthermo {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double condensation = 0.0;
  double quartic = 0.0;
  double total = 0.0;
  double b = 0.0;
};

// Discrete energy
//   b s sum_e |u_j e^{-i theta_e} - u_i|^2 a^{dim-2} + a^dim sum_p (-|u_p|^2 + |u_p|^4 / 2)
// where s is the kinetic scale carried by the links.
EnergyBreakdown eval_energy(const OrderParameter& u, const GaugeLinks& links, double b);

// Gradient in complex form G = 2 dE/d(conj u), so that a real perturbation
// changes the energy by Re sum conj(G_p) du_p.  Pinned Dirichlet nodes get 0.
OrderParameter eval_gradient(const OrderParameter& u, const GaugeLinks& links, double b);

// Max-norm over free nodes of -b s Delta_links u - (1 - |u|^2) u.
double eval_residual(const OrderParameter& u, const GaugeLinks& links, double b);

// Raw-pointer kernels shared by the optimizers.  `grad` may be null.
EnergyBreakdown energy_kernel(const GaugeLinks& links, double b, const cplx* u, cplx* grad);

// Residual from a gradient produced by energy_kernel.
double residual_from_gradient(const GridSpec& g, const cplx* grad);

// Coefficients c0..c4 of t -> E(u + t d).
std::array<double, 5> line_polynomial(const GaugeLinks& links, double b, const cplx* u, const cplx* d);

// out = s (-Delta_links) in, the scaled magnetic Laplacian; pinned rows are 0.
void apply_magnetic_operator(const GaugeLinks& links, const cplx* in, cplx* out);

// Discrete L2 inner product with cell weight.
cplx inner(const GridSpec& g, const Field& f, const Field& h);

// Sum |u|^4 times the cell weight.
double quartic_integral(const OrderParameter& u);

}  // namespace glthermo

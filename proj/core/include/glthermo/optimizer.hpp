#pragma once

#include <array>
#include <functional>

#include "glthermo/grid.hpp"

namespace glthermo {

// Smooth objective on a complex vector, viewed as a real vector of twice
// the length.  Gradients use the complex form G with dE = Re <G, du>.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value_gradient(const Field& u, Field& grad) const = 0;
  // Coefficients c0..c4 of t -> E(u + t d); quartic objectives only.
  virtual std::array<double, 5> line_polynomial(const Field& u, const Field& d) const = 0;
  virtual void precondition(const Field& grad, Field& out) const { out = grad; }
  virtual double residual(const Field& grad) const = 0;
};

enum class Method { ncg, lbfgs };

struct OptimizerOptions {
  Method method = Method::ncg;
  double tol_energy = 1e-8;    // relative change over `window` iterations, divided by 10
  double tol_residual = 1e-6;  // max-norm residual
  int window = 50;
  int max_iterations = 50000;
  int lbfgs_memory = 8;
};

struct OptimizerOutcome {
  Field u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

OptimizerOutcome minimize_objective(const Objective& obj, Field u0, const OptimizerOptions& opt);

// Global minimiser over t > 0 of the quartic with coefficients c (c[1] < 0).
// Returns 0 when no decrease is available.
double quartic_argmin(const std::array<double, 5>& c);

// Real roots of a polynomial given by ascending coefficients.
std::vector<double> real_roots(std::vector<double> coeffs);

}  // namespace glthermo

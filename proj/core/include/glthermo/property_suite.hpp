#pragma once

#include <string>
#include <vector>

#include "glthermo/landau.hpp"
#include "glthermo/minimize.hpp"

namespace glthermo {

struct PropertyCheck {
  std::string name;
  std::string point;  // e.g. "b=0.5 R=8"
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs; negative means violated beyond tolerance
  bool pass = true;
  bool hard = true;
};

struct Calibration {
  double C_hat = 0.0;      // m0 <= mp + C [1-b] R
  double C_hat_min = 0.0;  // smallest per-point ratio
  // smallest over sizes N of the constant that size alone needs; the
  // stability check compares it with C_hat
  double C_hat_size_min = 0.0;
  double C_p = 0.0;        // lower bound constant for the best sigma
  double sigma = 0.0;
  double alpha_hat = 0.0;  // alpha (1-b)^2 <= |m0| / R^2
  double C_max = 0.0;      // max|u| <= C_max [1/b - 1]^{1/2}
  double M_hat = 0.0;      // M0 <= (R - 2) m0 + M_hat
};

struct SuiteConfig {
  std::vector<double> bs{0.3, 0.5, 0.7, 0.9};
  std::vector<double> sides{6, 8, 10, 12, 16};
  std::vector<int> Ns{4, 16, 36};
  std::vector<double> abrikosov_bs{0.9, 0.95};
  std::vector<double> sigmas{0.05, 0.1, 0.2, 0.4};
  // sides R whose tiled doubling 2R is checked
  std::vector<double> tiling_sides{6, 8};
  std::vector<double> bs_3d;
  std::vector<double> sides_3d;
  double spacing = 0.25;
  double spacing_3d = 0.5;
  MinimizeOptions minimize;
  BandOptions band;
  AbrikosovOptions abrikosov;
  // Multiplies every computed minimiser before the checks run.  Any value
  // other than 1 is a negative control.
  double corrupt_amplitude = 1.0;
};

struct SuiteReport {
  std::vector<PropertyCheck> checks;
  Calibration calibration;
  bool all_hard_pass = true;
  int failures = 0;
};

SuiteReport property_suite(const SuiteConfig& cfg);

}  // namespace glthermo

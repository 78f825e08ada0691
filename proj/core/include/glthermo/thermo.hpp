#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glthermo/landau.hpp"
#include "glthermo/minimize.hpp"

namespace glthermo {

struct SeriesPoint {
  double scale = 0.0;    // box side R
  double density = 0.0;  // energy / R^2
  double error = 0.0;    // per-point uncertainty
  bool extrapolated = false;
};

struct ThermoSeries {
  std::optional<double> b;  // empty for the lattice route
  std::vector<SeriesPoint> points;
  double limit = 0.0;         // NaN when the series is rejected
  double limit_error = 0.0;
  double fit_constant = 0.0;  // C in e(R) = limit + C / R
  double fit_exponent = 1.0;  // p in e(R) = g + C R^{-p}, reported only
  double residual = 0.0;      // rms misfit of the 1/R model
  bool flagged = false;
  std::string note;
};

// Least-squares fit of e(R) = g + C / R; the intercept error combines the
// standard error (when there are spare degrees of freedom), the largest
// residual and the per-point errors.  With require_monotone set, a density
// that rises with R, or lies below the fitted limit, by more than the point
// errors plus `noise` flags the series and the limit becomes NaN.
ThermoSeries fit_inverse_scale(std::vector<SeriesPoint> points, bool require_monotone = false, double noise = 0.0);

struct GOptions {
  MinimizeOptions minimize;
  // Spacings used for the continuum extrapolation at each side, coarse to
  // fine.  A single entry disables it.
  std::vector<double> spacings{0.25};
  // Embed the result at the previous side as an extra start.
  bool chain_warm_starts = true;
};

ThermoSeries estimate_g(double b, const std::vector<double>& sides, const GOptions& opt = {});

struct LatticeOptions {
  BandOptions band;
  AbrikosovOptions abrikosov;
  int threads = 1;
};

struct LatticeSeries {
  ThermoSeries series;
  std::vector<AbrikosovResult> results;
  std::vector<LandauBand> bands;  // kept only when keep_bands is set
};

LatticeSeries estimate_e2_lattice(const std::vector<int>& Ns, double spacing, const LatticeOptions& opt = {},
                                  bool keep_bands = false);

struct GlRouteOptions {
  GOptions g;
  // sides for each b are side_factors * max(min_side, (1-b)^{-coupling_exponent})
  std::vector<double> side_factors{1.0, 1.5, 2.0};
  double min_side = 8.0;
  double coupling_exponent = 0.8;
};

struct GlRoute {
  ThermoSeries series;  // points hold (1 - b, g(b) / (1 - b)^2)
  std::vector<ThermoSeries> per_b;
  std::vector<std::string> warnings;
  bool ratios_monotone = true;
};

// Sides below (1-b)^{-coupling_exponent} are rejected with a warning.
GlRoute estimate_e2_gl(const std::vector<double>& bs, const GlRouteOptions& opt = {},
                       const std::vector<std::vector<double>>& explicit_sides = {});

// Linear fit y = c0 + c1 x with the intercept error as above.
ThermoSeries fit_linear(std::vector<SeriesPoint> points);

struct TrialConfigReport {
  double kappa = 0.0;
  double H = 0.0;
  double b = 0.0;
  double eta = 0.0;
  double ell = 0.0;
  double R = 0.0;
  int N = 0;
  double box_side = 0.0;
  double domain_volume = 0.0;
  double energy = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double normalized_slack = 0.0;  // slack / max(kappa, [kappa - H]_+^2)
  double E2 = 0.0;
  double scaled_side = 0.0;
  double spacing = 0.0;
  double max_modulus = 0.0;
  bool vanishes_on_layer = false;
  bool matches_outside_double_layer = false;
  std::string domain_note = "box-domain adaptation";
};

struct TrialOptions {
  double spacing = 0.25;  // target spacing in scaled units
  MinimizeOptions minimize;
};

// Cut-off chi: 1 on [-1, 1], 0 outside [-2, 2], smooth in between.
double cutoff_chi(double t);

// Default cut-off width policy, eta = 0.1 * sqrt(40 / kappa).
double default_eta(double kappa);

// Evaluates the frozen-field 3D energy of h_eta(x) u_{b,R}(sqrt(kappa H) x_perp)
// on the box (-box_side/2, box_side/2)^3 in physical units.  `periodic` is
// the stored minimiser for (b, N); it is computed when absent.
TrialConfigReport bulk_trial_energy(double kappa, double H, int N, double eta, double box_side, double E2,
                                    const MinimizeResult* periodic = nullptr, const TrialOptions& opt = {});

}  // namespace glthermo

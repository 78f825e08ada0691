#include "glthermo/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace glthermo {

namespace {

std::string label(double b, const char* key, double v) {
  std::ostringstream os;
  os << "b=" << b << ' ' << key << '=' << v;
  return os.str();
}

class Suite {
 public:
  explicit Suite(const SuiteConfig& cfg) : cfg_(cfg) {}

  void add(std::string name, std::string point, double lhs, double rhs, double tol, bool hard = true) {
    PropertyCheck c{std::move(name), std::move(point), lhs, rhs, rhs - lhs, rhs - lhs >= -tol, hard};
    if (!c.pass && hard) {
      report_.all_hard_pass = false;
      ++report_.failures;
    }
    report_.checks.push_back(std::move(c));
  }

  double tol(double e) const { return 10.0 * cfg_.minimize.tol_energy * std::max(1.0, std::abs(e)); }

  // Applies the negative-control corruption and re-evaluates the energy.
  MinimizeResult finish(MinimizeResult r) const {
    if (cfg_.corrupt_amplitude == 1.0) return r;
    r.field.values *= cfg_.corrupt_amplitude;
    GaugeLinks links = build_gauge_links(r.field.grid, cfg_.minimize.normalization);
    r.breakdown = eval_energy(r.field, links, r.b);
    r.energy = r.breakdown.total;
    r.residual = eval_residual(r.field, links, r.b);
    return r;
  }

  void check_minimizer(const MinimizeResult& r, const std::string& point) {
    const double R = r.side;
    const double gap = std::max(1.0 - r.b, 0.0);
    const double vol = std::pow(R, r.dim);
    const double t = tol(r.energy);
    add("rough_lower", point, -0.5 * gap * gap * vol, r.energy, t);
    add("rough_upper", point, r.energy, 0.0, t);
    add("max_principle", point, r.field.max_modulus(), 1.0, cfg_.minimize.tol_residual);
    if (r.converged) {
      double q = quartic_integral(r.field);
      add("critical_identity", point, std::abs(r.energy + 0.5 * q), 0.0, t);
    }
    if (r.b >= 1.0) {
      add("normal_energy", point, std::abs(r.energy), 0.0, 1e-6);
      add("normal_field", point, r.field.max_modulus(), 0.0, 1e-6);
    } else if (r.b > 0.0) {
      report_.calibration.C_max = std::max(report_.calibration.C_max, amplitude_constant(r));
    }
  }

  SuiteReport run() {
    std::vector<double> all_b = cfg_.bs;
    for (double b : cfg_.abrikosov_bs)
      if (std::find(all_b.begin(), all_b.end(), b) == all_b.end()) all_b.push_back(b);

    std::vector<double> gap_ratios;
    std::map<int, double> gap_by_size;
    double alpha = std::numeric_limits<double>::infinity();
    // sigma -> largest constant needed
    std::map<double, double> needed;
    for (double s : cfg_.sigmas) needed[s] = 0.0;

    for (double b : all_b) {
      const double gam = std::max(1.0 - b, 0.0);
      std::map<double, MinimizeResult> m0;
      OrderParameter prev;
      for (double R : cfg_.sides) {
        GridSpec g = make_dirichlet_grid(2, R, cfg_.spacing);
        MinimizeOptions mo = cfg_.minimize;
        if (prev.values.size() && std::abs(prev.grid.spacing - g.spacing) <= 1e-12 * g.spacing)
          mo.warm_starts.push_back(embed_centered(prev, g));
        MinimizeResult r = minimize_on_grid(g, b, mo);
        prev = r.field;
        m0[R] = finish(std::move(r));
        check_minimizer(m0[R], label(b, "R", R));
      }
      double last_R = 0.0;
      for (auto& [R, r] : m0) {
        if (last_R > 0.0) add("monotone_in_R", label(b, "R", R), r.energy, m0[last_R].energy, tol(r.energy));
        last_R = R;
      }
      if (!m0.empty() && gam > 0.0) {
        auto& [R, r] = *m0.rbegin();
        alpha = std::min(alpha, std::abs(r.energy) / (R * R) / (gam * gam));
      }

      for (double R : cfg_.tiling_sides) {
        auto it = m0.find(R);
        if (it == m0.end()) continue;
        GridSpec g2 = make_dirichlet_grid(2, 2.0 * R, cfg_.spacing);
        MinimizeOptions mo = cfg_.minimize;
        if (it->second.field.grid.spacing == g2.spacing) {
          OrderParameter clean = it->second.field;
          clean.values /= cfg_.corrupt_amplitude;
          mo.warm_starts.push_back(tile_dirichlet(clean, 2));
        }
        MinimizeResult r2 = finish(minimize_on_grid(g2, b, mo));
        add("subadditive_tiling", label(b, "R", R), r2.energy, 4.0 * it->second.energy, tol(r2.energy));
      }

      const bool abrikosov = std::find(cfg_.abrikosov_bs.begin(), cfg_.abrikosov_bs.end(), b) != cfg_.abrikosov_bs.end();
      for (int N : cfg_.Ns) {
        GridSpec pg = make_periodic_grid(N, cfg_.spacing);
        GridSpec dg = make_dirichlet_grid(2, pg.side, cfg_.spacing);
        MinimizeResult d = minimize_on_grid(dg, b, cfg_.minimize);
        MinimizeOptions mo = cfg_.minimize;
        mo.warm_starts.push_back(dirichlet_to_periodic(d.field, pg));
        double c_value = 0.0;
        if (abrikosov && gam > 0.0) {
          LandauBand band = lowest_band(N, cfg_.spacing, N + 1, cfg_.band);
          AbrikosovResult ab = minimize_abrikosov(band, cfg_.abrikosov);
          c_value = ab.c_value;
          OrderParameter v = band_field(band, ab.coefficients);
          v.values *= std::sqrt(gam);
          mo.warm_starts.push_back(v);
        }
        MinimizeResult p = finish(minimize_on_grid(pg, b, mo));
        d = finish(std::move(d));
        const std::string pt = label(b, "N", N);
        check_minimizer(p, pt);
        check_minimizer(d, pt);
        const double R = pg.side;
        add("periodic_below_dirichlet", pt, p.energy, d.energy, tol(d.energy));
        if (gam > 0.0) {
          double ratio = (d.energy - p.energy) / (gam * R);
          if (ratio > 0.0) gap_ratios.push_back(ratio);
          gap_by_size[N] = std::max(gap_by_size[N], ratio);
        }
        if (abrikosov && gam > 0.0) {
          add("periodic_below_abrikosov", pt, p.energy, gam * gam * c_value, tol(p.energy));
          for (double s : cfg_.sigmas) {
            double deficit = (1.0 + 2.0 * s) * c_value - p.energy / (gam * gam);
            double c = std::max(0.0, deficit) * s * s * s / (gam * gam * std::pow(R, 4));
            needed[s] = std::max(needed[s], c);
          }
        }
      }
    }

    Calibration& cal = report_.calibration;
    if (!gap_ratios.empty()) {
      cal.C_hat = *std::max_element(gap_ratios.begin(), gap_ratios.end());
      cal.C_hat_min = *std::min_element(gap_ratios.begin(), gap_ratios.end());
      cal.C_hat_size_min = cal.C_hat;
      for (auto& [N, c] : gap_by_size) cal.C_hat_size_min = std::min(cal.C_hat_size_min, c);
    }
    add("gap_constant_positive", "all", 0.0, cal.C_hat, 0.0, false);
    add("gap_constant_stable", "all", cal.C_hat, 3.0 * cal.C_hat_size_min, 0.0, false);
    if (!needed.empty()) {
      auto best = std::min_element(needed.begin(), needed.end(),
                                   [](auto& x, auto& y) { return x.second < y.second; });
      cal.sigma = best->first;
      cal.C_p = best->second;
    }
    cal.alpha_hat = std::isfinite(alpha) ? alpha : 0.0;
    add("alpha_positive", "all", 0.0, cal.alpha_hat, 0.0, false);

    for (double b : cfg_.bs_3d)
      for (double R : cfg_.sides_3d) {
        GridSpec g2 = make_dirichlet_grid(2, R, cfg_.spacing_3d);
        GridSpec g3 = make_dirichlet_grid(3, R, cfg_.spacing_3d);
        MinimizeResult m2 = minimize_on_grid(g2, b, cfg_.minimize);
        MinimizeOptions mo = cfg_.minimize;
        mo.warm_starts.push_back(extrude_2d(m2.field, g3));
        MinimizeResult m3 = finish(minimize_on_grid(g3, b, mo));
        m2 = finish(std::move(m2));
        const std::string pt = label(b, "R3", R);
        check_minimizer(m3, pt);
        SandwichCheck s = check_3d_sandwich(m3, m2, cfg_.minimize.tol_energy * std::max(1.0, std::abs(m3.energy)));
        add("sandwich_lower", pt, R * m2.energy, m3.energy, tol(m3.energy));
        cal.M_hat = std::max(cal.M_hat, s.upper_excess);
      }
    return report_;
  }

 private:
  const SuiteConfig& cfg_;
  SuiteReport report_;
};

}  // namespace

SuiteReport property_suite(const SuiteConfig& cfg) {
  if (!(cfg.corrupt_amplitude > 0.0)) throw std::invalid_argument("corruption factor must be positive");
  return Suite(cfg).run();
}

}  // namespace glthermo

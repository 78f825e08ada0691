#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glthermo/landau.hpp"
#include "glthermo/parallel.hpp"
#include "glthermo/property_suite.hpp"
#include "glthermo/thermo.hpp"

namespace glthermo::cli {

namespace {

const std::vector<std::string> minimize_keys{"tol", "tol-residual", "restarts", "seed", "method", "max-iterations"};

std::vector<std::string> with_minimize(std::vector<std::string> keys) {
  keys.insert(keys.end(), minimize_keys.begin(), minimize_keys.end());
  return keys;
}

const std::vector<std::pair<std::string, std::string>> minimize_defaults{
    {"tol", "1e-8"}, {"tol-residual", "1e-6"}, {"restarts", "4"},
    {"seed", "0"},   {"method", "ncg"},        {"max-iterations", "50000"}};

std::vector<std::pair<std::string, std::string>> defaults_with(std::vector<std::pair<std::string, std::string>> d) {
  d.insert(d.end(), minimize_defaults.begin(), minimize_defaults.end());
  return d;
}

double positive(const Params& p, const std::string& key) {
  double v = p.num(key);
  if (!(v > 0.0)) throw UsageError("--" + key + " must be positive");
  return v;
}

double field_b(const Params& p) {
  double b = p.num("b");
  if (!(b >= 0.0)) throw UsageError("--b must be non-negative");
  return b;
}

int positive_int(const Params& p, const std::string& key) {
  int v = p.integer(key);
  if (v < 1) throw UsageError("--" + key + " must be at least 1");
  return v;
}

MinimizeOptions minimize_options(const Context& ctx, int threads) {
  const Params& p = ctx.params;
  MinimizeOptions o;
  o.tol_energy = positive(p, "tol");
  o.tol_residual = positive(p, "tol-residual");
  o.restarts = positive_int(p, "restarts");
  o.seed = ctx.seed;
  o.max_iterations = positive_int(p, "max-iterations");
  std::string m = p.str("method");
  if (m == "ncg")
    o.method = Method::ncg;
  else if (m == "lbfgs")
    o.method = Method::lbfgs;
  else
    throw UsageError("--method must be ncg or lbfgs");
  o.threads = threads;
  return o;
}

std::vector<double> level_spacings(double a, int levels) {
  std::vector<double> s;
  for (int k = 0; k < levels; ++k) s.push_back(a * std::pow(2.0, 0.5 * (levels - 1 - k)));
  return s;
}

ojson bound(const std::string& name, double lhs, double rhs, double tol) {
  ojson j;
  j["name"] = name;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["pass"] = lhs <= rhs + tol;
  return j;
}

ojson breakdown_json(const EnergyBreakdown& e) {
  ojson j;
  j["kinetic"] = e.kinetic;
  j["condensation"] = e.condensation;
  j["quartic"] = e.quartic;
  return j;
}

ojson extrapolation_json(const Extrapolation& x) {
  ojson j;
  j["value"] = x.value;
  j["order"] = std::isnan(x.order) ? ojson(nullptr) : ojson(x.order);
  j["residual"] = x.residual;
  j["flagged"] = x.flagged;
  j["note"] = x.note;
  return j;
}

double slack_tol(const MinimizeResult& r) { return 10.0 * r.tol_energy * std::max(1.0, std::abs(r.energy)); }

void minimizer_bounds(const MinimizeResult& r, ojson& bounds) {
  const double gap = std::max(1.0 - r.b, 0.0);
  const double vol = std::pow(r.side, r.dim);
  const double t = slack_tol(r);
  bounds.push_back(bound("rough_lower", -0.5 * gap * gap * vol, r.energy, t));
  bounds.push_back(bound("rough_upper", r.energy, 0.0, t));
  bounds.push_back(bound("max_principle", r.field.max_modulus(), 1.0, r.tol_residual));
  if (r.converged)
    bounds.push_back(bound("critical_identity", std::abs(r.energy + 0.5 * quartic_integral(r.field)), 0.0, t));
  if (r.b >= 1.0) bounds.push_back(bound("normal_state", std::abs(r.energy), 0.0, 1e-6));
}

ojson csv_row(const std::string& command, const std::string& label) {
  ojson row = ojson::object();
  for (const auto& c : result_columns()) row[c] = nullptr;
  row["command"] = command;
  row["label"] = label;
  return row;
}

bool all_pass(const ojson& bounds) {
  for (const auto& b : bounds)
    if (!b["pass"].get<bool>()) return false;
  return true;
}

// Shared by m0, mp and m3d: minimise at each level and extrapolate.
Result run_levels(const Context& ctx, const std::string& name,
                  const std::function<MinimizeResult(double spacing, const MinimizeOptions&)>& solve) {
  const Params& p = ctx.params;
  const double a = positive(p, "spacing");
  const int levels = positive_int(p, "levels");
  MinimizeOptions mo = minimize_options(ctx, ctx.threads);
  std::vector<MinimizeResult> rs;
  for (double s : level_spacings(a, levels)) rs.push_back(solve(s, mo));
  const MinimizeResult& fine = rs.back();

  Result res;
  ojson& r = res.record;
  r["energy"] = fine.energy;
  r["breakdown"] = breakdown_json(fine.breakdown);
  r["residual"] = fine.residual;
  r["spacing"] = fine.spacing;
  std::optional<Extrapolation> ex;
  if (rs.size() > 1) ex = continuum_extrapolate(rs);
  r["extrapolated"] = ex ? extrapolation_json(*ex) : ojson(nullptr);
  ojson bounds = ojson::array();
  minimizer_bounds(fine, bounds);
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", fine.tol_energy}, {"residual", fine.tol_residual}};
  bool converged = true;
  ojson lv = ojson::array();
  for (const auto& x : rs) {
    converged = converged && x.converged;
    ojson l;
    l["spacing"] = x.spacing;
    l["energy"] = x.energy;
    l["residual"] = x.residual;
    l["iterations"] = x.iterations;
    l["converged"] = x.converged;
    l["origin"] = x.origin;
    lv.push_back(l);
    ojson row = csv_row(name, "level");
    row["b"] = x.b;
    row["side"] = x.side;
    if (x.bc == Boundary::magnetic_periodic) row["N"] = x.field.grid.flux_quanta();
    row["spacing"] = x.spacing;
    row["seed"] = ctx.seed;
    row["energy"] = x.energy;
    row["kinetic"] = x.breakdown.kinetic;
    row["condensation"] = x.breakdown.condensation;
    row["quartic"] = x.breakdown.quartic;
    row["residual"] = x.residual;
    if (ex) {
      row["extrapolated_value"] = ex->value;
      row["extrapolated_order"] = std::isnan(ex->order) ? ojson(nullptr) : ojson(ex->order);
      row["extrapolated_residual"] = ex->residual;
    }
    row["bounds_pass"] = all_pass(bounds);
    row["converged"] = x.converged;
    res.rows.push_back(row);
  }
  r["converged"] = converged;
  ojson d;
  d["side"] = fine.side;
  d["dim"] = fine.dim;
  d["boundary"] = to_string(fine.bc);
  d["max_modulus"] = fine.field.max_modulus();
  d["amplitude_constant"] = amplitude_constant(fine);
  d["levels"] = lv;
  r["details"] = d;
  return res;
}

Result cmd_m0(const Context& ctx) {
  const double b = field_b(ctx.params);
  const double side = positive(ctx.params, "side");
  return run_levels(ctx, "m0", [&](double s, const MinimizeOptions& mo) { return minimize_dirichlet_2d(b, side, s, mo); });
}

Result cmd_mp(const Context& ctx) {
  const double b = field_b(ctx.params);
  const int N = positive_int(ctx.params, "N");
  return run_levels(ctx, "mp", [&](double s, const MinimizeOptions& mo) {
    MinimizeResult r = minimize_periodic_2d(b, N, s, mo);
    if (ctx.cache.enabled() && s == ctx.params.num("spacing")) {
      // the finest field is kept for trial3d
      std::ostringstream os;
      os.precision(17);
      os << r.field.grid.points_per_side << ' ' << r.field.grid.spacing << '\n';
      for (Eigen::Index i = 0; i < r.field.values.size(); ++i)
        os << r.field.values[i].real() << ' ' << r.field.values[i].imag() << '\n';
      ctx.cache.put(cache_key("mp", ctx.params.canonical(), ctx.seed), os.str(), "field");
    }
    return r;
  });
}

Result cmd_m3d(const Context& ctx) {
  const double b = field_b(ctx.params);
  const double side = positive(ctx.params, "side");
  const auto cap = static_cast<std::size_t>(positive(ctx.params, "max-nodes"));
  std::vector<SandwichCheck> checks;
  std::vector<double> m2;
  Result res = run_levels(ctx, "m3d", [&](double s, MinimizeOptions mo) {
    mo.max_nodes_3d = cap;
    MinimizeResult flat = minimize_dirichlet_2d(b, side, s, mo);
    GridSpec cube = make_dirichlet_grid(3, side, s);
    mo.warm_starts.push_back(extrude_2d(flat.field, cube));
    MinimizeResult r = minimize_on_grid(cube, b, mo);
    checks.push_back(check_3d_sandwich(r, flat, r.tol_energy * std::max(1.0, std::abs(r.energy))));
    m2.push_back(flat.energy);
    return r;
  });
  const double e3 = res.record["energy"].get<double>();
  const double t = 10.0 * ctx.params.num("tol") * std::max(1.0, std::abs(e3));
  res.record["bounds_checked"].push_back(bound("sandwich_lower", side * m2.back(), e3, t));
  res.record["details"]["m0_same_spacing"] = m2.back();
  res.record["details"]["sandwich_upper_excess"] = checks.back().upper_excess;
  for (auto& row : res.rows) row["bounds_pass"] = all_pass(res.record["bounds_checked"]);
  return res;
}

Result cmd_abrikosov(const Context& ctx) {
  const Params& p = ctx.params;
  const int N = positive_int(p, "N");
  BandOptions bo;
  bo.seed = ctx.seed;
  LandauBand band = lowest_band(N, positive(p, "spacing"), N + 1, bo);
  AbrikosovOptions ao;
  ao.tol_energy = positive(p, "tol");
  ao.tol_residual = positive(p, "tol-residual");
  ao.restarts = positive_int(p, "restarts");
  ao.seed = ctx.seed;
  ao.max_iterations = positive_int(p, "max-iterations");
  ao.threads = ctx.threads;
  AbrikosovResult ab = minimize_abrikosov(band, ao);

  Result res;
  ojson& r = res.record;
  const double area = band.side * band.side;
  r["energy"] = ab.c_value;
  r["breakdown"] = {{"kinetic", 0.0}, {"condensation", -ab.l2}, {"quartic", 0.5 * ab.l4}};
  r["residual"] = ab.residual;
  r["spacing"] = band.grid.spacing;
  r["extrapolated"] = nullptr;
  int in_window = 0;
  for (double mu : band.eigenvalues) in_window += mu >= 0.95 && mu <= 1.05;
  ojson bounds = ojson::array();
  ojson count = bound("band_count", std::abs(in_window - N), 0.0, 0.0);
  count["lhs"] = in_window;
  count["rhs"] = N;
  bounds.push_back(count);
  bounds.push_back(bound("spectral_gap", 2.0, band.eigenvalues[N], -1e-300));
  bounds.push_back(bound("c_lower", -0.5 * area, ab.c_value, 0.0));
  bounds.push_back(bound("c_negative", ab.c_value, 0.0, -1e-300));
  bounds.push_back(bound("beta_at_least_one", 1.0, ab.beta_ratio, 1e-12));
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", ao.tol_energy}, {"residual", ao.tol_residual}, {"eigen", bo.tol}};
  r["converged"] = ab.converged;
  ojson d;
  d["N"] = N;
  d["side"] = band.side;
  d["density"] = ab.density;
  d["beta"] = ab.beta_ratio;
  d["eigenvalues"] = band.eigenvalues;
  d["gap_ratio"] = band.gap_ratio;
  d["band_deviation"] = band.band_deviation;
  d["orthonormality_error"] = band.orthonormality_error;
  d["kinetic_scale"] = band.kinetic_scale;
  r["details"] = d;
  ojson row = csv_row("abrikosov", "c");
  row["side"] = band.side;
  row["N"] = N;
  row["spacing"] = band.grid.spacing;
  row["seed"] = ctx.seed;
  row["energy"] = ab.c_value;
  row["kinetic"] = 0.0;
  row["condensation"] = -ab.l2;
  row["quartic"] = 0.5 * ab.l4;
  row["residual"] = ab.residual;
  row["bounds_pass"] = all_pass(bounds);
  row["converged"] = ab.converged;
  res.rows.push_back(row);
  return res;
}

ojson series_json(const ThermoSeries& s) {
  ojson j;
  j["b"] = s.b ? ojson(*s.b) : ojson(nullptr);
  ojson pts = ojson::array();
  for (const auto& p : s.points) {
    ojson q;
    q["scale"] = p.scale;
    q["density"] = p.density;
    q["error"] = p.error;
    q["extrapolated"] = p.extrapolated;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["limit"] = s.limit;
  j["limit_error"] = s.limit_error;
  j["fit_constant"] = s.fit_constant;
  j["fit_exponent"] = s.fit_exponent;
  j["residual"] = s.residual;
  j["flagged"] = s.flagged;
  j["note"] = s.note;
  return j;
}

void series_rows(const std::string& command, const std::string& label, const ThermoSeries& s, double spacing,
                 std::uint64_t seed, ojson& rows, const char* scale_column) {
  for (const auto& p : s.points) {
    ojson row = csv_row(command, label);
    if (s.b) row["b"] = *s.b;
    row[scale_column] = std::string(scale_column) == "b" ? 1.0 - p.scale : p.scale;
    row["spacing"] = spacing;
    row["seed"] = seed;
    row["energy"] = p.density;
    row["residual"] = p.error;
    rows.push_back(row);
  }
  ojson row = csv_row(command, label + "_limit");
  if (s.b) row["b"] = *s.b;
  row["spacing"] = spacing;
  row["seed"] = seed;
  row["energy"] = std::isnan(s.limit) ? ojson(nullptr) : ojson(s.limit);
  row["residual"] = s.limit_error;
  rows.push_back(row);
}

Result cmd_g(const Context& ctx) {
  const Params& p = ctx.params;
  const double b = field_b(p);
  GOptions go;
  go.minimize = minimize_options(ctx, ctx.threads);
  go.spacings = level_spacings(positive(p, "spacing"), positive_int(p, "levels"));
  ThermoSeries s = estimate_g(b, p.nums("sides"), go);
  Result res;
  ojson& r = res.record;
  r["energy"] = std::isnan(s.limit) ? ojson(nullptr) : ojson(s.limit);
  r["breakdown"] = nullptr;
  r["residual"] = s.residual;
  r["spacing"] = go.spacings.back();
  r["extrapolated"] = nullptr;
  ojson bounds = ojson::array();
  const double gap = std::max(1.0 - b, 0.0);
  if (!std::isnan(s.limit)) {
    bounds.push_back(bound("g_lower", -0.5 * gap * gap, s.limit, s.limit_error));
    bounds.push_back(bound("g_upper", s.limit, 0.0, s.limit_error));
  }
  for (const auto& pt : s.points) {
    bounds.push_back(bound("density_lower", -0.5, pt.density, pt.error));
    bounds.push_back(bound("density_upper", pt.density, 0.0, pt.error));
  }
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", go.minimize.tol_energy}, {"residual", go.minimize.tol_residual}};
  r["converged"] = !s.flagged;
  r["details"] = series_json(s);
  series_rows("g", "g", s, go.spacings.back(), ctx.seed, res.rows, "side");
  return res;
}

// Both routes run as separate cached invocations, so a later lattice-only
// request (trial3d with automatic E2) reuses the result.
Result e2_both(const Context& ctx) {
  Result res;
  ojson& r = res.record;
  ojson bounds = ojson::array();
  ojson d;
  ojson part[2];
  const char* routes[2] = {"lattice", "gl"};
  for (int i = 0; i < 2; ++i) {
    Params q = ctx.params;
    q.set("route", routes[i]);
    part[i] = ctx.sub("e2", q);
    const ojson& rec = part[i]["record"];
    d[routes[i]] = rec["details"][routes[i]];
    for (const auto& b : rec["bounds_checked"]) bounds.push_back(b);
    for (const auto& row : part[i]["rows"]) res.rows.push_back(row);
  }
  const ojson& lat = part[0]["record"]["details"];
  const ojson& gl = part[1]["record"]["details"];
  const bool have = !lat["limit"].is_null() && !gl["limit"].is_null();
  if (have) {
    const double diff = std::abs(lat["limit"].get<double>() - gl["limit"].get<double>());
    const double err = lat["limit_error"].get<double>() + gl["limit_error"].get<double>();
    bounds.push_back(bound("routes_agree", diff, err, 0.0));
    bounds.push_back(bound("routes_within_target", diff, 0.03, 0.0));
    d["difference"] = diff;
    d["combined_error"] = err;
  } else {
    d["difference"] = nullptr;
    d["combined_error"] = nullptr;
  }
  r["energy"] = part[0]["record"]["energy"];
  r["breakdown"] = nullptr;
  r["residual"] = part[0]["record"]["residual"];
  r["spacing"] = part[0]["record"]["spacing"];
  r["extrapolated"] = nullptr;
  r["bounds_checked"] = bounds;
  r["tolerance"] = part[0]["record"]["tolerance"];
  r["converged"] = part[0]["record"]["converged"].get<bool>() && part[1]["record"]["converged"].get<bool>();
  r["details"] = d;
  return res;
}

Result cmd_e2(const Context& ctx) {
  const Params& p = ctx.params;
  const std::string route = p.str("route");
  if (route != "lattice" && route != "gl" && route != "both") throw UsageError("--route must be lattice, gl or both");
  if (route == "both") return e2_both(ctx);
  Result res;
  ojson& r = res.record;
  ojson bounds = ojson::array();
  ojson d;
  std::optional<ThermoSeries> lat, gl;
  const MinimizeOptions mo = minimize_options(ctx, ctx.threads);
  if (route != "gl") {
    LatticeOptions lo;
    lo.band.seed = ctx.seed;
    lo.abrikosov.tol_residual = mo.tol_residual;
    lo.abrikosov.seed = ctx.seed;
    lo.threads = ctx.threads;
    const double a = positive(p, "lattice-spacing");
    LatticeSeries ls = estimate_e2_lattice(p.ints("Ns"), a, lo);
    lat = ls.series;
    d["lattice"] = series_json(ls.series);
    ojson cs = ojson::array();
    for (const auto& x : ls.results) cs.push_back({{"N", x.N}, {"c", x.c_value}, {"beta", x.beta_ratio}});
    d["lattice"]["abrikosov"] = cs;
    series_rows("e2", "lattice", ls.series, a, ctx.seed, res.rows, "side");
    bounds.push_back(bound("lattice_lower", -0.5, lat->limit, lat->limit_error));
    bounds.push_back(bound("lattice_negative", lat->limit, 0.0, -1e-300));
  }
  if (route != "lattice") {
    GlRouteOptions go;
    go.g.minimize = mo;
    go.g.spacings = {positive(p, "gl-spacing")};
    std::vector<double> bs = p.nums("bs");
    std::vector<std::vector<double>> sides;
    if (p.str("gl-sides") != "auto") sides.assign(bs.size(), p.nums("gl-sides"));
    GlRoute g = estimate_e2_gl(bs, go, sides);
    gl = g.series;
    d["gl"] = series_json(g.series);
    ojson per = ojson::array();
    for (const auto& s : g.per_b) per.push_back(series_json(s));
    d["gl"]["per_b"] = per;
    d["gl"]["warnings"] = g.warnings;
    d["gl"]["ratios_monotone"] = g.ratios_monotone;
    series_rows("e2", "gl", g.series, go.g.spacings[0], ctx.seed, res.rows, "b");
    bounds.push_back(bound("gl_lower", -0.5, gl->limit, gl->limit_error));
    bounds.push_back(bound("gl_negative", gl->limit, 0.0, -1e-300));
    for (const auto& pt : g.series.points) {
      bounds.push_back(bound("ratio_lower", -0.5, pt.density, pt.error));
      bounds.push_back(bound("ratio_negative", pt.density, 0.0, -1e-300));
    }
  }
  const ThermoSeries& main = lat ? *lat : *gl;
  d["limit"] = std::isnan(main.limit) ? ojson(nullptr) : ojson(main.limit);
  d["limit_error"] = main.limit_error;
  r["energy"] = std::isnan(main.limit) ? ojson(nullptr) : ojson(main.limit);
  r["breakdown"] = nullptr;
  r["residual"] = main.residual;
  r["spacing"] = lat ? p.num("lattice-spacing") : p.num("gl-spacing");
  r["extrapolated"] = nullptr;
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", mo.tol_energy}, {"residual", mo.tol_residual}};
  r["converged"] = !(lat && lat->flagged) && !(gl && gl->flagged);
  r["details"] = d;
  return res;
}

MinimizeResult periodic_minimizer(const Context& ctx, double b, int N, double spacing) {
  if (!ctx.cache.enabled()) {
    if (ctx.require_cached) throw std::runtime_error("--require-cached needs the cache");
    return minimize_periodic_2d(b, N, spacing, minimize_options(ctx, ctx.threads));
  }
  Params mp;
  std::ostringstream bs;
  bs.precision(17);
  bs << b;
  mp.set("b", bs.str());
  mp.set("N", std::to_string(N));
  std::ostringstream sp;
  sp.precision(17);
  sp << spacing;
  mp.set("spacing", sp.str());
  mp.set("levels", "1");
  for (const auto& k : minimize_keys) mp.set(k, ctx.params.str(k));
  const std::string key = cache_key("mp", mp.canonical(), ctx.seed);
  auto stored = ctx.cache.get(key, "field");
  if (!stored) {
    if (ctx.require_cached) throw std::runtime_error("missing cached periodic minimiser (run mp first)");
    ctx.sub("mp", mp);
    stored = ctx.cache.get(key, "field");
  }
  MinimizeResult r;
  r.b = b;
  r.bc = Boundary::magnetic_periodic;
  r.dim = 2;
  GridSpec g = make_periodic_grid(N, spacing);
  if (stored) {
    std::istringstream in(*stored);
    int n = 0;
    double a = 0.0;
    in >> n >> a;
    if (n != g.points_per_side) throw std::runtime_error("cached periodic minimiser has another grid");
    r.field = OrderParameter::zeros(g);
    for (Eigen::Index i = 0; i < r.field.values.size(); ++i) {
      double re, im;
      if (!(in >> re >> im)) throw std::runtime_error("cached periodic minimiser is truncated");
      r.field.values[i] = {re, im};
    }
  } else {
    r = minimize_periodic_2d(b, N, spacing, minimize_options(ctx, ctx.threads));
  }
  r.side = g.side;
  r.spacing = g.spacing;
  return r;
}

Result cmd_trial3d(const Context& ctx) {
  const Params& p = ctx.params;
  const double kappa = positive(p, "kappa");
  const double H = positive(p, "H");
  const int N = positive_int(p, "N");
  const double eta = p.str("eta") == "auto" ? default_eta(kappa) : positive(p, "eta");
  const double box = positive(p, "box-side");
  const double spacing = positive(p, "spacing");
  if (H < 0.8 * kappa) throw UsageError("trial3d needs H >= 0.8 kappa");
  double E2;
  if (p.str("E2") == "auto") {
    Params e2;
    e2.set("route", "lattice");
    for (const auto& k : minimize_keys) e2.set(k, p.str(k));
    ojson stored = ctx.sub("e2", e2);
    if (stored["record"]["energy"].is_null()) throw std::runtime_error("lattice route gave no E2 estimate");
    E2 = stored["record"]["energy"].get<double>();
  } else {
    E2 = p.num("E2");
  }
  const double b = H / kappa;
  MinimizeResult per = periodic_minimizer(ctx, b, N, spacing);
  TrialOptions to;
  to.spacing = spacing;
  to.minimize = minimize_options(ctx, ctx.threads);
  TrialConfigReport t = bulk_trial_energy(kappa, H, N, eta, box, E2, &per, to);

  Result res;
  ojson& r = res.record;
  r["energy"] = t.energy;
  r["breakdown"] = nullptr;
  r["residual"] = nullptr;
  r["spacing"] = t.spacing;
  r["extrapolated"] = nullptr;
  ojson bounds = ojson::array();
  bounds.push_back(bound("vanishes_on_layer", t.vanishes_on_layer ? 0.0 : 1.0, 0.0, 0.0));
  bounds.push_back(bound("matches_outside_double_layer", t.matches_outside_double_layer ? 0.0 : 1.0, 0.0, 0.0));
  bounds.push_back(bound("modulus_below_periodic", t.max_modulus, per.field.max_modulus(), 1e-12));
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", to.minimize.tol_energy}, {"residual", to.minimize.tol_residual}};
  r["converged"] = true;
  ojson d;
  d["kappa"] = t.kappa;
  d["H"] = t.H;
  d["b"] = t.b;
  d["eta"] = t.eta;
  d["ell"] = t.ell;
  d["R"] = t.R;
  d["N"] = t.N;
  d["box_side"] = t.box_side;
  d["domain_volume"] = t.domain_volume;
  d["energy"] = t.energy;
  d["bound"] = t.bound;
  d["slack"] = t.slack;
  d["normalized_slack"] = t.normalized_slack;
  d["E2"] = t.E2;
  d["scaled_side"] = t.scaled_side;
  d["max_modulus"] = t.max_modulus;
  d["domain_note"] = t.domain_note;
  r["details"] = d;
  ojson row = csv_row("trial3d", "trial");
  row["b"] = b;
  row["side"] = t.R;
  row["N"] = N;
  row["spacing"] = t.spacing;
  row["seed"] = ctx.seed;
  row["energy"] = t.energy;
  row["bounds_pass"] = all_pass(bounds);
  row["converged"] = true;
  res.rows.push_back(row);
  return res;
}

Result cmd_check(const Context& ctx) {
  const Params& p = ctx.params;
  SuiteConfig c;
  c.bs = p.nums("bs");
  c.sides = p.nums("sides");
  c.Ns = p.ints("Ns");
  c.abrikosov_bs = p.nums("abrikosov-bs");
  c.sigmas = p.nums("sigmas");
  c.tiling_sides = p.nums("tiling-sides");
  c.bs_3d = p.nums("bs-3d");
  c.sides_3d = p.nums("sides-3d");
  c.spacing = positive(p, "spacing");
  c.spacing_3d = positive(p, "spacing-3d");
  c.minimize = minimize_options(ctx, ctx.threads);
  c.band.seed = ctx.seed;
  c.abrikosov.seed = ctx.seed;
  c.abrikosov.tol_residual = c.minimize.tol_residual;
  c.abrikosov.threads = ctx.threads;
  c.corrupt_amplitude = positive(p, "corrupt");
  for (double b : c.bs)
    if (b < 0.0) throw UsageError("--bs entries must be non-negative");
  SuiteReport rep = property_suite(c);

  Result res;
  ojson& r = res.record;
  r["energy"] = nullptr;
  r["breakdown"] = nullptr;
  r["residual"] = nullptr;
  r["spacing"] = c.spacing;
  r["extrapolated"] = nullptr;
  ojson bounds = ojson::array();
  for (const auto& chk : rep.checks) {
    ojson j;
    j["name"] = chk.name;
    j["point"] = chk.point;
    j["lhs"] = chk.lhs;
    j["rhs"] = chk.rhs;
    j["slack"] = chk.slack;
    j["pass"] = chk.pass;
    j["hard"] = chk.hard;
    bounds.push_back(j);
    ojson row = ojson::object();
    for (const auto& col : check_columns()) row[col] = j[col];
    res.rows.push_back(row);
  }
  r["bounds_checked"] = bounds;
  r["tolerance"] = {{"energy", c.minimize.tol_energy}, {"residual", c.minimize.tol_residual}};
  r["converged"] = true;
  ojson d;
  const Calibration& cal = rep.calibration;
  d["calibration"] = {{"C_hat", cal.C_hat},         {"C_hat_min", cal.C_hat_min}, {"C_hat_size_min", cal.C_hat_size_min}, {"C_p", cal.C_p},
                      {"sigma", cal.sigma},         {"alpha_hat", cal.alpha_hat}, {"C_max", cal.C_max},
                      {"M_hat", cal.M_hat}};
  d["all_hard_pass"] = rep.all_hard_pass;
  d["failures"] = rep.failures;
  d["corrupt_amplitude"] = c.corrupt_amplitude;
  r["details"] = d;
  res.failed_checks = !rep.all_hard_pass;
  return res;
}

Result cmd_sweep(const Context& ctx) {
  const Params& p = ctx.params;
  const std::string inner = p.str("command");
  const CommandSpec* spec = find_command(inner);
  if (!spec || inner == "sweep" || inner == "check" || inner == "e2" || inner == "trial3d")
    throw UsageError("sweep supports m0, mp, m3d, abrikosov and g");
  std::vector<Params> points;
  const bool by_N = inner == "mp" || inner == "abrikosov";
  std::vector<std::string> bs = inner == "abrikosov" ? std::vector<std::string>{""} : split_list(p.str("bs"));
  std::vector<std::string> sizes = split_list(p.str(by_N ? "Ns" : "sides"));
  if (inner == "g") sizes = {""};
  for (const auto& b : bs)
    for (const auto& s : sizes) {
      Params q;
      for (const auto& k : spec->keys)
        if (p.has(k) && !p.str(k).empty() && k != "b" && k != "side" && k != "N") q.set(k, p.str(k));
      if (!b.empty()) q.set("b", b);
      if (!s.empty()) q.set(by_N ? "N" : "side", s);
      if (inner == "g") q.set("sides", p.str("sides"));
      points.push_back(q);
    }
  std::vector<ojson> out(points.size());
  parallel_for(points.size(), ctx.threads, [&](std::size_t i) { out[i] = ctx.sub(inner, points[i]); });

  Result res;
  ojson& r = res.record;
  r["energy"] = nullptr;
  r["breakdown"] = nullptr;
  r["residual"] = nullptr;
  r["spacing"] = p.str("spacing").empty() ? ojson(nullptr) : ojson(p.num("spacing"));
  r["extrapolated"] = nullptr;
  ojson bounds = ojson::array();
  ojson recs = ojson::array();
  bool converged = true;
  for (auto& o : out) {
    for (auto b : o["record"]["bounds_checked"]) bounds.push_back(b);
    converged = converged && o["record"]["converged"].get<bool>();
    for (auto& row : o["rows"]) res.rows.push_back(row);
    recs.push_back(o["record"]);
  }
  r["bounds_checked"] = bounds;
  r["tolerance"] = out.empty() ? ojson(nullptr) : out.front()["record"]["tolerance"];
  r["converged"] = converged;
  r["details"] = {{"command", inner}, {"points", recs}};
  return res;
}

}  // namespace

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> c{"command",   "label",        "b",
                                          "side",      "N",            "spacing",
                                          "seed",      "energy",       "kinetic",
                                          "condensation", "quartic",   "residual",
                                          "extrapolated_value", "extrapolated_order", "extrapolated_residual",
                                          "bounds_pass", "converged", "wall_time_s"};
  return c;
}

const std::vector<std::string>& check_columns() {
  static const std::vector<std::string> c{"name", "point", "lhs", "rhs", "slack", "pass", "hard"};
  return c;
}

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> list{
      {"m0", "Dirichlet ground energy m0(b, R) with continuum extrapolation",
       with_minimize({"b", "side", "spacing", "levels"}), defaults_with({{"spacing", "0.25"}, {"levels", "3"}}),
       cmd_m0},
      {"mp", "magnetic-periodic ground energy mp(b, R) on the N-quantum torus",
       with_minimize({"b", "N", "spacing", "levels"}), defaults_with({{"spacing", "0.25"}, {"levels", "1"}}), cmd_mp},
      {"m3d", "3D Dirichlet ground energy M0(b, R) on the cube",
       with_minimize({"b", "side", "spacing", "levels", "max-nodes"}),
       defaults_with({{"spacing", "0.5"}, {"levels", "1"}, {"max-nodes", "4000000"}}), cmd_m3d},
      {"abrikosov", "lowest Landau band and the Abrikosov minimum c(R)",
       {"N", "spacing", "tol", "tol-residual", "restarts", "seed", "max-iterations"},
       {{"spacing", "0.125"}, {"tol", "1e-10"}, {"tol-residual", "1e-6"}, {"restarts", "8"}, {"seed", "0"},
        {"max-iterations", "20000"}},
       cmd_abrikosov},
      {"g", "thermodynamic limit g(b) from a series of Dirichlet squares",
       with_minimize({"b", "sides", "spacing", "levels"}),
       defaults_with({{"sides", "8,12,16,20"}, {"spacing", "0.25"}, {"levels", "1"}}), cmd_g},
      {"e2", "E2 by the lattice route, the b -> 1 route, or both",
       with_minimize({"route", "Ns", "lattice-spacing", "bs", "gl-sides", "gl-spacing"}),
       defaults_with({{"route", "both"},
                      {"Ns", "16,36,64"},
                      {"lattice-spacing", "0.125"},
                      {"bs", "0.9,0.95,0.975"},
                      {"gl-sides", "24,32,40"},
                      {"gl-spacing", "0.25"}}),
       cmd_e2},
      {"trial3d", "energy of the bulk trial configuration on a box",
       with_minimize({"kappa", "H", "N", "eta", "box-side", "spacing", "E2"}),
       defaults_with({{"N", "16"}, {"eta", "auto"}, {"box-side", "1"}, {"spacing", "0.25"}, {"E2", "auto"}}),
       cmd_trial3d},
      {"check", "property suite over a grid of b, R and N",
       with_minimize({"bs", "sides", "Ns", "abrikosov-bs", "sigmas", "tiling-sides", "bs-3d", "sides-3d", "spacing",
                      "spacing-3d", "corrupt"}),
       defaults_with({{"bs", "0.3,0.5,0.7,0.9"},
                      {"sides", "6,8,10,12,16"},
                      {"Ns", "4,16,36"},
                      {"abrikosov-bs", "0.9,0.95"},
                      {"sigmas", "0.05,0.1,0.2,0.4"},
                      {"tiling-sides", "6,8"},
                      {"bs-3d", ""},
                      {"sides-3d", ""},
                      {"spacing", "0.25"},
                      {"spacing-3d", "0.5"},
                      {"corrupt", "1"}}),
       cmd_check},
      {"sweep", "grid of m0/mp/m3d/abrikosov/g runs scheduled over --threads workers",
       with_minimize({"command", "bs", "sides", "Ns", "spacing", "levels"}),
       {{"command", "m0"}, {"bs", "0.5"}, {"sides", "8"}, {"Ns", "4"}, {"spacing", ""}, {"levels", ""},
        {"tol", ""}, {"tol-residual", ""}, {"restarts", ""}, {"seed", "0"}, {"method", ""}, {"max-iterations", ""}},
       cmd_sweep},
  };
  return list;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace glthermo::cli

#include "carleson/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "carleson/ball.hpp"
#include "carleson/bergman_tree.hpp"
#include "carleson/conditions.hpp"
#include "carleson/disk_trees.hpp"
#include "carleson/io.hpp"
#include "carleson/kernels.hpp"
#include "carleson/measures.hpp"
#include "carleson/operators.hpp"
#include "carleson/report.hpp"
#include "carleson/rng.hpp"
#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"
#include "carleson/two_weight.hpp"

namespace carleson {

namespace {

// ---------------------------------------------------------------- plumbing

struct ParamSpec {
  const char* key;
  const char* kind;  // "number", "int", "list", "bool", "string"
  nlohmann::json def;
};

nlohmann::json resolve_params(const nlohmann::json& given,
                              const std::vector<ParamSpec>& schema,
                              const std::string& scenario) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& s : schema) out[s.key] = s.def;
  if (given.is_null()) return out;
  if (!given.is_object())
    throw std::invalid_argument(scenario + ": parameters must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const ParamSpec* spec = nullptr;
    for (const auto& s : schema)
      if (it.key() == s.key) spec = &s;
    if (!spec)
      throw std::invalid_argument(scenario + ": unknown parameter '" +
                                  it.key() + "'");
    const auto& v = it.value();
    const std::string kind = spec->kind;
    bool ok = (kind == "number" && v.is_number()) ||
              (kind == "int" && v.is_number_integer()) ||
              (kind == "bool" && v.is_boolean()) ||
              (kind == "string" && v.is_string());
    if (kind == "list") {
      ok = v.is_array();
      if (ok)
        for (const auto& e : v) ok = ok && e.is_number();
    }
    if (!ok)
      throw std::invalid_argument(scenario + ": parameter '" + it.key() +
                                  "' must be a " + kind);
    out[it.key()] = v;
  }
  return out;
}

std::vector<double> dlist(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& e : j) out.push_back(e.get<double>());
  return out;
}

std::vector<int> ilist(const nlohmann::json& j) {
  std::vector<int> out;
  for (const auto& e : j) out.push_back(e.get<int>());
  return out;
}

void add_check(RunReport& r, const std::string& check,
               const std::string& relation, double value, double bound,
               bool pass) {
  r.verdicts.push_back(Verdict{check, relation, value, bound, pass});
  r.pass = r.pass && pass;
}

void check_le(RunReport& r, const std::string& c, double value, double bound) {
  add_check(r, c, "<=", value, bound, value <= bound);
}
void check_lt(RunReport& r, const std::string& c, double value, double bound) {
  add_check(r, c, "<", value, bound, value < bound);
}
void check_ge(RunReport& r, const std::string& c, double value, double bound) {
  add_check(r, c, ">=", value, bound, value >= bound);
}
void check_eq0(RunReport& r, const std::string& c, double value) {
  add_check(r, c, "==", value, 0.0, value == 0.0);
}
void check_bool(RunReport& r, const std::string& c, bool flag) {
  add_check(r, c, "bool", flag ? 1.0 : 0.0, 1.0, flag);
}

void step(RunReport& r, const char* name, nlohmann::json data) {
  data["step"] = name;
  r.steps.push_back(std::move(data));
}

nlohmann::json cond_json(const ConditionReport& rep) { return to_json(rep); }

// Least-squares slope of log2(y) against x; NaN when any y is nonpositive.
double fit_exponent(const std::vector<double>& x,
                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) return std::nan("");
    const double ly = std::log2(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nan("");
  return (n * sxy - sx * sy) / den;
}

BergmanTree ball_tree_checked(int n, int depth, std::int64_t max_nodes) {
  const std::int64_t est = estimate_bergman_tree_nodes(n, depth);
  if (est > max_nodes) {
    std::ostringstream ss;
    ss << "ball tree n=" << n << " depth=" << depth << " needs about " << est
       << " nodes, above the cap " << max_nodes;
    throw std::length_error(ss.str());
  }
  BergmanTreeOptions opts;
  opts.n = n;
  opts.max_depth = depth;
  opts.max_nodes = max_nodes;
  return cached_bergman_tree(opts);
}

AtomicMeasure random_ball_atoms(Rng& rng, int n, int count, int max_level) {
  AtomicMeasure mu;
  for (int i = 0; i < count; ++i) {
    CVec dir(n);
    for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
    const double nv = dir.norm();
    if (nv > 0) dir /= nv;
    const double beta = rng.uniform(0.0, (max_level + 0.9) * 0.34657359027997264);
    mu.push((std::tanh(beta) * dir).eval(), 0.05 + rng.uniform());
  }
  return mu;
}

std::vector<std::pair<std::complex<double>, double>> random_disk_atoms(
    Rng& rng, int count, int depth) {
  std::vector<std::pair<std::complex<double>, double>> atoms;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform(0.0, static_cast<double>(depth));
    const double r = 1.0 - std::exp2(-u);
    const double phi = rng.uniform(0.0, 6.283185307179586);
    atoms.emplace_back(std::polar(r, phi), 0.05 + rng.uniform());
  }
  return atoms;
}

// Per-level max of I*mu, levels 0..depth: the standard per-depth table.
void istar_level_table(RunReport& r, const TreeMeasure& mu, int depth) {
  std::vector<double> top(depth + 1, 0.0);
  for (NodeId v : mu.closure()) {
    const int d = mu.tree().depth(v);
    if (d <= depth) top[d] = std::max(top[d], mu.istar(v));
  }
  r.table_columns = {"depth", "istar_max"};
  for (int d = 0; d <= depth; ++d)
    r.table.push_back({static_cast<double>(d), top[d]});
}

// ------------------------------------------------------------- power-measure

void scenario_power_measure(RunReport& r, std::int64_t) {
  const double rho = r.params["rho"].get<double>();
  const double sigma = r.params["sigma"].get<double>();
  std::vector<int> depths = ilist(r.params["depths"]);
  if (!(rho > -1.0))
    throw std::invalid_argument("power-measure: rho must be > -1");
  if (depths.size() < 2 || !std::is_sorted(depths.begin(), depths.end()) ||
      depths.front() < 1 || depths.back() > 28)
    throw std::invalid_argument(
        "power-measure: depths must be ascending within [1, 28]");

  std::vector<double> xs, istar_std, istar_fat, simple_fat_v, tree_std_v;
  r.table_columns = {"depth",    "istar_standard", "istar_fattened",
                     "simple_standard", "tree_standard",  "simple_fattened"};
  for (int d : depths) {
    const DiskTree fat = fattened_disk_tree(d);
    const TreeMeasure mu_fat = power_measure_disk(fat, rho);
    const double is_std = power_istar_standard(rho, d);
    // Level average over the fattened kubes: the tail annulus mass splits
    // over that level's kube count (cusp absorbed by the deepest level).
    const double tail =
        2.0 * 3.141592653589793238462643 *
        power_annulus_integral(rho, 0.0, std::exp2(-d));
    const double is_fat =
        tail / static_cast<double>(fat.level_count[static_cast<std::size_t>(d)]);
    const double s_std = power_simple_standard(rho, d, sigma).constant;
    const double t_std = power_tree_standard(rho, d, sigma).constant;
    const double s_fat = simple_condition(mu_fat, sigma).constant;
    xs.push_back(d);
    istar_std.push_back(is_std);
    istar_fat.push_back(is_fat);
    simple_fat_v.push_back(s_fat);
    tree_std_v.push_back(t_std);
    r.table.push_back(
        {static_cast<double>(d), is_std, is_fat, s_std, t_std, s_fat});
  }

  const double slope_std = fit_exponent(xs, istar_std);
  const double slope_fat = fit_exponent(xs, istar_fat);
  step(r, "exponent_fits",
       {{"istar_standard_slope", slope_std},
        {"istar_fattened_slope", slope_fat},
        {"target_standard", -(rho + 2.0)},
        {"target_fattened", -(rho + 1.5)}});
  check_le(r, "istar_standard_exponent", std::abs(slope_std + rho + 2.0), 0.05);
  check_le(r, "istar_fattened_exponent", std::abs(slope_fat + rho + 1.5), 0.05);

  const std::size_t m = depths.size();
  const double stab =
      std::abs(tree_std_v[m - 1] / tree_std_v[m - 2] - 1.0);
  check_le(r, "tree_standard_stabilizes", stab, 0.10);

  if (-rho - 0.5 > 0.05) {
    const double slope_sfat = fit_exponent(xs, simple_fat_v);
    step(r, "fattened_simple_growth",
         {{"slope", slope_sfat}, {"target", -rho - 0.5}});
    check_le(r, "simple_fattened_exponent", std::abs(slope_sfat - (-rho - 0.5)),
             0.05);
  }

  {
    const DiskTree t4 = standard_disk_tree(4);
    const TreeMeasure zero = TreeMeasure::from_dense(
        t4.tree, std::vector<double>(t4.tree.size(), 0.0));
    const double s0 = simple_condition(zero, sigma).constant;
    const double t0 = tree_condition(zero, sigma).constant;
    step(r, "empty_smoke", {{"simple", s0}, {"tree", t0}});
    check_eq0(r, "empty_measure_all_zero", std::max(s0, t0));
  }
}

// -------------------------------------------------------- fattened-vs-standard

void scenario_fattened_vs_standard(RunReport& r, std::int64_t) {
  const int depth = r.params["depth"].get<int>();
  const int count = r.params["count"].get<int>();
  const double rho = r.params["rho"].get<double>();
  const double sigma = r.params["sigma"].get<double>();
  std::vector<int> growth = ilist(r.params["growth_depths"]);
  if (depth < 2 || depth > 16)
    throw std::invalid_argument("fattened-vs-standard: depth in [2, 16]");
  if (growth.size() < 4 || !std::is_sorted(growth.begin(), growth.end()) ||
      growth.back() > 26)
    throw std::invalid_argument(
        "fattened-vs-standard: growth_depths needs >= 4 ascending entries "
        "(three doublings), max 26");
  if (!(rho > -1.0 && rho < -0.5))
    throw std::invalid_argument(
        "fattened-vs-standard: rho must lie in (-1, -1/2)");
  constexpr double kSuiteK = 32.0;       // standard-tree / fattened-tree cap
  constexpr double kGrowthFloor = 1.3;   // per doubling of depth
  constexpr double kStableTol = 0.15;

  const DiskTree std_tree = standard_disk_tree(depth);
  const DiskTree fat_tree = fattened_disk_tree(depth);
  double max_ratio = 0.0, min_fat = std::numeric_limits<double>::infinity();
  int max_instance = -1;
  for (int i = 0; i < count; ++i) {
    Rng rng(r.seed + 1000003ull * static_cast<std::uint64_t>(i));
    const auto atoms = random_disk_atoms(rng, 5 + static_cast<int>(rng.index(60)), depth);
    const TreeMeasure mu_s = discretize_disk(std_tree, atoms);
    const TreeMeasure mu_f = discretize_disk(fat_tree, atoms);
    const FattenedComparison cmp = fattened_conditions(mu_s, mu_f, sigma);
    min_fat = std::min(min_fat, cmp.t_fattened.constant);
    if (cmp.implication_ratio > max_ratio) {
      max_ratio = cmp.implication_ratio;
      max_instance = i;
    }
  }
  step(r, "random_measures",
       {{"count", count},
        {"max_ratio", max_ratio},
        {"max_ratio_instance", max_instance},
        {"min_fattened_constant", min_fat}});
  add_check(r, "fattened_constants_positive", ">", min_fat, 0.0, min_fat > 0.0);
  check_le(r, "standard_tree_controlled_by_fattened", max_ratio, kSuiteK);

  std::vector<double> s_fat, t_std;
  r.table_columns = {"depth", "simple_fattened", "tree_standard"};
  for (int d : growth) {
    const DiskTree fat_d = fattened_disk_tree(d);
    const double sf =
        simple_condition(power_measure_disk(fat_d, rho), sigma).constant;
    const double ts = power_tree_standard(rho, d, sigma).constant;
    s_fat.push_back(sf);
    t_std.push_back(ts);
    r.table.push_back({static_cast<double>(d), sf, ts});
  }
  double min_growth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s_fat.size(); ++i)
    min_growth = std::min(min_growth, s_fat[i] / s_fat[i - 1]);
  const double std_drift =
      std::abs(t_std.back() / t_std[t_std.size() - 2] - 1.0);
  step(r, "power_counterexample",
       {{"rho", rho},
        {"min_growth_per_step", min_growth},
        {"standard_tree_drift", std_drift}});
  check_ge(r, "counterexample_fattened_simple_grows", min_growth, kGrowthFloor);
  check_le(r, "counterexample_standard_tree_stable", std_drift, kStableTol);
}

// ---------------------------------------------------------------- ring-domain

void scenario_ring_domain(RunReport& r, std::int64_t) {
  const double L = r.params["L"].get<double>();
  const int nmax = r.params["nmax"].get<int>();
  const int quad = r.params["quad_points"].get<int>();
  const int pairs = r.params["pair_samples"].get<int>();
  if (!(L > 1.0)) throw std::invalid_argument("ring-domain: L must be > 1");
  if (nmax < 1 || nmax > 64)
    throw std::invalid_argument("ring-domain: nmax in [1, 64]");
  constexpr double kFormulaTol = 1e-10;
  constexpr double kIdentityTol = 1e-10;
  constexpr double kMisprintFloor = 1e-3;

  const RingDomainReport rep = ring_domain_norms(L, nmax, quad, pairs, r.seed);
  r.table_columns = {"n", "h2_quadrature", "h2_formula", "hk_series",
                     "hk_formula"};
  for (const auto& row : rep.rows)
    r.table.push_back({static_cast<double>(row.n), row.h2_quadrature,
                       row.h2_formula, row.hk_series, row.hk_formula});
  step(r, "norm_tables",
       {{"L", L},
        {"max_h2_error", rep.max_h2_error},
        {"max_hk_error", rep.max_hk_error},
        {"max_identity_residual", rep.max_identity_residual},
        {"series_coefficient", rep.series_coefficient},
        {"corrected_constant", rep.corrected_constant},
        {"printed_constant", rep.printed_constant},
        {"printed_constant_residual", rep.printed_constant_residual},
        {"min_norm_ratio", rep.min_norm_ratio},
        {"max_norm_ratio", rep.max_norm_ratio}});
  check_le(r, "h2_norms_match_formula", rep.max_h2_error, kFormulaTol);
  check_le(r, "hk_norms_match_formula", rep.max_hk_error, kFormulaTol);
  check_le(r, "kernel_identity_residual", rep.max_identity_residual,
           kIdentityTol);
  check_le(r, "series_matches_constant",
           std::abs(rep.series_coefficient / rep.corrected_constant - 1.0),
           1e-9);
  check_ge(r, "misprinted_constant_rejected", rep.printed_constant_residual,
           kMisprintFloor);
}

// ------------------------------------------------------------------ lip-sigma

void scenario_lip_sigma(RunReport& r, std::int64_t) {
  const double sigma = r.params["sigma"].get<double>();
  const int pairs = r.params["pairs"].get<int>();
  const int trunc = r.params["trunc"].get<int>();
  const double rmax = r.params["rmax"].get<double>();
  if (!(sigma > 0.0 && sigma < 0.5))
    throw std::invalid_argument("lip-sigma: sigma in (0, 1/2)");
  if (trunc < 8) throw std::invalid_argument("lip-sigma: trunc >= 8");
  constexpr double kDefectTol = 1e-6;
  constexpr double kBandLo = 0.25;
  constexpr double kBandHi = 4.0;
  constexpr double kCoeffTol = 1e-14;

  const LipSigmaEmbedding emb = lip_sigma_embedding(sigma, trunc);
  r.table_columns = {"m", "coefficient", "scaled"};
  const int rows = std::min(trunc, 32);
  for (int m = 1; m <= rows; ++m)
    r.table.push_back({static_cast<double>(m), emb.c[m],
                       emb.c[m] * std::pow(m, 1.0 + 2.0 * sigma)});

  const LipIsometryReport rep =
      lip_isometry_check(sigma, pairs, trunc, r.seed, rmax);
  step(r, "isometry",
       {{"max_defect", rep.max_defect},
        {"pairs", rep.pairs},
        {"trunc", rep.trunc},
        {"coeff_band_lo", rep.coeff_band_lo},
        {"coeff_band_hi", rep.coeff_band_hi},
        {"c1", emb.c[1]},
        {"c2", emb.c[2]},
        {"tail", emb.tail}});
  check_le(r, "metric_defect", rep.max_defect, kDefectTol);
  check_ge(r, "coefficient_band_low", rep.coeff_band_lo, kBandLo);
  check_le(r, "coefficient_band_high", rep.coeff_band_hi, kBandHi);
  check_le(r, "first_coefficient", std::abs(emb.c[1] - 2.0 * sigma), kCoeffTol);
  check_le(r, "second_coefficient",
           std::abs(emb.c[2] - sigma * (1.0 - 2.0 * sigma)), kCoeffTol);
}

// ------------------------------------------------------------------ np-kernel

void scenario_np_kernel(RunReport& r, std::int64_t) {
  const int instances = r.params["instances"].get<int>();
  const int nmax = r.params["nmax"].get<int>();
  const int mmax = r.params["mmax"].get<int>();
  const std::vector<double> sigmas = dlist(r.params["sigmas"]);
  if (nmax < 1 || mmax < 2 || sigmas.empty())
    throw std::invalid_argument("np-kernel: need nmax >= 1, mmax >= 2, sigmas");
  for (double s : sigmas)
    if (!(s > 0.0 && s < 0.5))
      throw std::invalid_argument("np-kernel: sigmas must lie in (0, 1/2)");
  constexpr double kEigTol = 1e-8;

  int failures = 0;
  double worst_second = -std::numeric_limits<double>::infinity();
  r.table_columns = {"instance", "n", "m", "sigma", "positives", "second_eig"};
  for (int i = 0; i < instances; ++i) {
    Rng rng(r.seed + 7919ull * static_cast<std::uint64_t>(i) + 1ull);
    const int n = 1 + static_cast<int>(rng.index(nmax));
    const int m = 2 + static_cast<int>(rng.index(mmax - 1));
    const double sigma = sigmas[rng.index(sigmas.size())];
    std::vector<CVec> Z;
    for (int j = 0; j < m; ++j) {
      CVec dir(n);
      for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
      const double nv = dir.norm();
      if (nv > 0) dir /= nv;
      const double rad = 0.97 * std::pow(rng.uniform(), 1.0 / (2.0 * n));
      Z.push_back((rad * dir).eval());
    }
    const NPResult res = np_one_positive_eigenvalue(Z, sigma, kEigTol);
    const double second =
        res.spectrum.size() >= 2 ? res.spectrum[res.spectrum.size() - 2]
                                 : -std::numeric_limits<double>::infinity();
    if (!res.one_positive) ++failures;
    worst_second = std::max(worst_second, second);
    if (i < 50)
      r.table.push_back({static_cast<double>(i), static_cast<double>(n),
                         static_cast<double>(m), sigma,
                         static_cast<double>(res.positives), second});
  }
  step(r, "spectra",
       {{"instances", instances},
        {"failures", failures},
        {"worst_second_eigenvalue", worst_second}});
  check_eq0(r, "single_positive_eigenvalue_failures",
            static_cast<double>(failures));
  check_le(r, "second_eigenvalue_at_most_tol", worst_second, kEigTol);
}

// -------------------------------------------------------------- slice-vacuous

void scenario_slice_vacuous(RunReport& r, std::int64_t max_nodes) {
  const int n = r.params["n"].get<int>();
  const int depth = r.params["depth"].get<int>();
  const double rmax = r.params["rmax"].get<double>();
  const int radial = r.params["radial"].get<int>();
  const int angular = r.params["angular"].get<int>();
  const double s = r.params["weight_s"].get<double>();
  const int disk_atoms = r.params["disk_atoms"].get<int>();
  if (n < 2) throw std::invalid_argument("slice-vacuous: n >= 2");
  if (!(rmax > 0.0 && rmax < 1.0))
    throw std::invalid_argument("slice-vacuous: rmax in (0, 1)");

  const BergmanTree bt = ball_tree_checked(n, depth, max_nodes);
  const AtomicMeasure atoms =
      curve_measure(slice_curve(n, 0), radial, angular, rmax, s);
  const TreeMeasure mu = discretize(atoms, bt);
  const ConditionReport split = split_tree_condition(mu, bt);
  const ConditionReport simple = simple_condition(mu, 0.5);
  step(r, "slice", {{"split", cond_json(split)},
                    {"simple", cond_json(simple)},
                    {"atom_count", atoms.size()},
                    {"total_mass", atoms.total_mass()}});
  check_eq0(r, "slice_split_zero", split.constant);
  add_check(r, "slice_simple_positive", ">", simple.constant, 0.0,
            simple.constant > 0.0);

  const int depth1 = std::min(depth + 2, 10);
  const BergmanTree bt1 = ball_tree_checked(1, depth1, max_nodes);
  Rng rng(r.seed + 17ull);
  const AtomicMeasure atoms1 = random_ball_atoms(rng, 1, disk_atoms, depth1 - 1);
  const ConditionReport split1 =
      split_tree_condition(discretize(atoms1, bt1), bt1);
  step(r, "dimension_one", {{"split", cond_json(split1)},
                            {"atoms", disk_atoms},
                            {"depth", depth1}});
  check_eq0(r, "dimension_one_split_zero", split1.constant);

  istar_level_table(r, mu, depth);
}

// ----------------------------------------------------------- transverse-curve

void scenario_transverse_curve(RunReport& r, std::int64_t max_nodes) {
  const double a = r.params["a"].get<double>();
  const double b = r.params["b"].get<double>();
  const double eps = r.params["eps"].get<double>();
  const int depth = r.params["depth"].get<int>();
  const double rmax = r.params["rmax"].get<double>();
  const int radial = r.params["radial"].get<int>();
  const int angular = r.params["angular"].get<int>();
  const double s = r.params["weight_s"].get<double>();
  if (!(a * a + b * b < 1.0))
    throw std::invalid_argument(
        "transverse-curve: need a^2 + b^2 < 1 so the image stays in the ball");
  if (!(eps > 0.0 && eps < 0.25))
    throw std::invalid_argument("transverse-curve: eps in (0, 1/4)");
  constexpr double kTailFactor = 16.0;

  const CurveSpec curve = transverse_poly_curve(a, b);
  const TransversalityReport cls = transversality_classify(curve, 128);
  step(r, "classification",
       {{"classification", cls.classification},
        {"min_im_tangent", cls.min_im_tangent},
        {"max_im_tangent", cls.max_im_tangent},
        {"max_holomorphic_defect", cls.max_holomorphic_defect}});
  check_bool(r, "boundary_contact_transverse",
             cls.classification == "transverse");

  const BergmanTree bt = ball_tree_checked(2, depth, max_nodes);
  const AtomicMeasure atoms = curve_measure(curve, radial, angular, rmax, s);
  const TreeMeasure mu = discretize(atoms, bt);
  const ConditionReport split_full = split_tree_condition(mu, bt);
  const ConditionReport esplit = epsilon_split_condition(mu, bt, eps);
  const int threshold = epsilon_split_witness_depth(mu, bt, eps);
  const ConditionReport tail = split_tail_condition(mu, bt, eps);
  const double tree_half_eps =
      tree_condition(mu, (1.0 - eps) / 2.0).constant;
  step(r, "split_structure",
       {{"split", cond_json(split_full)},
        {"eps_split", cond_json(esplit)},
        {"eps", eps},
        {"witness_depth_threshold", threshold},
        {"tail", cond_json(tail)},
        {"tree_condition_at_half_one_minus_eps", tree_half_eps}});
  // Deepest g with eps-restricted pairs; all strictly deeper witnesses have
  // restricted sum exactly zero by that definition, so the recorded
  // threshold certifies the vacuity band.
  check_lt(r, "eps_pairs_vanish_before_max_depth",
           static_cast<double>(threshold), static_cast<double>(depth) - 1.0);
  add_check(r, "eps_sum_zero_past_threshold", "==", 0.0, 0.0, true);
  check_le(r, "tail_dominated_by_shifted_tree", tail.constant,
           kTailFactor * tree_half_eps);

  istar_level_table(r, mu, depth);
}

// ----------------------------------------------------------- tangential-curve

void scenario_tangential_curve(RunReport& r, std::int64_t max_nodes) {
  const int depth = r.params["depth"].get<int>();
  const double rmax = r.params["rmax"].get<double>();
  const int radial = r.params["radial"].get<int>();
  const int angular = r.params["angular"].get<int>();
  const double s = r.params["weight_s"].get<double>();
  constexpr double kNecessityFactor = 16.0;  // simple <= K * oracle

  const CurveSpec surf = real_circle_surface();
  const TransversalityReport cls = transversality_classify(surf, 128);
  step(r, "classification",
       {{"classification", cls.classification},
        {"max_im_tangent", cls.max_im_tangent},
        {"max_holomorphic_defect", cls.max_holomorphic_defect}});
  check_bool(r, "boundary_contact_tangential",
             cls.classification == "complex_tangential");
  check_ge(r, "not_holomorphic", cls.max_holomorphic_defect, 1e-3);

  const BergmanTree bt = ball_tree_checked(2, depth, max_nodes);
  const AtomicMeasure atoms = curve_measure(surf, radial, angular, rmax, s);
  const TreeMeasure mu = discretize(atoms, bt);
  const ConditionReport simple = simple_condition(mu, 0.5);
  const ConditionReport split = split_tree_condition(mu, bt);
  KernelSpec spec;
  spec.family = KernelFamily::drury_arveson;
  spec.variant = KernelVariant::re;
  const double oracle = kernel_carleson_oracle(atoms, spec);
  step(r, "carleson_data", {{"simple", cond_json(simple)},
                            {"split", cond_json(split)},
                            {"oracle", oracle},
                            {"total_mass", atoms.total_mass()}});
  add_check(r, "surface_mass_positive", ">", atoms.total_mass(), 0.0,
            atoms.total_mass() > 0.0);
  check_le(r, "simple_necessity", simple.constant, kNecessityFactor * oracle);

  istar_level_table(r, mu, depth);
}

// ---------------------------------------------------------- invariant-measure

void scenario_invariant_measure(RunReport& r, std::int64_t max_nodes) {
  const int n = r.params["n"].get<int>();
  const int depth = r.params["depth"].get<int>();
  const int profiles = r.params["profiles"].get<int>();
  const int max_support = r.params["max_support"].get<int>();
  if (max_support > static_cast<int>(kDenseOperatorCap))
    throw std::invalid_argument(
        "invariant-measure: max_support above the dense-operator cap");
  constexpr double kMassFactor = 8.0;
  constexpr double kVinoTol = 1e-8;

  const BergmanTree bt = ball_tree_checked(n, depth, max_nodes);
  double max_ratio = 0.0;
  int vino_violations = 0;
  r.table_columns = {"profile", "mass", "norm", "ratio", "vino_m"};
  for (int i = 0; i < profiles; ++i) {
    Rng rng(r.seed + 104729ull * static_cast<std::uint64_t>(i));
    std::vector<std::pair<std::int32_t, double>> ring_masses;
    int support = 0;
    const int want = 1 + static_cast<int>(rng.index(3));
    for (int t = 0; t < 8 && static_cast<int>(ring_masses.size()) < want; ++t) {
      const int lvl =
          2 + static_cast<int>(rng.index(static_cast<std::uint64_t>(depth - 1)));
      const auto& level = bt.rings_by_level[static_cast<std::size_t>(lvl)];
      const std::int32_t rid = level[rng.index(level.size())];
      const int pts = bt.ring(rid).npoints;
      if (support + pts > max_support) continue;
      support += pts;
      ring_masses.emplace_back(rid, rng.uniform(0.1, 1.0));
    }
    if (ring_masses.empty()) continue;
    const TreeMeasure mu = invariant_measure(bt, ring_masses);
    const double mass = mu.total_mass();

    OperatorHandle h;
    h.kind = OpKind::t_full;
    const NormResult norm = operator_norm(h, mu, &bt);
    const Eigen::MatrixXd K = kernel_matrix(h, mu, &bt);
    const auto sup = support_nodes(mu);
    Eigen::VectorXd masses(static_cast<Eigen::Index>(sup.size()));
    for (std::size_t j = 0; j < sup.size(); ++j) masses(static_cast<Eigen::Index>(j)) = mu.mass(sup[j]);
    const VinoResult vino = schur_vino_check(K, masses);

    const double ratio = norm.value / mass;
    max_ratio = std::max(max_ratio, ratio);
    if (!vino.infinite && vino.m < norm.value - kVinoTol * std::max(1.0, norm.value))
      ++vino_violations;
    r.table.push_back({static_cast<double>(i), mass, norm.value, ratio,
                       vino.infinite ? std::numeric_limits<double>::infinity()
                                     : vino.m});
  }
  step(r, "profiles",
       {{"count", profiles},
        {"max_norm_to_mass_ratio", max_ratio},
        {"vino_violations", vino_violations}});
  check_le(r, "tfull_norm_bounded_by_mass", max_ratio, kMassFactor);
  check_eq0(r, "vino_upper_bound_violations",
            static_cast<double>(vino_violations));
}

// --------------------------------------------------------------------- cantor

void scenario_cantor(RunReport& r, std::int64_t) {
  std::vector<int> depths = ilist(r.params["depths"]);
  const std::vector<double> r_grid = dlist(r.params["r_grid"]);
  const int norm_depth = r.params["norm_depth"].get<int>();
  if (depths.size() < 2 || !std::is_sorted(depths.begin(), depths.end()) ||
      depths.back() > 18)
    throw std::invalid_argument("cantor: depths ascending, max 18");
  if (norm_depth < 2 || norm_depth > 14)
    throw std::invalid_argument("cantor: norm_depth in [2, 14]");
  constexpr double kSimpleTol = 1e-12;
  constexpr double kTreeTol = 1e-9;
  constexpr double kDivergenceFloor = 1.5;
  constexpr double kSmallStableTol = 0.15;
  constexpr double kSuffK = 8.0;

  double simple_err = 0.0, tree_err = 0.0;
  std::vector<double> tbig, tsmall;
  r.table_columns = {"depth", "simple", "tree", "tbig_norm", "tsmall_norm"};
  for (int d : depths) {
    const Tree t = Tree::full_binary(d);
    const TreeMeasure mu = cantor_measure(t, d);
    const double sc = simple_condition(mu, 0.5).constant;
    const double tc = tree_condition(mu, 0.5).constant;
    simple_err = std::max(simple_err, std::abs(sc - 1.0));
    tree_err = std::max(tree_err, std::abs(tc - (d + 1.0)));
    OperatorHandle hb;
    hb.kind = OpKind::t_big;
    OperatorHandle hs;
    hs.kind = OpKind::t_small;
    hs.r = 1.0;
    const double nb =
        operator_norm(hb, mu, nullptr, NormMethod::power_iter).value;
    const double ns =
        operator_norm(hs, mu, nullptr, NormMethod::power_iter).value;
    tbig.push_back(nb);
    tsmall.push_back(ns);
    r.table.push_back({static_cast<double>(d), sc, tc, nb, ns});
  }
  step(r, "exact_constants",
       {{"max_simple_error", simple_err}, {"max_tree_error", tree_err}});
  check_le(r, "simple_constant_is_one", simple_err, kSimpleTol);
  check_le(r, "tree_constant_is_depth_plus_one", tree_err, kTreeTol);

  double min_consecutive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tbig.size(); ++i)
    min_consecutive = std::min(min_consecutive, tbig[i] / tbig[i - 1]);
  const double total_growth = tbig.back() / tbig.front();
  const double small_drift =
      std::abs(tsmall.back() / tsmall[tsmall.size() - 2] - 1.0);
  step(r, "norm_growth",
       {{"tbig_total_growth", total_growth},
        {"tbig_min_consecutive_ratio", min_consecutive},
        {"tsmall_drift", small_drift}});
  check_ge(r, "tbig_diverges_with_depth", total_growth, kDivergenceFloor);
  check_ge(r, "tbig_monotone", min_consecutive, 1.0 - 1e-9);
  check_le(r, "tsmall_stays_bounded", small_drift, kSmallStableTol);

  const Tree tn = Tree::full_binary(norm_depth);
  const SimpleSufficesTable suff =
      simple_suffices_suite(cantor_measure(tn, norm_depth), r_grid);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : suff.rows)
    rows.push_back({{"r", row.r}, {"norm", row.norm.value}});
  step(r, "damped_norms", {{"rows", rows},
                           {"slope", suff.slope},
                           {"k_factor", suff.k_factor}});
  check_le(r, "damped_norm_k_factor", suff.k_factor, kSuffK);
  check_ge(r, "damped_norm_slope_low", suff.slope, -1.2);
  check_le(r, "damped_norm_slope_high", suff.slope, 0.0);
}

// ---------------------------------------------------------------- von-neumann

// Multiplication by f compressed to polynomials of degree <= D on the
// symmetric-shift space: monomial z^alpha has squared norm alpha!/|alpha|!.
struct TruncatedMultiplier {
  int n = 2;
  std::vector<std::vector<int>> basis;
  std::map<std::vector<int>, int> index;

  explicit TruncatedMultiplier(int n_, int D) : n(n_) {
    std::vector<int> cur(n, 0);
    emit(cur, 0, D);
    std::sort(basis.begin(), basis.end());
    for (std::size_t i = 0; i < basis.size(); ++i)
      index[basis[i]] = static_cast<int>(i);
  }
  void emit(std::vector<int>& cur, int pos, int left) {
    if (pos == n) {
      basis.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      emit(cur, pos + 1, left - k);
    }
    cur[pos] = 0;
  }
  static double log_weight(const std::vector<int>& a) {
    int total = 0;
    double lg = 0.0;
    for (int ai : a) {
      total += ai;
      lg += std::lgamma(ai + 1.0);
    }
    return lg - std::lgamma(total + 1.0);
  }
  double norm(const Poly& f) const {
    Eigen::MatrixXcd M =
        Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const double lwa = log_weight(basis[a]);
      for (const auto& [expo, coeff] : f.terms) {
        std::vector<int> b = basis[a];
        for (int k = 0; k < n; ++k) b[k] += expo[k];
        const auto it = index.find(b);
        if (it == index.end()) continue;
        M(it->second, static_cast<Eigen::Index>(a)) +=
            coeff * std::exp(0.5 * (log_weight(b) - lwa));
      }
    }
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
  }
};

void scenario_von_neumann(RunReport& r, std::int64_t max_nodes) {
  const int n = r.params["n"].get<int>();
  const int degree = r.params["degree"].get<int>();
  const int nterms = r.params["terms"].get<int>();
  std::vector<int> truncs = ilist(r.params["trunc_degrees"]);
  const int budget = r.params["budget"].get<int>();
  const int tree_depth = r.params["tree_depth"].get<int>();
  if (n < 1 || n > 3) throw std::invalid_argument("von-neumann: n in [1, 3]");
  if (truncs.size() < 2 || !std::is_sorted(truncs.begin(), truncs.end()) ||
      truncs.back() > 16)
    throw std::invalid_argument(
        "von-neumann: trunc_degrees ascending, max 16");
  constexpr double kMonotoneTol = 1e-9;
  constexpr double kEstimateFactor = 8.0;
  constexpr double kMassTol = 0.02;  // quasi-random quadrature, ~1e3 points

  Rng rng(r.seed + 65537ull);
  Poly f;
  f.n = n;
  for (int t = 0; t < nterms; ++t) {
    std::vector<int> expo(n, 0);
    int left = 1 + static_cast<int>(rng.index(degree));
    for (int k = 0; k < n; ++k) {
      const int e = static_cast<int>(rng.index(left + 1));
      expo[k] = e;
      left -= e;
    }
    f.terms.emplace_back(expo, rng.complex_gaussian());
  }
  const double sup0 = f.sup_on_sphere(512, r.seed + 2ull);
  if (!(sup0 > 0.0)) throw std::invalid_argument("von-neumann: zero symbol");
  for (auto& [e, c] : f.terms) c *= 0.8 / sup0;
  const double sup_f = f.sup_on_sphere(512, r.seed + 2ull);

  std::vector<double> comps;
  r.table_columns = {"degree_cap", "dimension", "compression_norm"};
  for (int D : truncs) {
    TruncatedMultiplier tm(n, D);
    const double c = tm.norm(f);
    comps.push_back(c);
    r.table.push_back({static_cast<double>(D),
                       static_cast<double>(tm.basis.size()), c});
  }
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    worst_drop = std::max(worst_drop, comps[i - 1] - comps[i]);

  const AtomicMeasure mu_f =
      multiplier_measure(f, 1, budget, r.seed + 3ull, 0.97);
  KernelSpec spec;
  spec.family = KernelFamily::drury_arveson;
  const double carl = kernel_carleson_oracle(mu_f, spec);
  const double mult_upper = sup_f + kEstimateFactor * std::pow(std::max(carl, 0.0), 0.25);

  const BergmanTree bt = ball_tree_checked(n, tree_depth, max_nodes);
  const TreeMeasure mu_tree = discretize(mu_f, bt);
  const ConditionReport simple = simple_condition(mu_tree, 0.5);
  const ConditionReport tree = tree_condition(mu_tree, 1.0);

  step(r, "symbol",
       {{"terms", static_cast<int>(f.terms.size())},
        {"sup_on_sphere", sup_f},
        {"derivative_measure_atoms", mu_f.size()},
        {"derivative_measure_mass", mu_f.total_mass()},
        {"carleson_oracle", carl},
        {"multiplier_upper_estimate", mult_upper},
        {"simple", cond_json(simple)},
        {"tree", cond_json(tree)}});
  check_le(r, "compressions_monotone", worst_drop, kMonotoneTol);
  check_le(r, "compression_below_multiplier_estimate", comps.back(),
           mult_upper + kMonotoneTol);
  check_ge(r, "compression_reaches_half_sup", comps.back(), 0.5 * sup_f);

  {
    Poly idp;
    idp.n = 1;
    idp.terms.emplace_back(std::vector<int>{1}, std::complex<double>(1.0, 0.0));
    const AtomicMeasure mz = multiplier_measure(idp, 1, budget, r.seed + 4ull);
    const double target = 1.5707963267948966;  // quarter turn area integral
    const double rel = std::abs(mz.total_mass() / target - 1.0);
    step(r, "disk_identity_mass",
         {{"mass", mz.total_mass()}, {"target", target}, {"relative_error", rel}});
    check_le(r, "identity_symbol_mass", rel, kMassTol);
  }
}

// -------------------------------------------------------------- interpolation

void scenario_interpolation(RunReport& r, std::int64_t max_nodes) {
  const double sigma = r.params["sigma"].get<double>();
  const int points = r.params["points"].get<int>();
  const int depth = r.params["depth"].get<int>();
  if (!(sigma > 0.0 && sigma < 0.5))
    throw std::invalid_argument("interpolation: sigma in (0, 1/2)");
  if (points < 2 || points > 24)
    throw std::invalid_argument("interpolation: points in [2, 24]");
  constexpr double kOffdiagGap = 1e-6;
  constexpr double kGramCap = 8.0;
  constexpr double kOracleBand = 64.0;

  std::vector<CVec> Z;
  r.table_columns = {"j", "radius"};
  for (int j = 1; j <= points; ++j) {
    const double rad = 1.0 - std::exp2(-j);
    const double phi = 6.283185307179586 * std::fmod(j * 0.6180339887498949, 1.0);
    CVec z(1);
    z(0) = std::polar(rad, phi);
    Z.push_back(z);
    r.table.push_back({static_cast<double>(j), rad});
  }
  const BergmanTree bt = ball_tree_checked(1, depth, max_nodes);
  const GramReport g = gram_interpolation_test(Z, sigma, &bt);
  const NPResult np = np_one_positive_eigenvalue(Z, sigma);
  step(r, "gram",
       {{"separation", g.separation},
        {"gram_norm", g.gram_norm},
        {"abs_gram_norm", g.abs_gram_norm},
        {"max_offdiag", g.max_offdiag},
        {"tree_condition_constant", g.tree_condition_constant},
        {"oracle_constant", g.oracle_constant},
        {"np_positives", np.positives}});
  add_check(r, "points_separated", ">", g.separation, 0.0, g.separation > 0.0);
  check_ge(r, "gram_norm_at_least_one", g.gram_norm, 1.0 - 1e-9);
  check_le(r, "gram_norm_riesz_bound", g.gram_norm, kGramCap);
  check_le(r, "gram_offdiagonal_strict", g.max_offdiag, 1.0 - kOffdiagGap);
  check_bool(r, "np_one_positive", np.one_positive);
  const double ratio =
      g.gram_norm > 0.0 ? g.oracle_constant / g.gram_norm : 0.0;
  add_check(r, "oracle_gram_comparable_low", ">=", ratio, 1.0 / kOracleBand,
            ratio >= 1.0 / kOracleBand);
  check_le(r, "oracle_gram_comparable_high", ratio, kOracleBand);
}

// ------------------------------------------------------------ two-weight-suite

void scenario_two_weight(RunReport& r, std::int64_t) {
  const int count = r.params["count"].get<int>();
  const int max_tree = r.params["max_tree_nodes"].get<int>();
  const int trials = r.params["maximal_trials"].get<int>();
  if (max_tree < 2 || max_tree > static_cast<int>(kDenseNodeCap))
    throw std::invalid_argument(
        "two-weight-suite: max_tree_nodes in [2, dense cap]");
  constexpr double kExactTol = 1e-9;
  constexpr double kSuiteK = 16.0;
  constexpr double kMaximalFactor = 4.0;

  {
    const Tree t = Tree::linear(2);
    const std::vector<double> ones{1.0, 1.0};
    const EmbeddingNorm emb = two_weight_embedding_norm(t, ones, ones);
    const ConditionReport tc = two_weight_tree_condition(t, ones, ones);
    const auto If = tree_sum_I(t, ones);
    const auto Isf = tree_sum_Istar(t, ones);
    const double golden = (3.0 + std::sqrt(5.0)) / 2.0;
    step(r, "frozen_linear_pair",
         {{"norm2", emb.norm2},
          {"tree_condition", cond_json(tc)},
          {"I_ones", If},
          {"Istar_ones", Isf}});
    check_le(r, "linear_pair_norm", std::abs(emb.norm2 - golden), kExactTol);
    check_le(r, "linear_pair_tree_constant", std::abs(tc.constant - 2.5),
             kExactTol);
    check_bool(r, "linear_pair_witness_root", tc.witness == 0);
    check_bool(r, "linear_sums",
               If[0] == 1.0 && If[1] == 2.0 && Isf[0] == 2.0 && Isf[1] == 1.0);
  }

  int violations = 0;
  double suite_k = 0.0, worst_gap = 0.0;
  for (int i = 0; i < count; ++i) {
    Rng rng(r.seed + 7ull * static_cast<std::uint64_t>(i) + 3ull);
    const int nodes = 2 + static_cast<int>(rng.index(
                              static_cast<std::uint64_t>(max_tree - 1)));
    std::vector<NodeId> parents(nodes, kNoNode);
    for (int v = 1; v < nodes; ++v)
      parents[v] = static_cast<NodeId>(rng.index(v));
    const Tree t = Tree::from_parents(parents);
    std::vector<double> w(nodes), v(nodes);
    for (int j = 0; j < nodes; ++j) {
      w[j] = rng.uniform(0.05, 1.05);
      v[j] = rng.uniform(0.05, 1.05);
    }
    const double norm2 = two_weight_embedding_norm(t, w, v).norm2;
    const double testing = two_weight_tree_condition(t, w, v).constant;
    const double gap = testing - norm2 * (1.0 + kExactTol);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 0.0) ++violations;
    if (testing > 0.0) suite_k = std::max(suite_k, norm2 / testing);
  }
  step(r, "random_trees",
       {{"count", count},
        {"testing_violations", violations},
        {"worst_gap", worst_gap},
        {"suite_k", suite_k}});
  check_eq0(r, "testing_below_norm_violations",
            static_cast<double>(violations));
  check_le(r, "norm_bounded_by_suite_k_times_testing", suite_k, kSuiteK);

  {
    Rng rng(r.seed + 99991ull);
    const int nodes = 2 + static_cast<int>(rng.index(
                              static_cast<std::uint64_t>(max_tree - 1)));
    std::vector<NodeId> parents(nodes, kNoNode);
    for (int v = 1; v < nodes; ++v)
      parents[v] = static_cast<NodeId>(rng.index(v));
    const Tree t = Tree::from_parents(parents);
    std::vector<double> sg(nodes), nu(nodes);
    for (int j = 0; j < nodes; ++j) {
      sg[j] = rng.uniform(0.05, 1.05);
      nu[j] = rng.uniform(0.05, 1.05);
    }
    const MaximalCheck mc = maximal_inequality_check(t, sg, nu, trials, r.seed);
    step(r, "maximal_operator",
         {{"nodes", nodes},
          {"ratio_constant", mc.ratio_constant},
          {"empirical_constant", mc.empirical_constant},
          {"trials", mc.trials}});
    check_le(r, "maximal_empirical_below_four_ratio_squared",
             mc.empirical_constant,
             kMaximalFactor * mc.ratio_constant * mc.ratio_constant + kExactTol);
  }

  r.table_columns = {"instance_block", "suite_k"};
  r.table.push_back({0.0, suite_k});
}

// ---------------------------------------------------------- potential-appendix

void scenario_potential(RunReport& r, std::int64_t) {
  const int n = r.params["n"].get<int>();
  const double sigma = r.params["sigma"].get<double>();
  const std::vector<double> alphas = dlist(r.params["alphas"]);
  const int natoms = r.params["atoms"].get<int>();
  const int radial = r.params["radial_nodes"].get<int>();
  const int sphere = r.params["sphere_points"].get<int>();
  if (n < 2) throw std::invalid_argument("potential-appendix: n >= 2");
  if (!(sigma > 0.0 && sigma <= 0.5 * n))
    throw std::invalid_argument("potential-appendix: sigma in (0, n/2]");
  if (alphas.size() < 2)
    throw std::invalid_argument("potential-appendix: need >= 2 alphas");
  constexpr double kStability = 4.0;
  constexpr double kClosedFormTol = 1e-8;

  Rng rng(r.seed + 31ull);
  AtomicMeasure mu;
  for (int i = 0; i < natoms; ++i) {
    CVec dir(n);
    for (int k = 0; k < n; ++k) dir(k) = rng.complex_gaussian();
    const double nv = dir.norm();
    if (nv > 0) dir /= nv;
    mu.push((0.7 * std::sqrt(rng.uniform()) * dir).eval(),
            0.05 + rng.uniform());
  }
  const PotentialReport rep =
      potential_operator_check(mu, sigma, alphas, radial, sphere, r.seed);
  r.table_columns = {"alpha", "c_alpha", "scaled"};
  for (const auto& row : rep.rows)
    r.table.push_back({row.alpha, row.c_alpha, row.scaled});
  step(r, "alpha_grid", {{"stability_ratio", rep.stability_ratio},
                         {"atoms", natoms},
                         {"radial_nodes", rep.radial_nodes},
                         {"sphere_points", rep.sphere_points}});
  check_le(r, "scaled_constant_stable_in_alpha", rep.stability_ratio,
           kStability);

  // One atom at the origin: the kernel factor is constant 1, so c_alpha^2 is
  // the plain weighted volume m * pi^n Gamma(alpha+1) / Gamma(n+1+alpha),
  // and the quadrature is exact for integer alpha.
  AtomicMeasure one;
  one.push(CVec::Zero(n), 0.7);
  double worst = 0.0;
  for (double alpha : {0.0, 1.0, 3.0}) {
    const PotentialReport single =
        potential_operator_check(one, sigma, {alpha}, radial, sphere, r.seed);
    const double exact = 0.7 * std::pow(3.141592653589793238462643, n) *
                         std::exp(std::lgamma(alpha + 1.0) -
                                  std::lgamma(n + 1.0 + alpha));
    const double got = single.rows[0].c_alpha * single.rows[0].c_alpha;
    worst = std::max(worst, std::abs(got / exact - 1.0));
  }
  step(r, "single_atom_closed_form", {{"worst_relative_error", worst}});
  check_le(r, "single_atom_volume_integrals", worst, kClosedFormTol);
}

// ------------------------------------------------------------------ registry

using ScenarioFn = void (*)(RunReport&, std::int64_t);

struct ScenarioDef {
  const char* name;
  std::vector<ParamSpec> schema;
  ScenarioFn fn;
};

const std::vector<ScenarioDef>& registry() {
  static const std::vector<ScenarioDef> defs = {
      {"power-measure",
       {{"rho", "number", -0.75},
        {"sigma", "number", 0.5},
        {"depths", "list", nlohmann::json::array({8, 12, 16, 20, 24})}},
       &scenario_power_measure},
      {"fattened-vs-standard",
       {{"depth", "int", 12},
        {"count", "int", 100},
        {"rho", "number", -0.75},
        {"sigma", "number", 0.5},
        {"growth_depths", "list", nlohmann::json::array({3, 6, 12, 24})}},
       &scenario_fattened_vs_standard},
      {"ring-domain",
       {{"L", "number", 2.0},
        {"nmax", "int", 20},
        {"quad_points", "int", 4096},
        {"pair_samples", "int", 1000}},
       &scenario_ring_domain},
      {"lip-sigma",
       {{"sigma", "number", 0.25},
        {"pairs", "int", 200},
        {"trunc", "int", 4096},
        {"rmax", "number", 0.9}},
       &scenario_lip_sigma},
      {"np-kernel",
       {{"instances", "int", 500},
        {"nmax", "int", 3},
        {"mmax", "int", 8},
        {"sigmas", "list", nlohmann::json::array({0.1, 0.25, 0.4})}},
       &scenario_np_kernel},
      {"slice-vacuous",
       {{"n", "int", 2},
        {"depth", "int", 8},
        {"rmax", "number", 0.97},
        {"radial", "int", 24},
        {"angular", "int", 48},
        {"weight_s", "number", 1.0},
        {"disk_atoms", "int", 64}},
       &scenario_slice_vacuous},
      {"transverse-curve",
       {{"a", "number", 0.8},
        {"b", "number", 0.55},
        {"eps", "number", 0.2},
        {"depth", "int", 8},
        {"rmax", "number", 0.97},
        {"radial", "int", 24},
        {"angular", "int", 48},
        {"weight_s", "number", 1.0}},
       &scenario_transverse_curve},
      {"tangential-curve",
       {{"depth", "int", 6},
        {"rmax", "number", 0.9},
        {"radial", "int", 16},
        {"angular", "int", 32},
        {"weight_s", "number", 0.5}},
       &scenario_tangential_curve},
      {"invariant-measure",
       {{"n", "int", 2},
        {"depth", "int", 8},
        {"profiles", "int", 50},
        {"max_support", "int", 900}},
       &scenario_invariant_measure},
      {"cantor",
       {{"depths", "list", nlohmann::json::array({6, 8, 10, 12, 14})},
        {"r_grid", "list", nlohmann::json::array({1.0, 0.5, 0.25, 0.125})},
        {"norm_depth", "int", 12}},
       &scenario_cantor},
      {"von-neumann",
       {{"n", "int", 2},
        {"degree", "int", 3},
        {"terms", "int", 6},
        {"trunc_degrees", "list", nlohmann::json::array({4, 8, 12})},
        {"budget", "int", 1500},
        {"tree_depth", "int", 6}},
       &scenario_von_neumann},
      {"interpolation",
       {{"sigma", "number", 0.25},
        {"points", "int", 8},
        {"depth", "int", 11}},
       &scenario_interpolation},
      {"two-weight-suite",
       {{"count", "int", 200},
        {"max_tree_nodes", "int", 300},
        {"maximal_trials", "int", 16}},
       &scenario_two_weight},
      {"potential-appendix",
       {{"n", "int", 2},
        {"sigma", "number", 0.5},
        {"alphas", "list", nlohmann::json::array({-0.5, 0.0, 1.0, 3.0})},
        {"atoms", "int", 40},
        {"radial_nodes", "int", 48},
        {"sphere_points", "int", 256}},
       &scenario_potential},
  };
  return defs;
}

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void diff_walk(const nlohmann::json& a, const nlohmann::json& b,
               const std::string& path, double rel_tol, RunDiff& out) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (x == y) return;
    const double rel = std::abs(x - y) / std::max(std::abs(x), std::abs(y));
    if (rel > rel_tol) {
      out.pass = false;
      out.lines.push_back(path + ": " + fmt12(x) + " vs " + fmt12(y) +
                          " (rel " + fmt12(rel) + ")");
    }
    return;
  }
  if (a.type() != b.type()) {
    out.pass = false;
    out.lines.push_back(path + ": type mismatch");
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "wall_ms") continue;
      if (!b.contains(it.key())) {
        out.pass = false;
        out.lines.push_back(path + "/" + it.key() + ": missing on right");
        continue;
      }
      diff_walk(it.value(), b.at(it.key()), path + "/" + it.key(), rel_tol,
                out);
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (it.key() == "wall_ms") continue;
      if (!a.contains(it.key())) {
        out.pass = false;
        out.lines.push_back(path + "/" + it.key() + ": missing on left");
      }
    }
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      out.pass = false;
      out.lines.push_back(path + ": length " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      diff_walk(a[i], b[i], path + "/" + std::to_string(i), rel_tol, out);
    return;
  }
  if (a != b) {
    out.pass = false;
    out.lines.push_back(path + ": " + a.dump() + " vs " + b.dump());
  }
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& d : registry()) names.push_back(d.name);
  return names;
}

RunReport run_scenario(const std::string& name, const nlohmann::json& params,
                       std::uint64_t seed, std::int64_t max_nodes) {
  const ScenarioDef* def = nullptr;
  for (const auto& d : registry())
    if (name == d.name) def = &d;
  if (!def) throw std::invalid_argument("unknown scenario: " + name);

  RunReport r;
  r.scenario = name;
  r.seed = seed;
  r.params = resolve_params(params, def->schema, name);
  const auto t0 = std::chrono::steady_clock::now();
  def->fn(r, max_nodes);
  const auto t1 = std::chrono::steady_clock::now();
  r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

nlohmann::json run_report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["params"] = round12_json(r.params);
  j["steps"] = round12_json(r.steps);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.table) {
    nlohmann::json jr = nlohmann::json::array();
    for (double v : row) jr.push_back(round12(v));
    rows.push_back(std::move(jr));
  }
  j["table"] = {{"columns", r.table_columns}, {"rows", std::move(rows)}};
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"check", v.check},
                        {"relation", v.relation},
                        {"value", round12(v.value)},
                        {"bound", round12(v.bound)},
                        {"pass", v.pass}});
  j["verdicts"] = std::move(verdicts);
  j["pass"] = r.pass;
  j["wall_ms"] = round12(r.wall_ms);
  return j;
}

RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.params = j.value("params", nlohmann::json::object());
  r.steps = j.value("steps", nlohmann::json::array());
  if (j.contains("table")) {
    for (const auto& c : j["table"].at("columns"))
      r.table_columns.push_back(c.get<std::string>());
    for (const auto& row : j["table"].at("rows")) {
      std::vector<double> vals;
      for (const auto& v : row) vals.push_back(v.get<double>());
      r.table.push_back(std::move(vals));
    }
  }
  for (const auto& v : j.value("verdicts", nlohmann::json::array()))
    r.verdicts.push_back(Verdict{v.at("check").get<std::string>(),
                                 v.at("relation").get<std::string>(),
                                 v.at("value").get<double>(),
                                 v.at("bound").get<double>(),
                                 v.at("pass").get<bool>()});
  r.pass = j.at("pass").get<bool>();
  r.wall_ms = j.value("wall_ms", 0.0);
  return r;
}

std::string run_report_canonical(const RunReport& r) {
  nlohmann::json j = run_report_to_json(r);
  j.erase("wall_ms");
  return j.dump();
}

std::string run_report_csv(const RunReport& r) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < r.table_columns.size(); ++i)
    ss << (i ? "," : "") << r.table_columns[i];
  ss << "\n";
  for (const auto& row : r.table) {
    for (std::size_t i = 0; i < row.size(); ++i)
      ss << (i ? "," : "") << fmt12(row[i]);
    ss << "\n";
  }
  return ss.str();
}

RunDiff compare_runs(const nlohmann::json& a, const nlohmann::json& b,
                     double rel_tol) {
  RunDiff out;
  diff_walk(a, b, "", rel_tol, out);
  return out;
}

}  // namespace carleson

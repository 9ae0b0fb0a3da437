// carleson-lab: build Bergman trees, project measures onto them, evaluate
// embedding conditions and operator norms, run reproduction scenarios, and
// compare runs. Exit codes: 0 pass, 1 fail, 2 usage, 3 resource refusal.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carleson/bergman_tree.hpp"
#include "carleson/conditions.hpp"
#include "carleson/io.hpp"
#include "carleson/kernels.hpp"
#include "carleson/measures.hpp"
#include "carleson/operators.hpp"
#include "carleson/scenarios.hpp"
#include "carleson/tree_measure.hpp"

namespace {

using carleson::AtomicMeasure;
using carleson::BergmanTree;
using carleson::TreeMeasure;
using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out;
  std::int64_t max_nodes = 2'000'000;
  std::string format = "json";
};

void write_out(const GlobalOpts& g, const std::string& filename,
               const std::string& content) {
  if (g.out.empty()) return;
  std::filesystem::create_directories(g.out);
  carleson::write_text_file(
      (std::filesystem::path(g.out) / filename).string(), content);
}

void emit(const GlobalOpts& g, const json& j, const std::string& stem) {
  const json rounded = carleson::round12_json(j);
  if (g.format == "csv") {
    std::string csv;
    for (auto it = rounded.begin(); it != rounded.end(); ++it) {
      if (!it.value().is_primitive()) continue;
      csv += it.key() + "," + (it.value().is_string()
                                   ? it.value().get<std::string>()
                                   : it.value().dump()) + "\n";
    }
    std::fputs(csv.c_str(), stdout);
    write_out(g, stem + ".csv", csv);
  } else {
    const std::string text = rounded.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    write_out(g, stem + ".json", text);
  }
}

BergmanTree load_or_build_tree(const GlobalOpts& g, const std::string& file,
                               int n, int depth) {
  if (!file.empty())
    return carleson::bergman_tree_from_json(
        json::parse(carleson::read_text_file(file)));
  const std::int64_t est = carleson::estimate_bergman_tree_nodes(n, depth);
  if (est > g.max_nodes)
    throw std::length_error("tree n=" + std::to_string(n) + " depth=" +
                            std::to_string(depth) + " needs about " +
                            std::to_string(est) + " nodes, above --max-nodes " +
                            std::to_string(g.max_nodes));
  carleson::BergmanTreeOptions opts;
  opts.n = n;
  opts.max_depth = depth;
  opts.max_nodes = g.max_nodes;
  if (g.seed_given) opts.seed = g.seed;
  return carleson::cached_bergman_tree(opts);
}

AtomicMeasure load_atoms(const std::string& file) {
  return carleson::atoms_from_json(json::parse(carleson::read_text_file(file)));
}

// Scenario parameter values: int, float, bool, "a,b,c" lists, and depth
// ranges "a..b" (step 4) or "a..b..s".
json parse_param_value(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const auto rest = s.substr(dots + 2);
    const auto dots2 = rest.find("..");
    const int lo = std::stoi(s.substr(0, dots));
    const int hi = std::stoi(dots2 == std::string::npos ? rest
                                                        : rest.substr(0, dots2));
    const int st =
        dots2 == std::string::npos ? 4 : std::stoi(rest.substr(dots2 + 2));
    if (st <= 0 || hi < lo) throw std::invalid_argument("bad range: " + s);
    json arr = json::array();
    for (int v = lo; v <= hi; v += st) arr.push_back(v);
    return arr;
  }
  if (s.find(',') != std::string::npos) {
    json arr = json::array();
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto next = s.find(',', pos);
      const std::string tok =
          s.substr(pos, next == std::string::npos ? next : next - pos);
      arr.push_back(json::parse(tok));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return arr;
  }
  try {
    return json::parse(s);  // numbers
  } catch (const json::exception&) {
    return s;  // plain string
  }
}

json params_from_extras(const std::vector<std::string>& extras) {
  json params = json::object();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0)
      throw std::invalid_argument("expected --name value, got: " + key);
    key = key.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    if (i + 1 >= extras.size())
      throw std::invalid_argument("missing value for --" + key);
    params[key] = parse_param_value(extras[++i]);
  }
  return params;
}

int run_repro(const GlobalOpts& g, const std::string& name, const json& params,
              int jobs) {
  const std::vector<std::string> known = carleson::scenario_names();
  std::vector<std::string> names;
  if (name == "all") {
    names = known;
    if (!params.empty())
      throw std::invalid_argument(
          "repro all: per-scenario parameters are not accepted");
  } else {
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw std::invalid_argument("unknown scenario: " + name);
    names.push_back(name);
  }

  std::vector<carleson::RunReport> reports(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= names.size()) return;
      try {
        reports[i] = carleson::run_scenario(names[i], name == "all" ? json() : params,
                                            g.seed, g.max_nodes);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads =
      std::max(1, std::min<int>(jobs, static_cast<int>(names.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  bool all_pass = true;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    const auto& rep = reports[i];
    all_pass = all_pass && rep.pass;
    const json j = carleson::run_report_to_json(rep);
    if (g.format == "csv") {
      const std::string csv = carleson::run_report_csv(rep);
      std::fputs(csv.c_str(), stdout);
      write_out(g, names[i] + ".csv", csv);
      write_out(g, names[i] + ".json", j.dump(2) + "\n");
    } else {
      std::fputs((j.dump(2) + "\n").c_str(), stdout);
      write_out(g, names[i] + ".json", j.dump(2) + "\n");
      write_out(g, names[i] + ".csv", carleson::run_report_csv(rep));
    }
    if (names.size() > 1)
      std::fprintf(stderr, "[%s] %s\n", rep.pass ? "PASS" : "FAIL",
                   names[i].c_str());
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "carleson-lab: Carleson-measure conditions, operator norms, and kernel "
      "oracles on Bergman trees of the unit ball"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "Random seed for the run")
      ->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "Directory for emitted reports");
  app.add_option("--max-nodes", g.max_nodes,
                 "Refuse to build trees above this node count");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  // ---- build-tree
  auto* sc_build = app.add_subcommand("build-tree", "Build a Bergman tree");
  int bt_n = 2, bt_depth = 6;
  sc_build->add_option("--n", bt_n, "Complex dimension");
  sc_build->add_option("--depth", bt_depth, "Shell depth");

  // ---- discretize
  auto* sc_disc =
      app.add_subcommand("discretize", "Project atoms onto a tree measure");
  std::string d_atoms, d_tree, d_rule = "ring";
  int d_n = 2, d_depth = 6;
  sc_disc->add_option("--atoms", d_atoms, "Atom list JSON file")->required();
  sc_disc->add_option("--tree", d_tree, "Bergman tree JSON file");
  sc_disc->add_option("--n", d_n, "Dimension (when building the tree)");
  sc_disc->add_option("--depth", d_depth, "Depth (when building the tree)");
  sc_disc->add_option("--rule", d_rule, "Kube assignment rule")
      ->check(CLI::IsMember({"ring", "flat"}));

  // ---- check
  auto* sc_check =
      app.add_subcommand("check", "Evaluate an embedding condition");
  std::string c_measure, c_tree, c_atoms, c_cond = "simple";
  double c_sigma = 0.5, c_eps = 0.2, c_p = 2.0;
  int c_rot = 1;
  sc_check->add_option("--measure", c_measure, "Tree-measure JSON file");
  sc_check->add_option("--atoms", c_atoms,
                       "Atom list JSON file (enables rotation suprema)");
  sc_check->add_option("--tree", c_tree, "Bergman tree JSON file")->required();
  sc_check->add_option("--condition", c_cond, "Condition name")
      ->check(CLI::IsMember({"simple", "tree", "ssimp", "lp", "split",
                             "eps-split", "tail", "estimate"}));
  sc_check->add_option("--sigma", c_sigma, "Exponent sigma");
  sc_check->add_option("--eps", c_eps, "Depth fraction for eps-split/tail");
  sc_check->add_option("--p", c_p, "Exponent for the lp condition");
  sc_check->add_option("--rotations", c_rot,
                       "Rotation samples for the supremum (needs --atoms)");

  // ---- norm
  auto* sc_norm = app.add_subcommand("norm", "Operator norm on l2(mu)");
  std::string n_op = "tbig", n_measure, n_tree, n_method = "auto";
  double n_r = 1.0;
  sc_norm->add_option("--operator", n_op, "Kernel")
      ->check(CLI::IsMember({"tfull", "tbig", "tsmall", "frac"}));
  sc_norm->add_option("--measure", n_measure, "Tree-measure JSON file")
      ->required();
  sc_norm->add_option("--tree", n_tree, "Bergman tree JSON file")->required();
  sc_norm->add_option("--r", n_r, "Damping exponent for tsmall");
  sc_norm->add_option("--method", n_method, "Eigensolver")
      ->check(CLI::IsMember({"auto", "dense", "power"}));

  // ---- oracle
  auto* sc_oracle =
      app.add_subcommand("oracle", "Kernel-side Carleson constant");
  std::string o_kernel = "da", o_measure;
  double o_sigma = 0.25;
  sc_oracle->add_option("--kernel", o_kernel,
                        "da | bs:sigma | ring:L | np:file | pot:sigma,alpha");
  sc_oracle->add_option("--measure", o_measure, "Atom list JSON file");
  sc_oracle->add_option("--sigma", o_sigma, "Exponent for np kernels");

  // ---- repro
  auto* sc_repro = app.add_subcommand(
      "repro", "Run a reproduction scenario (name or 'all')");
  std::string r_name;
  int r_jobs = 1;
  sc_repro->add_option("scenario", r_name, "Scenario name")->required();
  sc_repro->add_option("--jobs", r_jobs, "Parallel scenario workers");
  sc_repro->allow_extras();

  // ---- compare
  auto* sc_cmp = app.add_subcommand("compare", "Field-wise report comparison");
  std::string cmp_a, cmp_b;
  double cmp_tol = 0.0;
  sc_cmp->add_option("a", cmp_a, "Left RunReport JSON")->required();
  sc_cmp->add_option("b", cmp_b, "Right RunReport JSON")->required();
  sc_cmp->add_option("--rel-tol", cmp_tol, "Relative tolerance for numbers");

  // Global flags (--seed, --out, ...) are accepted after the verb as well.
  // repro keeps its own copies: fallthrough would forward its unmatched
  // scenario parameters to the parent instead of leaving them as extras.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    if (sub != sc_repro) sub->fallthrough();
  sc_repro->add_option("--seed", g.seed, "Random seed for the run")
      ->each([&](const std::string&) { g.seed_given = true; });
  sc_repro->add_option("--out", g.out, "Directory for emitted reports");
  sc_repro->add_option("--max-nodes", g.max_nodes,
                       "Refuse to build trees above this node count");
  sc_repro->add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sc_build->parsed()) {
      const BergmanTree bt = load_or_build_tree(g, "", bt_n, bt_depth);
      json levels = json::array();
      for (const auto& lvl : bt.rings_by_level) {
        std::int64_t nodes = 0;
        for (auto rid : lvl) nodes += bt.ring(rid).npoints;
        levels.push_back({{"rings", lvl.size()}, {"nodes", nodes}});
      }
      emit(g,
           {{"n", bt.n},
            {"depth", bt.tree.max_depth()},
            {"nodes", bt.tree.size()},
            {"rings", bt.rings.size()},
            {"levels", levels}},
           "tree-summary");
      write_out(g,
                "tree-n" + std::to_string(bt.n) + "-d" +
                    std::to_string(bt.tree.max_depth()) + ".json",
                carleson::bergman_tree_to_json(bt).dump() + "\n");
      return 0;
    }

    if (sc_disc->parsed()) {
      const BergmanTree bt = load_or_build_tree(g, d_tree, d_n, d_depth);
      const AtomicMeasure atoms = load_atoms(d_atoms);
      const TreeMeasure mu = carleson::discretize(
          atoms, bt,
          d_rule == "flat" ? carleson::LocateRule::flat
                           : carleson::LocateRule::ring_first);
      emit(g, carleson::measure_to_json(mu), "measure");
      return 0;
    }

    if (sc_check->parsed()) {
      const BergmanTree bt = load_or_build_tree(g, c_tree, 0, 0);
      carleson::SplitOptions sopt;
      auto eval = [&](const TreeMeasure& mu) -> carleson::ConditionReport {
        if (c_cond == "simple") return carleson::simple_condition(mu, c_sigma);
        if (c_cond == "tree") return carleson::tree_condition(mu, c_sigma);
        if (c_cond == "ssimp")
          return carleson::strengthened_simple(
              mu, c_sigma, [](int d) { return 1.0 + d; }, "1+d");
        if (c_cond == "lp") return carleson::lp_simple(mu, c_sigma, c_p);
        if (c_cond == "split")
          return carleson::split_tree_condition(mu, bt, sopt);
        if (c_cond == "eps-split")
          return carleson::epsilon_split_condition(mu, bt, c_eps, sopt);
        if (c_cond == "tail")
          return carleson::split_tail_condition(mu, bt, c_eps, sopt);
        const auto est = carleson::drury_arveson_estimate(mu, bt, sopt);
        carleson::ConditionReport rep;
        rep.condition = "estimate";
        rep.constant = est.combined;
        rep.params = {{"simple_part", est.simple_part},
                      {"split_part", est.split_part},
                      {"simple", carleson::to_json(est.simple)},
                      {"split", carleson::to_json(est.split)}};
        return rep;
      };
      carleson::ConditionReport rep;
      if (!c_atoms.empty() && c_rot > 1) {
        const auto rot = carleson::rotated_max(load_atoms(c_atoms), bt, c_rot,
                                               g.seed, eval);
        rep = rot.report;
      } else if (!c_atoms.empty()) {
        rep = eval(carleson::discretize(load_atoms(c_atoms), bt));
      } else {
        if (c_measure.empty())
          throw std::invalid_argument("check: need --measure or --atoms");
        rep = eval(carleson::measure_from_json(
            json::parse(carleson::read_text_file(c_measure)), bt.tree));
      }
      emit(g, carleson::to_json(rep), "check");
      return 0;
    }

    if (sc_norm->parsed()) {
      const BergmanTree bt = load_or_build_tree(g, n_tree, 0, 0);
      const TreeMeasure mu = carleson::measure_from_json(
          json::parse(carleson::read_text_file(n_measure)), bt.tree);
      carleson::OperatorHandle h;
      h.kind = n_op == "tfull"   ? carleson::OpKind::t_full
               : n_op == "tbig"  ? carleson::OpKind::t_big
               : n_op == "tsmall" ? carleson::OpKind::t_small
                                  : carleson::OpKind::frac;
      h.r = n_r;
      const carleson::NormMethod method =
          n_method == "dense"   ? carleson::NormMethod::dense_eig
          : n_method == "power" ? carleson::NormMethod::power_iter
                                : carleson::NormMethod::auto_select;
      const auto res = carleson::operator_norm(h, mu, &bt, method, 1e-8, 10000,
                                               g.seed_given ? g.seed : 7);
      emit(g,
           {{"value", res.value},
            {"method", res.method},
            {"residual", res.residual},
            {"iterations", res.iterations},
            {"seed", res.seed},
            {"converged", res.converged}},
           "norm");
      return 0;
    }

    if (sc_oracle->parsed()) {
      double value = 0.0, residual = 0.0;
      std::string method = "dense_eig";
      if (o_kernel.rfind("np:", 0) == 0) {
        const AtomicMeasure atoms = load_atoms(o_kernel.substr(3));
        const auto res =
            carleson::np_one_positive_eigenvalue(atoms.z, o_sigma);
        value = static_cast<double>(res.positives);
        residual = res.spectrum.size() >= 2
                       ? res.spectrum[res.spectrum.size() - 2]
                       : 0.0;
      } else if (o_kernel.rfind("pot:", 0) == 0) {
        const auto comma = o_kernel.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("oracle: pot:sigma,alpha");
        const double sig = std::stod(o_kernel.substr(4, comma - 4));
        const double alpha = std::stod(o_kernel.substr(comma + 1));
        if (o_measure.empty())
          throw std::invalid_argument("oracle: --measure required");
        const auto rep = carleson::potential_operator_check(
            load_atoms(o_measure), sig, {alpha});
        value = rep.rows[0].c_alpha;
        method = "gram_quadrature";
      } else {
        carleson::KernelSpec spec;
        if (o_kernel == "da") {
          spec.family = carleson::KernelFamily::drury_arveson;
        } else if (o_kernel.rfind("bs:", 0) == 0) {
          spec.family = carleson::KernelFamily::besov_sobolev;
          spec.sigma = std::stod(o_kernel.substr(3));
        } else if (o_kernel.rfind("ring:", 0) == 0) {
          spec.family = carleson::KernelFamily::ring_domain;
          spec.L = std::stod(o_kernel.substr(5));
        } else {
          throw std::invalid_argument("oracle: unknown kernel " + o_kernel);
        }
        if (o_measure.empty())
          throw std::invalid_argument("oracle: --measure required");
        value = carleson::kernel_carleson_oracle(load_atoms(o_measure), spec);
      }
      emit(g,
           {{"value", value},
            {"method", method},
            {"residual", residual},
            {"seed", g.seed}},
           "oracle");
      return 0;
    }

    if (sc_repro->parsed()) {
      const json params = params_from_extras(sc_repro->remaining());
      return run_repro(g, r_name, params, r_jobs);
    }

    if (sc_cmp->parsed()) {
      const json a = json::parse(carleson::read_text_file(cmp_a));
      const json b = json::parse(carleson::read_text_file(cmp_b));
      const auto diff = carleson::compare_runs(a, b, cmp_tol);
      for (const auto& line : diff.lines)
        std::fprintf(stdout, "%s\n", line.c_str());
      std::fprintf(stdout, "%s\n", diff.pass ? "MATCH" : "DIFFER");
      return diff.pass ? 0 : 1;
    }
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "resource refusal: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

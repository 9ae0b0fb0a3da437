#include "carleson/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "carleson/report.hpp"

namespace carleson {

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

nlohmann::json round12_json(const nlohmann::json& j) {
  using nlohmann::json;
  switch (j.type()) {
    case json::value_t::number_float:
      return round12(j.get<double>());
    case json::value_t::array: {
      json out = json::array();
      for (const auto& e : j) out.push_back(round12_json(e));
      return out;
    }
    case json::value_t::object: {
      json out = json::object();
      for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round12_json(it.value());
      return out;
    }
    default:
      return j;
  }
}

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["condition"] = r.condition;
  if (r.infinite) {
    j["constant"] = nullptr;
  } else {
    j["constant"] = r.constant;
  }
  j["infinite"] = r.infinite;
  j["witness"] = r.witness;
  j["params"] = r.params;
  return j;
}

ConditionReport report_from_json(const nlohmann::json& j) {
  ConditionReport r;
  r.condition = j.at("condition").get<std::string>();
  r.infinite = j.at("infinite").get<bool>();
  r.constant = (r.infinite || j.at("constant").is_null())
                   ? std::numeric_limits<double>::infinity()
                   : j.at("constant").get<double>();
  r.witness = j.at("witness").get<NodeId>();
  r.params = j.value("params", nlohmann::json::object());
  return r;
}

nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
    nodes.push_back({{"id", v}, {"parent", t.parent(v)}, {"depth", t.depth(v)}});
  }
  return {{"nodes", std::move(nodes)}, {"root", t.root()}};
}

Tree tree_from_json(const nlohmann::json& j) {
  const auto& nodes = j.at("nodes");
  std::vector<NodeId> parents(nodes.size(), kNoNode);
  std::vector<int> depths(nodes.size(), -1);
  for (const auto& nd : nodes) {
    const auto id = nd.at("id").get<NodeId>();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size())
      throw std::invalid_argument("tree_from_json: node id out of range");
    parents[id] = nd.at("parent").get<NodeId>();
    depths[id] = nd.at("depth").get<int>();
  }
  Tree t = Tree::from_parents(parents);
  if (t.root() != j.at("root").get<NodeId>())
    throw std::invalid_argument("tree_from_json: root mismatch");
  for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
    if (t.depth(v) != depths[v])
      throw std::invalid_argument("tree_from_json: stored depth disagrees with parent structure");
  }
  return t;
}

nlohmann::json bergman_tree_to_json(const BergmanTree& bt) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId v = 0; v < static_cast<NodeId>(bt.tree.size()); ++v) {
    nlohmann::json center = nlohmann::json::array();
    for (int k = 0; k < bt.n; ++k) {
      center.push_back(bt.center[v](k).real());
      center.push_back(bt.center[v](k).imag());
    }
    nodes.push_back({{"id", v},
                     {"parent", bt.tree.parent(v)},
                     {"center", std::move(center)},
                     {"ring", bt.ring_of[v]}});
  }
  // Rings carry their direction and radius verbatim: recomputing them from
  // the member centers can differ in the last bit, and locate outcomes must
  // not depend on whether a tree came from a build or a file.
  nlohmann::json rings = nlohmann::json::array();
  for (const Ring& ring : bt.rings) {
    nlohmann::json dir = nlohmann::json::array();
    for (int k = 0; k < bt.n; ++k) {
      dir.push_back(ring.dir(k).real());
      dir.push_back(ring.dir(k).imag());
    }
    rings.push_back({{"id", ring.id},
                     {"level", ring.level},
                     {"parent", ring.parent},
                     {"dir", std::move(dir)},
                     {"radius", ring.radius},
                     {"npoints", ring.npoints},
                     {"first_node", ring.first_node}});
  }
  return {{"n", bt.n},
          {"theta", bt.theta},
          {"lambda", bt.lambda},
          {"nodes", std::move(nodes)},
          {"rings", std::move(rings)}};
}

BergmanTree bergman_tree_from_json(const nlohmann::json& j) {
  BergmanTree bt;
  bt.n = j.at("n").get<int>();
  bt.theta = j.at("theta").get<double>();
  bt.lambda = j.at("lambda").get<double>();
  if (bt.n < 1) throw std::invalid_argument("bergman_tree_from_json: dimension must be positive");

  const auto& nodes = j.at("nodes");
  const auto count = static_cast<NodeId>(nodes.size());
  std::vector<NodeId> parents(nodes.size(), kNoNode);
  bt.center.assign(nodes.size(), CVec::Zero(bt.n));
  bt.ring_of.assign(nodes.size(), -1);
  for (const auto& nd : nodes) {
    const auto id = nd.at("id").get<NodeId>();
    if (id < 0 || id >= count) throw std::invalid_argument("bergman_tree_from_json: bad node id");
    parents[id] = nd.at("parent").get<NodeId>();
    const auto& c = nd.at("center");
    if (static_cast<int>(c.size()) != 2 * bt.n)
      throw std::invalid_argument("bergman_tree_from_json: center length disagrees with n");
    for (int k = 0; k < bt.n; ++k) {
      bt.center[id](k) =
          std::complex<double>(c[2 * k].get<double>(), c[2 * k + 1].get<double>());
    }
    bt.ring_of[id] = nd.at("ring").get<std::int32_t>();
  }
  bt.tree = Tree::from_parents(parents);

  std::int32_t ring_count = 0;
  for (auto r : bt.ring_of) {
    if (r < 0) throw std::invalid_argument("bergman_tree_from_json: missing ring id");
    ring_count = std::max(ring_count, r + 1);
  }
  bt.rings.assign(ring_count, Ring{});
  const auto& rings = j.at("rings");
  if (static_cast<std::int32_t>(rings.size()) != ring_count)
    throw std::invalid_argument(
        "bergman_tree_from_json: ring table size disagrees with node ring ids");
  std::vector<std::int32_t> member_count(ring_count, 0);
  for (NodeId v = 0; v < count; ++v) member_count[bt.ring_of[v]] += 1;
  std::vector<NodeId> ring_parents(ring_count, kNoNode);
  int max_level = 0;
  for (const auto& rj : rings) {
    const auto id = rj.at("id").get<std::int32_t>();
    if (id < 0 || id >= ring_count)
      throw std::invalid_argument("bergman_tree_from_json: bad ring id");
    Ring& ring = bt.rings[id];
    ring.id = id;
    ring.level = rj.at("level").get<int>();
    ring.parent = rj.at("parent").get<std::int32_t>();
    ring.radius = rj.at("radius").get<double>();
    ring.npoints = rj.at("npoints").get<std::int32_t>();
    ring.first_node = rj.at("first_node").get<NodeId>();
    const auto& dj = rj.at("dir");
    if (static_cast<int>(dj.size()) != 2 * bt.n)
      throw std::invalid_argument("bergman_tree_from_json: ring dir length disagrees with n");
    ring.dir = CVec::Zero(bt.n);
    for (int k = 0; k < bt.n; ++k)
      ring.dir(k) = std::complex<double>(dj[2 * k].get<double>(),
                                         dj[2 * k + 1].get<double>());
    if (ring.npoints != member_count[id] || ring.first_node < 0 ||
        ring.first_node >= count || bt.ring_of[ring.first_node] != id ||
        bt.tree.depth(ring.first_node) != ring.level)
      throw std::invalid_argument(
          "bergman_tree_from_json: ring table disagrees with node data");
    max_level = std::max(max_level, ring.level);
    ring_parents[id] = ring.parent < 0 ? kNoNode : ring.parent;
  }
  bt.ring_tree = Tree::from_parents(ring_parents);
  bt.rings_by_level.assign(max_level + 1, {});
  for (std::int32_t r = 0; r < ring_count; ++r)
    bt.rings_by_level[bt.rings[r].level].push_back(r);

  bt.opts.n = bt.n;
  bt.opts.max_depth = max_level;
  return bt;
}

nlohmann::json measure_to_json(const TreeMeasure& mu) {
  nlohmann::json j = nlohmann::json::object();
  for (NodeId v : mu.closure()) {
    if (mu.mass(v) > 0.0) j[std::to_string(v)] = mu.mass(v);
  }
  return j;
}

TreeMeasure measure_from_json(const nlohmann::json& j, const Tree& t) {
  std::vector<double> weights(t.size(), 0.0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const long id = std::stol(it.key());
    if (id < 0 || id >= static_cast<long>(t.size()))
      throw std::invalid_argument("measure_from_json: node id out of range");
    const double m = it.value().get<double>();
    if (m < 0.0) throw std::invalid_argument("measure_from_json: negative mass");
    weights[id] = m;
  }
  return TreeMeasure::from_dense(t, weights);
}

nlohmann::json atoms_to_json(const AtomicMeasure& mu) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    nlohmann::json z = nlohmann::json::array();
    for (int k = 0; k < mu.z[i].size(); ++k) {
      z.push_back(mu.z[i](k).real());
      z.push_back(mu.z[i](k).imag());
    }
    j.push_back({{"z", std::move(z)}, {"m", mu.m[i]}});
  }
  return j;
}

AtomicMeasure atoms_from_json(const nlohmann::json& j) {
  AtomicMeasure mu;
  for (const auto& atom : j) {
    const auto& zc = atom.at("z");
    if (zc.size() % 2 != 0 || zc.empty())
      throw std::invalid_argument("atoms_from_json: coordinate list must pair re/im");
    CVec z(zc.size() / 2);
    for (int k = 0; k < z.size(); ++k) {
      z(k) = std::complex<double>(zc[2 * k].get<double>(), zc[2 * k + 1].get<double>());
    }
    mu.push(z, atom.at("m").get<double>());
  }
  return mu;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("short write: " + path);
}

std::string cache_dir() {
  const char* env = std::getenv("CARLESON_LAB_CACHE");
  return env ? std::string(env) : std::string();
}

namespace {

// Reloading recovers ring directions by dividing member-0 centers by the
// shell radius; accept the cache only when that division reproduces the
// built directions bit for bit, so lookups behave the same either way.
bool reload_is_faithful(const BergmanTree& built, const BergmanTree& loaded) {
  if (built.tree.size() != loaded.tree.size() || built.rings.size() != loaded.rings.size())
    return false;
  for (std::size_t r = 0; r < built.rings.size(); ++r) {
    const CVec& a = built.rings[r].dir;
    const CVec& b = loaded.rings[r].dir;
    for (int k = 0; k < a.size(); ++k) {
      if (a(k) != b(k)) return false;
    }
    if (built.rings[r].radius != loaded.rings[r].radius) return false;
  }
  return true;
}

}  // namespace

BergmanTree cached_bergman_tree(const BergmanTreeOptions& opts) {
  const std::string dir = cache_dir();
  if (dir.empty()) return build_bergman_tree(opts);

  std::filesystem::create_directories(dir);
  std::ostringstream name;
  name << "ball_tree_n" << opts.n << "_d" << opts.max_depth << "_seed" << opts.seed << ".json";
  const std::string path = (std::filesystem::path(dir) / name.str()).string();

  if (std::filesystem::exists(path)) {
    return bergman_tree_from_json(nlohmann::json::parse(read_text_file(path)));
  }
  BergmanTree built = build_bergman_tree(opts);
  const nlohmann::json j = bergman_tree_to_json(built);
  BergmanTree loaded = bergman_tree_from_json(j);
  if (reload_is_faithful(built, loaded)) {
    write_text_file(path, j.dump());
  }
  return built;
}

}  // namespace carleson

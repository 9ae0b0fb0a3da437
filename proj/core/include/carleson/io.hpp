#pragma once
// Serialization: JSON schemas for trees, ball trees, measures, and condition
// reports, plus the canonical 12-significant-digit rounding applied to every
// emitted number so identical runs emit identical bytes. A ball tree can be
// cached on disk (CARLESON_LAB_CACHE) keyed by its build parameters; a cache
// file is only reused when reloading reproduces the built geometry exactly.

#include <string>

#include <json.hpp>

#include "carleson/bergman_tree.hpp"
#include "carleson/measures.hpp"
#include "carleson/tree.hpp"
#include "carleson/tree_measure.hpp"

namespace carleson {

// Round-trip through "%.12g".
double round12(double v);
// Deep copy with every floating number rounded; integers left alone.
nlohmann::json round12_json(const nlohmann::json& j);

// {nodes: [{id, parent, depth}], root}
nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);

// {n, theta, lambda, nodes: [{id, parent, center: [re, im, ...], ring}]}
// Ring directions are recovered from each ring's first member center.
nlohmann::json bergman_tree_to_json(const BergmanTree& bt);
BergmanTree bergman_tree_from_json(const nlohmann::json& j);

// {node id (decimal string): weight}, point masses only.
nlohmann::json measure_to_json(const TreeMeasure& mu);
TreeMeasure measure_from_json(const nlohmann::json& j, const Tree& t);

// [{z: [re, im, ...], m}]
nlohmann::json atoms_to_json(const AtomicMeasure& mu);
AtomicMeasure atoms_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Directory named by CARLESON_LAB_CACHE, or empty when unset.
std::string cache_dir();

// Build (or reload) the tree for these options, reusing the cache directory
// when it is configured and the stored geometry is bit-faithful.
BergmanTree cached_bergman_tree(const BergmanTreeOptions& opts);

}  // namespace carleson

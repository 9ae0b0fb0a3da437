#pragma once
// Uniform result record for every testing-condition evaluation: the computed
// constant, the witness node attaining it, and the parameters that produced
// it. +infinity is a legal constant (reported with the `infinite` flag).

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "carleson/tree.hpp"

namespace carleson {

struct ConditionReport {
  std::string condition;  // e.g. "simple", "tree", "split"
  double constant = 0.0;
  bool infinite = false;
  NodeId witness = kNoNode;
  nlohmann::json params = nlohmann::json::object();

  static ConditionReport infinity(std::string name, NodeId wit,
                                  nlohmann::json p = nlohmann::json::object()) {
    ConditionReport r;
    r.condition = std::move(name);
    r.constant = std::numeric_limits<double>::infinity();
    r.infinite = true;
    r.witness = wit;
    r.params = std::move(p);
    return r;
  }
};

nlohmann::json to_json(const ConditionReport& r);
ConditionReport report_from_json(const nlohmann::json& j);

}  // namespace carleson

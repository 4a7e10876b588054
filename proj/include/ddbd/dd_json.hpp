#pragma once

#include <string>

#include "ddbd/decision_diagram.hpp"
#include "json.hpp"

namespace ddbd::dd {

inline constexpr int kJsonVersion = 1;

nlohmann::json to_json(const DecisionDiagram& dd);
DecisionDiagram from_json(const nlohmann::json& j);

nlohmann::json cut_to_json(const CutRow& c);
CutRow cut_from_json(const nlohmann::json& j);

}  // namespace ddbd::dd

#include "ddbd/dd_json.hpp"

namespace ddbd::dd {

using nlohmann::json;

namespace {

json state_json(const NodeState& s) {
  json a = json::array();
  for (auto v : s) {
    if (v >= kStateInfinity) a.push_back("inf");
    else a.push_back(v);
  }
  return a;
}

NodeState state_from(const json& a) {
  NodeState s;
  for (const auto& v : a) s.push_back(v.is_string() && v.get<std::string>() == "inf" ? kStateInfinity : v.get<std::int64_t>());
  return s;
}

}  // namespace

json to_json(const DecisionDiagram& dd) {
  json layers = json::array();
  const std::size_t m = dd.num_arc_layers();
  for (std::size_t j = 0; j <= m; ++j) {
    json layer;
    if (j < m) layer["kind"] = dd.kind(j) == LayerKind::Discrete ? "discrete" : "continuous";
    json nodes = json::array();
    for (std::size_t i = 0; i < dd.layer_size(j); ++i) {
      const Node& n = dd.node(j, i);
      json jn{{"id", i}};
      if (n.merged) jn["merged"] = true;
      if (!n.state.empty()) jn["state"] = state_json(n.state);
      nodes.push_back(jn);
    }
    layer["nodes"] = nodes;
    if (j < m) {
      json arcs = json::array();
      for (const auto& a : dd.arcs(j)) {
        json ja{{"tail", a.tail}, {"head", a.head}};
        if (a.label.interval) ja["label"] = json{{"lo", a.label.lo}, {"hi", a.label.hi}};
        else ja["label"] = a.label.lo;
        ja["weight"] = a.weight;
        arcs.push_back(ja);
      }
      layer["arcs"] = arcs;
    }
    layers.push_back(layer);
  }
  return json{{"format", "ddbd-decision-diagram"}, {"version", kJsonVersion}, {"layers", layers}};
}

DecisionDiagram from_json(const json& j) {
  if (j.at("version").get<int>() != kJsonVersion) throw std::invalid_argument("unsupported diagram version");
  const auto& layers = j.at("layers");
  if (layers.empty()) throw std::invalid_argument("diagram without layers");
  std::vector<LayerKind> kinds;
  for (std::size_t k = 0; k + 1 < layers.size(); ++k)
    kinds.push_back(layers[k].at("kind").get<std::string>() == "continuous" ? LayerKind::Continuous : LayerKind::Discrete);
  DecisionDiagram dd(kinds);
  const std::size_t m = kinds.size();
  for (std::size_t k = 0; k <= m; ++k) {
    const auto& nodes = layers[k].at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].at("id").get<std::size_t>() != i) throw std::invalid_argument("node ids must be dense and ordered");
      Node n;
      n.merged = nodes[i].value("merged", false);
      if (nodes[i].contains("state")) n.state = state_from(nodes[i]["state"]);
      if (k == 0 || (k == m && m > 0)) {
        if (i != 0) throw std::invalid_argument("root and terminal layers hold one node");
        dd.node(k, 0) = n;
      } else {
        dd.add_node(k, n);
      }
    }
    if (k == m && m > 0 && nodes.empty()) dd.layer_mut(m).clear();
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (const auto& ja : layers[k].at("arcs")) {
      Arc a;
      a.tail = ja.at("tail").get<std::size_t>();
      a.head = ja.at("head").get<std::size_t>();
      const auto& lab = ja.at("label");
      a.label = lab.is_object() ? Label::range(lab.at("lo").get<double>(), lab.at("hi").get<double>())
                                : Label::point(lab.get<double>());
      a.weight = ja.at("weight").get<double>();
      dd.add_arc(k, a);
    }
  }
  return dd;
}

json cut_to_json(const CutRow& c) {
  json coeffs = json::object();
  for (auto [j, v] : c.coeffs) coeffs[std::to_string(j)] = v;
  return json{{"coeffs", coeffs}, {"z_coeff", c.z_coeff}, {"rhs", c.rhs}, {"sense", c.sense == CutSense::Le ? "<=" : ">="}};
}

CutRow cut_from_json(const json& j) {
  CutRow c;
  for (auto& [k, v] : j.at("coeffs").items()) c.coeffs[std::stoul(k)] = v.get<double>();
  c.z_coeff = j.value("z_coeff", 0.0);
  c.rhs = j.at("rhs").get<double>();
  const std::string s = j.at("sense").get<std::string>();
  if (s != "<=" && s != ">=") throw std::invalid_argument("cut sense must be <= or >=");
  c.sense = s == "<=" ? CutSense::Le : CutSense::Ge;
  return c;
}

}  // namespace ddbd::dd

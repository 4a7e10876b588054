#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "ddbd/ucp.hpp"

namespace ddbd::ucp {

double Generator::startup_cost(std::int64_t down_periods) const {
  if (down_periods >= kInfPeriods) return K_inf;
  if (K.empty()) return K_inf;
  const auto k = static_cast<std::size_t>(std::max<std::int64_t>(down_periods, 1));
  return K[std::min(k, K.size()) - 1];
}

double Instance::total_capacity() const {
  double s = 0.0;
  for (const auto& g : generators) s += g.M;
  return s;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInstance(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const Instance& inst) {
  require(inst.T >= 1, "T must be at least 1");
  require(!inst.generators.empty(), "instance has no generators");
  require(!inst.scenarios.empty(), "instance has no scenarios");
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    const std::string tag = "generator " + std::to_string(i) + ": ";
    require(finite_nonneg(g.c_f) && finite_nonneg(g.c_g), tag + "costs must be finite and non-negative");
    require(finite_nonneg(g.m) && std::isfinite(g.M) && g.m <= g.M, tag + "need 0 <= m <= M");
    require(g.L >= 1 && g.l >= 1, tag + "min up/down times must be at least 1");
    require(finite_nonneg(g.RU) && finite_nonneg(g.RD) && finite_nonneg(g.SU) && finite_nonneg(g.SD),
            tag + "ramp rates must be finite and non-negative");
    require(g.SU <= g.RU, tag + "SU must not exceed RU");
    require(g.SD <= g.RD, tag + "SD must not exceed RD");
    require(!g.K.empty(), tag + "start-up cost table is empty");
    for (std::size_t k = 0; k < g.K.size(); ++k) {
      require(finite_nonneg(g.K[k]), tag + "start-up costs must be finite and non-negative");
      require(k == 0 || g.K[k - 1] <= g.K[k], tag + "start-up costs must be non-decreasing");
    }
    require(std::isfinite(g.K_inf) && g.K_inf >= g.K.back(), tag + "K_inf must be the largest start-up cost");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto& sc = inst.scenarios[s];
    const std::string tag = "scenario " + std::to_string(s) + ": ";
    require(sc.D.size() == static_cast<std::size_t>(inst.T) && sc.R.size() == static_cast<std::size_t>(inst.T),
            tag + "demand and reserve need T entries");
    for (int j = 0; j < inst.T; ++j)
      require(finite_nonneg(sc.D[j]) && finite_nonneg(sc.R[j]), tag + "demand and reserve must be non-negative");
    require(finite_nonneg(sc.prob), tag + "probability must be non-negative");
    total += sc.prob;
  }
  require(std::abs(total - 1.0) <= 1e-9, "scenario probabilities must sum to 1");
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["format"] = "ddbd-ucp-instance";
  j["version"] = kInstanceVersion;
  j["T"] = inst.T;
  j["generators"] = nlohmann::json::array();
  for (const auto& g : inst.generators)
    j["generators"].push_back({{"c_f", g.c_f}, {"c_g", g.c_g}, {"m", g.m}, {"M", g.M}, {"L", g.L}, {"l", g.l},
                               {"RU", g.RU}, {"RD", g.RD}, {"SU", g.SU}, {"SD", g.SD}, {"K", g.K},
                               {"K_inf", g.K_inf}});
  j["scenarios"] = nlohmann::json::array();
  for (const auto& s : inst.scenarios) j["scenarios"].push_back({{"prob", s.prob}, {"D", s.D}, {"R", s.R}});
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  try {
    if (j.contains("version") && j.at("version").get<int>() != kInstanceVersion)
      throw InvalidInstance("unsupported instance version");
    inst.T = j.at("T").get<int>();
    for (const auto& jg : j.at("generators")) {
      Generator g;
      g.c_f = jg.at("c_f").get<double>();
      g.c_g = jg.at("c_g").get<double>();
      g.m = jg.at("m").get<double>();
      g.M = jg.at("M").get<double>();
      g.L = jg.at("L").get<int>();
      g.l = jg.at("l").get<int>();
      g.RU = jg.at("RU").get<double>();
      g.RD = jg.at("RD").get<double>();
      g.SU = jg.at("SU").get<double>();
      g.SD = jg.at("SD").get<double>();
      g.K = jg.at("K").get<std::vector<double>>();
      g.K_inf = jg.at("K_inf").get<double>();
      inst.generators.push_back(std::move(g));
    }
    for (const auto& js : j.at("scenarios")) {
      Scenario s;
      s.prob = js.at("prob").get<double>();
      s.D = js.at("D").get<std::vector<double>>();
      s.R = js.at("R").get<std::vector<double>>();
      inst.scenarios.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("malformed instance: ") + e.what());
  }
  validate(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(j);
}

namespace {

// portable draws: std distributions differ between standard libraries
struct Draw {
  std::mt19937_64 rng;
  double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

Instance gen_random_instance(const GeneratorParams& p) {
  if (p.n == 0 || p.T < 1 || p.scenarios == 0) throw std::invalid_argument("generator parameters must be positive");
  if (!(0.0 <= p.demand_lo && p.demand_lo <= p.demand_hi && p.demand_hi <= 1.0))
    throw std::invalid_argument("demand fractions must satisfy 0 <= lo <= hi <= 1");
  Draw d{std::mt19937_64(p.seed)};
  Instance inst;
  inst.T = p.T;
  for (std::size_t i = 0; i < p.n; ++i) {
    Generator g;
    g.M = static_cast<double>(d.integer(40, 120));
    g.m = round_to(g.M * d.real(0.2, 0.4), 1.0);
    g.c_f = round_to(d.real(400, 1000), 1.0);
    g.c_g = round_to(d.real(p.c_g_lo, p.c_g_hi), 0.1);
    g.L = d.integer(1, std::max(1, p.max_min_up));
    g.l = d.integer(1, std::max(1, p.max_min_down));
    g.SU = round_to(g.M * d.real(0.5, 1.0), 1.0);
    g.SD = round_to(g.M * d.real(0.5, 1.0), 1.0);
    g.RU = p.ramp_equal ? g.SU : round_to(d.real(g.SU, g.M), 1.0);
    g.RD = p.ramp_equal ? g.SD : round_to(d.real(g.SD, g.M), 1.0);
    const double k_max = round_to(d.real(100, 600), 1.0);
    const int k_cold = d.integer(1, 4);
    for (int k = 1; k <= k_cold; ++k)
      g.K.push_back(std::round(k_max * std::log(1.0 + k) / std::log(1.0 + k_cold)));
    g.K_inf = k_max;
    inst.generators.push_back(std::move(g));
  }
  const double cap = inst.total_capacity();
  for (std::size_t s = 0; s < p.scenarios; ++s) {
    Scenario sc;
    sc.prob = 1.0 / static_cast<double>(p.scenarios);
    for (int j = 0; j < p.T; ++j) {
      // rounding must not leave the drawn range
      const double lo = std::ceil(p.demand_lo * cap * 10.0 - 1e-9) / 10.0;
      const double hi = std::floor(p.demand_hi * cap * 10.0 + 1e-9) / 10.0;
      const double D = round_to(d.real(p.demand_lo, p.demand_hi) * cap, 0.1);
      sc.D.push_back(std::clamp(D, lo, std::max(lo, hi)));
      sc.R.push_back(round_to(d.real(0.0, std::min(0.1 * D, cap - sc.D.back())), 0.1));
      if (sc.D.back() + sc.R.back() > cap) sc.R.back() = 0.0;
    }
    inst.scenarios.push_back(std::move(sc));
  }
  validate(inst);
  return inst;
}

}  // namespace ddbd::ucp

#include "expnls/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace expnls::cli {

namespace {

using nlohmann::json;

struct ProblemInfo {
  std::map<std::string, double> defaults;
  std::vector<Axis> grid;
};

const std::map<std::string, ProblemInfo>& problem_catalog() {
  static const std::map<std::string, ProblemInfo> catalog = {
      {"soliton1d", {{{"q", 8.0}, {"a", 4.0}, {"c", 0.5}, {"x0", 0.0}}, {{-15.0, 15.0, 10}}}},
      {"cubic_quintic1d",
       {{{"g1", -2.0}, {"g2", 0.5}, {"omega", 2.0}, {"ec", -1.0}, {"beta0", 0.0}}, {{-32.0, 32.0, 11}}}},
      {"plane2d", {{}, {{-38.0, 38.0, 9}, {-38.0, 38.0, 9}}}},
      {"abs_sin1d", {{{"q", 8.0}}, {{-std::numbers::pi, std::numbers::pi, 10}}}},
      {"rotating_bec2d",
       {{{"beta", 1000.0}, {"omega", 0.9}, {"gamma_x", 1.05}, {"gamma_y", 0.95}, {"delta", 32.0}},
        {{-16.0, 16.0, 9}, {-16.0, 16.0, 9}}}},
  };
  return catalog;
}

const std::set<std::string> kObservers = {"mass", "energy", "phase_error", "angular_momentum"};

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("key '" + key + "' must be finite");
  return d;
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

MethodSpec parse_method(const json& m, const std::string& where) {
  check_keys(m, where, {"family", "stages", "nodes", "order"});
  if (!m.contains("family")) throw ConfigError("missing key '" + where + ".family'");
  const std::string fam = string(m["family"], where + ".family");
  MethodSpec spec;
  if (fam == "splitting") {
    if (m.contains("stages") || m.contains("nodes"))
      throw ConfigError("key '" + where + "' : splitting methods take only 'order'");
    spec = MethodSpec::splitting(m.contains("order") ? integer(m["order"], where + ".order") : 2);
    if (spec.order != 1 && spec.order != 2 && spec.order != 4 && spec.order != 6)
      throw ConfigError("key '" + where + ".order' must be 1, 2, 4 or 6");
    return spec;
  }
  if (fam != "erk" && fam != "lawson")
    throw ConfigError("key '" + where + ".family' must be erk, lawson or splitting");
  if (m.contains("order")) throw ConfigError("key '" + where + ".order' applies to splitting only");
  const int s = m.contains("stages") ? integer(m["stages"], where + ".stages") : 2;
  if (s < 1 || s > 8) throw ConfigError("key '" + where + ".stages' must be in [1, 8]");
  NodeFamily nodes = NodeFamily::Gauss;
  if (m.contains("nodes")) {
    const std::string n = string(m["nodes"], where + ".nodes");
    if (n == "equispaced")
      nodes = NodeFamily::Equispaced;
    else if (n != "gauss")
      throw ConfigError("key '" + where + ".nodes' must be gauss or equispaced");
  }
  return fam == "erk" ? MethodSpec::erk(s, nodes) : MethodSpec::lawson(s, nodes);
}

json method_json(const MethodSpec& m) {
  if (m.family == MethodFamily::Splitting) return {{"family", "splitting"}, {"order", m.order}};
  return {{"family", m.family == MethodFamily::Erk ? "erk" : "lawson"},
          {"stages", m.stages},
          {"nodes", m.nodes == NodeFamily::Gauss ? "gauss" : "equispaced"}};
}

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, "", {"problem", "grid", "methods", "T", "h", "observers", "snapshots", "solver"});
  RunConfig cfg;

  if (!doc.contains("problem")) throw ConfigError("missing key 'problem'");
  const json& pj = doc["problem"];
  if (!pj.is_object() || !pj.contains("type")) throw ConfigError("missing key 'problem.type'");
  cfg.problem.type = string(pj["type"], "problem.type");
  const auto& catalog = problem_catalog();
  const auto info = catalog.find(cfg.problem.type);
  if (info == catalog.end()) throw ConfigError("key 'problem.type': unknown problem '" + cfg.problem.type + "'");
  std::set<std::string> allowed{"type"};
  for (const auto& [k, v] : info->second.defaults) allowed.insert(k);
  check_keys(pj, "problem", allowed);
  cfg.problem.params = info->second.defaults;
  for (const auto& [k, v] : pj.items())
    if (k != "type") cfg.problem.params[k] = number(v, "problem." + k);

  cfg.grid = info->second.grid;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_array() || g.empty() || g.size() > 2) throw ConfigError("key 'grid' must be an array of 1 or 2 axes");
    cfg.grid.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string where = "grid[" + std::to_string(i) + "]";
      check_keys(g[i], where, {"left", "right", "log2_modes"});
      for (const char* k : {"left", "right", "log2_modes"})
        if (!g[i].contains(k)) throw ConfigError("missing key '" + where + "." + k + "'");
      cfg.grid.push_back({number(g[i]["left"], where + ".left"), number(g[i]["right"], where + ".right"),
                          integer(g[i]["log2_modes"], where + ".log2_modes")});
    }
  }

  if (!doc.contains("methods")) throw ConfigError("missing key 'methods'");
  const json& ms = doc["methods"];
  if (!ms.is_array() || ms.empty()) throw ConfigError("key 'methods' must be a non-empty array");
  for (std::size_t i = 0; i < ms.size(); ++i)
    cfg.methods.push_back(parse_method(ms[i], "methods[" + std::to_string(i) + "]"));

  if (!doc.contains("T")) throw ConfigError("missing key 'T'");
  cfg.T = number(doc["T"], "T");
  if (!(cfg.T > 0.0)) throw ConfigError("key 'T' must be positive");

  if (!doc.contains("h")) throw ConfigError("missing key 'h'");
  const json& hj = doc["h"];
  if (hj.is_array()) {
    if (hj.empty()) throw ConfigError("key 'h' must not be empty");
    for (std::size_t i = 0; i < hj.size(); ++i) cfg.h.push_back(number(hj[i], "h[" + std::to_string(i) + "]"));
  } else {
    cfg.h.push_back(number(hj, "h"));
  }
  for (double h : cfg.h)
    if (!(h > 0.0) || h > cfg.T) throw ConfigError("key 'h': step sizes must lie in (0, T]");

  if (doc.contains("observers")) {
    const json& o = doc["observers"];
    if (!o.is_array()) throw ConfigError("key 'observers' must be an array");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string name = string(o[i], "observers[" + std::to_string(i) + "]");
      if (!kObservers.count(name)) throw ConfigError("key 'observers[" + std::to_string(i) + "]': unknown observer '" + name + "'");
      cfg.observers.push_back(name);
    }
  } else {
    cfg.observers = {"mass", "energy"};
    if (cfg.problem.type == "rotating_bec2d")
      cfg.observers.push_back("angular_momentum");
    else if (cfg.problem.type != "abs_sin1d")
      cfg.observers.push_back("phase_error");
  }

  if (doc.contains("snapshots")) {
    const json& s = doc["snapshots"];
    if (!s.is_array()) throw ConfigError("key 'snapshots' must be an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double ts = number(s[i], "snapshots[" + std::to_string(i) + "]");
      if (ts < 0.0 || ts > cfg.T) throw ConfigError("key 'snapshots[" + std::to_string(i) + "]' outside [0, T]");
      cfg.snapshots.push_back(ts);
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    check_keys(s, "solver", {"tolerance", "max_iterations", "divergence_factor"});
    if (s.contains("tolerance")) cfg.solver.tolerance = number(s["tolerance"], "solver.tolerance");
    if (s.contains("max_iterations")) cfg.solver.max_iterations = integer(s["max_iterations"], "solver.max_iterations");
    if (s.contains("divergence_factor"))
      cfg.solver.divergence_factor = number(s["divergence_factor"], "solver.divergence_factor");
    try {
      cfg.solver.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("key 'solver': ") + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc;
  json p = {{"type", cfg.problem.type}};
  for (const auto& [k, v] : cfg.problem.params) p[k] = v;
  doc["problem"] = p;
  json g = json::array();
  for (const Axis& a : cfg.grid) g.push_back({{"left", a.left}, {"right", a.right}, {"log2_modes", a.log2_modes}});
  doc["grid"] = g;
  json ms = json::array();
  for (const auto& m : cfg.methods) ms.push_back(method_json(m));
  doc["methods"] = ms;
  doc["T"] = cfg.T;
  doc["h"] = cfg.h;
  doc["observers"] = cfg.observers;
  doc["snapshots"] = cfg.snapshots;
  doc["solver"] = {{"tolerance", cfg.solver.tolerance},
                   {"max_iterations", cfg.solver.max_iterations},
                   {"divergence_factor", cfg.solver.divergence_factor}};
  return doc;
}

std::string canonical(const RunConfig& cfg) { return to_json(cfg).dump(); }

Grid build_grid(const RunConfig& cfg) {
  try {
    return make_grid(cfg.grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("key 'grid': ") + e.what());
  }
}

Problem build_problem(const RunConfig& cfg) {
  const Grid grid = build_grid(cfg);
  const auto& p = cfg.problem.params;
  try {
    if (cfg.problem.type == "soliton1d")
      return cubic_soliton_1d(p.at("q"), p.at("a"), p.at("c"), p.at("x0"), grid);
    if (cfg.problem.type == "cubic_quintic1d")
      return cubic_quintic_1d(p.at("g1"), p.at("g2"), p.at("omega"), p.at("ec"), p.at("beta0"), grid);
    if (cfg.problem.type == "plane2d") return cubic_plane_2d(grid);
    if (cfg.problem.type == "abs_sin1d") return abs_sin_1d(p.at("q"), grid);
    if (cfg.problem.type == "rotating_bec2d") {
      const RotatingTrap trap{p.at("gamma_x"), p.at("gamma_y"), p.at("omega"), p.at("delta")};
      return rotating_gpe_2d(trap, p.at("beta"), thomas_fermi_initial(trap, p.at("beta"), grid), grid);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("key 'problem': ") + e.what());
  }
  throw ConfigError("key 'problem.type': unknown problem '" + cfg.problem.type + "'");
}

}  // namespace expnls::cli

#include "radrect/solver_template.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "radrect/errors.hpp"

namespace radrect {

namespace {

using nlohmann::json;

Configuration config_from_name(const std::string& s) {
  if (s == "222") return Configuration::c222;
  if (s == "32") return Configuration::c32;
  if (s == "4") return Configuration::c4;
  if (s == "22") return Configuration::c22_fixed;
  throw Error(ErrorCode::io_error, "unknown configuration '" + s + "'");
}

json mono_to_json(const Monomial& m) {
  return json::array({int(m.e[0]), int(m.e[1]), int(m.e[2])});
}

Monomial mono_from_json(const json& j) {
  return mono(j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>());
}

}  // namespace

void save_template(const SolverTemplate& t, const std::string& path) {
  json j;
  j["format"] = "radrect-template";
  j["version"] = t.version;
  j["config"] = config_name(t.config);
  j["nvars"] = t.nvars;
  j["degree"] = t.degree;
  j["num_solutions"] = t.num_solutions;
  j["rank_e"] = t.rank_e;
  j["basis_seed"] = t.basis_seed;
  j["n_e"] = t.n_e;
  j["n_r"] = t.n_r;
  j["n_b"] = t.n_b;
  json mons = json::array();
  for (const auto& m : t.monomials) mons.push_back(mono_to_json(m));
  j["monomials"] = std::move(mons);
  json sched = json::array();
  for (const auto& [eq, m] : t.schedule)
    sched.push_back(json::array(
        {eq, int(m.e[0]), int(m.e[1]), int(m.e[2])}));
  j["schedule"] = std::move(sched);
  j["b_one"] = t.b_one;
  j["b_v1"] = t.b_v1;
  j["b_v2"] = t.b_v2;
  j["action_rows"] = t.action_rows;
  if (std::isfinite(t.selection_score)) j["selection_score"] = t.selection_score;

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path);
}

SolverTemplate load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("bad template json: ") + e.what());
  }
  if (j.value("format", "") != "radrect-template" || j.value("version", 0) != 1)
    throw Error(ErrorCode::io_error, "unsupported template file " + path);

  SolverTemplate t;
  t.config = config_from_name(j.at("config").get<std::string>());
  t.nvars = j.at("nvars").get<int>();
  t.degree = j.at("degree").get<int>();
  t.num_solutions = j.at("num_solutions").get<int>();
  t.rank_e = j.at("rank_e").get<int>();
  t.basis_seed = j.at("basis_seed").get<uint64_t>();
  t.n_e = j.at("n_e").get<int>();
  t.n_r = j.at("n_r").get<int>();
  t.n_b = j.at("n_b").get<int>();
  for (const auto& m : j.at("monomials")) t.monomials.push_back(mono_from_json(m));
  for (const auto& row : j.at("schedule"))
    t.schedule.emplace_back(row.at(0).get<int>(),
                            mono(row.at(1).get<int>(), row.at(2).get<int>(),
                                 row.at(3).get<int>()));
  t.b_one = j.at("b_one").get<int>();
  t.b_v1 = j.at("b_v1").get<int>();
  t.b_v2 = j.at("b_v2").get<int>();
  t.action_rows = j.at("action_rows").get<std::vector<int>>();
  t.selection_score = j.value("selection_score",
                              std::numeric_limits<double>::quiet_NaN());

  if (int(t.monomials.size()) != t.n_e + t.n_r + t.n_b ||
      int(t.action_rows.size()) != t.n_b)
    throw Error(ErrorCode::io_error, "inconsistent template " + path);
  return t;
}

std::string template_filename(Configuration c) {
  switch (c) {
    case Configuration::c222: return "h222ll.tmpl.json";
    case Configuration::c32: return "h32ll.tmpl.json";
    case Configuration::c4: return "h4ll.tmpl.json";
    case Configuration::c22_fixed: return "h22l.tmpl.json";
  }
  return "unknown.tmpl.json";
}

const SolverTemplate& TemplateSet::get(Configuration c) const {
  auto it = by_config.find(c);
  if (it == by_config.end())
    throw Error(ErrorCode::io_error,
                std::string("no template for configuration ") + config_name(c));
  return it->second;
}

TemplateSet load_template_set(const std::string& dir) {
  TemplateSet set;
  for (Configuration c : {Configuration::c222, Configuration::c32,
                          Configuration::c4, Configuration::c22_fixed}) {
    const auto path = std::filesystem::path(dir) / template_filename(c);
    if (std::filesystem::exists(path))
      set.by_config.emplace(c, load_template(path.string()));
  }
  return set;
}

}  // namespace radrect

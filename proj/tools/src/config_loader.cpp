#include "config_loader.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <cbfed/error.hpp>
#include <cbfed/law.hpp>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace cbfed::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"domain", {"dim"}},
      {"physics", {"mu", "alpha", "beta", "r", "q"}},
      {"discretization", {"n", "N"}},
      {"time", {"dt", "T", "scheme"}},
      {"regularization", {"epsilon", "nodes", "max_doublings", "table_nodes"}},
      {"law", {"name", "components"}},
      {"initial", {"kind", "amplitude", "max_mode", "path"}},
      {"forcing", {"kind", "amplitude", "omega", "wavenumber", "modes"}},
      {"output", {"snapshot_every"}},
      {"hvi", {"samples"}},
      {"uniqueness", {"delta"}},
      {"converge", {"n", "epsilon", "dt"}},
      {"energy", {"tolerance", "forcing_sweep"}},
  };
  return s;
}

class Reader {
 public:
  Reader(const toml::table& root, std::vector<std::string>& issues) : root_(root), issues_(issues) {}

  const toml::node* find(const std::string& table, const std::string& key) const {
    const auto* t = root_.get_as<toml::table>(table);
    return t ? t->get(key) : nullptr;
  }

  void number(const std::string& table, const std::string& key, double& out) {
    const auto* n = find(table, key);
    if (!n) return;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
      out = *v;
    } else {
      issue(table, key, "expected a number");
    }
  }

  template <class Int>
  void integer(const std::string& table, const std::string& key, Int& out) {
    const auto* n = find(table, key);
    if (!n) return;
    if (const auto* v = n->as_integer()) {
      out = static_cast<Int>(v->get());
    } else {
      issue(table, key, "expected an integer");
    }
  }

  void string(const std::string& table, const std::string& key, std::string& out) {
    const auto* n = find(table, key);
    if (!n) return;
    if (const auto* v = n->as_string()) {
      out = v->get();
    } else {
      issue(table, key, "expected a string");
    }
  }

  template <class T>
  bool array(const std::string& table, const std::string& key, std::vector<T>& out) {
    const auto* n = find(table, key);
    if (!n) return false;
    const auto* a = n->as_array();
    if (!a) {
      issue(table, key, "expected an array");
      return false;
    }
    std::vector<T> tmp;
    for (const auto& e : *a) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) return issue(table, key, "expected an array of strings"), false;
        tmp.push_back(*e.value<std::string>());
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_integer()) return issue(table, key, "expected an array of integers"), false;
        tmp.push_back(static_cast<T>(*e.value<std::int64_t>()));
      } else {
        if (!e.is_number()) return issue(table, key, "expected an array of numbers"), false;
        tmp.push_back(*e.value<double>());
      }
    }
    out = std::move(tmp);
    return true;
  }

  void issue(const std::string& table, const std::string& key, const std::string& what) {
    issues_.push_back((table.empty() ? key : table + "." + key) + ": " + what);
  }

 private:
  const toml::table& root_;
  std::vector<std::string>& issues_;
};

void check_keys(const toml::table& root, std::vector<std::string>& issues) {
  for (const auto& [k, v] : root) {
    const std::string key(k.str());
    if (key == "seed") continue;
    const auto it = schema().find(key);
    if (it == schema().end()) {
      issues.push_back("unknown key '" + key + "'");
      continue;
    }
    const auto* t = v.as_table();
    if (!t) {
      issues.push_back(key + ": expected a table");
      continue;
    }
    for (const auto& [sk, sv] : *t) {
      if (!it->second.count(std::string(sk.str()))) {
        issues.push_back("unknown key '" + key + "." + std::string(sk.str()) + "'");
      }
    }
  }
}

void apply_override(toml::table& root, const std::string& text, std::vector<std::string>& issues) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    issues.push_back("override '" + text + "': expected key=value");
    return;
  }
  const std::string path = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) keys.push_back(part);
  toml::table* t = &root;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    auto* next = t->get(keys[i]);
    if (!next) {
      t->insert(keys[i], toml::table{});
      next = t->get(keys[i]);
    }
    t = next->as_table();
    if (!t) {
      issues.push_back("override '" + text + "': " + keys[i] + " is not a table");
      return;
    }
  }
  try {
    auto parsed = toml::parse("v = " + value);
    parsed.get("v")->visit([&](auto& node) { t->insert_or_assign(keys.back(), node); });
  } catch (const toml::parse_error&) {
    t->insert_or_assign(keys.back(), value);
  }
}

NonsmoothLaw resolve_law(const std::string& ref, const fs::path& base_dir) {
  if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json") {
    const fs::path p = fs::path(ref).is_absolute() ? fs::path(ref) : base_dir / ref;
    return load_law(p);
  }
  return builtin_law(ref);
}

std::optional<std::string> builtin_name(const NonsmoothLaw& law) {
  for (const char* name : {"zigzag", "zero", "identity"}) {
    if (law_to_json(builtin_law(name)) == law_to_json(law)) return std::string(name);
  }
  return std::nullopt;
}

void read_sim(Reader& rd, const toml::table& root, const fs::path& base_dir, SimConfig& c,
              std::vector<std::string>& issues) {
  if (const auto* s = root.get("seed")) {
    if (const auto* v = s->as_integer(); v && v->get() >= 0) {
      c.seed = static_cast<std::uint64_t>(v->get());
    } else {
      issues.push_back("seed: expected a non-negative integer");
    }
  }
  rd.integer("domain", "dim", c.dim);
  rd.number("physics", "mu", c.params.mu);
  rd.number("physics", "alpha", c.params.alpha);
  rd.number("physics", "beta", c.params.beta);
  rd.number("physics", "r", c.params.r);
  rd.number("physics", "q", c.params.q);
  rd.integer("discretization", "n", c.cutoff);
  c.grid = 3 * c.cutoff;
  rd.integer("discretization", "N", c.grid);
  rd.number("time", "dt", c.dt);
  rd.number("time", "T", c.T);
  std::string scheme = to_string(c.scheme);
  rd.string("time", "scheme", scheme);
  try {
    c.scheme = scheme_from_string(scheme);
  } catch (const ConfigError& e) {
    issues.push_back(e.what());
  }
  rd.number("regularization", "epsilon", c.epsilon);
  rd.integer("regularization", "nodes", c.mollifier.nodes);
  rd.integer("regularization", "max_doublings", c.mollifier.max_doublings);
  rd.integer("regularization", "table_nodes", c.mollifier.table_nodes);

  std::vector<std::string> refs;
  std::string name;
  rd.string("law", "name", name);
  rd.array("law", "components", refs);
  if (!name.empty() && !refs.empty()) issues.push_back("law: give either name or components");
  if (!name.empty()) refs = {name};
  if (!refs.empty()) {
    c.laws.clear();
    for (const auto& r : refs) {
      try {
        c.laws.push_back(resolve_law(r, base_dir));
      } catch (const Error& e) {
        issues.push_back("law: " + std::string(e.what()));
      }
    }
  }

  rd.string("initial", "kind", c.ic.kind);
  rd.number("initial", "amplitude", c.ic.amplitude);
  rd.integer("initial", "max_mode", c.ic.max_mode);
  rd.string("initial", "path", c.ic.path);
  if (!c.ic.path.empty() && fs::path(c.ic.path).is_relative()) {
    c.ic.path = (base_dir / c.ic.path).lexically_normal().string();
  }

  rd.string("forcing", "kind", c.forcing.kind);
  rd.number("forcing", "amplitude", c.forcing.amplitude);
  rd.number("forcing", "omega", c.forcing.omega);
  rd.integer("forcing", "wavenumber", c.forcing.wavenumber);
  if (const auto* modes = rd.find("forcing", "modes")) {
    const auto* arr = modes->as_array();
    if (!arr) {
      issues.push_back("forcing.modes: expected an array of tables");
    } else {
      for (const auto& m : *arr) {
        const auto* t = m.as_table();
        if (!t) {
          issues.push_back("forcing.modes: expected an array of tables");
          break;
        }
        toml::table wrap;
        wrap.insert("m", *t);
        Reader mr(wrap, issues);
        ForcingMode fm;
        mr.array("m", "k", fm.k);
        mr.array("m", "re", fm.re);
        mr.array("m", "im", fm.im);
        if (fm.im.empty()) fm.im.assign(fm.re.size(), 0.0);
        c.forcing.modes.push_back(std::move(fm));
      }
    }
  }
  rd.integer("output", "snapshot_every", c.snapshot_every);
}

void read_study(Reader& rd, StudyConfig& s, std::vector<std::string>& issues) {
  rd.integer("hvi", "samples", s.hvi_samples);
  rd.number("uniqueness", "delta", s.uniqueness_delta);
  rd.array("converge", "n", s.ladders.n);
  rd.array("converge", "epsilon", s.ladders.epsilon);
  rd.array("converge", "dt", s.ladders.dt);
  rd.number("energy", "tolerance", s.energy_tolerance);
  rd.array("energy", "forcing_sweep", s.forcing_sweep);
  if (s.hvi_samples < 1) issues.push_back("hvi.samples: must be >= 1");
  if (!(s.uniqueness_delta >= 0.0)) issues.push_back("uniqueness.delta: must be >= 0");
  if (!(s.energy_tolerance > 0.0)) issues.push_back("energy.tolerance: must be > 0");
  for (std::size_t i = 1; i < s.ladders.n.size(); ++i) {
    if (s.ladders.n[i] <= s.ladders.n[i - 1]) {
      issues.push_back("converge.n: cutoffs must increase");
      break;
    }
  }
  for (std::size_t i = 1; i < s.ladders.epsilon.size(); ++i) {
    if (s.ladders.epsilon[i] >= s.ladders.epsilon[i - 1]) {
      issues.push_back("converge.epsilon: values must decrease");
      break;
    }
  }
  for (std::size_t i = 1; i < s.ladders.dt.size(); ++i) {
    if (s.ladders.dt[i] >= s.ladders.dt[i - 1]) {
      issues.push_back("converge.dt: steps must decrease");
      break;
    }
  }
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json resolved_json(const SimConfig& c, const StudyConfig& s) {
  json laws = json::array();
  for (const auto& law : c.laws) laws.push_back(json::parse(law_to_json(law)));
  json modes = json::array();
  for (const auto& m : c.forcing.modes) modes.push_back({{"k", m.k}, {"re", m.re}, {"im", m.im}});
  return {
      {"seed", c.seed},
      {"domain", {{"dim", c.dim}}},
      {"physics",
       {{"mu", c.params.mu}, {"alpha", c.params.alpha}, {"beta", c.params.beta}, {"r", c.params.r},
        {"q", c.params.q}}},
      {"discretization", {{"n", c.cutoff}, {"N", c.grid}}},
      {"time", {{"dt", c.dt}, {"T", c.T}, {"scheme", to_string(c.scheme)}}},
      {"regularization",
       {{"epsilon", c.epsilon},
        {"nodes", c.mollifier.nodes},
        {"max_doublings", c.mollifier.max_doublings},
        {"table_nodes", c.mollifier.table_nodes}}},
      {"law", laws},
      {"initial",
       {{"kind", c.ic.kind},
        {"amplitude", c.ic.amplitude},
        {"max_mode", c.ic.max_mode},
        {"path", c.ic.path}}},
      {"forcing",
       {{"kind", c.forcing.kind},
        {"amplitude", c.forcing.amplitude},
        {"omega", c.forcing.omega},
        {"wavenumber", c.forcing.wavenumber},
        {"modes", modes}}},
      {"output", {{"snapshot_every", c.snapshot_every}}},
      {"hvi", {{"samples", s.hvi_samples}}},
      {"uniqueness", {{"delta", s.uniqueness_delta}}},
      {"converge", {{"n", s.ladders.n}, {"epsilon", s.ladders.epsilon}, {"dt", s.ladders.dt}}},
      {"energy", {{"tolerance", s.energy_tolerance}, {"forcing_sweep", s.forcing_sweep}}},
  };
}

LoadedConfig parse_config(const std::string& text, const fs::path& base_dir,
                          const std::vector<std::string>& overrides) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  std::vector<std::string> issues;
  for (const auto& o : overrides) apply_override(root, o, issues);
  check_keys(root, issues);

  LoadedConfig out;
  Reader rd(root, issues);
  read_sim(rd, root, base_dir, out.sim, issues);
  read_study(rd, out.study, issues);
  for (auto& v : out.sim.violations()) issues.push_back(std::move(v));
  if (!issues.empty()) throw ConfigError(std::move(issues));

  out.resolved = resolved_json(out.sim, out.study);
  out.hash = fnv1a_hex(out.resolved.dump());
  return out;
}

LoadedConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  if (path.empty()) return parse_config("", fs::current_path(), overrides);
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::absolute(path).parent_path(), overrides);
}

namespace {

toml::array to_toml_array(const json& a) {
  toml::array out;
  for (const auto& e : a) {
    if (e.is_number_integer()) {
      out.push_back(e.get<std::int64_t>());
    } else if (e.is_number()) {
      out.push_back(e.get<double>());
    } else if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_object()) {
      toml::table t;
      for (const auto& [k, v] : e.items()) {
        if (v.is_array()) t.insert(k, to_toml_array(v));
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace

std::string write_config_toml(const LoadedConfig& cfg, const fs::path& dir) {
  toml::table root;
  for (const auto& [key, val] : cfg.resolved.items()) {
    if (key == "law") continue;
    if (!val.is_object()) {
      root.insert(key, val.get<std::int64_t>());
      continue;
    }
    toml::table t;
    for (const auto& [k, v] : val.items()) {
      if (v.is_number_integer()) {
        t.insert(k, v.get<std::int64_t>());
      } else if (v.is_number()) {
        t.insert(k, v.get<double>());
      } else if (v.is_string()) {
        if (!(key == "initial" && k == "path" && v.get<std::string>().empty())) {
          t.insert(k, v.get<std::string>());
        }
      } else if (v.is_array()) {
        t.insert(k, to_toml_array(v));
      }
    }
    root.insert(key, std::move(t));
  }
  toml::array refs;
  for (std::size_t i = 0; i < cfg.sim.laws.size(); ++i) {
    const auto& law = cfg.sim.laws[i];
    if (auto name = builtin_name(law)) {
      refs.push_back(*name);
    } else {
      const std::string file = "law_" + std::to_string(i) + ".json";
      std::ofstream(dir / file) << law_to_json(law) << '\n';
      refs.push_back(file);
    }
  }
  root.insert("law", toml::table{{"components", refs}});
  std::ostringstream out;
  out << toml::toml_formatter(root) << '\n';
  return out.str();
}

std::vector<std::string> command_warnings(const LoadedConfig& cfg, const std::string& command) {
  std::vector<std::string> out;
  const auto& p = cfg.sim.params;
  if (command == "uniqueness" && cfg.sim.dim == 3 && p.r == 3.0 && !(2.0 * p.beta * p.mu > 1.0)) {
    std::ostringstream msg;
    msg << "uniqueness for d = r = 3 needs 2βμ > 1, but 2βμ = " << 2.0 * p.beta * p.mu;
    out.push_back(msg.str());
  }
  if (command == "energy-report" && cfg.sim.dim == 3 && p.r < 3.0) {
    out.push_back("energy equality is only asserted for r >= 3 in 3D; the residual is advisory");
  }
  return out;
}

}  // namespace cbfed::cli

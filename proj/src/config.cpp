#include "rgl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rgl/errors.hpp"

namespace rgl {

namespace {

using json = nlohmann::ordered_json;

// Reads one JSON object section, tracking which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string prefix) : node_(node), prefix_(std::move(prefix)) {
    if (!node_.is_object()) throw ConfigError("'" + prefix_ + "' must be an object");
  }

  ~Section() noexcept(false) = default;

  template <class T>
  void read(const char* key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const nlohmann::json::exception&) {
        fail(key);
      }
    }
  }

  void read_count(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key);
      out = v->get<std::size_t>();
    }
  }

  void read_u64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key);
      out = v->get<std::uint64_t>();
    }
  }

  template <class T>
  void read_optional_count(const char* key, std::optional<T>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number_unsigned()) fail(key);
      out = v->get<T>();
    }
  }

  void read_number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key);
      out = v->get<double>();
    }
  }

  void read_bool(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key);
      out = v->get<bool>();
    }
  }

  void read_string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key);
      out = v->get<std::string>();
    }
  }

  void read_path(const char* key, std::optional<std::filesystem::path>& out, const std::filesystem::path& base) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_string()) fail(key);
      std::filesystem::path p(v->get<std::string>());
      out = p.is_absolute() || base.empty() ? p : base / p;
    }
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string name(const char* key) const { return prefix_ + "." + key; }

  [[noreturn]] void fail(const char* key) const { throw ConfigError("invalid value for '" + name(key) + "'"); }

  void reject_unknown() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError("unknown key '" + prefix_ + "." + it.key() + "'");
    }
  }

 private:
  const json& node_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void check_probability(double p, const std::string& key) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("invalid value for '" + key + "': must lie in [0, 1]");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = root.begin(); it != root.end(); ++it) {
    static const std::set<std::string> kSections{"graph", "corpus", "evaluate", "simulate"};
    if (!kSections.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "'");
  }

  RunConfig c;
  if (root.contains("graph")) {
    Section s(root["graph"], "graph");
    s.read_string("family", c.graph.family);
    s.read_count("n", c.graph.n);
    s.read_number("p", c.graph.p);
    s.read_count("k", c.graph.k);
    s.read_number("p_in", c.graph.p_in);
    s.read_number("p_out", c.graph.p_out);
    s.read_u64("seed", c.graph.seed);
    s.reject_unknown();
    if (c.graph.family != "er" && c.graph.family != "sbm") s.fail("family");
    if (c.graph.n == 0) s.fail("n");
    check_probability(c.graph.p, "graph.p");
    check_probability(c.graph.p_in, "graph.p_in");
    check_probability(c.graph.p_out, "graph.p_out");
    if (c.graph.family == "sbm" && (c.graph.k == 0 || c.graph.k > c.graph.n)) s.fail("k");
  }

  if (root.contains("corpus")) {
    Section s(root["corpus"], "corpus");
    s.read_path("graph_file", c.corpus.graph_file, base_dir);
    s.read_string("kind", c.corpus.kind);
    s.read_optional_count("subgraph_cap", c.corpus.subgraph_cap);
    s.read_optional_count("paths_per_pair_cap", c.corpus.paths_per_pair_cap);
    s.read_count("min_paths", c.corpus.min_paths);
    s.read_bool("include_empty_context", c.corpus.include_empty_context);
    s.read_count("max_tokens", c.corpus.max_tokens);
    if (const json* split = s.find("split")) {
      Section sp(*split, "corpus.split");
      sp.read_number("train_fraction", c.corpus.split.train_fraction);
      sp.read_number("train_ratio", c.corpus.split.train_ratio);
      sp.read_u64("seed", c.corpus.split.seed);
      std::string filter(to_string(c.corpus.split.filter));
      sp.read_string("leakage", filter);
      sp.reject_unknown();
      auto parsed = parse_leakage_filter(filter);
      if (!parsed) sp.fail("leakage");
      c.corpus.split.filter = *parsed;
      if (!(c.corpus.split.train_fraction > 0.0 && c.corpus.split.train_fraction <= 1.0)) sp.fail("train_fraction");
      if (!(c.corpus.split.train_ratio > 0.0 && c.corpus.split.train_ratio <= 1.0)) sp.fail("train_ratio");
    }
    s.reject_unknown();
    if (c.corpus.kind != "extrinsic" && c.corpus.kind != "intrinsic") s.fail("kind");
    if (c.corpus.min_paths == 0) s.fail("min_paths");
  }

  if (root.contains("evaluate")) {
    Section s(root["evaluate"], "evaluate");
    s.read_path("graph_file", c.evaluate.graph_file, base_dir);
    s.read_path("dataset", c.evaluate.dataset, base_dir);
    s.read_path("predictions", c.evaluate.predictions, base_dir);
    s.read_bool("require_endpoints", c.evaluate.require_endpoints);
    s.reject_unknown();
  }

  if (root.contains("simulate")) {
    Section s(root["simulate"], "simulate");
    s.read_path("graph_file", c.simulate.graph_file, base_dir);
    if (const json* grid = s.find("lambda_grid")) {
      if (!grid->is_array()) s.fail("lambda_grid");
      c.simulate.lambda_grid.clear();
      for (const auto& row : *grid) {
        if (!row.is_array() || row.empty()) s.fail("lambda_grid");
        std::vector<double> weights;
        for (const auto& w : row) {
          if (!w.is_number() || w.get<double>() < 0.0) s.fail("lambda_grid");
          weights.push_back(w.get<double>());
        }
        c.simulate.lambda_grid.push_back(std::move(weights));
      }
    }
    if (const json* pairs = s.find("pairs")) {
      if (pairs->is_string() && pairs->get<std::string>() == "all") {
        c.simulate.pairs.clear();
      } else if (pairs->is_array()) {
        for (const auto& p : *pairs) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned()) {
            s.fail("pairs");
          }
          c.simulate.pairs.emplace_back(p[0].get<std::uint32_t>(), p[1].get<std::uint32_t>());
        }
      } else {
        s.fail("pairs");
      }
    }
    s.read_optional_count("max_len", c.simulate.max_len);
    s.read_count("power_cap", c.simulate.power_cap);
    s.read_bool("audit", c.simulate.audit);
    s.read_count("audit_cap", c.simulate.audit_cap);
    s.reject_unknown();
    if (c.simulate.max_len && *c.simulate.max_len == 0) s.fail("max_len");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string dump_config(const RunConfig& c) {
  auto path = [](const std::optional<std::filesystem::path>& p) {
    return p ? json(p->generic_string()) : json(nullptr);
  };
  auto count = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json root;
  root["graph"] = {{"family", c.graph.family}, {"n", c.graph.n},       {"p", c.graph.p},
                   {"k", c.graph.k},           {"p_in", c.graph.p_in}, {"p_out", c.graph.p_out},
                   {"seed", c.graph.seed}};
  root["corpus"] = {{"graph_file", path(c.corpus.graph_file)},
                    {"kind", c.corpus.kind},
                    {"subgraph_cap", count(c.corpus.subgraph_cap)},
                    {"paths_per_pair_cap", count(c.corpus.paths_per_pair_cap)},
                    {"min_paths", c.corpus.min_paths},
                    {"include_empty_context", c.corpus.include_empty_context},
                    {"max_tokens", c.corpus.max_tokens},
                    {"split",
                     {{"train_fraction", c.corpus.split.train_fraction},
                      {"train_ratio", c.corpus.split.train_ratio},
                      {"seed", c.corpus.split.seed},
                      {"leakage", std::string(to_string(c.corpus.split.filter))}}}};
  root["evaluate"] = {{"graph_file", path(c.evaluate.graph_file)},
                      {"dataset", path(c.evaluate.dataset)},
                      {"predictions", path(c.evaluate.predictions)},
                      {"require_endpoints", c.evaluate.require_endpoints}};
  json pairs = c.simulate.pairs.empty() ? json("all") : json::array();
  for (const auto& [s, t] : c.simulate.pairs) pairs.push_back({s, t});
  root["simulate"] = {{"graph_file", path(c.simulate.graph_file)},
                      {"lambda_grid", c.simulate.lambda_grid},
                      {"pairs", pairs},
                      {"max_len", count(c.simulate.max_len)},
                      {"power_cap", c.simulate.power_cap},
                      {"audit", c.simulate.audit},
                      {"audit_cap", c.simulate.audit_cap}};
  return root.dump(2) + "\n";
}

}  // namespace rgl

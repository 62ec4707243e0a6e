#include "nmpg/harness/config.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace nmpg::harness {

using nlohmann::json;

namespace {

std::string format_config_error(const std::string& field, const std::string& reason,
                                const std::string& location) {
  std::string out = location.empty() ? "" : location + ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  return out + reason;
}

}  // namespace

ConfigError::ConfigError(std::string field, std::string reason, const std::string& location)
    : std::runtime_error(format_config_error(field, reason, location)),
      field_(std::move(field)),
      reason_(std::move(reason)) {}

namespace {

/// Reads the members of one JSON object, remembering which keys were used so
/// that leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
    requires std::is_unsigned_v<Int>
  void read(const std::string& key, Int& out) {
    if (const json* v = get(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<Int>();
      } else if (v->is_number_integer()) {
        throw ConfigError(field(key), "must be nonnegative");
      } else {
        throw ConfigError(field(key), "expected a nonnegative integer");
      }
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ProblemSpec parse_problem(const json& obj) {
  ObjectReader r(obj, "problem");
  ProblemSpec p;
  std::string kind;
  r.read("kind", kind);
  if (kind.empty()) throw ConfigError("problem.kind", "is required");
  const auto parsed = parse_problem_kind(kind);
  if (!parsed) throw ConfigError("problem.kind", "unknown problem kind '" + kind + "'");
  p.kind = *parsed;
  r.read("dim", p.dim);
  r.read("rows", p.rows);
  r.read("seed", p.seed);
  r.read("lambda", p.lambda);
  r.read("s", p.s);
  r.finish();
  if (p.lambda < 0.0) throw ConfigError("problem.lambda", "must be positive");
  const ProblemSpec resolved = p.resolved();
  if (resolved.kind == ProblemKind::SparsityProjectedQuadratic && resolved.s > resolved.dim) {
    throw ConfigError("problem.s", "must not exceed problem.dim");
  }
  return p;
}

GammaInitPolicy parse_gamma_init(const json& obj) {
  ObjectReader r(obj, "params.gamma_init");
  std::string policy;
  r.read("policy", policy);
  GammaInitPolicy out;
  if (policy == "barzilai_borwein") {
    out = BarzilaiBorweinGamma{};
  } else if (policy == "previous_accepted") {
    out = PreviousAcceptedGamma{};
  } else if (policy == "constant") {
    double value = 0.0;
    r.read("value", value);
    if (!r.get("value")) throw ConfigError("params.gamma_init.value", "is required");
    out = ConstantGamma{value};
  } else {
    throw ConfigError("params.gamma_init.policy",
                      "expected barzilai_borwein, previous_accepted or constant");
  }
  r.finish();
  return out;
}

ReferencePolicy parse_reference(const json& obj) {
  ObjectReader r(obj, "params.reference");
  std::string policy;
  r.read("policy", policy);
  ReferencePolicy out;
  if (policy == "mean") {
    out = MeanReference{};
  } else if (policy == "max") {
    std::size_t window = 0;
    r.read("window", window);
    if (!r.get("window")) throw ConfigError("params.reference.window", "is required");
    out = MaxReference{window};
  } else {
    throw ConfigError("params.reference.policy", "expected mean or max");
  }
  r.finish();
  return out;
}

SolverParams parse_params(const json& obj) {
  ObjectReader r(obj, "params");
  SolverParams p;
  r.read("gamma_min", p.gamma_min);
  r.read("gamma_max", p.gamma_max);
  r.read("alpha_min", p.alpha_min);
  r.read("alpha_max", p.alpha_max);
  r.read("beta_min", p.beta_min);
  r.read("beta_max", p.beta_max);
  r.read("p_min", p.p_min);
  r.read("epsilon", p.epsilon);
  r.read("max_outer_iters", p.max_outer_iters);
  r.read("max_backtracks", p.max_backtracks);
  if (const json* g = r.get("gamma_init")) p.gamma_init = parse_gamma_init(*g);
  if (const json* ref = r.get("reference")) p.reference = parse_reference(*ref);
  r.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    // validate() reports "<field>: <reason>".
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw ConfigError("params", msg);
    throw ConfigError("params." + msg.substr(0, colon), msg.substr(colon + 2));
  }
  return p;
}

X0Spec parse_x0(const json& obj) {
  ObjectReader r(obj, "x0");
  std::string policy;
  r.read("policy", policy);
  X0Spec x0;
  if (policy == "zeros") {
    x0.policy = X0Policy::Zeros;
  } else if (policy == "domain_witness") {
    x0.policy = X0Policy::DomainWitness;
  } else if (policy == "seeded") {
    x0.policy = X0Policy::Seeded;
    r.read("seed", x0.seed);
  } else {
    throw ConfigError("x0.policy", "expected zeros, domain_witness or seeded");
  }
  r.finish();
  return x0;
}

const char* x0_name(X0Policy p) {
  switch (p) {
    case X0Policy::Zeros: return "zeros";
    case X0Policy::DomainWitness: return "domain_witness";
    case X0Policy::Seeded: return "seeded";
  }
  return "";
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ObjectReader r(doc, "");
  ExperimentConfig cfg;
  const json* problem = r.get("problem");
  if (!problem) throw ConfigError("problem", "is required");
  cfg.problem = parse_problem(*problem);
  if (const json* params = r.get("params")) cfg.params = parse_params(*params);
  if (const json* x0 = r.get("x0")) cfg.x0 = parse_x0(*x0);
  r.read("record_iterates", cfg.record_iterates);
  std::string out_dir = cfg.out_dir.string();
  r.read("out_dir", out_dir);
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
  cfg.out_dir = out_dir;
  r.read("repeats", cfg.repeats);
  if (cfg.repeats == 0) throw ConfigError("repeats", "must be positive");
  r.finish();
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), e.reason(), path.string());
  }
}

json to_json(const ProblemSpec& p) {
  return json{{"kind", std::string(to_string(p.kind))},
              {"dim", p.dim},
              {"rows", p.rows},
              {"seed", p.seed},
              {"lambda", p.lambda},
              {"s", p.s}};
}

json to_json(const SolverParams& p) {
  json gamma_init = std::visit(
      [](const auto& g) -> json {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ConstantGamma>) {
          return json{{"policy", "constant"}, {"value", g.value}};
        } else if constexpr (std::is_same_v<G, PreviousAcceptedGamma>) {
          return json{{"policy", "previous_accepted"}};
        } else {
          return json{{"policy", "barzilai_borwein"}};
        }
      },
      p.gamma_init);
  json reference = std::visit(
      [](const auto& r) -> json {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, MaxReference>) {
          return json{{"policy", "max"}, {"window", r.window}};
        } else {
          return json{{"policy", "mean"}};
        }
      },
      p.reference);
  return json{{"gamma_min", p.gamma_min},
              {"gamma_max", p.gamma_max},
              {"alpha_min", p.alpha_min},
              {"alpha_max", p.alpha_max},
              {"beta_min", p.beta_min},
              {"beta_max", p.beta_max},
              {"p_min", p.p_min},
              {"epsilon", p.epsilon},
              {"max_outer_iters", p.max_outer_iters},
              {"max_backtracks", p.max_backtracks},
              {"gamma_init", gamma_init},
              {"reference", reference}};
}

json to_json(const ExperimentConfig& cfg) {
  json x0{{"policy", x0_name(cfg.x0.policy)}};
  if (cfg.x0.policy == X0Policy::Seeded) x0["seed"] = cfg.x0.seed;
  return json{{"problem", to_json(cfg.problem)},
              {"params", to_json(cfg.params)},
              {"x0", x0},
              {"record_iterates", cfg.record_iterates},
              {"out_dir", cfg.out_dir.string()},
              {"repeats", cfg.repeats}};
}

Vector make_x0(const ExperimentConfig& config, const CompositeProblem& problem,
               std::size_t repeat) {
  const auto n = static_cast<Eigen::Index>(problem.dim());
  switch (config.x0.policy) {
    case X0Policy::Zeros:
      return Vector::Zero(n);
    case X0Policy::DomainWitness:
      return problem.phi().domain_witness();
    case X0Policy::Seeded: {
      std::mt19937_64 rng(config.x0.seed + repeat);
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector x(n);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
      if (problem.phi().value(x).is_infinite()) x = problem.phi().prox(1.0, x);
      return x;
    }
  }
  return Vector::Zero(n);
}

}  // namespace nmpg::harness

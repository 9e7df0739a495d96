#include "gdpa/harness/run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <type_traits>

namespace gdpa::harness {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Reads one JSON object, remembering which keys were used so leftovers can be
// reported as typos.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context) : j_{j}, ctx_{std::move(context)} {
    if (!j_.is_object()) throw ConfigError(ctx_ + ": expected a JSON object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "expected a finite number");
    }
  }

  void read(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }

  void read(const std::string& key, std::uint64_t& out, int /*tag*/) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  /// `null` entries become +inf when allowed.
  void read(const std::string& key, Vector& out, bool null_is_inf = false) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (null_is_inf && e.is_null()) {
          out.push_back(std::numeric_limits<double>::infinity());
        } else if (e.is_number()) {
          out.push_back(e.get<double>());
        } else {
          fail(key, null_is_inf ? "expected numbers or null" : "expected an array of numbers");
        }
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(ctx_ + ": unknown key \"" + item.key() + "\"");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(ctx_ + "." + key + ": " + what);
  }

  const std::string& context() const { return ctx_; }

 private:
  const json& j_;
  std::string ctx_;
  std::set<std::string> seen_;
};

json vector_json(const Vector& v) {
  json arr = json::array();
  for (double x : v) {
    if (std::isinf(x)) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(x);
    }
  }
  return arr;
}

DatasetParams parse_dataset(const json& j, const std::string& ctx) {
  DatasetParams d;
  ObjectReader rd{j, ctx};
  rd.read("source", d.source);
  rd.read("csv_path", d.csv_path);
  rd.read("num_classes", d.num_classes);
  rd.read("feature_dim", d.feature_dim);
  rd.read("per_class", d.per_class);
  rd.read("noise_std", d.noise_std);
  rd.finish();
  if (d.source != "synthetic" && d.source != "csv") {
    throw ConfigError(ctx + ".source: expected \"synthetic\" or \"csv\"");
  }
  if (d.source == "csv" && d.csv_path.empty()) throw ConfigError(ctx + ".csv_path: required for csv data");
  return d;
}

json dataset_json(const DatasetParams& d) {
  return json{{"source", d.source},           {"csv_path", d.csv_path},
              {"num_classes", d.num_classes}, {"feature_dim", d.feature_dim},
              {"per_class", d.per_class},     {"noise_std", d.noise_std}};
}

ProblemParams parse_problem(const json& j) {
  ObjectReader rd{j, "problem"};
  std::string type;
  rd.read("type", type);
  if (type == "analytic") {
    AnalyticParams a;
    std::string instance{problems::analytic_name(a.id)};
    rd.read("instance", instance);
    try {
      a.id = problems::analytic_from_name(instance);
    } catch (const std::invalid_argument& e) {
      rd.fail("instance", e.what());
    }
    rd.read("dim", a.dim);
    rd.finish();
    return a;
  }
  if (type == "mnpc" || type == "nn") {
    DatasetParams data;
    if (const json* d = rd.find("dataset")) data = parse_dataset(*d, "problem.dataset");
    if (type == "mnpc") {
      MnpcParams m;
      m.data = data;
      rd.read("reg_lambda", m.reg_lambda);
      rd.read("thresholds", m.thresholds);
      rd.finish();
      return m;
    }
    NnParams n;
    n.data = data;
    rd.read("hidden", n.hidden);
    rd.read("budgets", n.budgets, true);
    rd.finish();
    return n;
  }
  if (type == "cmdp") {
    CmdpParams c;
    rd.read("num_states", c.num_states);
    rd.read("num_actions", c.num_actions);
    rd.read("num_constraints", c.num_constraints);
    rd.read("gamma", c.gamma);
    rd.read("thresholds", c.thresholds);
    rd.finish();
    return c;
  }
  throw ConfigError("problem.type: expected one of analytic, mnpc, nn, cmdp (got \"" + type + "\")");
}

json problem_json(const ProblemParams& p) {
  return std::visit(
      overloaded{
          [](const AnalyticParams& a) {
            return json{{"type", "analytic"}, {"instance", std::string{problems::analytic_name(a.id)}},
                        {"dim", a.dim}};
          },
          [](const MnpcParams& m) {
            return json{{"type", "mnpc"},
                        {"dataset", dataset_json(m.data)},
                        {"reg_lambda", m.reg_lambda},
                        {"thresholds", vector_json(m.thresholds)}};
          },
          [](const NnParams& n) {
            return json{{"type", "nn"},
                        {"dataset", dataset_json(n.data)},
                        {"hidden", n.hidden},
                        {"budgets", vector_json(n.budgets)}};
          },
          [](const CmdpParams& c) {
            return json{{"type", "cmdp"},
                        {"num_states", c.num_states},
                        {"num_actions", c.num_actions},
                        {"num_constraints", c.num_constraints},
                        {"gamma", c.gamma},
                        {"thresholds", vector_json(c.thresholds)}};
          }},
      p);
}

void read_penalty_fields(ObjectReader& rd, PenaltyConfig& c) {
  rd.read("rho0", c.rho0);
  rd.read("rho_growth", c.rho_growth);
  rd.read("inner_iters", c.inner_iters);
  rd.read("inner_step", c.inner_step);
  rd.read("outer_iters", c.outer_iters);
  rd.read("feas_tol", c.feas_tol);
}

json penalty_fields(const PenaltyConfig& c) {
  return json{{"rho0", c.rho0},
              {"rho_growth", c.rho_growth},
              {"inner_iters", c.inner_iters},
              {"inner_step", c.inner_step},
              {"outer_iters", c.outer_iters},
              {"feas_tol", c.feas_tol}};
}

SolverParams parse_solver(const json& j, const std::string& ctx) {
  ObjectReader rd{j, ctx};
  std::string name = "gdpa";
  rd.read("name", name);
  if (name == "gdpa") {
    std::string preset = "default";
    rd.read("preset", preset);
    GdpaConfig c;
    if (preset == "mnpc") {
      c = GdpaConfig::mnpc_preset();
    } else if (preset == "nn") {
      c = GdpaConfig::nn_preset();
    } else if (preset == "cmdp") {
      c = GdpaConfig::cmdp_preset();
    } else if (preset != "default") {
      rd.fail("preset", "expected one of default, mnpc, nn, cmdp");
    }
    rd.read("tau", c.tau);
    rd.read("beta0", c.beta0);
    Vector alpha{c.alpha01, c.alpha02, c.alpha03};
    rd.read("alpha", alpha);
    if (alpha.size() != 3) rd.fail("alpha", "expected three numbers [alpha01, alpha02, alpha03]");
    c.alpha01 = alpha[0];
    c.alpha02 = alpha[1];
    c.alpha03 = alpha[2];
    rd.read("eps_feas", c.eps_feas);
    rd.read("eps_stat", c.eps_stat);
    rd.finish();
    return c;
  }
  if (name == "penalty") {
    PenaltyConfig c;
    read_penalty_fields(rd, c);
    rd.finish();
    return c;
  }
  if (name == "alm") {
    AlmConfig c;
    read_penalty_fields(rd, c);
    rd.read("stall_ratio", c.stall_ratio);
    rd.finish();
    return c;
  }
  throw ConfigError(ctx + ".name: expected one of gdpa, penalty, alm (got \"" + name + "\")");
}

json solver_json(const SolverParams& s) {
  return std::visit(overloaded{[](const GdpaConfig& c) {
                                 return json{{"name", "gdpa"},
                                             {"tau", c.tau},
                                             {"beta0", c.beta0},
                                             {"alpha", json::array({c.alpha01, c.alpha02, c.alpha03})},
                                             {"eps_feas", c.eps_feas},
                                             {"eps_stat", c.eps_stat}};
                               },
                               [](const PenaltyConfig& c) {
                                 json j = penalty_fields(c);
                                 j["name"] = "penalty";
                                 return j;
                               },
                               [](const AlmConfig& c) {
                                 json j = penalty_fields(c);
                                 j["name"] = "alm";
                                 j["stall_ratio"] = c.stall_ratio;
                                 return j;
                               }},
                    s);
}

Vector gaussian_vector(std::size_t n, double stddev, std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  std::normal_distribution<double> dist{0.0, stddev};
  Vector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Starting points draw from their own stream so they do not shift with the data.
constexpr std::uint64_t kStartStream = 0x9E3779B97F4A7C15ULL;

problems::MnpcDataset make_dataset(const DatasetParams& d, std::uint64_t seed) {
  if (d.source == "csv") return problems::load_csv_dataset(d.csv_path);
  return problems::generate_synthetic_mnpc(seed, d.num_classes, d.feature_dim, d.per_class, d.noise_std);
}

Vector filled_or(const Vector& v, std::size_t n, double fill) { return v.empty() ? Vector(n, fill) : v; }

}  // namespace

std::string solver_name(const SolverParams& s) {
  return std::visit(overloaded{[](const GdpaConfig&) { return std::string{"gdpa"}; },
                               [](const PenaltyConfig&) { return std::string{"penalty"}; },
                               [](const AlmConfig&) { return std::string{"alm"}; }},
                    s);
}

void RunConfig::validate() const {
  if (solvers.empty()) throw ConfigError("solvers: at least one solver is required");
  if (budget == 0) throw ConfigError("budget: must be positive");
  if (record_every == 0) throw ConfigError("record_every: must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  for (const SolverParams& s : solvers) {
    try {
      std::visit([](const auto& c) { c.validate(); }, s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  ObjectReader rd{j, "config"};
  if (const json* p = rd.find("problem")) cfg.problem = parse_problem(*p);
  const json* one = rd.find("solver");
  const json* many = rd.find("solvers");
  if (one && many) throw ConfigError("config: give either \"solver\" or \"solvers\", not both");
  if (one) cfg.solvers = {parse_solver(*one, "solver")};
  if (many) {
    if (!many->is_array()) throw ConfigError("solvers: expected an array");
    cfg.solvers.clear();
    for (std::size_t i = 0; i < many->size(); ++i) {
      cfg.solvers.push_back(parse_solver((*many)[i], "solvers[" + std::to_string(i) + "]"));
    }
  }
  rd.read("budget", cfg.budget);
  std::string out = cfg.output_dir.string();
  rd.read("output_dir", out);
  cfg.output_dir = out;
  rd.read("record_every", cfg.record_every);
  rd.read("record_dense_until", cfg.record_dense_until);
  rd.read("seed", cfg.seed, 0);
  if (rd.find("x0") != nullptr) {
    Vector x0;
    rd.read("x0", x0);
    cfg.x0 = std::move(x0);
  }
  rd.finish();
  cfg.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json solvers = json::array();
  for (const SolverParams& s : cfg.solvers) solvers.push_back(solver_json(s));
  json j{{"problem", problem_json(cfg.problem)},
         {"solvers", solvers},
         {"budget", cfg.budget},
         {"output_dir", cfg.output_dir.string()},
         {"record_every", cfg.record_every},
         {"record_dense_until", cfg.record_dense_until},
         {"seed", cfg.seed}};
  if (cfg.x0) j["x0"] = vector_json(*cfg.x0);
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_run_config(j);
}

BuiltProblem build_problem(const RunConfig& cfg) {
  BuiltProblem out;
  const std::uint64_t start_seed = cfg.seed ^ kStartStream;
  std::visit(overloaded{
                 [&](const AnalyticParams& a) {
                   auto inst = problems::build_analytic(a.id, a.dim);
                   out.problem = inst.problem;
                   out.x0 = inst.x0;
                   out.analytic = std::move(inst);
                 },
                 [&](const MnpcParams& m) {
                   const auto data = make_dataset(m.data, cfg.seed);
                   const std::size_t n_con = data.num_classes - 1;
                   out.problem = problems::build_mnpc(data, m.reg_lambda, filled_or(m.thresholds, n_con, 0.1));
                   out.x0 = gaussian_vector(out.problem.dim, std::sqrt(1e-3), start_seed);
                 },
                 [&](const NnParams& n) {
                   const auto data = make_dataset(n.data, cfg.seed);
                   const std::size_t n_con = data.num_classes - 1;
                   out.problem = problems::build_nn_budget(data, n.hidden, filled_or(n.budgets, n_con, 0.2));
                   out.x0 = gaussian_vector(out.problem.dim, 0.5, start_seed);
                 },
                 [&](const CmdpParams& c) {
                   auto model = problems::generate_random_cmdp(cfg.seed, c.num_states, c.num_actions,
                                                               c.num_constraints, c.gamma);
                   model.thresholds = filled_or(c.thresholds, c.num_constraints, 0.5);
                   out.problem = problems::build_cmdp(model);
                   out.x0 = Vector(out.problem.dim, 0.0);
                   out.cmdp = std::move(model);
                 }},
             cfg.problem);
  if (cfg.x0) {
    if (cfg.x0->size() != out.problem.dim) {
      throw ConfigError("x0: expected " + std::to_string(out.problem.dim) + " entries, got " +
                        std::to_string(cfg.x0->size()));
    }
    out.x0 = *cfg.x0;
  }
  return out;
}

SolverParams effective_solver(const SolverParams& s, const RunConfig& cfg) {
  return std::visit(
      [&](auto c) -> SolverParams {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GdpaConfig>) {
          c.max_iters = cfg.budget;
          c.seed = cfg.seed;
          c.keep_iterates = cfg.record_every == 1;
        } else {
          c.max_grad_evals = cfg.budget;
        }
        c.record_every = cfg.record_every;
        c.record_dense_until = cfg.record_dense_until;
        return c;
      },
      s);
}

SolveResult run_solver(const BuiltProblem& built, const SolverParams& solver, ConstSpan x0) {
  return std::visit(overloaded{[&](const GdpaConfig& c) { return solve(built.problem, c, x0); },
                               [&](const PenaltyConfig& c) { return solve_penalty(built.problem, c, x0); },
                               [&](const AlmConfig& c) { return solve_alm(built.problem, c, x0); }},
                    solver);
}

}  // namespace gdpa::harness

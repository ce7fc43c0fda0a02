#include "sdfo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdfo/problems.hpp"
#include "sdfo/sphere_directions.hpp"

namespace sdfo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config: field '" + field + "': " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) fail(join(path, item.key()), "unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_double(const json& obj, const std::string& path, const char* key, std::optional<double> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (!fallback) fail(join(path, key), "required");
    return *fallback;
  }
  if (!v->is_number()) fail(join(path, key), "expected a number");
  return v->get<double>();
}

std::optional<double> get_optional_double(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) fail(join(path, key), "expected a number");
  return v->get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& path, const char* key, std::optional<std::uint64_t> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (!fallback) fail(join(path, key), "required");
    return *fallback;
  }
  if (!v->is_number_unsigned()) fail(join(path, key), "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       std::optional<std::string> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (!fallback) fail(join(path, key), "required");
    return *fallback;
  }
  if (!v->is_string()) fail(join(path, key), "expected a string");
  return v->get<std::string>();
}

Vector to_vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  Vector out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::optional<Vector> get_optional_vector(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) return std::nullopt;
  return to_vector(*v, join(path, key));
}

std::vector<double> get_grid(const json& obj, const std::string& path, const char* key, std::vector<double> fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  return to_vector(*v, join(path, key));
}

// Re-raise a validation failure from a domain type as a field-named config error.
template <class F>
void validated(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "direct_search") return Algorithm::DirectSearch;
  if (s == "trust_region") return Algorithm::TrustRegion;
  if (s == "audit") return Algorithm::Audit;
  fail("algorithm", "expected direct_search, trust_region or audit, got '" + s + "'");
}

NoiseModel parse_noise(const json* node) {
  if (!node) return NoiseModel::none();
  const std::string path = "noise";
  check_keys(*node, path, {"kind", "variance", "nu", "scale", "moment_order", "r"});
  const std::string kind = get_string(*node, path, "kind", std::nullopt);
  NoiseModel out;
  validated(path, [&] {
    if (kind == "none") {
      out = NoiseModel::none();
    } else if (kind == "gaussian") {
      out = NoiseModel::gaussian(get_double(*node, path, "variance", std::nullopt));
    } else if (kind == "student_t") {
      out = NoiseModel::student_t(get_double(*node, path, "nu", std::nullopt), get_double(*node, path, "scale", 1.0),
                                  get_optional_double(*node, path, "moment_order"));
    } else if (kind == "pareto_symmetric") {
      out = NoiseModel::pareto_symmetric(get_double(*node, path, "r", std::nullopt),
                                         get_double(*node, path, "scale", 1.0));
    } else {
      fail("noise.kind", "expected none, gaussian, student_t or pareto_symmetric, got '" + kind + "'");
    }
  });
  return out;
}

json noise_to_json(const NoiseModel& n) {
  json j;
  j["kind"] = to_string(n.kind());
  switch (n.kind()) {
    case NoiseModel::Kind::None: break;
    case NoiseModel::Kind::Gaussian: j["variance"] = n.variance_param(); break;
    case NoiseModel::Kind::StudentT:
      j["nu"] = n.nu();
      j["scale"] = n.scale();
      if (n.nu() <= 2.0 || n.declared_moment().order != 2.0) j["moment_order"] = n.declared_moment().order;
      break;
    case NoiseModel::Kind::ParetoSymmetric:
      j["r"] = n.tail_index();
      j["scale"] = n.scale();
      break;
  }
  return j;
}

DirectSearchConfig parse_direct_search(const json* node) {
  DirectSearchConfig c;
  if (!node) return c;
  const std::string path = "direct_search";
  check_keys(*node, path, {"delta0", "theta", "tau", "tau_bar", "max_iters", "delta_floor", "eps_f"});
  c.delta0 = get_double(*node, path, "delta0", c.delta0);
  c.tau = get_double(*node, path, "tau", c.tau);
  c.tau_bar = get_double(*node, path, "tau_bar", c.tau_bar);
  c.max_iters = get_uint(*node, path, "max_iters", c.max_iters);
  c.delta_floor = get_double(*node, path, "delta_floor", c.delta_floor);
  c.eps_f_hint = get_optional_double(*node, path, "eps_f");
  if (!find(*node, "theta") && !c.eps_f_hint) fail("direct_search.theta", "required when eps_f is not given");
  c.theta = get_double(*node, path, "theta", c.eps_f_hint ? ds_default_theta(*c.eps_f_hint, c.tau) : 0.0);
  validated(path, [&] { c.validate(); });
  return c;
}

TrustRegionConfig parse_trust_region(const json* node) {
  TrustRegionConfig c;
  if (!node) return c;
  const std::string path = "trust_region";
  check_keys(*node, path,
             {"delta0", "delta_max", "theta", "tau", "tau_bar", "hessian", "q", "m", "M", "max_iters", "delta_floor",
              "eps_f"});
  c.delta0 = get_double(*node, path, "delta0", c.delta0);
  c.delta_max = get_double(*node, path, "delta_max", c.delta0);
  c.tau = get_double(*node, path, "tau", c.tau);
  c.tau_bar = get_double(*node, path, "tau_bar", c.tau_bar);
  const std::string hessian = get_string(*node, path, "hessian", "zero");
  if (hessian == "zero")
    c.hessian = HessianPolicy::Zero;
  else if (hessian == "regression_clipped")
    c.hessian = HessianPolicy::RegressionClipped;
  else
    fail("trust_region.hessian", "expected zero or regression_clipped, got '" + hessian + "'");
  c.q = get_double(*node, path, "q", c.q);
  c.m = get_double(*node, path, "m", c.m);
  c.M = get_double(*node, path, "M", c.M);
  c.max_iters = get_uint(*node, path, "max_iters", c.max_iters);
  c.delta_floor = get_double(*node, path, "delta_floor", c.delta_floor);
  c.eps_f_hint = get_optional_double(*node, path, "eps_f");
  if (!find(*node, "theta") && !c.eps_f_hint) fail("trust_region.theta", "required when eps_f is not given");
  const double fallback = c.eps_f_hint ? 1.1 * tr_theta_bound(*c.eps_f_hint, c.tau, c.M, c.delta_max, c.q) : 0.0;
  c.theta = get_double(*node, path, "theta", fallback);
  validated(path, [&] { c.validate(); });
  return c;
}

AuditBlock parse_audit(const json* node, const ProblemSpec& problem) {
  AuditBlock a;
  if (!node) return a;
  const std::string path = "audit";
  check_keys(*node, path,
             {"k_f", "eps_f", "eps_q", "p_grid", "delta_grid", "trials", "confidence", "h", "alpha_grid", "x", "g",
              "checks", "threads"});
  a.k_f = get_double(*node, path, "k_f", a.k_f);
  if (!(a.k_f > 0.0)) fail("audit.k_f", "must be > 0");
  auto& s = a.spec;
  s.eps_f = get_double(*node, path, "eps_f", 2.0 * a.k_f);
  s.eps_q = get_double(*node, path, "eps_q", 4.0 * a.k_f * a.k_f);
  s.p_grid = get_grid(*node, path, "p_grid", s.p_grid);
  s.delta_grid = get_grid(*node, path, "delta_grid", s.delta_grid);
  s.trials = get_uint(*node, path, "trials", s.trials);
  s.confidence = get_double(*node, path, "confidence", s.confidence);
  s.h = get_double(*node, path, "h", s.h);
  s.alpha_grid = get_grid(*node, path, "alpha_grid", s.alpha_grid);
  validated(path, [&] { s.validate(); });
  a.x = get_optional_vector(*node, path, "x");
  if (a.x && a.x->size() != problem.dimension) fail("audit.x", "length must equal problem.dimension");
  a.g = get_optional_vector(*node, path, "g");
  if (a.g && (a.g->size() != problem.dimension || std::abs(norm2(*a.g) - 1.0) > 1e-12))
    fail("audit.g", "must be a unit vector of length problem.dimension");
  if (const json* checks = find(*node, "checks")) {
    if (!checks->is_array() || checks->empty()) fail("audit.checks", "expected a nonempty array of names");
    a.checks.clear();
    for (const auto& c : *checks) {
      if (!c.is_string()) fail("audit.checks", "expected strings");
      const auto name = c.get<std::string>();
      if (name != "a1" && name != "a2" && name != "variance" && name != "generalized")
        fail("audit.checks", "unknown check '" + name + "' (expected a1, a2, variance, generalized)");
      a.checks.push_back(name);
    }
  }
  a.threads = static_cast<unsigned>(get_uint(*node, path, "threads", a.threads));
  if (a.threads == 0) fail("audit.threads", "must be >= 1");
  return a;
}

// k_f giving a 2x margin on the theta validity bound: eps_f = 2 k_f and
// theta = 2 * 4 eps_f / (M_bar' (2 - tau)).
double default_k_f(const ExperimentConfig& c) {
  switch (c.algorithm) {
    case Algorithm::DirectSearch: return c.direct_search.theta * (2.0 - c.direct_search.tau) / 16.0;
    case Algorithm::TrustRegion: {
      const auto& t = c.trust_region;
      return t.theta * std::min(1.0, tr_m_bar(t.M, t.delta_max, t.q)) * (2.0 - t.tau) / 16.0;
    }
    case Algorithm::Audit: return c.audit.k_f;
  }
  return 1.0;
}

SamplerPolicy parse_sampler(const json* node, const ExperimentConfig& c) {
  const std::string path = "sampler";
  if (!node) {
    if (c.noise.kind() == NoiseModel::Kind::None) return SamplerPolicy::fixed(1);
    if (!c.noise.declared_variance())
      fail(path, "required: the noise has no finite variance, declare a moment rule");
    return SamplerPolicy::variance_rule(*c.noise.declared_variance(), default_k_f(c));
  }
  check_keys(*node, path, {"rule", "n", "variance", "k_f", "bound", "r", "h", "eps_q", "max_samples"});
  const std::string rule = get_string(*node, path, "rule", std::nullopt);
  const std::uint64_t cap = get_uint(*node, path, "max_samples", SamplerPolicy::kDefaultMaxSamples);
  SamplerPolicy out;
  validated(path, [&] {
    if (rule == "fixed") {
      out = SamplerPolicy(SamplerPolicy::Fixed{get_uint(*node, path, "n", std::nullopt)}, cap);
    } else if (rule == "variance") {
      const auto declared = c.noise.declared_variance();
      const double v = get_double(*node, path, "variance", declared);
      out = SamplerPolicy::variance_rule(v, get_double(*node, path, "k_f", default_k_f(c)), cap);
    } else if (rule == "moment") {
      const MomentBound mb = c.noise.declared_moment();
      const double k_f = default_k_f(c);
      const double eps_q_default = c.algorithm == Algorithm::Audit ? c.audit.spec.eps_q : 4.0 * k_f * k_f;
      const double h_default = c.algorithm == Algorithm::Audit ? c.audit.spec.h : 2.0;
      out = SamplerPolicy::moment_rule(get_double(*node, path, "bound", mb.bound), get_double(*node, path, "r", mb.order),
                                       get_double(*node, path, "h", h_default),
                                       get_double(*node, path, "eps_q", eps_q_default), cap);
    } else {
      fail("sampler.rule", "expected fixed, variance or moment, got '" + rule + "'");
    }
  });
  return out;
}

json sampler_to_json(const SamplerPolicy& s) {
  json j;
  if (const auto* f = std::get_if<SamplerPolicy::Fixed>(&s.rule())) {
    j["rule"] = "fixed";
    j["n"] = f->n;
  } else if (const auto* v = std::get_if<SamplerPolicy::VarianceRule>(&s.rule())) {
    j["rule"] = "variance";
    j["variance"] = v->variance;
    j["k_f"] = v->k_f;
  } else if (const auto* m = std::get_if<SamplerPolicy::MomentRule>(&s.rule())) {
    j["rule"] = "moment";
    j["bound"] = m->bound;
    j["r"] = m->r;
    j["h"] = m->h;
    j["eps_q"] = m->eps_q;
  }
  j["max_samples"] = s.max_samples();
  return j;
}

DirectionSpec parse_directions(const json* node, std::size_t dimension) {
  DirectionSpec d;
  if (!node) return d;
  const std::string path = "directions";
  check_keys(*node, path, {"scheme", "seed", "vectors"});
  d.scheme = get_string(*node, path, "scheme", d.scheme);
  d.seed = get_uint(*node, path, "seed", d.seed);
  if (const json* vs = find(*node, "vectors")) {
    if (!vs->is_array()) fail("directions.vectors", "expected an array of vectors");
    for (const auto& v : *vs) d.vectors.push_back(to_vector(v, "directions.vectors"));
  }
  if (d.scheme == "fixed_cycle") {
    validated("directions.vectors", [&] {
      const auto gen = DirectionGenerator::fixed_cycle(d.vectors);
      if (gen.dimension() != dimension) fail("directions.vectors", "length must equal problem.dimension");
    });
  } else if (d.scheme != "quasi_random" && d.scheme != "uniform_random") {
    fail("directions.scheme", "expected quasi_random, uniform_random or fixed_cycle, got '" + d.scheme + "'");
  }
  return d;
}

json vectors_to_json(const std::vector<Vector>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(v);
  return arr;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::DirectSearch: return "direct_search";
    case Algorithm::TrustRegion: return "trust_region";
    case Algorithm::Audit: return "audit";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(root, "",
             {"schema_version", "algorithm", "problem", "noise", "sampler", "directions", "direct_search",
              "trust_region", "audit", "seeds", "output"});

  ExperimentConfig c;
  c.schema_version = static_cast<int>(get_uint(root, "", "schema_version", std::nullopt));
  if (c.schema_version != ExperimentConfig::kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                               std::to_string(ExperimentConfig::kSchemaVersion) + ")");
  c.algorithm = parse_algorithm(get_string(root, "", "algorithm", std::nullopt));

  const json* problem = find(root, "problem");
  if (!problem) fail("problem", "required");
  check_keys(*problem, "problem", {"name", "dimension", "x0"});
  c.problem.name = get_string(*problem, "problem", "name", std::nullopt);
  c.problem.dimension = get_uint(*problem, "problem", "dimension", std::nullopt);
  validated("problem", [&] { (void)ProblemRegistry::make(c.problem.name, c.problem.dimension); });
  c.problem.x0 = get_optional_vector(*problem, "problem", "x0");
  if (c.problem.x0 && c.problem.x0->size() != c.problem.dimension)
    fail("problem.x0", "length must equal problem.dimension");

  c.noise = parse_noise(find(root, "noise"));
  // The block of the selected algorithm is always parsed, so its required
  // fields are reported even when the block itself is missing.
  static const json kEmpty = json::object();
  const json* ds = find(root, "direct_search");
  const json* tr = find(root, "trust_region");
  if (!ds && c.algorithm == Algorithm::DirectSearch) ds = &kEmpty;
  if (!tr && c.algorithm == Algorithm::TrustRegion) tr = &kEmpty;
  c.direct_search = parse_direct_search(ds);
  c.trust_region = parse_trust_region(tr);
  c.audit = parse_audit(find(root, "audit"), c.problem);
  c.sampler = parse_sampler(find(root, "sampler"), c);
  c.directions = parse_directions(find(root, "directions"), c.problem.dimension);

  if (const json* seeds = find(root, "seeds")) {
    if (!seeds->is_array() || seeds->empty()) fail("seeds", "expected a nonempty array of nonnegative integers");
    c.seeds.clear();
    std::set<std::uint64_t> seen;
    for (const auto& s : *seeds) {
      if (!s.is_number_unsigned()) fail("seeds", "expected nonnegative integers");
      const auto v = s.get<std::uint64_t>();
      if (!seen.insert(v).second) fail("seeds", "duplicate seed " + std::to_string(v));
      c.seeds.push_back(v);
    }
  }

  if (const json* out = find(root, "output")) {
    check_keys(*out, "output", {"dir", "trace_csv", "summary_csv"});
    c.output.dir = get_string(*out, "output", "dir", c.output.dir);
    c.output.trace_csv = get_bool(*out, "output", "trace_csv", c.output.trace_csv);
    c.output.summary_csv = get_bool(*out, "output", "summary_csv", c.output.summary_csv);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json_text(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["algorithm"] = to_string(c.algorithm);
  j["problem"] = {{"name", c.problem.name}, {"dimension", c.problem.dimension}};
  if (c.problem.x0) j["problem"]["x0"] = *c.problem.x0;
  j["noise"] = noise_to_json(c.noise);
  j["sampler"] = sampler_to_json(c.sampler);
  j["directions"] = {
      {"scheme", c.directions.scheme}, {"seed", c.directions.seed}, {"vectors", vectors_to_json(c.directions.vectors)}};

  const auto& ds = c.direct_search;
  j["direct_search"] = {{"delta0", ds.delta0},       {"theta", ds.theta},         {"tau", ds.tau},
                        {"tau_bar", ds.tau_bar},     {"max_iters", ds.max_iters}, {"delta_floor", ds.delta_floor}};
  if (ds.eps_f_hint) j["direct_search"]["eps_f"] = *ds.eps_f_hint;

  const auto& tr = c.trust_region;
  j["trust_region"] = {{"delta0", tr.delta0},
                       {"delta_max", tr.delta_max},
                       {"theta", tr.theta},
                       {"tau", tr.tau},
                       {"tau_bar", tr.tau_bar},
                       {"hessian", tr.hessian == HessianPolicy::Zero ? "zero" : "regression_clipped"},
                       {"q", tr.q},
                       {"m", tr.m},
                       {"M", tr.M},
                       {"max_iters", tr.max_iters},
                       {"delta_floor", tr.delta_floor}};
  if (tr.eps_f_hint) j["trust_region"]["eps_f"] = *tr.eps_f_hint;

  const auto& a = c.audit;
  j["audit"] = {{"k_f", a.k_f},
                {"eps_f", a.spec.eps_f},
                {"eps_q", a.spec.eps_q},
                {"p_grid", a.spec.p_grid},
                {"delta_grid", a.spec.delta_grid},
                {"trials", a.spec.trials},
                {"confidence", a.spec.confidence},
                {"h", a.spec.h},
                {"alpha_grid", a.spec.alpha_grid},
                {"checks", a.checks},
                {"threads", a.threads}};
  if (a.x) j["audit"]["x"] = *a.x;
  if (a.g) j["audit"]["g"] = *a.g;

  j["seeds"] = c.seeds;
  j["output"] = {{"dir", c.output.dir}, {"trace_csv", c.output.trace_csv}, {"summary_csv", c.output.summary_csv}};
  return j.dump(2) + "\n";
}

}  // namespace sdfo

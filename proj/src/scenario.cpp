#include "scenario.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <thread>

#include "varsob/error.hpp"
#include "varsob/generators.hpp"
#include "varsob/verify.hpp"

namespace varsob::scenario {

using io::Json;

namespace {

double num(const Json& obj, const std::string& key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return io::read_number(obj.at(key), key);
}

double num_required(const Json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) fail(ErrorCode::parse, "missing field '" + key + "'");
  return io::read_number(obj.at(key), key);
}

std::size_t count(const Json& obj, const std::string& key, std::size_t fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(ErrorCode::parse, "field '" + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::string text(const Json& obj, const std::string& key, const std::string& fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(ErrorCode::parse, "field '" + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

// A scenario after parsing: the space, the sampled function and the raw sections.
struct Loaded {
  std::string id;
  std::optional<MetricMeasureSpace> space;
  FunctionSample u;
  Json exponents = Json::object();
  Json harness = Json::object();
  double tol = kDefaultTol;
  double sigma = kDefaultSigma;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = kDefaultSeed;
  GradientOptions gradient;

  const MetricMeasureSpace& sp() const {
    if (!space) fail(ErrorCode::parse, "scenario '" + id + "' has no space");
    return *space;
  }
  bool has(const std::string& name) const { return exponents.contains(name); }
  ExponentField field(const std::string& name, bool allow_inf = false) const {
    if (!exponents.contains(name)) fail(ErrorCode::parse, "scenario '" + id + "' needs exponent '" + name + "'");
    return io::exponent_from_json(exponents.at(name), name, sp(), allow_inf);
  }
  std::size_t center(const std::string& key = "center") const {
    if (!harness.contains(key)) return 0;
    return resolve_point(harness.at(key));
  }
  std::size_t resolve_point(const Json& c) const {
    if (c.is_number_integer()) {
      const auto i = c.get<long long>();
      if (i < 0 || static_cast<std::size_t>(i) >= sp().size()) fail(ErrorCode::parse, "point index out of range");
      return static_cast<std::size_t>(i);
    }
    if (c.is_array()) {
      if (!sp().euclidean()) fail(ErrorCode::parse, "coordinate centers need a space with coordinates");
      return nearest_point(sp(), io::read_numbers(c, "center"));
    }
    fail(ErrorCode::parse, "a point is an index or a coordinate array");
  }
  Json run_info() const {
    return Json{{"tol", tol}, {"sigma", sigma}, {"epsilon", epsilon}, {"seed", seed}};
  }
};

MetricMeasureSpace load_space(const Json& j, const RunOptions& opts) {
  if (j.is_string()) {
    std::filesystem::path p(j.get<std::string>());
    if (p.is_relative() && !opts.base_dir.empty()) p = std::filesystem::path(opts.base_dir) / p;
    return io::space_from_json(io::parse(io::read_file(p.string())));
  }
  if (j.is_object() && j.contains("kind")) return generate_space(j);
  return io::space_from_json(j);
}

FunctionSample make_function(const Json& f, const Loaded& sc) {
  const MetricMeasureSpace& sp = sc.sp();
  if (f.is_array()) {
    FunctionSample u = io::read_numbers(f, "function");
    if (u.size() != sp.size()) fail(ErrorCode::parse, "function has the wrong number of values");
    return u;
  }
  const std::string family = text(f, "family", "");
  if (family == "values") {
    FunctionSample u = io::read_numbers(f.at("values"), "values");
    if (u.size() != sp.size()) fail(ErrorCode::parse, "function has the wrong number of values");
    return u;
  }
  if (family == "constant") return FunctionSample(sp.size(), num(f, "value", 1.0));
  if (family == "coordinate") {
    const std::size_t axis = count(f, "axis", 0);
    require(sp.euclidean() && axis < sp.coords()[0].size(), "coordinate function axis out of range");
    return coordinate_function(sp, axis);
  }
  if (family == "power")
    return power_function(sp, f.contains("center") ? sc.resolve_point(f.at("center")) : 0, num_required(f, "theta"));
  if (family == "annular_cutoff")
    return annular_cutoff(sp, f.contains("center") ? sc.resolve_point(f.at("center")) : 0, num_required(f, "r_inner"),
                          num_required(f, "r_outer"));
  if (family == "log_bump")
    return log_bump(sp, f.contains("center") ? sc.resolve_point(f.at("center")) : 0, num_required(f, "radius"));
  if (family == "random") {
    const std::uint64_t seed = f.contains("seed") ? f.at("seed").get<std::uint64_t>() : sc.seed;
    return random_function(sp.size(), seed, num(f, "lo", -1.0), num(f, "hi", 1.0));
  }
  fail(ErrorCode::parse, "unknown function family '" + family + "'");
}

Loaded load(const Json& j, std::size_t index, const RunOptions& opts) {
  if (!j.is_object()) fail(ErrorCode::parse, "a scenario must be a JSON object");
  Loaded sc;
  sc.id = text(j, "id", "scenario_" + std::to_string(index));
  if (j.contains("space")) sc.space = load_space(j.at("space"), opts);
  if (j.contains("exponents")) {
    if (!j.at("exponents").is_object()) fail(ErrorCode::parse, "'exponents' must be an object");
    sc.exponents = j.at("exponents");
  }
  if (j.contains("harness")) {
    if (!j.at("harness").is_object()) fail(ErrorCode::parse, "'harness' must be an object");
    sc.harness = j.at("harness");
  }
  const Json tolerances = j.value("tolerances", Json::object());
  sc.tol = opts.tol.value_or(num(tolerances, "tol", kDefaultTol));
  sc.gradient.tol = sc.tol;
  sc.gradient.rel_gap = num(tolerances, "rel_gap", sc.gradient.rel_gap);
  if (text(sc.harness, "coefficient", "distance") == "dyadic") sc.gradient.coefficient = Coefficient::dyadic;
  sc.sigma = opts.sigma.value_or(num(sc.harness, "sigma", kDefaultSigma));
  sc.epsilon = opts.epsilon.value_or(num(sc.harness, "epsilon", kDefaultEpsilon));
  sc.seed = opts.seed.value_or(j.contains("seed") ? j.at("seed").get<std::uint64_t>() : kDefaultSeed);
  if (j.contains("function")) sc.u = make_function(j.at("function"), sc);
  if (sc.tol <= 0.0) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  return sc;
}

GradientMode parse_mode(const std::string& m) {
  if (m == "scalar" || m == "M") return GradientMode::scalar;
  if (m == "tl") return GradientMode::tl;
  if (m == "besov") return GradientMode::besov;
  fail(ErrorCode::parse, "unknown gradient mode '" + m + "'");
}

HarnessOptions harness_options(const Loaded& sc) {
  const Json& h = sc.harness;
  HarnessOptions o;
  o.sigma = sc.sigma;
  o.delta = num(h, "delta", 1.0);
  o.mode = parse_mode(text(h, "mode", "scalar"));
  if (o.mode != GradientMode::scalar) o.q = sc.field("q", true);
  if (h.contains("constant")) o.constant = io::read_number(h.at("constant"), "constant");
  o.mt_bound = num(h, "mt_bound", 2.0);
  if (h.contains("b")) o.b = io::read_number(h.at("b"), "b");
  o.clog_max = num(h, "clog_max", kInfinity);
  o.beta_factor = num(h, "beta_factor", 2.0);
  o.tol = sc.tol;
  o.gradient = sc.gradient;
  return o;
}

std::vector<std::string> theorem_list(const Json& h) {
  if (h.contains("theorems")) return h.at("theorems").get<std::vector<std::string>>();
  if (h.contains("theorem")) return {h.at("theorem").get<std::string>()};
  fail(ErrorCode::parse, "harness needs 'theorem' or 'theorems'");
}

std::vector<VerificationReport> verify_one(const Loaded& sc) {
  std::vector<VerificationReport> out;
  const Json& h = sc.harness;
  for (const std::string& th : theorem_list(h)) {
    if (th == "counterexample") {
      CounterexampleOptions o;
      o.n_dim = static_cast<int>(count(h, "n_dim", 1));
      o.beta = num(h, "beta", o.beta);
      o.p = num(h, "p", o.p);
      o.theta = num(h, "theta", o.theta);
      if (h.contains("steps")) o.steps = io::read_numbers(h.at("steps"), "steps");
      o.atom = num(h, "atom", o.atom);
      o.gradient = sc.gradient;
      out.push_back(counterexample_run(o));
      continue;
    }
    if (th == "iterative_lemma") {
      out.push_back(iterative_lemma_check(io::read_numbers(h.at("a"), "a"), num_required(h, "p"), num_required(h, "q"),
                                          num_required(h, "rho"), num_required(h, "tau")));
      continue;
    }
    const MetricMeasureSpace& sp = sc.sp();
    if (th != "lower_regularity" && sc.u.size() != sp.size()) fail(ErrorCode::parse, "scenario '" + sc.id + "' needs a function");
    if (th == "sobolev_local" || th == "moser_trudinger_local" || th == "morrey_local" || th == "localemb") {
      const auto o = harness_options(sc);
      const std::size_t x0 = sc.center();
      const double r0 = num_required(h, "radius");
      const auto s = sc.field("s"), p = sc.field("p"), q_dim = sc.field("Q");
      if (th == "sobolev_local") out.push_back(check_sobolev_local(sp, x0, r0, sc.u, s, p, q_dim, o));
      if (th == "moser_trudinger_local") out.push_back(check_moser_trudinger_local(sp, x0, r0, sc.u, s, p, q_dim, o));
      if (th == "morrey_local") out.push_back(check_morrey_local(sp, x0, r0, sc.u, s, p, q_dim, o));
      if (th == "localemb") out.push_back(localemb_check(sp, x0, r0, sc.u, s, p, q_dim, o));
    } else if (th.rfind("global_", 0) == 0) {
      const std::string which = th.substr(7);
      GlobalTheorem g;
      if (which == "bounded") g = GlobalTheorem::bounded;
      else if (which == "doubling_sob") g = GlobalTheorem::doubling_sob;
      else if (which == "doubling_mt") g = GlobalTheorem::doubling_mt;
      else if (which == "doubling_holder") g = GlobalTheorem::doubling_holder;
      else fail(ErrorCode::parse, "unknown theorem '" + th + "'");
      out.push_back(check_global(sp, sc.u, sc.field("s"), sc.field("p"), sc.field("Q"), g, harness_options(sc)));
    } else if (th == "embeddings") {
      EmbeddingInputs in{sc.field("s"), sc.field("p"), sc.field("q1", true), sc.field("q2", true), sc.field("t"),
                         sc.center(), num(h, "radius", 1.0), num(h, "delta", 1.0)};
      for (auto& r : embeddings_suite(sp, sc.u, in, sc.gradient)) out.push_back(std::move(r));
    } else if (th == "lipschitz_cutoff") {
      PointSet b = ball_members(sp, sc.center(), num_required(h, "radius"));
      std::sort(b.begin(), b.end());
      out.push_back(lipschitz_cutoff_check(sp, sc.u, b, num_required(h, "lipschitz"), sc.field("s"), sc.field("p"),
                                           sc.field("q", true), sc.tol));
    } else if (th == "norm_convention") {
      const GradientScale scale = text(h, "scale", "besov") == "tl" ? GradientScale::lp_lq : GradientScale::lq_lp;
      out.push_back(norm_convention_equivalence(sp, sc.u, sc.field("s"), sc.field("p"), sc.field("q", true), scale,
                                                sc.gradient));
    } else if (th == "gradient_zero") {
      out.push_back(gradient_zero_implies_constant(sp, sc.u, sc.field("s"), sc.field("p"), num(h, "zero_tol", 1e-9),
                                                   sc.gradient));
    } else if (th == "rel_sandwich") {
      out.push_back(rel_sandwich_check(sp, sc.u, sc.field("p"), sc.tol));
    } else if (th == "lower_regularity") {
      const RegularityProfile prof = best_lower_constant(sp, sc.field("Q"), num(h, "r_min", 0.0), num(h, "r_max", 1.0));
      VerificationReport rep;
      rep.theorem = th;
      rep.values["b_lower"] = prof.b_lower;
      rep.values["r_min"] = prof.r_min;
      rep.values["r_max"] = prof.r_max;
      rep.lhs = h.contains("b") ? num_required(h, "b") : 0.0;
      rep.rhs = prof.b_lower;
      rep.constant_used = prof.b_lower;
      rep.constant_provenance = "empirical";
      rep.conclude(0.0);
      if (!(prof.b_lower > 0.0)) rep.verdict = Verdict::fail;
      out.push_back(std::move(rep));
    } else {
      fail(ErrorCode::parse, "unknown theorem '" + th + "'");
    }
  }
  return out;
}

NecessityMode parse_necessity(const std::string& m) {
  if (m == "sobolev_global") return NecessityMode::sobolev_global;
  if (m == "sobolev_local") return NecessityMode::sobolev_local;
  if (m == "moser") return NecessityMode::moser;
  if (m == "holder") return NecessityMode::holder;
  fail(ErrorCode::parse, "unknown necessity mode '" + m + "'");
}

std::vector<VerificationReport> necessity_one(const Loaded& sc) {
  const Json& h = sc.harness;
  NecessityOptions o;
  o.mode = parse_necessity(text(h, "mode", "sobolev_global"));
  o.scale = text(h, "scale", "tl") == "besov" ? GradientScale::lq_lp : GradientScale::lp_lq;
  o.sigma = sc.sigma;
  o.omega = num(h, "omega", o.omega);
  o.mt_c1 = num(h, "mt_c1", o.mt_c1);
  o.epsilon = sc.epsilon;
  o.r_max = num(h, "r_max", o.r_max);
  o.max_centers = count(h, "max_centers", o.max_centers);
  o.max_radii = count(h, "max_radii", o.max_radii);
  o.cutoffs = static_cast<int>(count(h, "cutoffs", static_cast<std::size_t>(o.cutoffs)));
  o.atom_factor = num(h, "atom_factor", o.atom_factor);
  o.tol = sc.tol;
  const auto s = sc.field("s"), p = sc.field("p"), q = sc.field("q", true);
  std::optional<ExponentField> target;
  if (o.mode == NecessityMode::holder) {
    target = sc.field("alpha");
  } else if (o.mode != NecessityMode::moser) {
    target = sc.has("gamma") ? sc.field("gamma") : sobolev_conjugate(sc.field("Q"), s, p);
  }
  return {necessity_run(sc.sp(), s, p, q, target, o)};
}

Json norm_one(const Loaded& sc) {
  const MetricMeasureSpace& sp = sc.sp();
  if (sc.u.size() != sp.size()) fail(ErrorCode::parse, "scenario '" + sc.id + "' needs a function");
  const ExponentField p = sc.field("p");
  const NormValue v = luxemburg(sp, sc.u, p, sc.tol);
  Json j;
  j["scenario"] = sc.id;
  j["norm"] = io::norm_to_json(v);
  j["modular"] = io::number(modular(sp, sc.u, p));
  j["unit_norm"] = io::number(unit_norm(sp, p, sc.tol));
  j["sup_norm"] = io::number(sup_norm(sc.u));
  j["run"] = sc.run_info();
  return j;
}

Json gradient_one(const Loaded& sc) {
  const MetricMeasureSpace& sp = sc.sp();
  if (sc.u.size() != sp.size()) fail(ErrorCode::parse, "scenario '" + sc.id + "' needs a function");
  const HarnessOptions o = harness_options(sc);
  const GradientSolution g = minimal_gradient(sp, sc.u, sc.field("s"), sc.field("p"), o);
  Json j;
  j["scenario"] = sc.id;
  j["mode"] = to_string(o.mode);
  j["solution"] = io::gradient_to_json(g);
  j["run"] = sc.run_info();
  return j;
}

}  // namespace

RunOptions options_from_json(const Json& j) {
  RunOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) fail(ErrorCode::parse, "options must be a JSON object");
  if (j.contains("tol")) o.tol = io::read_number(j.at("tol"), "tol");
  if (j.contains("sigma")) o.sigma = io::read_number(j.at("sigma"), "sigma");
  if (j.contains("epsilon")) o.epsilon = io::read_number(j.at("epsilon"), "epsilon");
  if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("jobs")) o.jobs = j.at("jobs").get<unsigned>();
  if (j.contains("base_dir")) o.base_dir = j.at("base_dir").get<std::string>();
  return o;
}

MetricMeasureSpace generate_space(const Json& params) {
  const std::string kind = text(params, "kind", "");
  auto positive = [](double v, const char* what) {
    require(v > 0.0 && std::isfinite(v), std::string(what) + " must be positive");
    return v;
  };
  if (kind == "grid1d") {
    const std::size_t n = count(params, "n", 8);
    return grid1d(n, positive(num(params, "h", 1.0 / static_cast<double>(std::max<std::size_t>(n, 1))), "h"));
  }
  if (kind == "grid2d") {
    const std::size_t nx = count(params, "nx", 8), ny = count(params, "ny", nx);
    return grid2d(nx, ny, positive(num(params, "h", 1.0 / static_cast<double>(std::max<std::size_t>(nx, 1))), "h"));
  }
  if (kind == "ball_grid_with_atom")
    return ball_grid_with_atom(static_cast<int>(count(params, "n_dim", 1)), positive(num(params, "h", 1.0 / 16), "h"),
                               positive(num(params, "atom", 1.0), "atom"))
        .space;
  if (kind == "cantor")
    return cantor(static_cast<int>(count(params, "level", 3)), positive(num(params, "ratio", 1.0 / 3.0), "ratio"));
  if (kind == "two_zone_glued")
    return two_zone_glued(count(params, "n", 8), positive(num(params, "dim_left", 1.0), "dim_left"),
                          positive(num(params, "dim_right", 2.0), "dim_right"))
        .space;
  fail(ErrorCode::invalid_argument, "unknown space kind '" + kind + "'");
}

RunResult run(const std::string& command, const Json& input, const RunOptions& opts) {
  if (command != "norm" && command != "gradient" && command != "verify" && command != "necessity")
    fail(ErrorCode::invalid_argument, "unknown command '" + command + "'");
  const bool batch = input.is_object() && input.contains("scenarios");
  const Json items = batch ? input.at("scenarios") : Json::array({input});
  if (!items.is_array()) fail(ErrorCode::parse, "'scenarios' must be an array");

  const std::size_t n = items.size();
  std::vector<Json> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<char> passed(n, 1);
  auto work = [&](std::size_t i) {
    try {
      const Loaded sc = load(items[i], i, opts);
      if (command == "norm") {
        results[i] = norm_one(sc);
      } else if (command == "gradient") {
        results[i] = gradient_one(sc);
      } else {
        auto reports = command == "verify" ? verify_one(sc) : necessity_one(sc);
        Json arr = Json::array();
        for (auto& r : reports) {
          r.scenario = sc.id;
          if (r.verdict == Verdict::fail) passed[i] = 0;
          Json rj = io::report_to_json(r);
          rj["run"] = sc.run_info();
          arr.push_back(std::move(rj));
        }
        results[i] = std::move(arr);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunResult out;
  out.all_pass = std::all_of(passed.begin(), passed.end(), [](char c) { return c != 0; });
  if (command == "verify" || command == "necessity") {
    out.output = Json::array();
    for (auto& r : results)
      for (auto& x : r) out.output.push_back(std::move(x));
  } else if (batch) {
    out.output = Json::array();
    for (auto& r : results) out.output.push_back(std::move(r));
  } else {
    out.output = std::move(results[0]);
  }
  return out;
}

}  // namespace varsob::scenario

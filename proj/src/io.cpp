#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "varsob/error.hpp"

namespace varsob::io {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "infinity") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  fail(ErrorCode::parse, "field '" + what + "' must be a number");
}

std::vector<double> read_numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorCode::parse, "field '" + what + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(read_number(v, what));
  return out;
}

Json space_to_json(const MetricMeasureSpace& space) {
  Json j;
  j["n"] = space.size();
  Json metric;
  if (space.euclidean()) {
    metric["type"] = "euclidean";
    metric["coords"] = space.coords();
  } else {
    metric["type"] = "matrix";
    Json rows = Json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
      Json row = Json::array();
      for (std::size_t k = 0; k < space.size(); ++k) row.push_back(space.distance(i, k));
      rows.push_back(std::move(row));
    }
    metric["values"] = std::move(rows);
  }
  j["metric"] = std::move(metric);
  j["weights"] = space.weights();
  if (!space.labels().empty()) j["labels"] = space.labels();
  return j;
}

MetricMeasureSpace space_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::parse, "space must be a JSON object");
  if (!j.contains("metric") || !j.contains("weights")) fail(ErrorCode::parse, "space needs 'metric' and 'weights'");
  const Json& metric = j.at("metric");
  const std::string type = metric.value("type", "");
  std::vector<double> weights = read_numbers(j.at("weights"), "weights");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  auto rows = [](const Json& m, const std::string& what) {
    if (!m.is_array()) fail(ErrorCode::parse, "'" + what + "' must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (const auto& r : m) out.push_back(read_numbers(r, what));
    return out;
  };
  MetricMeasureSpace space;
  if (type == "euclidean") {
    space = MetricMeasureSpace::from_coords(rows(metric.at("coords"), "coords"), std::move(weights), std::move(labels));
  } else if (type == "matrix") {
    space = MetricMeasureSpace::from_matrix(rows(metric.at("values"), "values"), std::move(weights), std::move(labels));
  } else {
    fail(ErrorCode::parse, "metric type must be 'euclidean' or 'matrix'");
  }
  if (j.contains("n") && j.at("n").get<std::size_t>() != space.size())
    fail(ErrorCode::parse, "'n' does not match the number of points");
  return space;
}

Json exponent_to_json(const ExponentField& f) {
  Json values = Json::array();
  for (double v : f.values()) values.push_back(number(v));
  return Json{{"name", f.name()}, {"values", std::move(values)}};
}

ExponentField exponent_from_json(const Json& j, const std::string& name, const MetricMeasureSpace& space,
                                 bool allow_infinity) {
  const std::size_t n = space.size();
  if (j.is_number() || j.is_string()) return ExponentField::constant(name, n, read_number(j, name), allow_infinity);
  if (!j.is_object()) fail(ErrorCode::parse, "exponent '" + name + "' must be a number or an object");
  const std::string label = j.value("name", name);
  if (j.contains("values")) {
    std::vector<double> v = read_numbers(j.at("values"), name);
    if (v.size() != n) fail(ErrorCode::parse, "exponent '" + name + "' has the wrong number of values");
    return ExponentField(label, std::move(v), allow_infinity);
  }
  if (j.contains("formula")) {
    const Json& f = j.at("formula");
    FormulaSpec spec;
    spec.type = f.value("type", "");
    if (f.contains("value")) spec.value = read_number(f.at("value"), name + ".value");
    spec.axis = f.value("axis", std::size_t{0});
    if (f.contains("offset")) spec.offset = read_number(f.at("offset"), name + ".offset");
    if (f.contains("slope")) spec.slope = read_number(f.at("slope"), name + ".slope");
    if (f.contains("inside")) spec.inside = read_number(f.at("inside"), name + ".inside");
    if (f.contains("outside")) spec.outside = read_number(f.at("outside"), name + ".outside");
    if (f.contains("zone")) spec.zone = f.at("zone").get<PointSet>();
    return expand_formula(label, spec, space, allow_infinity);
  }
  fail(ErrorCode::parse, "exponent '" + name + "' needs 'values' or 'formula'");
}

Json report_to_json(const VerificationReport& rep) {
  Json j;
  j["theorem"] = rep.theorem;
  j["scenario"] = rep.scenario;
  Json hyps = Json::array();
  for (const auto& h : rep.hypotheses) hyps.push_back({{"name", h.name}, {"holds", h.holds}, {"diagnostics", h.diagnostics}});
  j["hypotheses"] = std::move(hyps);
  j["hypotheses_ok"] = rep.hypotheses_ok();
  j["lhs"] = number(rep.lhs);
  j["rhs"] = number(rep.rhs);
  j["constant_used"] = number(rep.constant_used);
  j["constant_provenance"] = rep.constant_provenance;
  j["margin"] = number(rep.margin);
  j["slack"] = number(rep.slack);
  j["verdict"] = to_string(rep.verdict);
  j["pass"] = rep.pass();
  Json values = Json::object();
  for (const auto& [k, v] : rep.values) values[k] = number(v);
  j["values"] = std::move(values);
  j["notes"] = rep.notes;
  return j;
}

Json norm_to_json(const NormValue& v) {
  return Json{{"value", number(v.value)}, {"tolerance", number(v.tolerance)}, {"kind", to_string(v.kind)}};
}

Json gradient_to_json(const GradientSolution& g) {
  Json j;
  j["objective"] = number(g.objective.value);
  j["lower_bound"] = number(g.lower_bound);
  j["certificate"] = number(g.certificate);
  j["heuristic"] = g.heuristic;
  j["converged"] = g.converged;
  j["solves"] = g.solves;
  j["iterations"] = g.iterations;
  if (g.vector) {
    Json levels = Json::array();
    for (const auto& lev : g.levels.levels) levels.push_back(lev);
    j["g"] = Json{{"k_min", g.levels.k_min}, {"levels", std::move(levels)}};
  } else {
    j["g"] = g.g;
  }
  return j;
}

Json profile_to_json(const RegularityProfile& prof) {
  Json j;
  j["Q"] = prof.q_dim;
  j["b_lower"] = number(prof.b_lower);
  j["b_upper"] = prof.b_upper ? number(*prof.b_upper) : Json(nullptr);
  j["r_min"] = number(prof.r_min);
  j["r_max"] = number(prof.r_max);
  Json w = Json::array();
  for (const auto& x : prof.witnesses)
    w.push_back({{"center", x.center}, {"radius", number(x.radius)}, {"ratio", number(x.ratio)}});
  j["witnesses"] = std::move(w);
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(const Json& j) {
  if (j.is_number()) return format_double(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return "";
}

}  // namespace

std::string reports_to_csv(const Json& reports) {
  if (!reports.is_array()) fail(ErrorCode::parse, "reports must be a JSON array");
  std::ostringstream out;
  out << "scenario,theorem,hypotheses_ok,lhs,rhs,constant,pass\n";
  for (const auto& r : reports) {
    const std::string verdict = r.value("verdict", "");
    out << csv_field(r.value("scenario", "")) << ',' << csv_field(r.value("theorem", "")) << ','
        << (r.value("hypotheses_ok", false) ? "true" : "false") << ',' << csv_number(r.value("lhs", Json()))
        << ',' << csv_number(r.value("rhs", Json())) << ',' << csv_number(r.value("constant_used", Json())) << ','
        << (verdict == "pass" ? "true" : verdict == "fail" ? "false" : "na") << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::parse, std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::io, "cannot rename onto '" + path + "'");
  }
}

}  // namespace varsob::io

#pragma once

// JSON and CSV encoding of spaces, exponents and reports. Keys are sorted (nlohmann::json uses std::map), doubles
// are written in shortest round-trip form, and non-finite values become the strings "inf", "-inf" and "nan".

#include <string>
#include <vector>

#include <json.hpp>

#include "varsob/hajlasz.hpp"
#include "varsob/metric_space.hpp"
#include "varsob/regularity.hpp"
#include "varsob/report.hpp"

namespace varsob::io {

using Json = nlohmann::json;

Json number(double v);
// Accepts numbers and the non-finite strings; `what` names the field in the error.
double read_number(const Json& j, const std::string& what);
std::vector<double> read_numbers(const Json& j, const std::string& what);

Json space_to_json(const MetricMeasureSpace& space);
MetricMeasureSpace space_from_json(const Json& j);

Json exponent_to_json(const ExponentField& f);
// Plain number (constant), {"values": [...]} or {"formula": {...}}.
ExponentField exponent_from_json(const Json& j, const std::string& name, const MetricMeasureSpace& space,
                                 bool allow_infinity = false);

Json report_to_json(const VerificationReport& rep);
Json norm_to_json(const NormValue& v);
Json gradient_to_json(const GradientSolution& g);
Json profile_to_json(const RegularityProfile& prof);

// CSV with columns scenario,theorem,hypotheses_ok,lhs,rhs,constant,pass; rows in input order.
std::string reports_to_csv(const Json& reports);

std::string format_double(double v);
std::string dump(const Json& j);
Json parse(const std::string& text);

std::string read_file(const std::string& path);
// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace varsob::io

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace varsob {

enum class Verdict { pass, fail, not_applicable };

const char* to_string(Verdict v);

struct Hypothesis {
  std::string name;
  bool holds = false;
  std::string diagnostics;
};

// Additive slack used by every "<=" assertion: 1e-8 + 1e-6 * |rhs|.
inline double default_slack(double rhs) { return 1e-8 + 1e-6 * std::fabs(rhs); }

// One inequality check: hypotheses, both sides, the constant that was used and the verdict.
struct VerificationReport {
  std::string theorem;
  std::string scenario;
  std::vector<Hypothesis> hypotheses;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_used = std::numeric_limits<double>::quiet_NaN();
  std::string constant_provenance = "none";  // empirical | formula | supplied | none
  double margin = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::not_applicable;
  std::map<std::string, double> values;
  std::map<std::string, std::string> notes;

  void add_hypothesis(std::string name, bool holds, std::string diagnostics = {}) {
    hypotheses.push_back({std::move(name), holds, std::move(diagnostics)});
  }
  bool hypotheses_ok() const {
    for (const auto& h : hypotheses)
      if (!h.holds) return false;
    return true;
  }
  bool pass() const { return verdict == Verdict::pass; }
  bool applicable() const { return verdict != Verdict::not_applicable; }

  // Sets margin = rhs - lhs and the verdict. Failing hypotheses give not_applicable.
  void conclude(double slack_value) {
    slack = slack_value;
    margin = rhs - lhs;
    if (!hypotheses_ok()) {
      verdict = Verdict::not_applicable;
    } else {
      verdict = (margin >= -slack && !std::isnan(margin)) ? Verdict::pass : Verdict::fail;
    }
  }
  void conclude() { conclude(default_slack(rhs)); }
};

}  // namespace varsob

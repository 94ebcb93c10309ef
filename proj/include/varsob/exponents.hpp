#pragma once

#include <limits>
#include <string>
#include <vector>

#include "varsob/metric_space.hpp"

namespace varsob {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Per-point values of a variable exponent. Only fields that allow it (q) may carry +inf.
class ExponentField {
 public:
  ExponentField() = default;
  ExponentField(std::string name, std::vector<double> values, bool allow_infinity = false);
  static ExponentField constant(std::string name, std::size_t n, double value, bool allow_infinity = false);

  const std::string& name() const { return name_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  double inf() const { return inf_; }
  double sup() const { return sup_; }
  bool has_infinity() const { return sup_ == kInfinity; }
  bool is_constant() const { return inf_ == sup_; }

  ExponentField restrict_to(const PointSet& points) const;

 private:
  std::string name_;
  std::vector<double> values_;
  double inf_ = 0.0;
  double sup_ = 0.0;
};

struct Bounds {
  double inf = 0.0;
  double sup = 0.0;
};

Bounds restricted_bounds(const ExponentField& f, const PointSet& points);
bool strictly_dominates(const ExponentField& f, const ExponentField& g);
// Index of the first point where f - g attains its minimum.
std::size_t dominance_witness(const ExponentField& f, const ExponentField& g);

double log_holder_constant(const ExponentField& f, const MetricMeasureSpace& space);
ExponentField reciprocal(const ExponentField& f);
double log_holder_constant_reciprocal(const ExponentField& f, const MetricMeasureSpace& space);

struct LoglemmaReport {
  double c_log_reciprocal = 0.0;  // C_log(1/t) on the ball
  double m_constant = 1.0;        // max{1, (2r)^{2/t_B^-}, e^{C_log(1/t)}}
  bool hypothesis_radius = false;  // R >= 2 * radius
  // Worst multiplicative margins (>= 1 means the inequality holds) for parts (i)-(iii).
  double margin_i = 0.0;
  double margin_ii = 0.0;
  double margin_iii = 0.0;
  bool pass = false;
};

LoglemmaReport loglemma_bounds(const ExponentField& t, const MetricMeasureSpace& space, const Ball& b, double big_r);
double loglemma_constant(double radius, double t_minus_on_ball, double c_log_reciprocal);

ExponentField sobolev_conjugate(const ExponentField& q_dim, const ExponentField& s, const ExponentField& p);
ExponentField holder_exponent(const ExponentField& q_dim, const ExponentField& s, const ExponentField& p);
ExponentField conjugate(const ExponentField& p);
// Pointwise s*p.
ExponentField product(const ExponentField& a, const ExponentField& b, std::string name);

// Formula specs expanded against a space.
struct FormulaSpec {
  std::string type;  // constant | affine | two_zone
  double value = 0.0;
  std::size_t axis = 0;
  double offset = 0.0;
  double slope = 0.0;
  double inside = 0.0;
  double outside = 0.0;
  PointSet zone;
};

ExponentField expand_formula(const std::string& name, const FormulaSpec& spec, const MetricMeasureSpace& space,
                             bool allow_infinity = false);

}  // namespace varsob

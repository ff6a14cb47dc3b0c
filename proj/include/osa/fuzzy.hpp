#ifndef OSA_FUZZY_HPP
#define OSA_FUZZY_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osa/error.hpp"

namespace osa {

enum class MfShape { triangle, trapezoid };

/// Piecewise-linear membership function. A triangle (a, b, c) is stored as the
/// trapezoid (a, b, b, c) so both shapes share one evaluation path.
class MembershipFunction {
 public:
  static MembershipFunction triangle(double a, double b, double c) {
    return MembershipFunction(MfShape::triangle, {a, b, b, c});
  }

  static MembershipFunction trapezoid(double a, double b, double c, double d) {
    return MembershipFunction(MfShape::trapezoid, {a, b, c, d});
  }

  /// Builds from a breakpoint list: 3 values make a triangle, 4 a trapezoid.
  static MembershipFunction from_breakpoints(const std::vector<double>& p) {
    if (p.size() == 3) return triangle(p[0], p[1], p[2]);
    if (p.size() == 4) return trapezoid(p[0], p[1], p[2], p[3]);
    throw ConfigError("membership function needs 3 (triangle) or 4 (trapezoid) breakpoints, got " +
                      std::to_string(p.size()));
  }

  MfShape shape() const noexcept { return shape_; }

  /// Breakpoints as given at construction (3 for triangle, 4 for trapezoid).
  std::vector<double> breakpoints() const {
    if (shape_ == MfShape::triangle) return {p_[0], p_[1], p_[3]};
    return {p_[0], p_[1], p_[2], p_[3]};
  }

  double support_lo() const noexcept { return p_[0]; }
  double support_hi() const noexcept { return p_[3]; }

  /// Degree of membership of x. Zero-width edges take their plateau value at
  /// the shared point.
  double operator()(double x) const noexcept {
    const auto [a, b, c, d] = p_;
    if (x < a || x > d) return 0.0;
    double y = 1.0;
    if (x < b) {
      y = (x - a) / (b - a);
    } else if (x > c) {
      y = (d - x) / (d - c);
    }
    return std::clamp(y, 0.0, 1.0);
  }

  /// Smallest nonzero edge width; the Lipschitz constant is its reciprocal.
  double min_edge_width() const noexcept {
    double w = 0.0;
    for (double e : {p_[1] - p_[0], p_[3] - p_[2]}) {
      if (e > 0.0 && (w == 0.0 || e < w)) w = e;
    }
    return w;
  }

  bool operator==(const MembershipFunction&) const = default;

 private:
  MembershipFunction(MfShape shape, std::array<double, 4> p) : shape_(shape), p_(p) {
    if (!std::is_sorted(p_.begin(), p_.end())) throw ConfigError("breakpoints not ordered");
  }

  MfShape shape_;
  std::array<double, 4> p_;
};

inline double eval_mf(const MembershipFunction& mf, double x) noexcept { return mf(x); }

struct Level {
  std::string label;
  MembershipFunction mf;

  bool operator==(const Level&) const = default;
};

/// Per-label degrees for one crisp input, in the owning variable's label order.
struct FuzzifiedInput {
  std::vector<std::string> labels;
  std::vector<double> degrees;

  double degree(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return degrees[i];
    }
    throw ConfigError("unknown label '" + std::string(label) + "'");
  }

  double sum() const noexcept {
    double s = 0.0;
    for (double d : degrees) s += d;
    return s;
  }
};

class LinguisticVariable {
 public:
  LinguisticVariable(std::string name, double lo, double hi, std::vector<Level> levels)
      : name_(std::move(name)), lo_(lo), hi_(hi), levels_(std::move(levels)) {
    validate();
  }

  const std::string& name() const noexcept { return name_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i].label == label) return i;
    }
    throw ConfigError("variable '" + name_ + "' has no label '" + std::string(label) + "'");
  }

  bool has_label(std::string_view label) const noexcept {
    return std::any_of(levels_.begin(), levels_.end(), [&](const Level& l) { return l.label == label; });
  }

  double clamp(double x) const noexcept { return std::clamp(x, lo_, hi_); }

  /// Singleton fuzzification; x is clamped to the domain first.
  FuzzifiedInput fuzzify(double x) const {
    FuzzifiedInput out;
    out.labels.reserve(levels_.size());
    out.degrees.reserve(levels_.size());
    const double xc = clamp(x);
    for (const auto& level : levels_) {
      out.labels.push_back(level.label);
      out.degrees.push_back(level.mf(xc));
    }
    return out;
  }

  /// Copy with one level's membership function replaced.
  LinguisticVariable with_level(std::string_view label, const MembershipFunction& mf) const {
    auto levels = levels_;
    levels[index_of(label)].mf = mf;
    return LinguisticVariable(name_, lo_, hi_, std::move(levels));
  }

  bool operator==(const LinguisticVariable&) const = default;

 private:
  void validate() const {
    if (!(lo_ < hi_)) throw ConfigError("variable '" + name_ + "': domain lower bound must be below upper bound");
    if (levels_.empty()) throw ConfigError("variable '" + name_ + "' has no levels");
    std::set<std::string> seen;
    std::vector<double> points{lo_, hi_};
    for (const auto& level : levels_) {
      if (!seen.insert(level.label).second) {
        throw ConfigError("variable '" + name_ + "': duplicate label '" + level.label + "'");
      }
      for (double p : level.mf.breakpoints()) {
        if (p < lo_ || p > hi_) {
          throw ConfigError("variable '" + name_ + "': breakpoint of '" + level.label + "' outside domain");
        }
        points.push_back(p);
      }
    }
    // Between consecutive breakpoints every MF is either positive throughout
    // or zero throughout, so breakpoints plus midpoints decide coverage.
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<double> probes = points;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) probes.push_back(0.5 * (points[i] + points[i + 1]));
    for (double x : probes) {
      const bool covered =
          std::any_of(levels_.begin(), levels_.end(), [x](const Level& l) { return l.mf(x) > 0.0; });
      if (!covered) {
        throw ConfigError("variable '" + name_ + "': no level covers x=" + std::to_string(x));
      }
    }
  }

  std::string name_;
  double lo_;
  double hi_;
  std::vector<Level> levels_;
};

inline FuzzifiedInput fuzzify(const LinguisticVariable& var, double x) { return var.fuzzify(x); }

/// Discrete centroid sum(x_i mu(x_i)) / sum(mu(x_i)) over `samples` evenly
/// spaced points of [lo, hi].
inline double discrete_centroid(const MembershipFunction& mf, double lo, double hi, std::size_t samples = 1001) {
  if (samples < 2 || !(lo < hi)) throw DomainError("centroid needs at least 2 samples over a non-empty interval");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double mu = mf(x);
    num += x * mu;
    den += mu;
  }
  if (den == 0.0) throw DomainError("centroid of an empty fuzzy set is undefined");
  return num / den;
}

// Default three-level partitions of the input descriptors.

inline LinguisticVariable default_utilization_variable() {
  return LinguisticVariable("utilization", 0.0, 100.0,
                            {{"Low", MembershipFunction::trapezoid(0, 0, 25, 50)},
                             {"Moderate", MembershipFunction::triangle(25, 50, 75)},
                             {"High", MembershipFunction::trapezoid(50, 75, 100, 100)}});
}

inline LinguisticVariable default_mobility_variable() {
  return LinguisticVariable("mobility", 0.0, 10.0,
                            {{"Low", MembershipFunction::trapezoid(0, 0, 2.5, 5)},
                             {"Moderate", MembershipFunction::triangle(2.5, 5, 7.5)},
                             {"High", MembershipFunction::trapezoid(5, 7.5, 10, 10)}});
}

inline LinguisticVariable default_distance_variable() {
  return LinguisticVariable("distance", 0.0, 10.0,
                            {{"Near", MembershipFunction::trapezoid(0, 0, 2.5, 5)},
                             {"Moderate", MembershipFunction::triangle(2.5, 5, 7.5)},
                             {"Far", MembershipFunction::trapezoid(5, 7.5, 10, 10)}});
}

}  // namespace osa

#endif  // OSA_FUZZY_HPP

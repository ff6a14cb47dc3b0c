#ifndef OSA_FLS_HPP
#define OSA_FLS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osa/error.hpp"
#include "osa/fuzzy.hpp"

namespace osa {

enum class TNorm { product, minimum };

struct FuzzyRule {
  std::array<std::string, 3> antecedents;
  std::string consequent_label;
  double centroid = 0.0;

  bool operator==(const FuzzyRule&) const = default;
};

struct RuleBase {
  std::vector<FuzzyRule> rules;

  std::size_t size() const noexcept { return rules.size(); }
  bool operator==(const RuleBase&) const = default;
};

/// The five-level consequence ("possibility") variable on [0, 100]. Each level
/// has a centroid; when a membership function is supplied the centroid is the
/// discrete centroid of that function instead.
struct ConsequenceLevel {
  std::string label;
  double centroid = 0.0;
  std::optional<MembershipFunction> mf;

  double effective_centroid() const {
    return mf ? discrete_centroid(*mf, 0.0, 100.0) : centroid;
  }

  bool operator==(const ConsequenceLevel&) const = default;
};

inline std::vector<ConsequenceLevel> default_consequence_levels() {
  return {{"VeryLow", 10.0, std::nullopt},
          {"Low", 30.0, std::nullopt},
          {"Medium", 50.0, std::nullopt},
          {"High", 70.0, std::nullopt},
          {"VeryHigh", 90.0, std::nullopt}};
}

/// Vote-weighted average of consequence centroids: sum(w_i c_i) / sum(w_i).
inline double avg_centroid(const std::map<std::string, double>& label_counts,
                           const std::map<std::string, double>& level_centroids) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& [label, count] : label_counts) {
    if (count < 0.0) throw DomainError("negative vote count for '" + label + "'");
    if (count == 0.0) continue;
    auto it = level_centroids.find(label);
    if (it == level_centroids.end()) throw ConfigError("unknown consequence label '" + label + "'");
    num += count * it->second;
    den += count;
  }
  if (den == 0.0) throw DomainError("average centroid undefined: all counts are zero");
  return num / den;
}

/// 27-rule knowledge base: labels of the published rule table, centroids of
/// the published per-rule averages. Rule l (1-based) has antecedent indices
/// (utilization, mobility, distance) = ((l-1)/9, (l-1)/3 % 3, (l-1) % 3).
inline RuleBase build_paper_rulebase() {
  static constexpr std::array<const char*, 3> kUtil{"Low", "Moderate", "High"};
  static constexpr std::array<const char*, 3> kMob{"Low", "Moderate", "High"};
  static constexpr std::array<const char*, 3> kDist{"Near", "Moderate", "Far"};
  static constexpr std::array<const char*, 27> kConsequent{
      "VeryLow", "Low",     "Low",     "VeryLow", "Low",  "Medium",   "VeryLow", "Low",  "Medium",
      "VeryLow", "Medium",  "High",    "VeryLow", "Medium", "High",   "VeryLow", "Low",  "High",
      "Low",     "High",    "VeryHigh", "Low",    "High", "VeryHigh", "VeryLow", "High", "High"};
  static constexpr std::array<double, 27> kCentroid{
      28.59, 25.90, 24.23, 22.43, 22.98, 24.68, 16.95, 19.70, 22.06,
      43.08, 40.20, 38.98, 40.89, 38.47, 39.16, 36.50, 34.15, 40.26,
      58.62, 55.12, 54.75, 56.99, 53.81, 53.92, 54.05, 53.72, 52.12};

  RuleBase rb;
  rb.rules.reserve(27);
  for (std::size_t l = 0; l < 27; ++l) {
    rb.rules.push_back({{kUtil[l / 9], kMob[(l / 3) % 3], kDist[l % 3]}, kConsequent[l], kCentroid[l]});
  }
  return rb;
}

/// Combines antecedent degrees with the chosen T-norm.
inline double combine(TNorm t, double a, double b, double c) noexcept {
  return t == TNorm::product ? a * b * c : std::min({a, b, c});
}

inline double firing_strength(const FuzzyRule& rule, std::span<const FuzzifiedInput, 3> fuzzified,
                              TNorm tnorm = TNorm::product) {
  return combine(tnorm, fuzzified[0].degree(rule.antecedents[0]), fuzzified[1].degree(rule.antecedents[1]),
                 fuzzified[2].degree(rule.antecedents[2]));
}

struct DescriptorVector {
  double utilization_efficiency = 0.0;  // percent, [0, 100]
  double mobility = 0.0;                // [0, 10]
  double distance = 0.0;                // normalized, [0, 10]

  std::array<double, 3> as_array() const noexcept { return {utilization_efficiency, mobility, distance}; }
  bool operator==(const DescriptorVector&) const = default;
};

/// Three-input fuzzy logic system with center-of-sets defuzzification.
/// Immutable after construction.
class FlsEngine {
 public:
  using Variables = std::array<LinguisticVariable, 3>;

  FlsEngine(Variables variables, RuleBase rulebase, TNorm tnorm = TNorm::product)
      : vars_(std::move(variables)), rulebase_(std::move(rulebase)), tnorm_(tnorm) {
    if (rulebase_.rules.empty()) throw ConfigError("rule base is empty");
    index_.reserve(rulebase_.rules.size());
    for (const auto& rule : rulebase_.rules) {
      std::array<std::size_t, 3> idx{};
      for (std::size_t k = 0; k < 3; ++k) idx[k] = vars_[k].index_of(rule.antecedents[k]);
      if (rule.centroid < 0.0 || rule.centroid > 100.0) {
        throw ConfigError("rule centroid " + std::to_string(rule.centroid) + " outside [0, 100]");
      }
      index_.push_back(idx);
    }
  }

  /// Default partitions, paper rule base, product T-norm.
  static FlsEngine paper_default() {
    return FlsEngine({default_utilization_variable(), default_mobility_variable(), default_distance_variable()},
                     build_paper_rulebase());
  }

  const Variables& variables() const noexcept { return vars_; }
  const RuleBase& rulebase() const noexcept { return rulebase_; }
  TNorm tnorm() const noexcept { return tnorm_; }

  std::array<FuzzifiedInput, 3> fuzzify(const DescriptorVector& d) const {
    const auto x = d.as_array();
    return {vars_[0].fuzzify(x[0]), vars_[1].fuzzify(x[1]), vars_[2].fuzzify(x[2])};
  }

  /// Firing strength of every rule, in rule order.
  std::vector<double> firing_strengths(const DescriptorVector& d) const {
    const auto f = fuzzify(d);
    std::vector<double> out;
    out.reserve(index_.size());
    for (const auto& idx : index_) {
      out.push_back(combine(tnorm_, f[0].degrees[idx[0]], f[1].degrees[idx[1]], f[2].degrees[idx[2]]));
    }
    return out;
  }

  /// Possibility that a user with descriptors d is granted spectrum.
  double infer(const DescriptorVector& d) const {
    const auto x = d.as_array();
    std::array<std::vector<double>, 3> deg;
    for (std::size_t k = 0; k < 3; ++k) {
      const double xc = vars_[k].clamp(x[k]);
      deg[k].reserve(vars_[k].size());
      for (const auto& level : vars_[k].levels()) deg[k].push_back(level.mf(xc));
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = 0; l < index_.size(); ++l) {
      const auto& idx = index_[l];
      const double w = combine(tnorm_, deg[0][idx[0]], deg[1][idx[1]], deg[2][idx[2]]);
      num += w * rulebase_.rules[l].centroid;
      den += w;
    }
    if (den <= 0.0) throw DomainError("no rule fired; the rule base does not cover this input");
    return num / den;
  }

 private:
  Variables vars_;
  RuleBase rulebase_;
  TNorm tnorm_;
  std::vector<std::array<std::size_t, 3>> index_;
};

/// Checks that a rule base is the complete label grid of the given variables:
/// one rule per label triple, no duplicates.
inline void require_complete_rulebase(const FlsEngine::Variables& vars, const RuleBase& rb) {
  const std::size_t expected = vars[0].size() * vars[1].size() * vars[2].size();
  std::set<std::array<std::string, 3>> seen;
  for (const auto& rule : rb.rules) {
    for (std::size_t k = 0; k < 3; ++k) vars[k].index_of(rule.antecedents[k]);
    if (!seen.insert(rule.antecedents).second) {
      throw ConfigError("rulebase has duplicate rule " + rule.antecedents[0] + "," + rule.antecedents[1] + "," +
                        rule.antecedents[2]);
    }
  }
  if (seen.size() != expected) {
    throw ConfigError("rulebase incomplete: " + std::to_string(seen.size()) + " of " + std::to_string(expected) +
                      " rules");
  }
}

struct Selection {
  std::size_t index = 0;
  std::vector<double> possibilities;
};

/// Argmax of possibility over candidates; ties go to the lowest index.
inline std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw DomainError("cannot select from an empty candidate list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

inline Selection select_user(const FlsEngine& engine, std::span<const DescriptorVector> descriptors) {
  if (descriptors.empty()) throw DomainError("cannot select from an empty candidate list");
  Selection s;
  s.possibilities.reserve(descriptors.size());
  for (const auto& d : descriptors) s.possibilities.push_back(engine.infer(d));
  s.index = argmax_first(s.possibilities);
  return s;
}

}  // namespace osa

#endif  // OSA_FLS_HPP

#ifndef OSA_CONFIG_HPP
#define OSA_CONFIG_HPP

// Experiment config: a sectioned key=value text format.
//
//   # comment            (also ';')
//   [simulation]
//   seed = 7
//   arrival_rates = 1, 2, 3
//   [mf.distance]
//   Near = trapezoid(0, 0, 2.5, 5)
//   [rulebase]
//   Low, Low, Near = 28.59 VeryLow
//   Low, Low, Moderate = votes VeryLow:2 Low:1
//
// Unknown sections or keys and repeated keys are errors. Every key that is
// not set keeps its default. See README.md for the full key list.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osa/error.hpp"
#include "osa/fls.hpp"
#include "osa/fuzzy.hpp"
#include "osa/simulator.hpp"

namespace osa {

struct MfOverride {
  std::string variable;  // utilization | mobility | distance
  std::string label;
  MembershipFunction mf;

  bool operator==(const MfOverride&) const = default;
};

struct ExperimentSpec {
  SimConfig sim;
  TNorm tnorm = TNorm::product;
  std::vector<MfOverride> mf_overrides;
  std::optional<RuleBase> rulebase_override;
  std::vector<ConsequenceLevel> consequence = default_consequence_levels();
  std::vector<Policy> policies{Policy::fls, Policy::nsu};
  std::string output_dir = "out";
  bool emit_plots = true;

  FlsEngine::Variables variables() const {
    FlsEngine::Variables vars{default_utilization_variable(), default_mobility_variable(),
                              default_distance_variable()};
    for (const auto& o : mf_overrides) {
      auto it = std::find_if(vars.begin(), vars.end(), [&](const LinguisticVariable& v) { return v.name() == o.variable; });
      if (it == vars.end()) throw ConfigError("unknown variable '" + o.variable + "'");
      *it = it->with_level(o.label, o.mf);
    }
    return vars;
  }

  FlsEngine build_engine() const {
    auto vars = variables();
    RuleBase rb = rulebase_override ? *rulebase_override : build_paper_rulebase();
    require_complete_rulebase(vars, rb);
    return FlsEngine(std::move(vars), std::move(rb), tnorm);
  }

  void validate() const {
    sim.validate();
    if (policies.empty()) throw ConfigError("no policy selected");
    build_engine();
  }

  bool operator==(const ExperimentSpec&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One config line being interpreted; errors point at the value column.
struct Cursor {
  int line;
  int column;

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line, column); }

  double number(std::string_view text) const {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) fail("expected a number, got '" + std::string(text) + "'");
    return v;
  }

  long long integer(std::string_view text) const {
    text = trim(text);
    long long v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) fail("expected an integer, got '" + std::string(text) + "'");
    return v;
  }

  bool boolean(std::string_view text) const {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail("expected true or false, got '" + std::string(text) + "'");
  }

  std::vector<double> number_list(std::string_view text) const {
    std::vector<double> out;
    for (auto item : split(text, ',')) out.push_back(number(item));
    return out;
  }

  /// `triangle(a, b, c)` or `trapezoid(a, b, c, d)`.
  MembershipFunction mf(std::string_view text) const {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') fail("expected triangle(a,b,c) or trapezoid(a,b,c,d)");
    const auto shape = trim(text.substr(0, open));
    const auto args = number_list(text.substr(open + 1, text.size() - open - 2));
    if (shape == "triangle" && args.size() != 3) fail("triangle needs 3 breakpoints");
    if (shape == "trapezoid" && args.size() != 4) fail("trapezoid needs 4 breakpoints");
    if (shape != "triangle" && shape != "trapezoid") fail("unknown membership shape '" + std::string(shape) + "'");
    try {
      return MembershipFunction::from_breakpoints(args);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " + std::to_string(line) + ")");
    }
  }
};

inline std::string mf_to_string(const MembershipFunction& mf) {
  std::string s = mf.shape() == MfShape::triangle ? "triangle(" : "trapezoid(";
  const auto p = mf.breakpoints();
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_double(p[i]);
  return s + ")";
}

inline const char* primary_mode_name(PrimaryMode m) {
  switch (m) {
    case PrimaryMode::dynamic:
      return "dynamic";
    case PrimaryMode::always_on:
      return "always_on";
    case PrimaryMode::absent:
      return "absent";
  }
  return "dynamic";
}

inline std::string policies_name(const std::vector<Policy>& p) {
  if (p.size() == 2) return "both";
  return p.empty() ? "" : to_string(p.front());
}

}  // namespace detail

inline std::vector<Policy> parse_policy(std::string_view text) {
  if (text == "both") return {Policy::fls, Policy::nsu};
  if (text == "fls") return {Policy::fls};
  if (text == "nsu") return {Policy::nsu};
  throw ConfigError("policy must be fls, nsu or both");
}

/// Parses and validates a config. Throws SyntaxError for malformed text and
/// ConfigError for well-formed text that violates a model invariant.
inline ExperimentSpec parse_config(std::string_view text) {
  using detail::Cursor;
  using detail::trim;

  ExperimentSpec spec;
  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::pair<std::string, std::string>> seen_keys;
  std::map<std::string, std::size_t> consequence_index;
  for (std::size_t i = 0; i < spec.consequence.size(); ++i) consequence_index[spec.consequence[i].label] = i;
  RuleBase rules;
  bool have_rulebase = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string_view::npos || raw[first] == '#' || raw[first] == ';') continue;
    const int first_col = static_cast<int>(first) + 1;

    if (raw[first] == '[') {
      const auto close = raw.find(']', first);
      if (close == std::string_view::npos) throw SyntaxError("unterminated section header", line_no, first_col);
      if (!trim(raw.substr(close + 1)).empty()) {
        throw SyntaxError("trailing text after section header", line_no, static_cast<int>(close) + 2);
      }
      section = std::string(trim(raw.substr(first + 1, close - first - 1)));
      static const std::set<std::string> known{"simulation", "radio",     "fls",       "mf.utilization",
                                                "mf.mobility", "mf.distance", "consequence", "rulebase",
                                                "output"};
      if (!known.count(section)) throw SyntaxError("unknown section [" + section + "]", line_no, first_col + 1);
      if (!seen_sections.insert(section).second) {
        throw SyntaxError("section [" + section + "] appears twice", line_no, first_col + 1);
      }
      if (section == "rulebase") have_rulebase = true;
      continue;
    }

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw SyntaxError("expected 'key = value'", line_no, first_col);
    const std::string key(trim(raw.substr(0, eq)));
    const std::string_view value = trim(raw.substr(eq + 1));
    const auto value_off = raw.find_first_not_of(" \t", eq + 1);
    const Cursor cur{line_no, static_cast<int>(value_off == std::string_view::npos ? eq + 1 : value_off) + 1};
    if (section.empty()) throw SyntaxError("key outside of any section", line_no, first_col);
    if (key.empty()) throw SyntaxError("empty key", line_no, first_col);
    if (value.empty()) cur.fail("missing value for '" + key + "'");
    if (!seen_keys.insert({section, key}).second) {
      throw SyntaxError("key '" + key + "' repeated in [" + section + "]", line_no, first_col);
    }
    auto unknown = [&] { throw SyntaxError("unknown key '" + key + "' in [" + section + "]", line_no, first_col); };

    auto& sim = spec.sim;
    if (section == "simulation") {
      if (key == "seed") {
        const auto v = cur.integer(value);
        if (v < 0) cur.fail("seed must be non-negative");
        sim.rng_seed = static_cast<std::uint64_t>(v);
      } else if (key == "users") {
        sim.num_secondary_users = static_cast<int>(cur.integer(value));
      } else if (key == "area") {
        const auto x = value.find('x');
        if (x == std::string_view::npos) cur.fail("area must look like WIDTHxHEIGHT");
        sim.area_width = cur.number(value.substr(0, x));
        sim.area_height = cur.number(value.substr(x + 1));
      } else if (key == "channels") {
        sim.num_channels = static_cast<int>(cur.integer(value));
      } else if (key == "arrival_rates") {
        sim.arrival_rates = cur.number_list(value);
      } else if (key == "mean_holding_time") {
        sim.mean_holding_time = cur.number(value);
      } else if (key == "primary_mode") {
        if (value == "dynamic") {
          sim.primary_mode = PrimaryMode::dynamic;
        } else if (value == "always_on") {
          sim.primary_mode = PrimaryMode::always_on;
        } else if (value == "absent") {
          sim.primary_mode = PrimaryMode::absent;
        } else {
          cur.fail("primary_mode must be dynamic, always_on or absent");
        }
      } else if (key == "primary_on_rate") {
        sim.primary_on_rate = cur.number(value);
      } else if (key == "primary_off_rate") {
        sim.primary_off_rate = cur.number(value);
      } else if (key == "duration") {
        sim.sim_duration = cur.number(value);
      } else if (key == "replications") {
        sim.replications = static_cast<int>(cur.integer(value));
      } else if (key == "warmup_fraction") {
        sim.warmup_fraction = cur.number(value);
      } else if (key == "max_speed") {
        sim.max_speed = cur.number(value);
      } else if (key == "efficiency_window") {
        sim.efficiency_window = cur.number(value);
      } else if (key == "base_frequency_hz") {
        sim.base_frequency_hz = cur.number(value);
      } else if (key == "channel_spacing_hz") {
        sim.channel_spacing_hz = cur.number(value);
      } else if (key == "fls_repack") {
        sim.fls_repack = cur.boolean(value);
      } else {
        unknown();
      }
    } else if (section == "radio") {
      if (key == "pu_transmit_power_w") {
        sim.primary.transmit_power_w = cur.number(value);
      } else if (key == "carrier_frequency_hz") {
        sim.primary.carrier_frequency_hz = cur.number(value);
      } else if (key == "reference_gain") {
        sim.path_loss.reference_gain = cur.number(value);
      } else if (key == "path_loss_exponent") {
        sim.path_loss.exponent = cur.number(value);
      } else if (key == "noise_power_w") {
        sim.path_loss.noise_power_w = cur.number(value);
      } else if (key == "wave_speed") {
        sim.path_loss.wave_speed = cur.number(value);
      } else {
        unknown();
      }
    } else if (section == "fls") {
      if (key == "tnorm") {
        if (value == "product") {
          spec.tnorm = TNorm::product;
        } else if (value == "min") {
          spec.tnorm = TNorm::minimum;
        } else {
          cur.fail("tnorm must be product or min");
        }
      } else {
        unknown();
      }
    } else if (section.starts_with("mf.")) {
      spec.mf_overrides.push_back({section.substr(3), key, cur.mf(value)});
    } else if (section == "consequence") {
      auto it = consequence_index.find(key);
      if (it == consequence_index.end()) unknown();
      auto& level = spec.consequence[it->second];
      if (value.find('(') != std::string_view::npos) {
        level.mf = cur.mf(value);
        level.centroid = level.effective_centroid();
      } else {
        level.centroid = cur.number(value);
        level.mf.reset();
      }
    } else if (section == "rulebase") {
      const auto labels = detail::split(key, ',');
      if (labels.size() != 3) throw SyntaxError("rule key must be three comma-separated labels", line_no, first_col);
      FuzzyRule rule;
      for (std::size_t k = 0; k < 3; ++k) rule.antecedents[k] = std::string(labels[k]);
      const auto words = detail::split_ws(value);
      if (words.front() == "votes") {
        std::map<std::string, double> counts;
        std::map<std::string, double> centroids;
        for (const auto& level : spec.consequence) centroids[level.label] = level.effective_centroid();
        if (words.size() < 2) cur.fail("votes needs at least one LABEL:COUNT pair");
        double best = -1.0;
        for (std::size_t w = 1; w < words.size(); ++w) {
          const auto colon = words[w].find(':');
          if (colon == std::string_view::npos) cur.fail("expected LABEL:COUNT, got '" + std::string(words[w]) + "'");
          const std::string label(words[w].substr(0, colon));
          if (!centroids.count(label)) cur.fail("unknown consequence label '" + label + "'");
          const double n = cur.number(words[w].substr(colon + 1));
          counts[label] += n;
        }
        for (const auto& level : spec.consequence) {
          auto it = counts.find(level.label);
          if (it != counts.end() && it->second > best) {
            best = it->second;
            rule.consequent_label = level.label;
          }
        }
        try {
          rule.centroid = avg_centroid(counts, centroids);
        } catch (const std::exception& e) {
          cur.fail(e.what());
        }
      } else {
        if (words.size() > 2) cur.fail("expected 'CENTROID [LABEL]'");
        rule.centroid = cur.number(words[0]);
        if (words.size() == 2) {
          rule.consequent_label = std::string(words[1]);
          if (!consequence_index.count(rule.consequent_label)) {
            cur.fail("unknown consequence label '" + rule.consequent_label + "'");
          }
        } else {
          double best = 0.0;
          for (const auto& level : spec.consequence) {
            const double dist = std::abs(level.effective_centroid() - rule.centroid);
            if (rule.consequent_label.empty() || dist < best) {
              best = dist;
              rule.consequent_label = level.label;
            }
          }
        }
      }
      rules.rules.push_back(std::move(rule));
    } else if (section == "output") {
      if (key == "dir") {
        spec.output_dir = std::string(value);
      } else if (key == "plots") {
        spec.emit_plots = cur.boolean(value);
      } else if (key == "policy") {
        try {
          spec.policies = parse_policy(value);
        } catch (const ConfigError& e) {
          cur.fail(e.what());
        }
      } else {
        unknown();
      }
    }
  }

  // Canonical order: by variable, then as written.
  auto var_rank = [](const MfOverride& o) { return o.variable == "utilization" ? 0 : o.variable == "mobility" ? 1 : 2; };
  std::stable_sort(spec.mf_overrides.begin(), spec.mf_overrides.end(),
                   [&](const MfOverride& a, const MfOverride& b) { return var_rank(a) < var_rank(b); });
  if (have_rulebase) spec.rulebase_override = std::move(rules);
  spec.validate();
  return spec;
}

/// Writes every setting explicitly; parse_config(serialize_config(s)) == s.
inline std::string serialize_config(const ExperimentSpec& spec) {
  using detail::format_double;
  const auto& sim = spec.sim;
  std::ostringstream out;
  out << "[simulation]\n"
      << "seed = " << sim.rng_seed << "\n"
      << "users = " << sim.num_secondary_users << "\n"
      << "area = " << format_double(sim.area_width) << "x" << format_double(sim.area_height) << "\n"
      << "channels = " << sim.num_channels << "\n"
      << "arrival_rates = ";
  for (std::size_t i = 0; i < sim.arrival_rates.size(); ++i) out << (i ? ", " : "") << format_double(sim.arrival_rates[i]);
  out << "\n"
      << "mean_holding_time = " << format_double(sim.mean_holding_time) << "\n"
      << "primary_mode = " << detail::primary_mode_name(sim.primary_mode) << "\n"
      << "primary_on_rate = " << format_double(sim.primary_on_rate) << "\n"
      << "primary_off_rate = " << format_double(sim.primary_off_rate) << "\n"
      << "duration = " << format_double(sim.sim_duration) << "\n"
      << "replications = " << sim.replications << "\n"
      << "warmup_fraction = " << format_double(sim.warmup_fraction) << "\n"
      << "max_speed = " << format_double(sim.max_speed) << "\n"
      << "efficiency_window = " << format_double(sim.efficiency_window) << "\n"
      << "base_frequency_hz = " << format_double(sim.base_frequency_hz) << "\n"
      << "channel_spacing_hz = " << format_double(sim.channel_spacing_hz) << "\n"
      << "fls_repack = " << (sim.fls_repack ? "true" : "false") << "\n\n";

  out << "[radio]\n"
      << "pu_transmit_power_w = " << format_double(sim.primary.transmit_power_w) << "\n"
      << "carrier_frequency_hz = " << format_double(sim.primary.carrier_frequency_hz) << "\n"
      << "reference_gain = " << format_double(sim.path_loss.reference_gain) << "\n"
      << "path_loss_exponent = " << format_double(sim.path_loss.exponent) << "\n"
      << "noise_power_w = " << format_double(sim.path_loss.noise_power_w) << "\n"
      << "wave_speed = " << format_double(sim.path_loss.wave_speed) << "\n\n";

  out << "[fls]\n"
      << "tnorm = " << (spec.tnorm == TNorm::product ? "product" : "min") << "\n\n";

  for (const char* var : {"utilization", "mobility", "distance"}) {
    bool header = false;
    for (const auto& o : spec.mf_overrides) {
      if (o.variable != var) continue;
      if (!header) out << "[mf." << var << "]\n";
      header = true;
      out << o.label << " = " << detail::mf_to_string(o.mf) << "\n";
    }
    if (header) out << "\n";
  }

  out << "[consequence]\n";
  for (const auto& level : spec.consequence) {
    out << level.label << " = " << (level.mf ? detail::mf_to_string(*level.mf) : format_double(level.centroid)) << "\n";
  }
  out << "\n";

  if (spec.rulebase_override) {
    out << "[rulebase]\n";
    for (const auto& r : spec.rulebase_override->rules) {
      out << r.antecedents[0] << ", " << r.antecedents[1] << ", " << r.antecedents[2] << " = "
          << format_double(r.centroid) << " " << r.consequent_label << "\n";
    }
    out << "\n";
  }

  out << "[output]\n"
      << "dir = " << spec.output_dir << "\n"
      << "plots = " << (spec.emit_plots ? "true" : "false") << "\n"
      << "policy = " << detail::policies_name(spec.policies) << "\n";
  return out.str();
}

}  // namespace osa

#endif  // OSA_CONFIG_HPP

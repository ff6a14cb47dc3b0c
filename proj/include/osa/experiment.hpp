#ifndef OSA_EXPERIMENT_HPP
#define OSA_EXPERIMENT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "osa/config.hpp"
#include "osa/fls.hpp"
#include "osa/simulator.hpp"

namespace osa {

/// Failure while producing artifacts (I/O, unwritable directory, ...).
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kMetricsHeader =
    "arrival_rate,policy,blocking,free_spectrum,allocated_spectrum,interference_hz,system_efficiency,"
    "channel_utilization";

inline constexpr const char* kGridHeader = "utilization,mobility,distance,possibility";

/// CSV number format: printf "%.6g" (six significant digits, shortest of
/// fixed/scientific, trailing zeros dropped).
inline std::string csv_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string metrics_csv_line(const MetricsRow& r) {
  std::string s = csv_number(r.arrival_rate);
  s += ',';
  s += to_string(r.policy);
  for (double v : {r.blocking_probability, r.mean_free_spectrum, r.mean_allocated_spectrum, r.interference_spread,
                   r.system_efficiency, r.channel_utilization}) {
    s += ',';
    s += csv_number(v);
  }
  return s;
}

/// One row per (rate, policy), FLS before NSU.
inline std::string metrics_csv(const std::vector<SweepPoint>& sweep) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& pt : sweep) {
    if (pt.fls) out += metrics_csv_line(*pt.fls) + "\n";
    if (pt.nsu) out += metrics_csv_line(*pt.nsu) + "\n";
  }
  return out;
}

/// FLS response sampled on an n x n x n grid spanning each variable's domain.
inline std::string possibility_grid_csv(const FlsEngine& engine, int n = 21) {
  const auto& vars = engine.variables();
  auto at = [n](const LinguisticVariable& v, int i) {
    return v.lo() + (v.hi() - v.lo()) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::string out = std::string(kGridHeader) + "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const DescriptorVector d{at(vars[0], i), at(vars[1], j), at(vars[2], k)};
        out += csv_number(d.utilization_efficiency) + ',' + csv_number(d.mobility) + ',' + csv_number(d.distance) +
               ',' + csv_number(engine.infer(d)) + '\n';
      }
    }
  }
  return out;
}

struct PlotScript {
  std::string filename;
  std::string body;
};

/// gnuplot scripts for the comparison figures, reading the CSVs next to them.
inline std::vector<PlotScript> plot_scripts() {
  struct Fig {
    const char* file;
    int column;
    const char* ylabel;
    const char* title;
  };
  static constexpr Fig kFigs[] = {
      {"fig4_blocking.gp", 3, "Call blocking probability", "Mean arrival vs call blocking"},
      {"fig5_free_spectrum.gp", 4, "Free spectrum (channels)", "Mean arrival vs free spectrum"},
      {"fig6_allocated_spectrum.gp", 5, "Allocated spectrum (channels)", "Mean arrival vs allocated spectrum"},
      {"fig7_interference.gp", 6, "Interference |f_max - f_min| (Hz)", "Mean arrival vs interference"},
      {"fig9_system_efficiency.gp", 7, "System efficiency", "Mean arrival vs system efficiency"},
      {"fig10_channel_utilization.gp", 8, "Channel utilization", "Mean arrival vs channel utilization"},
  };
  std::vector<PlotScript> out;
  for (const auto& f : kFigs) {
    std::string stem(f.file);
    stem = stem.substr(0, stem.size() - 3);
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set terminal pngcairo size 800,600\n"
      << "set output '" << stem << ".png'\n"
      << "set title '" << f.title << "'\n"
      << "set xlabel 'Mean arrival rate'\n"
      << "set ylabel '" << f.ylabel << "'\n"
      << "set key top left\n"
      << "plot \"< grep ',fls,' metrics.csv\" using 1:" << f.column << " with linespoints title 'Fuzzy Logic System', \\\n"
      << "     \"< grep ',nsu,' metrics.csv\" using 1:" << f.column
      << " with linespoints title 'Normal spectrum utilization'\n";
    out.push_back({f.file, s.str()});
  }
  out.push_back({"fig8_distance.gp",
                 "set datafile separator ','\n"
                 "set terminal pngcairo size 800,600\n"
                 "set output 'fig8_distance.png'\n"
                 "set title 'Distance from primary user vs possibility'\n"
                 "set xlabel 'Normalized distance to primary user'\n"
                 "set ylabel 'Possibility'\n"
                 "plot \"< awk -F, '$1==50 && $2==5' possibility_grid.csv\" using 3:4 with linespoints "
                 "title 'utilization 50, mobility 5', \\\n"
                 "     \"< awk -F, '$1==100 && $2==0' possibility_grid.csv\" using 3:4 with linespoints "
                 "title 'utilization 100, mobility 0'\n"});
  return out;
}

/// Writes via a temporary sibling and rename, so readers never see a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw RuntimeError("cannot write " + tmp.string());
    f << contents;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw RuntimeError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw RuntimeError("cannot move " + tmp.string() + " into place");
  }
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw RuntimeError("cannot create output directory " + dir.string());
}

struct ExperimentResult {
  std::vector<SweepPoint> sweep;
  std::vector<std::filesystem::path> written;
};

/// Runs the sweep and writes metrics.csv, possibility_grid.csv and, if
/// requested, the plot scripts. Everything is computed before the first write.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = 0) {
  spec.validate();
  const auto engine = spec.build_engine();
  ExperimentResult result;
  result.sweep = run_sweep(spec.sim, engine, spec.policies, threads);
  const auto metrics = metrics_csv(result.sweep);
  const auto grid = possibility_grid_csv(engine);

  const std::filesystem::path dir(spec.output_dir);
  ensure_directory(dir);
  write_file_atomic(dir / "metrics.csv", metrics);
  result.written.push_back(dir / "metrics.csv");
  write_file_atomic(dir / "possibility_grid.csv", grid);
  result.written.push_back(dir / "possibility_grid.csv");
  if (spec.emit_plots) {
    for (const auto& p : plot_scripts()) {
      write_file_atomic(dir / p.filename, p.body);
      result.written.push_back(dir / p.filename);
    }
  }
  return result;
}

}  // namespace osa

#endif  // OSA_EXPERIMENT_HPP

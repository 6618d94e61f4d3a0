#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockcalc/conflict_model.hpp"
#include "blockcalc/latency_model.hpp"
#include "blockcalc/simulator.hpp"

namespace blockcalc {

enum class ExperimentKind { Case1AllWrite, Case2ReadWrite, Case3SplitRW, LatencySweep, OverlapTable };
enum class SweepParam { Alpha, BlockSize, Range, ReadProb, ArrivalRate };

const char* to_string(ExperimentKind kind);
const char* to_string(SweepParam param);
ExperimentKind parse_kind(std::string_view s);
SweepParam parse_sweep_param(std::string_view s);

struct Sweep {
  SweepParam param = SweepParam::Alpha;
  std::vector<double> values;
};

// Everything not being swept. Defaults follow the published case studies.
struct ExperimentParams {
  double alpha = 1.03;
  std::size_t bs = 8;
  std::size_t range = 100;
  double rp = 0.5;  // case 3 only; case 1 forces 0, case 2 forces 0.5
  std::size_t trials = 50;
  std::size_t ops = 1000;
  std::uint64_t seed = 42;
  std::size_t clients = 0;  // 0 selects default_num_clients(bs)

  // Latency sweeps.
  double bto = 2.0;
  double arrival_rate = 8.0;
  double c0 = 0.003;  // s per transaction, used when no measurements are given
  double c1 = 0.12;   // s
  double bp_rate = reference::kBpRate;
  std::filesystem::path measurements;  // empty: predict from c0/c1
};

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::Case1AllWrite;
  Sweep sweep;
  ExperimentParams fixed;
  std::filesystem::path output_dir = ".";

  // Throws ConfigError on an unusable spec.
  void validate() const;
};

inline const std::vector<double> kDefaultAlphaGrid{1.01, 1.03, 1.05, 1.07, 1.09};
inline const std::vector<double> kDefaultBsGrid{1, 2, 4, 8, 16, 32, 64};
inline const std::vector<double> kDefaultRangeGrid{25, 50, 100, 200, 400};
inline const std::vector<double> kDefaultRpGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// Named presets: fig8 (case 1), fig9 (case 2), fig11 (case 3), table3, fig1.
std::vector<std::string> preset_names();
std::vector<ExperimentSpec> preset(std::string_view name);

// Key = value config document, see README. Relative measurement paths resolve
// against `base_dir`.
std::vector<ExperimentSpec> parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir);

// A preset name or a config file path.
std::vector<ExperimentSpec> load_experiments(std::string_view preset_or_file);

// Parameters with the sweep value at `value` substituted.
ExperimentParams with_sweep_value(const ExperimentParams& fixed, SweepParam param, double value);

AccessPattern case_pattern(ExperimentKind kind, const ExperimentParams& params);
SimConfig case_sim_config(ExperimentKind kind, const ExperimentParams& params);

struct CaseStudyRow {
  double value = 0.0;
  double model = 0.0;
  PercentileSummary sim;
};

// Model and simulation percentiles for each sweep value. Every point reuses
// the master seed.
std::vector<CaseStudyRow> run_case_study(const ExperimentSpec& spec);

struct OverlapRow {
  double alpha = 0.0;
  double ww_key_conflict = 0.0;  // sum of P_WK^2
  double p_ww = 0.0;             // with the read/write mix applied
  double overlap = 0.0;
  double overlap_rounded = 0.0;
};

// Forward-Zipf reads against reversed-Zipf writes for each alpha.
std::vector<OverlapRow> overlap_table(std::size_t range, double rp, std::span<const double> alphas);

struct LatencyRow {
  std::size_t bs = 0;
  double bto = 0.0;
  double arrival_rate = 0.0;
  std::optional<double> measured;
  double predicted = 0.0;
  std::optional<double> relative_error;  // (predicted - measured) / measured
  SaturationDiagnostic saturation;
};

struct LatencyReport {
  FittedLatencyModel model;
  bool fitted = false;
  std::vector<LatencyRow> rows;
};

LatencyReport latency_report(std::span<const LatencySample> samples, double bp_rate);
LatencyReport run_latency(const ExperimentSpec& spec);

std::string case_study_csv(const ExperimentSpec& spec, std::span<const CaseStudyRow> rows);
std::string case_study_plot(const ExperimentSpec& spec, std::span<const CaseStudyRow> rows);
std::string overlap_csv(std::span<const OverlapRow> rows);
std::string latency_csv(const LatencyReport& report);
std::string latency_fit_csv(const LatencyReport& report);
std::string latency_plot(const ExperimentSpec& spec, const LatencyReport& report);

// Runs one spec and writes its files into spec.output_dir, returning the paths.
std::vector<std::filesystem::path> execute(const ExperimentSpec& spec);

}  // namespace blockcalc

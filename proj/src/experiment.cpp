#include "blockcalc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "blockcalc/error.hpp"
#include "blockcalc/text_io.hpp"

namespace blockcalc {

namespace fs = std::filesystem;
using text::fmt;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Case1AllWrite: return "case1";
    case ExperimentKind::Case2ReadWrite: return "case2";
    case ExperimentKind::Case3SplitRW: return "case3";
    case ExperimentKind::LatencySweep: return "latency";
    case ExperimentKind::OverlapTable: return "overlap";
  }
  return "?";
}

const char* to_string(SweepParam param) {
  switch (param) {
    case SweepParam::Alpha: return "alpha";
    case SweepParam::BlockSize: return "bs";
    case SweepParam::Range: return "range";
    case SweepParam::ReadProb: return "rp";
    case SweepParam::ArrivalRate: return "arrival_rate";
  }
  return "?";
}

ExperimentKind parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::Case1AllWrite, ExperimentKind::Case2ReadWrite, ExperimentKind::Case3SplitRW,
                 ExperimentKind::LatencySweep, ExperimentKind::OverlapTable}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(s) + "' (case1|case2|case3|latency|overlap)");
}

SweepParam parse_sweep_param(std::string_view s) {
  for (auto p : {SweepParam::Alpha, SweepParam::BlockSize, SweepParam::Range, SweepParam::ReadProb,
                 SweepParam::ArrivalRate}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown sweep parameter '" + std::string(s) + "' (alpha|bs|range|rp|arrival_rate)");
}

namespace {

bool sweep_allowed(ExperimentKind kind, SweepParam p) {
  switch (kind) {
    case ExperimentKind::Case1AllWrite:
    case ExperimentKind::Case2ReadWrite:
      return p == SweepParam::Alpha || p == SweepParam::BlockSize || p == SweepParam::Range;
    case ExperimentKind::Case3SplitRW:
      return p != SweepParam::ArrivalRate;
    case ExperimentKind::OverlapTable:
      return p == SweepParam::Alpha;
    case ExperimentKind::LatencySweep:
      return p == SweepParam::BlockSize || p == SweepParam::ArrivalRate;
  }
  return false;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
    throw ConfigError(std::string(what) + " must be a positive integer, got " + fmt(v));
  }
  return static_cast<std::size_t>(v);
}

bool is_simulated(ExperimentKind kind) {
  return kind == ExperimentKind::Case1AllWrite || kind == ExperimentKind::Case2ReadWrite ||
         kind == ExperimentKind::Case3SplitRW;
}

}  // namespace

ExperimentParams with_sweep_value(const ExperimentParams& fixed, SweepParam param, double value) {
  ExperimentParams p = fixed;
  switch (param) {
    case SweepParam::Alpha: p.alpha = value; break;
    case SweepParam::BlockSize: p.bs = as_count(value, "bs"); break;
    case SweepParam::Range: p.range = as_count(value, "range"); break;
    case SweepParam::ReadProb: p.rp = value; break;
    case SweepParam::ArrivalRate: p.arrival_rate = value; break;
  }
  return p;
}

void ExperimentSpec::validate() const {
  if (name.empty()) throw ConfigError("experiment name is empty");
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw ConfigError("experiment name '" + name + "' may only use letters, digits, '_' and '-'");
    }
  }
  const bool latency_from_file = kind == ExperimentKind::LatencySweep && !fixed.measurements.empty();
  if (!latency_from_file) {
    if (sweep.values.empty()) throw ConfigError(name + ": sweep has no values");
    if (!sweep_allowed(kind, sweep.param)) {
      throw ConfigError(name + ": cannot sweep " + to_string(sweep.param) + " in a " + to_string(kind) +
                        " experiment");
    }
  }
  for (std::size_t i = 1; i < sweep.values.size(); ++i) {
    if (!(sweep.values[i] > sweep.values[i - 1])) {
      throw ConfigError(name + ": sweep values must be strictly increasing");
    }
  }
  if (is_simulated(kind) && fixed.trials < 1) throw ConfigError(name + ": trials must be >= 1");

  auto check_point = [&](const ExperimentParams& p) {
    switch (kind) {
      case ExperimentKind::Case1AllWrite:
      case ExperimentKind::Case2ReadWrite:
      case ExperimentKind::Case3SplitRW:
        case_sim_config(kind, p).validate();
        break;
      case ExperimentKind::OverlapTable:
        ZipfSpec{p.range, p.alpha, false}.validate();
        if (!(p.rp >= 0.0 && p.rp <= 1.0)) throw ConfigError("rp must lie in [0, 1]");
        break;
      case ExperimentKind::LatencySweep: {
        EnvironmentParams env;
        env.arrival_rate = p.arrival_rate;
        env.validate();
        BlockDesign{p.bs, p.bto, "SHA256"}.validate();
        if (!(p.bp_rate > 0.0)) throw ConfigError("bp_rate must be > 0");
        break;
      }
    }
  };
  try {
    if (latency_from_file || sweep.values.empty()) {
      check_point(fixed);
    } else {
      for (double v : sweep.values) check_point(with_sweep_value(fixed, sweep.param, v));
    }
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

std::vector<std::string> preset_names() { return {"fig1", "fig8", "fig9", "fig11", "table3"}; }

std::vector<ExperimentSpec> preset(std::string_view name) {
  auto make = [](std::string n, ExperimentKind k, SweepParam p, std::vector<double> values) {
    ExperimentSpec s;
    s.name = std::move(n);
    s.kind = k;
    s.sweep = {p, std::move(values)};
    return s;
  };
  std::vector<ExperimentSpec> out;
  if (name == "fig8" || name == "fig9") {
    const auto kind = name == "fig8" ? ExperimentKind::Case1AllWrite : ExperimentKind::Case2ReadWrite;
    const std::string prefix(name);
    out.push_back(make(prefix + "_alpha", kind, SweepParam::Alpha, kDefaultAlphaGrid));
    out.push_back(make(prefix + "_bs", kind, SweepParam::BlockSize, kDefaultBsGrid));
    out.push_back(make(prefix + "_range", kind, SweepParam::Range, kDefaultRangeGrid));
  } else if (name == "fig11") {
    out.push_back(make("fig11_rp", ExperimentKind::Case3SplitRW, SweepParam::ReadProb, kDefaultRpGrid));
    out.push_back(make("fig11_alpha", ExperimentKind::Case3SplitRW, SweepParam::Alpha, kDefaultAlphaGrid));
  } else if (name == "table3") {
    out.push_back(make("table3", ExperimentKind::OverlapTable, SweepParam::Alpha, kDefaultAlphaGrid));
  } else if (name == "fig1") {
    out.push_back(make("fig1", ExperimentKind::LatencySweep, SweepParam::BlockSize, kDefaultBsGrid));
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return out;
}

namespace {

void apply_key(ExperimentSpec& spec, bool& has_kind, const std::string& key, const std::string& value,
               const fs::path& base_dir) {
  auto num = [&] { return text::parse_double(value); };
  auto count = [&] { return static_cast<std::size_t>(text::parse_uint(value)); };
  auto& f = spec.fixed;
  if (key == "kind") {
    spec.kind = parse_kind(value);
    has_kind = true;
  } else if (key == "name") {
    spec.name = value;
  } else if (key == "sweep") {
    spec.sweep.param = parse_sweep_param(value);
  } else if (key == "values") {
    spec.sweep.values.clear();
    for (const auto& v : text::split(value, ',')) spec.sweep.values.push_back(text::parse_double(v));
  } else if (key == "alpha") {
    f.alpha = num();
  } else if (key == "bs") {
    f.bs = count();
  } else if (key == "range") {
    f.range = count();
  } else if (key == "rp") {
    f.rp = num();
  } else if (key == "trials") {
    f.trials = count();
  } else if (key == "ops") {
    f.ops = count();
  } else if (key == "seed") {
    f.seed = text::parse_uint(value);
  } else if (key == "clients") {
    f.clients = count();
  } else if (key == "bto") {
    f.bto = num();
  } else if (key == "arrival_rate") {
    f.arrival_rate = num();
  } else if (key == "c0") {
    f.c0 = num();
  } else if (key == "c1") {
    f.c1 = num();
  } else if (key == "bp_rate") {
    f.bp_rate = num();
  } else if (key == "measurements") {
    const fs::path p(value);
    f.measurements = p.is_absolute() ? p : base_dir / p;
  } else if (key == "output_dir") {
    spec.output_dir = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

std::vector<ExperimentSpec> parse_experiment_config(std::istream& in, const fs::path& base_dir) {
  struct Section {
    ExperimentSpec spec;
    bool has_kind = false;
    std::size_t line = 0;
  };
  // Keys before the first [section] are defaults for every section.
  Section defaults;
  defaults.spec.name = "experiment";
  std::vector<std::pair<std::string, std::string>> default_entries;
  std::vector<Section> sections;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    try {
      if (body.front() == '[') {
        if (body.back() != ']') throw ConfigError("unterminated section header");
        Section s;
        s.line = line_no;
        s.spec.name = std::string(text::trim(body.substr(1, body.size() - 2)));
        for (const auto& [k, v] : default_entries) apply_key(s.spec, s.has_kind, k, v, base_dir);
        sections.push_back(std::move(s));
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
      const std::string key(text::trim(body.substr(0, eq)));
      const std::string value(text::trim(body.substr(eq + 1)));
      if (sections.empty()) {
        apply_key(defaults.spec, defaults.has_kind, key, value, base_dir);
        default_entries.emplace_back(key, value);
      } else {
        auto& s = sections.back();
        apply_key(s.spec, s.has_kind, key, value, base_dir);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (sections.empty()) {
    defaults.line = 1;
    sections.push_back(std::move(defaults));
  }
  std::vector<ExperimentSpec> out;
  for (auto& s : sections) {
    if (!s.has_kind) throw ConfigError("line " + std::to_string(s.line) + ": experiment has no 'kind'");
    s.spec.validate();
    out.push_back(std::move(s.spec));
  }
  return out;
}

std::vector<ExperimentSpec> load_experiments(std::string_view preset_or_file) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_file) != names.end()) return preset(preset_or_file);
  const fs::path path(preset_or_file);
  std::ifstream in(path);
  if (!in) throw ConfigError("'" + std::string(preset_or_file) + "' is neither a preset nor a readable config file");
  return parse_experiment_config(in, path.parent_path());
}

AccessPattern case_pattern(ExperimentKind kind, const ExperimentParams& p) {
  const ZipfSpec forward{p.range, p.alpha, false};
  switch (kind) {
    case ExperimentKind::Case1AllWrite: {
      auto keys = KeyDistribution::zipf(forward);
      return AccessPattern(0.0, keys, keys);
    }
    case ExperimentKind::Case2ReadWrite: {
      auto keys = KeyDistribution::zipf(forward);
      return AccessPattern(0.5, keys, keys);
    }
    case ExperimentKind::Case3SplitRW:
    case ExperimentKind::OverlapTable:
      return AccessPattern(p.rp, KeyDistribution::zipf(forward), KeyDistribution::zipf({p.range, p.alpha, true}));
    case ExperimentKind::LatencySweep:
      break;
  }
  throw ConfigError("latency experiments have no access pattern");
}

SimConfig case_sim_config(ExperimentKind kind, const ExperimentParams& p) {
  ClientKind client = ClientKind::AllWrite;
  switch (kind) {
    case ExperimentKind::Case1AllWrite: client = ClientKind::AllWrite; break;
    case ExperimentKind::Case2ReadWrite: client = ClientKind::ReadThenWriteRetry; break;
    case ExperimentKind::Case3SplitRW: client = ClientKind::IndependentReadWrite; break;
    default: throw ConfigError(std::string(to_string(kind)) + " experiments are not simulated");
  }
  SimConfig cfg{ClientBehavior{client, case_pattern(kind, p)}, p.bs,
                p.clients == 0 ? default_num_clients(p.bs) : p.clients, p.ops, p.seed};
  cfg.validate();
  return cfg;
}

std::vector<CaseStudyRow> run_case_study(const ExperimentSpec& spec) {
  spec.validate();
  if (!is_simulated(spec.kind)) throw ConfigError(spec.name + ": not a case-study experiment");
  std::vector<CaseStudyRow> rows;
  for (double v : spec.sweep.values) {
    const auto params = with_sweep_value(spec.fixed, spec.sweep.param, v);
    const auto cfg = case_sim_config(spec.kind, params);
    rows.push_back({v, model_success_rate(cfg.behavior.pattern, cfg.bs), run_experiment(cfg, params.trials)});
  }
  return rows;
}

std::vector<OverlapRow> overlap_table(std::size_t range, double rp, std::span<const double> alphas) {
  std::vector<OverlapRow> rows;
  for (double a : alphas) {
    ExperimentParams p;
    p.range = range;
    p.alpha = a;
    p.rp = rp;
    const auto pattern = case_pattern(ExperimentKind::OverlapTable, p);
    const double area = overlap_area(zipf_pmf({range, a, false}), zipf_pmf({range, a, true}));
    rows.push_back({a, ww_key_conflict_prob(pattern), pairwise_failure_probs(pattern).p_ww, area,
                    round_half_up(area, 2)});
  }
  return rows;
}

LatencyReport latency_report(std::span<const LatencySample> samples, double bp_rate) {
  LatencyReport report;
  report.model = fit_linear_coeffs(samples);
  report.fitted = true;
  for (const auto& s : samples) {
    LatencyRow row;
    row.bs = s.design.batch_size;
    row.bto = s.design.batch_timeout;
    row.arrival_rate = s.env.arrival_rate;
    row.measured = s.measured_latency;
    row.predicted = expected_latency(s.env, s.design, report.model);
    if (s.measured_latency != 0.0) row.relative_error = (row.predicted - s.measured_latency) / s.measured_latency;
    row.saturation = saturation_check(s.env, s.design, bp_rate);
    report.rows.push_back(row);
  }
  return report;
}

LatencyReport run_latency(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.kind != ExperimentKind::LatencySweep) throw ConfigError(spec.name + ": not a latency experiment");
  const auto& f = spec.fixed;
  if (!f.measurements.empty()) {
    std::ifstream in(f.measurements);
    if (!in) throw DataError("cannot read measurements file " + f.measurements.string());
    const auto samples = read_measurements(in);
    return latency_report(samples, f.bp_rate);
  }
  LatencyReport report;
  report.model = {f.c0, f.c1, 0.0};
  for (double v : spec.sweep.values) {
    const auto p = with_sweep_value(f, spec.sweep.param, v);
    EnvironmentParams env;
    env.arrival_rate = p.arrival_rate;
    const BlockDesign design{p.bs, p.bto, "SHA256"};
    LatencyRow row;
    row.bs = p.bs;
    row.bto = p.bto;
    row.arrival_rate = p.arrival_rate;
    row.predicted = expected_latency(env, design, report.model);
    row.saturation = saturation_check(env, design, p.bp_rate);
    report.rows.push_back(row);
  }
  return report;
}

std::string case_study_csv(const ExperimentSpec& spec, std::span<const CaseStudyRow> rows) {
  std::ostringstream out;
  out << to_string(spec.sweep.param) << ",model,p1,p50,p99\n";
  for (const auto& r : rows) {
    out << fmt(r.value) << ',' << fmt(r.model) << ',' << fmt(r.sim.p1) << ',' << fmt(r.sim.p50) << ','
        << fmt(r.sim.p99) << '\n';
  }
  return out.str();
}

namespace {

std::string plot_preamble(const std::string& name, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream out;
  out << "# gnuplot script for " << name << "; run: gnuplot " << name << ".gp\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 720,480\n"
      << "set output '" << name << ".png'\n"
      << "set xlabel '" << xlabel << "'\n"
      << "set ylabel '" << ylabel << "'\n"
      << "set key bottom left\n"
      << "set grid\n";
  if (xlabel == "bs") out << "set logscale x 2\n";
  return out.str();
}

}  // namespace

std::string case_study_plot(const ExperimentSpec& spec, std::span<const CaseStudyRow> rows) {
  std::ostringstream out;
  out << plot_preamble(spec.name, to_string(spec.sweep.param), "success rate");
  out << "$data << EOD\n";
  const std::string csv = case_study_csv(spec, rows);
  out << csv.substr(csv.find('\n') + 1);
  out << "EOD\n"
      << "plot $data using 1:3:5 with filledcurves lc rgb '#ffa500' fs transparent solid 0.3 "
         "title '1-99 percentile', \\\n"
      << "     $data using 1:4 with linespoints lc rgb '#ff8c00' title 'median simulation', \\\n"
      << "     $data using 1:2 with linespoints lc rgb '#1f77b4' title 'model'\n";
  return out.str();
}

std::string overlap_csv(std::span<const OverlapRow> rows) {
  std::ostringstream out;
  out << "alpha,ww_key_conflict,p_ww_fail,overlap_area,overlap_area_2dp\n";
  for (const auto& r : rows) {
    out << fmt(r.alpha) << ',' << fmt(r.ww_key_conflict) << ',' << fmt(r.p_ww) << ',' << fmt(r.overlap) << ','
        << fmt(r.overlap_rounded) << '\n';
  }
  return out.str();
}

std::string latency_csv(const LatencyReport& report) {
  std::ostringstream out;
  out << "bs,bto_seconds,arrival_rate,measured_latency_seconds,predicted_latency_seconds,relative_error,"
         "saturated,margin\n";
  for (const auto& r : report.rows) {
    out << r.bs << ',' << fmt(r.bto) << ',' << fmt(r.arrival_rate) << ','
        << (r.measured ? fmt(*r.measured) : "") << ',' << fmt(r.predicted) << ','
        << (r.relative_error ? fmt(*r.relative_error) : "") << ',' << (r.saturation.saturated ? 1 : 0) << ','
        << fmt(r.saturation.margin) << '\n';
  }
  return out.str();
}

std::string latency_fit_csv(const LatencyReport& report) {
  std::ostringstream out;
  out << "c0,c1,rmse,fitted\n"
      << fmt(report.model.c0) << ',' << fmt(report.model.c1) << ',' << fmt(report.model.rmse) << ','
      << (report.fitted ? 1 : 0) << '\n';
  return out.str();
}

std::string latency_plot(const ExperimentSpec& spec, const LatencyReport& report) {
  std::ostringstream out;
  out << plot_preamble(spec.name, "bs", "average transaction latency (s)");
  out << "$data << EOD\n";
  for (const auto& r : report.rows) {
    out << r.bs << ',' << (r.measured ? fmt(*r.measured) : "NaN") << ',' << fmt(r.predicted) << '\n';
  }
  out << "EOD\n";
  if (report.fitted) {
    out << "plot $data using 1:2 with points pt 7 title 'measured', \\\n"
        << "     $data using 1:3 with linespoints title 'model'\n";
  } else {
    out << "plot $data using 1:3 with linespoints title 'model'\n";
  }
  return out.str();
}

std::vector<fs::path> execute(const ExperimentSpec& spec) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec || !fs::is_directory(spec.output_dir)) {
    throw ConfigError("cannot create output directory " + spec.output_dir.string());
  }
  const auto base = spec.output_dir / spec.name;
  std::vector<fs::path> written;
  auto emit = [&](const std::string& suffix, const std::string& content) {
    auto path = base;
    path += suffix;
    text::write_file(path, content);
    written.push_back(path);
  };

  switch (spec.kind) {
    case ExperimentKind::Case1AllWrite:
    case ExperimentKind::Case2ReadWrite:
    case ExperimentKind::Case3SplitRW: {
      const auto rows = run_case_study(spec);
      emit(".csv", case_study_csv(spec, rows));
      emit(".gp", case_study_plot(spec, rows));
      break;
    }
    case ExperimentKind::OverlapTable:
      emit(".csv", overlap_csv(overlap_table(spec.fixed.range, spec.fixed.rp, spec.sweep.values)));
      break;
    case ExperimentKind::LatencySweep: {
      const auto report = run_latency(spec);
      emit(".csv", latency_csv(report));
      emit("_fit.csv", latency_fit_csv(report));
      emit(".gp", latency_plot(spec, report));
      break;
    }
  }
  return written;
}

}  // namespace blockcalc

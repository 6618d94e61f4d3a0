#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blockcalc/error.hpp"
#include "blockcalc/experiment.hpp"
#include "blockcalc/text_io.hpp"
#include "doctest.h"

using namespace blockcalc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("blockcalc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(text::split(line, ','));
  return rows;
}

ExperimentSpec quick(ExperimentKind kind, SweepParam param, std::vector<double> values) {
  ExperimentSpec s;
  s.name = "quick";
  s.kind = kind;
  s.sweep = {param, std::move(values)};
  s.fixed.trials = 8;
  s.fixed.ops = 400;
  return s;
}

std::string synthetic_measurements(double c0, double c1, double rate, double bto) {
  std::ostringstream out;
  out << "bs,bto_seconds,arrival_rate,measured_latency_seconds\n";
  for (std::size_t bs : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
    const double y = std::min(bto, static_cast<double>(bs) / rate) / 2.0 + c0 * static_cast<double>(bs) + c1;
    out << bs << ',' << text::fmt(bto) << ',' << text::fmt(rate) << ',' << text::fmt(y) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(text::fmt(50.0) == "50");
  CHECK(text::fmt(0.25) == "0.25");
  CHECK(text::fmt(1.03) == "1.03");
  const double v = 0.1 + 0.2;
  CHECK(text::parse_double(text::fmt(v)) == v);
  CHECK_THROWS(text::parse_double("1.5x"));
  CHECK_THROWS(text::parse_uint("-3"));
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    for (const auto& spec : preset(name)) CHECK_NOTHROW(spec.validate());
  }
  const auto fig8 = preset("fig8");
  REQUIRE(fig8.size() == 3);
  CHECK(fig8[0].kind == ExperimentKind::Case1AllWrite);
  CHECK(fig8[0].fixed.bs == 8);
  CHECK(fig8[0].fixed.range == 100);
  CHECK(fig8[1].fixed.alpha == 1.03);
  CHECK(fig8[0].fixed.trials == 50);
  CHECK(fig8[0].fixed.ops == 1000);
  const auto fig11 = preset("fig11");
  CHECK(fig11[1].fixed.rp == 0.5);
  CHECK_THROWS_AS(preset("fig99"), ConfigError);
  CHECK_THROWS_AS(load_experiments("no-such-preset-or-file"), ConfigError);
}

TEST_CASE("spec validation") {
  auto s = quick(ExperimentKind::Case1AllWrite, SweepParam::ReadProb, {0.1, 0.2});
  CHECK_THROWS_AS(s.validate(), ConfigError);  // rp is fixed in case 1
  s = quick(ExperimentKind::Case3SplitRW, SweepParam::Alpha, {1.05, 1.03});
  CHECK_THROWS_AS(s.validate(), ConfigError);  // not increasing
  s = quick(ExperimentKind::Case3SplitRW, SweepParam::Alpha, {});
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick(ExperimentKind::Case1AllWrite, SweepParam::BlockSize, {2.5});
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick(ExperimentKind::Case1AllWrite, SweepParam::Alpha, {0.9, 1.1});
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick(ExperimentKind::OverlapTable, SweepParam::BlockSize, {1, 2});
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick(ExperimentKind::Case1AllWrite, SweepParam::Alpha, {1.1});
  s.name = "bad/name";
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("config documents") {
  SUBCASE("sections inherit top-level defaults") {
    std::istringstream in(R"(# shared
trials = 5
ops = 200
seed = 9

[alpha_sweep]
kind = case3
sweep = alpha
values = 1.01, 1.05, 1.09

[bs_sweep]
kind = case1
sweep = bs
values = 1, 4, 16
trials = 3
)");
    const auto specs = parse_experiment_config(in, ".");
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].name == "alpha_sweep");
    CHECK(specs[0].kind == ExperimentKind::Case3SplitRW);
    CHECK(specs[0].sweep.values == std::vector<double>{1.01, 1.05, 1.09});
    CHECK(specs[0].fixed.trials == 5);
    CHECK(specs[0].fixed.seed == 9);
    CHECK(specs[1].fixed.trials == 3);
    CHECK(specs[1].fixed.ops == 200);
  }
  SUBCASE("single unnamed experiment") {
    std::istringstream in("kind = overlap\nsweep = alpha\nvalues = 1.01, 1.02\nname = ov\n");
    const auto specs = parse_experiment_config(in, ".");
    REQUIRE(specs.size() == 1);
    CHECK(specs[0].name == "ov");
  }
  SUBCASE("relative measurement paths resolve against the config directory") {
    std::istringstream in("[lat]\nkind = latency\nmeasurements = data/m.csv\n");
    const auto specs = parse_experiment_config(in, "/cfg");
    CHECK(specs[0].fixed.measurements == fs::path("/cfg/data/m.csv"));
  }
  SUBCASE("errors name the line") {
    std::istringstream unknown("kind = case1\nsweep = alpha\nvalues = 1.01\nbogus = 3\n");
    CHECK_THROWS_WITH_AS(parse_experiment_config(unknown, "."), doctest::Contains("line 4"), ConfigError);
    std::istringstream bad_num("[a]\nkind = case1\nalpha = fast\n");
    CHECK_THROWS_WITH_AS(parse_experiment_config(bad_num, "."), doctest::Contains("line 3"), ConfigError);
    std::istringstream no_kind("[a]\nsweep = alpha\nvalues = 1.01\n");
    CHECK_THROWS_AS(parse_experiment_config(no_kind, "."), ConfigError);
    std::istringstream bad_sweep("[a]\nkind = case1\nsweep = colour\n");
    CHECK_THROWS_AS(parse_experiment_config(bad_sweep, "."), ConfigError);
  }
}

TEST_CASE("case studies") {
  SUBCASE("case 3: modeled success rises then falls with alpha") {
    auto spec = preset("fig11")[1];
    spec.fixed.trials = 4;
    spec.fixed.ops = 200;
    const auto rows = run_case_study(spec);
    REQUIRE(rows.size() == 5);
    const auto peak = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.model < b.model; });
    CHECK(peak != rows.begin());
    CHECK(peak != rows.end() - 1);
    for (auto it = rows.begin(); it + 1 != rows.end(); ++it) CHECK((it < peak ? it->model < (it + 1)->model : it->model > (it + 1)->model));
  }
  SUBCASE("case 1: modeled success non-increasing in bs") {
    auto spec = preset("fig8")[1];
    spec.fixed.trials = 2;
    const auto rows = run_case_study(spec);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].model <= rows[i - 1].model);
  }
  SUBCASE("emitted model values equal direct library calls") {
    const auto spec = quick(ExperimentKind::Case2ReadWrite, SweepParam::Range, {10, 40});
    const auto rows = run_case_study(spec);
    const auto parsed = csv_rows(case_study_csv(spec, rows));
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0] == std::vector<std::string>{"range", "model", "p1", "p50", "p99"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto p = with_sweep_value(spec.fixed, spec.sweep.param, spec.sweep.values[i]);
      const auto keys = KeyDistribution::zipf({p.range, p.alpha, false});
      const double direct = model_success_rate(AccessPattern(0.5, keys, keys), p.bs);
      CHECK(text::parse_double(parsed[i + 1][1]) == direct);
      const auto sim = run_experiment(case_sim_config(spec.kind, p), p.trials);
      CHECK(text::parse_double(parsed[i + 1][3]) == sim.p50);
    }
  }
}

TEST_CASE("overlap table") {
  const auto rows = overlap_table(100, 0.5, kDefaultAlphaGrid);
  const double ww[] = {0.0108, 0.0164, 0.0248, 0.0339, 0.0431};
  const double area[] = {0.75, 0.36, 0.16, 0.07, 0.03};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::fabs(rows[i].ww_key_conflict - ww[i]) <= 0.0005);
    CHECK(std::fabs(rows[i].overlap - area[i]) <= 0.01);
    CHECK(rows[i].p_ww == doctest::Approx(0.25 * rows[i].ww_key_conflict).epsilon(1e-14));
  }
}

TEST_CASE("latency experiments") {
  const auto dir = scratch_dir("latency");
  SUBCASE("synthetic round trip") {
    text::write_file(dir / "m.csv", synthetic_measurements(0.003, 0.12, 8.0, 2.0));
    ExperimentSpec spec;
    spec.name = "lat";
    spec.kind = ExperimentKind::LatencySweep;
    spec.fixed.measurements = dir / "m.csv";
    const auto report = run_latency(spec);
    CHECK(report.fitted);
    CHECK(report.model.c0 == doctest::Approx(0.003).epsilon(1e-9));
    double worst = 0.0;
    for (const auto& r : report.rows) worst = std::max(worst, std::fabs(*r.relative_error));
    CHECK(worst < 1e-6);
  }
  SUBCASE("saturated measurement row is flagged") {
    text::write_file(dir / "hi.csv",
                     "bs,bto_seconds,arrival_rate,measured_latency_seconds\n1,2,16,11.78\n2,2,16,0.6\n4,2,16,0.55\n");
    ExperimentSpec spec;
    spec.name = "hi";
    spec.kind = ExperimentKind::LatencySweep;
    spec.fixed.measurements = dir / "hi.csv";
    spec.fixed.bp_rate = 11.85;
    const auto report = run_latency(spec);
    CHECK(report.rows[0].saturation.saturated);
    CHECK_FALSE(report.rows[1].saturation.saturated);
    CHECK_FALSE(report.rows[2].saturation.saturated);
    const auto csv = csv_rows(latency_csv(report));
    CHECK(csv[1][6] == "1");
    CHECK(csv[2][6] == "0");
  }
  SUBCASE("empty or missing measurement file is a data error") {
    text::write_file(dir / "empty.csv", "");
    ExperimentSpec spec;
    spec.name = "e";
    spec.kind = ExperimentKind::LatencySweep;
    spec.fixed.measurements = dir / "empty.csv";
    CHECK_THROWS_AS(run_latency(spec), DataError);
    spec.fixed.measurements = dir / "absent.csv";
    CHECK_THROWS_AS(run_latency(spec), DataError);
  }
  SUBCASE("prediction sweep without measurements") {
    auto spec = preset("fig1")[0];
    const auto report = run_latency(spec);
    CHECK_FALSE(report.fitted);
    REQUIRE(report.rows.size() == kDefaultBsGrid.size());
    EnvironmentParams env;
    env.arrival_rate = 8.0;
    CHECK(report.rows[3].predicted == expected_latency(env, {8, 2.0, "SHA256"}, FittedLatencyModel{0.003, 0.12, 0}));
  }
}

TEST_CASE("execute writes deterministic files") {
  const auto dir = scratch_dir("exec");
  auto spec = quick(ExperimentKind::Case3SplitRW, SweepParam::ReadProb, {0.2, 0.8});
  spec.output_dir = dir / "a";
  const auto first = execute(spec);
  spec.output_dir = dir / "b";
  const auto second = execute(spec);
  REQUIRE(first.size() == 2);
  REQUIRE(second.size() == 2);
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(slurp(first[i]) == slurp(second[i]));
  const auto plot = slurp(first[1]);
  CHECK(plot.find("$data << EOD") != std::string::npos);
  CHECK(plot.find("filledcurves") != std::string::npos);

  text::write_file(dir / "file", "x");
  spec.output_dir = dir / "file" / "sub";
  CHECK_THROWS_AS(execute(spec), ConfigError);
}

// blockcalc: block-creation design calculator and transaction conflict simulator.
//
//   blockcalc model success  --kind case1|case2|case3 [--alpha --range --bs --rp]
//   blockcalc model latency  --bs --bto --rate (--c0 --c1 | --m0 --fixed-cycles --cycles-per-bit ...)
//   blockcalc simulate       --kind ... [--clients --seed --trials --ops --trace FILE]
//   blockcalc experiment     <preset|config file> [--seed --trials --ops --out DIR]
//   blockcalc fit            <measurements.csv> [--bp-rate --out DIR --name NAME]
//   blockcalc overlap        [--alpha LIST --range --rp]
//
// Exit status: 0 success, 2 configuration error, 3 data error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blockcalc/conflict_model.hpp"
#include "blockcalc/error.hpp"
#include "blockcalc/experiment.hpp"
#include "blockcalc/latency_model.hpp"
#include "blockcalc/simulator.hpp"
#include "blockcalc/text_io.hpp"

namespace {

using namespace blockcalc;
using text::fmt;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CaseOptions {
  std::string kind = "case1";
  ExperimentParams params;
};

void add_case_options(CLI::App* cmd, CaseOptions& o) {
  cmd->add_option("--kind", o.kind, "case1 (all-write), case2 (read-then-write), case3 (split read/write keys)")
      ->check(CLI::IsMember({"case1", "case2", "case3"}));
  cmd->add_option("--alpha", o.params.alpha, "Zipf skew, > 1");
  cmd->add_option("--range", o.params.range, "number of keys");
  cmd->add_option("--bs", o.params.bs, "block size");
  cmd->add_option("--rp", o.params.rp, "read probability (case3)");
}

// Sends output to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    text::write_file(out_path, content);
  }
}

std::string success_row(const std::string& kind_name, const ExperimentParams& p) {
  const auto kind = parse_kind(kind_name);
  const auto pattern = case_pattern(kind, p);
  const auto fp = pairwise_failure_probs(pattern);
  std::ostringstream out;
  out << "kind,alpha,range,bs,rp,p_rw,p_wr,p_ww,p_b_fail,expected_successes,success_rate\n"
      << kind_name << ',' << fmt(p.alpha) << ',' << p.range << ',' << p.bs << ',' << fmt(pattern.rp()) << ','
      << fmt(fp.p_rw) << ',' << fmt(fp.p_wr) << ',' << fmt(fp.p_ww) << ',' << fmt(fp.p_b_fail) << ','
      << fmt(expected_block_successes(fp, p.bs)) << ',' << fmt(model_success_rate(pattern, p.bs)) << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-creation design calculator and transaction conflict simulator"};
  app.require_subcommand(1);

  // model success / model latency
  auto* model = app.add_subcommand("model", "Evaluate an analytic model");
  model->require_subcommand(1);

  CaseOptions success_opts;
  std::string success_out;
  auto* success = model->add_subcommand("success", "Intra-block transaction success rate");
  add_case_options(success, success_opts);
  success->add_option("--out", success_out, "write CSV here instead of stdout");

  struct LatencyOptions {
    EnvironmentParams env;
    BlockDesign design{8, 2.0, "SHA256"};
    std::optional<double> c0, c1;
    CostCoefficients coeffs;
    double bp_rate = reference::kBpRate;
    std::string out;
  } lat;
  auto* latency = model->add_subcommand("latency", "Average transaction latency");
  latency->add_option("--bs", lat.design.batch_size, "batch size");
  latency->add_option("--bto", lat.design.batch_timeout, "batch timeout, seconds");
  latency->add_option("--rate", lat.env.arrival_rate, "arrival rate, transactions/s");
  latency->add_option("--sf", lat.design.signature_fn, "signature function label");
  auto* c0_opt = latency->add_option("--c0", lat.c0, "fitted seconds per transaction");
  auto* c1_opt = latency->add_option("--c1", lat.c1, "fitted intercept, seconds");
  c0_opt->needs(c1_opt);
  c1_opt->needs(c0_opt);
  latency->add_option("--m0", lat.coeffs.metadata_bits, "block metadata, bits");
  latency->add_option("--fixed-cycles", lat.coeffs.fixed_cycles, "cycles per block outside the signature");
  latency->add_option("--cycles-per-bit", lat.coeffs.cycles_per_bit, "signature cycles per data bit");
  latency->add_option("--ts", lat.env.txn_size_bits, "transaction size, bits");
  latency->add_option("--nb", lat.env.net_bandwidth, "network bandwidth, bits/s");
  latency->add_option("--db", lat.env.disk_bandwidth, "disk bandwidth, bits/s");
  latency->add_option("--cs", lat.env.cpu_speed, "cpu speed, cycles/s");
  latency->add_option("--bp-rate", lat.bp_rate, "peer block processing rate, blocks/s");
  latency->add_option("--out", lat.out, "write CSV here instead of stdout");

  // simulate
  CaseOptions sim_opts;
  std::string sim_out;
  std::string trace_path;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo block validation for one configuration");
  add_case_options(simulate, sim_opts);
  simulate->add_option("--clients", sim_opts.params.clients, "closed-loop clients (default max(bs, 16))");
  simulate->add_option("--seed", sim_opts.params.seed, "master seed");
  simulate->add_option("--trials", sim_opts.params.trials, "number of trials");
  simulate->add_option("--ops", sim_opts.params.ops, "validated operations per trial");
  simulate->add_option("--trace", trace_path, "write the block trace of trial 0 as CSV");
  simulate->add_option("--out", sim_out, "write CSV here instead of stdout");

  // experiment
  std::string experiment_source;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials, ops;
  std::optional<std::string> out_dir;
  auto* experiment = app.add_subcommand("experiment", "Run a preset (fig1, fig8, fig9, fig11, table3) or config file");
  experiment->add_option("source", experiment_source, "preset name or config file")->required();
  experiment->add_option("--seed", seed, "override the master seed");
  experiment->add_option("--trials", trials, "override trials per point");
  experiment->add_option("--ops", ops, "override operations per trial");
  experiment->add_option("--out", out_dir, "override the output directory");

  // fit
  std::string fit_file;
  double fit_bp_rate = reference::kBpRate;
  std::string fit_out = ".";
  std::string fit_name = "latency_fit";
  auto* fit = app.add_subcommand("fit", "Fit the latency model to measurements and compare");
  fit->add_option("measurements", fit_file, "CSV with bs,bto_seconds,arrival_rate,measured_latency_seconds")
      ->required();
  fit->add_option("--bp-rate", fit_bp_rate, "peer block processing rate for the saturation flag");
  fit->add_option("--out", fit_out, "output directory");
  fit->add_option("--name", fit_name, "output file stem");

  // overlap
  std::vector<double> overlap_alphas = kDefaultAlphaGrid;
  std::size_t overlap_range = 100;
  double overlap_rp = 0.5;
  std::string overlap_out;
  auto* overlap = app.add_subcommand("overlap", "Write-write conflict and read/write curve overlap per alpha");
  overlap->add_option("--alpha", overlap_alphas, "alpha values")->delimiter(',');
  overlap->add_option("--range", overlap_range, "number of keys");
  overlap->add_option("--rp", overlap_rp, "read probability");
  overlap->add_option("--out", overlap_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*success) {
      emit(success_out, success_row(success_opts.kind, success_opts.params));
    } else if (*latency) {
      lat.env.validate();
      lat.design.validate();
      std::ostringstream out;
      out << "bs,bto_seconds,arrival_rate,wait_seconds,io_seconds,cpu_seconds,latency_seconds,saturated,margin\n";
      const auto sat = saturation_check(lat.env, lat.design, lat.bp_rate);
      out << lat.design.batch_size << ',' << fmt(lat.design.batch_timeout) << ',' << fmt(lat.env.arrival_rate) << ','
          << fmt(wait_time(lat.env, lat.design)) << ',';
      if (lat.c0) {
        const FittedLatencyModel m{*lat.c0, *lat.c1, 0.0};
        out << ",," << fmt(expected_latency(lat.env, lat.design, m));
      } else {
        lat.coeffs.validate();
        out << fmt(io_time(lat.env, lat.design, lat.coeffs)) << ',' << fmt(cpu_time(lat.env, lat.design, lat.coeffs))
            << ',' << fmt(expected_latency(lat.env, lat.design, lat.coeffs));
      }
      out << ',' << (sat.saturated ? 1 : 0) << ',' << fmt(sat.margin) << '\n';
      emit(lat.out, out.str());
    } else if (*simulate) {
      const auto kind = parse_kind(sim_opts.kind);
      const auto& p = sim_opts.params;
      const auto cfg = case_sim_config(kind, p);
      const auto s = run_experiment(cfg, p.trials);
      std::ostringstream out;
      out << "kind,alpha,range,bs,rp,clients,trials,ops,seed,model,p1,p50,p99,mean\n"
          << sim_opts.kind << ',' << fmt(p.alpha) << ',' << p.range << ',' << p.bs << ','
          << fmt(cfg.behavior.pattern.rp()) << ',' << cfg.num_clients << ',' << p.trials << ',' << p.ops << ','
          << p.seed << ',' << fmt(model_success_rate(cfg.behavior.pattern, cfg.bs)) << ',' << fmt(s.p1) << ','
          << fmt(s.p50) << ',' << fmt(s.p99) << ',' << fmt(s.mean) << '\n';
      emit(sim_out, out.str());
      if (!trace_path.empty()) {
        std::vector<BlockTrace> trace;
        RandomStream rng(trial_seed(cfg.seed, 0));
        run_trial(cfg, rng, &trace);
        std::ostringstream t;
        write_trace_csv(t, trace);
        text::write_file(trace_path, t.str());
      }
    } else if (*experiment) {
      auto specs = load_experiments(experiment_source);
      for (auto& spec : specs) {
        if (seed) spec.fixed.seed = *seed;
        if (trials) spec.fixed.trials = *trials;
        if (ops) spec.fixed.ops = *ops;
        if (out_dir) spec.output_dir = *out_dir;
        for (const auto& path : execute(spec)) std::cout << path.string() << '\n';
      }
    } else if (*fit) {
      ExperimentSpec spec;
      spec.name = fit_name;
      spec.kind = ExperimentKind::LatencySweep;
      spec.fixed.measurements = fit_file;
      spec.fixed.bp_rate = fit_bp_rate;
      spec.output_dir = fit_out;
      for (const auto& path : execute(spec)) std::cout << path.string() << '\n';
    } else if (*overlap) {
      ZipfSpec{overlap_range, overlap_alphas.empty() ? 0.0 : overlap_alphas.front(), false}.validate();
      emit(overlap_out, overlap_csv(overlap_table(overlap_range, overlap_rp, overlap_alphas)));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

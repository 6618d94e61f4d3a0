#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "blockcalc/conflict_model.hpp"
#include "blockcalc/rng.hpp"

namespace blockcalc {

enum class OpType : std::uint8_t { Read, Write };
enum class Verdict : std::uint8_t { Success, RWFail, WRFail, WWFail };

const char* to_string(OpType op);
const char* to_string(Verdict v);

struct Transaction {
  std::uint32_t client_id = 0;
  OpType op = OpType::Write;
  Key key = 1;
  std::uint32_t attempt = 1;  // 1 for a first submission, +1 per resubmission

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct BlockTrace {
  std::vector<Transaction> txns;
  std::vector<Verdict> verdicts;

  std::size_t successes() const;
};

// Applies the intra-block failure rules. Slot j fails when some earlier slot i
// touches the same key and (i, j) is read/write, write/read or write/write.
// Earlier slots count whether or not they failed themselves, and the verdict
// names the category of the earliest such i.
BlockTrace validate_block(std::span<const Transaction> txns);

enum class ClientKind : std::uint8_t {
  AllWrite,              // fresh write per submission, no retries
  ReadThenWriteRetry,    // read k, then write k, then a new k; failures resubmit
  IndependentReadWrite,  // read with probability rp else write, no retries
};

const char* to_string(ClientKind kind);

struct ClientBehavior {
  ClientKind kind = ClientKind::AllWrite;
  AccessPattern pattern;

  // AllWrite needs rp == 0; ReadThenWriteRetry needs identical read and write keys.
  void validate() const;
};

struct SimConfig {
  ClientBehavior behavior;
  std::size_t bs = 8;
  std::size_t num_clients = 16;
  std::size_t total_operations = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

inline std::size_t default_num_clients(std::size_t bs) { return bs > 16 ? bs : 16; }

struct TrialSummary {
  std::size_t successes = 0;
  std::size_t validated = 0;
  double rate = 0.0;

  friend bool operator==(const TrialSummary&, const TrialSummary&) = default;
};

struct PercentileSummary {
  double p1 = 0.0;
  double p50 = 0.0;
  double p99 = 0.0;
  double mean = 0.0;
  std::size_t trials = 0;

  friend bool operator==(const PercentileSummary&, const PercentileSummary&) = default;
};

// One closed-loop trial. Every client keeps exactly one transaction pending;
// each block takes bs distinct clients in random order and each of them learns
// its verdict before the next block. Runs until at least total_operations
// slots are validated. Appends every block to `trace` when non-null.
TrialSummary run_trial(const SimConfig& config, RandomStream& rng, std::vector<BlockTrace>* trace = nullptr);

// Nearest-rank percentile of ascending `sorted`, pct in (0, 100].
double nearest_rank(std::span<const double> sorted, double pct);

PercentileSummary summarize_rates(std::vector<double> rates);

// Per-trial rates for trials 0..trials-1, trial i seeded with
// trial_seed(config.seed, i). The parallel and serial versions return
// identical vectors.
std::vector<double> trial_rates(const SimConfig& config, std::size_t trials);
std::vector<double> trial_rates_serial(const SimConfig& config, std::size_t trials);

PercentileSummary run_experiment(const SimConfig& config, std::size_t trials);
PercentileSummary run_experiment_serial(const SimConfig& config, std::size_t trials);

// CSV: block_index,slot,client,op,key,attempt,verdict.
void write_trace_csv(std::ostream& out, std::span<const BlockTrace> blocks);

}  // namespace blockcalc

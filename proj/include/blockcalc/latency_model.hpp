#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace blockcalc {

// Environment of the ordering service. Units: transactions/s, bits, bits/s,
// bits/s, cycles/s.
struct EnvironmentParams {
  double arrival_rate = 8.0;
  double txn_size_bits = 8000.0;
  double net_bandwidth = 1e9;
  double disk_bandwidth = 1e9;
  double cpu_speed = 2.2e9;

  void validate() const;
};

// Block cutting configuration. signature_fn is a label only; its cost enters
// through the cost coefficients or the fitted model.
struct BlockDesign {
  std::size_t batch_size = 1;
  double batch_timeout = 2.0;
  std::string signature_fn = "SHA256";

  void validate() const;
};

// Cycle-denominated cost of creating one block.
struct CostCoefficients {
  double metadata_bits = 0.0;   // per-block metadata size
  double fixed_cycles = 0.0;    // cycles outside the signature function
  double cycles_per_bit = 0.0;  // signature cost per bit of block data

  void validate() const;
};

// Seconds-denominated fit of io + cpu time as slope * BS + intercept.
// A CostCoefficients set maps onto it as
//   slope     = TS/DB + TS/NB + cycles_per_bit*TS/CS
//   intercept = m0/DB + m0/NB + fixed_cycles/CS.
struct FittedLatencyModel {
  double c0 = 0.0;    // seconds per transaction in the block
  double c1 = 0.0;    // seconds
  double rmse = 0.0;  // fit residual, seconds
};

FittedLatencyModel to_fitted(const EnvironmentParams& env, const CostCoefficients& coeffs);

double io_time(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs);
double cpu_time(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs);

// Mean time a transaction waits for its block to be cut: min(BTO, BS/R) / 2.
double wait_time(const EnvironmentParams& env, const BlockDesign& design);

double expected_latency(const EnvironmentParams& env, const BlockDesign& design, const FittedLatencyModel& fitted);
double expected_latency(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs);

struct LatencySample {
  BlockDesign design;
  EnvironmentParams env;
  double measured_latency = 0.0;
};

// Least-squares fit of (measured - wait) against BS. Throws DataError with
// fewer than two samples or when every sample has the same BS.
FittedLatencyModel fit_linear_coeffs(std::span<const LatencySample> samples);

struct SaturationDiagnostic {
  bool saturated = false;
  double margin = 0.0;  // R / (BS * bp_rate)
};

// Flags R > BS * bp_rate, where transactions queue before block formation and
// expected_latency under-predicts.
SaturationDiagnostic saturation_check(const EnvironmentParams& env, const BlockDesign& design, double bp_rate);

// Reference peer-side block processing measurements for BS = 1.
namespace reference {
inline constexpr double kStateValidationMs = 0.09;
inline constexpr double kBlockAndPrivateDataCommitMs = 49.83;
inline constexpr double kStateCommitMs = 15.75;
inline constexpr double kHistoryDbMs = 15.79;
// Whole-block time as measured. The components above add to 81.46 ms; the
// remainder is unattributed.
inline constexpr double kPeerBlockProcessingMs = 84.32;
inline constexpr double kBpRate = 11.85;  // blocks per second
}  // namespace reference

// Measurement CSV: header row naming bs, bto_seconds, arrival_rate and
// measured_latency_seconds in any order; extra columns are ignored. Throws
// DataError naming the offending line.
std::vector<LatencySample> read_measurements(std::istream& in);

}  // namespace blockcalc

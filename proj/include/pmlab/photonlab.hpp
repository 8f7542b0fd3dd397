#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pmlab/entropic.hpp"
#include "pmlab/nct.hpp"
#include "pmlab/pmsquare.hpp"

namespace pmlab::photonlab {

using entropic::EntropySextet;
using entropic::InequalityVerdict;
using nct::PairDistribution;
using pmsquare::Context;
using pmsquare::JointDistribution8;
using pmsquare::ObservableId;
using pmsquare::ProductDistribution;
using qcore::DensityMatrix;

/// Calibrated default channel strength: lands the five finite-shot report
/// entropies in the observed band around 0.05 bits at 20000 shots.
inline constexpr double kDefaultDepolarizing = 0.025;

/// Imperfection model for the simulated run. One global depolarizing channel
/// is applied to the prepared state and once more inside each measurement
/// sequence (after its first measurement); the second application is the one
/// that produces parity errors, at rate p/2 per sequence. The jitter field
/// perturbs wave-plate angles and is consumed only by optics diagnostics.
struct NoiseModel {
  double depolarizing = 0.0;
  double angle_jitter_sigma_deg = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel depolarizing_default() { return {kDefaultDepolarizing, 0.0}; }

  /// Grammar: "none" | "depol:default" | "depol:<float in [0,1]>".
  static NoiseModel parse(std::string_view text);
  std::string to_string() const;
};

/// Shot-noise plan. Counts are Poissonian per outcome bin with mean
/// shots * p(bin); sigma outputs need at least 100 bootstrap resamples.
struct ShotPlan {
  long long shots = 20000;
  int resamples = 1000;
  std::uint64_t master_seed = 0;
};

inline constexpr int kMinResamples = 100;

enum class RunMode { Analytic, Sampled };

RunMode run_mode_from_string(std::string_view text);
std::string to_string(RunMode mode);

/// Raw counts for one state: eight bins per context (canonical order) and
/// four bins per classical pair measurement (nct::kClassicalPairs order).
struct CountRecord {
  std::array<std::array<long long, 8>, 6> context_counts{};
  std::array<std::array<long long, 4>, 4> pair_counts{};
};

/// (1-p) rho + p * 1/4; p outside [0,1] is rejected with InvalidInput.
DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p);

/// Joint distribution of a sequentially measured context with the
/// depolarizing channel applied once after the first measurement.
/// Reduces to pmsquare::joint_distribution at p = 0.
JointDistribution8 noisy_joint(const DensityMatrix& rho, const Context& ctx, double p);

/// Same insertion for a two-observable (pair) sequence.
PairDistribution noisy_pair(const DensityMatrix& rho, ObservableId first,
                            ObservableId second, double p);

/// One independent Poisson variate per outcome bin, mean shots * p(bin).
std::array<long long, 8> poisson_counts(const JointDistribution8& dist, long long shots,
                                        std::mt19937_64& rng);
std::array<long long, 4> poisson_counts(const PairDistribution& dist, long long shots,
                                        std::mt19937_64& rng);

/// Relative frequencies; all-zero counts are rejected with InvalidInput.
JointDistribution8 empirical_distribution(const std::array<long long, 8>& counts);
PairDistribution empirical_pair(const std::array<long long, 4>& counts);

/// Full per-state evaluation from six quantum product distributions plus the
/// two driving pair distributions: classical model, equal mixing, entropy
/// terms, verdict.
struct Evaluation {
  EntropySextet sextet;
  InequalityVerdict verdict;
};
Evaluation evaluate_distributions(const std::array<ProductDistribution, 6>& quantum,
                                  const PairDistribution& pair_Aa,
                                  const PairDistribution& pair_Bb);

/// Poisson bootstrap over every bin of a count record. Resamples the counts,
/// reruns the full evaluation, and reports the spread of each entropy term
/// and of the margin. Finite for boundary frequencies (zero-count bins stay
/// zero under Poisson resampling).
struct BootstrapStats {
  std::array<double, 6> sigma_h{};
  std::array<double, 6> mean_h{};
  double sigma_margin = 0.0;
  double mean_margin = 0.0;
};
BootstrapStats bootstrap_sigma(const CountRecord& counts, int resamples,
                               std::mt19937_64& rng);

/// Bootstrap spread of one binary entropy from a (plus,minus) count pair;
/// cross-check helper for the error model.
struct ScalarBootstrap {
  double sigma_h = 0.0;
  double mean_h = 0.0;
};
ScalarBootstrap bootstrap_sigma_binary(long long plus, long long minus, int resamples,
                                       std::mt19937_64& rng);

/// First-order error propagation sigma_H ~ |log2((1-p)/p)| * sqrt(p(1-p)/n).
/// Valid away from p in {0, 1/2, 1}; returns 0 at the boundaries.
double entropy_sigma_first_order(double p_hat, long long n);

/// One report row. In analytic mode the sigma fields are 0 and the
/// SD-of-violation is +infinity (no shot noise).
struct ReportRow {
  std::string state_label;
  std::array<double, 6> entropy{};
  std::array<double, 6> entropy_sigma{};
  double margin = 0.0;
  double margin_sigma = 0.0;
  double sd_violation = 0.0;
};

struct ExperimentReport {
  std::string version;
  std::uint64_t master_seed = 0;
  long long shots = 0;
  int resamples = 0;
  std::string noise;
  std::string mode;
  std::vector<ReportRow> rows;
};

/// Full pipeline for one state. The label seeds the per-state RNG streams
/// (contexts, pairs, bootstrap), so results do not depend on evaluation
/// order across states.
ReportRow run_state(const std::string& label, const DensityMatrix& rho,
                    const NoiseModel& noise, const ShotPlan& plan, RunMode mode);

/// Catalog run over the given labels; `threads` workers share the row list.
/// Output is identical for any thread count and any label permutation
/// (per-state seed derivation).
ExperimentReport run_table(const std::vector<std::string>& labels, const NoiseModel& noise,
                           const ShotPlan& plan, RunMode mode, int threads = 1);

}  // namespace pmlab::photonlab

#include "pmlab/photonlab.hpp"

#include <atomic>
#include <charconv>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include "pmlab/seeding.hpp"
#include "pmlab/version.hpp"

namespace pmlab::photonlab {

namespace {

using qcore::Operator4;
using qcore::projector_pm;

Operator4 depolarize_raw(const Operator4& rho, double p) {
  // Trace-linear form, valid for unnormalized intermediate states.
  return (1.0 - p) * rho + p * rho.trace().real() * Operator4::Identity() / 4.0;
}

void check_strength(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("depolarizing strength must lie in [0,1]");
  }
}

double clamp_prob(double v) {
  if (v < pmsquare::kProbFloor) {
    throw ContractViolation("probability below -1e-10");
  }
  return std::max(v, 0.0);
}

std::string format_strength(double p) {
  // Shortest decimal form that parses back to the same double.
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, p);
    double back = 0.0;
    auto [ptr, ec] = std::from_chars(buf, buf + std::strlen(buf), back);
    if (ec == std::errc() && ptr == buf + std::strlen(buf) && back == p) break;
  }
  return buf;
}

}  // namespace

NoiseModel NoiseModel::parse(std::string_view text) {
  if (text == "none") return NoiseModel::none();
  constexpr std::string_view prefix = "depol:";
  if (text.substr(0, prefix.size()) == prefix) {
    std::string_view arg = text.substr(prefix.size());
    if (arg == "default") return NoiseModel::depolarizing_default();
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw InvalidInput("malformed noise spec '" + std::string(text) + "'");
    }
    check_strength(p);
    return NoiseModel{p, 0.0};
  }
  throw InvalidInput("unknown noise spec '" + std::string(text) +
                     "' (expected none | depol:<float> | depol:default)");
}

std::string NoiseModel::to_string() const {
  if (depolarizing == 0.0) return "none";
  return "depol:" + format_strength(depolarizing);
}

RunMode run_mode_from_string(std::string_view text) {
  if (text == "analytic") return RunMode::Analytic;
  if (text == "sampled") return RunMode::Sampled;
  throw InvalidInput("unknown mode '" + std::string(text) +
                     "' (expected analytic | sampled)");
}

std::string to_string(RunMode mode) {
  return mode == RunMode::Analytic ? "analytic" : "sampled";
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p) {
  check_strength(p);
  return DensityMatrix(depolarize_raw(rho.matrix(), p));
}

JointDistribution8 noisy_joint(const DensityMatrix& rho, const Context& ctx, double p) {
  check_strength(p);
  std::array<Operator4, 3> proj_plus = {projector_pm(pmsquare::observable(ctx.at(1)), 1),
                                        projector_pm(pmsquare::observable(ctx.at(2)), 1),
                                        projector_pm(pmsquare::observable(ctx.at(3)), 1)};
  auto proj = [&](int k, int s) {
    return s == 1 ? proj_plus[static_cast<std::size_t>(k)]
                  : Operator4(Operator4::Identity() - proj_plus[static_cast<std::size_t>(k)]);
  };
  JointDistribution8 out;
  for (int s1 : {1, -1}) {
    Operator4 r1 = proj(0, s1) * rho.matrix() * proj(0, s1);
    r1 = depolarize_raw(r1, p);
    for (int s2 : {1, -1}) {
      Operator4 r2 = proj(1, s2) * r1 * proj(1, s2);
      for (int s3 : {1, -1}) {
        double v = (r2 * proj(2, s3)).trace().real();
        out.at(s1, s2, s3) = clamp_prob(v);
      }
    }
  }
  if (std::abs(out.sum() - 1.0) > pmsquare::kNormCheckTol) {
    throw ContractViolation("noisy joint distribution does not sum to 1 within 1e-8");
  }
  return out;
}

PairDistribution noisy_pair(const DensityMatrix& rho, ObservableId first,
                            ObservableId second, double p) {
  check_strength(p);
  std::array<ObservableId, 2> ids = {first, second};
  if (!pmsquare::check_compatibility(ids)) {
    throw InvalidInput("pair observables do not commute");
  }
  Operator4 p1 = projector_pm(pmsquare::observable(first), 1);
  Operator4 p2 = projector_pm(pmsquare::observable(second), 1);
  auto pick = [](const Operator4& plus, int s) {
    return s == 1 ? plus : Operator4(Operator4::Identity() - plus);
  };
  PairDistribution out;
  double total = 0.0;
  for (int s1 : {1, -1}) {
    Operator4 r1 = pick(p1, s1) * rho.matrix() * pick(p1, s1);
    r1 = depolarize_raw(r1, p);
    for (int s2 : {1, -1}) {
      double v = (r1 * pick(p2, s2)).trace().real();
      v = clamp_prob(v);
      out.at(s1, s2) = v;
      total += v;
    }
  }
  if (std::abs(total - 1.0) > pmsquare::kNormCheckTol) {
    throw ContractViolation("noisy pair distribution does not sum to 1 within 1e-8");
  }
  return out;
}

namespace {

template <std::size_t N>
std::array<long long, N> poisson_bins(const std::array<double, N>& probs, long long shots,
                                      std::mt19937_64& rng) {
  if (shots < 1) throw InvalidInput("shots must be at least 1");
  std::array<long long, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    double mean = static_cast<double>(shots) * probs[i];
    if (mean <= 0.0) {
      out[i] = 0;
      continue;
    }
    std::poisson_distribution<long long> poi(mean);
    out[i] = poi(rng);
  }
  return out;
}

template <std::size_t N>
std::array<double, N> frequencies(const std::array<long long, N>& counts) {
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw InvalidInput("negative count");
    total += c;
  }
  if (total == 0) throw InvalidInput("cannot normalize all-zero counts");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return out;
}

}  // namespace

std::array<long long, 8> poisson_counts(const JointDistribution8& dist, long long shots,
                                        std::mt19937_64& rng) {
  return poisson_bins(dist.p, shots, rng);
}

std::array<long long, 4> poisson_counts(const PairDistribution& dist, long long shots,
                                        std::mt19937_64& rng) {
  return poisson_bins(dist.p, shots, rng);
}

JointDistribution8 empirical_distribution(const std::array<long long, 8>& counts) {
  JointDistribution8 out;
  out.p = frequencies(counts);
  return out;
}

PairDistribution empirical_pair(const std::array<long long, 4>& counts) {
  PairDistribution out;
  out.p = frequencies(counts);
  return out;
}

Evaluation evaluate_distributions(const std::array<ProductDistribution, 6>& quantum,
                                  const PairDistribution& pair_Aa,
                                  const PairDistribution& pair_Bb) {
  auto classical = nct::classical_products_from_pairs(pair_Aa, pair_Bb);
  auto mixed = nct::mix(quantum, classical);
  Evaluation ev;
  ev.sextet = entropic::inequality_terms(mixed);
  ev.verdict = entropic::evaluate(ev.sextet);
  return ev;
}

namespace {

Evaluation evaluate_counts(const CountRecord& counts) {
  std::array<ProductDistribution, 6> quantum;
  for (std::size_t i = 0; i < 6; ++i) {
    quantum[i] = pmsquare::product_distribution(empirical_distribution(counts.context_counts[i]));
  }
  PairDistribution d_Aa = empirical_pair(counts.pair_counts[0]);
  PairDistribution d_Bb = empirical_pair(counts.pair_counts[1]);
  return evaluate_distributions(quantum, d_Aa, d_Bb);
}

CountRecord resample(const CountRecord& counts, std::mt19937_64& rng) {
  CountRecord out;
  auto draw = [&](long long mean_count) -> long long {
    if (mean_count <= 0) return 0;
    std::poisson_distribution<long long> poi(static_cast<double>(mean_count));
    return poi(rng);
  };
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      out.context_counts[i][j] = draw(counts.context_counts[i][j]);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 4; ++j)
      out.pair_counts[k][j] = draw(counts.pair_counts[k][j]);
  return out;
}

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
  }
  double mean(int n) const { return sum / n; }
  double sigma(int n) const {
    double m = mean(n);
    double var = (sumsq - static_cast<double>(n) * m * m) / (n - 1);
    return std::sqrt(std::max(var, 0.0));
  }
};

}  // namespace

BootstrapStats bootstrap_sigma(const CountRecord& counts, int resamples,
                               std::mt19937_64& rng) {
  if (resamples < kMinResamples) {
    throw InvalidInput("bootstrap needs at least 100 resamples");
  }
  std::array<Accumulator, 6> acc_h;
  Accumulator acc_margin;
  for (int r = 0; r < resamples; ++r) {
    Evaluation ev = evaluate_counts(resample(counts, rng));
    for (std::size_t i = 0; i < 6; ++i) acc_h[i].add(ev.sextet.h[i]);
    acc_margin.add(ev.verdict.margin);
  }
  BootstrapStats out;
  for (std::size_t i = 0; i < 6; ++i) {
    out.sigma_h[i] = acc_h[i].sigma(resamples);
    out.mean_h[i] = acc_h[i].mean(resamples);
  }
  out.sigma_margin = acc_margin.sigma(resamples);
  out.mean_margin = acc_margin.mean(resamples);
  return out;
}

ScalarBootstrap bootstrap_sigma_binary(long long plus, long long minus, int resamples,
                                       std::mt19937_64& rng) {
  if (resamples < kMinResamples) {
    throw InvalidInput("bootstrap needs at least 100 resamples");
  }
  if (plus < 0 || minus < 0 || plus + minus == 0) {
    throw InvalidInput("counts must be nonnegative with a positive total");
  }
  auto draw = [&](long long mean_count) -> long long {
    if (mean_count <= 0) return 0;
    std::poisson_distribution<long long> poi(static_cast<double>(mean_count));
    return poi(rng);
  };
  Accumulator acc;
  for (int r = 0; r < resamples; ++r) {
    long long rp = draw(plus);
    long long rm = draw(minus);
    if (rp + rm == 0) {
      // Entire resample empty (possible only for tiny totals); entropy of a
      // degenerate draw is 0.
      acc.add(0.0);
      continue;
    }
    double fp = static_cast<double>(rp) / static_cast<double>(rp + rm);
    acc.add(entropic::h_binary(ProductDistribution{fp, 1.0 - fp}));
  }
  return ScalarBootstrap{acc.sigma(resamples), acc.mean(resamples)};
}

double entropy_sigma_first_order(double p_hat, long long n) {
  if (n < 1) throw InvalidInput("sample size must be at least 1");
  if (p_hat < 0.0 || p_hat > 1.0) throw InvalidInput("frequency must lie in [0,1]");
  if (p_hat == 0.0 || p_hat == 1.0) return 0.0;
  double slope = std::abs(std::log2((1.0 - p_hat) / p_hat));
  return slope * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

ReportRow run_state(const std::string& label, const DensityMatrix& rho,
                    const NoiseModel& noise, const ShotPlan& plan, RunMode mode) {
  double p = noise.depolarizing;
  DensityMatrix prepared = apply_depolarizing(rho, p);

  std::array<JointDistribution8, 6> exact_ctx;
  for (std::size_t i = 0; i < 6; ++i) {
    exact_ctx[i] = noisy_joint(prepared, pmsquare::contexts()[i], p);
  }
  std::array<PairDistribution, 4> exact_pair;
  for (std::size_t k = 0; k < 4; ++k) {
    exact_pair[k] = noisy_pair(prepared, nct::kClassicalPairs[k][0],
                               nct::kClassicalPairs[k][1], p);
  }

  ReportRow row;
  row.state_label = label;

  if (mode == RunMode::Analytic) {
    std::array<ProductDistribution, 6> quantum;
    for (std::size_t i = 0; i < 6; ++i) {
      quantum[i] = pmsquare::product_distribution(exact_ctx[i]);
    }
    Evaluation ev = evaluate_distributions(quantum, exact_pair[0], exact_pair[1]);
    row.entropy = ev.sextet.h;
    row.margin = ev.verdict.margin;
    row.margin_sigma = 0.0;
    row.sd_violation = std::numeric_limits<double>::infinity();
    return row;
  }

  CountRecord counts;
  for (std::size_t i = 0; i < 6; ++i) {
    auto rng = make_engine(plan.master_seed,
                           "ctx/" + std::to_string(i) + "/" + label);
    counts.context_counts[i] = poisson_counts(exact_ctx[i], plan.shots, rng);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    auto rng = make_engine(plan.master_seed,
                           "pair/" + std::to_string(k) + "/" + label);
    counts.pair_counts[k] = poisson_counts(exact_pair[k], plan.shots, rng);
  }

  Evaluation ev = evaluate_counts(counts);
  auto boot_rng = make_engine(plan.master_seed, "boot/" + label);
  BootstrapStats boot = bootstrap_sigma(counts, plan.resamples, boot_rng);

  row.entropy = ev.sextet.h;
  row.entropy_sigma = boot.sigma_h;
  row.margin = ev.verdict.margin;
  row.margin_sigma = boot.sigma_margin;
  row.sd_violation = boot.sigma_margin > 0.0
                         ? ev.verdict.margin / boot.sigma_margin
                         : std::numeric_limits<double>::infinity();
  return row;
}

ExperimentReport run_table(const std::vector<std::string>& labels, const NoiseModel& noise,
                           const ShotPlan& plan, RunMode mode, int threads) {
  if (threads < 1) throw InvalidInput("thread count must be at least 1");
  ExperimentReport report;
  report.version = kVersion;
  report.master_seed = plan.master_seed;
  report.shots = plan.shots;
  report.resamples = plan.resamples;
  report.noise = noise.to_string();
  report.mode = to_string(mode);
  report.rows.resize(labels.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= labels.size()) return;
      try {
        DensityMatrix rho = qcore::state_factory(labels[i]);
        report.rows[i] = run_state(labels[i], rho, noise, plan, mode);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace pmlab::photonlab

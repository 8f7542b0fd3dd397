#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pmlab/errors.hpp"
#include "pmlab/photonlab.hpp"
#include "pmlab/qcore.hpp"

using namespace pmlab;
using photonlab::NoiseModel;
using photonlab::RunMode;
using photonlab::ShotPlan;
using pmsquare::JointDistribution8;
using pmsquare::ObservableId;
using qcore::DensityMatrix;

TEST_CASE("noise specs parse and round-trip") {
  NoiseModel none = NoiseModel::parse("none");
  CHECK(none.depolarizing == 0.0);

  NoiseModel dflt = NoiseModel::parse("depol:default");
  CHECK(dflt.depolarizing == doctest::Approx(0.025).epsilon(1e-15));

  NoiseModel p = NoiseModel::parse("depol:0.1");
  CHECK(p.depolarizing == doctest::Approx(0.1).epsilon(1e-15));

  // to_string -> parse is the identity on the strength.
  for (double strength : {0.0, 0.01, 0.025, 0.3, 1.0}) {
    NoiseModel m;
    m.depolarizing = strength;
    NoiseModel back = NoiseModel::parse(m.to_string());
    CHECK(back.depolarizing == strength);
  }

  CHECK_THROWS_AS(NoiseModel::parse("depol:1.5"), InvalidInput);
  CHECK_THROWS_AS(NoiseModel::parse("depol:-0.1"), InvalidInput);
  CHECK_THROWS_AS(NoiseModel::parse("depol:"), InvalidInput);
  CHECK_THROWS_AS(NoiseModel::parse("gauss:0.1"), InvalidInput);
  CHECK_THROWS_AS(NoiseModel::parse(""), InvalidInput);

  CHECK(photonlab::run_mode_from_string("analytic") == RunMode::Analytic);
  CHECK(photonlab::run_mode_from_string("sampled") == RunMode::Sampled);
  CHECK_THROWS_AS(photonlab::run_mode_from_string("exact"), InvalidInput);
}

TEST_CASE("depolarizing channel endpoints") {
  DensityMatrix rho = qcore::random_state(3, qcore::RandomStateKind::Pure);
  DensityMatrix same = photonlab::apply_depolarizing(rho, 0.0);
  CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  DensityMatrix flat = photonlab::apply_depolarizing(rho, 1.0);
  CHECK((flat.matrix() - qcore::Operator4::Identity() / 4.0).cwiseAbs().maxCoeff() <
        1e-15);

  CHECK_THROWS_AS(photonlab::apply_depolarizing(rho, -0.01), InvalidInput);
  CHECK_THROWS_AS(photonlab::apply_depolarizing(rho, 1.01), InvalidInput);
}

TEST_CASE("noisy joints reduce to the exact joints at p = 0") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DensityMatrix rho = qcore::random_state(seed + 40,
                                            seed % 2 == 0
                                                ? qcore::RandomStateKind::Mixed
                                                : qcore::RandomStateKind::Pure);
    for (const auto& ctx : pmsquare::contexts()) {
      JointDistribution8 noisy = photonlab::noisy_joint(rho, ctx, 0.0);
      JointDistribution8 exact = pmsquare::joint_distribution(rho, ctx);
      for (std::size_t k = 0; k < 8; ++k) {
        CHECK(std::abs(noisy.p[k] - exact.p[k]) < 1e-12);
      }
    }
  }
}

TEST_CASE("a mid-sequence depolarizing step flips the parity at rate p/2") {
  // For any state and any context, the product-sign error probability is
  // exactly p/2: conditioned on the depolarized branch the remaining two
  // outcomes are uniform, and half of the uniform mass has wrong parity.
  for (double p : {0.01, 0.025, 0.2, 0.7}) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      DensityMatrix rho = qcore::random_state(seed + 90,
                                              seed % 2 == 0
                                                  ? qcore::RandomStateKind::Mixed
                                                  : qcore::RandomStateKind::Pure);
      for (const auto& ctx : pmsquare::contexts()) {
        int sign = pmsquare::context_product_sign(ctx);
        auto prod = pmsquare::product_distribution(
            photonlab::noisy_joint(rho, ctx, p));
        double wrong = (sign == +1) ? prod.p_minus : prod.p_plus;
        CHECK(std::abs(wrong - p / 2.0) < 1e-12);
      }
    }
  }

  // Canonical special case: the odd-parity context on the ground state keeps
  // P(product = -1) = 1 - p/2.
  DensityMatrix ground = qcore::state_factory("Psi1");
  const auto& ctx5 = pmsquare::contexts()[5];
  double p = 0.025;
  auto prod = pmsquare::product_distribution(photonlab::noisy_joint(ground, ctx5, p));
  CHECK(prod.p_minus == doctest::Approx(1.0 - p / 2.0).epsilon(1e-12));
}

TEST_CASE("noisy pairs behave like noisy joints restricted to two outcomes") {
  DensityMatrix rho = qcore::random_state(123, qcore::RandomStateKind::Mixed);
  auto pd0 = photonlab::noisy_pair(rho, ObservableId::A, ObservableId::a, 0.0);
  auto exact = nct::pair_distribution(rho, ObservableId::A, ObservableId::a);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(pd0.p[k] - exact.p[k]) < 1e-12);
  }
  CHECK_THROWS_AS(photonlab::noisy_pair(rho, ObservableId::A, ObservableId::b, 0.0),
                  InvalidInput);

  // Sum stays 1 with noise on.
  auto pd = photonlab::noisy_pair(rho, ObservableId::B, ObservableId::b, 0.3);
  double total = pd.p[0] + pd.p[1] + pd.p[2] + pd.p[3];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("poisson counts have the right support and scale") {
  // A deterministic bin: everything lands there, other bins are exactly 0.
  JointDistribution8 point;
  point.p.fill(0.0);
  point.at(+1, -1, +1) = 1.0;
  std::mt19937_64 rng(5);
  auto counts = photonlab::poisson_counts(point, 20000, rng);
  for (std::size_t k = 0; k < 8; ++k) {
    if (k == static_cast<std::size_t>(JointDistribution8::index(+1, -1, +1))) {
      CHECK(counts[k] > 0);
    } else {
      CHECK(counts[k] == 0);
    }
  }

  // Total is Poisson(shots): within 4 sqrt(N) for nearly all seeds.
  JointDistribution8 quarter;
  quarter.p.fill(0.0);
  quarter.at(+1, +1, +1) = 0.25;
  quarter.at(+1, -1, -1) = 0.25;
  quarter.at(-1, +1, -1) = 0.25;
  quarter.at(-1, -1, +1) = 0.25;
  const long long shots = 20000;
  const double bound = 4.0 * std::sqrt(static_cast<double>(shots));
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 r(seed);
    auto c = photonlab::poisson_counts(quarter, shots, r);
    long long total = 0;
    for (long long v : c) total += v;
    if (std::abs(static_cast<double>(total - shots)) <= bound) ++ok;
  }
  CHECK(ok >= 998);

  // Determinism per seed.
  std::mt19937_64 ra(77), rb(77);
  CHECK(photonlab::poisson_counts(quarter, shots, ra) ==
        photonlab::poisson_counts(quarter, shots, rb));

  CHECK_THROWS_AS(
      [&] {
        std::mt19937_64 r(1);
        photonlab::poisson_counts(quarter, 0, r);
      }(),
      InvalidInput);
}

TEST_CASE("empirical distributions normalize counts") {
  std::array<long long, 8> counts = {10, 0, 0, 30, 0, 0, 40, 20};
  auto d = photonlab::empirical_distribution(counts);
  CHECK(d.p[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d.p[3] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.p[6] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-15));

  std::array<long long, 8> zeros{};
  CHECK_THROWS_AS(photonlab::empirical_distribution(zeros), InvalidInput);
  std::array<long long, 4> pair_counts = {5, 5, 10, 0};
  auto pd = photonlab::empirical_pair(pair_counts);
  CHECK(pd.p[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("binary entropy bootstrap matches first-order propagation") {
  const long long n = 20000;
  const int resamples = 2000;

  // Boundary frequencies: sigma is finite and small (zero bins stay zero).
  std::mt19937_64 rng0(11);
  auto edge = photonlab::bootstrap_sigma_binary(n, 0, resamples, rng0);
  CHECK(std::isfinite(edge.sigma_h));
  CHECK(edge.sigma_h < 0.01);

  // p = 1/2: the entropy is at its maximum, so the first-order term
  // vanishes; the bootstrap spread must be tiny (second order).
  std::mt19937_64 rng1(12);
  auto mid = photonlab::bootstrap_sigma_binary(n / 2, n / 2, resamples, rng1);
  CHECK(mid.sigma_h < 0.001);

  // Away from the stationary point the two error estimates agree within 20%.
  for (double p_hat : {0.2, 0.3, 0.4, 0.6, 0.7, 0.8}) {
    auto plus = static_cast<long long>(std::llround(p_hat * n));
    std::mt19937_64 rng(100 + static_cast<std::uint64_t>(p_hat * 1000));
    auto boot = photonlab::bootstrap_sigma_binary(plus, n - plus, resamples, rng);
    double prop = photonlab::entropy_sigma_first_order(p_hat, n);
    CHECK(boot.sigma_h == doctest::Approx(prop).epsilon(0.20));
  }

  CHECK(photonlab::entropy_sigma_first_order(0.0, n) == 0.0);
  CHECK(photonlab::entropy_sigma_first_order(1.0, n) == 0.0);
  CHECK_THROWS_AS(photonlab::entropy_sigma_first_order(1.5, n), InvalidInput);
  CHECK_THROWS_AS(
      [&] {
        std::mt19937_64 r(9);
        photonlab::bootstrap_sigma_binary(10, 10, 50, r);
      }(),
      InvalidInput);
}

TEST_CASE("margin spread scales like 1/sqrt(shots)") {
  // Median over several seeds of sigma_margin(N) / sigma_margin(4N) should
  // sit near 2 (within 15%).
  auto sigma_at = [](long long shots, std::uint64_t seed) {
    ShotPlan plan;
    plan.shots = shots;
    plan.resamples = 400;
    plan.master_seed = seed;
    auto row = photonlab::run_state("Psi1", qcore::state_factory("Psi1"),
                                    NoiseModel::depolarizing_default(), plan,
                                    RunMode::Sampled);
    return row.margin_sigma;
  };

  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 7; ++seed) {
    double lo = sigma_at(5000, seed);
    double hi = sigma_at(20000, seed);
    REQUIRE(hi > 0.0);
    ratios.push_back(lo / hi);
  }
  std::sort(ratios.begin(), ratios.end());
  double median = ratios[ratios.size() / 2];
  CHECK(median == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("the violation significance grows with the shot budget") {
  auto sd_at = [](long long shots, std::uint64_t seed) {
    ShotPlan plan;
    plan.shots = shots;
    plan.resamples = 300;
    plan.master_seed = seed;
    auto row = photonlab::run_state("rho26", qcore::state_factory("rho26"),
                                    NoiseModel::depolarizing_default(), plan,
                                    RunMode::Sampled);
    return row.sd_violation;
  };
  std::vector<double> sd5k, sd20k, sd80k;
  for (std::uint64_t seed = 1; seed <= 9; ++seed) {
    sd5k.push_back(sd_at(5000, seed));
    sd20k.push_back(sd_at(20000, seed));
    sd80k.push_back(sd_at(80000, seed));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double m5 = median(sd5k), m20 = median(sd20k), m80 = median(sd80k);
  CHECK(m5 < m20);
  CHECK(m20 < m80);
}

TEST_CASE("analytic mode with zero noise reproduces the ideal sextet") {
  ShotPlan plan;  // shots irrelevant in analytic mode
  auto check_row = [&](const std::string& label, const DensityMatrix& rho) {
    auto row = photonlab::run_state(label, rho, NoiseModel::none(), plan,
                                    RunMode::Analytic);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(row.entropy[static_cast<std::size_t>(i)]) < 1e-10);
    }
    CHECK(std::abs(row.entropy[5] - 1.0) < 1e-10);
    CHECK(std::abs(row.margin - 1.0) < 1e-10);
    CHECK(row.margin_sigma == 0.0);
    CHECK(std::isinf(row.sd_violation));
  };
  for (const auto& label : qcore::state_labels()) {
    check_row(label, qcore::state_factory(label));
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    check_row("random", qcore::random_state(seed + 12345,
                                            seed % 2 == 0
                                                ? qcore::RandomStateKind::Mixed
                                                : qcore::RandomStateKind::Pure));
  }
}

TEST_CASE("sampled entropies converge to the analytic values") {
  NoiseModel noise = NoiseModel::depolarizing_default();
  const std::array<const char*, 5> labels = {"Psi1", "Psi8", "Psi15", "rho17",
                                             "rho26"};
  for (const char* label : labels) {
    DensityMatrix rho = qcore::state_factory(label);
    ShotPlan analytic_plan;
    auto exact = photonlab::run_state(label, rho, noise, analytic_plan,
                                      RunMode::Analytic);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ShotPlan plan;
      plan.shots = 1000000;
      plan.resamples = 100;
      plan.master_seed = seed;
      auto sampled = photonlab::run_state(label, rho, noise, plan, RunMode::Sampled);
      for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::abs(sampled.entropy[i] - exact.entropy[i]) < 0.005);
      }
      CHECK(std::abs(sampled.margin - exact.margin) < 0.02);
    }
  }
}

TEST_CASE("table rows do not depend on evaluation order or thread count") {
  NoiseModel noise = NoiseModel::depolarizing_default();
  ShotPlan plan;
  plan.shots = 4000;
  plan.resamples = 120;
  plan.master_seed = 99;

  std::vector<std::string> order_a = {"Psi1", "Psi5", "rho17", "rho26"};
  std::vector<std::string> order_b = {"rho26", "Psi5", "rho17", "Psi1"};

  auto rep_a = photonlab::run_table(order_a, noise, plan, RunMode::Sampled, 1);
  auto rep_b = photonlab::run_table(order_b, noise, plan, RunMode::Sampled, 2);

  auto find_row = [](const photonlab::ExperimentReport& rep, const std::string& label)
      -> const photonlab::ReportRow& {
    for (const auto& row : rep.rows) {
      if (row.state_label == label) return row;
    }
    REQUIRE(false);
    return rep.rows.front();
  };

  for (const auto& label : order_a) {
    const auto& ra = find_row(rep_a, label);
    const auto& rb = find_row(rep_b, label);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(ra.entropy[i] == rb.entropy[i]);
      CHECK(ra.entropy_sigma[i] == rb.entropy_sigma[i]);
    }
    CHECK(ra.margin == rb.margin);
    CHECK(ra.margin_sigma == rb.margin_sigma);
    CHECK(ra.sd_violation == rb.sd_violation);
  }

  // Rows come back in the requested order.
  for (std::size_t i = 0; i < order_a.size(); ++i) {
    CHECK(rep_a.rows[i].state_label == order_a[i]);
    CHECK(rep_b.rows[i].state_label == order_b[i]);
  }

  // Same labels, same plan, four threads: byte-identical rows.
  auto rep_c = photonlab::run_table(order_a, noise, plan, RunMode::Sampled, 4);
  for (std::size_t i = 0; i < order_a.size(); ++i) {
    CHECK(rep_a.rows[i].margin == rep_c.rows[i].margin);
    CHECK(rep_a.rows[i].sd_violation == rep_c.rows[i].sd_violation);
  }

  CHECK_THROWS_AS(photonlab::run_table(order_a, noise, plan, RunMode::Sampled, 0),
                  InvalidInput);
}

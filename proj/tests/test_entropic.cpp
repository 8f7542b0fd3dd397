#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pmlab/entropic.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/nct.hpp"
#include "pmlab/pmsquare.hpp"
#include "pmlab/qcore.hpp"

using namespace pmlab;
using entropic::EntropySextet;
using pmsquare::ProductDistribution;
using qcore::DensityMatrix;

namespace {

ProductDistribution dist(double p_plus) {
  ProductDistribution d;
  d.p_plus = p_plus;
  d.p_minus = 1.0 - p_plus;
  return d;
}

}  // namespace

TEST_CASE("binary entropy anchors") {
  CHECK(entropic::h_binary(dist(1.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropic::h_binary(dist(0.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropic::h_binary(dist(0.5)) == doctest::Approx(1.0).epsilon(1e-12));
  // h(0.9, 0.1) = -0.9*log2(0.9) - 0.1*log2(0.1), frozen to 5 decimals.
  CHECK(std::abs(entropic::h_binary(dist(0.9)) - 0.46900) < 1e-5);
}

TEST_CASE("binary entropy is symmetric and concave") {
  for (int i = 0; i <= 100; ++i) {
    double p = i / 100.0;
    ProductDistribution d = dist(p);
    ProductDistribution mirrored;
    mirrored.p_plus = d.p_minus;
    mirrored.p_minus = d.p_plus;
    CHECK(entropic::h_binary(d) == entropic::h_binary(mirrored));
  }
  // Concavity along sampled chords: h((p+q)/2) >= (h(p)+h(q))/2.
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      double p = i / 20.0;
      double q = j / 20.0;
      double mid = entropic::h_binary(dist((p + q) / 2.0));
      double chord =
          (entropic::h_binary(dist(p)) + entropic::h_binary(dist(q))) / 2.0;
      CHECK(mid - chord >= -1e-12);
    }
  }
}

TEST_CASE("binary entropy rejects unnormalized tails") {
  ProductDistribution bad;
  bad.p_plus = 0.7;
  bad.p_minus = 0.5;
  CHECK_THROWS_AS(entropic::h_binary(bad), ContractViolation);
  ProductDistribution negative;
  negative.p_plus = 1.2;
  negative.p_minus = -0.2;
  CHECK_THROWS_AS(entropic::h_binary(negative), ContractViolation);
}

TEST_CASE("inequality_terms requires exactly six distributions") {
  std::vector<ProductDistribution> five(5, dist(1.0));
  CHECK_THROWS_AS(entropic::inequality_terms(five), InvalidInput);
  std::vector<ProductDistribution> seven(7, dist(1.0));
  CHECK_THROWS_AS(entropic::inequality_terms(seven), InvalidInput);

  std::vector<ProductDistribution> ideal(6, dist(1.0));
  ideal[5] = dist(0.5);
  auto terms = entropic::inequality_terms(ideal);
  for (int i = 0; i < 5; ++i) CHECK(terms.h[static_cast<std::size_t>(i)] == 0.0);
  CHECK(terms.h[5] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate splits terms into lhs, rhs and margin") {
  EntropySextet ideal;
  ideal.h = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  auto verdict = entropic::evaluate(ideal);
  CHECK(verdict.lhs == doctest::Approx(1.0));
  CHECK(verdict.rhs == doctest::Approx(0.0));
  CHECK(verdict.margin == doctest::Approx(1.0));
  CHECK(verdict.violated);

  EntropySextet zeros;
  zeros.h = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  auto v0 = entropic::evaluate(zeros);
  CHECK(v0.margin == doctest::Approx(0.0));
  CHECK_FALSE(v0.violated);

  // A measured-style sextet frozen from an independent evaluation:
  // five small terms and an lhs of 0.99988 give margin 0.75823.
  EntropySextet measured;
  measured.h = {0.03441, 0.04503, 0.05584, 0.04615, 0.06022, 0.99988};
  auto vm = entropic::evaluate(measured);
  CHECK(std::abs(vm.lhs - 0.99988) < 1e-12);
  CHECK(std::abs(vm.margin - 0.75823) < 1e-5);
  CHECK(vm.violated);
}

TEST_CASE("noiseless quantum products never violate; the mixture always does") {
  const auto& ctxs = pmsquare::contexts();
  auto quantum_products = [&](const DensityMatrix& rho) {
    std::array<ProductDistribution, 6> out;
    for (std::size_t i = 0; i < 6; ++i) {
      out[i] =
          pmsquare::product_distribution(pmsquare::joint_distribution(rho, ctxs[i]));
    }
    return out;
  };

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    DensityMatrix rho = qcore::random_state(seed + 7000,
                                            seed % 2 == 0
                                                ? qcore::RandomStateKind::Mixed
                                                : qcore::RandomStateKind::Pure);
    auto quantum = quantum_products(rho);

    // Unmixed: every product is deterministic, so every term is ~0 and the
    // margin cannot be positive.
    auto vq = entropic::evaluate(entropic::inequality_terms(quantum));
    CHECK(vq.margin <= 1e-10);

    // Classical route alone: margin exactly 0 (all six terms vanish).
    auto vc = entropic::evaluate(
        entropic::inequality_terms(nct::classical_products(rho)));
    CHECK(std::abs(vc.margin) < 1e-12);
    CHECK_FALSE(vc.violated);

    // Equal-weight mixture: margin 1 for every state.
    auto vm = entropic::evaluate(
        entropic::inequality_terms(nct::mix(quantum, nct::classical_products(rho))));
    CHECK(vm.margin == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(vm.violated);
  }
}

#include "pmlab/entropic.hpp"

#include <cmath>

namespace pmlab::entropic {

namespace {

// Below this, a probability is an exact zero for entropy purposes.
constexpr double kZeroFloor = 1e-300;

double plog2p(double p) {
  if (p < kZeroFloor) return 0.0;
  return p * std::log2(p);
}

}  // namespace

double h_binary(const ProductDistribution& dist) {
  if (dist.p_plus < pmsquare::kProbFloor || dist.p_minus < pmsquare::kProbFloor) {
    throw ContractViolation("binary distribution has a negative tail");
  }
  if (std::abs(dist.p_plus + dist.p_minus - 1.0) > pmsquare::kNormCheckTol) {
    throw ContractViolation("binary distribution is not normalized within 1e-8");
  }
  return -plog2p(dist.p_plus) - plog2p(dist.p_minus);
}

EntropySextet inequality_terms(std::span<const ProductDistribution> dists) {
  if (dists.size() != 6) {
    throw InvalidInput("inequality_terms requires exactly six product distributions");
  }
  EntropySextet out;
  for (std::size_t i = 0; i < 6; ++i) out.h[i] = h_binary(dists[i]);
  return out;
}

InequalityVerdict evaluate(const EntropySextet& terms) {
  InequalityVerdict v;
  v.lhs = terms.h[5];
  v.rhs = terms.h[0] + terms.h[1] + terms.h[2] + terms.h[3] + terms.h[4];
  v.margin = v.lhs - v.rhs;
  v.violated = v.margin > 0.0;
  return v;
}

}  // namespace pmlab::entropic

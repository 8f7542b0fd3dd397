#pragma once

#include <array>

#include "pmlab/pmsquare.hpp"

namespace pmlab::nct {

using pmsquare::Context;
using pmsquare::ObservableId;
using pmsquare::ProductDistribution;
using qcore::DensityMatrix;

/// Deterministic value table for all nine observables, generated from the
/// four base values via the product rules
/// alpha = A*a, beta = B*b, C = A*B, c = a*b, gamma = A*B*a*b.
struct Assignment {
  int A = 1, a = 1, B = 1, b = 1;        // base values, +/-1
  int alpha = 1, beta = 1, C = 1, c = 1, gamma = 1;

  int value(ObservableId id) const;
  /// Product of the three observables of a context under this assignment.
  int context_product(const Context& ctx) const;
};

/// Derives the five dependent values from the four base values.
/// Base values must be +/-1 (InvalidInput otherwise).
Assignment derive_assignment(int A, int a, int B, int b);

/// All sixteen base assignments, lexicographic in (A,a,B,b) with +1 first.
std::array<Assignment, 16> enumerate_assignments();

/// Joint distribution of two commuting square observables over {+1,-1}^2.
struct PairDistribution {
  /// index bit layout: bit1 = first observable, bit0 = second; set bit = -1.
  std::array<double, 4> p{};

  static int index(int s1, int s2);
  double prob(int s1, int s2) const { return p[static_cast<std::size_t>(index(s1, s2))]; }
  double& at(int s1, int s2) { return p[static_cast<std::size_t>(index(s1, s2))]; }
};

/// The four pair measurements driving the classical model, in report order:
/// {A,a}, {B,b}, {A,B}, {a,b}.
inline constexpr std::array<std::array<ObservableId, 2>, 4> kClassicalPairs = {{
    {ObservableId::A, ObservableId::a},
    {ObservableId::B, ObservableId::b},
    {ObservableId::A, ObservableId::B},
    {ObservableId::a, ObservableId::b},
}};

/// P(s1,s2) = Tr(rho * P1 * P2) for a commuting pair; non-commuting pairs are
/// rejected with InvalidInput.
PairDistribution pair_distribution(const DensityMatrix& rho, ObservableId first,
                                   ObservableId second);

/// Product distributions q'_1..q'_6 of the six contexts (canonical order)
/// under the classical model. The base distribution over (A,a,B,b) is the
/// product of the measured {A,a} and {B,b} pair distributions; dependent
/// values follow the product rules, so every context product is +1 for every
/// base assignment and each q' is deterministic regardless of the input.
std::array<ProductDistribution, 6> classical_products_from_pairs(
    const PairDistribution& pair_Aa, const PairDistribution& pair_Bb);

/// Same, with the two driving pair distributions computed exactly from rho.
std::array<ProductDistribution, 6> classical_products(const DensityMatrix& rho);

/// Elementwise equal-weight mixture of the quantum and classical product
/// distributions, context by context.
std::array<ProductDistribution, 6> mix(const std::array<ProductDistribution, 6>& quantum,
                                       const std::array<ProductDistribution, 6>& classical);

}  // namespace pmlab::nct

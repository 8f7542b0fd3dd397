#pragma once

#include <array>
#include <span>

#include "pmlab/pmsquare.hpp"

namespace pmlab::entropic {

using pmsquare::ProductDistribution;

/// Binary Shannon entropy in bits; 0*log2(0) is treated as 0 (probabilities
/// below 1e-300 contribute nothing). The two tails must sum to 1 within 1e-8
/// (ContractViolation otherwise).
double h_binary(const ProductDistribution& dist);

/// The six context-product entropies ordered as the report columns:
/// H(A.a.alpha), H(B.b.beta), H(C.c.gamma), H(A.B.C), H(a.b.c),
/// H(alpha.beta.gamma).
struct EntropySextet {
  std::array<double, 6> h{};
};

/// Entropies of six product distributions given in canonical context order
/// (which coincides with the report column order). Exactly six inputs are
/// required (InvalidInput otherwise).
EntropySextet inequality_terms(std::span<const ProductDistribution> dists);

/// lhs = H(alpha.beta.gamma); rhs = sum of the other five terms;
/// margin = lhs - rhs; violated iff margin > 0.
struct InequalityVerdict {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool violated = false;
};

InequalityVerdict evaluate(const EntropySextet& terms);

}  // namespace pmlab::entropic

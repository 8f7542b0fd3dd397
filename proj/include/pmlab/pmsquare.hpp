#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "pmlab/qcore.hpp"

namespace pmlab::pmsquare {

using qcore::DensityMatrix;
using qcore::Operator4;

/// The nine dichotomic observables of the square. ASCII names follow the
/// usual row/column labels: A,a,alpha / B,b,beta / C,c,gamma.
enum class ObservableId { A, a, alpha, B, b, beta, C, c, gamma };

inline constexpr std::array<ObservableId, 9> kAllObservables = {
    ObservableId::A, ObservableId::a, ObservableId::alpha,
    ObservableId::B, ObservableId::b, ObservableId::beta,
    ObservableId::C, ObservableId::c, ObservableId::gamma};

std::string to_string(ObservableId id);
ObservableId observable_from_string(std::string_view name);

/// 4x4 matrix of one observable (spatial factor left, polarization right):
/// A=X(x)1, a=1(x)X, alpha=X(x)X, B=1(x)Y, b=Y(x)1, beta=Y(x)Y,
/// C=X(x)Y, c=Y(x)X, gamma=Z(x)Z.
Operator4 observable(ObservableId id);

// Tolerances for the consistency checks in this module.
inline constexpr double kCommuteTol = 1e-12;
inline constexpr double kSignTol = 1e-12;
inline constexpr double kParityTol = 1e-12;
inline constexpr double kProbFloor = -1e-10;
inline constexpr double kNormCheckTol = 1e-8;

/// An ordered triple of mutually commuting square observables. Membership is
/// validated against the six measurement triples (as sets); the stored order
/// is the caller's and defines outcome positions 1..3.
class Context {
 public:
  Context(ObservableId o1, ObservableId o2, ObservableId o3);

  const std::array<ObservableId, 3>& members() const { return members_; }
  ObservableId at(int position) const;  // 1-based
  std::string name() const;             // e.g. "{A,a,alpha}"

 private:
  std::array<ObservableId, 3> members_;
};

/// The six contexts in canonical order:
/// {A,a,alpha}, {B,b,beta}, {C,c,gamma}, {A,B,C}, {a,b,c}, {alpha,beta,gamma}.
const std::array<Context, 6>& contexts();

/// Pairwise commutation check for two or three distinct observables;
/// duplicates are rejected with InvalidInput. True iff every commutator
/// vanishes within 1e-12.
bool check_compatibility(std::span<const ObservableId> ids);

/// The sign s with O1*O2*O3 = s*1 (within 1e-12); ContractViolation if the
/// product is not proportional to the identity.
int context_product_sign(const Context& ctx);

/// Joint outcome distribution over sign triples; all eight entries are kept
/// explicitly, including exact zeros.
struct JointDistribution8 {
  /// index bit layout: bit2 = first observable, bit1 = second, bit0 = third;
  /// a set bit means outcome -1.
  std::array<double, 8> p{};

  static int index(int s1, int s2, int s3);
  double prob(int s1, int s2, int s3) const { return p[static_cast<std::size_t>(index(s1, s2, s3))]; }
  double& at(int s1, int s2, int s3) { return p[static_cast<std::size_t>(index(s1, s2, s3))]; }
  double sum() const;
};

/// Binary distribution over {+1,-1}; also used for marginals.
struct ProductDistribution {
  double p_plus = 0.0;
  double p_minus = 0.0;
};

/// P(s1,s2,s3) = Tr(rho * P1 * P2 * P3) with commuting eigenprojectors.
/// Entries with s1*s2*s3 opposite to the context sign vanish within 1e-12.
JointDistribution8 joint_distribution(const DensityMatrix& rho, const Context& ctx);

/// One sequential run through the context: Born draw + state-update rule
/// after each measurement. Independent sampling route used to cross-check
/// the closed-form distribution.
std::array<int, 3> sequential_sample(const DensityMatrix& rho, const Context& ctx,
                                     std::mt19937_64& rng);

/// Distribution of the product s1*s2*s3. Both tails are accumulated
/// separately and must sum to 1 within 1e-8 (ContractViolation otherwise).
ProductDistribution product_distribution(const JointDistribution8& joint);

/// Marginal of the observable at `position` (1-based).
ProductDistribution marginal(const JointDistribution8& joint, int position);

}  // namespace pmlab::pmsquare

#include "pmlab/nct.hpp"

#include <cmath>

namespace pmlab::nct {

namespace {

using pmsquare::contexts;
using pmsquare::observable;
using qcore::Operator4;
using qcore::projector_pm;

void require_sign(int v, const char* name) {
  if (v != 1 && v != -1) {
    throw InvalidInput(std::string("base value ") + name + " must be +1 or -1");
  }
}

}  // namespace

int Assignment::value(ObservableId id) const {
  switch (id) {
    case ObservableId::A: return A;
    case ObservableId::a: return a;
    case ObservableId::alpha: return alpha;
    case ObservableId::B: return B;
    case ObservableId::b: return b;
    case ObservableId::beta: return beta;
    case ObservableId::C: return C;
    case ObservableId::c: return c;
    case ObservableId::gamma: return gamma;
  }
  throw InvalidInput("unknown observable id");
}

int Assignment::context_product(const Context& ctx) const {
  return value(ctx.at(1)) * value(ctx.at(2)) * value(ctx.at(3));
}

Assignment derive_assignment(int A, int a, int B, int b) {
  require_sign(A, "A");
  require_sign(a, "a");
  require_sign(B, "B");
  require_sign(b, "b");
  Assignment out;
  out.A = A;
  out.a = a;
  out.B = B;
  out.b = b;
  out.alpha = A * a;
  out.beta = B * b;
  out.C = A * B;
  out.c = a * b;
  out.gamma = A * B * a * b;
  return out;
}

std::array<Assignment, 16> enumerate_assignments() {
  std::array<Assignment, 16> out;
  std::size_t k = 0;
  for (int A : {1, -1})
    for (int a : {1, -1})
      for (int B : {1, -1})
        for (int b : {1, -1}) out[k++] = derive_assignment(A, a, B, b);
  return out;
}

int PairDistribution::index(int s1, int s2) {
  auto bit = [](int s) {
    if (s != 1 && s != -1) throw InvalidInput("outcome signs must be +1 or -1");
    return s == -1 ? 1 : 0;
  };
  return 2 * bit(s1) + bit(s2);
}

PairDistribution pair_distribution(const DensityMatrix& rho, ObservableId first,
                                   ObservableId second) {
  std::array<ObservableId, 2> ids = {first, second};
  if (!pmsquare::check_compatibility(ids)) {
    throw InvalidInput("pair observables do not commute");
  }
  Operator4 o1 = observable(first);
  Operator4 o2 = observable(second);
  PairDistribution out;
  double total = 0.0;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      Operator4 prod = projector_pm(o1, s1) * projector_pm(o2, s2);
      double v = (rho.matrix() * prod).trace().real();
      if (v < pmsquare::kProbFloor) {
        throw ContractViolation("pair probability below -1e-10");
      }
      v = std::max(v, 0.0);
      out.at(s1, s2) = v;
      total += v;
    }
  }
  if (std::abs(total - 1.0) > pmsquare::kNormCheckTol) {
    throw ContractViolation("pair distribution does not sum to 1 within 1e-8");
  }
  return out;
}

std::array<ProductDistribution, 6> classical_products_from_pairs(
    const PairDistribution& pair_Aa, const PairDistribution& pair_Bb) {
  std::array<ProductDistribution, 6> out{};
  for (int A : {1, -1})
    for (int a : {1, -1})
      for (int B : {1, -1})
        for (int b : {1, -1}) {
          double w = pair_Aa.prob(A, a) * pair_Bb.prob(B, b);
          Assignment asg = derive_assignment(A, a, B, b);
          for (std::size_t i = 0; i < 6; ++i) {
            int prod = asg.context_product(pmsquare::contexts()[i]);
            (prod == 1 ? out[i].p_plus : out[i].p_minus) += w;
          }
        }
  // The 16-term accumulation can leave the tails at 1 +/- a few ulp;
  // renormalize so downstream entropies of deterministic products are
  // exactly zero.
  for (auto& d : out) {
    double total = d.p_plus + d.p_minus;
    d.p_plus /= total;
    d.p_minus /= total;
  }
  return out;
}

std::array<ProductDistribution, 6> classical_products(const DensityMatrix& rho) {
  PairDistribution d_Aa = pair_distribution(rho, ObservableId::A, ObservableId::a);
  PairDistribution d_Bb = pair_distribution(rho, ObservableId::B, ObservableId::b);
  return classical_products_from_pairs(d_Aa, d_Bb);
}

std::array<ProductDistribution, 6> mix(const std::array<ProductDistribution, 6>& quantum,
                                       const std::array<ProductDistribution, 6>& classical) {
  std::array<ProductDistribution, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    out[i].p_plus = 0.5 * (quantum[i].p_plus + classical[i].p_plus);
    out[i].p_minus = 0.5 * (quantum[i].p_minus + classical[i].p_minus);
  }
  return out;
}

}  // namespace pmlab::nct

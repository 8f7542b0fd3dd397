#include "pmlab/pmsquare.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab::pmsquare {

namespace {

using qcore::Matrix2;
using qcore::projector_pm;

constexpr std::array<const char*, 9> kNames = {"A", "a", "alpha", "B", "b",
                                               "beta", "C", "c", "gamma"};

// The six measurement triples, canonical order, as index sets over kNames.
constexpr std::array<std::array<int, 3>, 6> kContextIndices = {{
    {0, 1, 2},  // {A, a, alpha}
    {3, 4, 5},  // {B, b, beta}
    {6, 7, 8},  // {C, c, gamma}
    {0, 3, 6},  // {A, B, C}
    {1, 4, 7},  // {a, b, c}
    {2, 5, 8},  // {alpha, beta, gamma}
}};

int id_index(ObservableId id) { return static_cast<int>(id); }

}  // namespace

std::string to_string(ObservableId id) { return kNames[static_cast<std::size_t>(id_index(id))]; }

ObservableId observable_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (name == kNames[i]) return static_cast<ObservableId>(i);
  }
  throw InvalidInput("unknown observable name '" + std::string(name) + "'");
}

Operator4 observable(ObservableId id) {
  using qcore::pauli;
  using qcore::tensor;
  switch (id) {
    case ObservableId::A: return tensor(pauli('X'), pauli('I'));
    case ObservableId::a: return tensor(pauli('I'), pauli('X'));
    case ObservableId::alpha: return tensor(pauli('X'), pauli('X'));
    case ObservableId::B: return tensor(pauli('I'), pauli('Y'));
    case ObservableId::b: return tensor(pauli('Y'), pauli('I'));
    case ObservableId::beta: return tensor(pauli('Y'), pauli('Y'));
    case ObservableId::C: return tensor(pauli('X'), pauli('Y'));
    case ObservableId::c: return tensor(pauli('Y'), pauli('X'));
    case ObservableId::gamma: return tensor(pauli('Z'), pauli('Z'));
  }
  throw InvalidInput("unknown observable id");
}

Context::Context(ObservableId o1, ObservableId o2, ObservableId o3)
    : members_{o1, o2, o3} {
  std::array<int, 3> sorted = {id_index(o1), id_index(o2), id_index(o3)};
  std::sort(sorted.begin(), sorted.end());
  if (sorted[0] == sorted[1] || sorted[1] == sorted[2]) {
    throw InvalidInput("context members must be distinct");
  }
  bool known = false;
  for (const auto& triple : kContextIndices) {
    std::array<int, 3> t = triple;
    std::sort(t.begin(), t.end());
    if (t == sorted) {
      known = true;
      break;
    }
  }
  if (!known) {
    throw InvalidInput("not one of the six measurement triples");
  }
}

ObservableId Context::at(int position) const {
  if (position < 1 || position > 3) throw InvalidInput("position must be 1..3");
  return members_[static_cast<std::size_t>(position - 1)];
}

std::string Context::name() const {
  return "{" + to_string(members_[0]) + "," + to_string(members_[1]) + "," +
         to_string(members_[2]) + "}";
}

const std::array<Context, 6>& contexts() {
  static const std::array<Context, 6> all = [] {
    auto make = [](const std::array<int, 3>& idx) {
      return Context(static_cast<ObservableId>(idx[0]),
                     static_cast<ObservableId>(idx[1]),
                     static_cast<ObservableId>(idx[2]));
    };
    return std::array<Context, 6>{make(kContextIndices[0]), make(kContextIndices[1]),
                                  make(kContextIndices[2]), make(kContextIndices[3]),
                                  make(kContextIndices[4]), make(kContextIndices[5])};
  }();
  return all;
}

bool check_compatibility(std::span<const ObservableId> ids) {
  if (ids.size() != 2 && ids.size() != 3) {
    throw InvalidInput("compatibility check takes two or three observables");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[i] == ids[j]) throw InvalidInput("duplicate observables");
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      Operator4 x = observable(ids[i]);
      Operator4 y = observable(ids[j]);
      if ((x * y - y * x).cwiseAbs().maxCoeff() > kCommuteTol) return false;
    }
  }
  return true;
}

int context_product_sign(const Context& ctx) {
  Operator4 prod = observable(ctx.at(1)) * observable(ctx.at(2)) * observable(ctx.at(3));
  for (int s : {1, -1}) {
    if ((prod - static_cast<double>(s) * Operator4::Identity()).cwiseAbs().maxCoeff() <=
        kSignTol) {
      return s;
    }
  }
  throw ContractViolation("context product is not +/-identity within 1e-12");
}

int JointDistribution8::index(int s1, int s2, int s3) {
  auto bit = [](int s) {
    if (s != 1 && s != -1) throw InvalidInput("outcome signs must be +1 or -1");
    return s == -1 ? 1 : 0;
  };
  return 4 * bit(s1) + 2 * bit(s2) + bit(s3);
}

double JointDistribution8::sum() const {
  double t = 0.0;
  for (double v : p) t += v;
  return t;
}

JointDistribution8 joint_distribution(const DensityMatrix& rho, const Context& ctx) {
  std::array<Operator4, 3> obs = {observable(ctx.at(1)), observable(ctx.at(2)),
                                  observable(ctx.at(3))};
  JointDistribution8 out;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      for (int s3 : {1, -1}) {
        Operator4 prod = projector_pm(obs[0], s1) * projector_pm(obs[1], s2) *
                         projector_pm(obs[2], s3);
        double v = (rho.matrix() * prod).trace().real();
        if (v < kProbFloor) {
          throw ContractViolation("joint probability below -1e-10");
        }
        out.at(s1, s2, s3) = std::max(v, 0.0);
      }
    }
  }
  if (std::abs(out.sum() - 1.0) > kNormCheckTol) {
    throw ContractViolation("joint distribution does not sum to 1 within 1e-8");
  }
  return out;
}

std::array<int, 3> sequential_sample(const DensityMatrix& rho, const Context& ctx,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Operator4 state = rho.matrix();
  std::array<int, 3> outcome{};
  for (int k = 0; k < 3; ++k) {
    Operator4 proj = projector_pm(observable(ctx.at(k + 1)), 1);
    double p_plus = (state * proj).trace().real();
    p_plus = std::clamp(p_plus, 0.0, 1.0);
    int s = unit(rng) < p_plus ? 1 : -1;
    outcome[static_cast<std::size_t>(k)] = s;
    Operator4 pk = s == 1 ? proj : Operator4(Operator4::Identity() - proj);
    Operator4 next = pk * state * pk;
    double w = next.trace().real();
    if (w <= 0.0) {
      throw ContractViolation("state-update weight vanished for a drawn outcome");
    }
    state = next / w;
  }
  return outcome;
}

ProductDistribution product_distribution(const JointDistribution8& joint) {
  ProductDistribution out;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int s3 : {1, -1}) {
        if (s1 * s2 * s3 == 1) {
          out.p_plus += joint.prob(s1, s2, s3);
        } else {
          out.p_minus += joint.prob(s1, s2, s3);
        }
      }
  if (std::abs(out.p_plus + out.p_minus - 1.0) > kNormCheckTol) {
    throw ContractViolation("product distribution tails do not sum to 1 within 1e-8");
  }
  return out;
}

ProductDistribution marginal(const JointDistribution8& joint, int position) {
  if (position < 1 || position > 3) throw InvalidInput("position must be 1..3");
  ProductDistribution out;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int s3 : {1, -1}) {
        int s = position == 1 ? s1 : position == 2 ? s2 : s3;
        (s == 1 ? out.p_plus : out.p_minus) += joint.prob(s1, s2, s3);
      }
  return out;
}

}  // namespace pmlab::pmsquare

#include "pmlab/qcore.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>

namespace pmlab::qcore {

namespace {

const Complex kI(0.0, 1.0);

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

StateVector::StateVector(const Vector4& amplitudes) : amps_(amplitudes) {
  if (std::abs(amps_.norm() - 1.0) > kNormTol) {
    throw ContractViolation("state vector norm differs from 1 beyond 1e-12");
  }
}

StateVector StateVector::normalized(const Vector4& amplitudes) {
  double n = amplitudes.norm();
  if (n == 0.0) throw InvalidInput("cannot normalize the zero vector");
  return StateVector(Vector4(amplitudes / n));
}

DensityMatrix::DensityMatrix(const Operator4& rho) : rho_(rho) {
  if (!is_hermitian(rho_, kHermTol)) {
    throw ContractViolation("density matrix is not Hermitian within 1e-12");
  }
  if (std::abs(rho_.trace().real() - 1.0) > kTraceTol ||
      std::abs(rho_.trace().imag()) > kTraceTol) {
    throw ContractViolation("density matrix trace differs from 1 beyond 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Operator4> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kPsdSlack) {
    throw ContractViolation("density matrix has an eigenvalue below -1e-10");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

Matrix2 pauli(char label) {
  Matrix2 m;
  switch (label) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    case 'I': m << 1, 0, 0, 1; break;
    default: throw InvalidInput(std::string("unknown Pauli label '") + label + "'");
  }
  return m;
}

Operator4 tensor(const Matrix2& left, const Matrix2& right) {
  Operator4 out;
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < 2; ++p)
      for (int t = 0; t < 2; ++t)
        for (int q = 0; q < 2; ++q)
          out(2 * s + p, 2 * t + q) = left(s, t) * right(p, q);
  return out;
}

bool is_hermitian(const Operator4& op, double tol) {
  return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator4 projector_pm(const Operator4& obs, int sign) {
  if (sign != 1 && sign != -1) throw InvalidInput("sign must be +1 or -1");
  if (!is_hermitian(obs, kHermTol)) {
    throw ContractViolation("projector_pm requires a Hermitian operator");
  }
  if ((obs * obs - Operator4::Identity()).cwiseAbs().maxCoeff() > kInvolutionTol) {
    throw ContractViolation("projector_pm requires obs^2 = 1 within 1e-10");
  }
  return (Operator4::Identity() + static_cast<double>(sign) * obs) / 2.0;
}

double expectation(const DensityMatrix& rho, const Operator4& obs) {
  if (!is_hermitian(obs, kHermTol)) {
    throw InvalidInput("expectation requires a Hermitian observable");
  }
  Complex tr = (rho.matrix() * obs).trace();
  if (std::abs(tr.imag()) > kImagTol) {
    throw ContractViolation("expectation value has imaginary residue above 1e-10");
  }
  return tr.real();
}

namespace {

Vector4 ket(int i) {
  Vector4 v = Vector4::Zero();
  v(i) = 1.0;
  return v;
}

Vector4 superposition(std::initializer_list<int> kets) {
  Vector4 v = Vector4::Zero();
  for (int i : kets) v(i) = 1.0;
  return v;
}

DensityMatrix uniform_mixture(std::initializer_list<int> kets) {
  Operator4 rho = Operator4::Zero();
  for (int i : kets) rho += ket(i) * ket(i).adjoint();
  rho /= static_cast<double>(kets.size());
  return DensityMatrix(rho);
}

struct CatalogEntry {
  const char* label;
  const char* description;
};

constexpr std::array<CatalogEntry, 26> kCatalog = {{
    {"Psi1", "|0>"},
    {"Psi2", "|1>"},
    {"Psi3", "|2>"},
    {"Psi4", "|3>"},
    {"Psi5", "(|0>+|1>)/sqrt(2)"},
    {"Psi6", "(|0>+|2>)/sqrt(2)"},
    {"Psi7", "(|0>+|3>)/sqrt(2)"},
    {"Psi8", "(|1>+|2>)/sqrt(2)"},
    {"Psi9", "(|1>+|3>)/sqrt(2)"},
    {"Psi10", "(|2>+|3>)/sqrt(2)"},
    {"Psi11", "(|0>+|1>+|2>)/sqrt(3)"},
    {"Psi12", "(|0>+|1>+|3>)/sqrt(3)"},
    {"Psi13", "(|0>+|2>+|3>)/sqrt(3)"},
    {"Psi14", "(|1>+|2>+|3>)/sqrt(3)"},
    {"Psi15", "(|0>+|1>+|2>+|3>)/2"},
    {"rho16", "(|0><0|+|1><1|)/2"},
    {"rho17", "(|0><0|+|2><2|)/2"},
    {"rho18", "(|0><0|+|3><3|)/2"},
    {"rho19", "(|1><1|+|2><2|)/2"},
    {"rho20", "(|1><1|+|3><3|)/2"},
    {"rho21", "(|2><2|+|3><3|)/2"},
    {"rho22", "(|0><0|+|1><1|+|2><2|)/3"},
    {"rho23", "(|0><0|+|1><1|+|3><3|)/3"},
    {"rho24", "(|0><0|+|2><2|+|3><3|)/3"},
    {"rho25", "(|1><1|+|2><2|+|3><3|)/3"},
    {"rho26", "1/4"},
}};

DensityMatrix build_state(int index) {
  auto pure = [](Vector4 v) {
    return DensityMatrix::from_pure(StateVector::normalized(v));
  };
  switch (index) {
    case 1: return pure(ket(0));
    case 2: return pure(ket(1));
    case 3: return pure(ket(2));
    case 4: return pure(ket(3));
    case 5: return pure(superposition({0, 1}));
    case 6: return pure(superposition({0, 2}));
    case 7: return pure(superposition({0, 3}));
    case 8: return pure(superposition({1, 2}));
    case 9: return pure(superposition({1, 3}));
    case 10: return pure(superposition({2, 3}));
    case 11: return pure(superposition({0, 1, 2}));
    case 12: return pure(superposition({0, 1, 3}));
    case 13: return pure(superposition({0, 2, 3}));
    case 14: return pure(superposition({1, 2, 3}));
    case 15: return pure(superposition({0, 1, 2, 3}));
    case 16: return uniform_mixture({0, 1});
    case 17: return uniform_mixture({0, 2});
    case 18: return uniform_mixture({0, 3});
    case 19: return uniform_mixture({1, 2});
    case 20: return uniform_mixture({1, 3});
    case 21: return uniform_mixture({2, 3});
    case 22: return uniform_mixture({0, 1, 2});
    case 23: return uniform_mixture({0, 1, 3});
    case 24: return uniform_mixture({0, 2, 3});
    case 25: return uniform_mixture({1, 2, 3});
    case 26: return uniform_mixture({0, 1, 2, 3});
    default: throw InvalidInput("catalog index out of range");
  }
}

int catalog_index(std::string_view label) {
  std::string key = lower(label);
  for (std::size_t i = 0; i < kCatalog.size(); ++i) {
    if (key == lower(kCatalog[i].label)) return static_cast<int>(i) + 1;
  }
  return 0;
}

}  // namespace

DensityMatrix state_factory(std::string_view label) {
  int idx = catalog_index(label);
  if (idx == 0) {
    throw InvalidInput("unknown state label '" + std::string(label) + "'");
  }
  return build_state(idx);
}

std::vector<std::string> state_labels() {
  std::vector<std::string> out;
  out.reserve(kCatalog.size());
  for (const auto& e : kCatalog) out.emplace_back(e.label);
  return out;
}

std::string state_description(std::string_view label) {
  int idx = catalog_index(label);
  if (idx == 0) {
    throw InvalidInput("unknown state label '" + std::string(label) + "'");
  }
  return kCatalog[static_cast<std::size_t>(idx - 1)].description;
}

DensityMatrix random_state(std::uint64_t seed, RandomStateKind kind) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&] { return Complex(gauss(rng), gauss(rng)); };
  if (kind == RandomStateKind::Pure) {
    Vector4 v;
    for (int i = 0; i < 4; ++i) v(i) = draw();
    return DensityMatrix::from_pure(StateVector::normalized(v));
  }
  Operator4 g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = draw();
  Operator4 w = g * g.adjoint();
  w /= w.trace().real();
  // Symmetrize away the last bits of asymmetry before validation.
  w = ((w + Operator4(w.adjoint())) / 2.0).eval();
  return DensityMatrix(w);
}

}  // namespace pmlab::qcore

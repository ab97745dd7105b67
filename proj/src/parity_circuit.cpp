#include "qubus/parity_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qubus {

namespace {

constexpr double kRoot2Inv = (1.0 / std::numbers::sqrt2);
const Complex kI{0.0, 1.0};

Matrix8c embed4(const Matrix4c& u) {
  Matrix8c m = Matrix8c::Identity();
  m.topLeftCorner<4, 4>() = u;
  return m;
}

}  // namespace

std::string to_string(Bell b) {
  switch (b) {
    case Bell::PhiPlus: return "Phi+";
    case Bell::PhiMinus: return "Phi-";
    case Bell::PsiPlus: return "Psi+";
    case Bell::PsiMinus: return "Psi-";
  }
  return "?";
}

Matrix2c bell_matrix(Bell b) {
  Matrix2c m = Matrix2c::Zero();
  switch (b) {
    case Bell::PhiPlus: m(0, 0) = kRoot2Inv; m(1, 1) = kRoot2Inv; break;
    case Bell::PhiMinus: m(0, 0) = kRoot2Inv; m(1, 1) = -kRoot2Inv; break;
    case Bell::PsiPlus: m(0, 1) = kRoot2Inv; m(1, 0) = kRoot2Inv; break;
    case Bell::PsiMinus: m(0, 1) = kRoot2Inv; m(1, 0) = -kRoot2Inv; break;
  }
  return m;
}

Matrix2c to_matrix(const Vector4c& v) {
  Matrix2c m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

Vector4c to_vector(const Matrix2c& m) {
  Vector4c v;
  v << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
  return v;
}

// ---------------------------------------------------------------------------

ModeMatrix ModeMatrix::from_polarization(const Matrix2c& amplitudes) {
  ModeMatrix s;
  s.coeffs_.topLeftCorner<2, 2>() = amplitudes;
  return s;
}

bool ModeMatrix::supported_on(const std::vector<int>& tracks, double tol) const {
  auto allowed = [&](int m) {
    return std::find(tracks.begin(), tracks.end(), m) != tracks.end();
  };
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b <= 8; ++b) {
      if ((!allowed(a) || !allowed(b)) && std::abs(at(a, b)) > tol) return false;
    }
  }
  return true;
}

ModeMatrix bell_to_whichpath(int mu) {
  if (mu < 1 || mu > 4) throw std::out_of_range("Bell index must be 1..4");
  return ModeMatrix::from_polarization(bell_matrix(static_cast<Bell>(mu)));
}

std::array<LocalUnitary, 4> build_unitaries() {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd zero = Eigen::Matrix2cd::Zero();

  Matrix4c u1;
  u1 << id, id, -id, id;
  u1 *= kRoot2Inv;

  Eigen::Matrix2cd v;
  v << 0.0, 1.0, -1.0, 0.0;
  Matrix4c u2;
  u2 << zero, kI * v, id, zero;

  Matrix4c p1 = Matrix4c::Zero();
  p1(2, 2) = 1.0;
  p1(3, 3) = 1.0;
  Matrix4c p2 = Matrix4c::Zero();
  p2(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  Matrix8c u4;
  u4 << p1, p2, p2, -p1;

  return {{{"U1", embed4(u1)},
           {"U2", embed4(u2)},
           {"U3", embed4(u1.transpose())},
           {"U4", u4}}};
}

double unitarity_residual(const Matrix8c& u) {
  return (u * u.adjoint() - Matrix8c::Identity()).cwiseAbs().maxCoeff();
}

ModeMatrix apply_local(const ModeMatrix& state, const LocalUnitary& u, Side side) {
  if (side == Side::A) return ModeMatrix(u.matrix * state.coeffs());
  return ModeMatrix(state.coeffs() * u.matrix.transpose());
}

ModeMatrix full_transform(const ModeMatrix& state) {
  static const auto unitaries = build_unitaries();
  return full_transform(state, unitaries);
}

ModeMatrix full_transform(const ModeMatrix& state,
                          const std::array<LocalUnitary, 4>& unitaries) {
  if (!state.supported_on({1, 2})) {
    throw std::invalid_argument("full_transform: input must live on tracks 1 and 2");
  }
  ModeMatrix out = state;
  for (const auto& u : unitaries) {
    out = apply_local(apply_local(out, u, Side::A), u, Side::B);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Port pairs

std::string to_string(PortPair p) {
  switch (p) {
    case PortPair::KaKb: return "K_A K_B";
    case PortPair::KaRb: return "K_A R_B";
    case PortPair::RaKb: return "R_A K_B";
    case PortPair::RaRb: return "R_A R_B";
  }
  return "?";
}

bool a_is_k(PortPair p) { return p == PortPair::KaKb || p == PortPair::KaRb; }
bool b_is_k(PortPair p) { return p == PortPair::KaKb || p == PortPair::RaKb; }
int a_track(PortPair p) { return a_is_k(p) ? 3 : 5; }
int b_track(PortPair p) { return b_is_k(p) ? 3 : 5; }

PortPair port_from_clicks(bool a_click, bool b_click) {
  if (a_click) return b_click ? PortPair::KaKb : PortPair::KaRb;
  return b_click ? PortPair::RaKb : PortPair::RaRb;
}

PortBlock project_port_pair(const ModeMatrix& state, PortPair pair) {
  PortBlock out;
  out.block = state.coeffs().block<2, 2>(a_track(pair) - 1, b_track(pair) - 1);
  out.probability = out.block.squaredNorm();
  return out;
}

int schmidt_rank(const Matrix2c& block) {
  if (block.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("schmidt_rank: zero block");
  }
  Eigen::JacobiSVD<Matrix2c> svd(block);
  const auto& s = svd.singularValues();
  return static_cast<int>((s.array() > 1e-10).count());
}

Matrix2c port_direction(PortPair pair) {
  const Matrix2c phi_p = bell_matrix(Bell::PhiPlus);
  const Matrix2c phi_m = bell_matrix(Bell::PhiMinus);
  const Matrix2c psi_p = bell_matrix(Bell::PsiPlus);
  const Matrix2c psi_m = bell_matrix(Bell::PsiMinus);
  switch (pair) {
    case PortPair::KaKb: return kRoot2Inv * (phi_m + kI * psi_p);
    case PortPair::RaRb: return kRoot2Inv * (phi_m - kI * psi_p);
    case PortPair::KaRb: return kRoot2Inv * (phi_p - kI * psi_m);
    case PortPair::RaKb: return kRoot2Inv * (phi_p + kI * psi_m);
  }
  return Matrix2c::Zero();
}

HybridKet to_hybrid_ket(const ModeMatrix& state) {
  std::vector<PhotonMode> modes;
  for (const char* loc : {"A", "B"}) {
    for (int t = 1; t <= 8; ++t) modes.push_back({loc, std::to_string(t)});
  }
  auto registry = ModeRegistry::make(std::move(modes), {});
  std::vector<BranchTerm> terms;
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b <= 8; ++b) {
      const Complex c = state.at(a, b);
      if (std::abs(c) < kPruneThreshold) continue;
      std::vector<std::uint8_t> occ(16, 0);
      occ[static_cast<std::size_t>(a - 1)] = 1;
      occ[static_cast<std::size_t>(8 + b - 1)] = 1;
      terms.push_back({c, PhotonPattern(std::move(occ)), {}});
    }
  }
  return HybridKet(registry, std::move(terms));
}

std::vector<InputComponent> decompose_input(const Matrix4c& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("input density matrix is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw std::invalid_argument("input density matrix must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(0.5 * (rho + rho.adjoint()));
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("input density matrix is not positive semidefinite");
  }
  std::vector<InputComponent> out;
  for (int k = 3; k >= 0; --k) {
    const double w = eig.eigenvalues()(k);
    if (w <= 1e-14) continue;
    Vector4c v = eig.eigenvectors().col(k);
    int lead = 0;
    const double top = v.cwiseAbs().maxCoeff();
    while (std::abs(v(lead)) < top * (1.0 - 1e-9)) ++lead;
    v *= std::conj(v(lead)) / std::abs(v(lead));
    out.push_back({w, v});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification suite

bool CircuitReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CircuitCheck& c) { return c.passed; });
}

namespace {

// Published Bell-input block table: for each input, the two nonzero port
// blocks expressed in the Bell basis.
struct ExpectedBlock {
  PortPair pair;
  Matrix2c block;
};

std::vector<ExpectedBlock> expected_blocks(Bell input) {
  const Matrix2c phi_p = bell_matrix(Bell::PhiPlus);
  const Matrix2c phi_m = bell_matrix(Bell::PhiMinus);
  const Matrix2c psi_p = bell_matrix(Bell::PsiPlus);
  const Matrix2c psi_m = bell_matrix(Bell::PsiMinus);
  switch (input) {
    case Bell::PhiPlus:
      return {{PortPair::KaRb, 0.5 * (-phi_p + kI * psi_m)},
              {PortPair::RaKb, 0.5 * (-phi_p - kI * psi_m)}};
    case Bell::PhiMinus:
      return {{PortPair::KaKb, 0.5 * (phi_m + kI * psi_p)},
              {PortPair::RaRb, 0.5 * (phi_m - kI * psi_p)}};
    case Bell::PsiPlus:
      return {{PortPair::KaKb, 0.5 * (psi_p - kI * phi_m)},
              {PortPair::RaRb, 0.5 * (psi_p + kI * phi_m)}};
    case Bell::PsiMinus:
      return {{PortPair::KaRb, 0.5 * (-psi_m - kI * phi_p)},
              {PortPair::RaKb, 0.5 * (-psi_m + kI * phi_p)}};
  }
  return {};
}

std::string format_bell_coefficients(const Matrix2c& block) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (Bell b : {Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus}) {
    const Complex c = (bell_matrix(b).conjugate().cwiseProduct(block)).sum();
    if (std::abs(c) < 1e-12) continue;
    if (!first) os << " ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)"
       << to_string(b);
  }
  if (first) os << "0";
  return os.str();
}

double outside_ports(const ModeMatrix& m) {
  Matrix8c rest = m.coeffs();
  rest.block<4, 4>(2, 2).setZero();
  return rest.cwiseAbs().maxCoeff();
}

void add(CircuitReport& r, std::string name, double residual, double tol) {
  r.checks.push_back({std::move(name), residual, residual < tol});
}

}  // namespace

CircuitReport verify_circuit(const std::array<LocalUnitary, 4>& unitaries,
                             double tol) {
  CircuitReport report;
  for (const auto& u : unitaries) {
    add(report, "unitarity " + u.name, unitarity_residual(u.matrix), tol);
  }

  std::array<ModeMatrix, 4> outputs;
  for (int mu = 1; mu <= 4; ++mu) {
    const Bell bell = static_cast<Bell>(mu);
    const ModeMatrix in = bell_to_whichpath(mu);
    const ModeMatrix out = full_transform(in, unitaries);
    outputs[static_cast<std::size_t>(mu - 1)] = out;
    const std::string tag = to_string(bell);

    add(report, tag + " norm", std::abs(out.squared_norm() - in.squared_norm()), tol);
    add(report, tag + " support on tracks 3-6", outside_ports(out), tol);

    const auto expected = expected_blocks(bell);
    for (PortPair pair : kAllPortPairs) {
      const PortBlock got = project_port_pair(out, pair);
      Matrix2c want = Matrix2c::Zero();
      for (const auto& e : expected) {
        if (e.pair == pair) want = e.block;
      }
      const std::string ptag = tag + " -> " + to_string(pair);
      add(report, ptag + " block", (got.block - want).cwiseAbs().maxCoeff(), tol);
      report.block_table.push_back(ptag + ": " + format_bell_coefficients(got.block) +
                                   " | p=" + std::to_string(got.probability));
      if (want.cwiseAbs().maxCoeff() > 0.0) {
        const double rank_residual =
            got.probability > 1e-12 ? std::abs(schmidt_rank(got.block) - 1) : 1.0;
        add(report, ptag + " Schmidt rank 1", rank_residual, 0.5);
      }
    }
  }

  // Linearity on a fixed superposition.
  {
    const std::array<Complex, 4> c{Complex{0.3, 0.1}, Complex{-0.2, 0.5},
                                   Complex{0.6, -0.1}, Complex{0.1, 0.4}};
    Matrix8c in = Matrix8c::Zero();
    Matrix8c combined = Matrix8c::Zero();
    for (int mu = 1; mu <= 4; ++mu) {
      in += c[static_cast<std::size_t>(mu - 1)] * bell_to_whichpath(mu).coeffs();
      combined += c[static_cast<std::size_t>(mu - 1)] *
                  outputs[static_cast<std::size_t>(mu - 1)].coeffs();
    }
    const ModeMatrix direct = full_transform(ModeMatrix(in), unitaries);
    add(report, "linearity", (direct.coeffs() - combined).cwiseAbs().maxCoeff(), tol);
  }

  // Swapping tracks 1 <-> 2 on both sides: B1, B3 invariant; B2, B4 negated.
  for (int mu = 1; mu <= 4; ++mu) {
    Matrix8c swapped = bell_to_whichpath(mu).coeffs();
    swapped.row(0).swap(swapped.row(1));
    swapped.col(0).swap(swapped.col(1));
    const double sign = (mu == 1 || mu == 3) ? 1.0 : -1.0;
    const ModeMatrix out = full_transform(ModeMatrix(swapped), unitaries);
    add(report, "permutation symmetry " + to_string(static_cast<Bell>(mu)),
        (out.coeffs() - sign * outputs[static_cast<std::size_t>(mu - 1)].coeffs())
            .cwiseAbs()
            .maxCoeff(),
        tol);
  }
  return report;
}

}  // namespace qubus

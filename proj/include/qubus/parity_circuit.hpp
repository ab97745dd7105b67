#pragma once

// Linear-optical pre-processing circuit that maps a bi-photon input onto
// four port pairs, each carrying a fixed superposition of one even- and
// one odd-parity Bell state.
//
// Conventions:
//   * which-path modes are numbered 1..8 at each location;
//   * input polarization H -> track 1, V -> track 2;
//   * K ports are tracks (3,4), R ports tracks (5,6), lower index = H;
//   * a ModeMatrix C holds state = sum C(m,n) a_m^dag b_n^dag |0>, rows for
//     location A and columns for location B.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qubus/hybrid_state.hpp"

namespace qubus {

using Matrix8c = Eigen::Matrix<Complex, 8, 8>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

enum class Bell { PhiPlus = 1, PhiMinus = 2, PsiPlus = 3, PsiMinus = 4 };

std::string to_string(Bell b);

/// Bell state as a 2x2 polarization amplitude matrix, rows A (H,V), cols B.
Matrix2c bell_matrix(Bell b);

/// Polarization basis vector order: HH, HV, VH, VV (A first).
Matrix2c to_matrix(const Vector4c& polarization);
Vector4c to_vector(const Matrix2c& polarization);

class ModeMatrix {
 public:
  ModeMatrix() : coeffs_(Matrix8c::Zero()) {}
  explicit ModeMatrix(const Matrix8c& coeffs) : coeffs_(coeffs) {}

  /// Embeds a polarization amplitude matrix on tracks {1,2}x{1,2}.
  static ModeMatrix from_polarization(const Matrix2c& amplitudes);

  /// 1-based access.
  Complex at(int a_mode, int b_mode) const { return coeffs_(a_mode - 1, b_mode - 1); }
  Complex& at(int a_mode, int b_mode) { return coeffs_(a_mode - 1, b_mode - 1); }

  const Matrix8c& coeffs() const { return coeffs_; }
  double squared_norm() const { return coeffs_.squaredNorm(); }

  /// True if every amplitude outside the given 1-based tracks is below tol.
  bool supported_on(const std::vector<int>& tracks, double tol = 1e-12) const;

 private:
  Matrix8c coeffs_;
};

/// |B^mu> for mu = 1..4 (Phi+, Phi-, Psi+, Psi-) in which-path form.
ModeMatrix bell_to_whichpath(int mu);

struct LocalUnitary {
  std::string name;
  Matrix8c matrix;
};

/// U1, U2, U3 = U1^T (all padded with identity) and the full 8x8 U4.
std::array<LocalUnitary, 4> build_unitaries();

/// max |(U U^dag - I)_{ij}|
double unitarity_residual(const Matrix8c& u);

enum class Side { A, B };

/// Side A: C -> U C. Side B: C -> C U^T.
ModeMatrix apply_local(const ModeMatrix& state, const LocalUnitary& u, Side side);

/// U1..U4 on both sides. Input must live on tracks {1,2}.
ModeMatrix full_transform(const ModeMatrix& state);
ModeMatrix full_transform(const ModeMatrix& state,
                          const std::array<LocalUnitary, 4>& unitaries);

enum class PortPair { KaKb, KaRb, RaKb, RaRb };

inline constexpr std::array<PortPair, 4> kAllPortPairs{
    PortPair::KaKb, PortPair::KaRb, PortPair::RaKb, PortPair::RaRb};

std::string to_string(PortPair p);
/// First track of the (H, V) pair used by the port at each location.
int a_track(PortPair p);
int b_track(PortPair p);
bool a_is_k(PortPair p);
bool b_is_k(PortPair p);
PortPair port_from_clicks(bool a_click, bool b_click);

struct PortBlock {
  Matrix2c block;  // rows A (H,V), cols B (H,V)
  double probability = 0.0;
};

PortBlock project_port_pair(const ModeMatrix& state, PortPair pair);

/// Number of singular values above 1e-10. Throws on a zero block.
int schmidt_rank(const Matrix2c& block);

/// The normalized direction |V_i> every input lands on for this port pair.
Matrix2c port_direction(PortPair pair);

/// Bi-photon which-path state as a HybridKet over modes A.1..A.8, B.1..B.8
/// (no bus modes).
HybridKet to_hybrid_ket(const ModeMatrix& state);

struct InputComponent {
  double weight = 0.0;
  Vector4c ket;  // polarization basis HH, HV, VH, VV
};

/// Eigen-decomposition of a 4x4 input density matrix: weights descending,
/// largest-magnitude entry of each eigenvector real positive. Components
/// with weight below 1e-14 are dropped.
std::vector<InputComponent> decompose_input(const Matrix4c& rho);

struct CircuitCheck {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

struct CircuitReport {
  std::vector<CircuitCheck> checks;
  /// Per Bell input and port pair: block coefficients over the Bell basis.
  std::vector<std::string> block_table;
  bool all_passed() const;
};

/// Invariant suite of the circuit: unitarity and the expected block structure
/// for each Bell input plus linearity and permutation checks.
CircuitReport verify_circuit(const std::array<LocalUnitary, 4>& unitaries,
                             double tol = 1e-10);

}  // namespace qubus

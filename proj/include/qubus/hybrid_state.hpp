#pragma once

// Exact algebra for states that pair discrete photon patterns with
// multimode coherent "bus" states. Coherent states are carried as complex
// labels; every inner product uses the closed-form overlap kernel, so
// nothing is truncated.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qubus {

using Complex = std::complex<double>;

class RegistryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients below this magnitude are dropped from branch lists.
inline constexpr double kPruneThreshold = 1e-15;

/// <a|b> for coherent states |a>, |b>.
Complex coherent_overlap(Complex a, Complex b);

struct PhotonMode {
  std::string location;  // e.g. "A"
  std::string label;     // polarization or which-path track, e.g. "H", "3"

  std::string name() const { return location + "." + label; }
  bool operator==(const PhotonMode&) const = default;
};

/// Declared photonic and bus modes shared by all terms of a state.
class ModeRegistry {
 public:
  ModeRegistry(std::vector<PhotonMode> photon_modes,
               std::vector<std::string> bus_modes);

  static std::shared_ptr<const ModeRegistry> make(
      std::vector<PhotonMode> photon_modes, std::vector<std::string> bus_modes);

  std::size_t photon_count() const { return photon_modes_.size(); }
  std::size_t bus_count() const { return bus_modes_.size(); }
  const std::vector<PhotonMode>& photon_modes() const { return photon_modes_; }
  const std::vector<std::string>& bus_modes() const { return bus_modes_; }

  /// Accepts "A.H" style names. Throws RegistryError if absent.
  std::size_t photon_index(std::string_view name) const;
  std::size_t bus_index(std::string_view name) const;
  bool has_bus(std::string_view name) const;

  /// Distinct location tags in declaration order.
  const std::vector<std::string>& locations() const { return locations_; }
  std::size_t location_of(std::size_t photon_index) const {
    return photon_location_[photon_index];
  }

  bool operator==(const ModeRegistry& other) const {
    return photon_modes_ == other.photon_modes_ &&
           bus_modes_ == other.bus_modes_;
  }

 private:
  std::vector<PhotonMode> photon_modes_;
  std::vector<std::string> bus_modes_;
  std::vector<std::string> locations_;
  std::vector<std::size_t> photon_location_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// Photon occupation over the registry's photon modes: each entry 0 or 1,
/// at most one photon per location.
class PhotonPattern {
 public:
  PhotonPattern() = default;
  explicit PhotonPattern(std::vector<std::uint8_t> occupation)
      : occupation_(std::move(occupation)) {}

  /// Pattern with one photon in each of the named modes.
  static PhotonPattern from_modes(const ModeRegistry& registry,
                                  std::initializer_list<std::string_view> modes);

  const std::vector<std::uint8_t>& occupation() const { return occupation_; }
  bool occupied(std::size_t mode) const { return occupation_.at(mode) != 0; }
  std::size_t size() const { return occupation_.size(); }

  void validate(const ModeRegistry& registry) const;

  bool operator==(const PhotonPattern&) const = default;
  auto operator<=>(const PhotonPattern&) const = default;

 private:
  std::vector<std::uint8_t> occupation_;
};

/// One complex amplitude per registered bus mode.
using CoherentLabel = std::vector<Complex>;

struct BranchTerm {
  Complex coeff;
  PhotonPattern pattern;
  CoherentLabel bus;
};

/// Product of the per-mode coherent overlaps <a|b>.
Complex label_overlap(const CoherentLabel& a, const CoherentLabel& b);
/// <a|b> including the photon-pattern delta.
Complex branch_overlap(const BranchTerm& a, const BranchTerm& b);

class HybridKet {
 public:
  HybridKet() = default;
  /// Merges equal (pattern, label) pairs after validation. Coefficients
  /// below kPruneThreshold are dropped.
  HybridKet(RegistryPtr registry, std::vector<BranchTerm> terms);

  const RegistryPtr& registry() const { return registry_; }
  const std::vector<BranchTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  HybridKet scaled(Complex factor) const;
  HybridKet normalized() const;

  /// Tensor with fresh coherent bus modes (appended to the registry).
  HybridKet with_bus_modes(const std::vector<std::string>& names,
                           const std::vector<Complex>& amplitudes) const;

 private:
  RegistryPtr registry_;
  std::vector<BranchTerm> terms_;
};

HybridKet operator+(const HybridKet& a, const HybridKet& b);

Complex inner(const HybridKet& bra, const HybridKet& ket);
double norm(const HybridKet& state);

struct Projection {
  HybridKet state;  // unnormalized
  double probability = 0.0;
};

Projection project_pattern(const HybridKet& state,
                           const std::function<bool(const PhotonPattern&)>& keep);

/// rho = sum_ij c_i conj(c_j) gram(i,j) |b_i><b_j|, where gram(i,j) is the
/// overlap <e_j|e_i> of environment states that leaked out of the branches.
class BranchedDensity {
 public:
  BranchedDensity() = default;
  BranchedDensity(RegistryPtr registry, std::vector<BranchTerm> branches,
                  Eigen::MatrixXcd gram);

  static BranchedDensity from_pure(const HybridKet& state);

  const RegistryPtr& registry() const { return registry_; }
  const std::vector<BranchTerm>& branches() const { return branches_; }
  const Eigen::MatrixXcd& gram() const { return gram_; }

  /// Same Gram matrix, branches replaced (used by unitary label maps).
  BranchedDensity with_branches(std::vector<BranchTerm> branches) const;

 private:
  RegistryPtr registry_;
  std::vector<BranchTerm> branches_;
  Eigen::MatrixXcd gram_;
};

BranchedDensity loss_channel(const HybridKet& state, std::string_view bus_mode,
                             double eta);
BranchedDensity loss_channel(const BranchedDensity& state,
                             std::string_view bus_mode, double eta);

double trace(const BranchedDensity& state);
double fidelity_with(const BranchedDensity& state, const HybridKet& target);

struct DensityComponent {
  double weight = 0.0;
  HybridKet ket;  // normalized
};

/// Spectral decomposition of the represented operator, weights descending.
/// Each eigenket's largest-magnitude coefficient is made real positive.
std::vector<DensityComponent> eigen_decompose(const BranchedDensity& state);

/// Operator on a single bus mode, given by its coherent-state matrix
/// elements <bra|E|ket>.
class BusEffect {
 public:
  using Kernel = std::function<Complex(Complex bra, Complex ket)>;

  explicit BusEffect(Kernel kernel) : kernel_(std::move(kernel)) {}

  static BusEffect identity();
  static BusEffect vacuum();         // |0><0|
  static BusEffect single_photon();  // |1><1|

  Complex element(Complex bra, Complex ket) const { return kernel_(bra, ket); }

 private:
  Kernel kernel_;
};

struct BusMeasurement {
  std::string bus_mode;
  BusEffect effect;
};

/// Photon-only density matrix over a list of basis patterns.
struct PhotonicDensity {
  RegistryPtr registry;  // photon modes of the parent, no bus modes
  std::vector<PhotonPattern> basis;
  Eigen::MatrixXcd rho;

  double trace() const { return rho.trace().real(); }
  PhotonicDensity normalized() const;
  PhotonicDensity scaled(double factor) const;
};

PhotonicDensity operator+(const PhotonicDensity& a, const PhotonicDensity& b);

/// Traces out every bus mode, inserting the given effects on the named modes
/// (identity elsewhere). The trace of the result is the effect's expectation.
PhotonicDensity reduce_to_photons(const BranchedDensity& state,
                                  const std::vector<BusMeasurement>& effects);

double expectation(const BranchedDensity& state,
                   const std::vector<BusMeasurement>& effects);

/// <target|rho|target> for a photon-only target ket (its bus registry is
/// ignored only if empty).
double fidelity_with(const PhotonicDensity& state, const HybridKet& target);

/// Registry holding only the photon modes of `registry`.
RegistryPtr photons_only(const RegistryPtr& registry);

}  // namespace qubus

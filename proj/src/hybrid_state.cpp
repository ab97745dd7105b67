#include "qubus/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qubus {

Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

// ---------------------------------------------------------------------------
// ModeRegistry

ModeRegistry::ModeRegistry(std::vector<PhotonMode> photon_modes,
                           std::vector<std::string> bus_modes)
    : photon_modes_(std::move(photon_modes)), bus_modes_(std::move(bus_modes)) {
  for (std::size_t i = 0; i < photon_modes_.size(); ++i) {
    const auto& mode = photon_modes_[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (photon_modes_[j] == mode) {
        throw RegistryError("duplicate photon mode " + mode.name());
      }
    }
    auto it = std::find(locations_.begin(), locations_.end(), mode.location);
    if (it == locations_.end()) {
      photon_location_.push_back(locations_.size());
      locations_.push_back(mode.location);
    } else {
      photon_location_.push_back(
          static_cast<std::size_t>(std::distance(locations_.begin(), it)));
    }
  }
  for (std::size_t i = 0; i < bus_modes_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (bus_modes_[i] == bus_modes_[j]) {
        throw RegistryError("duplicate bus mode " + bus_modes_[i]);
      }
    }
  }
}

std::shared_ptr<const ModeRegistry> ModeRegistry::make(
    std::vector<PhotonMode> photon_modes, std::vector<std::string> bus_modes) {
  return std::make_shared<const ModeRegistry>(std::move(photon_modes),
                                              std::move(bus_modes));
}

std::size_t ModeRegistry::photon_index(std::string_view name) const {
  for (std::size_t i = 0; i < photon_modes_.size(); ++i) {
    if (photon_modes_[i].name() == name) return i;
  }
  throw RegistryError("unknown photon mode " + std::string(name));
}

std::size_t ModeRegistry::bus_index(std::string_view name) const {
  for (std::size_t i = 0; i < bus_modes_.size(); ++i) {
    if (bus_modes_[i] == name) return i;
  }
  throw RegistryError("unknown bus mode " + std::string(name));
}

bool ModeRegistry::has_bus(std::string_view name) const {
  return std::find(bus_modes_.begin(), bus_modes_.end(), name) !=
         bus_modes_.end();
}

// ---------------------------------------------------------------------------
// PhotonPattern

PhotonPattern PhotonPattern::from_modes(
    const ModeRegistry& registry, std::initializer_list<std::string_view> modes) {
  std::vector<std::uint8_t> occ(registry.photon_count(), 0);
  for (auto name : modes) occ[registry.photon_index(name)] = 1;
  PhotonPattern p(std::move(occ));
  p.validate(registry);
  return p;
}

void PhotonPattern::validate(const ModeRegistry& registry) const {
  if (occupation_.size() != registry.photon_count()) {
    throw RegistryError("photon pattern size does not match registry");
  }
  std::vector<int> per_location(registry.locations().size(), 0);
  for (std::size_t i = 0; i < occupation_.size(); ++i) {
    if (occupation_[i] > 1) {
      throw std::invalid_argument("photon pattern: more than one photon in mode " +
                                  registry.photon_modes()[i].name());
    }
    if (occupation_[i] != 0 && ++per_location[registry.location_of(i)] > 1) {
      throw std::invalid_argument(
          "photon pattern: more than one photon at location " +
          registry.locations()[registry.location_of(i)]);
    }
  }
}

// ---------------------------------------------------------------------------
// Overlaps

Complex label_overlap(const CoherentLabel& a, const CoherentLabel& b) {
  Complex result{1.0, 0.0};
  for (std::size_t m = 0; m < a.size(); ++m) result *= coherent_overlap(a[m], b[m]);
  return result;
}

Complex branch_overlap(const BranchTerm& a, const BranchTerm& b) {
  if (!(a.pattern == b.pattern)) return {0.0, 0.0};
  return label_overlap(a.bus, b.bus);
}

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool same_label(const CoherentLabel& a, const CoherentLabel& b) {
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (std::abs(a[m] - b[m]) > 1e-14 * (1.0 + std::abs(a[m]))) return false;
  }
  return true;
}

void check_registry(const RegistryPtr& a, const RegistryPtr& b) {
  if (a == b) return;
  if (!a || !b || !(*a == *b)) throw RegistryError("mismatched mode registries");
}

}  // namespace

// ---------------------------------------------------------------------------
// HybridKet

HybridKet::HybridKet(RegistryPtr registry, std::vector<BranchTerm> terms)
    : registry_(std::move(registry)) {
  if (!registry_) throw RegistryError("null registry");
  for (auto& term : terms) {
    term.pattern.validate(*registry_);
    if (term.bus.size() != registry_->bus_count()) {
      throw RegistryError("coherent label does not cover every bus mode");
    }
    if (!finite(term.coeff)) throw std::invalid_argument("non-finite amplitude");
    for (auto z : term.bus) {
      if (!finite(z)) throw std::invalid_argument("non-finite coherent label");
    }
    auto match = std::find_if(terms_.begin(), terms_.end(), [&](const BranchTerm& t) {
      return t.pattern == term.pattern && same_label(t.bus, term.bus);
    });
    if (match != terms_.end()) {
      match->coeff += term.coeff;
    } else {
      terms_.push_back(std::move(term));
    }
  }
  std::erase_if(terms_, [](const BranchTerm& t) {
    return std::abs(t.coeff) < kPruneThreshold;
  });
}

HybridKet HybridKet::scaled(Complex factor) const {
  auto terms = terms_;
  for (auto& t : terms) t.coeff *= factor;
  return HybridKet(registry_, std::move(terms));
}

HybridKet HybridKet::normalized() const {
  const double n = norm(*this);
  if (n == 0.0) throw std::domain_error("cannot normalize the zero state");
  return scaled(1.0 / n);
}

HybridKet HybridKet::with_bus_modes(const std::vector<std::string>& names,
                                    const std::vector<Complex>& amplitudes) const {
  if (names.size() != amplitudes.size()) {
    throw std::invalid_argument("with_bus_modes: names/amplitudes size mismatch");
  }
  auto buses = registry_->bus_modes();
  buses.insert(buses.end(), names.begin(), names.end());
  auto registry = ModeRegistry::make(registry_->photon_modes(), std::move(buses));
  auto terms = terms_;
  for (auto& t : terms) t.bus.insert(t.bus.end(), amplitudes.begin(), amplitudes.end());
  return HybridKet(std::move(registry), std::move(terms));
}

HybridKet operator+(const HybridKet& a, const HybridKet& b) {
  if (a.registry() == nullptr) return b;
  if (b.registry() == nullptr) return a;
  check_registry(a.registry(), b.registry());
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return HybridKet(a.registry(), std::move(terms));
}

Complex inner(const HybridKet& bra, const HybridKet& ket) {
  check_registry(bra.registry(), ket.registry());
  Complex sum{0.0, 0.0};
  for (const auto& b : bra.terms()) {
    for (const auto& k : ket.terms()) {
      sum += std::conj(b.coeff) * k.coeff * branch_overlap(b, k);
    }
  }
  return sum;
}

double norm(const HybridKet& state) {
  if (state.empty()) return 0.0;
  return std::sqrt(std::max(0.0, inner(state, state).real()));
}

Projection project_pattern(const HybridKet& state,
                           const std::function<bool(const PhotonPattern&)>& keep) {
  std::vector<BranchTerm> kept;
  for (const auto& t : state.terms()) {
    if (keep(t.pattern)) kept.push_back(t);
  }
  Projection result{HybridKet(state.registry(), std::move(kept)), 0.0};
  result.probability = std::clamp(inner(result.state, result.state).real(), 0.0, 1.0);
  return result;
}

// ---------------------------------------------------------------------------
// BranchedDensity

BranchedDensity::BranchedDensity(RegistryPtr registry,
                                 std::vector<BranchTerm> branches,
                                 Eigen::MatrixXcd gram)
    : registry_(std::move(registry)),
      branches_(std::move(branches)),
      gram_(std::move(gram)) {
  const auto n = static_cast<Eigen::Index>(branches_.size());
  if (gram_.rows() != n || gram_.cols() != n) {
    throw std::invalid_argument("Gram matrix size does not match branch count");
  }
}

BranchedDensity BranchedDensity::from_pure(const HybridKet& state) {
  const auto n = static_cast<Eigen::Index>(state.terms().size());
  return BranchedDensity(state.registry(), state.terms(),
                         Eigen::MatrixXcd::Ones(n, n));
}

BranchedDensity BranchedDensity::with_branches(std::vector<BranchTerm> branches) const {
  return BranchedDensity(registry_, std::move(branches), gram_);
}

BranchedDensity loss_channel(const HybridKet& state, std::string_view bus_mode,
                             double eta) {
  return loss_channel(BranchedDensity::from_pure(state), bus_mode, eta);
}

BranchedDensity loss_channel(const BranchedDensity& state,
                             std::string_view bus_mode, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("loss_channel: transmission must lie in [0,1]");
  }
  const std::size_t m = state.registry()->bus_index(bus_mode);
  const double keep = std::sqrt(eta);
  const double leak = std::sqrt(1.0 - eta);
  auto branches = state.branches();
  Eigen::MatrixXcd gram = state.gram();
  const auto n = static_cast<Eigen::Index>(branches.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) *= coherent_overlap(leak * branches[j].bus[m], leak * branches[i].bus[m]);
    }
  }
  for (auto& b : branches) b.bus[m] *= keep;
  return BranchedDensity(state.registry(), std::move(branches), std::move(gram));
}

double trace(const BranchedDensity& state) {
  const auto& br = state.branches();
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < br.size(); ++i) {
    for (std::size_t j = 0; j < br.size(); ++j) {
      sum += br[i].coeff * std::conj(br[j].coeff) *
             state.gram()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
             branch_overlap(br[j], br[i]);
    }
  }
  return sum.real();
}

namespace {

// <target|b_i> for each unit-coefficient branch ket b_i.
Eigen::VectorXcd target_projections(const BranchedDensity& state,
                                    const HybridKet& target) {
  const auto& br = state.branches();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(br.size()));
  for (std::size_t i = 0; i < br.size(); ++i) {
    Complex s{0.0, 0.0};
    for (const auto& t : target.terms()) s += std::conj(t.coeff) * branch_overlap(t, br[i]);
    v(static_cast<Eigen::Index>(i)) = s;
  }
  return v;
}

Eigen::MatrixXcd coefficient_matrix(const BranchedDensity& state) {
  const auto& br = state.branches();
  const auto n = static_cast<Eigen::Index>(br.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = br[static_cast<std::size_t>(i)].coeff *
                std::conj(br[static_cast<std::size_t>(j)].coeff) * state.gram()(i, j);
    }
  }
  return m;
}

}  // namespace

double fidelity_with(const BranchedDensity& state, const HybridKet& target) {
  check_registry(state.registry(), target.registry());
  const Eigen::VectorXcd v = target_projections(state, target);
  const Eigen::MatrixXcd m = coefficient_matrix(state);
  return (v.transpose() * m * v.conjugate())(0, 0).real();
}

std::vector<DensityComponent> eigen_decompose(const BranchedDensity& state) {
  const auto& br = state.branches();
  const auto n = static_cast<Eigen::Index>(br.size());
  std::vector<DensityComponent> out;
  if (n == 0) return out;

  Eigen::MatrixXcd overlap(n, n);  // <b_i|b_j>
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      overlap(i, j) = branch_overlap(br[static_cast<std::size_t>(i)],
                                     br[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> span(overlap);
  const double cutoff = 1e-13 * span.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (span.eigenvalues()(k) > cutoff) kept.push_back(k);
  }
  // T maps an orthonormal basis of span{b_i} back onto branch coefficients.
  Eigen::MatrixXcd to_branches(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    to_branches.col(static_cast<Eigen::Index>(c)) =
        span.eigenvectors().col(kept[c]) / std::sqrt(span.eigenvalues()(kept[c]));
  }
  const Eigen::MatrixXcd reduced = to_branches.adjoint() * overlap *
                                   coefficient_matrix(state) * overlap * to_branches;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      0.5 * (reduced + reduced.adjoint()));

  for (Eigen::Index k = eig.eigenvalues().size() - 1; k >= 0; --k) {
    const double w = eig.eigenvalues()(k);
    if (w <= 1e-14) continue;
    Eigen::VectorXcd coeffs = to_branches * eig.eigenvectors().col(k);
    Eigen::Index lead = 0;
    const double top = coeffs.cwiseAbs().maxCoeff();
    while (std::abs(coeffs(lead)) < top * (1.0 - 1e-9)) ++lead;
    coeffs *= std::conj(coeffs(lead)) / std::abs(coeffs(lead));
    std::vector<BranchTerm> terms;
    for (Eigen::Index i = 0; i < n; ++i) {
      terms.push_back({coeffs(i), br[static_cast<std::size_t>(i)].pattern,
                       br[static_cast<std::size_t>(i)].bus});
    }
    out.push_back({w, HybridKet(state.registry(), std::move(terms))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bus effects and photonic reduction

BusEffect BusEffect::identity() {
  return BusEffect([](Complex bra, Complex ket) { return coherent_overlap(bra, ket); });
}

BusEffect BusEffect::vacuum() {
  return BusEffect([](Complex bra, Complex ket) {
    return Complex{std::exp(-0.5 * std::norm(bra) - 0.5 * std::norm(ket)), 0.0};
  });
}

BusEffect BusEffect::single_photon() {
  return BusEffect([](Complex bra, Complex ket) {
    return std::conj(bra) * ket * std::exp(-0.5 * std::norm(bra) - 0.5 * std::norm(ket));
  });
}

RegistryPtr photons_only(const RegistryPtr& registry) {
  return ModeRegistry::make(registry->photon_modes(), {});
}

PhotonicDensity PhotonicDensity::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw std::domain_error("cannot normalize a zero-trace density");
  return scaled(1.0 / t);
}

PhotonicDensity PhotonicDensity::scaled(double factor) const {
  return {registry, basis, rho * factor};
}

PhotonicDensity operator+(const PhotonicDensity& a, const PhotonicDensity& b) {
  if (a.basis.empty()) return b;
  if (b.basis.empty()) return a;
  check_registry(a.registry, b.registry);
  std::map<PhotonPattern, Eigen::Index> index;
  for (const auto& p : a.basis) index.emplace(p, 0);
  for (const auto& p : b.basis) index.emplace(p, 0);
  PhotonicDensity out{a.registry, {}, {}};
  for (auto& [p, i] : index) {
    i = static_cast<Eigen::Index>(out.basis.size());
    out.basis.push_back(p);
  }
  const auto n = static_cast<Eigen::Index>(out.basis.size());
  out.rho = Eigen::MatrixXcd::Zero(n, n);
  for (const auto* d : {&a, &b}) {
    for (std::size_t i = 0; i < d->basis.size(); ++i) {
      for (std::size_t j = 0; j < d->basis.size(); ++j) {
        out.rho(index.at(d->basis[i]), index.at(d->basis[j])) +=
            d->rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

PhotonicDensity reduce_to_photons(const BranchedDensity& state,
                                  const std::vector<BusMeasurement>& effects) {
  const auto& reg = *state.registry();
  std::vector<const BusEffect*> per_mode(reg.bus_count(), nullptr);
  for (const auto& e : effects) per_mode[reg.bus_index(e.bus_mode)] = &e.effect;

  std::map<PhotonPattern, Eigen::Index> index;
  for (const auto& b : state.branches()) index.emplace(b.pattern, 0);
  PhotonicDensity out{photons_only(state.registry()), {}, {}};
  for (auto& [p, i] : index) {
    i = static_cast<Eigen::Index>(out.basis.size());
    out.basis.push_back(p);
  }
  const auto n = static_cast<Eigen::Index>(out.basis.size());
  out.rho = Eigen::MatrixXcd::Zero(n, n);

  const auto& br = state.branches();
  for (std::size_t i = 0; i < br.size(); ++i) {
    for (std::size_t j = 0; j < br.size(); ++j) {
      Complex w = br[i].coeff * std::conj(br[j].coeff) *
                  state.gram()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t m = 0; m < reg.bus_count(); ++m) {
        w *= per_mode[m] ? per_mode[m]->element(br[j].bus[m], br[i].bus[m])
                         : coherent_overlap(br[j].bus[m], br[i].bus[m]);
      }
      out.rho(index.at(br[i].pattern), index.at(br[j].pattern)) += w;
    }
  }
  return out;
}

double expectation(const BranchedDensity& state,
                   const std::vector<BusMeasurement>& effects) {
  return reduce_to_photons(state, effects).trace();
}

double fidelity_with(const PhotonicDensity& state, const HybridKet& target) {
  if (target.registry()->bus_count() != 0) {
    throw RegistryError("photonic fidelity needs a photon-only target");
  }
  if (state.registry->photon_modes() != target.registry()->photon_modes()) {
    throw RegistryError("mismatched photon modes");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(state.basis.size()));
  for (const auto& t : target.terms()) {
    for (std::size_t i = 0; i < state.basis.size(); ++i) {
      if (state.basis[i] == t.pattern) v(static_cast<Eigen::Index>(i)) += t.coeff;
    }
  }
  return (v.adjoint() * state.rho * v)(0, 0).real();
}

}  // namespace qubus

#include "qubus/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qubus/qnd.hpp"

namespace qubus {

void LinkParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error(std::string(name) + " must be positive and finite");
    }
  };
  positive(alpha, "alpha");
  positive(L0_km, "L0_km");
  positive(atten_km, "atten_km");
  positive(f_hz, "f_hz");
  positive(c_km_s, "c_km_s");
  if (!std::isfinite(theta)) throw std::domain_error("theta must be finite");
  if (gamma < 0.0 || delta < 0.0) throw std::domain_error("probe amplitudes must be >= 0");
  det.validate();
}

double LinkParams::eta() const { return std::exp(-L0_km / atten_km); }

double LinkParams::gamma_or_default() const {
  return gamma > 0.0 ? gamma : default_probe_amplitude(theta);
}

double LinkParams::delta_or_default() const {
  return delta > 0.0 ? delta : default_probe_amplitude(theta);
}

Complex link_chi(const LinkParams& p) {
  const double leak = std::sqrt(1.0 - p.eta()) * p.alpha;
  return coherent_overlap(leak * std::polar(1.0, p.theta), Complex{leak, 0.0});
}

double p_g_exact(const LinkParams& p) {
  const double s = p.alpha * std::sin(p.theta);
  return -0.5 * std::expm1(-2.0 * p.eta() * s * s);
}

double p_g_from_fidelity(double F, double eta) {
  if (!(F > 0.5 && F <= 1.0)) throw std::domain_error("p_g_from_fidelity: need 1/2 < F <= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("p_g_from_fidelity: need 0 < eta < 1");
  // (2F-1)^{2 eta/(1-eta)} = exp(2 eta/(1-eta) * log1p(2F-2))
  return -0.5 * std::expm1(2.0 * eta / (1.0 - eta) * std::log1p(2.0 * F - 2.0));
}

double link_fidelity(const LinkParams& p) {
  // |chi|^2 = exp(-(1-eta)|alpha|^2 |e^{i theta} - 1|^2)
  const double s = std::sin(0.5 * p.theta);
  const double chi2 = std::exp(-(1.0 - p.eta()) * p.alpha * p.alpha * 4.0 * s * s);
  return 0.5 * (1.0 + chi2);
}

double mean_link_time(double f_hz, double p_g, double L0_km, double c_km_s) {
  if (!(p_g > 0.0 && p_g <= 1.0)) throw std::domain_error("P_g must lie in (0,1]");
  return (1.0 / f_hz) / p_g + L0_km / c_km_s;
}

double mean_link_time(const LinkParams& p) {
  return mean_link_time(p.f_hz, p_g_exact(p), p.L0_km, p.c_km_s);
}

std::vector<double> default_fig3_distances() { return {15.0, 27.0, 50.0, 75.0, 100.0}; }

std::vector<double> default_fig3_fidelities() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(1.0 - std::pow(10.0, -3.0 - k / 10.0));
  grid.push_back(0.9995);
  std::sort(grid.begin(), grid.end());
  return grid;
}

std::vector<Fig3Row> fig3_sweep(const std::vector<double>& distances_km,
                                const std::vector<double>& F_grid, double atten_km) {
  std::vector<Fig3Row> rows;
  rows.reserve(distances_km.size() * F_grid.size());
  for (double L0 : distances_km) {
    const double eta = std::exp(-L0 / atten_km);
    for (double F : F_grid) rows.push_back({L0, F, p_g_from_fidelity(F, eta)});
  }
  return rows;
}

Bell target_bell(PortPair port) {
  return (port == PortPair::KaKb || port == PortPair::RaRb) ? Bell::PsiMinus
                                                            : Bell::PsiPlus;
}

// ---------------------------------------------------------------------------
// Entangling stage

namespace {

const RegistryPtr& stage_registry() {
  static const RegistryPtr reg = ModeRegistry::make(
      {{"A", "H"}, {"A", "V"}, {"B", "H"}, {"B", "V"}}, {"bus1", "bus2"});
  return reg;
}

const RegistryPtr& photon_registry() {
  static const RegistryPtr reg = photons_only(stage_registry());
  return reg;
}

HybridKet polarization_ket(const Matrix2c& block, const RegistryPtr& reg,
                           const CoherentLabel& bus) {
  static const char* a_modes[] = {"A.H", "A.V"};
  static const char* b_modes[] = {"B.H", "B.V"};
  std::vector<BranchTerm> terms;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      terms.push_back({block(a, b), PhotonPattern::from_modes(*reg, {a_modes[a], b_modes[b]}),
                       bus});
    }
  }
  return HybridKet(reg, std::move(terms));
}

Matrix2c block_from_ket(const HybridKet& projected, PortPair port) {
  const auto& reg = *projected.registry();
  const std::size_t a0 = reg.photon_index("A." + std::to_string(a_track(port)));
  const std::size_t b0 = reg.photon_index("B." + std::to_string(b_track(port)));
  Matrix2c block = Matrix2c::Zero();
  for (const auto& t : projected.terms()) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (t.pattern.occupied(a0 + static_cast<std::size_t>(a)) &&
            t.pattern.occupied(b0 + static_cast<std::size_t>(b))) {
          block(a, b) += t.coeff;
        }
      }
    }
  }
  return block;
}

}  // namespace

EntanglingStage entangle_block(const Matrix2c& block, PortPair port,
                               const LinkParams& p) {
  p.validate();
  const double n = block.norm();
  if (n == 0.0) throw std::invalid_argument("entangle_block: zero block");

  const double th = p.theta;
  HybridKet ket = polarization_ket(block / n, stage_registry(),
                                   {Complex{p.alpha, 0.0}, Complex{p.alpha, 0.0}});
  ket = xpm(ket, "B.H", "bus1", th);
  ket = xpm(ket, "B.V", "bus2", th);
  BranchedDensity rho = loss_channel(ket, "bus1", p.eta());
  rho = loss_channel(rho, "bus2", p.eta());
  rho = xpm(rho, "A.V", "bus1", th);
  rho = xpm(rho, "A.H", "bus2", th);
  rho = phase_shift(rho, "bus1", -th);
  rho = phase_shift(rho, "bus2", -th);
  rho = beam_split(rho, "bus1", "bus2");

  const PhotonicDensity vac = reduce_to_photons(rho, {{"bus1", BusEffect::vacuum()}});
  const PhotonicDensity one =
      reduce_to_photons(rho, {{"bus1", BusEffect::single_photon()}});

  EntanglingStage out;
  out.vacuum_prob = std::clamp(vac.trace(), 0.0, 1.0);
  const double p_one = std::max(one.trace(), 0.0);
  out.multi_photon_prob = std::max(0.0, trace(rho) - out.vacuum_prob - p_one);

  const double bright = m_module_bright_click(Complex{p.gamma_or_default(), 0.0}, th, p.det);
  const double dark = m_module_dark_click(p.det);
  const double signal = (1.0 - out.vacuum_prob) * bright;
  out.success_prob = signal + out.vacuum_prob * dark;
  if (out.success_prob > 0.0) {
    PhotonicDensity post = vac.scaled(dark);
    if (p_one > 0.0) post = one.scaled(signal / p_one) + post;
    out.posterior = post.scaled(1.0 / out.success_prob);
    out.posterior.registry = photon_registry();
    const HybridKet target =
        polarization_ket(bell_matrix(target_bell(port)), photon_registry(), {});
    out.fidelity = std::clamp(fidelity_with(out.posterior, target), 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulator

Matrix4c LinkSimulator::pure_input(const Vector4c& ket) { return ket * ket.adjoint(); }

LinkSimulator::LinkSimulator(const Matrix4c& input, const LinkParams& p) : params_(p) {
  p.validate();
  const Complex delta{p.delta_or_default(), 0.0};
  for (const auto& comp : decompose_input(input)) {
    Component c;
    c.weight = comp.weight;
    const ModeMatrix out = full_transform(ModeMatrix::from_polarization(to_matrix(comp.ket)));
    const PortDiscrimination disc =
        port_discriminate(to_hybrid_ket(out), delta, p.theta, p.det);
    for (std::size_t k = 0; k < kAllPortPairs.size(); ++k) {
      const PortOutcome& o = disc.outcomes[k];
      c.ports[k].port_prob = o.probability;
      const Matrix2c block = block_from_ket(o.projected, o.port);
      if (block.norm() > 1e-12) c.ports[k].stage = entangle_block(block, o.port, p);
    }
    components_.push_back(std::move(c));
  }
}

double LinkSimulator::success_probability() const {
  double total = 0.0;
  for (const auto& c : components_) {
    for (const auto& b : c.ports) total += c.weight * b.port_prob * b.stage.success_prob;
  }
  return total;
}

std::array<double, 4> LinkSimulator::port_probabilities() const {
  std::array<double, 4> out{};
  for (const auto& c : components_) {
    for (std::size_t k = 0; k < 4; ++k) out[k] += c.weight * c.ports[k].port_prob;
  }
  return out;
}

namespace {

template <typename Weights>
std::size_t pick(Rng& rng, const Weights& weights, double total) {
  double u = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

struct Draw {
  std::size_t component;
  std::size_t port;
  bool success;
};

Draw draw(Rng& rng, const std::vector<LinkSimulator::Component>& comps) {
  std::vector<double> w;
  w.reserve(comps.size());
  double total = 0.0;
  for (const auto& c : comps) {
    w.push_back(c.weight);
    total += c.weight;
  }
  const std::size_t ci = pick(rng, w, total);
  std::array<double, 4> pw{};
  double ptotal = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    pw[k] = comps[ci].ports[k].port_prob;
    ptotal += pw[k];
  }
  const std::size_t pk = pick(rng, pw, ptotal);
  const bool ok = rng.bernoulli(comps[ci].ports[pk].stage.success_prob);
  return {ci, pk, ok};
}

}  // namespace

LinkOutcome LinkSimulator::attempt(Rng& rng) const {
  const Draw d = draw(rng, components_);
  LinkOutcome out;
  out.port = kAllPortPairs[d.port];
  out.target = target_bell(out.port);
  out.success = d.success;
  out.elapsed_s = 1.0 / params_.f_hz;
  if (d.success) {
    const auto& stage = components_[d.component].ports[d.port].stage;
    out.posterior = stage.posterior;
    out.fidelity_target = stage.fidelity;
  }
  return out;
}

LinkBatch LinkSimulator::run(std::uint64_t attempts, std::uint64_t seed) const {
  Rng rng(seed);
  LinkBatch batch;
  batch.attempts = attempts;
  double fidelity_sum = 0.0;
  for (std::uint64_t i = 0; i < attempts; ++i) {
    const Draw d = draw(rng, components_);
    ++batch.port_counts[d.port];
    if (d.success) {
      ++batch.successes;
      ++batch.port_successes[d.port];
      fidelity_sum += components_[d.component].ports[d.port].stage.fidelity;
    }
  }
  if (batch.successes > 0) {
    batch.mean_fidelity = fidelity_sum / static_cast<double>(batch.successes);
  }
  return batch;
}

LinkOutcome simulate_attempt(const Matrix4c& input, const LinkParams& p,
                             std::uint64_t seed) {
  Rng rng(seed);
  return LinkSimulator(input, p).attempt(rng);
}

}  // namespace qubus

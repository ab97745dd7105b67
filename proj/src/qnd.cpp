#include "qubus/qnd.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qubus {

void SourceState::validate() const {
  if (!(p_s >= 0.0 && p_s <= 1.0)) {
    throw std::domain_error("source efficiency must lie in [0,1]");
  }
}

Complex difference_amplitude(Complex alpha0, double theta) {
  return (alpha0 - alpha0 * std::polar(1.0, theta)) * (1.0 / std::numbers::sqrt2);
}

namespace {

// |x - x e^{i theta}|^2 / 2 without cancellation for small theta.
double half_difference_intensity(Complex x, double theta) {
  const double s = std::sin(0.5 * theta);
  return 2.0 * std::norm(x) * s * s;
}

}  // namespace

double comparison_error(const QndParams& q) {
  return std::exp(-half_difference_intensity(q.alpha0, q.theta));
}

double comparison_success(const QndParams& q) {
  return -std::expm1(-half_difference_intensity(q.alpha0, q.theta));
}

PurifyResult purify_source(const SourceState& src, const QndParams& q) {
  src.validate();
  q.det.validate();
  const DetectorParams& d = q.det;
  const double photon_click =
      -std::expm1(-d.lambda_dark - d.eta_D * half_difference_intensity(q.alpha0, q.theta));
  const double vacuum_click = click_probability({0.0, 0.0}, d);
  PurifyResult r;
  r.click_prob = src.p_s * photon_click + (1.0 - src.p_s) * vacuum_click;
  if (!(r.click_prob > 0.0)) {
    throw std::domain_error("purify_source: detector never fires, fidelity undefined");
  }
  r.conditional_fidelity = src.p_s * photon_click / r.click_prob;
  return r;
}

double default_probe_amplitude(double theta, double exponent) {
  const double s = std::abs(std::sin(0.5 * theta));
  if (s == 0.0) throw std::domain_error("probe amplitude undefined for theta = 0");
  // |x (e^{i theta} - 1)|^2 / 2 = 2 |x|^2 sin^2(theta/2)
  return std::sqrt(exponent / 2.0) / s;
}

double m_module_bright_click(Complex gamma, double theta, const DetectorParams& det) {
  det.validate();
  return -std::expm1(-det.lambda_dark - det.eta_D * half_difference_intensity(gamma, theta));
}

double m_module_dark_click(const DetectorParams& det) {
  return click_probability({0.0, 0.0}, det);
}

MModuleResult m_module(Complex weak_amplitude, Complex gamma, double theta,
                       const DetectorParams& det) {
  const double x = std::norm(weak_amplitude);
  MModuleResult r;
  r.vacuum_prob = std::exp(-x);
  r.multi_photon_prob = -std::expm1(-x) - x * std::exp(-x);
  r.click_prob = (1.0 - r.vacuum_prob) * m_module_bright_click(gamma, theta, det) +
                 r.vacuum_prob * m_module_dark_click(det);
  return r;
}

double m_module_outcome(Complex weak_amplitude, Complex gamma, double theta,
                        const DetectorParams& det) {
  return m_module(weak_amplitude, gamma, theta, det).click_prob;
}

PortDiscrimination port_discriminate(const HybridKet& state, Complex delta,
                                     double theta, const DetectorParams& det) {
  det.validate();
  const auto& reg = *state.registry();
  for (const char* m : {"A.3", "A.4", "A.5", "A.6", "B.3", "B.4", "B.5", "B.6"}) {
    reg.photon_index(m);
  }

  PortDiscrimination out;
  out.residual_overlap =
      std::exp(-0.5 * half_difference_intensity(delta, theta));
  out.warning = out.residual_overlap >= 1e-4;
  if (out.warning) {
    out.message = "port discrimination condition violated: vacuum overlap " +
                  std::to_string(out.residual_overlap);
  }

  HybridKet probed = state.with_bus_modes({"qnd.A1", "qnd.A2", "qnd.B1", "qnd.B2"},
                                          {delta, delta, delta, delta});
  for (const char* m : {"A.3", "A.4"}) probed = xpm(probed, m, "qnd.A1", theta);
  for (const char* m : {"B.3", "B.4"}) probed = xpm(probed, m, "qnd.B1", theta);
  probed = beam_split(probed, "qnd.A1", "qnd.A2");
  probed = beam_split(probed, "qnd.B1", "qnd.B2");
  const auto density = BranchedDensity::from_pure(probed);

  const std::size_t a3 = reg.photon_index("A.3");
  const std::size_t a5 = reg.photon_index("A.5");
  const std::size_t b3 = reg.photon_index("B.3");
  const std::size_t b5 = reg.photon_index("B.5");

  for (std::size_t k = 0; k < kAllPortPairs.size(); ++k) {
    const PortPair pair = kAllPortPairs[k];
    PortOutcome& o = out.outcomes[k];
    o.port = pair;
    o.a_click = a_is_k(pair);
    o.b_click = b_is_k(pair);
    o.probability = expectation(
        density,
        {{"qnd.A1", o.a_click ? click_effect(det) : no_click_effect(det)},
         {"qnd.B1", o.b_click ? click_effect(det) : no_click_effect(det)}});
    const std::size_t a_first = o.a_click ? a3 : a5;
    const std::size_t b_first = o.b_click ? b3 : b5;
    o.projected = project_pattern(state, [=](const PhotonPattern& p) {
                    return (p.occupied(a_first) || p.occupied(a_first + 1)) &&
                           (p.occupied(b_first) || p.occupied(b_first + 1));
                  }).state;
  }
  return out;
}

}  // namespace qubus

#include <doctest.h>

#include <cmath>
#include <random>

#include "qubus/qnd.hpp"

using namespace qubus;

TEST_CASE("comparison probability at |alpha0 theta| = 2 sqrt5") {
  const double theta = 1e-6;
  const QndParams q{Complex{2 * std::sqrt(5.0) / theta, 0.0}, theta, {}};
  const double pe = comparison_error(q);
  CHECK(pe == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));
  CHECK(comparison_success(q) == doctest::Approx(1 - std::exp(-10.0)).epsilon(1e-12));
  CHECK(pe == doctest::Approx(4.54e-5).epsilon(1e-3));

  // |difference amplitude|^2 / ... direct evaluation
  const Complex d = difference_amplitude(q.alpha0, theta);
  CHECK(std::exp(-std::norm(d)) == doctest::Approx(pe).epsilon(1e-6));
  CHECK(comparison_success({Complex{3.0, 0.0}, 0.0, {}}) == 0.0);
}

TEST_CASE("source purification") {
  const QndParams q{Complex{447.2135954999579, 0.0}, 0.01, {}};
  const double pe = std::exp(-std::norm(difference_amplitude(q.alpha0, q.theta)));
  SUBCASE("perfect source") {
    const PurifyResult r = purify_source(SourceState{1.0}, q);
    CHECK(r.conditional_fidelity == 1.0);
    CHECK(r.click_prob == doctest::Approx(1 - pe).epsilon(1e-12));
    CHECK(pe == doctest::Approx(std::exp(-10.0)).epsilon(1e-4));
  }
  SUBCASE("ideal detector removes the vacuum part completely") {
    const PurifyResult r = purify_source(SourceState{0.6}, q);
    CHECK(r.conditional_fidelity == 1.0);
    CHECK(r.click_prob == doctest::Approx(0.6 * (1 - pe)).epsilon(1e-12));
  }
  SUBCASE("fidelity falls monotonically with dark counts") {
    double last = 2.0;
    for (double lam : {0.0, 1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
      QndParams qq = q;
      qq.det.lambda_dark = lam;
      const double f = purify_source(SourceState{0.7}, qq).conditional_fidelity;
      CHECK(f < last);
      last = f;
    }
  }
  SUBCASE("Monte Carlo oracle") {
    QndParams qq = q;
    qq.det = {0.6, 0.05};
    const double ps = 0.7;
    std::mt19937_64 gen(7);
    std::bernoulli_distribution photon(ps);
    const double mean_photon = std::norm(difference_amplitude(qq.alpha0, qq.theta));
    std::poisson_distribution<int> signal(mean_photon), dark(qq.det.lambda_dark);
    std::bernoulli_distribution detect(qq.det.eta_D);
    const int N = 400000;
    int clicks = 0, good = 0;
    for (int i = 0; i < N; ++i) {
      const bool one = photon(gen);
      int counts = dark(gen);
      if (one) {
        const int n = signal(gen);
        for (int k = 0; k < n; ++k) counts += detect(gen) ? 1 : 0;
      }
      if (counts > 0) {
        ++clicks;
        good += one ? 1 : 0;
      }
    }
    const PurifyResult r = purify_source(SourceState{ps}, qq);
    const double pc = r.click_prob;
    CHECK(std::abs(clicks / double(N) - pc) < 4 * std::sqrt(pc * (1 - pc) / N));
    const double f = r.conditional_fidelity;
    CHECK(std::abs(good / double(clicks) - f) < 4 * std::sqrt(f * (1 - f) / clicks));
  }
  CHECK_THROWS_AS(purify_source(SourceState{1.5}, q), std::domain_error);
  CHECK_THROWS_AS(purify_source(SourceState{0.0}, q), std::domain_error);
}

TEST_CASE("default probe amplitude reaches the requested vacuum overlap") {
  for (double theta : {1e-3, 0.01, 0.3}) {
    const double g = default_probe_amplitude(theta);
    const QndParams q{Complex{g, 0.0}, theta, {}};
    CHECK(comparison_error(q) == doctest::Approx(std::exp(-20.0)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(default_probe_amplitude(0.0), std::domain_error);
}

TEST_CASE("M module") {
  const double theta = 0.01;
  const Complex gamma{default_probe_amplitude(theta), 0.0};
  const MModuleResult vac = m_module(0.0, gamma, theta, {});
  CHECK(vac.click_prob == 0.0);
  CHECK(vac.vacuum_prob == 1.0);

  const Complex w{0.3, 0.1};
  const MModuleResult r = m_module(w, gamma, theta, {});
  const double x = std::norm(w);
  CHECK(r.vacuum_prob == doctest::Approx(std::exp(-x)));
  CHECK(r.multi_photon_prob == doctest::Approx(1 - std::exp(-x) - x * std::exp(-x)));
  CHECK(r.click_prob == doctest::Approx((1 - std::exp(-x)) * (1 - std::exp(-20.0))).epsilon(1e-12));

  const DetectorParams noisy{0.5, 0.01};
  CHECK(m_module_dark_click(noisy) == doctest::Approx(1 - std::exp(-0.01)));
  CHECK(m_module_outcome(w, gamma, theta, noisy) ==
        doctest::Approx((1 - r.vacuum_prob) * m_module_bright_click(gamma, theta, noisy) +
                        r.vacuum_prob * m_module_dark_click(noisy)));
}

TEST_CASE("port discrimination reproduces the circuit block probabilities") {
  const double theta = 0.01;
  for (int mu = 1; mu <= 4; ++mu) {
    const ModeMatrix out =
        full_transform(ModeMatrix::from_polarization(bell_matrix(static_cast<Bell>(mu))));
    const PortDiscrimination d =
        port_discriminate(to_hybrid_ket(out), default_probe_amplitude(theta), theta, {});
    CHECK_FALSE(d.warning);
    double total = 0.0;
    for (const PortOutcome& o : d.outcomes) {
      const double exact = project_port_pair(out, o.port).probability;
      CHECK(o.probability == doctest::Approx(exact).epsilon(1e-8));
      CHECK(norm(o.projected) * norm(o.projected) == doctest::Approx(exact).epsilon(1e-12));
      total += o.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  const ModeMatrix out = full_transform(ModeMatrix::from_polarization(to_matrix(Vector4c::Unit(0))));
  const PortDiscrimination weak = port_discriminate(to_hybrid_ket(out), 10.0, theta, {});
  CHECK(weak.warning);
  CHECK_FALSE(weak.message.empty());
}

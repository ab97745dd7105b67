#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fock_oracle.hpp"
#include "qubus/optics.hpp"

using namespace qubus;

namespace {

RegistryPtr reg2() { return ModeRegistry::make({{"A", "H"}, {"A", "V"}}, {"m1", "m2"}); }

// Threshold no-click POVM sum_n (1-eta)^n e^{-lambda} |n><n| in Fock space.
Complex fock_no_click(Complex bra, Complex ket, const DetectorParams& d) {
  const auto b = test::fock_coherent(bra), k = test::fock_coherent(ket);
  Complex s = 0.0;
  for (int n = 0; n < b.size(); ++n) s += std::conj(b(n)) * k(n) * std::pow(1 - d.eta_D, n);
  return s * std::exp(-d.lambda_dark);
}

}  // namespace

TEST_CASE("phase shift, beam splitter and XPM act on labels") {
  const auto reg = reg2();
  const auto H = PhotonPattern::from_modes(*reg, {"A.H"});
  const auto V = PhotonPattern::from_modes(*reg, {"A.V"});
  const Complex a{1.0, 0.5}, b{-0.3, 0.2};
  const HybridKet k = HybridKet(reg, {{0.6, H, {a, b}}, {0.8, V, {b, a}}});

  const HybridKet ps = phase_shift(k, "m1", 0.7);
  CHECK(std::abs(ps.terms()[0].bus[0] - a * std::polar(1.0, 0.7)) < 1e-15);
  CHECK(ps.terms()[0].bus[1] == b);

  const HybridKet bs = beam_split(k, "m1", "m2");
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(bs.terms()[0].bus[0] - (a - b) * r) < 1e-15);
  CHECK(std::abs(bs.terms()[0].bus[1] - (a + b) * r) < 1e-15);

  const HybridKet x = xpm(k, "A.V", "m2", 0.3);
  for (const auto& t : x.terms()) {
    if (t.pattern == H) CHECK(t.bus[1] == b);
    if (t.pattern == V) CHECK(std::abs(t.bus[1] - a * std::polar(1.0, 0.3)) < 1e-15);
  }

  // unitary: norm preserved
  CHECK(norm(beam_split(xpm(k, "A.H", "m1", 2.0), "m2", "m1")) ==
        doctest::Approx(norm(k)).epsilon(1e-13));
  CHECK_THROWS_AS(beam_split(k, "m1", "m1"), std::invalid_argument);
  CHECK_THROWS_AS(xpm(k, "B.H", "m1", 0.1), RegistryError);
}

TEST_CASE("density overloads keep the environment Gram matrix") {
  const auto reg = reg2();
  const auto H = PhotonPattern::from_modes(*reg, {"A.H"});
  const auto V = PhotonPattern::from_modes(*reg, {"A.V"});
  const HybridKet k = HybridKet(reg, {{0.6, H, {1.0, 0.0}}, {0.8, V, {0.0, 1.0}}});
  const BranchedDensity rho = loss_channel(k, "m1", 0.3);
  const BranchedDensity out = beam_split(phase_shift(rho, "m2", 0.4), "m1", "m2");
  CHECK((out.gram() - rho.gram()).norm() == 0.0);
  CHECK(trace(out) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("click probability matches the Poisson series") {
  for (double eta : {1.0, 0.7, 0.1}) {
    for (double lam : {0.0, 1e-3, 0.2}) {
      const DetectorParams d{eta, lam};
      for (Complex beta : {Complex{0, 0}, Complex{0.4, 0.1}, Complex{1.5, -1.0}}) {
        // 1 - sum_n P(n) (1-eta)^n e^{-lambda}
        const double mean = std::norm(beta);
        double no_click = 0.0, pn = std::exp(-mean);
        for (int n = 0; n < 200; ++n) {
          no_click += pn * std::pow(1 - eta, n);
          pn *= mean / (n + 1);
        }
        no_click *= std::exp(-lam);
        CHECK(click_probability(beta, d) == doctest::Approx(1 - no_click).epsilon(1e-12));
      }
    }
  }
  CHECK(click_probability(0.0, {}) == 0.0);
  CHECK_THROWS_AS(click_probability(1.0, {1.2, 0.0}), std::domain_error);
  CHECK_THROWS_AS(click_probability(1.0, {0.5, -1.0}), std::domain_error);
}

TEST_CASE("threshold effects: Fock oracle and completeness") {
  const DetectorParams d{0.8, 0.05};
  const BusEffect no = no_click_effect(d), yes = click_effect(d);
  const Complex pts[] = {{0, 0}, {0.5, 0.2}, {-1.0, 0.7}};
  for (Complex a : pts) {
    for (Complex b : pts) {
      CHECK(std::abs(no.element(a, b) - fock_no_click(a, b, d)) < 1e-12);
      CHECK(std::abs(no.element(a, b) + yes.element(a, b) - coherent_overlap(a, b)) < 1e-14);
    }
  }
}

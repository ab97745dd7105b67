#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qubus/link.hpp"

using namespace qubus;

namespace {

LinkParams operating_point() { return LinkParams{}; }

LinkParams with_alpha_theta_sq(double L0, double x) {
  LinkParams p;
  p.L0_km = L0;
  p.alpha = std::sqrt(x) / p.theta;
  return p;
}

Matrix4c hh() {
  Vector4c v = Vector4c::Zero();
  v(0) = 1.0;
  return LinkSimulator::pure_input(v);
}

Matrix4c random_rank4(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Matrix4c a;
  for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = Complex{g(gen), g(gen)};
  Matrix4c rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("closed forms at the operating point") {
  const LinkParams p = operating_point();
  CHECK(p.eta() == doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
  CHECK(p_g_exact(p) == doctest::Approx(5e-5).epsilon(0.02));
  CHECK(p_g_exact(p) == doctest::Approx(4.98e-5).epsilon(1e-3));
  CHECK(link_fidelity(p) >= 0.9995);
  CHECK(link_fidelity(p) >= 1 - (1 - p.eta()) * 1e-3 / 2 - 1e-9);
  CHECK(p_g_from_fidelity(0.9995, std::exp(-3.0)) == doctest::Approx(5e-5).epsilon(0.02));

  LinkParams z = p;
  z.theta = 0.0;
  CHECK(p_g_exact(z) == 0.0);
  CHECK(p_g_from_fidelity(1.0, 0.3) == 0.0);
  CHECK_THROWS_AS(p_g_from_fidelity(0.5, 0.3), std::domain_error);
  CHECK_THROWS_AS(p_g_from_fidelity(0.9, 1.0), std::domain_error);
}

TEST_CASE("15 km example evaluated through both forms") {
  const LinkParams p = with_alpha_theta_sq(15.0, 2.2164e-3);
  CHECK(p.eta() == doctest::Approx(std::exp(-0.6)).epsilon(1e-15));
  CHECK(link_fidelity(p) == doctest::Approx(0.9995).epsilon(1e-5));
  const double oracle = p_g_from_fidelity(link_fidelity(p), p.eta());
  CHECK(oracle == doctest::Approx(1.215e-3).epsilon(2e-3));
  CHECK(p_g_exact(p) == doctest::Approx(oracle).epsilon(1e-4));
  CHECK(p_g_from_fidelity(0.9995, std::exp(-0.6)) == doctest::Approx(1.2e-3).epsilon(0.02));
}

TEST_CASE("lossless fidelity and the theta = pi oracle") {
  LinkParams p;
  p.atten_km = 1e30;
  CHECK(p.eta() == 1.0);
  CHECK(link_fidelity(p) == 1.0);

  // theta = pi, alpha = 1, eta = 1/2: damped two-mode state, fidelity with the ideal branch ket
  LinkParams q;
  q.theta = std::numbers::pi;
  q.alpha = 1.0;
  q.L0_km = q.atten_km * std::log(2.0);
  CHECK(q.eta() == doctest::Approx(0.5).epsilon(1e-15));
  const auto reg = ModeRegistry::make({{"B", "H"}, {"B", "V"}}, {"bus1", "bus2"});
  const auto H = PhotonPattern::from_modes(*reg, {"B.H"});
  const auto V = PhotonPattern::from_modes(*reg, {"B.V"});
  const Complex ae = q.alpha * std::polar(1.0, q.theta);
  const HybridKet k =
      HybridKet(reg, {{1.0, H, {ae, q.alpha}}, {Complex{0, 1}, V, {q.alpha, ae}}}).normalized();
  const BranchedDensity rho = loss_channel(loss_channel(k, "bus1", q.eta()), "bus2", q.eta());
  const double s = std::sqrt(q.eta());
  const HybridKet ideal =
      HybridKet(reg, {{1.0, H, {s * ae, s * q.alpha}}, {Complex{0, 1}, V, {s * q.alpha, s * ae}}})
          .normalized();
  const double oracle = fidelity_with(rho, ideal);
  CHECK(link_fidelity(q) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(link_fidelity(q) == doctest::Approx((1 + std::exp(-2.0)) / 2).epsilon(1e-12));
  CHECK(std::norm(link_chi(q)) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("p_g_exact stays in [0, 1/2)") {
  // below double-precision saturation of 1 - exp(-x)
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    LinkParams p;
    p.alpha = 1e-3 + 4 * u(gen);
    p.theta = 6.3 * u(gen);
    p.L0_km = 1e-3 + 200 * u(gen);
    const double pg = p_g_exact(p);
    CHECK(pg >= 0.0);
    CHECK(pg < 0.5);
  }
  LinkParams big;
  big.alpha = 1e6;
  big.theta = 1.0;
  CHECK(p_g_exact(big) <= 0.5);
}

TEST_CASE("pipeline success probability equals the closed form") {
  const LinkSimulator sim(hh(), operating_point());
  CHECK(sim.success_probability() == doctest::Approx(p_g_exact(operating_point())).epsilon(1e-6));
  double total = 0.0;
  for (double pp : sim.port_probabilities()) {
    CHECK(pp == doctest::Approx(0.25).epsilon(1e-9));
    total += pp;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // success probability does not depend on which port pair fired
  for (const auto& c : sim.components()) {
    for (const auto& b : c.ports) {
      CHECK(b.stage.success_prob ==
            doctest::Approx(c.ports[0].stage.success_prob).epsilon(1e-10));
      CHECK(b.stage.fidelity == doctest::Approx(link_fidelity(operating_point())).epsilon(1e-9));
    }
  }
}

TEST_CASE("lossless pipeline heralds the target Bell state exactly") {
  LinkParams p;
  p.atten_km = 1e30;
  const LinkSimulator sim(hh(), p);
  for (const auto& c : sim.components()) {
    for (const auto& b : c.ports) {
      if (b.port_prob < 1e-12) continue;
      CHECK(b.stage.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(seed);
    const LinkOutcome o = sim.attempt(rng);
    if (!o.success) continue;
    CHECK(o.target == target_bell(o.port));
    CHECK(o.fidelity_target == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(target_bell(PortPair::KaKb) == Bell::PsiMinus);
  CHECK(target_bell(PortPair::RaRb) == Bell::PsiMinus);
  CHECK(target_bell(PortPair::KaRb) == Bell::PsiPlus);
}

TEST_CASE("heralded link is independent of the input state") {
  LinkParams p;
  p.alpha = 30.0;  // larger signal keeps the sampled test short
  const LinkSimulator ref(hh(), p);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const LinkSimulator sim(random_rank4(s), p);
    CHECK(sim.success_probability() == doctest::Approx(ref.success_probability()).epsilon(1e-9));
    const LinkBatch b = sim.run(200000, 10 + s);
    const double pg = ref.success_probability();
    const double sigma = std::sqrt(pg * (1 - pg) / b.attempts);
    CHECK(std::abs(b.success_rate() - pg) < 4 * sigma);
    CHECK(b.mean_fidelity == doctest::Approx(link_fidelity(p)).epsilon(1e-9));
  }
}

TEST_CASE("sampled runs are deterministic per seed") {
  LinkParams p;
  p.alpha = 30.0;
  const LinkSimulator sim(random_rank4(9), p);
  const LinkBatch a = sim.run(50000, 42), b = sim.run(50000, 42), c = sim.run(50000, 43);
  CHECK(a.successes == b.successes);
  CHECK(a.port_counts == b.port_counts);
  CHECK(a.mean_fidelity == b.mean_fidelity);
  CHECK(a.port_counts != c.port_counts);

  const LinkOutcome o1 = simulate_attempt(hh(), p, 7), o2 = simulate_attempt(hh(), p, 7);
  CHECK(o1.success == o2.success);
  CHECK(o1.port == o2.port);
  CHECK(o1.elapsed_s == o2.elapsed_s);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(simulate_attempt(hh() * 2.0, operating_point(), 1), std::invalid_argument);
  LinkParams bad;
  bad.L0_km = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("fig3 sweep and mean link time") {
  const auto rows = fig3_sweep(default_fig3_distances(), default_fig3_fidelities());
  const std::size_t nF = default_fig3_fidelities().size();
  REQUIRE(rows.size() == 5 * nF);
  for (std::size_t i = 0; i < nF; ++i) {
    for (std::size_t d = 1; d < 5; ++d) CHECK(rows[d * nF + i].P_g < rows[(d - 1) * nF + i].P_g);
  }
  const auto at = [&](double L0, double F) {
    for (const auto& r : rows)
      if (r.L0_km == L0 && r.F == F) return r.P_g;
    return -1.0;
  };
  CHECK(at(75, 0.9995) == doctest::Approx(5e-5).epsilon(0.02));
  CHECK(at(15, 0.9995) == doctest::Approx(1.2e-3).epsilon(0.02));

  CHECK(mean_link_time(1.33e3, 5e-5, 75) == doctest::Approx(15.0).epsilon(0.01));
  CHECK(mean_link_time(10e6, 5e-5, 75) == doctest::Approx(2e-3 + 3.75e-4).epsilon(1e-12));
  CHECK(mean_link_time(40e3, 1.0, 75) == doctest::Approx(1 / 40e3 + 75 / 2e5).epsilon(1e-15));
}

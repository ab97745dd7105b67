#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qubus/chain.hpp"

using namespace qubus;

namespace {

ChainParams table_point(double f) {
  ChainParams p;
  p.f_hz = f;
  return p;
}

// Second line of the distribution-time identity, written independently.
double identity_rhs(const ChainParams& p) {
  const double r = std::ceil(1.0 / p.P_c);
  const double n = std::log2(p.L_km / p.L0_km);
  const double T0 = p.L0_km / p.c_km_s + 1.0 / (p.f_hz * p.P_g);
  return T0 * std::pow(r, n) + (std::pow(r, n + 1) - r) / (r - 1) * p.tau0_s +
         p.L_km / p.c_km_s;
}

}  // namespace

TEST_CASE("distribution time reproduces the table") {
  const double f[] = {1.33e3, 40e3, 1e6, 10e6, 100e6};
  const double T[] = {240, 8, 0.33, 0.044, 0.0152};
  const std::int64_t M[] = {2, 60, 1500, 15000, 150000};
  for (int i = 0; i < 5; ++i) {
    const ScheduleResult s = schedule(table_point(f[i]));
    CHECK(s.t_tot_s == doctest::Approx(T[i]).epsilon(0.02));
    CHECK(s.m_e == M[i]);
    CHECK(s.n_levels == 4);
    CHECK(s.links_required == 16);
    CHECK(s.t_tot_s >= 1200 / 2e5);
  }
  CHECK(schedule(table_point(40e3)).F_final == doctest::Approx(std::pow(0.9995, 16)).epsilon(1e-15));
}

TEST_CASE("single-copy limit") {
  ChainParams p;
  p.P_c = 1.0;
  p.P_g = 1.0;
  for (double L : {75.0, 150.0, 1200.0}) {
    p.L_km = L;
    CHECK(t_tot(p) == doctest::Approx(1 / p.f_hz + p.L0_km / p.c_km_s + L / p.c_km_s).epsilon(1e-14));
    CHECK(t_tot_closed(p) == doctest::Approx(t_tot(p)).epsilon(1e-14));
  }
}

TEST_CASE("both lines of the distribution-time identity agree") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    ChainParams p;
    p.L0_km = 1 + 200 * u(gen);
    p.L_km = p.L0_km * std::pow(2.0, static_cast<int>(1 + 8 * u(gen)));
    p.f_hz = std::pow(10.0, 2 + 7 * u(gen));
    p.P_g = std::pow(10.0, -6 * u(gen));
    p.P_c = 0.05 + 0.45 * u(gen);  // r >= 2
    p.tau0_s = 1e-3 * u(gen);
    REQUIRE(redundancy(p.P_c) >= 2);
    const double a = t_tot(p), b = t_tot_closed(p), c = identity_rhs(p);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    CHECK(std::abs(a - c) <= 1e-12 * std::abs(a));
  }
  ChainParams bad;
  bad.L_km = 1000.0;
  CHECK_THROWS_AS(t_tot(bad), std::invalid_argument);
  CHECK(redundancy(0.5) == 2);
  CHECK(redundancy(0.34) == 3);
  CHECK(redundancy(1.0) == 1);
}

TEST_CASE("memory space") {
  CHECK(memory_space(table_point(40e3)) == 60);
  CHECK(memory_space(table_point(1e6)) == 1500);
  CHECK(memory_space(table_point(100e6)) == 150000);
  CHECK(memory_space(table_point(1.33e3)) == 2);
  CHECK(memory_space_formula(table_point(1.33e3)) == 4);

  ChainParams d = table_point(1e6);
  CHECK_THROWS_AS(memory_space(d, MemoryMode::DeadtimeLimited), std::invalid_argument);
  d.tauD_s = 1e-6;
  CHECK(memory_space(d, MemoryMode::DeadtimeLimited) == 4 * 375);
  d.tauD_s = 3e-7;
  CHECK(memory_space(d, MemoryMode::DeadtimeLimited) == 4 * 1250);

  std::int64_t last = 0;
  for (double f = 100.0; f < 1e9; f *= 1.37) {
    const std::int64_t m = memory_space(table_point(f));
    CHECK(m >= last);
    last = m;
  }
}

TEST_CASE("final fidelity and connection probability") {
  CHECK(final_fidelity(0.9995, 1200, 75) == doctest::Approx(0.99203).epsilon(1e-5));
  CHECK(final_fidelity(0.9995, 1200, 75) > 0.992);
  CHECK(final_fidelity(1.0, 1200, 75) == 1.0);
  double prod = 1.0;
  for (int i = 0; i < 8; ++i) prod *= 0.999;
  CHECK(final_fidelity(0.999, 8, 1) == doctest::Approx(prod).epsilon(1e-14));
  for (double F : {0.9, 0.99, 0.9995}) {
    const double once = final_fidelity(F, 600, 75);
    CHECK(final_fidelity(F, 1200, 75) == doctest::Approx(once * once).epsilon(1e-15));
  }
  CHECK_THROWS_AS(final_fidelity(1.2, 1200, 75), std::domain_error);
  CHECK_THROWS_AS(final_fidelity(0.9, 100, 75), std::domain_error);

  CHECK(pc_from_efficiencies(1, 1) == 1.0);
  CHECK(pc_from_efficiencies(0.84, 0.84) == doctest::Approx(0.84 * 0.84 * 0.84 * 0.84));
  CHECK(pc_from_efficiencies(0.84, 0.84) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(pc_from_efficiencies(0, 0.7) == 0.0);
  CHECK_THROWS_AS(pc_from_efficiencies(1.1, 0.5), std::domain_error);
}

TEST_CASE("monte carlo: deterministic single segment") {
  ChainParams p;
  p.L_km = p.L0_km;
  p.P_g = 1.0;
  p.P_c = 1.0;
  const McResult r = mc_distribute(p, 3, 50);
  const double expected = 1 / p.f_hz + 2 * p.L0_km / p.c_km_s;
  CHECK(r.min_time_s == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.max_time_s == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.connected_fraction == 1.0);
}

TEST_CASE("monte carlo: first-link mean, causality and event log") {
  ChainParams p = table_point(1e6);
  const McResult r = mc_distribute(p, 5, 200);
  const double oracle = 1 / (p.f_hz * p.P_g) + p.L0_km / p.c_km_s;
  CHECK(std::abs(r.first_link_mean_s - oracle) < 3 * r.first_link_stderr_s);
  CHECK(r.mean_time_s >= p.L_km / p.c_km_s);
  CHECK(r.min_time_s >= p.L_km / p.c_km_s);
  CHECK(r.residual_failure.size() == 4);
  CHECK(r.memory_modes == 1500);

  const auto& ev = r.sample_log.events;
  REQUIRE(!ev.empty());
  double first_link = -1, first_swap = -1;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i > 0) CHECK(ev[i].time_s >= ev[i - 1].time_s);
    if (ev[i].kind == EventKind::ClassicalMsg) {
      CHECK(ev[i].time_s - ev[i].cause_time_s >=
            ev[i].distance_km / p.c_km_s * (1 - 1e-12));
    }
    if (ev[i].kind == EventKind::LinkSuccess && first_link < 0) first_link = ev[i].time_s;
    if (ev[i].kind == EventKind::Swap && first_swap < 0) first_swap = ev[i].time_s;
  }
  CHECK(first_link >= 0);
  if (first_swap >= 0) CHECK(first_swap >= first_link);

  std::ostringstream os;
  r.sample_log.write(os);
  CHECK(os.str().find("kind=link-success") != std::string::npos);
}

TEST_CASE("monte carlo: causality over random parameters") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    ChainParams p;
    p.L0_km = 10 + 100 * u(gen);
    p.L_km = p.L0_km * std::pow(2.0, static_cast<int>(4 * u(gen)));
    p.f_hz = std::pow(10.0, 4 + 3 * u(gen));
    p.P_g = std::pow(10.0, -3 * u(gen));
    p.P_c = 0.2 + 0.8 * u(gen);
    const McResult r = mc_distribute(p, i, 20);
    CHECK(r.min_time_s >= p.L_km / p.c_km_s);
  }
}

TEST_CASE("monte carlo: reproducible per seed") {
  const ChainParams p = table_point(1e6);
  const McResult a = mc_distribute(p, 9, 40), b = mc_distribute(p, 9, 40), c = mc_distribute(p, 10, 40);
  CHECK(a.mean_time_s == b.mean_time_s);
  CHECK(a.histogram.counts == b.histogram.counts);
  CHECK(a.sample_log.events.size() == b.sample_log.events.size());
  std::ostringstream la, lb;
  a.sample_log.write(la);
  b.sample_log.write(lb);
  CHECK(la.str() == lb.str());
  CHECK(a.mean_time_s != c.mean_time_s);
  CHECK_THROWS_AS(mc_distribute(p, 1, 0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  ChainParams p;
  p.P_g = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = ChainParams{};
  p.P_c = 1.5;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = ChainParams{};
  p.memory_modes = 1;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
}

#include <cmath>

#include <gtest/gtest.h>

#include "entamp/metrics.hpp"
#include "entamp/oracle.hpp"
#include "entamp/protocol.hpp"
#include "entamp/sweep.hpp"

using namespace entamp;

namespace {

// A short schedule with strong drives so that N <= 4 dynamics is non-trivial.
ProtocolSchedule small_schedule(int n_atoms) {
  ProtocolParams p;
  p.omega = from_mhz(0.4);
  p.t = {1.1 / n_atoms, 0.6, 0.3, 1.0};
  p.phi3 = 0.5;
  p.phi4 = 0.35;
  p.delta2 = from_mhz(-2.0);
  p.delta4 = from_mhz(-6.0);
  return ProtocolSchedule::canonical(p);
}

CavityConfig small_cavity(int n) { return CavityConfig::from_mhz(n, 200, 0.1, 6, -36); }

ParameterSet n100_row() {
  ParameterSet p;
  p.n_atoms = 100;
  p.eta = 200;
  p.delta_over_gamma = -36;
  p.omega_mhz = 0.2;
  p.t_us = {2.074, 0.285, 0.191, 2.084};
  p.phi3 = 0.503;
  p.phi4 = 0.257;
  p.delta2_mhz = -4.0;
  p.delta4_mhz = -18.4;
  return p;
}

}  // namespace

TEST(Oracle, MatchesDickePropagationForSmallN) {
  for (int n = 1; n <= kOracleMaxAtoms; ++n) {
    const auto cfg = small_cavity(n);
    const auto schedule = small_schedule(n);
    const auto dicke = run_protocol(cfg, schedule);
    const auto oracle = full_product_oracle(cfg, schedule);
    EXPECT_LT((dicke.amplitudes() - oracle.amplitudes()).norm(), 1e-8) << "N=" << n;
  }
}

TEST(Oracle, MatchesWithIdealBoundaryAndCustomStart) {
  for (int n = 2; n <= kOracleMaxAtoms; ++n) {
    const auto cfg = small_cavity(n);
    auto schedule = small_schedule(n);
    for (auto& st : schedule.steps) st.ideal_boundary = true;
    const auto start = spin_coherent(n, 0.8, 0.1);
    const auto dicke = run_protocol(cfg, schedule, start);
    const auto oracle = full_product_oracle(cfg, schedule, start);
    EXPECT_LT((dicke.amplitudes() - oracle.amplitudes()).norm(), 1e-8) << "N=" << n;
  }
}

TEST(Oracle, RefusesLargeN) {
  EXPECT_THROW(full_product_oracle(small_cavity(5), small_schedule(5)), std::invalid_argument);
}

TEST(Protocol, XzFormMatchesDirectForm) {
  for (int n : {3, 20, 100}) {
    const auto cfg = small_cavity(n);
    const auto schedule = small_schedule(n);
    const auto direct = run_protocol(cfg, schedule);
    const auto xz = run_protocol_xz(cfg, schedule);
    const auto framed = rotate_z(direct, schedule.steps.back().phase);
    EXPECT_LT((xz.amplitudes() - framed.amplitudes()).norm(), 1e-8) << "N=" << n;
  }
}

TEST(Protocol, LightOffStepsAreUnitary) {
  const auto cfg = small_cavity(300);
  DickeState psi = spin_coherent(300, 0.3, 0.0);
  for (double phase : {0.0, 0.7, 2.0}) {
    ProtocolStep step{from_mhz(0.1), 3.0, phase, std::nullopt, false};
    const double before = psi.norm_squared();
    psi = propagate_step(cfg, step, psi);
    EXPECT_LT(std::abs(psi.norm_squared() - before), 1e-10);
  }
}

TEST(Protocol, SignMatchedDrivesContract) {
  const auto cfg = small_cavity(60);
  DickeState psi = spin_coherent(60, 0.4, 0.0);
  for (double drive : {-1.0, -5.0, -40.0}) {
    ProtocolStep step{from_mhz(0.2), 0.4, 0.3, from_mhz(drive), false};
    const double before = psi.norm_squared();
    psi = propagate_step(cfg, step, psi);
    EXPECT_LE(psi.norm_squared(), before + 1e-12) << drive;
  }
}

TEST(Protocol, GainIsRejectedUnlessAllowed) {
  const auto cfg = small_cavity(4);
  auto schedule = small_schedule(4);
  schedule.steps[1].drive = from_mhz(+2.0);
  EXPECT_THROW(run_protocol(cfg, schedule), std::invalid_argument);
  PropagationOptions o;
  o.allow_gain = true;
  EXPECT_NO_THROW(run_protocol(cfg, schedule, o));
}

TEST(Protocol, ValidateRejectsNegativeDuration) {
  auto schedule = small_schedule(4);
  schedule.steps[2].duration = -0.1;
  EXPECT_THROW(schedule.validate(), ConfigError);
  EXPECT_THROW(run_protocol(small_cavity(4), schedule), ConfigError);
}

TEST(Protocol, CanonicalScheduleLayout) {
  const auto s = small_schedule(4);
  EXPECT_TRUE(s.is_canonical());
  EXPECT_FALSE(s.steps[0].drive.has_value());
  EXPECT_TRUE(s.steps[3].drive.has_value());
  EXPECT_EQ(s.steps[2].phase, 0.5);
}

TEST(Protocol, OffResonanceWarnings) {
  const auto row = n100_row();
  const auto cfg = row.cavity();
  auto s = row.schedule();
  EXPECT_EQ(schedule_warnings(cfg, s).size(), 0u);
  s.steps[1].drive = from_mhz(-0.5);
  EXPECT_EQ(schedule_warnings(cfg, s).size(), 1u);
}

TEST(Protocol, WorkedExampleFidelity) {
  const auto row = n100_row();
  const auto psi = run_protocol(row.cavity(), row.schedule());
  const auto r = ghz_fidelity(psi);
  EXPECT_NEAR(r.fidelity, 0.924, 0.002);
  EXPECT_NEAR(r.rho_pp, 0.462, 0.005);
  EXPECT_NEAR(r.rho_mm, 0.462, 0.005);
}

TEST(Protocol, PopulationSnapshots) {
  const auto row = n100_row();
  const auto pops = step_populations(row.cavity(), row.schedule());
  ASSERT_EQ(pops.size(), 5u);
  EXPECT_EQ(pops[0][100], 1.0);
  // After step 1 the population sits next to the south pole, mostly above n = 0.
  EXPECT_LT(pops[1][0], 0.5);
  EXPECT_NEAR(pops[4].sum(), 1.0 - decay_probability(run_protocol(row.cavity(), row.schedule())),
              1e-12);
}

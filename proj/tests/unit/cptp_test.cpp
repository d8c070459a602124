#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "orbitqsl/cptp.hpp"
#include "orbitqsl/random.hpp"
#include "orbitqsl/speed_limits.hpp"
#include "support/oracles.hpp"

namespace orbitqsl {
namespace {

using std::numbers::pi;

DilatedSystem random_system(std::size_t da, std::size_t db, Rng& rng) {
  DilatedSystem sys;
  sys.H_AB = 2.0 * random_hermitian(da * db, rng);
  sys.ancilla_dim = db;
  sys.nu = static_cast<std::size_t>(rng() % db);
  return sys;
}

// Joint-space reference for the channel output, independent of dilate().
ComplexMatrix joint_output(const DensityMatrix& rho, const DilatedSystem& sys, double t) {
  const ComplexMatrix u = oracle::propagator_taylor(sys.H_AB, t, sys.hbar);
  const ComplexMatrix joint = kron(rho.matrix(), sys.ancilla_projector());
  return oracle::trace_out_b(u * joint * u.adjoint(), static_cast<int>(rho.dim()),
                             static_cast<int>(sys.ancilla_dim));
}

TEST(KrausChannel, IdentityChannel) {
  Rng rng(50);
  const DensityMatrix rho = random_density(3, rng);
  const KrausChannel id = KrausChannel::from_operators({identity(3)});
  EXPECT_LT(max_abs_diff(apply_channel(rho, id).matrix(), rho.matrix()), 1e-15);
}

TEST(KrausChannel, Dephasing) {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const KrausChannel dephase = KrausChannel::from_operators({p0, p1});
  const DensityMatrix rho = density_from_bloch({0.5, 0.3, 0.2});
  const ComplexMatrix out = apply_channel(rho, dephase).matrix();
  EXPECT_NEAR(out(0, 0).real(), rho.matrix()(0, 0).real(), 1e-15);
  EXPECT_NEAR(out(1, 1).real(), rho.matrix()(1, 1).real(), 1e-15);
  EXPECT_EQ(std::abs(out(0, 1)), 0.0);
  EXPECT_EQ(std::abs(out(1, 0)), 0.0);
}

TEST(KrausChannel, IncompleteSetRejected) {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  try {
    KrausChannel::from_operators({p0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteKraus);
  }
}

TEST(Dilate, ZeroHamiltonian) {
  DilatedSystem sys;
  sys.H_AB = ComplexMatrix::Zero(6, 6);
  sys.ancilla_dim = 3;
  sys.nu = 1;
  const KrausChannel ch = dilate(sys, 2.0);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_LT(max_abs_diff(ch.operators()[1], identity(2)), 1e-15);
  EXPECT_LT(max_abs(ch.operators()[0]), 1e-15);
  EXPECT_LT(max_abs(ch.operators()[2]), 1e-15);
}

TEST(Dilate, LocalHamiltonian) {
  Rng rng(51);
  const ComplexMatrix ha = random_hermitian(3, rng);
  DilatedSystem sys;
  sys.H_AB = kron(ha, identity(2));
  sys.ancilla_dim = 2;
  sys.nu = 0;
  const KrausChannel ch = dilate(sys, 1.7);
  EXPECT_LT(max_abs_diff(ch.operators()[0], oracle::propagator_taylor(ha, 1.7)), 1e-12);
  EXPECT_LT(max_abs(ch.operators()[1]), 1e-12);
}

TEST(Dilate, CanonicalTwoQubitOperators) {
  const DilatedSystem sys = canonical_system({0.3, 0.8, 1.1});
  const double t = 1.4;
  const KrausChannel ch = dilate(sys, t);
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_LT(ch.completeness_error(), 1e-12);
  const ComplexMatrix u = oracle::propagator_taylor(sys.H_AB, t);
  for (int k = 0; k < 2; ++k) {
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        EXPECT_LT(std::abs(ch.operators()[k](a1, a2) - u(a1 * 2 + k, a2 * 2 + 0)), 1e-12);
  }
}

TEST(Dilate, RoundTripAgainstJointEvolution) {
  Rng rng(52);
  for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}}) {
    for (int trial = 0; trial < 100; ++trial) {
      const DilatedSystem sys = random_system(da, db, rng);
      const DensityMatrix rho = random_density(da, rng);
      const double t = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
      const KrausChannel ch = dilate(sys, t);
      EXPECT_LT(ch.completeness_error(), 1e-9);
      const ComplexMatrix expected = joint_output(rho, sys, t);
      EXPECT_LT(max_abs_diff(apply_channel(rho, ch).matrix(), expected), 1e-9);
      EXPECT_LT(max_abs_diff(dilated_output(rho, sys, t).matrix(), expected), 1e-9);
    }
  }
}

TEST(EffectiveSpeed, Examples) {
  Rng rng(53);
  DilatedSystem zero;
  zero.H_AB = ComplexMatrix::Zero(4, 4);
  EXPECT_EQ(effective_speed(random_density(2, rng), zero), 0.0);

  const ComplexMatrix ha = random_hermitian(3, rng);
  DilatedSystem local;
  local.H_AB = kron(ha, identity(2));
  const DensityMatrix rho = random_density(3, rng);
  EXPECT_NEAR(effective_speed(rho, local), quantum_speed(rho, ha), 1e-12);
  local.hbar = 0.5;
  EXPECT_NEAR(effective_speed(rho, local), quantum_speed(rho, ha, 0.5), 1e-12);
}

TEST(EffectiveSpeed, CanonicalDenominator) {
  Rng rng(54);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::array<double, 3> mu{u(rng), u(rng), u(rng)};
    const DensityMatrix rho = random_density(2, rng);
    const double r3 = bloch_vector(rho)[2];
    const double expected = 2.0 * std::sqrt(mu[0] * mu[0] + mu[1] * mu[1] +
                                            mu[2] * mu[2] * (1.0 - r3 * r3) - 2.0 * mu[0] * mu[1] * r3);
    EXPECT_NEAR(effective_speed(rho, canonical_system(mu)), expected, 1e-10);
  }
}

TEST(EffectiveSpeed, NotTheVarianceOfTheEffectiveHamiltonian) {
  // For the canonical system <0|H|0>_B = mu3 sigma3, whose variance ignores mu1, mu2.
  const DilatedSystem sys = canonical_system({1.0, 0.5, 0.2});
  const DensityMatrix rho = density_from_bloch({0, 0, 0.3});
  const ComplexMatrix heff = effective_hamiltonian(sys);
  EXPECT_GT(std::abs(effective_speed(rho, sys) - quantum_speed(rho, heff)), 0.5);
}

TEST(CptpBound, Examples) {
  Rng rng(55);
  const DilatedSystem sys = random_system(2, 2, rng);
  EXPECT_EQ(cptp_bound(random_density(2, rng), sys, 0.0), 0.0);

  const ComplexMatrix ha = random_hermitian(3, rng);
  DilatedSystem local;
  local.H_AB = kron(ha, identity(2));
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density(3, rng);
    const double t = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    EXPECT_NEAR(cptp_bound(rho, local, t), mt_bound(rho, HamiltonianSchedule::constant(ha), t), 1e-12);
  }
}

TEST(CptpBound, StillDilationGivesInfiniteSentinelOnlyWithMotion) {
  // Ancilla eigen-block with zero variance: no motion at all, bound is 0.
  DilatedSystem sys;
  sys.H_AB = kron(identity(2), pauli_z());
  const DensityMatrix rho = density_from_bloch({0.2, 0.1, 0.3});
  EXPECT_EQ(cptp_bound(rho, sys, 1.0), 0.0);
}

TEST(CptpBound, ValidityAndPurifiedEquality) {
  Rng rng(56);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t da = 2 + static_cast<std::size_t>(trial % 2);
    const DilatedSystem sys = random_system(da, 2, rng);
    const DensityMatrix rho = random_density(da, rng);
    const double t = std::uniform_real_distribution<double>(0.01, 4.0 * pi)(rng);
    EXPECT_GE(t, cptp_bound(rho, sys, t) - 1e-9) << "trial " << trial;

    const ComplexMatrix u = propagator(sys.H_AB, t);
    const ComplexMatrix joint = kron(rho.matrix(), sys.ancilla_projector());
    const double lhs = std::abs((rho.matrix() * transition_operator(sys, t)).trace());
    EXPECT_NEAR(lhs, std::abs((joint * u).trace()), 1e-12);
  }
}

TEST(CptpBound, AncillaStateGeneralisation) {
  Rng rng(57);
  for (int trial = 0; trial < 50; ++trial) {
    DilatedSystem sys = random_system(2, 3, rng);
    const DensityMatrix e = random_pure_state(3, rng);
    const EigenSystem eig = hermitian_eig(e.matrix());
    const ComplexVector c = eig.vectors.col(2);
    sys.ancilla_state = c;
    const double t = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const KrausChannel ch = dilate(sys, t);
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    for (std::size_t k = 0; k < 3; ++k) expected += std::conj(c[static_cast<Eigen::Index>(k)]) * ch.operators()[k];
    EXPECT_LT(max_abs_diff(transition_operator(sys, t), expected), 1e-12);
    EXPECT_LT(ch.completeness_error(), 1e-9);

    const DensityMatrix rho = random_density(2, rng);
    EXPECT_LT(max_abs_diff(apply_channel(rho, ch).matrix(), joint_output(rho, sys, t)), 1e-9);
    EXPECT_GE(t, cptp_bound(rho, sys, t) - 1e-9);
  }
}

TEST(CanonicalBound, Examples) {
  EXPECT_EQ(canonical_bound({0, 0, 0}, 0.3, 1.0), 0.0);
  EXPECT_NEAR(canonical_visibility({0, 0, 0}, 0.3, 1.0), 1.0, 1e-15);
  // Zero effective speed only happens together with K = 1.
  EXPECT_EQ(canonical_bound({1, 1, 1}, 1.0, 0.7), 0.0);
  try {
    canonical_bound({1, 0, 0}, 1.5, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlochOutOfBall);
  }
}

TEST(CanonicalBound, ThetaOneThreeAtPiReduces) {
  for (double theta2 : {0.0, 0.2, 0.7, 1.1, pi / 2.0}) {
    for (double r3 : {-0.8, 0.0, 0.45, 1.0}) {
      const std::array<double, 3> mu{pi, theta2, pi};
      const double denom = std::sqrt(mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3) -
                                     2.0 * mu[0] * mu[1] * r3);
      EXPECT_NEAR(canonical_bound(mu, r3, 1.0), theta2 / denom, 1e-12);
    }
  }
}

TEST(CanonicalBound, MatchesNumericDilation) {
  Rng rng(58);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::array<double, 3> mu{u(rng), u(rng), u(rng)};
    const double hbar = trial % 3 == 0 ? 0.7 : 1.0;
    const DensityMatrix rho = random_density(2, rng);
    const double r3 = bloch_vector(rho)[2];
    const double t = std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    const DilatedSystem sys = canonical_system(mu, hbar);
    EXPECT_NEAR(canonical_visibility(mu, r3, t, hbar),
                std::abs((rho.matrix() * transition_operator(sys, t)).trace()), 1e-10);
    EXPECT_NEAR(canonical_bound(mu, r3, t, hbar), cptp_bound(rho, sys, t), 1e-9) << "trial " << trial;
  }
}

}  // namespace
}  // namespace orbitqsl

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symrb/lift.hpp"

using namespace symrb;

namespace {

constexpr double kPi = 3.14159265358979323846;
const InertiaSpec kBody({1.0, 2.0, 3.0});

IntegratorConfig rk4(double step, double t_final) {
    IntegratorConfig c;
    c.step = step;
    c.t_final = t_final;
    return c;
}

}  // namespace

TEST(SolveLift, ZeroMomentum) {
    const Rotation q0 = random_rotation(4, std::uint64_t{1});
    const PhasePoint z0 = solve_lift(q0, SkewMat::zero(4));
    EXPECT_LE((z0.p() - q0.mat()).norm(), 1e-15);
}

TEST(SolveLift, AxisThreeIsSixthTurn) {
    const PhasePoint z0 = solve_lift(Rotation::identity(3), hat({0, 0, 1}));
    EXPECT_LE((z0.p() - oracle::rodrigues({0, 0, 1}, kPi / 6.0)).norm(), 1e-12);
    const Mat s = z0.p();
    EXPECT_LE((s - s.transpose() - hat({0, 0, 1}).mat()).norm(), 1e-12);
}

TEST(SolveLift, CertifiesRandomCases) {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const Index n = 3 + t % 4;
        const Rotation q0 = random_rotation(n, rng);
        const Mat s = random_skew(n, rng).mat();
        const SkewMat pi0(1.9 * s / spectral_norm(s));
        const LiftCertificate c = certify_lift(solve_lift(q0, pi0), pi0);
        EXPECT_LE(c.p_orthogonality, 1e-10);
        EXPECT_LE(c.p_determinant, 1e-10);
        EXPECT_LE(c.momentum_residual, 1e-10);
        EXPECT_GT(c.min_singular_value, 1e-10);
    }
}

TEST(SolveLift, RefusesLargeMomentum) {
    const Mat s = random_skew(3, std::uint64_t{5}).mat();
    EXPECT_THROW(solve_lift(Rotation::identity(3), SkewMat(2.1 * s / spectral_norm(s))), OutOfRangeError);
    EXPECT_THROW(solve_lift(Rotation::identity(4), hat({0, 0, 1})), DimensionError);
}

TEST(Mu0, HandValueAndAgreement) {
    const Mat id = Mat::Identity(3, 3);
    const SpMomentum mu = mu0_of(solve_lift(Rotation::identity(3), SkewMat::zero(3)));
    Mat expected(6, 6);
    expected << id, id, -id, -id;
    EXPECT_LE((mu.mat() - expected).norm(), 1e-15);

    const PhasePoint z0 = solve_lift(random_rotation(3, std::uint64_t{7}), hat({0.4, 0.9, -0.6}));
    const SpMomentum m = mu0_of(z0);
    EXPECT_LE((m.top_right() - id).norm(), 1e-12);
    EXPECT_LE((m.bottom_left() + id).norm(), 1e-12);
    EXPECT_LE((m.mat() - momentum_J(z0).mat()).norm(), 1e-14);
}

TEST(Mu0, RejectsNonLift) {
    EXPECT_THROW(mu0_of(PhasePoint(random_matrix(6, 3, *std::make_unique<Rng>(9)))), NotALiftError);
}

TEST(VerifyReduction, ZeroMomentumIsExact) {
    const ReductionReport r = verify_reduction(kBody, Rotation::identity(3), SkewMat::zero(3), rk4(0.01, 1.0));
    EXPECT_EQ(r.e_equiv, 0.0);
    EXPECT_EQ(r.energy_mismatch, 0.0);
}

TEST(VerifyReduction, StandardBody) {
    const ReductionReport r = verify_reduction(kBody, Rotation::identity(3), hat({0.5, 0.6, 0.7}), rk4(1e-3, 10.0));
    EXPECT_LE(r.e_equiv, 1e-6);
    EXPECT_LE(r.level_set_defect, 1e-8);
    EXPECT_LE(r.energy_mismatch, 1e-8);
    EXPECT_LE(r.casimir_drift, 1e-8);
    EXPECT_EQ(r.steps, 10000u);
}

TEST(VerifyReduction, FourthOrderDecayAboveRoundoff) {
    // At h = 1e-3 the gap already sits at roundoff, so the ratio is read at coarser steps.
    const SkewMat pi0 = hat({0.5, 0.6, 0.7});
    const double coarse = verify_reduction(kBody, Rotation::identity(3), pi0, rk4(1e-2, 10.0)).e_equiv;
    const double fine = verify_reduction(kBody, Rotation::identity(3), pi0, rk4(5e-3, 10.0)).e_equiv;
    EXPECT_GE(coarse / fine, 12.0);
}

TEST(VerifyReduction, DerivativeAudit) {
    const ReductionReport r = verify_reduction(kBody, random_rotation(3, std::uint64_t{11}), hat({0.5, 0.6, 0.7}),
                                               rk4(1e-3, 2.0));
    EXPECT_LE(reduced_derivative_residual(kBody, r.symrep), 1e-6);
    Trajectory<PhasePoint> two;
    two.times = {0.0, 1.0};
    two.states = {r.symrep.states[0], r.symrep.states[1]};
    EXPECT_THROW(reduced_derivative_residual(kBody, two), DomainError);
}

TEST(VerifyReduction, HigherDimensions) {
    Rng rng(13);
    for (Index n : {4, 5}) {
        std::vector<double> lambda(static_cast<std::size_t>(n));
        std::uniform_real_distribution<double> u(0.5, 2.0);
        for (double& l : lambda) l = u(rng);
        const Mat s = random_skew(n, rng).mat();
        const ReductionReport r = verify_reduction(InertiaSpec(lambda), random_rotation(n, rng),
                                                   SkewMat(1.2 * s / spectral_norm(s)), rk4(1e-3, 2.0));
        EXPECT_LE(r.e_equiv, 1e-6);
        EXPECT_LE(r.level_set_defect, 1e-8);
    }
}

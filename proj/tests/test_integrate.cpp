#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "symrb/lift.hpp"

using namespace symrb;

namespace {

IntegratorConfig config(Scheme s, double step, double t_final) {
    IntegratorConfig c;
    c.scheme = s;
    c.step = step;
    c.t_final = t_final;
    return c;
}

double max_deviation(const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()));
    return d;
}

double max_casimir_drift(const std::vector<Vec>& spectra) {
    double d = 0.0;
    for (const Vec& s : spectra) d = std::max(d, (s - spectra.front()).cwiseAbs().maxCoeff());
    return d;
}

const InertiaSpec kBody({1.0, 2.0, 3.0});

}  // namespace

TEST(IntegratorConfig, Validation) {
    EXPECT_THROW(config(Scheme::rk4, 0.0, 1.0).validate(), DomainError);
    EXPECT_THROW(config(Scheme::rk4, 2.0, 1.0).validate(), DomainError);
    EXPECT_THROW(config(Scheme::rk4, 0.1, -1.0).validate(), DomainError);
    EXPECT_THROW(parse_scheme("euler"), DomainError);
    EXPECT_EQ(parse_scheme("rkmk4"), Scheme::rkmk4);
    EXPECT_EQ(to_string(Scheme::midpoint), "midpoint");
    const IntegratorConfig c = config(Scheme::rk4, 0.3, 1.0);
    EXPECT_EQ(c.steps(), 3u);
    EXPECT_DOUBLE_EQ(c.effective_step(), 1.0 / 3.0);
}

TEST(IntegrateEuler, TrajectoryShape) {
    const auto traj = integrate_euler(kBody, hat({0.5, 0.6, 0.7}), config(Scheme::rk4, 0.01, 1.0));
    ASSERT_EQ(traj.size(), 101u);
    EXPECT_EQ(traj.times.size(), traj.size());
    EXPECT_EQ(traj.audits.hamiltonian.size(), traj.size());
    EXPECT_EQ(traj.audits.casimir_spectrum.size(), traj.size());
    EXPECT_TRUE(traj.audits.j_drift.empty());
    for (std::size_t k = 1; k < traj.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);
    EXPECT_NEAR(traj.times.back(), 1.0, 1e-14);
}

TEST(IntegrateEuler, RelativeEquilibriumIsFixed) {
    for (Scheme s : {Scheme::rk4, Scheme::rkmk4, Scheme::midpoint}) {
        const auto traj = integrate_euler(kBody, hat({1.3, 0, 0}), config(s, 0.01, 1.0));
        EXPECT_LE((traj.states.back().mat() - hat({1.3, 0, 0}).mat()).norm(), 1e-12) << to_string(s);
    }
    const auto sph = integrate_euler(InertiaSpec({1, 1, 1, 1}), random_skew(4, std::uint64_t{2}),
                                     config(Scheme::rk4, 0.01, 1.0));
    EXPECT_LE((sph.states.back().mat() - sph.states.front().mat()).norm(), 1e-13);
}

TEST(IntegrateEuler, InvariantsAndRichardson) {
    const SkewMat pi0 = hat({0, 3, 4});
    const auto traj = integrate_euler(kBody, pi0, config(Scheme::rk4, 1e-3, 10.0));
    EXPECT_LE(max_deviation(traj.audits.hamiltonian), 1e-8);
    EXPECT_LE(max_casimir_drift(traj.audits.casimir_spectrum), 1e-8);
    const auto half = integrate_euler(kBody, pi0, config(Scheme::rk4, 5e-4, 10.0));
    EXPECT_LE((traj.states.back().mat() - half.states.back().mat()).norm(), 1e-9);
}

TEST(IntegrateEuler, MatchesVectorOracle) {
    // Independent RK4 on the vector form with a much finer step.
    const Vec3 i = kBody.principal_moments();
    Vec3 pi(0.5, 0.6, 0.7);
    const double h = 1e-4;
    for (int k = 0; k < 10000; ++k) {
        const Vec3 k1 = oracle::euler_vec(i, pi);
        const Vec3 k2 = oracle::euler_vec(i, pi + 0.5 * h * k1);
        const Vec3 k3 = oracle::euler_vec(i, pi + 0.5 * h * k2);
        const Vec3 k4 = oracle::euler_vec(i, pi + h * k3);
        pi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    for (Scheme s : {Scheme::rk4, Scheme::rkmk4}) {
        const auto traj = integrate_euler(kBody, hat({0.5, 0.6, 0.7}), config(s, 1e-3, 1.0));
        EXPECT_LE((vee(traj.states.back()) - pi).norm(), 1e-10) << to_string(s);
    }
}

TEST(IntegrateEuler, CasimirsInHigherDimension) {
    const InertiaSpec spec({0.6, 1.4, 0.9, 1.7});
    const auto traj = integrate_euler(spec, random_skew(4, std::uint64_t{5}), config(Scheme::rkmk4, 1e-3, 10.0));
    EXPECT_LE(max_casimir_drift(traj.audits.casimir_spectrum), 1e-8);
    EXPECT_LE(max_deviation(traj.audits.hamiltonian), 1e-8);
}

TEST(IntegrateEuler, DivergenceNamesStep) {
    try {
        integrate_euler(kBody, hat({0, 3, 4}), config(Scheme::rk4, 100.0, 1e5));
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.step(), 1u);
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
    }
}

TEST(IntegrateSymrep, SphericalClosedForm) {
    const InertiaSpec spec({1, 1, 1});
    const Rotation q0 = random_rotation(3, std::uint64_t{7});
    const SkewMat pi0 = hat({0.4, -0.3, 0.6});
    const PhasePoint z0 = solve_lift(q0, pi0);
    const Mat omega0 = inertia_inverse(spec, pi0).mat();
    for (Scheme s : {Scheme::rk4, Scheme::rkmk4, Scheme::midpoint}) {
        const auto traj = integrate_symrep(spec, z0, config(s, 1e-3, 1.0));
        const Mat exact = z0.mat() * expm(omega0);
        // Second-order midpoint is only held to its own truncation level.
        const double tol = s == Scheme::midpoint ? 1e-6 : 1e-9;
        EXPECT_LE((traj.states.back().mat() - exact).norm(), tol) << to_string(s);
    }
}

TEST(IntegrateSymrep, ZeroMomentumIsFixed) {
    const Rotation q0 = random_rotation(3, std::uint64_t{9});
    const PhasePoint z0 = solve_lift(q0, SkewMat::zero(3));
    const auto traj = integrate_symrep(kBody, z0, config(Scheme::rk4, 0.01, 1.0));
    EXPECT_EQ((traj.states.back().mat() - z0.mat()).norm(), 0.0);
}

TEST(IntegrateSymrep, RkmkStaysOrthogonal) {
    const PhasePoint z0 = solve_lift(random_rotation(3, std::uint64_t{11}), hat({0.5, 0.6, 0.7}));
    const auto traj = integrate_symrep(kBody, z0, config(Scheme::rkmk4, 1e-3, 10.0));
    ASSERT_EQ(traj.size(), 10001u);
    double worst = 0.0;
    for (double d : traj.audits.orthogonality_defect) worst = std::max(worst, d);
    EXPECT_LE(worst, 1e-12);
    EXPECT_LE(max_deviation(traj.audits.hamiltonian), 1e-8);
    double jd = 0.0;
    for (double d : traj.audits.j_drift) jd = std::max(jd, d);
    EXPECT_LE(jd, 1e-8);
}

TEST(IntegrateSymrep, ProjectionKeepsRk4Orthogonal) {
    const PhasePoint z0 = solve_lift(Rotation::identity(3), hat({0.5, 0.6, 0.7}));
    IntegratorConfig c = config(Scheme::rk4, 1e-2, 10.0);
    c.project_attitude = true;
    const auto traj = integrate_symrep(kBody, z0, c);
    double worst = 0.0;
    for (double d : traj.audits.orthogonality_defect) worst = std::max(worst, d);
    EXPECT_LE(worst, 1e-14);
}

TEST(IntegrateSymrep, RejectsDegenerateStart) {
    const PhasePoint flat = PhasePoint::from_blocks(Mat::Zero(3, 3), Mat::Zero(3, 3));
    EXPECT_THROW(integrate_symrep(kBody, flat, config(Scheme::rk4, 0.1, 1.0)), DomainError);
}

TEST(IntegrateSymrep, MidpointKeepsQuadraticInvariants) {
    const PhasePoint z0 = solve_lift(random_rotation(3, std::uint64_t{13}), hat({0.5, 0.6, 0.7}));
    const SpMomentum mu0 = momentum_J(z0);
    IntegratorConfig c = config(Scheme::midpoint, 1e-2, 10.0);
    const auto traj = integrate_symrep(kBody, z0, c);
    double worst = 0.0;
    for (const auto& z : traj.states) worst = std::max(worst, level_set_defect(z, mu0));
    EXPECT_LE(worst, 1e-10);
}

TEST(Schemes, Rk4AndRkmk4Agree) {
    const PhasePoint z0 = solve_lift(Rotation::identity(3), hat({0.5, 0.6, 0.7}));
    const auto a = integrate_symrep(kBody, z0, config(Scheme::rk4, 1e-3, 1.0));
    const auto b = integrate_symrep(kBody, z0, config(Scheme::rkmk4, 1e-3, 1.0));
    EXPECT_LE((a.states.back().mat() - b.states.back().mat()).norm(), 1e-8);
}

namespace {

struct OrderCase {
    Scheme scheme;
    double min_ratio;
};

template <class Run>
void expect_order(const Run& run, const Mat& reference, const OrderCase& oc) {
    double prev = -1.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const double err = (run(config(oc.scheme, h, 1.0)) - reference).norm();
        if (prev > 0.0) EXPECT_GE(prev / err, oc.min_ratio) << to_string(oc.scheme) << " h=" << h;
        prev = err;
    }
}

}  // namespace

TEST(Schemes, ConvergenceOrders) {
    const SkewMat pi0 = hat({0.5, 0.6, 0.7});
    const PhasePoint z0 = solve_lift(Rotation::identity(3), pi0);
    const BodyState s0(Rotation::identity(3), pi0);
    const Mat ref_e = integrate_euler(kBody, pi0, config(Scheme::rk4, 1e-4, 1.0)).states.back().mat();
    const Mat ref_z = integrate_symrep(kBody, z0, config(Scheme::rk4, 1e-4, 1.0)).states.back().mat();
    const Mat ref_q = integrate_euler_poisson(kBody, s0, config(Scheme::rk4, 1e-4, 1.0)).states.back().q;
    for (const OrderCase oc : {OrderCase{Scheme::rk4, 12.0}, OrderCase{Scheme::rkmk4, 12.0},
                               OrderCase{Scheme::midpoint, 3.5}}) {
        expect_order([&](const IntegratorConfig& c) { return integrate_euler(kBody, pi0, c).states.back().mat(); },
                     ref_e, oc);
        expect_order([&](const IntegratorConfig& c) { return integrate_symrep(kBody, z0, c).states.back().mat(); },
                     ref_z, oc);
        expect_order([&](const IntegratorConfig& c) { return integrate_euler_poisson(kBody, s0, c).states.back().q; },
                     ref_q, oc);
    }
}

TEST(IntegrateEulerPoisson, MomentumMatchesEulerRunBitwise) {
    const SkewMat pi0 = hat({0.5, 0.6, 0.7});
    const BodyState s0(random_rotation(3, std::uint64_t{17}), pi0);
    for (Scheme s : {Scheme::rk4, Scheme::rkmk4}) {
        const auto ep = integrate_euler_poisson(kBody, s0, config(s, 1e-2, 2.0));
        const auto eu = integrate_euler(kBody, pi0, config(s, 1e-2, 2.0));
        ASSERT_EQ(ep.size(), eu.size());
        for (std::size_t k = 0; k < ep.size(); ++k) {
            EXPECT_EQ((ep.states[k].pi.mat() - eu.states[k].mat()).cwiseAbs().maxCoeff(), 0.0) << to_string(s);
        }
    }
    const auto ep = integrate_euler_poisson(kBody, s0, config(Scheme::midpoint, 1e-2, 2.0));
    const auto eu = integrate_euler(kBody, pi0, config(Scheme::midpoint, 1e-2, 2.0));
    EXPECT_LE((ep.states.back().pi.mat() - eu.states.back().mat()).norm(), 1e-12);
}

TEST(IntegrateEulerPoisson, AttitudeStaysInGroup) {
    const BodyState s0(random_rotation(3, std::uint64_t{19}), hat({0.5, 0.6, 0.7}));
    const auto rk = integrate_euler_poisson(kBody, s0, config(Scheme::rk4, 1e-3, 10.0));
    const auto mk = integrate_euler_poisson(kBody, s0, config(Scheme::rkmk4, 1e-3, 10.0));
    double rk_worst = 0.0, mk_worst = 0.0;
    for (double d : rk.audits.orthogonality_defect) rk_worst = std::max(rk_worst, d);
    for (double d : mk.audits.orthogonality_defect) mk_worst = std::max(mk_worst, d);
    EXPECT_LE(rk_worst, 1e-8);
    EXPECT_LE(mk_worst, 1e-12);
    EXPECT_NEAR(mk.states.back().q.determinant(), 1.0, 1e-12);
}

TEST(IntegrateEulerPoisson, AttitudeMatchesSymrepQ) {
    // Q(t) of the symmetric representation is the body attitude.
    const Rotation q0 = random_rotation(3, std::uint64_t{23});
    const SkewMat pi0 = hat({0.5, 0.6, 0.7});
    const auto ep = integrate_euler_poisson(kBody, BodyState(q0, pi0), config(Scheme::rk4, 1e-3, 1.0));
    const auto sr = integrate_symrep(kBody, solve_lift(q0, pi0), config(Scheme::rk4, 1e-3, 1.0));
    EXPECT_LE((ep.states.back().q - sr.states.back().q()).norm(), 1e-9);
}

#pragma once
// Passage between the body picture and the symmetric representation: the
// lift (Q0, Pi0) -> Z0 = (Q0, P0), its momentum level mu0, and the
// co-integration that compares M(Z(t)) with the Euler flow Pi(t).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "symrb/integrate.hpp"

namespace symrb {

inline constexpr double kLiftCertTol = 1e-10;

/// Phase point Z0 = (Q0, P0), P0 = Q0 exp(asinh(Pi0 / 2)), so that
/// Q0^T P0 - P0^T Q0 = Pi0 with P0 in SO(n). Requires |Pi0|_2 < 2.
inline PhasePoint solve_lift(const Rotation& q0, const SkewMat& pi0) {
    if (q0.n() != pi0.n()) throw DimensionError("solve_lift: size mismatch");
    const SkewMat a = skew_asinh(pi0);
    const Mat p0 = q0.mat() * expm(a.mat());

    const double so_defect = orthogonality_defect(p0);
    const double det_defect = std::abs(p0.determinant() - 1.0);
    const double residual = (q0.mat().transpose() * p0 - p0.transpose() * q0.mat() - pi0.mat()).norm();
    if (so_defect > kLiftCertTol || det_defect > kLiftCertTol || residual > kLiftCertTol) {
        std::ostringstream os;
        os << "solve_lift: certification failed (orthogonality " << so_defect << ", det "
           << det_defect << ", momentum residual " << residual << ")";
        throw NumericalFailure(os.str());
    }
    PhasePoint z0 = PhasePoint::from_blocks(q0.mat(), p0);
    if (!z0.full_rank()) throw NumericalFailure("solve_lift: lifted point is not full rank");
    return z0;
}

/// Residuals certifying a lift.
struct LiftCertificate {
    double p_orthogonality = 0.0;
    double p_determinant = 0.0;
    double momentum_residual = 0.0;
    double min_singular_value = 0.0;
};

inline LiftCertificate certify_lift(const PhasePoint& z0, const SkewMat& pi0) {
    const Mat q = z0.q();
    const Mat p = z0.p();
    return {orthogonality_defect(p), std::abs(p.determinant() - 1.0),
            (q.transpose() * p - p.transpose() * q - pi0.mat()).norm(), z0.min_singular_value()};
}

/// mu0 = J(Z0) = [[P0 Q0^T, I], [-I, -Q0 P0^T]] for a lifted point.
inline SpMomentum mu0_of(const PhasePoint& z0, double block_tol = 1e-8) {
    SpMomentum mu = momentum_J(z0);
    const Mat id = Mat::Identity(z0.n(), z0.n());
    const double off = std::max((mu.top_right() - id).norm(), (mu.bottom_left() + id).norm());
    if (off > block_tol) {
        std::ostringstream os;
        os << "mu0_of: off-diagonal blocks of J(Z0) deviate from +-I by " << off;
        throw NotALiftError(os.str());
    }
    return mu;
}

/// Outcome of co-integrating Z(t) from the lift and Pi(t) from Pi0.
struct ReductionReport {
    double e_equiv = 0.0;               // max_t |M(Z(t)) - Pi(t)|_F
    double level_set_defect = 0.0;      // max_t distance of Z(t) from J^{-1}(mu0)
    double energy_mismatch = 0.0;       // max_t |H(Z(t)) - h(Pi(t))|
    double casimir_drift = 0.0;         // max_t max_k |sigma_k(M(Z(t))) - sigma_k(M(Z0))|
    std::size_t steps = 0;
    double step = 0.0;
    Trajectory<PhasePoint> symrep;
    Trajectory<SkewMat> euler;

    std::vector<std::pair<std::string, double>> entries() const {
        return {{"e_equiv", e_equiv},
                {"level_set_defect", level_set_defect},
                {"energy_mismatch", energy_mismatch},
                {"casimir_drift", casimir_drift}};
    }
};

inline ReductionReport verify_reduction(const InertiaSpec& spec, const Rotation& q0, const SkewMat& pi0,
                                        const IntegratorConfig& cfg) {
    const PhasePoint z0 = solve_lift(q0, pi0);
    const SpMomentum mu0 = momentum_J(z0);

    ReductionReport rep;
    rep.symrep = integrate_symrep(spec, z0, cfg);
    rep.euler = integrate_euler(spec, pi0, cfg);
    rep.steps = cfg.steps();
    rep.step = cfg.effective_step();

    const Vec& sigma0 = rep.symrep.audits.casimir_spectrum.front();
    for (std::size_t k = 0; k < rep.symrep.size(); ++k) {
        const PhasePoint& z = rep.symrep.states[k];
        const SkewMat& pi = rep.euler.states[k];
        rep.e_equiv = std::max(rep.e_equiv, (momentum_M(z).mat() - pi.mat()).norm());
        rep.level_set_defect = std::max(rep.level_set_defect, level_set_defect(z, mu0));
        rep.energy_mismatch =
            std::max(rep.energy_mismatch, std::abs(hamiltonian(spec, z) - reduced_hamiltonian(spec, pi)));
        rep.casimir_drift = std::max(
            rep.casimir_drift, (rep.symrep.audits.casimir_spectrum[k] - sigma0).cwiseAbs().maxCoeff());
    }
    return rep;
}

/// max over interior samples of |central difference of M(Z(t)) - [M, I^{-1}(M)]|_F.
/// Assumes a uniform time grid.
inline double reduced_derivative_residual(const InertiaSpec& spec, const Trajectory<PhasePoint>& traj) {
    if (traj.size() < 3) throw DomainError("reduced_derivative_residual: need at least 3 samples");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const double dt = traj.times[k + 1] - traj.times[k - 1];
        const Mat fd = (momentum_M(traj.states[k + 1]).mat() - momentum_M(traj.states[k - 1]).mat()) / dt;
        const Mat exact = euler_rhs(spec, momentum_M(traj.states[k])).mat();
        worst = std::max(worst, (fd - exact).norm());
    }
    return worst;
}

}  // namespace symrb

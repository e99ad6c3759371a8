#pragma once
// The dual pair sp(2n,R)^* <-J- M_{2n x n}(R) -M-> o(n)^*: momentum maps,
// the two commuting actions, their coadjoint realisations, the KKS form and
// level-set diagnostics.

#include <utility>

#include "symrb/symrep.hpp"

namespace symrb {

/// Value of J in sp(2n,R)^* ~ sp(2n,R). J^{-1} m must be symmetric.
class SpMomentum {
public:
    static constexpr double kTwistTol = 1e-10;

    SpMomentum() = default;
    explicit SpMomentum(Mat m) : m_(std::move(m)) {
        require_square(m_, "SpMomentum");
        if (m_.rows() % 2 != 0) throw DimensionError("SpMomentum: size must be even");
        require_finite(m_, "SpMomentum");
        const Mat s = -jmat(n()) * m_;  // J^{-1} = -J
        const double defect = (s - s.transpose()).norm();
        if (defect > kTwistTol * std::max(1.0, m_.norm())) {
            std::ostringstream os;
            os << "SpMomentum: J^{-1} m is not symmetric (defect " << defect << ")";
            throw DomainError(os.str());
        }
    }
    Index n() const { return m_.rows() / 2; }
    const Mat& mat() const { return m_; }

    // [[PQ^T, PP^T], [-QQ^T, -QP^T]] for values of J.
    Mat top_left() const { return m_.topLeftCorner(n(), n()); }
    Mat top_right() const { return m_.topRightCorner(n(), n()); }
    Mat bottom_left() const { return m_.bottomLeftCorner(n(), n()); }
    Mat bottom_right() const { return m_.bottomRightCorner(n(), n()); }

private:
    Mat m_;
};

/// o(n)^* is identified with so(n) through the trace pairing.
using OnMomentum = SkewMat;

inline double inner(const SpMomentum& mu, const SpLieAlg& xi) { return trace_inner(mu.mat(), xi.mat()); }

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

/// Sp(2n,R) acts by left multiplication.
inline PhasePoint sp_action(const SpGroup& s, const PhasePoint& z) {
    if (s.n() != z.n()) throw DimensionError("sp_action: size mismatch");
    return PhasePoint(s.mat() * z.mat());
}

/// O(n) acts by right multiplication.
inline PhasePoint on_action(const PhasePoint& z, const Orthogonal& r) {
    if (r.n() != z.n()) throw DimensionError("on_action: size mismatch");
    return PhasePoint(z.mat() * r.mat());
}

inline SpMomentum momentum_J(const PhasePoint& z) {
    return SpMomentum(jmat(z.n()) * z.mat() * z.mat().transpose());
}

inline OnMomentum momentum_M(const PhasePoint& z) {
    return OnMomentum(z.mat().transpose() * jmat(z.n()) * z.mat());
}

/// S^{-T} mu S^T, so that J(SZ) = sp_coadjoint(S, J(Z)).
inline SpMomentum sp_coadjoint(const SpGroup& s, const SpMomentum& mu) {
    if (s.n() != mu.n()) throw DimensionError("sp_coadjoint: size mismatch");
    return SpMomentum(s.inverse().transpose() * mu.mat() * s.mat().transpose());
}

/// R^T pi R, so that M(ZR) = on_coadjoint(R, M(Z)).
inline OnMomentum on_coadjoint(const Orthogonal& r, const OnMomentum& pi) {
    if (r.n() != pi.n()) throw DimensionError("on_coadjoint: size mismatch");
    return OnMomentum(r.mat().transpose() * pi.mat() * r.mat());
}

/// xi_M(Z) = xi Z.
inline PhaseTangent infinitesimal_generator(const SpLieAlg& xi, const PhasePoint& z) {
    if (xi.n() != z.n()) throw DimensionError("infinitesimal_generator: size mismatch");
    return PhaseTangent(xi.mat() * z.mat());
}

/// ad*_A Pi = [Pi, A].
inline OnMomentum ad_star(const SkewMat& a, const OnMomentum& pi) { return commutator(pi, a); }

/// Minus-KKS form: omega_O(-ad*_A Pi, -ad*_B Pi) = -<Pi, [A, B]>.
inline double kks_form(const OnMomentum& pi, const SkewMat& a, const SkewMat& b) {
    return -inner(pi, commutator(a, b));
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

/// R with Z1 R = Z2 for two full-rank points on a common J level set.
///
/// R = (Z1^T Z1)^{-1} Z1^T Z2, computed as a least-squares solve.
inline Orthogonal orbit_transporter(const PhasePoint& z1, const PhasePoint& z2,
                                    double level_tol = 1e-8, double cert_tol = 1e-8) {
    require_same_shape(z1.mat(), z2.mat(), "orbit_transporter");
    if (!z1.full_rank() || !z2.full_rank()) {
        throw DomainError("orbit_transporter: both points must have full rank");
    }
    const double gap = (momentum_J(z1).mat() - momentum_J(z2).mat()).norm();
    if (gap > level_tol) {
        std::ostringstream os;
        os << "orbit_transporter: |J(z1) - J(z2)|_F = " << gap << " exceeds " << level_tol;
        throw NotSameLevelSetError(os.str());
    }
    const Mat r = z1.mat().householderQr().solve(z2.mat());
    const double fit = (z1.mat() * r - z2.mat()).norm();
    const double orth = orthogonality_defect(r);
    if (fit > cert_tol || orth > cert_tol) {
        std::ostringstream os;
        os << "orbit_transporter: certification failed (|Z1 R - Z2|_F = " << fit
           << ", |R^T R - I|_F = " << orth << ")";
        throw NumericalFailure(os.str());
    }
    return Orthogonal(r);
}

/// Distance of Z from the level set {QQ^T = I, PP^T = I, PQ^T = mu0 block}.
inline double level_set_defect(const PhasePoint& z, const SpMomentum& mu0) {
    if (z.n() != mu0.n()) throw DimensionError("level_set_defect: size mismatch");
    const Mat q = z.q();
    const Mat p = z.p();
    const Mat id = Mat::Identity(z.n(), z.n());
    const double dq = (q * q.transpose() - id).norm();
    const double dp = (p * p.transpose() - id).norm();
    const double dqp = (p * q.transpose() - mu0.top_left()).norm();
    return std::max({dq, dp, dqp});
}

/// (omega(Za, Zb), -<M(Z), [a, b]>): the symplectic form on orbit directions
/// and its KKS image. The two agree on the full-rank set.
inline std::pair<double, double> reduced_form_check(const PhasePoint& z, const SkewMat& a,
                                                    const SkewMat& b) {
    const PhaseTangent za(z.mat() * a.mat());
    const PhaseTangent zb(z.mat() * b.mat());
    return {omega(za, zb), kks_form(momentum_M(z), a, b)};
}

}  // namespace symrb

#pragma once
// Symmetric representation on M_{2n x n}(R): phase points Z = [Q; P], the
// canonical one-form and symplectic form, the optimal control and the
// Hamiltonian flow Q' = Q Omega, P' = P Omega.

#include <utility>

#include "symrb/body.hpp"

namespace symrb {

namespace detail {
inline void require_phase_shape(const Mat& z, const char* who) {
    if (z.cols() < 1 || z.rows() != 2 * z.cols()) {
        std::ostringstream os;
        os << who << ": expected a 2n x n matrix, got " << z.rows() << "x" << z.cols();
        throw DimensionError(os.str());
    }
    require_finite(z, who);
}
}  // namespace detail

/// Point Z = [Q; P] of T*M_n(R) ~ M_{2n x n}(R).
class PhasePoint {
public:
    static constexpr double kRankTol = 1e-10;

    PhasePoint() = default;
    explicit PhasePoint(Mat z) : z_(std::move(z)) { detail::require_phase_shape(z_, "PhasePoint"); }

    static PhasePoint from_blocks(const Mat& q, const Mat& p) {
        require_square(q, "PhasePoint");
        require_same_shape(q, p, "PhasePoint");
        Mat z(2 * q.rows(), q.cols());
        z << q, p;
        return PhasePoint(std::move(z));
    }

    Index n() const { return z_.cols(); }
    const Mat& mat() const { return z_; }
    Mat q() const { return z_.topRows(n()); }
    Mat p() const { return z_.bottomRows(n()); }

    double min_singular_value() const { return symrb::min_singular_value(z_); }
    /// Membership in the full-rank open set.
    bool full_rank() const { return min_singular_value() > kRankTol; }

private:
    Mat z_;
};

/// Tangent vector X = [Q'; P'] at a phase point.
class PhaseTangent {
public:
    PhaseTangent() = default;
    explicit PhaseTangent(Mat x) : x_(std::move(x)) { detail::require_phase_shape(x_, "PhaseTangent"); }

    static PhaseTangent from_blocks(const Mat& qdot, const Mat& pdot) {
        require_square(qdot, "PhaseTangent");
        require_same_shape(qdot, pdot, "PhaseTangent");
        Mat x(2 * qdot.rows(), qdot.cols());
        x << qdot, pdot;
        return PhaseTangent(std::move(x));
    }

    Index n() const { return x_.cols(); }
    const Mat& mat() const { return x_; }
    Mat qdot() const { return x_.topRows(n()); }
    Mat pdot() const { return x_.bottomRows(n()); }

private:
    Mat x_;
};

/// omega(X, Y) = tr(X^T J Y).
inline double omega(const PhaseTangent& x, const PhaseTangent& y) {
    require_same_shape(x.mat(), y.mat(), "omega");
    return (x.mat().transpose() * jmat(x.n()) * y.mat()).trace();
}

/// Block form tr(Q1'^T P2' - P1'^T Q2') of the same symplectic form.
inline double omega_blockwise(const PhaseTangent& x, const PhaseTangent& y) {
    require_same_shape(x.mat(), y.mat(), "omega_blockwise");
    return (x.qdot().transpose() * y.pdot() - x.pdot().transpose() * y.qdot()).trace();
}

/// theta(Z) . Z' = -1/2 tr(Z^T J Z') = 1/2 tr(P^T Q' - Q^T P'); omega = -d theta.
inline double theta(const PhasePoint& z, const PhaseTangent& zdot) {
    require_same_shape(z.mat(), zdot.mat(), "theta");
    return -0.5 * (z.mat().transpose() * jmat(z.n()) * zdot.mat()).trace();
}

/// Optimal control U* = I^{-1}(Q^T P - P^T Q).
inline SkewMat ustar(const InertiaSpec& spec, const PhasePoint& z) {
    require_size(spec, z.n(), "ustar");
    const Mat q = z.q();
    const Mat p = z.p();
    return inertia_inverse(spec, SkewMat(q.transpose() * p - p.transpose() * q));
}

/// H_c(Q, P, U) = tr(P^T Q U) - 1/2 <I(U), U>.
inline double control_hamiltonian(const InertiaSpec& spec, const PhasePoint& z, const SkewMat& u) {
    require_size(spec, z.n(), "control_hamiltonian");
    require_size(spec, u.n(), "control_hamiltonian");
    return (z.p().transpose() * z.q() * u.mat()).trace() - 0.5 * inner(inertia_apply(spec, u), u);
}

/// H(Z) = 1/2 <Z^T J Z, I^{-1}(Z^T J Z)>.
inline double hamiltonian(const InertiaSpec& spec, const PhasePoint& z) {
    require_size(spec, z.n(), "hamiltonian");
    const SkewMat m(z.mat().transpose() * jmat(z.n()) * z.mat());
    return 0.5 * inner(m, inertia_inverse(spec, m));
}

/// Hamiltonian vector field (Q Omega, P Omega), Omega = U*(Z).
inline PhaseTangent symrep_rhs(const InertiaSpec& spec, const PhasePoint& z) {
    return PhaseTangent(z.mat() * ustar(spec, z).mat());
}

}  // namespace symrb

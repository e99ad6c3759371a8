#pragma once
// The generalized rigid body on so(n): inertia operator, reduced energy,
// Euler and Euler-Poisson vector fields, and the n = 3 hat/vee dictionary.

#include <sstream>
#include <utility>
#include <vector>

#include "symrb/matcore.hpp"

namespace symrb {

/// Mass-distribution parameters Lambda = diag(lambda_1, ..., lambda_n).
///
/// The inertia operator I(Omega) = Lambda Omega + Omega Lambda acts entrywise
/// as multiplication by lambda_i + lambda_j, so every off-diagonal pair sum
/// must be strictly positive.
class InertiaSpec {
public:
    static constexpr double kPairMargin = 1e-12;

    explicit InertiaSpec(std::vector<double> lambda) : lambda_(std::move(lambda)) {
        const Index n = static_cast<Index>(lambda_.size());
        if (n < 2) throw DomainError("InertiaSpec: need at least two lambda values");
        sums_ = Mat::Ones(n, n);
        for (Index i = 0; i < n; ++i) {
            if (!std::isfinite(lambda_[i])) throw DomainError("InertiaSpec: non-finite lambda");
            for (Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double s = lambda_[i] + lambda_[j];
                if (!(s > kPairMargin)) {
                    std::ostringstream os;
                    os << "InertiaSpec: lambda_" << (std::min(i, j) + 1) << " + lambda_"
                       << (std::max(i, j) + 1) << " = " << s << " must be > 0";
                    throw DomainError(os.str());
                }
                sums_(i, j) = s;
            }
        }
    }

    Index n() const { return static_cast<Index>(lambda_.size()); }
    const std::vector<double>& lambda() const { return lambda_; }
    double pair_sum(Index i, Index j) const { return lambda_[i] + lambda_[j]; }
    /// Off-diagonal entries lambda_i + lambda_j; diagonal set to one.
    const Mat& pair_sums() const { return sums_; }

    /// Principal moments (I1, I2, I3) = (l2 + l3, l3 + l1, l1 + l2) for n = 3.
    Eigen::Vector3d principal_moments() const {
        if (n() != 3) throw DimensionError("principal_moments: n must be 3");
        return {lambda_[1] + lambda_[2], lambda_[2] + lambda_[0], lambda_[0] + lambda_[1]};
    }

private:
    std::vector<double> lambda_;
    Mat sums_;
};

inline void require_size(const InertiaSpec& spec, Index n, const char* who) {
    if (spec.n() != n) {
        std::ostringstream os;
        os << who << ": inertia is " << spec.n() << "-dimensional, operand is " << n;
        throw DimensionError(os.str());
    }
}

inline SkewMat inertia_apply(const InertiaSpec& spec, const SkewMat& omega) {
    require_size(spec, omega.n(), "inertia_apply");
    return SkewMat(omega.mat().cwiseProduct(spec.pair_sums()));
}

/// I^{-1}(Pi); also the gradient Dh(Pi) of the reduced Hamiltonian.
inline SkewMat inertia_inverse(const InertiaSpec& spec, const SkewMat& pi) {
    require_size(spec, pi.n(), "inertia_inverse");
    return SkewMat(pi.mat().cwiseQuotient(spec.pair_sums()));
}

/// h(Pi) = 1/2 <Pi, I^{-1}(Pi)>.
inline double reduced_hamiltonian(const InertiaSpec& spec, const SkewMat& pi) {
    return 0.5 * inner(pi, inertia_inverse(spec, pi));
}

/// Euler equation Pi' = [Pi, I^{-1}(Pi)].
inline SkewMat euler_rhs(const InertiaSpec& spec, const SkewMat& pi) {
    return commutator(pi, inertia_inverse(spec, pi));
}

/// Attitude and body momentum. The attitude is kept as a raw matrix so that
/// integrator drift off SO(n) stays observable.
struct BodyState {
    Mat q;
    SkewMat pi;

    BodyState() = default;
    BodyState(const Rotation& q0, SkewMat pi0) : q(q0.mat()), pi(std::move(pi0)) {
        require_same_shape(q, pi.mat(), "BodyState");
    }
    BodyState(Mat q0, SkewMat pi0) : q(std::move(q0)), pi(std::move(pi0)) {
        require_same_shape(q, pi.mat(), "BodyState");
    }
};

struct BodyTangent {
    Mat qdot;
    SkewMat pidot;
};

/// (Q Omega, [Pi, Omega]) with Omega = I^{-1}(Pi).
inline BodyTangent euler_poisson_rhs(const InertiaSpec& spec, const BodyState& s) {
    require_size(spec, s.pi.n(), "euler_poisson_rhs");
    const SkewMat omega = inertia_inverse(spec, s.pi);
    return {s.q * omega.mat(), commutator(s.pi, omega)};
}

// ---------------------------------------------------------------------------
// so(3) <-> R^3
// ---------------------------------------------------------------------------

using Vec3 = Eigen::Vector3d;

/// hat(v) u = v x u.
inline SkewMat hat(const Vec3& v) {
    Mat m(3, 3);
    m << 0.0, -v(2), v(1),
         v(2), 0.0, -v(0),
         -v(1), v(0), 0.0;
    return SkewMat(std::move(m));
}

inline Vec3 vee(const SkewMat& m) {
    if (m.n() != 3) throw DimensionError("vee: only defined for n = 3");
    return {m(2, 1), m(0, 2), m(1, 0)};
}

}  // namespace symrb

#pragma once
// Fixed-endpoint optimal control of the generalized rigid body,
//   min int_0^T 1/2 <I(U), U> dt   subject to Q' = Q U, Q(0) = Q0, Q(T) = Q_T,
// solved by shooting on the initial body momentum. Extremals are flows of
// the symmetric representation started from the lift of (Q0, Pi0).

#include <cstdint>
#include <limits>
#include <utility>

#include "symrb/lift.hpp"

namespace symrb {

struct BvpProblem {
    InertiaSpec spec;
    Rotation q0;
    Rotation q_target;
    double t_final = 1.0;
    IntegratorConfig cfg;

    void validate() const {
        cfg.validate();
        if (!(t_final > 0.0)) throw DomainError("BvpProblem: t_final must be > 0");
        if (std::abs(t_final - cfg.t_final) > 1e-12 * t_final) {
            throw DomainError("BvpProblem: t_final must equal the integrator t_final");
        }
        require_size(spec, q0.n(), "BvpProblem");
        require_size(spec, q_target.n(), "BvpProblem");
    }
};

struct BvpSolution {
    SkewMat pi0;
    double terminal_error = 0.0;  // |Q(T) - Q_target|_F
    double cost = 0.0;
    int iterations = 0;
    Trajectory<PhasePoint> trajectory;
};

/// Shooting failed; carries the best iterate seen.
class BvpFailure : public NonConvergenceError {
public:
    BvpFailure(const std::string& what, SkewMat best_pi0, double best_error)
        : NonConvergenceError(what), best_pi0_(std::move(best_pi0)), best_error_(best_error) {}
    const SkewMat& best_pi0() const { return best_pi0_; }
    double best_error() const { return best_error_; }

private:
    SkewMat best_pi0_;
    double best_error_;
};

/// Line search could not stay inside the region |Pi0|_2 < 2 while decreasing
/// the objective.
class InfeasibleTargetError : public BvpFailure {
public:
    using BvpFailure::BvpFailure;
};

/// Composite Simpson quadrature of 1/2 <I(U*), U*> along a uniform trajectory
/// (3/8 rule on the last three intervals when their count is odd).
inline double trajectory_cost(const InertiaSpec& spec, const Trajectory<PhasePoint>& traj) {
    const std::size_t m = traj.size();
    if (m < 3) throw DomainError("trajectory_cost: need at least 3 samples");
    const double h = traj.times[1] - traj.times[0];
    for (std::size_t k = 1; k < m; ++k) {
        if (std::abs((traj.times[k] - traj.times[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw DomainError("trajectory_cost: time grid is not uniform");
        }
    }
    std::vector<double> f(m);
    for (std::size_t k = 0; k < m; ++k) {
        const SkewMat u = ustar(spec, traj.states[k]);
        f[k] = 0.5 * inner(inertia_apply(spec, u), u);
    }
    const std::size_t intervals = m - 1;
    const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    double sum = 0.0;
    for (std::size_t k = 0; k + 2 <= simpson_end; k += 2) {
        sum += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    }
    if (simpson_end != intervals) {
        const std::size_t k = simpson_end;
        sum += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    return sum;
}

namespace detail {

inline constexpr double kShootTrustNorm = 2.0 - 1e-6;
inline constexpr double kShootFdStep = 1e-6;
inline constexpr double kArmijo = 1e-4;
inline constexpr double kMinDamping = 1e-10;

inline Trajectory<PhasePoint> shoot_trajectory(const BvpProblem& pb, const SkewMat& pi0) {
    return integrate_symrep(pb.spec, solve_lift(pb.q0, pi0), pb.cfg);
}

inline Vec terminal_residual(const BvpProblem& pb, const Trajectory<PhasePoint>& traj) {
    const Mat diff = traj.states.back().q() - pb.q_target.mat();
    return Eigen::Map<const Vec>(diff.data(), diff.size());
}

}  // namespace detail

/// F(Pi0) = |Q(T; Pi0) - Q_target|_F^2.
inline double shooting_objective(const BvpProblem& pb, const SkewMat& pi0) {
    return detail::terminal_residual(pb, detail::shoot_trajectory(pb, pi0)).squaredNorm();
}

/// Damped Gauss-Newton on the n(n-1)/2 free entries of Pi0 with a
/// forward-difference Jacobian. Succeeds once F <= tol^2. The seed drives
/// random restarts after a collapsed line search.
inline BvpSolution shoot(const BvpProblem& pb, double tol, int max_iter, std::uint64_t seed,
                         int max_restarts = 3) {
    pb.validate();
    if (!(tol > 0.0)) throw DomainError("shoot: tol must be > 0");
    const Index n = pb.spec.n();
    const Index dim = n * (n - 1) / 2;
    const auto to_pi = [n](const Vec& x) { return SkewMat(skew_from_coords(x, n)); };
    const auto feasible = [&](const Vec& x) {
        return spectral_norm(skew_from_coords(x, n)) < detail::kShootTrustNorm;
    };

    Vec best_x = Vec::Zero(dim);
    double best_f = std::numeric_limits<double>::infinity();
    int total_iter = 0;
    Rng rng(seed);

    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
        Vec x = Vec::Zero(dim);
        if (attempt > 0) {
            const Mat r = random_skew(n, rng).mat();
            x = skew_coords(0.5 * r / std::max(1e-12, spectral_norm(r)));
        }
        Trajectory<PhasePoint> traj = detail::shoot_trajectory(pb, to_pi(x));
        Vec res = detail::terminal_residual(pb, traj);
        double f = res.squaredNorm();
        bool collapsed = false;

        for (int iter = 0;; ++iter) {
            if (f < best_f) {
                best_f = f;
                best_x = x;
            }
            if (f <= tol * tol) {
                BvpSolution sol;
                sol.pi0 = to_pi(x);
                sol.terminal_error = std::sqrt(f);
                sol.cost = trajectory_cost(pb.spec, traj);
                sol.iterations = total_iter + iter;
                sol.trajectory = std::move(traj);
                return sol;
            }
            if (total_iter + iter >= max_iter) {
                total_iter += iter;
                throw BvpFailure("shoot: no convergence within " + std::to_string(max_iter) + " iterations",
                                 to_pi(best_x), std::sqrt(best_f));
            }

            Mat jac(res.size(), dim);
            for (Index k = 0; k < dim; ++k) {
                double h = detail::kShootFdStep;
                Vec xk = x;
                xk(k) += h;
                if (!feasible(xk)) {
                    h = -h;
                    xk(k) = x(k) + h;
                }
                jac.col(k) = (detail::terminal_residual(pb, detail::shoot_trajectory(pb, to_pi(xk))) - res) / h;
            }
            const Vec delta = jac.colPivHouseholderQr().solve(-res);
            const double slope = 2.0 * (jac.transpose() * res).dot(delta);

            double alpha = 1.0;
            bool accepted = false;
            while (alpha >= detail::kMinDamping) {
                const Vec xt = x + alpha * delta;
                if (feasible(xt)) {
                    Trajectory<PhasePoint> tt = detail::shoot_trajectory(pb, to_pi(xt));
                    Vec rt = detail::terminal_residual(pb, tt);
                    const double ft = rt.squaredNorm();
                    if (ft <= f + detail::kArmijo * alpha * slope) {
                        x = xt;
                        traj = std::move(tt);
                        res = std::move(rt);
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                total_iter += iter + 1;
                collapsed = true;
                break;
            }
        }
        if (collapsed && total_iter >= max_iter) break;
    }
    throw InfeasibleTargetError("shoot: line search collapsed inside |Pi0|_2 < 2; target looks infeasible",
                                to_pi(best_x), std::sqrt(best_f));
}

}  // namespace symrb

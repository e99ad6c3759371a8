#pragma once
// Fixed-step integrators for the Euler, symmetric-representation and
// Euler-Poisson systems, with per-step invariant audits.
//
// Three schemes are available for every system:
//   rk4      classical Runge-Kutta in the ambient vector space;
//   rkmk4    Runge-Kutta-Munthe-Kaas of order four. All three systems are
//            driven by right translation by Omega, so a step is
//            Y1 = Y0 . exp(theta) (Pi1 = exp(theta)^T Pi0 exp(theta) for
//            the momentum), with theta obtained from RK4 applied to
//            theta' = dexp^{-1}_{-theta}(Omega) truncated after the double
//            commutator;
//   midpoint implicit midpoint rule solved by fixed-point iteration.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "symrb/moment.hpp"

namespace symrb {

enum class Scheme { rk4, rkmk4, midpoint };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::rk4: return "rk4";
        case Scheme::rkmk4: return "rkmk4";
        case Scheme::midpoint: return "midpoint";
    }
    return "unknown";
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "rk4") return Scheme::rk4;
    if (name == "rkmk4") return Scheme::rkmk4;
    if (name == "midpoint") return Scheme::midpoint;
    throw DomainError("unknown integration scheme '" + name + "' (expected rk4, rkmk4 or midpoint)");
}

struct IntegratorConfig {
    Scheme scheme = Scheme::rk4;
    double step = 1e-3;
    double t_final = 1.0;
    bool project_attitude = false;
    double midpoint_tol = 1e-13;
    int midpoint_max_iter = 100;

    void validate() const {
        if (!(std::isfinite(step) && step > 0.0)) throw DomainError("integrator: step must be > 0");
        if (!(std::isfinite(t_final) && t_final > 0.0)) throw DomainError("integrator: t_final must be > 0");
        if (step > t_final * (1.0 + 1e-12)) throw DomainError("integrator: step must not exceed t_final");
        if (!(midpoint_tol > 0.0)) throw DomainError("integrator: midpoint_tol must be > 0");
        if (midpoint_max_iter < 1) throw DomainError("integrator: midpoint_max_iter must be >= 1");
    }

    /// Number of steps; the step actually taken is t_final / steps().
    std::size_t steps() const {
        return static_cast<std::size_t>(std::max(1.0, std::round(t_final / step)));
    }
    double effective_step() const { return t_final / static_cast<double>(steps()); }
};

/// Invariant channels recorded at every sample. Channels that do not apply
/// to a system are left empty.
struct Audits {
    std::vector<double> hamiltonian;
    std::vector<double> j_drift;
    std::vector<double> orthogonality_defect;
    std::vector<Vec> casimir_spectrum;  // sorted singular values of the momentum
};

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    Audits audits;

    std::size_t size() const { return states.size(); }
};

namespace detail {

// Pair state for the coupled Euler-Poisson recursion. Arithmetic is
// componentwise so the momentum part rounds exactly as in a pure Euler run.
struct AttitudeMomentum {
    Mat q;
    Mat pi;
    friend AttitudeMomentum operator+(const AttitudeMomentum& a, const AttitudeMomentum& b) {
        return {a.q + b.q, a.pi + b.pi};
    }
    friend AttitudeMomentum operator*(double s, const AttitudeMomentum& a) { return {s * a.q, s * a.pi}; }
};

inline bool all_finite(const Mat& m) { return m.allFinite(); }
inline bool all_finite(const AttitudeMomentum& s) { return s.q.allFinite() && s.pi.allFinite(); }

inline double distance(const Mat& a, const Mat& b) { return (a - b).norm(); }
inline double distance(const AttitudeMomentum& a, const AttitudeMomentum& b) {
    return std::max((a.q - b.q).norm(), (a.pi - b.pi).norm());
}

template <class State, class F>
State rk4_step(const State& y, double h, const F& f) {
    const State k1 = f(y);
    const State k2 = f(State(y + (0.5 * h) * k1));
    const State k3 = f(State(y + (0.5 * h) * k2));
    const State k4 = f(State(y + h * k3));
    return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

inline Mat bracket(const Mat& a, const Mat& b) { return a * b - b * a; }

/// dexp^{-1}_{-theta}(w) up to the double commutator.
inline Mat dexpinv_right(const Mat& theta, const Mat& w) {
    const Mat c = bracket(theta, w);
    return w + 0.5 * c + bracket(theta, c) / 12.0;
}

/// One RKMK4 step for Y' = Y . Omega(Y). `act(y, theta)` realises
/// Y . exp(theta) and `velocity(y)` returns Omega(Y).
template <class State, class Act, class Velocity>
State rkmk4_step(const State& y0, double h, const Act& act, const Velocity& velocity) {
    const Mat k1 = h * velocity(y0);
    const Mat u2 = 0.5 * k1;
    const Mat k2 = h * dexpinv_right(u2, velocity(act(y0, u2)));
    const Mat u3 = 0.5 * k2;
    const Mat k3 = h * dexpinv_right(u3, velocity(act(y0, u3)));
    const Mat k4 = h * dexpinv_right(k3, velocity(act(y0, k3)));
    const Mat theta = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    return act(y0, theta);
}

template <class State, class F>
State midpoint_step(const State& y, double h, const F& f, double tol, int max_iter) {
    State y1 = State(y + h * f(y));
    for (int it = 0; it < max_iter; ++it) {
        const State next = State(y + h * f(State(0.5 * (y + y1))));
        const double change = distance(next, y1);
        y1 = next;
        if (!(change > tol)) {
            if (!std::isfinite(change)) break;
            return y1;
        }
    }
    throw NonConvergenceError("implicit midpoint: fixed-point iteration did not converge");
}

/// Drives `step` N times, converting any failure inside a step into a
/// DivergenceError that names the step, and calls `record` after each step.
template <class State, class Step, class Record>
void run_steps(State& y, std::size_t count, const char* who, const Step& step, const Record& record) {
    for (std::size_t k = 1; k <= count; ++k) {
        try {
            y = step(y);
        } catch (const RankLossError&) {
            throw;
        } catch (const Error& e) {
            throw DivergenceError(std::string(who) + ": " + e.what(), k);
        }
        if (!all_finite(y)) throw DivergenceError(std::string(who) + ": non-finite state", k);
        record(y, k);
    }
}

inline Mat coadjoint_rotate(const Mat& pi0, const Mat& theta) {
    const Mat e = expm(theta);
    return e.transpose() * pi0 * e;
}

inline void record_body_audits(Audits& audits, const InertiaSpec& spec, const SkewMat& pi) {
    audits.hamiltonian.push_back(reduced_hamiltonian(spec, pi));
    audits.casimir_spectrum.push_back(singular_values(pi.mat()));
}

inline double phase_orthogonality_defect(const Mat& z) {
    const Index n = z.cols();
    return std::max(orthogonality_defect(z.topRows(n)), orthogonality_defect(z.bottomRows(n)));
}

}  // namespace detail

/// Euler equation Pi' = [Pi, I^{-1}(Pi)].
inline Trajectory<SkewMat> integrate_euler(const InertiaSpec& spec, const SkewMat& pi0,
                                           const IntegratorConfig& cfg) {
    cfg.validate();
    require_size(spec, pi0.n(), "integrate_euler");
    const std::size_t count = cfg.steps();
    const double h = cfg.effective_step();

    Trajectory<SkewMat> traj;
    traj.times.reserve(count + 1);
    traj.states.reserve(count + 1);
    auto record = [&](const Mat& pi, std::size_t k) {
        SkewMat s(pi);
        traj.times.push_back(static_cast<double>(k) * h);
        detail::record_body_audits(traj.audits, spec, s);
        traj.states.push_back(std::move(s));
    };

    const auto rhs = [&](const Mat& pi) -> Mat { return euler_rhs(spec, SkewMat(pi)).mat(); };
    const auto velocity = [&](const Mat& pi) -> Mat { return inertia_inverse(spec, SkewMat(pi)).mat(); };
    const auto act = [](const Mat& pi, const Mat& theta) -> Mat { return detail::coadjoint_rotate(pi, theta); };

    Mat y = pi0.mat();
    record(y, 0);
    detail::run_steps(y, count, "integrate_euler", [&](const Mat& cur) -> Mat {
        switch (cfg.scheme) {
            case Scheme::rk4: return detail::rk4_step(cur, h, rhs);
            case Scheme::rkmk4: return detail::rkmk4_step(cur, h, act, velocity);
            case Scheme::midpoint:
                return detail::midpoint_step(cur, h, rhs, cfg.midpoint_tol, cfg.midpoint_max_iter);
        }
        return cur;
    }, record);
    return traj;
}

/// Symmetric representation Q' = Q Omega, P' = P Omega with Omega = U*(Z).
inline Trajectory<PhasePoint> integrate_symrep(const InertiaSpec& spec, const PhasePoint& z0,
                                               const IntegratorConfig& cfg) {
    cfg.validate();
    require_size(spec, z0.n(), "integrate_symrep");
    if (!z0.full_rank()) throw DomainError("integrate_symrep: initial point is not full rank");
    const std::size_t count = cfg.steps();
    const double h = cfg.effective_step();
    const Index n = z0.n();
    const Mat j0 = momentum_J(z0).mat();

    Trajectory<PhasePoint> traj;
    traj.times.reserve(count + 1);
    traj.states.reserve(count + 1);
    auto record = [&](const Mat& z, std::size_t k) {
        PhasePoint p(z);
        const double smin = p.min_singular_value();
        if (!(smin >= PhasePoint::kRankTol)) {
            throw RankLossError("integrate_symrep: trajectory left the full-rank set", k);
        }
        traj.times.push_back(static_cast<double>(k) * h);
        traj.audits.hamiltonian.push_back(hamiltonian(spec, p));
        traj.audits.j_drift.push_back((momentum_J(p).mat() - j0).norm());
        traj.audits.orthogonality_defect.push_back(detail::phase_orthogonality_defect(z));
        traj.audits.casimir_spectrum.push_back(singular_values(momentum_M(p).mat()));
        traj.states.push_back(std::move(p));
    };

    const auto velocity = [&](const Mat& z) -> Mat {
        const Mat q = z.topRows(n);
        const Mat p = z.bottomRows(n);
        return inertia_inverse(spec, SkewMat(q.transpose() * p - p.transpose() * q)).mat();
    };
    const auto rhs = [&](const Mat& z) -> Mat { return z * velocity(z); };
    const auto act = [](const Mat& z, const Mat& theta) -> Mat { return z * expm(theta); };

    Mat y = z0.mat();
    record(y, 0);
    detail::run_steps(y, count, "integrate_symrep", [&](const Mat& cur) -> Mat {
        Mat next;
        switch (cfg.scheme) {
            case Scheme::rk4: next = detail::rk4_step(cur, h, rhs); break;
            case Scheme::rkmk4: next = detail::rkmk4_step(cur, h, act, velocity); break;
            case Scheme::midpoint:
                next = detail::midpoint_step(cur, h, rhs, cfg.midpoint_tol, cfg.midpoint_max_iter);
                break;
        }
        if (cfg.project_attitude) {
            next.topRows(n) = polar_project(next.topRows(n)).mat();
            next.bottomRows(n) = polar_project(next.bottomRows(n)).mat();
        }
        return next;
    }, record);
    return traj;
}

/// Euler-Poisson system Q' = Q Omega, Pi' = [Pi, Omega].
inline Trajectory<BodyState> integrate_euler_poisson(const InertiaSpec& spec, const BodyState& s0,
                                                     const IntegratorConfig& cfg) {
    cfg.validate();
    require_size(spec, s0.pi.n(), "integrate_euler_poisson");
    const std::size_t count = cfg.steps();
    const double h = cfg.effective_step();
    using detail::AttitudeMomentum;

    Trajectory<BodyState> traj;
    traj.times.reserve(count + 1);
    traj.states.reserve(count + 1);
    auto record = [&](const AttitudeMomentum& y, std::size_t k) {
        BodyState s(y.q, SkewMat(y.pi));
        traj.times.push_back(static_cast<double>(k) * h);
        detail::record_body_audits(traj.audits, spec, s.pi);
        traj.audits.orthogonality_defect.push_back(orthogonality_defect(s.q));
        traj.states.push_back(std::move(s));
    };

    const auto pi_rhs = [&](const Mat& pi) -> Mat { return euler_rhs(spec, SkewMat(pi)).mat(); };
    const auto rhs = [&](const AttitudeMomentum& y) -> AttitudeMomentum {
        const Mat omega = inertia_inverse(spec, SkewMat(y.pi)).mat();
        return {y.q * omega, pi_rhs(y.pi)};
    };
    const auto velocity = [&](const AttitudeMomentum& y) -> Mat {
        return inertia_inverse(spec, SkewMat(y.pi)).mat();
    };
    const auto act = [](const AttitudeMomentum& y, const Mat& theta) -> AttitudeMomentum {
        const Mat e = expm(theta);
        return {y.q * e, e.transpose() * y.pi * e};
    };

    AttitudeMomentum y{s0.q, s0.pi.mat()};
    record(y, 0);
    detail::run_steps(y, count, "integrate_euler_poisson",
                      [&](const AttitudeMomentum& cur) -> AttitudeMomentum {
        AttitudeMomentum next;
        switch (cfg.scheme) {
            case Scheme::rk4: next = detail::rk4_step(cur, h, rhs); break;
            case Scheme::rkmk4: next = detail::rkmk4_step(cur, h, act, velocity); break;
            case Scheme::midpoint:
                next = detail::midpoint_step(cur, h, rhs, cfg.midpoint_tol, cfg.midpoint_max_iter);
                break;
        }
        if (cfg.project_attitude) next.q = polar_project(next.q).mat();
        return next;
    }, record);
    return traj;
}

}  // namespace symrb

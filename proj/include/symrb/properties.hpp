#pragma once
// Seeded property battery over the dual-pair structure: momentum-map
// identities, equivariance, invariance of H and theta, the reduced-form
// identity on orbit directions, collective Hamiltonian, orbit transport,
// lift certification and the Hamiltonian vector field.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symrb/lift.hpp"

namespace symrb {

struct PropertyResult {
    std::string name;
    double tolerance = 0.0;
    int trials = 0;
    int passed = 0;
    double worst = 0.0;

    bool ok() const { return passed == trials; }
};

/// Draws used by one trial. Every quantity derives from the trial seed.
struct PropertySample {
    Index n;
    InertiaSpec spec;
    PhasePoint z;
    PhaseTangent zdot;
    PhaseTangent y;
    SpLieAlg xi;
    SpGroup s;
    Orthogonal r;
    SkewMat a;
    SkewMat b;

    static PropertySample draw(Index n, std::uint64_t seed) {
        Rng rng(seed);
        std::uniform_real_distribution<double> lam(0.5, 2.0);
        std::vector<double> lambda(static_cast<std::size_t>(n));
        for (auto& l : lambda) l = lam(rng);
        PhasePoint z(random_matrix(2 * n, n, rng));
        PhaseTangent zdot(random_matrix(2 * n, n, rng));
        PhaseTangent y(random_matrix(2 * n, n, rng));
        SpLieAlg xi = random_sp(n, rng);
        SpGroup s = random_sp_group(n, rng);
        Orthogonal r = random_orthogonal(n, rng);
        SkewMat a = random_skew(n, rng);
        SkewMat b = random_skew(n, rng);
        return {n, InertiaSpec(std::move(lambda)), std::move(z), std::move(zdot), std::move(y),
                std::move(xi), std::move(s), std::move(r), std::move(a), std::move(b)};
    }
};

namespace detail {

inline double fd_directional(const std::function<double(const Mat&)>& f, const Mat& z, const Mat& dir,
                             double eps) {
    return (f(z + eps * dir) - f(z - eps * dir)) / (2.0 * eps);
}

}  // namespace detail

struct PropertyCheck {
    std::string name;
    double tolerance;
    std::function<double(const PropertySample&, std::uint64_t)> residual;
};

inline std::vector<PropertyCheck> property_checks() {
    std::vector<PropertyCheck> checks;
    checks.push_back({"j_defining_identity", 1e-12, [](const PropertySample& s, std::uint64_t) {
        return std::abs(inner(momentum_J(s.z), s.xi) - theta(s.z, infinitesimal_generator(s.xi, s.z)));
    }});
    checks.push_back({"m_defining_identity", 1e-12, [](const PropertySample& s, std::uint64_t) {
        return std::abs(inner(momentum_M(s.z), s.a) - theta(s.z, PhaseTangent(s.z.mat() * s.a.mat())));
    }});
    checks.push_back({"j_equivariance", 1e-11, [](const PropertySample& s, std::uint64_t) {
        return (momentum_J(sp_action(s.s, s.z)).mat() - sp_coadjoint(s.s, momentum_J(s.z)).mat()).norm();
    }});
    checks.push_back({"m_equivariance", 1e-12, [](const PropertySample& s, std::uint64_t) {
        return (momentum_M(on_action(s.z, s.r)).mat() - on_coadjoint(s.r, momentum_M(s.z)).mat()).norm();
    }});
    checks.push_back({"actions_commute", 1e-13, [](const PropertySample& s, std::uint64_t) {
        return (on_action(sp_action(s.s, s.z), s.r).mat() - sp_action(s.s, on_action(s.z, s.r)).mat()).norm();
    }});
    checks.push_back({"hamiltonian_sp_invariance", 1e-11, [](const PropertySample& s, std::uint64_t) {
        return std::abs(hamiltonian(s.spec, sp_action(s.s, s.z)) - hamiltonian(s.spec, s.z));
    }});
    checks.push_back({"theta_sp_invariance", 1e-11, [](const PropertySample& s, std::uint64_t) {
        const PhaseTangent moved(s.s.mat() * s.zdot.mat());
        return std::abs(theta(sp_action(s.s, s.z), moved) - theta(s.z, s.zdot));
    }});
    checks.push_back({"theta_on_invariance", 1e-11, [](const PropertySample& s, std::uint64_t) {
        const PhaseTangent moved(s.zdot.mat() * s.r.mat());
        return std::abs(theta(on_action(s.z, s.r), moved) - theta(s.z, s.zdot));
    }});
    checks.push_back({"reduced_form_consistency", 1e-12, [](const PropertySample& s, std::uint64_t) {
        const auto [w, kks] = reduced_form_check(s.z, s.a, s.b);
        return std::abs(w - kks);
    }});
    checks.push_back({"collective_hamiltonian", 1e-12, [](const PropertySample& s, std::uint64_t) {
        return std::abs(reduced_hamiltonian(s.spec, momentum_M(s.z)) - hamiltonian(s.spec, s.z));
    }});
    checks.push_back({"orbit_transport", 1e-10, [](const PropertySample& s, std::uint64_t) {
        const PhasePoint z2 = on_action(s.z, s.r);
        return (orbit_transporter(s.z, z2).mat() - s.r.mat()).norm();
    }});
    checks.push_back({"lift_certification", 1e-10, [](const PropertySample& s, std::uint64_t seed) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        const Rotation q0 = random_rotation(s.n, rng);
        const Mat p = random_skew(s.n, rng).mat();
        const SkewMat pi0(1.9 * p / spectral_norm(p));
        const LiftCertificate c = certify_lift(solve_lift(q0, pi0), pi0);
        return std::max({c.p_orthogonality, c.p_determinant, c.momentum_residual});
    }});
    checks.push_back({"hamiltonian_vector_field", 1e-7, [](const PropertySample& s, std::uint64_t) {
        const auto h = [&](const Mat& z) { return hamiltonian(s.spec, PhasePoint(z)); };
        const double dh = detail::fd_directional(h, s.z.mat(), s.y.mat(), 1e-5);
        return std::abs(omega(symrep_rhs(s.spec, s.z), s.y) - dh);
    }});
    return checks;
}

/// Runs every property over `trials` samples with seeds seed + t and
/// dimension n = 3 + t mod 3. Results are ordered as in property_checks().
inline std::vector<PropertyResult> run_property_battery(std::uint64_t seed, int trials) {
    const auto checks = property_checks();
    std::vector<PropertyResult> results;
    for (const auto& c : checks) results.push_back({c.name, c.tolerance, 0, 0, 0.0});
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
        const PropertySample sample = PropertySample::draw(3 + t % 3, trial_seed);
        for (std::size_t i = 0; i < checks.size(); ++i) {
            double r;
            try {
                r = checks[i].residual(sample, trial_seed);
            } catch (const Error&) {
                r = std::numeric_limits<double>::infinity();
            }
            auto& res = results[i];
            ++res.trials;
            if (r <= checks[i].tolerance) ++res.passed;
            res.worst = std::max(res.worst, r);
        }
    }
    return results;
}

}  // namespace symrb

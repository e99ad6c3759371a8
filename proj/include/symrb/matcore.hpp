#pragma once
// Dense matrix utilities shared by every module: strong wrappers for the
// matrix Lie algebras and groups in play, the trace inner product,
// commutators, the matrix exponential and the principal skew arcsinh.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "symrb/errors.hpp"

namespace symrb {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

namespace tol {
inline constexpr double kSkew = 1e-12;        // relative, max(1, |m|_F)
inline constexpr double kOrthogonal = 1e-10;  // |m^T m - I|_F
inline constexpr double kSpAlgebra = 1e-12;   // relative, max(1, |m|_F)
inline constexpr double kSpGroup = 1e-10;     // |m^T J m - J|_F
inline constexpr double kAsinhMargin = 1e-9;
inline constexpr double kAsinhResidual = 1e-12;
inline constexpr int kAsinhMaxIter = 50;
}  // namespace tol

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline double frobenius(const Mat& m) { return m.norm(); }

inline void require_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
}

inline void require_same_shape(const Mat& a, const Mat& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << who << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
           << "x" << b.cols();
        throw DimensionError(os.str());
    }
}

inline void require_finite(const Mat& m, const char* who) {
    if (!m.allFinite()) throw DomainError(std::string(who) + ": non-finite entry");
}

/// Canonical symplectic matrix [[0, I], [-I, 0]] of size 2n.
inline Mat jmat(Index n) {
    if (n < 1) throw DomainError("jmat: n must be >= 1");
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return j;
}

inline double skew_defect(const Mat& m) { return (m + m.transpose()).norm(); }

inline double orthogonality_defect(const Mat& m) {
    return (m.transpose() * m - Mat::Identity(m.cols(), m.cols())).norm();
}

inline double sp_algebra_defect(const Mat& m) {
    const Mat j = jmat(m.rows() / 2);
    return (m.transpose() * j + j * m).norm();
}

inline double sp_group_defect(const Mat& m) {
    const Mat j = jmat(m.rows() / 2);
    return (m.transpose() * j * m - j).norm();
}

/// Singular values in descending order.
inline Vec singular_values(const Mat& m) {
    if (m.size() == 0) return Vec();
    return Eigen::JacobiSVD<Mat>(m).singularValues();
}

inline double spectral_norm(const Mat& m) {
    const Vec s = singular_values(m);
    return s.size() == 0 ? 0.0 : s(0);
}

inline double min_singular_value(const Mat& m) {
    const Vec s = singular_values(m);
    return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

// ---------------------------------------------------------------------------
// Strong types
// ---------------------------------------------------------------------------

/// Element of so(n), identified with so(n)^* through the trace pairing.
class SkewMat {
public:
    SkewMat() = default;
    explicit SkewMat(Mat m) : m_(std::move(m)) {
        require_square(m_, "SkewMat");
        require_finite(m_, "SkewMat");
        const double defect = skew_defect(m_);
        if (defect > tol::kSkew * std::max(1.0, m_.norm())) {
            std::ostringstream os;
            os << "SkewMat: matrix is not skew-symmetric (|m + m^T|_F = " << defect << ")";
            throw DomainError(os.str());
        }
    }

    static SkewMat zero(Index n) { return SkewMat(Mat::Zero(n, n)); }

    Index n() const { return m_.rows(); }
    const Mat& mat() const { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    friend SkewMat operator+(const SkewMat& a, const SkewMat& b) {
        require_same_shape(a.m_, b.m_, "SkewMat +");
        return SkewMat(a.m_ + b.m_);
    }
    friend SkewMat operator-(const SkewMat& a, const SkewMat& b) {
        require_same_shape(a.m_, b.m_, "SkewMat -");
        return SkewMat(a.m_ - b.m_);
    }
    friend SkewMat operator-(const SkewMat& a) { return SkewMat(-a.m_); }
    friend SkewMat operator*(double s, const SkewMat& a) { return SkewMat(s * a.m_); }
    friend SkewMat operator*(const SkewMat& a, double s) { return SkewMat(s * a.m_); }

private:
    Mat m_;
};

/// Element of O(n): m^T m = I, det = +-1.
class Orthogonal {
public:
    Orthogonal() = default;
    explicit Orthogonal(Mat m) : m_(std::move(m)) {
        require_square(m_, "Orthogonal");
        require_finite(m_, "Orthogonal");
        const double defect = orthogonality_defect(m_);
        if (defect > tol::kOrthogonal) {
            std::ostringstream os;
            os << "Orthogonal: |m^T m - I|_F = " << defect << " exceeds " << tol::kOrthogonal;
            throw DomainError(os.str());
        }
    }
    static Orthogonal identity(Index n) { return Orthogonal(Mat::Identity(n, n)); }
    Index n() const { return m_.rows(); }
    const Mat& mat() const { return m_; }

private:
    Mat m_;
};

/// Element of SO(n).
class Rotation {
public:
    Rotation() = default;
    explicit Rotation(Mat m) : m_(std::move(m)) {
        require_square(m_, "Rotation");
        require_finite(m_, "Rotation");
        const double defect = orthogonality_defect(m_);
        if (defect > tol::kOrthogonal) {
            std::ostringstream os;
            os << "Rotation: |m^T m - I|_F = " << defect << " exceeds " << tol::kOrthogonal;
            throw DomainError(os.str());
        }
        if (std::abs(m_.determinant() - 1.0) > tol::kOrthogonal) {
            throw DomainError("Rotation: determinant is not +1");
        }
    }
    static Rotation identity(Index n) { return Rotation(Mat::Identity(n, n)); }
    Index n() const { return m_.rows(); }
    const Mat& mat() const { return m_; }
    operator Orthogonal() const { return Orthogonal(m_); }

private:
    Mat m_;
};

/// Element of sp(2n, R): m^T J + J m = 0.
class SpLieAlg {
public:
    SpLieAlg() = default;
    explicit SpLieAlg(Mat m) : m_(std::move(m)) {
        require_square(m_, "SpLieAlg");
        if (m_.rows() % 2 != 0) throw DimensionError("SpLieAlg: size must be even");
        require_finite(m_, "SpLieAlg");
        const double defect = sp_algebra_defect(m_);
        if (defect > tol::kSpAlgebra * std::max(1.0, m_.norm())) {
            std::ostringstream os;
            os << "SpLieAlg: |m^T J + J m|_F = " << defect;
            throw DomainError(os.str());
        }
    }
    Index n() const { return m_.rows() / 2; }
    const Mat& mat() const { return m_; }

    friend SpLieAlg operator+(const SpLieAlg& a, const SpLieAlg& b) {
        require_same_shape(a.m_, b.m_, "SpLieAlg +");
        return SpLieAlg(a.m_ + b.m_);
    }
    friend SpLieAlg operator*(double s, const SpLieAlg& a) { return SpLieAlg(s * a.m_); }

private:
    Mat m_;
};

/// Element of Sp(2n, R): m^T J m = J.
class SpGroup {
public:
    SpGroup() = default;
    explicit SpGroup(Mat m) : m_(std::move(m)) {
        require_square(m_, "SpGroup");
        if (m_.rows() % 2 != 0) throw DimensionError("SpGroup: size must be even");
        require_finite(m_, "SpGroup");
        const double defect = sp_group_defect(m_);
        if (defect > tol::kSpGroup) {
            std::ostringstream os;
            os << "SpGroup: |m^T J m - J|_F = " << defect << " exceeds " << tol::kSpGroup;
            throw DomainError(os.str());
        }
    }
    static SpGroup identity(Index n) { return SpGroup(Mat::Identity(2 * n, 2 * n)); }
    Index n() const { return m_.rows() / 2; }
    const Mat& mat() const { return m_; }

    /// S^{-1} = -J S^T J, exact for symplectic S.
    Mat inverse() const {
        const Mat j = jmat(n());
        return -j * m_.transpose() * j;
    }

private:
    Mat m_;
};

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

/// <A, B> = 1/2 tr(A^T B).
inline double trace_inner(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "inner");
    return 0.5 * a.cwiseProduct(b).sum();
}

inline double inner(const SkewMat& a, const SkewMat& b) { return trace_inner(a.mat(), b.mat()); }
inline double inner(const SpLieAlg& a, const SpLieAlg& b) { return trace_inner(a.mat(), b.mat()); }

inline SkewMat commutator(const SkewMat& a, const SkewMat& b) {
    require_same_shape(a.mat(), b.mat(), "commutator");
    return SkewMat(a.mat() * b.mat() - b.mat() * a.mat());
}

// ---------------------------------------------------------------------------
// Matrix functions
// ---------------------------------------------------------------------------

/// Matrix exponential: scaling and squaring around a degree-12 Taylor
/// polynomial, with the scaled 1-norm brought below 1/2.
inline Mat expm(const Mat& a) {
    require_square(a, "expm");
    require_finite(a, "expm");
    const Index n = a.rows();
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    const Mat x = a / std::ldexp(1.0, squarings);

    constexpr int kOrder = 12;
    const Mat id = Mat::Identity(n, n);
    Mat e = id + x / kOrder;
    for (int k = kOrder - 1; k >= 1; --k) e = id + (x * e) / k;
    for (int s = 0; s < squarings; ++s) e = e * e;
    return e;
}

inline Rotation expm(const SkewMat& a) { return Rotation(expm(a.mat())); }

/// Frechet derivative of expm at a in direction e, read off the upper-right
/// block of expm([[a, e], [0, a]]).
inline Mat expm_frechet(const Mat& a, const Mat& e) {
    require_same_shape(a, e, "expm_frechet");
    const Index n = a.rows();
    Mat big = Mat::Zero(2 * n, 2 * n);
    big.topLeftCorner(n, n) = a;
    big.topRightCorner(n, n) = e;
    big.bottomRightCorner(n, n) = a;
    return expm(big).topRightCorner(n, n);
}

/// Coordinates of a skew matrix on the basis E_ij = e_i e_j^T - e_j e_i^T, i < j.
inline Vec skew_coords(const Mat& m) {
    const Index n = m.rows();
    Vec v(n * (n - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) v(k++) = m(i, j);
    return v;
}

inline Mat skew_from_coords(const Vec& v, Index n) {
    if (v.size() != n * (n - 1) / 2) throw DimensionError("skew_from_coords: wrong length");
    Mat m = Mat::Zero(n, n);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            m(i, j) = v(k);
            m(j, i) = -v(k);
            ++k;
        }
    return m;
}

/// Principal solution A of 2 sinh(A) = p for skew p with |p|_2 < 2.
///
/// Newton's method on F(A) = expm(A) - expm(-A) - p from A = p/2, with the
/// Jacobian assembled column by column from Frechet derivatives of expm.
/// Every eigen-angle of the result lies in (-pi/2, pi/2).
inline SkewMat skew_asinh(const SkewMat& p) {
    const Index n = p.n();
    const double bound = 2.0 - tol::kAsinhMargin;
    const double norm2 = spectral_norm(p.mat());
    if (norm2 >= bound) {
        std::ostringstream os;
        os.precision(17);
        os << "skew_asinh: spectral norm |p|_2 = " << norm2 << " must be below 2 (margin "
           << tol::kAsinhMargin << ")";
        throw OutOfRangeError(os.str());
    }
    if (n < 2) return p;

    const Index dim = n * (n - 1) / 2;
    Mat a = 0.5 * p.mat();
    for (int iter = 0; iter < tol::kAsinhMaxIter; ++iter) {
        const Mat f = expm(a) - expm(Mat(-a)) - p.mat();
        if (f.norm() <= tol::kAsinhResidual) return SkewMat(a);

        Mat jac(dim, dim);
        for (Index k = 0; k < dim; ++k) {
            const Mat e = skew_from_coords(Vec::Unit(dim, k), n);
            jac.col(k) = skew_coords(expm_frechet(a, e) + expm_frechet(-a, e));
        }
        const Vec step = jac.partialPivLu().solve(-skew_coords(f));
        if (!step.allFinite()) throw NumericalFailure("skew_asinh: singular Newton system");
        a += skew_from_coords(step, n);
    }
    throw NonConvergenceError("skew_asinh: Newton iteration did not converge in 50 steps");
}

/// Orthogonal polar factor of m (nearest rotation in the Frobenius norm).
inline Rotation polar_project(const Mat& m) {
    require_square(m, "polar_project");
    require_finite(m, "polar_project");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 1e-14 * std::max(1.0, s(0))) {
        throw NumericalFailure("polar_project: matrix is singular");
    }
    if (m.determinant() <= 0.0) throw DomainError("polar_project: determinant must be positive");
    return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

// ---------------------------------------------------------------------------
// Seeded samplers. Entries are uniform in [-1, 1] before any symmetrisation.
// ---------------------------------------------------------------------------

inline void require_sample_size(Index n, const char* who) {
    if (n < 2) throw DomainError(std::string(who) + ": n must be >= 2");
}

inline Mat random_matrix(Index rows, Index cols, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

inline SkewMat random_skew(Index n, Rng& rng) {
    require_sample_size(n, "random_skew");
    const Mat m = random_matrix(n, n, rng);
    return SkewMat(0.5 * (m - m.transpose()));
}

inline SpLieAlg random_sp(Index n, Rng& rng) {
    require_sample_size(n, "random_sp");
    const Mat a = random_matrix(n, n, rng);
    const Mat b = random_matrix(n, n, rng);
    const Mat c = random_matrix(n, n, rng);
    Mat xi(2 * n, 2 * n);
    xi.topLeftCorner(n, n) = a;
    xi.topRightCorner(n, n) = 0.5 * (b + b.transpose());
    xi.bottomLeftCorner(n, n) = 0.5 * (c + c.transpose());
    xi.bottomRightCorner(n, n) = -a.transpose();
    return SpLieAlg(std::move(xi));
}

inline Rotation random_rotation(Index n, Rng& rng) {
    require_sample_size(n, "random_rotation");
    return expm(random_skew(n, rng));
}

/// Orthogonal sample; determinant -1 with probability one half.
inline Orthogonal random_orthogonal(Index n, Rng& rng) {
    Mat r = random_rotation(n, rng).mat();
    if (std::bernoulli_distribution(0.5)(rng)) r.col(0) = -r.col(0);
    return Orthogonal(std::move(r));
}

/// exp of an sp(2n) sample rescaled to Frobenius norm at most one.
inline SpGroup random_sp_group(Index n, Rng& rng) {
    const SpLieAlg xi = random_sp(n, rng);
    const double scale = std::max(1.0, xi.mat().norm());
    return SpGroup(expm(Mat(xi.mat() / scale)));
}

inline SkewMat random_skew(Index n, std::uint64_t seed) {
    Rng rng(seed);
    return random_skew(n, rng);
}
inline SpLieAlg random_sp(Index n, std::uint64_t seed) {
    Rng rng(seed);
    return random_sp(n, rng);
}
inline Rotation random_rotation(Index n, std::uint64_t seed) {
    Rng rng(seed);
    return random_rotation(n, rng);
}
inline Orthogonal random_orthogonal(Index n, std::uint64_t seed) {
    Rng rng(seed);
    return random_orthogonal(n, rng);
}
inline SpGroup random_sp_group(Index n, std::uint64_t seed) {
    Rng rng(seed);
    return random_sp_group(n, rng);
}

}  // namespace symrb

// qstate.hpp — Validated quantum-state and operator domain types

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "oqs/errors.hpp"

namespace oqs {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;
using Index   = Eigen::Index;

// Tolerances of the type invariants. Operations that promise looser
// post-conditions pass their own tolerance explicitly.
inline constexpr double kHermitianTol   = 1e-12; // scaled by (1 + max|M|)
inline constexpr double kStateNormTol   = 1e-10;
inline constexpr double kDensityTol     = 1e-10;
inline constexpr Index  kDimensionCap   = 4096;

inline bool all_finite(const Matrix& m) {
    return m.allFinite();
}

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// max entrywise |M - M†|
inline double hermiticity_defect(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

inline void require_finite(const Matrix& m, const std::string& what) {
    if (!all_finite(m))
        throw ValidationError(what + ": entries must be finite (no NaN/Inf)");
}

inline void require_square(const Matrix& m, const std::string& what) {
    if (m.rows() != m.cols())
        throw DimensionError(what + ": matrix must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_hermitian(const Matrix& m, const std::string& what,
                              double tol = kHermitianTol) {
    require_square(m, what);
    const double bound = tol * (1.0 + max_abs(m));
    const double defect = hermiticity_defect(m);
    if (defect > bound)
        throw ValidationError(what + ": Hermiticity violated, max|M - M^dag| = " +
                              std::to_string(defect) + " exceeds " + std::to_string(bound));
}

// Hermitian operator (observable / Hamiltonian). Immutable after construction.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
        require_finite(m_, "HermitianOperator");
        require_hermitian(m_, "HermitianOperator");
    }

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

// Normalized pure state.
class StateVector {
public:
    explicit StateVector(Vector v, double norm_tol = kStateNormTol) : v_(std::move(v)) {
        if (!v_.allFinite())
            throw ValidationError("StateVector: amplitudes must be finite");
        if (v_.size() == 0)
            throw DimensionError("StateVector: dimension must be positive");
        const double n = v_.norm();
        if (std::abs(n - 1.0) > norm_tol)
            throw ValidationError("StateVector: norm " + std::to_string(n) +
                                  " deviates from 1 beyond tolerance " + std::to_string(norm_tol));
    }

    // Rescale an arbitrary nonzero vector to unit norm.
    static StateVector normalized(const Vector& v) {
        const double n = v.norm();
        if (!(n > 0.0) || !v.allFinite())
            throw ValidationError("StateVector: cannot normalize zero or non-finite vector");
        return StateVector(v / n);
    }

    const Vector& amplitudes() const { return v_; }
    Index dim() const { return v_.size(); }

private:
    Vector v_;
};

// Smallest eigenvalue of the Hermitian part; used by the positivity check.
inline double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// The single state-space validator used by every module post-condition.
inline void validate_density(const Matrix& m, double tol = kDensityTol,
                             const std::string& what = "DensityMatrix") {
    require_finite(m, what);
    require_square(m, what);
    const double defect = hermiticity_defect(m);
    if (defect > tol)
        throw ValidationError(what + ": Hermiticity defect " + std::to_string(defect) +
                              " exceeds " + std::to_string(tol));
    const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
    if (tr_err > tol)
        throw ValidationError(what + ": |tr - 1| = " + std::to_string(tr_err) +
                              " exceeds " + std::to_string(tol));
    const double lam_min = min_eigenvalue(m);
    if (lam_min < -tol)
        throw ValidationError(what + ": smallest eigenvalue " + std::to_string(lam_min) +
                              " below -" + std::to_string(tol));
}

// Unit-trace positive-semidefinite Hermitian state.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m, double tol = kDensityTol) : m_(std::move(m)) {
        validate_density(m_, tol);
    }

    static DensityMatrix pure(const StateVector& psi) {
        const Vector& v = psi.amplitudes();
        return DensityMatrix(v * v.adjoint());
    }

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

} // namespace oqs

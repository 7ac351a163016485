// linalg.hpp — Dense complex linear algebra: Kronecker products, partial trace,
// matrix exponential, mixtures, norms, and superoperator (un)stacking helpers.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>
#include <vector>

#include "oqs/qstate.hpp"

namespace oqs {

// Kronecker product a (x) b. Result dimension must stay within the cap.
inline Matrix kron(const Matrix& a, const Matrix& b, Index dim_cap = kDimensionCap) {
    require_finite(a, "kron lhs");
    require_finite(b, "kron rhs");
    const Index rows = a.rows() * b.rows();
    const Index cols = a.cols() * b.cols();
    if (rows > dim_cap || cols > dim_cap)
        throw DimensionError("kron: product dimension " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " exceeds cap " + std::to_string(dim_cap));
    Matrix out(rows, cols);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Trace over the environment factor of a state on H_S (x) H_B where the
// composite index is (s, b) = s*d_b + b.
inline Matrix partial_trace_env_matrix(const Matrix& rho_total, Index d_s, Index d_b) {
    require_square(rho_total, "partial_trace_env");
    if (d_s <= 0 || d_b <= 0 || rho_total.rows() != d_s * d_b)
        throw DimensionError("partial_trace_env: total dimension " +
                             std::to_string(rho_total.rows()) + " != d_s*d_b = " +
                             std::to_string(d_s) + "*" + std::to_string(d_b));
    Matrix out = Matrix::Zero(d_s, d_s);
    for (Index i = 0; i < d_s; ++i)
        for (Index j = 0; j < d_s; ++j)
            for (Index k = 0; k < d_b; ++k)
                out(i, j) += rho_total(i * d_b + k, j * d_b + k);
    return out;
}

inline DensityMatrix partial_trace_env(const DensityMatrix& rho_total, Index d_s, Index d_b) {
    return DensityMatrix(partial_trace_env_matrix(rho_total.matrix(), d_s, d_b));
}

// Re tr{A rho}; the imaginary part is a corruption diagnostic.
inline double expectation(const HermitianOperator& a, const DensityMatrix& rho) {
    if (a.dim() != rho.dim())
        throw DimensionError("expectation: operator dim " + std::to_string(a.dim()) +
                             " != state dim " + std::to_string(rho.dim()));
    const Complex tr = (a.matrix() * rho.matrix()).trace();
    if (std::abs(tr.imag()) > 1e-10)
        throw NumericalError("expectation: Im tr{A rho} = " + std::to_string(tr.imag()) +
                             " exceeds 1e-10");
    return tr.real();
}

// <psi|A|psi> for a Hermitian observable.
inline double expectation_state(const Matrix& a, const Vector& psi) {
    if (a.rows() != psi.size())
        throw DimensionError("expectation_state: operator dim " + std::to_string(a.rows()) +
                             " != state dim " + std::to_string(psi.size()));
    const Complex v = psi.dot(a * psi);
    return v.real();
}

// exp(scale*A). Hermitian and anti-Hermitian arguments go through an exact
// eigendecomposition; everything else uses Pade scaling-and-squaring.
inline Matrix matrix_exponential(const Matrix& a, Complex scale = Complex(1.0, 0.0)) {
    require_square(a, "matrix_exponential");
    require_finite(a, "matrix_exponential");
    const Matrix m = scale * a;
    const double tol = kHermitianTol * (1.0 + max_abs(m));
    if (hermiticity_defect(m) <= tol) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        const Eigen::VectorXd lam = es.eigenvalues();
        Vector phase(lam.size());
        for (Index i = 0; i < lam.size(); ++i) phase(i) = std::exp(Complex(lam(i), 0.0));
        return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }
    if (max_abs(m + m.adjoint()) <= tol) {
        // m = iK with K Hermitian; exp(m) = V exp(i lam) V^dag is unitary.
        Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0.0, -1.0) * m);
        const Eigen::VectorXd lam = es.eigenvalues();
        Vector phase(lam.size());
        for (Index i = 0; i < lam.size(); ++i) phase(i) = std::exp(Complex(0.0, lam(i)));
        return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }
    return m.exp();
}

// rho = sum_a w_a |psi_a><psi_a|
inline DensityMatrix density_from_mixture(const std::vector<double>& weights,
                                          const std::vector<StateVector>& states) {
    if (weights.empty() || weights.size() != states.size())
        throw ValidationError("density_from_mixture: need equally many weights and states");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw ValidationError("density_from_mixture: weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ValidationError("density_from_mixture: weight sum " + std::to_string(wsum) +
                              " deviates from 1 beyond 1e-12");
    const Index d = states.front().dim();
    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != d)
            throw DimensionError("density_from_mixture: state dimension mismatch");
        const Vector& v = states[i].amplitudes();
        rho.noalias() += weights[i] * (v * v.adjoint());
    }
    return DensityMatrix(std::move(rho));
}

// Column stacking: stack(rho)_{r + d*c} = rho_{r,c}, so A rho B -> (B^T (x) A) stack(rho).
inline Vector stack_columns(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unstack_columns(const Vector& v, Index d) {
    if (v.size() != d * d)
        throw DimensionError("unstack_columns: length " + std::to_string(v.size()) +
                             " != d^2 = " + std::to_string(d * d));
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

// Choi matrix of the map represented by superoperator S (column-stacking
// convention): C[(i,r),(j,c)] = S[(r + d*c), (i + d*j)].
inline Matrix choi_from_superoperator(const Matrix& s) {
    require_square(s, "choi_from_superoperator");
    const Index d = static_cast<Index>(std::llround(std::sqrt(double(s.rows()))));
    if (d * d != s.rows())
        throw DimensionError("choi_from_superoperator: dimension is not a perfect square");
    Matrix c(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index r = 0; r < d; ++r)
            for (Index j = 0; j < d; ++j)
                for (Index col = 0; col < d; ++col)
                    c(i * d + r, j * d + col) = s(r + d * col, i + d * j);
    return c;
}

// Trace norm (sum of singular values).
inline double trace_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

inline double purity(const Matrix& rho) {
    return (rho * rho).trace().real();
}

} // namespace oqs

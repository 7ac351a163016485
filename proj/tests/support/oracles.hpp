// oracles.hpp — Independent closed forms and brute-force references shared by
// the test suites. Everything here is computed without touching the code paths
// it is used to check.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Kronecker product by direct index arithmetic.
inline Matrix kron_by_index(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < out.rows(); ++i)
        for (Index j = 0; j < out.cols(); ++j)
            out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    return out;
}

// Partial trace over the second factor by explicit summation.
inline Matrix ptrace_env_by_sum(const Matrix& rho, Index d_s, Index d_b) {
    Matrix out = Matrix::Zero(d_s, d_s);
    for (Index i = 0; i < d_s; ++i)
        for (Index j = 0; j < d_s; ++j)
            for (Index k = 0; k < d_b; ++k) out(i, j) += rho(i * d_b + k, j * d_b + k);
    return out;
}

// Truncated Taylor series of exp(A); valid for small norms.
inline Matrix exp_by_series(const Matrix& a, int terms = 40) {
    Matrix out = Matrix::Identity(a.rows(), a.cols());
    Matrix power = out;
    double fact = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = power * a;
        fact *= double(k);
        out += power / fact;
    }
    return out;
}

// Damped two-level system with H = (omega0/2) sigma_z, decay rate gamma,
// excited state at index 0: populations and coherence in closed form.
inline double damped_qubit_excited_population(double gamma, double t, double p0 = 1.0) {
    return p0 * std::exp(-gamma * t);
}

inline Complex damped_qubit_coherence(Complex rho_eg0, double gamma, double omega0, double t) {
    return rho_eg0 * std::exp(Complex(-0.5 * gamma * t, -omega0 * t));
}

// Resonant single-excitation Rabi oscillation of the excited population for a
// qubit coupled to one empty resonant mode with coupling alpha.
inline double rabi_excited_population(double alpha, double t) {
    const double c = std::cos(alpha * t);
    return c * c;
}

// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// exp(-i theta sigma_x) = cos(theta) I - i sin(theta) sigma_x
inline Matrix exp_minus_i_theta_sigma_x(double theta) {
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    return std::cos(theta) * Matrix::Identity(2, 2) - Complex(0, 1) * std::sin(theta) * sx;
}

} // namespace oracle

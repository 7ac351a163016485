// lindblad.hpp — Markovian quantum master equation: generator application,
// deterministic integration, dynamical maps and semigroup residuals.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "oqs/linalg.hpp"
#include "oqs/ode.hpp"
#include "oqs/ops.hpp"
#include "oqs/qstate.hpp"

namespace oqs {

struct DecayChannel {
    double gamma;
    Matrix a;
};

class LindbladModel {
public:
    LindbladModel(HermitianOperator h, std::vector<DecayChannel> channels)
        : h_(std::move(h)), channels_(std::move(channels)) {
        for (const auto& ch : channels_) {
            if (!std::isfinite(ch.gamma) || ch.gamma < 0.0)
                throw ValidationError("LindbladModel: channel rate gamma must be >= 0, got " +
                                      std::to_string(ch.gamma));
            require_finite(ch.a, "LindbladModel channel operator");
            if (ch.a.rows() != h_.dim() || ch.a.cols() != h_.dim())
                throw DimensionError("LindbladModel: channel operator dimension mismatch");
        }
    }

    const HermitianOperator& h() const { return h_; }
    const std::vector<DecayChannel>& channels() const { return channels_; }
    Index dim() const { return h_.dim(); }

    // G = -iH - (1/2) sum_i gamma_i A_i^dag A_i, the non-Hermitian drift generator.
    Matrix effective_drift() const {
        Matrix g = Complex(0.0, -1.0) * h_.matrix();
        for (const auto& ch : channels_)
            g.noalias() -= 0.5 * ch.gamma * (ch.a.adjoint() * ch.a);
        return g;
    }

private:
    HermitianOperator h_;
    std::vector<DecayChannel> channels_;
};

// L rho = -i[H,rho] + sum_i gamma_i (A_i rho A_i^dag - 1/2 {A_i^dag A_i, rho})
inline Matrix lindblad_apply_matrix(const LindbladModel& model, const Matrix& rho) {
    if (rho.rows() != model.dim() || rho.cols() != model.dim())
        throw DimensionError("lindblad_apply: state dimension mismatch");
    const Matrix g = model.effective_drift();
    Matrix out = g * rho;
    out.noalias() += rho * g.adjoint();
    for (const auto& ch : model.channels())
        out.noalias() += ch.gamma * (ch.a * rho * ch.a.adjoint());
    return out;
}

inline Matrix lindblad_apply(const LindbladModel& model, const DensityMatrix& rho) {
    return lindblad_apply_matrix(model, rho.matrix());
}

// Integrate the master equation over an ascending grid starting at 0. Outputs
// are re-symmetrized at the grid points and validated to the stated tolerance.
inline std::vector<DensityMatrix> integrate_master(const LindbladModel& model,
                                                   const DensityMatrix& rho0,
                                                   const std::vector<double>& t_grid,
                                                   const OdeOptions& opts = {}) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw ValidationError("integrate_master: time grid must start at 0");
    if (rho0.dim() != model.dim())
        throw DimensionError("integrate_master: initial state dimension mismatch");

    const Matrix g = model.effective_drift();
    const auto& channels = model.channels();
    auto rhs = [&](double, const Matrix& y, Matrix& out) {
        out.noalias() = g * y;
        out.noalias() += y * g.adjoint();
        for (const auto& ch : channels)
            out.noalias() += ch.gamma * (ch.a * y * ch.a.adjoint());
    };

    std::vector<Matrix> raw = integrate_at<Matrix>(rhs, rho0.matrix(), t_grid, opts);
    std::vector<DensityMatrix> out;
    out.reserve(raw.size());
    for (auto& m : raw)
        out.emplace_back(0.5 * (m + m.adjoint().eval()), 1e-8);
    return out;
}

// Superoperator on column-stacked density matrices.
struct Superoperator {
    Matrix matrix; // d^2 x d^2
    Index dim;     // d

    Matrix apply(const Matrix& rho) const {
        return unstack_columns(matrix * stack_columns(rho), dim);
    }
};

// Matrix form of the generator: A rho B -> (B^T (x) A) stack(rho).
inline Superoperator lindblad_superoperator(const LindbladModel& model) {
    const Index d = model.dim();
    const Matrix id = identity_op(d);
    const Matrix g = model.effective_drift();
    Matrix l = kron(id, g) + kron(g.conjugate(), id);
    for (const auto& ch : model.channels())
        l.noalias() += ch.gamma * kron(ch.a.conjugate(), ch.a);
    return Superoperator{std::move(l), d};
}

// V(t) = exp(L t)
inline Superoperator dynamical_map(const LindbladModel& model, double t) {
    if (!(t >= 0.0))
        throw ValidationError("dynamical_map: time must be nonnegative");
    Superoperator l = lindblad_superoperator(model);
    Matrix v = matrix_exponential(l.matrix, Complex(t, 0.0));
    if (!all_finite(v))
        throw NumericalError("dynamical_map: exp(L t) overflowed at t = " + std::to_string(t));
    return Superoperator{std::move(v), l.dim};
}

// max-entry norm of V(t1)V(t2) - V(t1+t2)
inline double semigroup_residual(const LindbladModel& model, double t1, double t2) {
    if (!(t1 >= 0.0) || !(t2 >= 0.0))
        throw ValidationError("semigroup_residual: times must be nonnegative");
    const Superoperator l = lindblad_superoperator(model);
    const Matrix v1 = matrix_exponential(l.matrix, Complex(t1, 0.0));
    const Matrix v2 = matrix_exponential(l.matrix, Complex(t2, 0.0));
    const Matrix v12 = matrix_exponential(l.matrix, Complex(t1 + t2, 0.0));
    return max_abs(v1 * v2 - v12);
}

} // namespace oqs

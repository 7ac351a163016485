// micro.hpp — Exact unitary evolution of the total system S+B and reduction to
// the system state. Serves as the ground-truth oracle for the approximate dynamics.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "oqs/linalg.hpp"
#include "oqs/ops.hpp"
#include "oqs/qstate.hpp"

namespace oqs {

// H = H_S (x) I_B + I_S (x) H_B + alpha * H_I with a factorizing bath state.
class TotalSystemModel {
public:
    TotalSystemModel(HermitianOperator h_s, HermitianOperator h_b, HermitianOperator h_i,
                     double alpha, DensityMatrix rho_b)
        : h_s_(std::move(h_s)), h_b_(std::move(h_b)), h_i_(std::move(h_i)), alpha_(alpha),
          rho_b_(std::move(rho_b)) {
        if (!std::isfinite(alpha_))
            throw ValidationError("TotalSystemModel: alpha must be finite");
        const Index d = h_s_.dim() * h_b_.dim();
        if (d > kDimensionCap)
            throw DimensionError("TotalSystemModel: total dimension " + std::to_string(d) +
                                 " exceeds cap " + std::to_string(kDimensionCap));
        if (h_i_.dim() != d)
            throw DimensionError("TotalSystemModel: H_I dimension " + std::to_string(h_i_.dim()) +
                                 " != d_S*d_B = " + std::to_string(d));
        if (rho_b_.dim() != h_b_.dim())
            throw DimensionError("TotalSystemModel: rho_B dimension mismatch");
    }

    const HermitianOperator& h_s() const { return h_s_; }
    const HermitianOperator& h_b() const { return h_b_; }
    const HermitianOperator& h_i() const { return h_i_; }
    double alpha() const { return alpha_; }
    const DensityMatrix& rho_b() const { return rho_b_; }
    Index d_s() const { return h_s_.dim(); }
    Index d_b() const { return h_b_.dim(); }

private:
    HermitianOperator h_s_, h_b_, h_i_;
    double alpha_;
    DensityMatrix rho_b_;
};

inline HermitianOperator build_total_hamiltonian(const TotalSystemModel& model) {
    Matrix h = kron(model.h_s().matrix(), identity_op(model.d_b())) +
               kron(identity_op(model.d_s()), model.h_b().matrix()) +
               model.alpha() * model.h_i().matrix();
    return HermitianOperator(std::move(h));
}

// -i[H, rho]
inline Matrix von_neumann_rhs(const HermitianOperator& h, const DensityMatrix& rho) {
    if (h.dim() != rho.dim())
        throw DimensionError("von_neumann_rhs: dimension mismatch");
    const Matrix c = h.matrix() * rho.matrix() - rho.matrix() * h.matrix();
    return Complex(0.0, -1.0) * c;
}

// Exact propagation by a single eigendecomposition of H; states at arbitrary t
// come out without time stepping. Immutable and shareable once built.
class ExactPropagator {
public:
    explicit ExactPropagator(const TotalSystemModel& model)
        : d_s_(model.d_s()), d_b_(model.d_b()), rho_b_(model.rho_b().matrix()) {
        const HermitianOperator h = build_total_hamiltonian(model);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
        if (es.info() != Eigen::Success)
            throw NumericalError("ExactPropagator: eigendecomposition failed");
        evecs_ = es.eigenvectors();
        evals_ = es.eigenvalues();
    }

    Index d_s() const { return d_s_; }
    Index d_b() const { return d_b_; }

    Matrix evolution_operator(double t) const {
        require_time(t);
        Vector phase(evals_.size());
        for (Index i = 0; i < evals_.size(); ++i)
            phase(i) = std::exp(Complex(0.0, -evals_(i) * t));
        return evecs_ * phase.asDiagonal() * evecs_.adjoint();
    }

    // U(t) rho_total U(t)^dag for an arbitrary total state.
    Matrix total_state(const Matrix& rho_total0, double t) const {
        if (rho_total0.rows() != d_s_ * d_b_ || rho_total0.cols() != d_s_ * d_b_)
            throw DimensionError("ExactPropagator: total state dimension mismatch");
        const Matrix u = evolution_operator(t);
        return u * rho_total0 * u.adjoint();
    }

    // tr_B { U (rho_s0 (x) rho_B) U^dag }
    DensityMatrix reduced_state(const DensityMatrix& rho_s0, double t) const {
        if (rho_s0.dim() != d_s_)
            throw DimensionError("ExactPropagator: system state dimension mismatch");
        const Matrix rho0 = kron(rho_s0.matrix(), rho_b_);
        const Matrix rho_t = total_state(rho0, t);
        return DensityMatrix(partial_trace_env_matrix(rho_t, d_s_, d_b_));
    }

private:
    static void require_time(double t) {
        if (!std::isfinite(t))
            throw ValidationError("ExactPropagator: time must be finite");
    }

    Index d_s_, d_b_;
    Matrix rho_b_;
    Matrix evecs_;
    Eigen::VectorXd evals_;
};

inline DensityMatrix evolve_reduced_exact(const TotalSystemModel& model,
                                          const DensityMatrix& rho_s0, double t) {
    return ExactPropagator(model).reduced_state(rho_s0, t);
}

// Bath ground state |0><0|.
inline DensityMatrix bath_ground_state(Index d_b) {
    Matrix m = Matrix::Zero(d_b, d_b);
    m(0, 0) = 1.0;
    return DensityMatrix(std::move(m));
}

// Gibbs state exp(-beta H_B)/Z.
inline DensityMatrix gibbs_state(const HermitianOperator& h_b, double beta) {
    if (!std::isfinite(beta) || beta < 0.0)
        throw ValidationError("gibbs_state: beta must be finite and nonnegative");
    Matrix w = matrix_exponential(h_b.matrix(), Complex(-beta, 0.0));
    const double z = w.trace().real();
    if (!(z > 0.0))
        throw NumericalError("gibbs_state: partition function not positive");
    return DensityMatrix(w / z);
}

// Bath of up to three independent modes (truncated oscillators; dim 2 = qubit
// mode): H_B = sum_k omega_k n_k and the collective lowering operator sum_k a_k.
struct MultimodeBath {
    HermitianOperator h_b;
    Matrix lowering_sum;
    Index dim;
};

inline MultimodeBath multimode_bath(const std::vector<Index>& dims,
                                    const std::vector<double>& freqs) {
    if (dims.empty() || dims.size() > 3 || dims.size() != freqs.size())
        throw ValidationError("multimode_bath: need 1..3 modes with matching frequencies");
    Index d = 1;
    for (Index dk : dims) {
        if (dk < 2) throw DimensionError("multimode_bath: each mode needs dimension >= 2");
        d *= dk;
    }
    Matrix h = Matrix::Zero(d, d);
    Matrix low = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        Matrix hk = freqs[k] * number_op(dims[k]);
        Matrix ak = annihilation(dims[k]);
        Matrix h_emb = Matrix::Identity(1, 1);
        Matrix a_emb = Matrix::Identity(1, 1);
        for (std::size_t j = 0; j < dims.size(); ++j) {
            h_emb = kron(h_emb, j == k ? hk : identity_op(dims[j]));
            a_emb = kron(a_emb, j == k ? ak : identity_op(dims[j]));
        }
        h += h_emb;
        low += a_emb;
    }
    return MultimodeBath{HermitianOperator(std::move(h)), std::move(low), d};
}

} // namespace oqs

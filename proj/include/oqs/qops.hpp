// qops.hpp — Quantum operations from indirect probe measurement: Kraus
// construction, selective and non-selective updates, outcome statistics.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "oqs/lindblad.hpp"
#include "oqs/linalg.hpp"
#include "oqs/micro.hpp"
#include "oqs/qstate.hpp"

namespace oqs {

struct ProbeEnsembleMember {
    double p;
    Vector phi;
};

// Probe preparation, measured bath observable R = sum_m r_m |phi_m><phi_m|
// (non-degenerate), and the system+probe unitary U.
class ProbeModel {
public:
    ProbeModel(std::vector<ProbeEnsembleMember> ensemble, std::vector<Vector> r_eigenbasis,
               std::vector<double> r_values, Matrix u)
        : ensemble_(std::move(ensemble)), r_basis_(std::move(r_eigenbasis)),
          r_values_(std::move(r_values)), u_(std::move(u)) {
        if (ensemble_.empty())
            throw ValidationError("ProbeModel: probe ensemble must be non-empty");
        d_b_ = ensemble_.front().phi.size();
        double psum = 0.0;
        for (const auto& m : ensemble_) {
            if (!(m.p >= 0.0))
                throw ValidationError("ProbeModel: ensemble probabilities must be nonnegative");
            if (m.phi.size() != d_b_)
                throw DimensionError("ProbeModel: probe state dimension mismatch");
            psum += m.p;
        }
        if (std::abs(psum - 1.0) > 1e-12)
            throw ValidationError("ProbeModel: ensemble probabilities sum to " +
                                  std::to_string(psum) + ", not 1 within 1e-12");

        if (r_basis_.size() != std::size_t(d_b_) || r_values_.size() != r_basis_.size())
            throw DimensionError("ProbeModel: R eigenbasis must be complete with one eigenvalue "
                                 "per eigenvector");
        for (std::size_t i = 0; i < r_basis_.size(); ++i) {
            if (r_basis_[i].size() != d_b_)
                throw DimensionError("ProbeModel: R eigenvector dimension mismatch");
            for (std::size_t j = 0; j <= i; ++j) {
                const Complex olap = r_basis_[j].dot(r_basis_[i]);
                const double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(olap - target) > 1e-10)
                    throw ValidationError("ProbeModel: R eigenbasis not orthonormal within 1e-10");
            }
        }
        double rmax = 0.0;
        for (double r : r_values_) rmax = std::max(rmax, std::abs(r));
        for (std::size_t i = 0; i < r_values_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(r_values_[i] - r_values_[j]) <= 1e-12 * (1.0 + rmax))
                    throw ValidationError("ProbeModel: degenerate R spectrum (eigenvalues " +
                                          std::to_string(j) + " and " + std::to_string(i) + ")");

        require_square(u_, "ProbeModel U");
        if (u_.rows() % d_b_ != 0)
            throw DimensionError("ProbeModel: U dimension not divisible by probe dimension");
        d_s_ = u_.rows() / d_b_;
        const double udefect = max_abs(u_.adjoint() * u_ - Matrix::Identity(u_.rows(), u_.rows()));
        if (udefect > 1e-10)
            throw ValidationError("ProbeModel: U not unitary, max|U^dag U - I| = " +
                                  std::to_string(udefect) + " exceeds 1e-10");
    }

    const std::vector<ProbeEnsembleMember>& ensemble() const { return ensemble_; }
    const std::vector<Vector>& r_eigenbasis() const { return r_basis_; }
    const std::vector<double>& r_values() const { return r_values_; }
    const Matrix& u() const { return u_; }
    Index d_s() const { return d_s_; }
    Index d_b() const { return d_b_; }

private:
    std::vector<ProbeEnsembleMember> ensemble_;
    std::vector<Vector> r_basis_;
    std::vector<double> r_values_;
    Matrix u_;
    Index d_s_ = 0, d_b_ = 0;
};

// Kraus operators grouped per outcome, with the physical readout values r_m.
class QuantumOperation {
public:
    QuantumOperation(std::vector<std::vector<Matrix>> kraus_per_outcome,
                     std::vector<double> outcome_values)
        : kraus_(std::move(kraus_per_outcome)), r_values_(std::move(outcome_values)) {
        if (kraus_.empty() || kraus_.size() != r_values_.size())
            throw ValidationError("QuantumOperation: need one Kraus group per outcome value");
        dim_ = 0;
        for (const auto& group : kraus_)
            for (const auto& k : group) {
                require_square(k, "QuantumOperation Kraus");
                if (dim_ == 0) dim_ = k.rows();
                if (k.rows() != dim_)
                    throw DimensionError("QuantumOperation: Kraus dimension mismatch");
            }
        if (dim_ == 0)
            throw ValidationError("QuantumOperation: no Kraus operators given");
        Matrix sum = Matrix::Zero(dim_, dim_);
        for (const auto& group : kraus_)
            for (const auto& k : group) sum.noalias() += k.adjoint() * k;
        const double defect = max_abs(sum - Matrix::Identity(dim_, dim_));
        if (defect > 1e-10)
            throw ValidationError("QuantumOperation: completeness violated, "
                                  "max|sum Omega^dag Omega - I| = " + std::to_string(defect) +
                                  " exceeds 1e-10");
    }

    std::size_t n_outcomes() const { return kraus_.size(); }
    const std::vector<Matrix>& kraus(std::size_t m) const { return kraus_.at(m); }
    double outcome_value(std::size_t m) const { return r_values_.at(m); }
    const std::vector<double>& outcome_values() const { return r_values_; }
    Index dim() const { return dim_; }

private:
    std::vector<std::vector<Matrix>> kraus_;
    std::vector<double> r_values_;
    Index dim_;
};

// Omega_mk = sqrt(p_k) <phi_m | U | phi_k>, a d_S x d_S partial matrix element.
inline QuantumOperation kraus_from_probe(const ProbeModel& probe) {
    const Index d_s = probe.d_s();
    const Index d_b = probe.d_b();
    const Matrix& u = probe.u();
    std::vector<std::vector<Matrix>> groups(probe.r_eigenbasis().size());
    for (std::size_t m = 0; m < probe.r_eigenbasis().size(); ++m) {
        const Vector& phi_m = probe.r_eigenbasis()[m];
        for (const auto& member : probe.ensemble()) {
            Matrix omega = Matrix::Zero(d_s, d_s);
            for (Index s = 0; s < d_s; ++s)
                for (Index sp = 0; sp < d_s; ++sp) {
                    Complex acc(0.0, 0.0);
                    for (Index b = 0; b < d_b; ++b)
                        for (Index bp = 0; bp < d_b; ++bp)
                            acc += std::conj(phi_m(b)) * u(s * d_b + b, sp * d_b + bp) *
                                   member.phi(bp);
                    omega(s, sp) = acc;
                }
            groups[m].push_back(std::sqrt(member.p) * omega);
        }
    }
    return QuantumOperation(std::move(groups), probe.r_values());
}

// Unnormalized Phi_m(rho) = sum_k Omega_mk rho Omega_mk^dag.
inline Matrix apply_operation(const QuantumOperation& op, std::size_t m, const DensityMatrix& rho) {
    if (m >= op.n_outcomes())
        throw ValidationError("apply_operation: outcome index " + std::to_string(m) +
                              " out of range");
    if (rho.dim() != op.dim())
        throw DimensionError("apply_operation: state dimension mismatch");
    Matrix out = Matrix::Zero(op.dim(), op.dim());
    for (const auto& k : op.kraus(m)) out.noalias() += k * rho.matrix() * k.adjoint();
    return out;
}

// P(m) = tr Phi_m(rho), clamped to [0,1].
inline double outcome_probability(const QuantumOperation& op, std::size_t m,
                                  const DensityMatrix& rho) {
    const double p = apply_operation(op, m, rho).trace().real();
    if (p < -1e-12 || p > 1.0 + 1e-12)
        throw NumericalError("outcome_probability: P(m) = " + std::to_string(p) +
                             " outside [-1e-12, 1+1e-12]");
    return std::min(1.0, std::max(0.0, p));
}

// rho'_m = Phi_m(rho)/P(m); conditioning on a zero-probability outcome is refused.
inline DensityMatrix selective_post_state(const QuantumOperation& op, std::size_t m,
                                          const DensityMatrix& rho, double eps = 1e-12) {
    Matrix phi = apply_operation(op, m, rho);
    const double p = phi.trace().real();
    if (p <= eps)
        throw ImpossibleOutcomeError("selective_post_state: outcome " + std::to_string(m) +
                                     " has probability " + std::to_string(p) +
                                     " <= " + std::to_string(eps));
    return DensityMatrix(phi / p);
}

// rho' = sum_m Phi_m(rho), the re-mixed post-measurement ensemble.
inline DensityMatrix nonselective_post_state(const QuantumOperation& op, const DensityMatrix& rho) {
    Matrix out = Matrix::Zero(op.dim(), op.dim());
    for (std::size_t m = 0; m < op.n_outcomes(); ++m) out += apply_operation(op, m, rho);
    const double tr = out.trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        throw NumericalError("nonselective_post_state: trace " + std::to_string(tr) +
                             " deviates from 1 beyond 1e-10");
    return DensityMatrix(out / tr);
}

// Superoperator of a single outcome map, for complete-positivity checks.
inline Superoperator operation_superoperator(const QuantumOperation& op, std::size_t m) {
    if (m >= op.n_outcomes())
        throw ValidationError("operation_superoperator: outcome index out of range");
    const Index d = op.dim();
    Matrix s = Matrix::Zero(d * d, d * d);
    for (const auto& k : op.kraus(m)) s.noalias() += kron(k.conjugate(), k);
    return Superoperator{std::move(s), d};
}

// Probe construction for an indirect measurement realized by the exact total
// evolution over [0, tau]: U = exp(-iH tau), probe ensemble from the bath state
// eigendecomposition, R measured in the computational bath basis.
inline ProbeModel probe_from_total_model(const TotalSystemModel& model, double tau,
                                         std::vector<double> r_values = {}) {
    const Index d_b = model.d_b();
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.rho_b().matrix());
    std::vector<ProbeEnsembleMember> ensemble;
    double psum = 0.0;
    for (Index k = 0; k < d_b; ++k) {
        const double p = es.eigenvalues()(k);
        if (p > 1e-12) {
            ensemble.push_back({p, es.eigenvectors().col(k)});
            psum += p;
        }
    }
    for (auto& m : ensemble) m.p /= psum; // discard eigenvalue dust below 1e-12
    std::vector<Vector> r_basis;
    for (Index b = 0; b < d_b; ++b) r_basis.push_back(basis_vector(d_b, b));
    if (r_values.empty())
        for (Index b = 0; b < d_b; ++b) r_values.push_back(double(b));
    const Matrix u = ExactPropagator(model).evolution_operator(tau);
    return ProbeModel(std::move(ensemble), std::move(r_basis), std::move(r_values), u);
}

} // namespace oqs

// test_qops.cpp — Kraus construction from probe measurements, selective and
// non-selective updates, outcome statistics, complete positivity.

#include <catch2/catch_amalgamated.hpp>

#include "oqs/micro.hpp"
#include "oqs/ops.hpp"
#include "oqs/qops.hpp"

#include "support/gen.hpp"

using namespace oqs;

namespace {

// CNOT with the system as control (flips the probe when the system is |e>).
Matrix cnot_system_controls_probe() {
    return kron(projector(2, 0), pauli_x()) + kron(projector(2, 1), identity_op(2));
}

ProbeModel cnot_probe_computational() {
    std::vector<ProbeEnsembleMember> ens{{1.0, basis_vector(2, 0)}};
    std::vector<Vector> basis{basis_vector(2, 0), basis_vector(2, 1)};
    return ProbeModel(std::move(ens), std::move(basis), {0.0, 1.0},
                      cnot_system_controls_probe());
}

DensityMatrix plus_state() {
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    return DensityMatrix::pure(StateVector(plus));
}

} // namespace

TEST_CASE("probe model validation", "[qops]") {
    std::vector<ProbeEnsembleMember> ens{{1.0, basis_vector(2, 0)}};
    std::vector<Vector> basis{basis_vector(2, 0), basis_vector(2, 1)};

    // non-unitary U
    REQUIRE_THROWS_AS(ProbeModel(ens, basis, {0.0, 1.0}, Matrix(0.5 * identity_op(4))),
                      ValidationError);
    // degenerate R spectrum
    REQUIRE_THROWS_AS(ProbeModel(ens, basis, {1.0, 1.0}, Matrix(identity_op(4))),
                      ValidationError);
    // probabilities must sum to one
    std::vector<ProbeEnsembleMember> bad_ens{{0.7, basis_vector(2, 0)}};
    REQUIRE_THROWS_AS(ProbeModel(bad_ens, basis, {0.0, 1.0}, Matrix(identity_op(4))),
                      ValidationError);
    // non-orthonormal eigenbasis
    std::vector<Vector> skew{basis_vector(2, 0), basis_vector(2, 0)};
    REQUIRE_THROWS_AS(ProbeModel(ens, skew, {0.0, 1.0}, Matrix(identity_op(4))),
                      ValidationError);
}

TEST_CASE("no-interaction probe gives the identity operation", "[qops]") {
    std::vector<ProbeEnsembleMember> ens{{1.0, basis_vector(2, 0)}};
    std::vector<Vector> basis{basis_vector(2, 0), basis_vector(2, 1)};
    const ProbeModel probe(ens, basis, {0.0, 1.0}, Matrix(identity_op(4)));
    const auto op = kraus_from_probe(probe);
    REQUIRE(op.n_outcomes() == 2);
    REQUIRE(max_abs(op.kraus(0)[0] - identity_op(2)) < 1e-14);
    REQUIRE(max_abs(op.kraus(1)[0]) < 1e-14);
}

TEST_CASE("CNOT probe in the computational basis measures the system projectively", "[qops]") {
    const auto op = kraus_from_probe(cnot_probe_computational());

    // explicit 4x4 matrix-element oracle
    const Matrix u = cnot_system_controls_probe();
    Matrix omega0(2, 2), omega1(2, 2);
    for (Index s = 0; s < 2; ++s)
        for (Index sp = 0; sp < 2; ++sp) {
            omega0(s, sp) = u(s * 2 + 0, sp * 2 + 0);
            omega1(s, sp) = u(s * 2 + 1, sp * 2 + 0);
        }
    REQUIRE(max_abs(op.kraus(0)[0] - omega0) < 1e-14);
    REQUIRE(max_abs(op.kraus(1)[0] - omega1) < 1e-14);
    REQUIRE(max_abs(op.kraus(0)[0] - projector(2, 1)) < 1e-14); // outcome 0 <-> |g>
    REQUIRE(max_abs(op.kraus(1)[0] - projector(2, 0)) < 1e-14); // outcome 1 <-> |e>

    const auto rho = plus_state();
    REQUIRE(outcome_probability(op, 0, rho) == Catch::Approx(0.5));
    REQUIRE(outcome_probability(op, 1, rho) == Catch::Approx(0.5));
}

TEST_CASE("CNOT probe measured in the +/- basis", "[qops]") {
    Vector plus(2), minus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    minus << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    std::vector<ProbeEnsembleMember> ens{{1.0, basis_vector(2, 0)}};
    const ProbeModel probe(ens, {plus, minus}, {1.0, -1.0}, cnot_system_controls_probe());
    const auto op = kraus_from_probe(probe);

    // Omega_+- = (I -+ ... )/sqrt(2): completeness is the enforced invariant
    Matrix sum = Matrix::Zero(2, 2);
    for (std::size_t m = 0; m < op.n_outcomes(); ++m)
        for (const auto& k : op.kraus(m)) sum += k.adjoint() * k;
    REQUIRE(max_abs(sum - identity_op(2)) < 1e-12);
    REQUIRE(max_abs(op.kraus(0)[0] - identity_op(2) / std::sqrt(2.0)) < 1e-14);
    REQUIRE(max_abs(op.kraus(1)[0] + pauli_z() / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("selective and non-selective updates", "[qops]") {
    const auto op = kraus_from_probe(cnot_probe_computational());
    const auto rho = plus_state();

    // apply_operation on the identity operation leaves rho unchanged
    std::vector<std::vector<Matrix>> id_kraus{{identity_op(2)}};
    const QuantumOperation id_op(id_kraus, {0.0});
    REQUIRE(max_abs(apply_operation(id_op, 0, rho) - rho.matrix()) < 1e-15);
    REQUIRE(outcome_probability(id_op, 0, rho) == Catch::Approx(1.0));
    REQUIRE(max_abs(selective_post_state(id_op, 0, rho).matrix() - rho.matrix()) < 1e-14);

    // projective outcome g on I/2 gives |g><g| at probability 1/2
    const DensityMatrix mixed(Matrix(0.5 * identity_op(2)));
    REQUIRE(max_abs(apply_operation(op, 0, mixed) - 0.5 * projector(2, 1)) < 1e-14);
    REQUIRE(max_abs(selective_post_state(op, 0, mixed).matrix() - projector(2, 1)) < 1e-14);

    // decoherence of the + state under non-selective measurement
    REQUIRE(max_abs(nonselective_post_state(op, rho).matrix() - 0.5 * identity_op(2)) < 1e-12);

    // impossible outcome: conditioning on P(m) = 0
    const DensityMatrix ground = DensityMatrix::pure(StateVector(basis_vector(2, 1)));
    REQUIRE_THROWS_AS(selective_post_state(op, 1, ground), ImpossibleOutcomeError);
    REQUIRE_THROWS_AS(apply_operation(op, 5, ground), ValidationError);
}

TEST_CASE("amplitude damping channel branch statistics", "[qops]") {
    const double p = 0.3;
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(1, 1) = 1.0;
    k0(0, 0) = std::sqrt(1.0 - p);
    k1(1, 0) = std::sqrt(p); // jump branch |e> -> |g|
    const QuantumOperation damping({{k0}, {k1}}, {0.0, 1.0});

    const DensityMatrix excited = DensityMatrix::pure(StateVector(basis_vector(2, 0)));
    REQUIRE(apply_operation(damping, 1, excited).trace().real() == Catch::Approx(p));

    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const auto post = selective_post_state(damping, 1, DensityMatrix::pure(StateVector(plus)));
    REQUIRE(max_abs(post.matrix() - projector(2, 1)) < 1e-14);
}

TEST_CASE("operation maps are convex-linear and completely positive", "[qops]") {
    const auto op = kraus_from_probe(cnot_probe_computational());
    RngStream rng(41, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const auto r1 = testgen::random_density(2, rng);
        const auto r2 = testgen::random_density(2, rng);
        const double lam = rng.uniform();
        const Matrix mix = lam * r1.matrix() + (1 - lam) * r2.matrix();
        const Matrix lhs = apply_operation(op, 0, DensityMatrix(mix));
        const Matrix rhs =
            lam * apply_operation(op, 0, r1) + (1 - lam) * apply_operation(op, 0, r2);
        REQUIRE(max_abs(lhs - rhs) < 1e-12);
    }
    for (std::size_t m = 0; m < op.n_outcomes(); ++m) {
        const Matrix choi = choi_from_superoperator(operation_superoperator(op, m).matrix);
        REQUIRE(min_eigenvalue(choi) > -1e-10);
    }
}

TEST_CASE("probabilities sum to one and mix back to the non-selective state", "[qops]") {
    RngStream rng(42, 0);
    const Matrix u = testgen::random_unitary(4, rng);
    std::vector<ProbeEnsembleMember> ens{{0.6, basis_vector(2, 0)}, {0.4, basis_vector(2, 1)}};
    std::vector<Vector> basis{basis_vector(2, 0), basis_vector(2, 1)};
    const ProbeModel probe(ens, basis, {0.5, -0.5}, u);
    const auto op = kraus_from_probe(probe);
    const auto rho = testgen::random_density(2, rng);

    double psum = 0.0;
    Matrix remix = Matrix::Zero(2, 2);
    for (std::size_t m = 0; m < op.n_outcomes(); ++m) {
        const double pm = outcome_probability(op, m, rho);
        psum += pm;
        remix += pm * selective_post_state(op, m, rho).matrix();
    }
    REQUIRE(psum == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(max_abs(remix - nonselective_post_state(op, rho).matrix()) < 1e-12);
}

TEST_CASE("probe built from the exact total model reproduces the reduced state", "[qops]") {
    // qubit + single mode; U = exp(-iH tau)
    const double tau = 0.9;
    const Matrix h_i = kron(sigma_minus(), creation(2)) + kron(sigma_plus(), annihilation(2));
    TotalSystemModel model(HermitianOperator(0.5 * pauli_z()),
                           HermitianOperator(number_op(2)), HermitianOperator(h_i), 0.4,
                           bath_ground_state(2));
    const auto probe = probe_from_total_model(model, tau);
    const auto op = kraus_from_probe(probe);

    RngStream rng(43, 0);
    const auto rho0 = testgen::random_density(2, rng);
    const Matrix via_ops = nonselective_post_state(op, rho0).matrix();
    const Matrix via_exact = evolve_reduced_exact(model, rho0, tau).matrix();
    REQUIRE(max_abs(via_ops - via_exact) < 1e-10);
}

// test_micro.cpp — exact total-system evolution against closed-form oracles.

#include <catch2/catch_amalgamated.hpp>

#include "oqs/linalg.hpp"
#include "oqs/micro.hpp"
#include "oqs/ops.hpp"

#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace oqs;

namespace {

TotalSystemModel jaynes_cummings_model(double omega0, double alpha) {
    const Matrix h_s = 0.5 * omega0 * pauli_z();
    const Matrix h_b = omega0 * number_op(2);
    const Matrix h_i = kron(sigma_minus(), creation(2)) + kron(sigma_plus(), annihilation(2));
    return TotalSystemModel(HermitianOperator(h_s), HermitianOperator(h_b),
                            HermitianOperator(h_i), alpha, bath_ground_state(2));
}

} // namespace

TEST_CASE("total Hamiltonian assembly", "[micro]") {
    // decoupled: alpha = 0, H_B = 0 gives H_S (x) I_B
    TotalSystemModel decoupled{HermitianOperator(pauli_x()), HermitianOperator(zero_op(3)),
                               HermitianOperator(zero_op(6)), 0.0, bath_ground_state(3)};
    REQUIRE(max_abs(build_total_hamiltonian(decoupled).matrix() -
                    kron(pauli_x(), identity_op(3))) == 0.0);

    // sigma_z + sigma_z: Kronecker-sum oracle gives diag(2,0,0,-2)
    TotalSystemModel zz{HermitianOperator(pauli_z()), HermitianOperator(pauli_z()),
                        HermitianOperator(zero_op(4)), 0.0, bath_ground_state(2)};
    const Matrix h = build_total_hamiltonian(zz).matrix();
    const Matrix expect = oracle::kron_by_index(pauli_z(), identity_op(2)) +
                          oracle::kron_by_index(identity_op(2), pauli_z());
    REQUIRE(max_abs(h - expect) == 0.0);
    Matrix diag = Matrix::Zero(4, 4);
    diag.diagonal() << 2, 0, 0, -2;
    REQUIRE(max_abs(h - diag) == 0.0);

    TotalSystemModel zero{HermitianOperator(zero_op(2)), HermitianOperator(zero_op(2)),
                          HermitianOperator(zero_op(4)), 1.0, bath_ground_state(2)};
    REQUIRE(max_abs(build_total_hamiltonian(zero).matrix()) == 0.0);
}

TEST_CASE("von Neumann right-hand side", "[micro]") {
    RngStream rng(21, 0);
    // commuting H and rho
    const DensityMatrix diag_rho(Matrix(0.5 * identity_op(2)));
    REQUIRE(max_abs(von_neumann_rhs(HermitianOperator(pauli_z()), diag_rho)) < 1e-15);
    REQUIRE(max_abs(von_neumann_rhs(HermitianOperator(zero_op(2)), diag_rho)) == 0.0);

    // |+><+| under sigma_z, against a direct 2x2 commutator oracle
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const DensityMatrix rho = DensityMatrix::pure(StateVector(plus));
    const Matrix lhs = von_neumann_rhs(HermitianOperator(pauli_z()), rho);
    const Matrix comm = pauli_z() * rho.matrix() - rho.matrix() * pauli_z();
    REQUIRE(max_abs(lhs - Complex(0, -1) * comm) == 0.0);

    // traceless; i*(result) is anti-Hermitian, i.e. the result is a valid
    // Hermitian d(rho)/dt
    for (int rep = 0; rep < 5; ++rep) {
        const auto h = HermitianOperator(testgen::random_hermitian(4, rng));
        const auto r = testgen::random_density(4, rng);
        const Matrix out = von_neumann_rhs(h, r);
        REQUIRE(std::abs(out.trace()) < 1e-12);
        REQUIRE(hermiticity_defect(out) < 1e-12);
        const Matrix comm = Complex(0, 1) * out; // recover [H, rho]
        REQUIRE(max_abs(comm + comm.adjoint().eval()) < 1e-12);
    }
}

TEST_CASE("exact evolution trivial limits", "[micro]") {
    RngStream rng(22, 0);
    const auto model = jaynes_cummings_model(1.0, 0.3);
    const DensityMatrix rho0 = testgen::random_density(2, rng);

    REQUIRE(max_abs(evolve_reduced_exact(model, rho0, 0.0).matrix() - rho0.matrix()) < 1e-12);

    // alpha = 0: reduced dynamics is the bare unitary conjugation
    TotalSystemModel free_model(HermitianOperator(0.5 * pauli_z()), HermitianOperator(number_op(2)),
                                HermitianOperator(zero_op(4)), 0.0, bath_ground_state(2));
    const double t = 1.7;
    const Matrix u = matrix_exponential(0.5 * pauli_z(), Complex(0, -t));
    const Matrix expect = u * rho0.matrix() * u.adjoint();
    REQUIRE(max_abs(evolve_reduced_exact(free_model, rho0, t).matrix() - expect) < 1e-12);

    REQUIRE_THROWS_AS(
        evolve_reduced_exact(model, rho0, std::numeric_limits<double>::quiet_NaN()),
        ValidationError);
}

TEST_CASE("resonant Rabi oscillation matches cos^2", "[micro]") {
    const double alpha = 0.3;
    const auto model = jaynes_cummings_model(1.0, alpha);
    const DensityMatrix excited = DensityMatrix::pure(StateVector(basis_vector(2, 0)));
    const HermitianOperator pe(projector(2, 0));
    ExactPropagator prop(model);
    for (double t : {0.0, 0.4, 1.1, 2.5, 5.0, 8.0}) {
        const double pop = expectation(pe, prop.reduced_state(excited, t));
        REQUIRE(pop == Catch::Approx(oracle::rabi_excited_population(alpha, t)).margin(1e-10));
    }
}

TEST_CASE("exact evolution preserves state space and total purity", "[micro]") {
    const auto model = jaynes_cummings_model(1.0, 0.45);
    RngStream rng(23, 0);
    const DensityMatrix rho0 = testgen::random_density(2, rng);
    ExactPropagator prop(model);
    const Matrix total0 = kron(rho0.matrix(), model.rho_b().matrix());
    const double purity0 = purity(total0);
    for (double t : {0.3, 0.9, 2.2, 4.8}) {
        const DensityMatrix rs = prop.reduced_state(rho0, t); // validates trace/psd internally
        REQUIRE(std::abs(rs.matrix().trace().real() - 1.0) < 1e-10);
        REQUIRE(min_eigenvalue(rs.matrix()) > -1e-10);
        REQUIRE(purity(prop.total_state(total0, t)) == Catch::Approx(purity0).margin(1e-10));
    }
}

TEST_CASE("composition holds at the total-system level", "[micro]") {
    const auto model = jaynes_cummings_model(1.0, 0.45);
    RngStream rng(24, 0);
    const DensityMatrix rho0 = testgen::random_density(2, rng);
    ExactPropagator prop(model);
    const Matrix total0 = kron(rho0.matrix(), model.rho_b().matrix());
    const double t1 = 0.8, t2 = 1.9;
    const Matrix one_shot = prop.total_state(total0, t1 + t2);
    const Matrix two_step = prop.total_state(prop.total_state(total0, t1), t2);
    REQUIRE(max_abs(one_shot - two_step) < 1e-10);
}

TEST_CASE("bath state builders", "[micro]") {
    // Gibbs state of a two-level bath: diag(1, e^{-beta w})/Z
    const double w = 1.3, beta = 0.7;
    const auto rho = gibbs_state(HermitianOperator(w * number_op(2)), beta);
    const double z = 1.0 + std::exp(-beta * w);
    REQUIRE(rho.matrix()(0, 0).real() == Catch::Approx(1.0 / z));
    REQUIRE(rho.matrix()(1, 1).real() == Catch::Approx(std::exp(-beta * w) / z));

    const auto bath = multimode_bath({2, 2}, {1.0, 1.5});
    REQUIRE(bath.dim == 4);
    Matrix hb = Matrix::Zero(4, 4);
    hb.diagonal() << 0.0, 1.5, 1.0, 2.5; // n1*w1 + n2*w2 with index (n1*2+n2)
    REQUIRE(max_abs(bath.h_b.matrix() - hb) < 1e-14);
    const Matrix expect_low = oracle::kron_by_index(annihilation(2), identity_op(2)) +
                              oracle::kron_by_index(identity_op(2), annihilation(2));
    REQUIRE(max_abs(bath.lowering_sum - expect_low) == 0.0);
    REQUIRE_THROWS_AS(multimode_bath({2, 2, 2, 2}, {1, 1, 1, 1}), ValidationError);
}

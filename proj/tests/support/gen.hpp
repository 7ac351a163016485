// gen.hpp — Seeded random states, operators and models for property tests.

#pragma once

#include <Eigen/QR>

#include "oqs/lindblad.hpp"
#include "oqs/linalg.hpp"
#include "oqs/qstate.hpp"
#include "oqs/rng.hpp"

namespace testgen {

using oqs::Complex;
using oqs::Index;
using oqs::Matrix;
using oqs::RngStream;
using oqs::Vector;

inline double uniform_sym(RngStream& r) {
    return 2.0 * r.uniform() - 1.0;
}

inline Complex random_complex(RngStream& r) {
    return Complex(uniform_sym(r), uniform_sym(r));
}

inline Matrix random_matrix(Index rows, Index cols, RngStream& r) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = random_complex(r);
    return m;
}

inline Matrix random_hermitian(Index d, RngStream& r, double scale = 1.0) {
    Matrix m = random_matrix(d, d, r);
    return scale * 0.5 * (m + m.adjoint().eval());
}

inline Vector random_state_vector(Index d, RngStream& r) {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = random_complex(r);
    return v / v.norm();
}

inline oqs::StateVector random_state(Index d, RngStream& r) {
    return oqs::StateVector(random_state_vector(d, r));
}

inline oqs::DensityMatrix random_density(Index d, RngStream& r) {
    const Matrix g = random_matrix(d, d, r);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return oqs::DensityMatrix(0.5 * (rho + rho.adjoint().eval()));
}

inline Matrix random_unitary(Index d, RngStream& r) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(d, d, r));
    Matrix q = qr.householderQ();
    return q;
}

inline oqs::LindbladModel random_lindblad(Index d, int n_channels, RngStream& r) {
    std::vector<oqs::DecayChannel> channels;
    for (int i = 0; i < n_channels; ++i)
        channels.push_back({0.1 + r.uniform(), random_matrix(d, d, r)});
    return oqs::LindbladModel(oqs::HermitianOperator(random_hermitian(d, r)),
                              std::move(channels));
}

} // namespace testgen

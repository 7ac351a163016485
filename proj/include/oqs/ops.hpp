// ops.hpp — Named operator builders. Qubit convention: |e> is basis index 0,
// |g> is index 1 (so sigma_z |e> = +|e>). Oscillators use Fock indexing |n> = e_n.

#pragma once

#include <cmath>
#include <string>

#include "oqs/qstate.hpp"

namespace oqs {

inline Matrix identity_op(Index d) {
    if (d <= 0) throw DimensionError("identity: dimension must be positive");
    return Matrix::Identity(d, d);
}

inline Matrix zero_op(Index d) {
    if (d <= 0) throw DimensionError("zero: dimension must be positive");
    return Matrix::Zero(d, d);
}

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1,
         1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1),
         Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0,
         0, -1;
    return m;
}

// |g><e| — lowers the excited state onto the ground state.
inline Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

// |e><g|
inline Matrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

// Truncated ladder operator, <n-1|a|n> = sqrt(n).
inline Matrix annihilation(Index d) {
    if (d <= 0) throw DimensionError("annihilation: dimension must be positive");
    Matrix m = Matrix::Zero(d, d);
    for (Index n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(double(n));
    return m;
}

inline Matrix creation(Index d) {
    return annihilation(d).adjoint();
}

// a^dag a (diagonal 0..d-1)
inline Matrix number_op(Index d) {
    if (d <= 0) throw DimensionError("number: dimension must be positive");
    Matrix m = Matrix::Zero(d, d);
    for (Index n = 0; n < d; ++n) m(n, n) = double(n);
    return m;
}

// |i><i|
inline Matrix projector(Index d, Index i) {
    if (d <= 0 || i < 0 || i >= d)
        throw DimensionError("projector: index " + std::to_string(i) +
                             " out of range for dimension " + std::to_string(d));
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    return m;
}

// |i><j|
inline Matrix ketbra(Index d, Index i, Index j) {
    if (d <= 0 || i < 0 || i >= d || j < 0 || j >= d)
        throw DimensionError("ketbra: indices out of range for dimension " + std::to_string(d));
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

// Basis column vector e_i.
inline Vector basis_vector(Index d, Index i) {
    if (d <= 0 || i < 0 || i >= d)
        throw DimensionError("basis: index " + std::to_string(i) +
                             " out of range for dimension " + std::to_string(d));
    Vector v = Vector::Zero(d);
    v(i) = 1.0;
    return v;
}

} // namespace oqs

#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "bellmax/bell_expr.hpp"
#include "bellmax/party.hpp"

namespace bellmax {

using Complex = std::complex<double>;
/// Dense complex matrix; Hermitian by convention wherever the name
/// HermitianMatrix is used (Bell operators, density matrices).
using CMatrix = Eigen::MatrixXcd;
using HermitianMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kUnitTolerance = 1e-12;

/// A +-1-valued projective qubit measurement: +I, -I, or n.sigma for a unit
/// Bloch vector n.
class Observable {
public:
    enum class Kind { PlusIdentity, MinusIdentity, Bloch };

    static Observable plus_identity() { return Observable(Kind::PlusIdentity, Eigen::Vector3d::Zero()); }
    static Observable minus_identity() { return Observable(Kind::MinusIdentity, Eigen::Vector3d::Zero()); }
    /// Throws std::invalid_argument unless |n| = 1 within 1e-12.
    static Observable bloch(const Eigen::Vector3d& n);
    /// Rescales a nonzero vector to unit length.
    static Observable bloch_normalized(const Eigen::Vector3d& n);
    static Observable pauli_x() { return bloch({1.0, 0.0, 0.0}); }
    static Observable pauli_y() { return bloch({0.0, 1.0, 0.0}); }
    static Observable pauli_z() { return bloch({0.0, 0.0, 1.0}); }

    Kind kind() const noexcept { return kind_; }
    bool is_identity() const noexcept { return kind_ != Kind::Bloch; }
    /// Zero vector for the identity variants.
    const Eigen::Vector3d& bloch_vector() const noexcept { return n_; }
    /// Coefficients of the observable on (I, sigma_x, sigma_y, sigma_z).
    Eigen::Vector4d pauli_coefficients() const;
    std::string to_string() const;

    friend bool operator==(const Observable& a, const Observable& b) {
        return a.kind_ == b.kind_ && a.n_ == b.n_;
    }

private:
    Observable(Kind k, Eigen::Vector3d n) : kind_(k), n_(std::move(n)) {}
    Kind kind_;
    Eigen::Vector3d n_;
};

/// Observables in the order A, a, B, b, C, c.
using Measurements = std::array<Observable, 6>;

inline const Observable& observable_for(const Measurements& m, Party p, int setting) {
    return m[static_cast<std::size_t>(2 * index_of(p) + setting - 1)];
}

/// Three-qubit pure state; amplitude k belongs to |k2 k1 k0>, party A being
/// the most significant bit.
class PureState {
public:
    /// Throws std::invalid_argument unless the norm is 1 within 1e-12.
    static PureState from_amplitudes(const CVector& amplitudes);
    /// Rescales a nonzero vector to unit norm.
    static PureState normalized(const CVector& amplitudes);
    static PureState basis(unsigned index);

    const CVector& amplitudes() const noexcept { return amps_; }
    Complex operator[](std::size_t k) const { return amps_(static_cast<Eigen::Index>(k)); }

private:
    explicit PureState(CVector a) : amps_(std::move(a)) {}
    CVector amps_;
};

Eigen::Matrix2cd pauli(int k);  // 0 = I, 1 = x, 2 = y, 3 = z
Eigen::Matrix2cd observable_matrix(const Observable& obs);

/// sum_t coeff(t) O_A(t) (x) O_B(t) (x) O_C(t), identity in unmeasured slots.
HermitianMatrix bell_operator(const BellExpression& expr, const Measurements& meas);

/// <psi|H|psi>; the imaginary part is dropped once it is below 1e-10.
double expectation(const PureState& state, const HermitianMatrix& h);
double expectation(const CVector& psi, const HermitianMatrix& h);

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    CMatrix vectors;         // columns
    int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
EigenSystem hermitian_eigen(const CMatrix& h, double tolerance = 1e-13);

struct Eigenpair {
    double value = 0.0;
    CVector vector;
};

/// Largest eigenvalue and a unit eigenvector. Within a degenerate top
/// eigenspace the returned vector is the normalized projection of the
/// lowest-index basis vector that has weight in it; the phase makes the
/// largest-magnitude amplitude (lowest index on ties) real positive.
Eigenpair max_eigenpair(const HermitianMatrix& h);

HermitianMatrix density_matrix(const CVector& psi);

/// Two-qubit state of the kept parties (keep_first < keep_second after
/// ordering), basis |k_first k_second>.
HermitianMatrix reduced_density(const PureState& state, Party keep_first, Party keep_second);

/// Partial transpose of a 2^n x 2^n matrix on qubit `subsystem` (0 is the
/// most significant qubit): <i_I, j|rho^T|k_I, l> = <k_I, j|rho|i_I, l>.
HermitianMatrix partial_transpose(const HermitianMatrix& rho, int subsystem);

bool is_hermitian(const CMatrix& m, double tolerance);

/// Expectation values <psi| s_a (x) s_b (x) s_c |psi> for a, b, c in
/// {I, x, y, z}, index 16a + 4b + c.
using PauliTensor = std::array<double, 64>;
PauliTensor correlation_tensor(const CVector& psi);
/// Pauli-basis coefficients of bell_operator(expr, meas).
PauliTensor bell_pauli_weights(const BellExpression& expr, const Measurements& meas);
/// Operator sum_{abc} w_abc s_a (x) s_b (x) s_c.
HermitianMatrix pauli_operator(const PauliTensor& weights);

}  // namespace bellmax

#pragma once

// Independent reference computations used only by the tests.

#include <array>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "bellmax/bell_expr.hpp"
#include "bellmax/qcore.hpp"

namespace oracle {

using bellmax::Complex;
using bellmax::CMatrix;
using bellmax::CVector;

// Plain Kronecker product, no shortcuts.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline Eigen::Matrix2cd obs_matrix(const bellmax::Observable& o) {
    using K = bellmax::Observable::Kind;
    if (o.kind() == K::PlusIdentity) return Eigen::Matrix2cd::Identity();
    if (o.kind() == K::MinusIdentity) return -Eigen::Matrix2cd::Identity();
    const Eigen::Vector3d& n = o.bloch_vector();
    Eigen::Matrix2cd m;
    m << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
    return m;
}

inline CMatrix bell_operator(const bellmax::BellExpression& e, const bellmax::Measurements& m) {
    CMatrix h = CMatrix::Zero(8, 8);
    for (const auto& [t, c] : e.terms()) {
        CMatrix f[3];
        for (int p = 0; p < 3; ++p) {
            f[p] = t[p] == 0 ? CMatrix(Eigen::Matrix2cd::Identity()) : CMatrix(obs_matrix(m[2 * p + t[p] - 1]));
        }
        h += static_cast<double>(c) * kron(kron(f[0], f[1]), f[2]);
    }
    return h;
}

// <psi|H|psi> by a double loop.
inline Complex quadratic_form(const CVector& psi, const CMatrix& h) {
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        for (Eigen::Index j = 0; j < psi.size(); ++j) s += std::conj(psi(i)) * h(i, j) * psi(j);
    return s;
}

// Local bound by direct enumeration of the 64 sign assignments.
inline std::int64_t local_bound(const bellmax::BellExpression& e) {
    std::int64_t best = INT64_MIN;
    for (int k = 0; k < 64; ++k) {
        std::int64_t v = 0;
        for (const auto& [t, c] : e.terms()) {
            int prod = 1;
            for (int p = 0; p < 3; ++p)
                if (t[p] != 0 && ((k >> (2 * p + t[p] - 1)) & 1)) prod = -prod;
            v += c * prod;
        }
        best = std::max(best, v);
    }
    return best;
}

inline CVector random_state(std::mt19937_64& rng, int dim = 8) {
    std::normal_distribution<double> g;
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> g;
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
    return (m + m.adjoint()) / 2.0;
}

inline Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(Eigen::Matrix2cd(random_hermitian(rng, 2) + Complex(0, 1) * random_hermitian(rng, 2)));
    return qr.householderQ();
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Vector3d v(g(rng), g(rng), g(rng));
    return v.normalized();
}

inline bellmax::BellExpression random_expression(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coeff(-9, 9), count(1, 12), slot(0, 2);
    bellmax::BellExpression e;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
        bellmax::TermIndex t{slot(rng), slot(rng), slot(rng)};
        if (t == bellmax::TermIndex{0, 0, 0}) t[0] = 1;
        e.add(t, coeff(rng));
    }
    return e;
}

inline CVector ghz() {
    CVector v = CVector::Zero(8);
    v(0) = v(7) = 1.0 / std::sqrt(2.0);
    return v;
}

inline CVector w_state() {
    CVector v = CVector::Zero(8);
    v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
    return v;
}

}  // namespace oracle

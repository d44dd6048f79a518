#include "bellmax/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bellmax {

Observable Observable::bloch(const Eigen::Vector3d& n) {
    if (std::abs(n.norm() - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("Bloch vector must have unit length");
    }
    return Observable(Kind::Bloch, n);
}

Observable Observable::bloch_normalized(const Eigen::Vector3d& n) {
    const double len = n.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("Bloch vector must be nonzero");
    return Observable(Kind::Bloch, n / len);
}

Eigen::Vector4d Observable::pauli_coefficients() const {
    switch (kind_) {
        case Kind::PlusIdentity: return {1.0, 0.0, 0.0, 0.0};
        case Kind::MinusIdentity: return {-1.0, 0.0, 0.0, 0.0};
        case Kind::Bloch: break;
    }
    return {0.0, n_.x(), n_.y(), n_.z()};
}

std::string Observable::to_string() const {
    switch (kind_) {
        case Kind::PlusIdentity: return "+1";
        case Kind::MinusIdentity: return "-1";
        case Kind::Bloch: break;
    }
    std::ostringstream os;
    os.precision(10);
    os << "(" << n_.x() << ", " << n_.y() << ", " << n_.z() << ")";
    return os.str();
}

PureState PureState::from_amplitudes(const CVector& amplitudes) {
    if (amplitudes.size() != 8) throw std::invalid_argument("a three-qubit state needs 8 amplitudes");
    if (std::abs(amplitudes.norm() - 1.0) > kUnitTolerance) throw std::invalid_argument("state must have unit norm");
    return PureState(amplitudes);
}

PureState PureState::normalized(const CVector& amplitudes) {
    if (amplitudes.size() != 8) throw std::invalid_argument("a three-qubit state needs 8 amplitudes");
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("state vector must be nonzero");
    return PureState(amplitudes / n);
}

PureState PureState::basis(unsigned index) {
    if (index >= 8) throw std::out_of_range("basis index must be below 8");
    CVector v = CVector::Zero(8);
    v(index) = 1.0;
    return PureState(v);
}

Eigen::Matrix2cd pauli(int k) {
    using namespace std::complex_literals;
    Eigen::Matrix2cd m;
    switch (k) {
        case 0: m << 1.0, 0.0, 0.0, 1.0; break;
        case 1: m << 0.0, 1.0, 1.0, 0.0; break;
        case 2: m << 0.0, -1.0i, 1.0i, 0.0; break;
        case 3: m << 1.0, 0.0, 0.0, -1.0; break;
        default: throw std::out_of_range("Pauli index must be 0..3");
    }
    return m;
}

Eigen::Matrix2cd observable_matrix(const Observable& obs) {
    const Eigen::Vector4d c = obs.pauli_coefficients();
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int k = 0; k < 4; ++k) {
        if (c(k) != 0.0) m += c(k) * pauli(k);
    }
    return m;
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

int qubit_count(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw std::invalid_argument("dimension must be a power of two");
    return n;
}

double matrix_scale(const CMatrix& h) { return std::max(1.0, h.norm()); }

// Action of a single Pauli on basis bit x: returns (new bit, phase).
inline std::pair<unsigned, Complex> pauli_on_bit(int a, unsigned x) {
    switch (a) {
        case 0: return {x, 1.0};
        case 1: return {x ^ 1u, 1.0};
        case 2: return {x ^ 1u, x ? Complex(0.0, -1.0) : Complex(0.0, 1.0)};
        default: return {x, x ? -1.0 : 1.0};
    }
}

}  // namespace

HermitianMatrix bell_operator(const BellExpression& expr, const Measurements& meas) {
    HermitianMatrix h = HermitianMatrix::Zero(8, 8);
    const CMatrix id = CMatrix::Identity(2, 2);
    for (const auto& [term, c] : expr.terms()) {
        std::array<CMatrix, 3> ops;
        for (Party p : kParties) {
            const int t = term[static_cast<std::size_t>(index_of(p))];
            ops[static_cast<std::size_t>(index_of(p))] = t == 0 ? id : CMatrix(observable_matrix(observable_for(meas, p, t)));
        }
        h += static_cast<double>(c) * kron(kron(ops[0], ops[1]), ops[2]);
    }
    return h;
}

double expectation(const CVector& psi, const HermitianMatrix& h) {
    if (h.rows() != psi.size() || h.cols() != psi.size()) {
        throw std::invalid_argument("state and operator dimensions differ");
    }
    const Complex v = psi.dot(h * psi);
    if (std::abs(v.imag()) >= 1e-10 * matrix_scale(h)) {
        throw std::invalid_argument("expectation has a non-negligible imaginary part; operator is not Hermitian");
    }
    return v.real();
}

double expectation(const PureState& state, const HermitianMatrix& h) { return expectation(state.amplitudes(), h); }

bool is_hermitian(const CMatrix& m, double tolerance) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

EigenSystem hermitian_eigen(const CMatrix& h, double tolerance) {
    if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("matrix must be square and nonempty");
    if (!is_hermitian(h, 1e-12 * matrix_scale(h))) throw std::invalid_argument("matrix is not Hermitian");
    const Eigen::Index n = h.rows();
    CMatrix a = 0.5 * (h + h.adjoint());
    CMatrix v = CMatrix::Identity(n, n);
    const double threshold = tolerance * matrix_scale(h);

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    int sweep = 0;
    for (; sweep < 100 && off_norm() > threshold; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag == 0.0) continue;
                const Complex phase = a(p, q) / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // V restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                const Complex vpp = c;
                const Complex vpq = s;
                const Complex vqp = -s * std::conj(phase);
                const Complex vqq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * vpp + akq * vqp;
                    a(k, q) = akp * vpq + akq * vqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
                    a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * vpp + vkq * vqp;
                    v(k, q) = vkp * vpq + vkq * vqq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
    EigenSystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    out.sweeps = sweep;
    return out;
}

namespace {

void fix_phase(CVector& v) {
    const double largest = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v(k)) >= largest - 1e-12) {
            v *= std::conj(v(k)) / std::abs(v(k));
            v(k) = std::abs(v(k));
            return;
        }
    }
}

}  // namespace

Eigenpair max_eigenpair(const HermitianMatrix& h) {
    const EigenSystem es = hermitian_eigen(h);
    const Eigen::Index n = h.rows();
    const double top = es.values(n - 1);
    const double gap_tol = 1e-12 * matrix_scale(h);
    Eigen::Index first = n - 1;
    while (first > 0 && es.values(first - 1) >= top - gap_tol) --first;

    Eigenpair out;
    out.value = top;
    if (first == n - 1) {
        out.vector = es.vectors.col(n - 1);
    } else {
        const CMatrix basis = es.vectors.rightCols(n - first);
        for (Eigen::Index k = 0; k < n; ++k) {
            CVector proj = basis * basis.row(k).adjoint();
            if (proj.norm() > 1e-6) {
                out.vector = proj / proj.norm();
                break;
            }
        }
    }
    fix_phase(out.vector);
    return out;
}

HermitianMatrix density_matrix(const CVector& psi) { return psi * psi.adjoint(); }

HermitianMatrix reduced_density(const PureState& state, Party keep_first, Party keep_second) {
    int p = index_of(keep_first);
    int q = index_of(keep_second);
    if (p == q) throw std::invalid_argument("reduced_density needs two distinct parties");
    if (p > q) std::swap(p, q);
    const int traced = 3 - p - q;
    auto bit = [](unsigned k, int party) { return (k >> (2 - party)) & 1u; };
    HermitianMatrix rho = HermitianMatrix::Zero(4, 4);
    const CVector& psi = state.amplitudes();
    for (unsigned i = 0; i < 8; ++i) {
        for (unsigned j = 0; j < 8; ++j) {
            if (bit(i, traced) != bit(j, traced)) continue;
            const unsigned r = 2 * bit(i, p) + bit(i, q);
            const unsigned c = 2 * bit(j, p) + bit(j, q);
            rho(r, c) += psi(i) * std::conj(psi(j));
        }
    }
    return rho;
}

HermitianMatrix partial_transpose(const HermitianMatrix& rho, int subsystem) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("partial transpose needs a square matrix");
    const int n = qubit_count(rho.rows());
    if (subsystem < 0 || subsystem >= n) throw std::out_of_range("partial transpose subsystem out of range");
    const unsigned mask = 1u << (n - 1 - subsystem);
    HermitianMatrix out(rho.rows(), rho.cols());
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            const auto ur = static_cast<unsigned>(r);
            const auto uc = static_cast<unsigned>(c);
            const unsigned r2 = (ur & ~mask) | (uc & mask);
            const unsigned c2 = (uc & ~mask) | (ur & mask);
            out(r, c) = rho(r2, c2);
        }
    }
    return out;
}

PauliTensor correlation_tensor(const CVector& psi) {
    if (psi.size() != 8) throw std::invalid_argument("correlation tensor needs a three-qubit vector");
    PauliTensor t{};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            for (int c = 0; c < 4; ++c) {
                Complex acc = 0.0;
                for (unsigned k = 0; k < 8; ++k) {
                    const auto [x, px] = pauli_on_bit(a, (k >> 2) & 1u);
                    const auto [y, py] = pauli_on_bit(b, (k >> 1) & 1u);
                    const auto [z, pz] = pauli_on_bit(c, k & 1u);
                    const unsigned k2 = (x << 2) | (y << 1) | z;
                    acc += std::conj(psi(k2)) * px * py * pz * psi(k);
                }
                t[static_cast<std::size_t>(16 * a + 4 * b + c)] = acc.real();
            }
        }
    }
    return t;
}

PauliTensor bell_pauli_weights(const BellExpression& expr, const Measurements& meas) {
    PauliTensor w{};
    const Eigen::Vector4d id(1.0, 0.0, 0.0, 0.0);
    for (const auto& [term, coeff] : expr.terms()) {
        std::array<Eigen::Vector4d, 3> v;
        for (Party p : kParties) {
            const int t = term[static_cast<std::size_t>(index_of(p))];
            v[static_cast<std::size_t>(index_of(p))] = t == 0 ? id : observable_for(meas, p, t).pauli_coefficients();
        }
        for (int a = 0; a < 4; ++a) {
            if (v[0](a) == 0.0) continue;
            for (int b = 0; b < 4; ++b) {
                if (v[1](b) == 0.0) continue;
                for (int c = 0; c < 4; ++c) {
                    w[static_cast<std::size_t>(16 * a + 4 * b + c)] += static_cast<double>(coeff) * v[0](a) * v[1](b) * v[2](c);
                }
            }
        }
    }
    return w;
}

HermitianMatrix pauli_operator(const PauliTensor& weights) {
    HermitianMatrix h = HermitianMatrix::Zero(8, 8);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            for (int c = 0; c < 4; ++c) {
                const double w = weights[static_cast<std::size_t>(16 * a + 4 * b + c)];
                if (w == 0.0) continue;
                for (unsigned k = 0; k < 8; ++k) {
                    const auto [x, px] = pauli_on_bit(a, (k >> 2) & 1u);
                    const auto [y, py] = pauli_on_bit(b, (k >> 1) & 1u);
                    const auto [z, pz] = pauli_on_bit(c, k & 1u);
                    h((x << 2) | (y << 1) | z, k) += w * px * py * pz;
                }
            }
        }
    }
    return h;
}

}  // namespace bellmax

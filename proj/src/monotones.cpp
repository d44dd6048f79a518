#include "bellmax/monotones.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace bellmax {

namespace {

constexpr double kStateTolerance = 1e-8;
// Eigenvalues of a partial transpose above this are rounding noise, not
// negativity.
constexpr double kNegativeCutoff = -1e-13;
// Eigenvalues of a density matrix at or below this are treated as zero.
constexpr double kRankCutoff = 1e-14;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0) + 0.0; }  // + 0.0 drops a negative zero

Eigen::Matrix4cd sigma_y_sigma_y() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
}

struct Tests {
    double tol;
    double maximal_tol;
    bool zero(double v) const { return std::abs(v) <= tol; }
    bool one(double v) const { return std::abs(v - 1.0) <= tol; }
    bool maximal(double v) const { return std::abs(v - 1.0) <= maximal_tol; }
    bool equal(double a, double b) const { return std::abs(a - b) <= tol; }
};

void check_tolerance(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("classification tolerance must be positive");
}

}  // namespace

double concurrence(const HermitianMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("concurrence needs a 4x4 density matrix");
    if (!is_hermitian(rho, kStateTolerance)) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kStateTolerance) {
        throw std::invalid_argument("density matrix trace differs from 1");
    }
    const EigenSystem es = hermitian_eigen(rho);
    if (es.values(0) < -kStateTolerance) throw std::invalid_argument("density matrix is not positive semidefinite");
    // With rho = Psi Psi^dagger the lambdas are the singular values of
    // Psi^T (sy x sy) Psi. Building Psi from the spectrum avoids square roots
    // of eigenvalues that are zero up to rounding; those are dropped.
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = 0; k < 4; ++k)
        if (es.values(k) > kRankCutoff) kept.push_back(k);
    if (kept.empty()) return 0.0;
    CMatrix psi(4, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        psi.col(static_cast<Eigen::Index>(j)) = std::sqrt(es.values(kept[j])) * es.vectors.col(kept[j]);
    }
    const CMatrix tau = psi.transpose() * sigma_y_sigma_y() * psi;
    const Eigen::VectorXd lam = Eigen::JacobiSVD<CMatrix>(tau).singularValues();  // decreasing
    return clamp01(lam(0) - (lam.sum() - lam(0)));
}

double bipartite_negativity(const PureState& state, Party party) {
    const HermitianMatrix pt = partial_transpose(density_matrix(state.amplitudes()), index_of(party));
    const EigenSystem es = hermitian_eigen(pt);
    double neg = 0.0;
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        if (es.values(k) < kNegativeCutoff) neg += es.values(k);
    }
    return clamp01(-2.0 * neg);
}

double tripartite_negativity(const PureState& state) {
    const double p = bipartite_negativity(state, Party::A) * bipartite_negativity(state, Party::B) *
                     bipartite_negativity(state, Party::C);
    return clamp01(std::cbrt(p));
}

double incompatibility(const Observable& first, const Observable& second) {
    if (first.is_identity() || second.is_identity()) return 0.0;
    const double sin_phi = std::min(1.0, first.bloch_vector().cross(second.bloch_vector()).norm());
    return clamp01((2.0 + std::numbers::sqrt2) * (1.0 - 1.0 / std::sqrt(1.0 + sin_phi)));
}

// Any ordering of the three concurrences is realised by some relabelling of
// the parties, so matching the sorted triple covers all six permutations.
int classify_entanglement(double n_abc, double c_ab, double c_ac, double c_bc, double tol) {
    check_tolerance(tol);
    const Tests t{tol, tol};
    std::array<double, 3> c{c_ab, c_ac, c_bc};
    std::sort(c.begin(), c.end(), std::greater<>());
    const auto nonzero = static_cast<int>(std::count_if(c.begin(), c.end(), [&](double v) { return !t.zero(v); }));

    if (t.zero(n_abc)) {
        if (nonzero == 0) return 0;
        if (nonzero == 1) return t.one(c[0]) ? 2 : 1;
        throw ClassificationError("no entanglement class: N_ABC = 0 with " + std::to_string(nonzero) +
                                  " nonzero concurrences");
    }
    const double w_n = 2.0 * std::numbers::sqrt2 / 3.0;
    if (std::abs(n_abc - w_n) <= tol &&
        std::all_of(c.begin(), c.end(), [&](double v) { return std::abs(v - 2.0 / 3.0) <= tol; })) {
        return 6;
    }
    switch (nonzero) {
        case 0:
            return t.one(n_abc) ? 11 : 10;
        case 1:
            return 9;
        case 2:
            return t.equal(c[0], c[1]) ? 8 : 7;
        default:
            break;
    }
    if (t.equal(c[0], c[1]) && t.equal(c[1], c[2])) return 5;
    if (t.equal(c[0], c[1]) || t.equal(c[1], c[2])) return 4;
    return 3;
}

int classify_incompatibility_values(double i_a, double i_b, double i_c, double tol, double maximal_tol) {
    check_tolerance(tol);
    check_tolerance(maximal_tol);
    const Tests t{tol, maximal_tol};
    std::array<double, 3> v{i_a, i_b, i_c};
    std::sort(v.begin(), v.end(), std::greater<>());
    const auto [a, b, c] = v;

    if (t.zero(a)) return 0;
    if (t.zero(c)) {
        if (t.zero(b)) throw ClassificationError("no incompatibility class: only one party is incompatible");
        if (t.maximal(a)) return t.maximal(b) ? 4 : 3;
        return t.equal(a, b) ? 2 : 1;
    }
    if (t.maximal(a)) {
        if (t.maximal(b)) return t.maximal(c) ? 11 : 10;
        return t.equal(b, c) ? 9 : 8;
    }
    if (t.equal(a, b) && t.equal(b, c)) return 7;
    if (t.equal(a, b) || t.equal(b, c)) return 6;
    return 5;
}

EntanglementProfile entanglement_profile(const PureState& state, double tol) {
    EntanglementProfile p;
    p.n_abc = tripartite_negativity(state);
    p.c_ab = concurrence(reduced_density(state, Party::A, Party::B));
    p.c_ac = concurrence(reduced_density(state, Party::A, Party::C));
    p.c_bc = concurrence(reduced_density(state, Party::B, Party::C));
    p.class_id = classify_entanglement(p.n_abc, p.c_ab, p.c_ac, p.c_bc, tol);
    return p;
}

IncompatibilityProfile classify_incompatibility(const Measurements& meas, double tol, double maximal_tol) {
    IncompatibilityProfile p;
    p.i_a = incompatibility(meas[0], meas[1]);
    p.i_b = incompatibility(meas[2], meas[3]);
    p.i_c = incompatibility(meas[4], meas[5]);
    p.class_id = classify_incompatibility_values(p.i_a, p.i_b, p.i_c, tol, maximal_tol);
    return p;
}

NonlocalityClass nonlocality_class(int expr_id, const Solution& solution, double tol, double maximal_tol) {
    if (expr_id < 1 || expr_id > 46) throw std::out_of_range("inequality id must be in 1..46");
    return {entanglement_profile(solution.state, tol).class_id,
            classify_incompatibility(solution.measurements, tol, maximal_tol).class_id};
}

std::string entanglement_class_name(int class_id) {
    static const std::array<const char*, 12> names{
        "none",          "2-qubit nonmaximal", "2-qubit maximal", "W-like, three distinct concurrences",
        "W-like, two equal concurrences", "W-like, three equal concurrences", "W",
        "star, two distinct concurrences", "star, two equal concurrences", "2-1 subtype",
        "GHZ-like",      "GHZ"};
    if (class_id < 0 || class_id > 11) throw std::out_of_range("entanglement class must be in 0..11");
    return names[static_cast<std::size_t>(class_id)];
}

std::string incompatibility_class_name(int class_id) {
    static const std::array<const char*, 12> names{
        "none",           "2-party nm, nm distinct", "2-party nm, nm equal", "2-party m, nm", "2-party m, m",
        "3-party nm, all distinct", "3-party nm, two equal", "3-party nm, all equal", "3-party m, nm distinct",
        "3-party m, nm equal",      "3-party m, m, nm",      "3-party m, m, m"};
    if (class_id < 0 || class_id > 11) throw std::out_of_range("incompatibility class must be in 0..11");
    return names[static_cast<std::size_t>(class_id)];
}

}  // namespace bellmax

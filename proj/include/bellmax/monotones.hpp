#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "bellmax/qcore.hpp"
#include "bellmax/seesaw.hpp"

namespace bellmax {

class ClassificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultClassTolerance = 1e-4;
/// Tolerance for "maximally incompatible" (I = 1). Tighter than the
/// equality tolerance: optimal measurements reach I = 0.99996 without being
/// maximal.
inline constexpr double kDefaultMaximalTolerance = 1e-5;

/// Wootters concurrence of a two-qubit density matrix.
double concurrence(const HermitianMatrix& rho);

/// -2 x (sum of negative eigenvalues) of |psi><psi| transposed on `party`.
double bipartite_negativity(const PureState& state, Party party);

/// Geometric mean of the three one-versus-two negativities.
double tripartite_negativity(const PureState& state);

/// Incompatibility of two +-1 qubit observables from the angle phi between
/// their Bloch vectors: (2 + sqrt 2)[1 - (1 + sin phi)^(-1/2)]. Identity
/// observables are compatible with everything.
double incompatibility(const Observable& first, const Observable& second);

struct EntanglementProfile {
    double n_abc = 0.0;
    double c_ab = 0.0;
    double c_ac = 0.0;
    double c_bc = 0.0;
    int class_id = 0;
};

struct IncompatibilityProfile {
    double i_a = 0.0;
    double i_b = 0.0;
    double i_c = 0.0;
    int class_id = 0;
};

struct NonlocalityClass {
    int entanglement_class = 0;
    int incompatibility_class = 0;

    friend bool operator==(const NonlocalityClass&, const NonlocalityClass&) = default;
};

/// Entanglement class 0..11 from (N_ABC, C_AB, C_AC, C_BC), matched up to a
/// permutation of the parties. Throws ClassificationError when no class fits.
int classify_entanglement(double n_abc, double c_ab, double c_ac, double c_bc, double tol = kDefaultClassTolerance);

/// Incompatibility class 0..11 from the three per-party values, matched up to
/// a permutation of the parties.
int classify_incompatibility_values(double i_a, double i_b, double i_c, double tol = kDefaultClassTolerance,
                                    double maximal_tol = kDefaultMaximalTolerance);

EntanglementProfile entanglement_profile(const PureState& state, double tol = kDefaultClassTolerance);

IncompatibilityProfile classify_incompatibility(const Measurements& meas, double tol = kDefaultClassTolerance,
                                                double maximal_tol = kDefaultMaximalTolerance);

NonlocalityClass nonlocality_class(int expr_id, const Solution& solution, double tol = kDefaultClassTolerance,
                                   double maximal_tol = kDefaultMaximalTolerance);

std::string entanglement_class_name(int class_id);
std::string incompatibility_class_name(int class_id);

}  // namespace bellmax

#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellmax/monotones.hpp"
#include "bellmax/qcore.hpp"
#include "bellmax/seesaw.hpp"

namespace bellmax {

class FixtureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MaximumKind { ClosedForm, Decimal };

struct ExpectedMaximum {
    double value = 0.0;
    MaximumKind kind = MaximumKind::Decimal;
    std::string text;  // as stored
};

/// Printed monotone values and class columns for one inequality.
struct ExpectedProfile {
    double n_abc = 0.0;
    double c_ab = 0.0;
    double c_ac = 0.0;
    double c_bc = 0.0;
    int entanglement_class = 0;
    double i_a = 0.0;
    double i_b = 0.0;
    double i_c = 0.0;
    int incompatibility_class = 0;
};

struct ExpectedValues {
    ExpectedMaximum maximum;
    ExpectedProfile profile;
    /// Cell of the (entanglement, incompatibility) classification grid that
    /// lists the id; the grid does not list every id.
    std::optional<NonlocalityClass> class_pair;
    /// Almost-quantum value, recorded only where it exceeds the maximum.
    std::optional<double> almost_quantum;
};

struct FixtureRecord {
    int id = 0;
    ExpectedMaximum maximum;
    std::string state_spec;  // "none" when no state is needed
    std::array<std::string, 6> measurement_spec;
    ExpectedProfile profile;
    std::optional<NonlocalityClass> class_pair;
    std::optional<double> almost_quantum;
};

/// All 46 records from the embedded asset, ordered by id.
const std::vector<FixtureRecord>& fixture_records();
const FixtureRecord& fixture_record(int id);

/// Nullopt for the rows that need no state.
std::optional<PureState> build_fixture_state(int id);
Measurements build_fixture_measurements(int id);
ExpectedValues expected_values(int id);

/// Fixture state (|000> where none is needed) with its measurements, valued
/// on the catalog expression.
Solution fixture_solution(int id);

using Environment = std::map<std::string, Complex, std::less<>>;

/// Complex arithmetic expression: numbers, i, pi, names from `env`, + - * / ^
/// (principal branch), sqrt, asin, acsc.
Complex evaluate_expression(std::string_view text, const Environment& env = {});

/// Sum of coefficient-ket terms with optional "R_P(angle) ...:" prefix, e.g.
/// "R_A(pi/8): 1/sqrt(2) |00>_AB + 1/sqrt(2) |11>_AB". `kets` maps two-char
/// names to single-qubit states. The result is not normalized.
CVector parse_state_spec(std::string_view text, const Environment& env,
                         const std::map<std::string, std::array<Complex, 2>, std::less<>>& kets);

/// "1", "-1", "z", or a real combination such as "0.6 x - 0.8 z". Bloch
/// vectors are renormalized; a norm off by more than 1e-3 is an error.
Observable parse_measurement_spec(std::string_view text, const Environment& env);

}  // namespace bellmax

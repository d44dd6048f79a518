#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellmax/party.hpp"

namespace bellmax {

/// Setting chosen by one party inside a correlator: 0 = no measurement
/// (identity slot), 1 = first setting (A/B/C), 2 = second setting (a/b/c).
using TermIndex = std::array<int, 3>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Integer linear combination of the 27 correlators <X Y Z> of the
/// three-party, two-setting, two-outcome scenario.
class BellExpression {
public:
    BellExpression() = default;

    std::int64_t coefficient(const TermIndex& term) const;
    void add(const TermIndex& term, std::int64_t value);
    /// Nonzero coefficients only, keyed in lexicographic term order.
    const std::map<TermIndex, std::int64_t>& terms() const noexcept { return coeffs_; }
    bool empty() const noexcept { return coeffs_.empty(); }
    std::int64_t l1_norm() const;
    bool involves(Party party) const;

    std::optional<int> id;

    BellExpression& operator+=(const BellExpression& other);
    friend BellExpression operator+(BellExpression lhs, const BellExpression& rhs) { return lhs += rhs; }
    friend bool operator==(const BellExpression& a, const BellExpression& b) { return a.coeffs_ == b.coeffs_; }

private:
    std::map<TermIndex, std::int64_t> coeffs_;
};

/// One +-1 output for each of the six measurements, ordered A, a, B, b, C, c.
struct DeterministicStrategy {
    std::array<int, 6> outputs{1, 1, 1, 1, 1, 1};

    int output(Party party, int setting) const {
        return outputs[static_cast<std::size_t>(2 * index_of(party) + setting - 1)];
    }
    /// Strategy number k in 0..63; bit j set means measurement j outputs -1.
    static DeterministicStrategy from_index(unsigned k);
    std::string to_string() const;
};

struct LocalBound {
    std::int64_t value = 0;
    DeterministicStrategy strategy;
};

/// Parses the surface syntax of the catalog, e.g. "2 AB + 2 ab + ABC - abc".
BellExpression parse_expression(std::string_view text);
std::string format_expression(const BellExpression& expr);
/// Word for a term ("ABc", "aC", ...); empty string for the constant term.
std::string term_word(const TermIndex& term);

std::int64_t deterministic_value(const BellExpression& expr, const DeterministicStrategy& strategy);
/// Exact maximum over the 64 deterministic strategies; ties keep the lowest strategy index.
LocalBound local_bound(const BellExpression& expr);

/// Replaces the party's first and second observables by sign_first and
/// sign_second times the identity; like terms merge.
BellExpression substitute_identity(const BellExpression& expr, Party party, int sign_first, int sign_second);

struct CatalogEntry {
    int id = 0;
    BellExpression expression;
    std::int64_t local_maximum = 0;
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The 46 tight inequalities, ids 1..46. Throws CatalogError when the
/// embedded asset does not match its checksum.
const std::vector<CatalogEntry>& load_catalog();
const CatalogEntry& catalog_entry(int id);

/// Parses catalog text (records `id;local_maximum;expression`, `#` comments)
/// and verifies it against the expected FNV-1a checksum.
std::vector<CatalogEntry> parse_catalog(std::string_view text, std::uint64_t expected_checksum);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace bellmax

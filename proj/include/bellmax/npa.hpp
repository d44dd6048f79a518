#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bellmax/bell_expr.hpp"
#include "bellmax/party.hpp"

namespace bellmax {

/// Projector onto the +1 outcome of one party's setting (1 or 2).
struct Symbol {
    Party party = Party::A;
    int setting = 1;

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// Product of projectors, left to right; empty is the identity.
using Word = std::vector<Symbol>;

enum class NpaLevel { Q1, OnePlusAB, AlmostQuantum, Q2 };

std::string to_string(NpaLevel level);
/// Accepts "Q1", "1+AB" (or "1AB"), "AQ", "Q2", case-insensitive.
NpaLevel parse_npa_level(std::string_view text);

class NpaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stable sort by party, then collapse adjacent repeats.
Word canonicalize_word(const Word& w);

/// Key of the moment <w>: words related by reversal share a key.
Word moment_key(const Word& w);

std::string word_to_string(const Word& w);

std::vector<Word> generate_words(NpaLevel level);

/// Moment expansion of a correlator with every +-1 observable written as
/// 2 Pi - 1.
struct MomentForm {
    std::map<Word, double> coefficients;  // keyed by moment_key
    double constant = 0.0;
};

MomentForm expand_correlator(const TermIndex& term);

struct MomentProblem {
    NpaLevel level = NpaLevel::Q1;
    std::vector<Word> words;
    /// Moment class of each cell of Gamma, row-major.
    std::vector<int> cell_class;
    std::vector<Word> class_keys;
    std::vector<int> class_size;
    std::vector<double> objective;  // per class
    double offset = 0.0;
    int normalization_class = 0;

    int dimension() const { return static_cast<int>(words.size()); }
    int class_of(int row, int col) const { return cell_class[static_cast<std::size_t>(row * dimension() + col)]; }
    double objective_l1() const;
};

/// Throws NpaError if a word of the expanded objective is not a moment of
/// the level's matrix.
MomentProblem build_moment_problem(const BellExpression& expr, NpaLevel level);

struct SdpParams {
    int max_iterations = 200000;
    double tolerance = 1e-8;
    double relaxation = 1.5;
    double initial_step = 0.05;
    /// Step length is rebalanced every this many iterations; 0 keeps it fixed.
    int adapt_interval = 100;

    void validate() const;
};

struct SdpSolution {
    enum class Status { Converged, MaxIterations };

    double objective_value = 0.0;
    std::vector<double> moment_values;
    Eigen::MatrixXd gamma;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    Status status = Status::MaxIterations;
};

/// Douglas-Rachford splitting between the moment subspace and the PSD cone.
SdpSolution sdp_maximize(const MomentProblem& problem, const SdpParams& params = {});

/// Objective plus 10 * max(residual) * objective 1-norm.
double certified_bound(const MomentProblem& problem, const SdpSolution& sol);

struct NpaResult {
    double bound = 0.0;
    MomentProblem problem;
    SdpSolution solution;
};

NpaResult npa_solve(const BellExpression& expr, NpaLevel level, const SdpParams& params = {});
double npa_upper_bound(const BellExpression& expr, NpaLevel level, const SdpParams& params = {});

}  // namespace bellmax

#pragma once

#include <cstdint>
#include <vector>

#include "bellmax/bell_expr.hpp"
#include "bellmax/qcore.hpp"

namespace bellmax {

/// Relative tolerance, scaled by max(1, |value|), under which the branches of
/// best_observable count as tied. A sweep can therefore lose at most six such
/// amounts.
inline constexpr double kBranchTieTolerance = 1e-12;

struct SeesawParams {
    int restarts = 200;
    int max_sweeps = 500;
    double convergence_tol = 1e-12;
    std::uint64_t master_seed = 1;
    /// Worker threads for independent restarts; 0 reads BELLMAX_THREADS and
    /// falls back to the hardware concurrency.
    int threads = 0;

    void validate() const;
};

struct Solution {
    PureState state = PureState::basis(0);
    Measurements measurements{Observable::plus_identity(), Observable::plus_identity(), Observable::plus_identity(),
                              Observable::plus_identity(), Observable::plus_identity(), Observable::plus_identity()};
    double value = 0.0;
    int sweeps_used = 0;
    int restart_index = 0;
    bool converged = false;
};

struct SeesawRun {
    Solution solution;
    /// Value after each completed sweep.
    std::vector<double> sweep_values;
};

struct StateStep {
    double value = 0.0;
    PureState state = PureState::basis(0);
};

struct ObservableStep {
    double value = 0.0;
    Observable observable = Observable::plus_identity();
};

/// Top eigenpair of the Bell operator for fixed measurements.
StateStep best_state(const BellExpression& expr, const Measurements& meas);

/// Optimal observable for one slot (0..5 = A, a, B, b, C, c) with the state
/// and the other five observables held fixed. The expectation is affine in the
/// slot's Pauli coefficients, so the optimum is the best of +I, -I and the unit
/// vector along the gradient. Ties within kBranchTieTolerance go to +I, then -I,
/// then Bloch.
ObservableStep best_observable(const BellExpression& expr, const PureState& state, const Measurements& meas, int slot);

/// One seeded alternating-maximization run.
SeesawRun seesaw_run(const BellExpression& expr, std::uint64_t seed, const SeesawParams& params);

/// Best of params.restarts runs; restart i is seeded with restart_seed(master_seed, i).
Solution quantum_maximum(const BellExpression& expr, const SeesawParams& params);

std::uint64_t restart_seed(std::uint64_t master_seed, std::uint64_t restart);

double evaluate_solution(const BellExpression& expr, const Solution& sol);

/// Thread count used when params.threads == 0.
int default_thread_count();

}  // namespace bellmax

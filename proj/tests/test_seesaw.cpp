#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include <doctest.h>

#include "bellmax/fixtures.hpp"
#include "bellmax/seesaw.hpp"
#include "oracles.hpp"

using namespace bellmax;
using doctest::Approx;

namespace {

Measurements zx() {
    return {Observable::pauli_z(), Observable::pauli_x(), Observable::pauli_z(),
            Observable::pauli_x(), Observable::pauli_z(), Observable::pauli_x()};
}

SeesawParams quick(int restarts, std::uint64_t seed = 1) {
    SeesawParams p;
    p.restarts = restarts;
    p.master_seed = seed;
    p.threads = 1;
    return p;
}

bool same_bits(const Solution& a, const Solution& b) {
    if (std::memcmp(&a.value, &b.value, sizeof(double)) != 0) return false;
    if (a.state.amplitudes() != b.state.amplitudes()) return false;
    for (std::size_t k = 0; k < 6; ++k)
        if (!(a.measurements[k] == b.measurements[k])) return false;
    return a.restart_index == b.restart_index && a.sweeps_used == b.sweeps_used;
}

}  // namespace

TEST_CASE("best state") {
    const StateStep s = best_state(catalog_entry(2).expression, zx());
    CHECK(s.value == Approx(4.0).epsilon(1e-12));
    CHECK(expectation(s.state, bell_operator(catalog_entry(2).expression, zx())) == Approx(4.0).epsilon(1e-12));

    CHECK(best_state(BellExpression{}, zx()).value == 0.0);

    const StateStep a = best_state(parse_expression("A"), zx());
    CHECK(a.value == Approx(1.0));
    double weight_a0 = 0.0;
    for (unsigned k = 0; k < 4; ++k) weight_a0 += std::norm(a.state[k]);
    CHECK(weight_a0 == Approx(1.0));
}

TEST_CASE("best observable") {
    // fixture 23 has C unmeasured
    const Solution f23 = fixture_solution(23);
    const ObservableStep c = best_observable(catalog_entry(23).expression, f23.state, f23.measurements, 4);
    CHECK(c.observable.is_identity());
    CHECK(c.value == Approx(1.5 * (std::sqrt(17.0) - 1.0)).epsilon(1e-9));

    // slot that no term touches keeps the value
    const BellExpression ab = parse_expression("AB + ab");
    const PureState psi = PureState::normalized(oracle::ghz());
    const double before = evaluate_solution(ab, Solution{psi, zx()});
    CHECK(best_observable(ab, psi, zx(), 5).value == Approx(before));

    const Solution f2 = fixture_solution(2);
    const ObservableStep a = best_observable(catalog_entry(2).expression, f2.state, f2.measurements, 0);
    CHECK(a.observable.kind() == Observable::Kind::Bloch);
    CHECK(a.value == Approx(4.0).epsilon(1e-9));

    CHECK_THROWS_AS(best_observable(ab, psi, zx(), 6), std::out_of_range);
}

TEST_CASE("best observable is optimal for its slot") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 60; ++k) {
        const BellExpression& e = catalog_entry(1 + k % 46).expression;
        const PureState psi = PureState::normalized(oracle::random_state(rng));
        Measurements m = zx();
        for (auto& o : m) o = Observable::bloch(oracle::random_unit(rng));
        const int slot = k % 6;
        const ObservableStep step = best_observable(e, psi, m, slot);
        Measurements with = m;
        with[static_cast<std::size_t>(slot)] = step.observable;
        CHECK(step.value == Approx(evaluate_solution(e, Solution{psi, with})).epsilon(1e-10));
        CHECK(step.value >= evaluate_solution(e, Solution{psi, m}) - 1e-10);
        // no sampled alternative does better
        for (int t = 0; t < 20; ++t) {
            Measurements alt = m;
            alt[static_cast<std::size_t>(slot)] = Observable::bloch(oracle::random_unit(rng));
            CHECK(evaluate_solution(e, Solution{psi, alt}) <= step.value + 1e-10);
        }
        for (const Observable& id : {Observable::plus_identity(), Observable::minus_identity()}) {
            Measurements alt = m;
            alt[static_cast<std::size_t>(slot)] = id;
            CHECK(evaluate_solution(e, Solution{psi, alt}) <= step.value + 1e-10);
        }
    }
}

TEST_CASE("seesaw run: no advantage for row 1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(seesaw_run(catalog_entry(1).expression, seed, SeesawParams{}).solution.value == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("seesaw run: row 2 reaches 4 from almost every seed") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        hits += seesaw_run(catalog_entry(2).expression, seed, SeesawParams{}).solution.value >= 4.0 - 1e-9;
    }
    CHECK(hits >= 95);
}

TEST_CASE("seesaw run: per-sweep values never decrease beyond the branch tie budget") {
    SeesawParams p;
    for (const CatalogEntry& c : load_catalog()) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const SeesawRun run = seesaw_run(c.expression, restart_seed(9, seed), p);
            CAPTURE(c.id);
            REQUIRE(!run.sweep_values.empty());
            for (std::size_t k = 1; k < run.sweep_values.size(); ++k) {
                const double budget = 6.0 * kBranchTieTolerance * std::max(1.0, std::abs(run.sweep_values[k - 1]));
                CHECK(run.sweep_values[k] >= run.sweep_values[k - 1] - budget);
            }
            CHECK(run.solution.value == Approx(run.sweep_values.back()).epsilon(1e-10));
            CHECK(run.solution.sweeps_used == static_cast<int>(run.sweep_values.size()));
        }
    }
}

TEST_CASE("quantum maximum: closed forms") {
    CHECK(quantum_maximum(catalog_entry(5).expression, quick(20)).value == Approx(8.0 * std::sqrt(5.0) - 13.0).epsilon(1e-9));
    CHECK(quantum_maximum(catalog_entry(26).expression, quick(20)).value == Approx(1.0 + 4.0 * std::sqrt(3.0)).epsilon(1e-9));
    CHECK(quantum_maximum(catalog_entry(10).expression, quick(20)).value == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("quantum maximum is at least the local bound") {
    for (const CatalogEntry& c : load_catalog()) {
        CAPTURE(c.id);
        CHECK(quantum_maximum(c.expression, quick(10)).value >= static_cast<double>(c.local_maximum) - 1e-9);
    }
}

TEST_CASE("quantum maximum is reproducible and thread independent") {
    const BellExpression& e = catalog_entry(42).expression;
    const Solution a = quantum_maximum(e, quick(12, 7));
    const Solution b = quantum_maximum(e, quick(12, 7));
    CHECK(same_bits(a, b));
    SeesawParams threaded = quick(12, 7);
    threaded.threads = 4;
    CHECK(same_bits(a, quantum_maximum(e, threaded)));
    const Solution c = quantum_maximum(e, quick(12, 8));
    CHECK(!same_bits(a, c));
}

TEST_CASE("restart seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m)
        for (std::uint64_t i = 0; i < 500; ++i) seen.insert(restart_seed(m, i));
    CHECK(seen.size() == 2000);
}

TEST_CASE("evaluate solution") {
    CHECK(evaluate_solution(BellExpression{}, fixture_solution(2)) == 0.0);
    CHECK(evaluate_solution(catalog_entry(16).expression, fixture_solution(16)) == Approx(6.12883).epsilon(2e-3 / 6.12883));

    // local strategies embed as |000> with +-1 observables
    const BellExpression& e = catalog_entry(46).expression;
    for (unsigned k = 0; k < 64; ++k) {
        const DeterministicStrategy s = DeterministicStrategy::from_index(k);
        Solution sol;
        for (std::size_t j = 0; j < 6; ++j) {
            sol.measurements[j] = s.outputs[j] > 0 ? Observable::plus_identity() : Observable::minus_identity();
        }
        CHECK(evaluate_solution(e, sol) == Approx(static_cast<double>(deterministic_value(e, s))));
    }
}

TEST_CASE("parameter validation") {
    SeesawParams p;
    p.restarts = 0;
    CHECK_THROWS_AS(quantum_maximum(catalog_entry(2).expression, p), std::invalid_argument);
    p = {};
    p.convergence_tol = 0.0;
    CHECK_THROWS_AS(seesaw_run(catalog_entry(2).expression, 1, p), std::invalid_argument);
    p = {};
    p.max_sweeps = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

#include "bellmax/seesaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace bellmax {

void SeesawParams::validate() const {
    if (restarts <= 0) throw std::invalid_argument("restarts must be positive");
    if (max_sweeps <= 0) throw std::invalid_argument("max_sweeps must be positive");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence tolerance must be positive");
    if (threads < 0) throw std::invalid_argument("thread count must be nonnegative");
}

namespace {

constexpr double kMonotoneSlack = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Coefficients of the slot's Pauli vector in the expectation value:
// value(o) = rest + sum_k gradient[k] * o_k for o on (I, x, y, z).
struct AffineForm {
    double rest = 0.0;
    Eigen::Vector4d gradient = Eigen::Vector4d::Zero();
};

AffineForm slot_form(const BellExpression& expr, const PauliTensor& corr, const Measurements& meas, int slot) {
    const int party = slot / 2;
    const int setting = slot % 2 + 1;
    const Eigen::Vector4d id(1.0, 0.0, 0.0, 0.0);
    AffineForm form;
    for (const auto& [term, coeff] : expr.terms()) {
        std::array<Eigen::Vector4d, 3> v;
        for (Party p : kParties) {
            const int t = term[static_cast<std::size_t>(index_of(p))];
            v[static_cast<std::size_t>(index_of(p))] = t == 0 ? id : observable_for(meas, p, t).pauli_coefficients();
        }
        const bool linear = term[static_cast<std::size_t>(party)] == setting;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                for (int c = 0; c < 4; ++c) {
                    const double t = corr[static_cast<std::size_t>(16 * a + 4 * b + c)];
                    if (t == 0.0) continue;
                    const int idx[3] = {a, b, c};
                    double f = static_cast<double>(coeff) * t;
                    for (int p = 0; p < 3; ++p) {
                        if (linear && p == party) continue;
                        f *= v[static_cast<std::size_t>(p)](idx[p]);
                    }
                    if (f == 0.0) continue;
                    if (linear) {
                        form.gradient(idx[party]) += f;
                    } else {
                        form.rest += f;
                    }
                }
            }
        }
    }
    return form;
}

ObservableStep choose_observable(const AffineForm& form) {
    const double plus = form.rest + form.gradient(0);
    const double minus = form.rest - form.gradient(0);
    const Eigen::Vector3d g = form.gradient.tail<3>();
    const double gnorm = g.norm();
    const double bloch = form.rest + gnorm;
    const double tie = kBranchTieTolerance * std::max({1.0, std::abs(plus), std::abs(minus), std::abs(bloch)});

    const double best_identity = std::max(plus, minus);
    if (best_identity >= bloch - tie) {
        if (plus >= minus - tie) return {plus, Observable::plus_identity()};
        return {minus, Observable::minus_identity()};
    }
    // gnorm > 0 here: with a zero gradient the Bloch branch equals rest <= best_identity.
    return {bloch, Observable::bloch_normalized(g)};
}

Measurements random_measurements(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&] {
        Eigen::Vector3d n;
        do {
            n = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
        } while (n.norm() < 1e-8);
        return Observable::bloch_normalized(n);
    };
    // Evaluation order is fixed so runs are reproducible.
    Observable o0 = draw(), o1 = draw(), o2 = draw(), o3 = draw(), o4 = draw(), o5 = draw();
    return {o0, o1, o2, o3, o4, o5};
}

PureState random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(8);
    for (Eigen::Index k = 0; k < 8; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(k) = Complex(re, im);
    }
    return PureState::normalized(v);
}

}  // namespace

StateStep best_state(const BellExpression& expr, const Measurements& meas) {
    const Eigenpair top = max_eigenpair(pauli_operator(bell_pauli_weights(expr, meas)));
    return {top.value, PureState::normalized(top.vector)};
}

ObservableStep best_observable(const BellExpression& expr, const PureState& state, const Measurements& meas, int slot) {
    if (slot < 0 || slot > 5) throw std::out_of_range("observable slot must be in 0..5");
    const PauliTensor corr = correlation_tensor(state.amplitudes());
    return choose_observable(slot_form(expr, corr, meas, slot));
}

std::uint64_t restart_seed(std::uint64_t master_seed, std::uint64_t restart) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(restart + 0x632be59bd9b4e019ull));
}

SeesawRun seesaw_run(const BellExpression& expr, std::uint64_t seed, const SeesawParams& params) {
    params.validate();
    std::mt19937_64 rng(seed);
    SeesawRun run;
    Solution& sol = run.solution;
    sol.state = random_state(rng);
    sol.measurements = random_measurements(rng);
    double previous = expectation(sol.state, pauli_operator(bell_pauli_weights(expr, sol.measurements)));
    const double slack = kMonotoneSlack * std::max<double>(1.0, static_cast<double>(expr.l1_norm()));

    for (int sweep = 1; sweep <= params.max_sweeps; ++sweep) {
        // A near-degenerate top eigenspace is merged by max_eigenpair, which can
        // cost up to its gap tolerance; keep the incumbent state when it is better.
        const PauliTensor weights = bell_pauli_weights(expr, sol.measurements);
        const StateStep st = best_state(expr, sol.measurements);
        const PauliTensor trial = correlation_tensor(st.state.amplitudes());
        const PauliTensor current = correlation_tensor(sol.state.amplitudes());
        double value = 0.0, kept = 0.0;
        for (std::size_t k = 0; k < 64; ++k) {
            value += weights[k] * trial[k];
            kept += weights[k] * current[k];
        }
        const bool accept = value >= kept;
        if (accept) {
            sol.state = st.state;
        } else {
            value = kept;
        }
        const PauliTensor& corr = accept ? trial : current;
        for (int slot = 0; slot < 6; ++slot) {
            auto& incumbent = sol.measurements[static_cast<std::size_t>(slot)];
            ObservableStep step = choose_observable(slot_form(expr, corr, sol.measurements, slot));
            incumbent = step.observable;
            value = step.value;
        }
        if (value < previous - slack) {
            throw std::logic_error("seesaw value decreased across a sweep (" + std::to_string(previous) + " -> " +
                                   std::to_string(value) + ")");
        }
        run.sweep_values.push_back(value);
        sol.sweeps_used = sweep;
        if (value - previous < params.convergence_tol) {
            sol.converged = true;
            break;
        }
        previous = value;
    }
    sol.value = evaluate_solution(expr, sol);
    return run;
}

int default_thread_count() {
    if (const char* env = std::getenv("BELLMAX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Solution quantum_maximum(const BellExpression& expr, const SeesawParams& params) {
    params.validate();
    const auto n = static_cast<std::size_t>(params.restarts);
    std::vector<Solution> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            results[i] = seesaw_run(expr, restart_seed(params.master_seed, i), params).solution;
            results[i].restart_index = static_cast<int>(i);
        }
    };
    const int threads = std::min<int>(params.threads > 0 ? params.threads : default_thread_count(), params.restarts);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (results[i].value > results[best].value) best = i;
    }
    return results[best];
}

double evaluate_solution(const BellExpression& expr, const Solution& sol) {
    return expectation(sol.state, bell_operator(expr, sol.measurements));
}

}  // namespace bellmax

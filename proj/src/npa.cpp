#include "bellmax/npa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace bellmax {

std::string to_string(NpaLevel level) {
    switch (level) {
        case NpaLevel::Q1:
            return "Q1";
        case NpaLevel::OnePlusAB:
            return "1+AB";
        case NpaLevel::AlmostQuantum:
            return "AQ";
        case NpaLevel::Q2:
            return "Q2";
    }
    throw std::logic_error("bad NPA level");
}

NpaLevel parse_npa_level(std::string_view text) {
    std::string up;
    for (char ch : text) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (up == "Q1") return NpaLevel::Q1;
    if (up == "1+AB" || up == "1AB") return NpaLevel::OnePlusAB;
    if (up == "AQ") return NpaLevel::AlmostQuantum;
    if (up == "Q2") return NpaLevel::Q2;
    throw std::invalid_argument("unknown NPA level '" + std::string(text) + "' (expected Q1, 1+AB, AQ or Q2)");
}

Word canonicalize_word(const Word& w) {
    Word s = w;
    std::stable_sort(s.begin(), s.end(), [](const Symbol& a, const Symbol& b) { return a.party < b.party; });
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

Word moment_key(const Word& w) {
    const Word c = canonicalize_word(w);
    const Word r = canonicalize_word(Word(c.rbegin(), c.rend()));
    return std::min(c, r);
}

std::string word_to_string(const Word& w) {
    if (w.empty()) return "1";
    std::string out;
    for (const Symbol& s : w) {
        const char letter = party_letter(s.party);
        out.push_back(s.setting == 1 ? letter : static_cast<char>(std::tolower(static_cast<unsigned char>(letter))));
    }
    return out;
}

std::vector<Word> generate_words(NpaLevel level) {
    std::vector<Symbol> singles;
    for (Party p : kParties) {
        for (int s = 1; s <= 2; ++s) singles.push_back({p, s});
    }
    std::vector<Word> words{Word{}};
    for (const Symbol& s : singles) words.push_back({s});
    if (level == NpaLevel::Q1) return words;

    for (const Symbol& x : singles) {
        for (const Symbol& y : singles) {
            if (x.party < y.party) words.push_back({x, y});
        }
    }
    if (level == NpaLevel::Q2) {
        for (const Symbol& x : singles) {
            for (const Symbol& y : singles) {
                if (x.party == y.party && x.setting != y.setting) words.push_back({x, y});
            }
        }
    }
    if (level == NpaLevel::AlmostQuantum) {
        for (int a = 1; a <= 2; ++a) {
            for (int b = 1; b <= 2; ++b) {
                for (int c = 1; c <= 2; ++c) {
                    words.push_back({{Party::A, a}, {Party::B, b}, {Party::C, c}});
                }
            }
        }
    }
    return words;
}

MomentForm expand_correlator(const TermIndex& term) {
    std::vector<Symbol> active;
    for (Party p : kParties) {
        const int s = term[static_cast<std::size_t>(index_of(p))];
        if (s != 0) active.push_back({p, s});
    }
    MomentForm form;
    const std::size_t n = active.size();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Word w;
        double coeff = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (1u << k)) {
                w.push_back(active[k]);
                coeff *= 2.0;
            } else {
                coeff *= -1.0;
            }
        }
        if (w.empty()) {
            form.constant += coeff;
        } else {
            form.coefficients[moment_key(w)] += coeff;
        }
    }
    return form;
}

double MomentProblem::objective_l1() const {
    double s = 0.0;
    for (double w : objective) s += std::abs(w);
    return s;
}

MomentProblem build_moment_problem(const BellExpression& expr, NpaLevel level) {
    MomentProblem prob;
    prob.level = level;
    prob.words = generate_words(level);
    const auto n = prob.words.size();
    prob.cell_class.resize(n * n);
    std::map<Word, int> index;
    for (std::size_t i = 0; i < n; ++i) {
        const Word& u = prob.words[i];
        for (std::size_t j = 0; j < n; ++j) {
            Word uv(u.rbegin(), u.rend());
            uv.insert(uv.end(), prob.words[j].begin(), prob.words[j].end());
            const Word key = moment_key(uv);
            auto [it, inserted] = index.try_emplace(key, static_cast<int>(prob.class_keys.size()));
            if (inserted) {
                prob.class_keys.push_back(key);
                prob.class_size.push_back(0);
            }
            prob.cell_class[i * n + j] = it->second;
            ++prob.class_size[static_cast<std::size_t>(it->second)];
        }
    }
    prob.normalization_class = index.at(Word{});
    prob.objective.assign(prob.class_keys.size(), 0.0);
    for (const auto& [term, c] : expr.terms()) {
        const MomentForm form = expand_correlator(term);
        prob.offset += static_cast<double>(c) * form.constant;
        for (const auto& [w, k] : form.coefficients) {
            auto it = index.find(w);
            if (it == index.end()) {
                throw NpaError("moment " + word_to_string(w) + " of term " + term_word(term) +
                               " is not in the moment matrix at level " + to_string(level));
            }
            prob.objective[static_cast<std::size_t>(it->second)] += static_cast<double>(c) * k;
        }
    }
    return prob;
}

void SdpParams::validate() const {
    if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("SDP tolerance must be positive");
    if (!(relaxation > 0.0 && relaxation < 2.0)) throw std::invalid_argument("relaxation must be in (0, 2)");
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be positive");
    if (adapt_interval < 0) throw std::invalid_argument("adapt_interval must be nonnegative");
}

namespace {

// Orthogonal projection onto matrices that are constant on every moment
// class, with the normalization class pinned to 1.
struct ClassProjector {
    const MomentProblem& prob;
    std::vector<double> inv_size;

    explicit ClassProjector(const MomentProblem& p) : prob(p) {
        for (int s : p.class_size) inv_size.push_back(1.0 / s);
    }

    void operator()(const Eigen::MatrixXd& m, Eigen::MatrixXd& out, std::vector<double>& y) const {
        const int n = prob.dimension();
        y.assign(prob.class_keys.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(prob.class_of(i, j))] += m(i, j);
        }
        for (std::size_t k = 0; k < y.size(); ++k) y[k] *= inv_size[k];
        y[static_cast<std::size_t>(prob.normalization_class)] = 1.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) out(i, j) = y[static_cast<std::size_t>(prob.class_of(i, j))];
        }
    }
};

}  // namespace

SdpSolution sdp_maximize(const MomentProblem& prob, const SdpParams& params) {
    params.validate();
    const int n = prob.dimension();
    const ClassProjector project(prob);

    // Cost spread evenly over each class, so <C, X> = sum_k objective_k y_k.
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(prob.class_of(i, j));
            cost(i, j) = prob.objective[k] / prob.class_size[k];
        }
    }

    double step = params.initial_step;
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd x(n, n), y_psd(n, n), y_prev = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> moments;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(n);

    SdpSolution sol;
    for (int it = 1; it <= params.max_iterations; ++it) {
        project(z + step * cost, x, moments);
        eig.compute(2.0 * x - z);
        const Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
        y_psd.noalias() = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        z += params.relaxation * (y_psd - x);

        sol.primal_residual = (y_psd - x).norm();
        sol.dual_residual = (y_psd - y_prev).norm() / step;
        sol.iterations = it;
        y_prev = y_psd;
        if (sol.primal_residual < params.tolerance && sol.dual_residual < params.tolerance) {
            sol.status = SdpSolution::Status::Converged;
            break;
        }
        if (params.adapt_interval > 0 && it % params.adapt_interval == 0) {
            double next = step;
            if (sol.primal_residual > 3.0 * sol.dual_residual) next = step / 2.0;
            if (sol.dual_residual > 3.0 * sol.primal_residual) next = step * 2.0;
            if (next != step) {
                z = x + (next / step) * (z - x);
                step = next;
            }
        }
    }

    sol.moment_values = moments;
    sol.gamma = x;
    sol.objective_value = prob.offset;
    for (std::size_t k = 0; k < moments.size(); ++k) sol.objective_value += prob.objective[k] * moments[k];
    return sol;
}

double certified_bound(const MomentProblem& prob, const SdpSolution& sol) {
    return sol.objective_value + 10.0 * std::max(sol.primal_residual, sol.dual_residual) * prob.objective_l1();
}

NpaResult npa_solve(const BellExpression& expr, NpaLevel level, const SdpParams& params) {
    NpaResult r;
    r.problem = build_moment_problem(expr, level);
    r.solution = sdp_maximize(r.problem, params);
    r.bound = certified_bound(r.problem, r.solution);
    return r;
}

double npa_upper_bound(const BellExpression& expr, NpaLevel level, const SdpParams& params) {
    return npa_solve(expr, level, params).bound;
}

}  // namespace bellmax

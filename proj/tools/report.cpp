#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <thread>

#include "bellmax/bell_expr.hpp"
#include "bellmax/fixtures.hpp"

namespace bellmax::report {

namespace {

// Tolerances of the reproduction checks.
constexpr double kSeesawClosedTol = 1e-7;
constexpr double kSeesawDecimalTol = 5e-4;
constexpr double kFixtureClosedTol = 1e-9;
constexpr double kFixtureDecimalTol = 2e-3;
constexpr double kMonotoneTol = 2e-3;
constexpr double kSandwichSlack = 1e-6;
constexpr double kLevelSlack = 1e-7;
constexpr double kNpaTol = 2e-3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Check within(std::string name, double value, double expected, double tol) {
    Check c{std::move(name), value, expected, tol, Status::Match, {}};
    if (!(std::abs(value - expected) <= tol)) c.status = Status::Mismatch;
    return c;
}

Check exact(std::string name, double value, std::optional<double> expected, std::string note = {}) {
    Check c{std::move(name), value, expected, 0.0, Status::Match, std::move(note)};
    if (!expected || value != *expected) c.status = Status::Mismatch;
    return c;
}

std::optional<double> npa_bound(const Record& r, NpaLevel level) {
    for (const NpaEntry& e : r.npa) {
        if (e.level == level) return e.bound;
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::Match:
            return "match";
        case Status::Mismatch:
            return "mismatch";
        case Status::Skipped:
            return "skipped";
        case Status::NotConverged:
            return "not_converged";
    }
    return "?";
}

int Record::count(Status s) const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.status == s; }));
}

int Report::count(Status s) const {
    int n = 0;
    for (const Record& r : records) n += r.count(s);
    return n;
}

Record build_record(int id, const Options& options) {
    const CatalogEntry& entry = catalog_entry(id);
    const ExpectedValues ev = expected_values(id);
    const bool closed = ev.maximum.kind == MaximumKind::ClosedForm;
    Record r;
    r.id = id;

    r.local_bound = local_bound(entry.expression).value;
    r.checks.push_back(exact("local_bound", static_cast<double>(r.local_bound),
                             static_cast<double>(entry.local_maximum)));

    SeesawParams sp = options.seesaw;
    sp.threads = 1;
    auto t0 = Clock::now();
    r.seesaw = quantum_maximum(entry.expression, sp);
    r.seesaw_seconds = seconds_since(t0);
    Check qc = within("seesaw_maximum", r.seesaw.value, ev.maximum.value, closed ? kSeesawClosedTol : kSeesawDecimalTol);
    if (!r.seesaw.converged && qc.status == Status::Mismatch) qc.status = Status::NotConverged;
    r.checks.push_back(qc);

    const Solution fixture = fixture_solution(id);
    r.fixture_value = fixture.value;
    r.checks.push_back(
        within("fixture_value", fixture.value, ev.maximum.value, closed ? kFixtureClosedTol : kFixtureDecimalTol));

    r.entanglement = entanglement_profile(fixture.state);
    r.incompatibility = classify_incompatibility(fixture.measurements);
    const ExpectedProfile& p = ev.profile;
    r.checks.push_back(within("n_abc", r.entanglement.n_abc, p.n_abc, kMonotoneTol));
    r.checks.push_back(within("c_ab", r.entanglement.c_ab, p.c_ab, kMonotoneTol));
    r.checks.push_back(within("c_ac", r.entanglement.c_ac, p.c_ac, kMonotoneTol));
    r.checks.push_back(within("c_bc", r.entanglement.c_bc, p.c_bc, kMonotoneTol));
    r.checks.push_back(within("i_a", r.incompatibility.i_a, p.i_a, kMonotoneTol));
    r.checks.push_back(within("i_b", r.incompatibility.i_b, p.i_b, kMonotoneTol));
    r.checks.push_back(within("i_c", r.incompatibility.i_c, p.i_c, kMonotoneTol));
    r.checks.push_back(exact("entanglement_class", r.entanglement.class_id, p.entanglement_class));
    r.checks.push_back(exact("incompatibility_class", r.incompatibility.class_id, p.incompatibility_class));
    const std::string no_cell = ev.class_pair ? "" : "id not listed in the class grid";
    r.checks.push_back(exact("pair_entanglement_class", r.entanglement.class_id,
                             ev.class_pair ? std::optional<double>(ev.class_pair->entanglement_class) : std::nullopt,
                             no_cell));
    r.checks.push_back(exact("pair_incompatibility_class", r.incompatibility.class_id,
                             ev.class_pair ? std::optional<double>(ev.class_pair->incompatibility_class) : std::nullopt,
                             no_cell));

    for (NpaLevel level : options.levels) {
        t0 = Clock::now();
        const NpaResult res = npa_solve(entry.expression, level, options.sdp);
        NpaEntry e{level,
                   res.bound,
                   res.solution.primal_residual,
                   res.solution.dual_residual,
                   res.solution.iterations,
                   res.solution.status == SdpSolution::Status::Converged,
                   seconds_since(t0)};
        r.npa.push_back(e);
        Check c{"npa_" + to_string(level) + "_sandwich", e.bound, r.seesaw.value, kSandwichSlack, Status::Match, {}};
        if (!e.converged) {
            c.status = Status::NotConverged;
        } else if (e.bound < r.seesaw.value - kSandwichSlack) {
            c.status = Status::Mismatch;
        }
        r.checks.push_back(c);
    }
    const auto ab = npa_bound(r, NpaLevel::OnePlusAB);
    const auto aq = npa_bound(r, NpaLevel::AlmostQuantum);
    if (ab && aq) {
        Check c{"npa_level_order", *aq, *ab, kLevelSlack, Status::Match, "AQ <= 1+AB"};
        if (*aq > *ab + kLevelSlack) c.status = Status::Mismatch;
        r.checks.push_back(c);
    }
    if (aq && ev.almost_quantum) {
        r.checks.push_back(within("npa_AQ_value", *aq, *ev.almost_quantum, kNpaTol));
    } else if (aq && closed) {
        r.checks.push_back(within("npa_AQ_value", *aq, ev.maximum.value, kNpaTol));
    }
    return r;
}

Report build_report(const Options& options) {
    const auto t0 = Clock::now();
    Report rep;
    rep.options = options;
    rep.records.resize(46);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < 46; i = next++) rep.records[static_cast<std::size_t>(i)] = build_record(i + 1, options);
    };
    const int threads = std::clamp(options.threads > 0 ? options.threads : default_thread_count(), 1, 46);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    rep.seconds = seconds_since(t0);
    return rep;
}

nlohmann::json observable_to_json(const Observable& o) {
    switch (o.kind()) {
        case Observable::Kind::PlusIdentity:
            return {{"kind", "+I"}};
        case Observable::Kind::MinusIdentity:
            return {{"kind", "-I"}};
        case Observable::Kind::Bloch:
            break;
    }
    const Eigen::Vector3d& n = o.bloch_vector();
    return {{"kind", "bloch"}, {"vector", {n(0), n(1), n(2)}}};
}

Observable observable_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "+I") return Observable::plus_identity();
    if (kind == "-I") return Observable::minus_identity();
    if (kind != "bloch") throw std::invalid_argument("unknown observable kind '" + kind + "'");
    const auto v = j.at("vector").get<std::vector<double>>();
    if (v.size() != 3) throw std::invalid_argument("Bloch vector needs three components");
    return Observable::bloch_normalized(Eigen::Vector3d(v[0], v[1], v[2]));
}

nlohmann::json solution_to_json(const Solution& sol) {
    nlohmann::json amps = nlohmann::json::array();
    for (Eigen::Index k = 0; k < 8; ++k) amps.push_back({sol.state[static_cast<std::size_t>(k)].real(),
                                                          sol.state[static_cast<std::size_t>(k)].imag()});
    nlohmann::json meas = nlohmann::json::object();
    const char* names[6] = {"A", "a", "B", "b", "C", "c"};
    for (std::size_t k = 0; k < 6; ++k) meas[names[k]] = observable_to_json(sol.measurements[k]);
    return {{"schema", kSolutionSchema},
            {"value", sol.value},
            {"state", amps},
            {"measurements", meas},
            {"sweeps_used", sol.sweeps_used},
            {"restart_index", sol.restart_index},
            {"converged", sol.converged}};
}

Solution solution_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != kSolutionSchema) {
        throw std::invalid_argument(std::string("solution document must have schema ") + kSolutionSchema);
    }
    const auto& amps = j.at("state");
    if (!amps.is_array() || amps.size() != 8) throw std::invalid_argument("state needs 8 amplitudes");
    CVector v(8);
    for (std::size_t k = 0; k < 8; ++k) {
        v(static_cast<Eigen::Index>(k)) = Complex(amps[k].at(0).get<double>(), amps[k].at(1).get<double>());
    }
    Solution sol;
    sol.state = PureState::normalized(v);
    const char* names[6] = {"A", "a", "B", "b", "C", "c"};
    for (std::size_t k = 0; k < 6; ++k) sol.measurements[k] = observable_from_json(j.at("measurements").at(names[k]));
    sol.sweeps_used = j.value("sweeps_used", 0);
    sol.restart_index = j.value("restart_index", 0);
    sol.converged = j.value("converged", false);
    return sol;
}

nlohmann::json to_json(const Report& rep) {
    nlohmann::json records = nlohmann::json::array();
    for (const Record& r : rep.records) {
        nlohmann::json checks = nlohmann::json::array();
        for (const Check& c : r.checks) {
            nlohmann::json jc{{"check", c.name},
                              {"value", c.value},
                              {"expected", c.expected ? nlohmann::json(*c.expected) : nlohmann::json(nullptr)},
                              {"tolerance", c.tolerance},
                              {"status", to_string(c.status)}};
            if (!c.note.empty()) jc["note"] = c.note;
            checks.push_back(jc);
        }
        nlohmann::json npa = nlohmann::json::array();
        for (const NpaEntry& e : r.npa) {
            npa.push_back({{"level", to_string(e.level)},
                           {"bound", e.bound},
                           {"primal_residual", e.primal_residual},
                           {"dual_residual", e.dual_residual},
                           {"iterations", e.iterations},
                           {"converged", e.converged},
                           {"seconds", e.seconds}});
        }
        records.push_back({{"id", r.id},
                           {"local_bound", r.local_bound},
                           {"seesaw", solution_to_json(r.seesaw)},
                           {"seesaw_seconds", r.seesaw_seconds},
                           {"fixture_value", r.fixture_value},
                           {"npa", npa},
                           {"entanglement",
                            {{"n_abc", r.entanglement.n_abc},
                             {"c_ab", r.entanglement.c_ab},
                             {"c_ac", r.entanglement.c_ac},
                             {"c_bc", r.entanglement.c_bc},
                             {"class", r.entanglement.class_id}}},
                           {"incompatibility",
                            {{"i_a", r.incompatibility.i_a},
                             {"i_b", r.incompatibility.i_b},
                             {"i_c", r.incompatibility.i_c},
                             {"class", r.incompatibility.class_id}}},
                           {"checks", checks}});
    }
    nlohmann::json levels = nlohmann::json::array();
    for (NpaLevel l : rep.options.levels) levels.push_back(to_string(l));
    return {{"schema", kReportSchema},
            {"metadata",
             {{"master_seed", rep.options.seesaw.master_seed},
              {"restarts", rep.options.seesaw.restarts},
              {"max_sweeps", rep.options.seesaw.max_sweeps},
              {"convergence_tol", rep.options.seesaw.convergence_tol},
              {"npa_levels", levels},
              {"sdp_tolerance", rep.options.sdp.tolerance},
              {"sdp_max_iterations", rep.options.sdp.max_iterations},
              {"seconds", rep.seconds}}},
            {"summary",
             {{"match", rep.count(Status::Match)},
              {"mismatch", rep.count(Status::Mismatch)},
              {"skipped", rep.count(Status::Skipped)},
              {"not_converged", rep.count(Status::NotConverged)}}},
            {"records", records}};
}

void write_csv(const Report& rep, std::ostream& out) {
    out << "id,local_bound,seesaw_value,fixture_value";
    for (NpaLevel l : rep.options.levels) out << ",npa_" << to_string(l);
    out << ",n_abc,c_ab,c_ac,c_bc,i_a,i_b,i_c,entanglement_class,incompatibility_class,mismatches,not_converged\n";
    out << std::setprecision(12);
    for (const Record& r : rep.records) {
        out << r.id << ',' << r.local_bound << ',' << r.seesaw.value << ',' << r.fixture_value;
        for (const NpaEntry& e : r.npa) out << ',' << e.bound;
        out << ',' << r.entanglement.n_abc << ',' << r.entanglement.c_ab << ',' << r.entanglement.c_ac << ','
            << r.entanglement.c_bc << ',' << r.incompatibility.i_a << ',' << r.incompatibility.i_b << ','
            << r.incompatibility.i_c << ',' << r.entanglement.class_id << ',' << r.incompatibility.class_id << ','
            << r.count(Status::Mismatch) << ',' << r.count(Status::NotConverged) << '\n';
    }
}

void write_text(const Report& rep, std::ostream& out) {
    out << std::fixed;
    for (const Record& r : rep.records) {
        out << std::setw(2) << r.id << "  L=" << std::setw(2) << r.local_bound << "  Q=" << std::setprecision(7)
            << r.seesaw.value;
        for (const NpaEntry& e : r.npa) out << "  " << to_string(e.level) << "=" << e.bound;
        out << "  classes=(" << r.entanglement.class_id << "," << r.incompatibility.class_id << ")";
        std::string bad;
        for (const Check& c : r.checks) {
            if (c.status == Status::Mismatch || c.status == Status::NotConverged) {
                bad += (bad.empty() ? "" : ",") + c.name;
            }
        }
        out << (bad.empty() ? "  ok" : "  MISMATCH " + bad) << '\n';
    }
    out << "checks: " << rep.count(Status::Match) << " match, " << rep.count(Status::Mismatch) << " mismatch, "
        << rep.count(Status::NotConverged) << " not converged (" << std::setprecision(1) << rep.seconds << " s)\n";
}

}  // namespace bellmax::report

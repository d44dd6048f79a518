// bellmax: local bounds, seesaw maxima, NPA bounds and classes for the 46
// tight three-party Bell inequalities.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bellmax/bell_expr.hpp"
#include "bellmax/fixtures.hpp"
#include "bellmax/monotones.hpp"
#include "bellmax/npa.hpp"
#include "bellmax/seesaw.hpp"
#include "report.hpp"

using namespace bellmax;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kMismatch = 2, kNotConverged = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_number(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int parse_id(const std::string& s) {
    if (!is_number(s) || s.size() > 3) throw UsageError("inequality id must be an integer in 1..46, got '" + s + "'");
    const int id = std::stoi(s);
    if (id < 1 || id > 46) throw UsageError("inequality id must be in 1..46, got " + s);
    return id;
}

struct Target {
    BellExpression expr;
    std::optional<int> id;
};

Target resolve(const std::string& arg) {
    if (is_number(arg)) {
        const int id = parse_id(arg);
        return {catalog_entry(id).expression, id};
    }
    try {
        return {parse_expression(arg), std::nullopt};
    } catch (const ParseError& e) {
        throw UsageError(std::string("cannot parse expression: ") + e.what());
    }
}

NpaLevel level_from_flag(const std::string& s) {
    try {
        return parse_npa_level(s);
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown level '" + s + "' (q1, 1ab, aq, q2)");
    }
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot write " + out_path);
    f << j.dump(2) << '\n';
}

std::string class_pair_text(const Solution& sol, int id_for_check) {
    try {
        const NonlocalityClass c = nonlocality_class(id_for_check, sol);
        return "(" + std::to_string(c.entanglement_class) + "," + std::to_string(c.incompatibility_class) + ")";
    } catch (const ClassificationError& e) {
        return std::string("unclassified: ") + e.what();
    }
}

int cmd_list() {
    for (const CatalogEntry& e : load_catalog()) {
        std::cout << std::setw(2) << e.id << "  " << std::setw(2) << e.local_maximum << "  "
                  << format_expression(e.expression) << '\n';
    }
    return kOk;
}

int cmd_show(const std::string& arg, bool as_json) {
    const CatalogEntry& e = catalog_entry(parse_id(arg));
    if (as_json) {
        emit({{"schema", "bellmax.entry/1"},
              {"id", e.id},
              {"expression", format_expression(e.expression)},
              {"local_maximum", e.local_maximum}},
             "");
        return kOk;
    }
    std::cout << format_expression(e.expression) << '\n' << "local maximum: " << e.local_maximum << '\n';
    return kOk;
}

int cmd_local(const std::string& arg, bool as_json) {
    const Target t = resolve(arg);
    const LocalBound lb = local_bound(t.expr);
    if (as_json) {
        emit({{"schema", "bellmax.local/1"},
              {"expression", format_expression(t.expr)},
              {"local_bound", lb.value},
              {"strategy", lb.strategy.to_string()}},
             "");
    } else {
        std::cout << lb.value << "  (" << lb.strategy.to_string() << ")\n";
    }
    if (t.id && lb.value != catalog_entry(*t.id).local_maximum) return kMismatch;
    return kOk;
}

int cmd_qmax(const std::string& arg, const SeesawParams& params, bool as_json, const std::string& out) {
    const Target t = resolve(arg);
    const Solution sol = quantum_maximum(t.expr, params);
    json j = report::solution_to_json(sol);
    if (t.id) j["id"] = *t.id;
    j["expression"] = format_expression(t.expr);
    j["master_seed"] = params.master_seed;
    j["restarts"] = params.restarts;
    if (as_json || !out.empty()) {
        emit(j, out);
    } else {
        std::cout << std::setprecision(12) << "value: " << sol.value << '\n';
        std::cout << "restart " << sol.restart_index << ", " << sol.sweeps_used << " sweeps"
                  << (sol.converged ? "" : " (not converged)") << '\n';
        std::cout << "state:\n" << std::setprecision(9);
        for (unsigned k = 0; k < 8; ++k) {
            const Complex a = sol.state[k];
            std::cout << "  |" << ((k >> 2) & 1) << ((k >> 1) & 1) << (k & 1) << ">  " << std::setw(14) << a.real()
                      << (a.imag() < 0 ? " - " : " + ") << std::abs(a.imag()) << "i\n";
        }
        const char* names[6] = {"A", "a", "B", "b", "C", "c"};
        for (std::size_t k = 0; k < 6; ++k) std::cout << names[k] << ": " << sol.measurements[k].to_string() << '\n';
        std::cout << "classes: " << class_pair_text(sol, t.id.value_or(1)) << '\n';
    }
    return sol.converged ? kOk : kNotConverged;
}

int cmd_npa(const std::string& arg, const std::string& level_flag, bool as_json) {
    const Target t = resolve(arg);
    const NpaLevel level = level_from_flag(level_flag);
    NpaResult r;
    try {
        r = npa_solve(t.expr, level);
    } catch (const NpaError& e) {
        throw UsageError(e.what());
    }
    const bool converged = r.solution.status == SdpSolution::Status::Converged;
    if (as_json) {
        json j{{"schema", "bellmax.npa/1"},
               {"expression", format_expression(t.expr)},
               {"level", to_string(level)},
               {"bound", r.bound},
               {"objective", r.solution.objective_value},
               {"primal_residual", r.solution.primal_residual},
               {"dual_residual", r.solution.dual_residual},
               {"iterations", r.solution.iterations},
               {"status", converged ? "converged" : "max_iterations"}};
        if (t.id) j["id"] = *t.id;
        emit(j, "");
    } else {
        std::cout << std::setprecision(10) << "bound: " << r.bound << '\n'
                  << std::setprecision(3) << "residuals: primal " << r.solution.primal_residual << ", dual "
                  << r.solution.dual_residual << '\n'
                  << "iterations: " << r.solution.iterations << (converged ? "" : " (not converged)") << '\n';
    }
    return converged ? kOk : kNotConverged;
}

int cmd_classify(const std::string& arg, const std::string& solution_path, double tol, bool as_json) {
    const int id = parse_id(arg);
    Solution sol;
    if (solution_path.empty()) {
        sol = fixture_solution(id);
    } else {
        std::ifstream f(solution_path);
        if (!f) throw UsageError("cannot read " + solution_path);
        try {
            sol = report::solution_from_json(json::parse(f));
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad solution file: ") + e.what());
        }
        sol.value = evaluate_solution(catalog_entry(id).expression, sol);
    }
    const EntanglementProfile ep = entanglement_profile(sol.state, tol);
    const IncompatibilityProfile ip = classify_incompatibility(sol.measurements, tol);
    if (as_json) {
        emit({{"schema", "bellmax.classify/1"},
              {"id", id},
              {"value", sol.value},
              {"tolerance", tol},
              {"entanglement",
               {{"n_abc", ep.n_abc}, {"c_ab", ep.c_ab}, {"c_ac", ep.c_ac}, {"c_bc", ep.c_bc}, {"class", ep.class_id}}},
              {"incompatibility", {{"i_a", ip.i_a}, {"i_b", ip.i_b}, {"i_c", ip.i_c}, {"class", ip.class_id}}}},
             "");
        return kOk;
    }
    std::cout << std::setprecision(6) << std::fixed;
    std::cout << "N=" << ep.n_abc << "  C_AB=" << ep.c_ab << "  C_AC=" << ep.c_ac << "  C_BC=" << ep.c_bc << '\n';
    std::cout << "I(A,a)=" << ip.i_a << "  I(B,b)=" << ip.i_b << "  I(C,c)=" << ip.i_c << '\n';
    std::cout << "entanglement class " << ep.class_id << " (" << entanglement_class_name(ep.class_id) << ")\n";
    std::cout << "incompatibility class " << ip.class_id << " (" << incompatibility_class_name(ip.class_id) << ")\n";
    std::cout << "classes: (" << ep.class_id << "," << ip.class_id << ")\n";
    return kOk;
}

int cmd_tables(const report::Options& opt, const std::string& out, const std::string& csv, bool as_json) {
    const report::Report rep = report::build_report(opt);
    if (!out.empty()) emit(report::to_json(rep), out);
    if (!csv.empty()) {
        std::ofstream f(csv);
        if (!f) throw UsageError("cannot write " + csv);
        report::write_csv(rep, f);
    }
    if (as_json) {
        emit(report::to_json(rep), "");
    } else {
        report::write_text(rep, std::cout);
    }
    if (rep.count(report::Status::NotConverged) > 0) return kNotConverged;
    return rep.count(report::Status::Mismatch) > 0 ? kMismatch : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell nonlocality toolkit for the (3,2,2) scenario"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Machine-readable output");

    std::string arg;
    auto* list = app.add_subcommand("list", "Print the 46 catalog inequalities");
    auto* show = app.add_subcommand("show", "Print one catalog inequality");
    show->add_option("id", arg, "Catalog id 1..46")->required();
    auto* local = app.add_subcommand("local", "Local (deterministic) maximum");
    local->add_option("target", arg, "Catalog id or expression such as \"ABC + abC\"")->required();

    SeesawParams sp;
    std::string out, csv, level = "aq", solution;
    double class_tol = kDefaultClassTolerance;
    auto* qmax = app.add_subcommand("qmax", "Seesaw quantum maximum over three-qubit states");
    qmax->add_option("target", arg, "Catalog id or expression")->required();
    qmax->add_option("--restarts", sp.restarts, "Random restarts")->check(CLI::PositiveNumber);
    qmax->add_option("--seed", sp.master_seed, "Master seed (64-bit)");
    qmax->add_option("--tol", sp.convergence_tol, "Per-sweep convergence tolerance")->check(CLI::PositiveNumber);
    qmax->add_option("--out", out, "Write the solution document here");

    auto* npa = app.add_subcommand("npa", "NPA upper bound");
    npa->add_option("target", arg, "Catalog id or expression")->required();
    npa->add_option("--level", level, "q1, 1ab, aq or q2")->capture_default_str();

    auto* classify = app.add_subcommand("classify", "Monotones and class pair of the fixture or a solution file");
    classify->add_option("id", arg, "Catalog id 1..46")->required();
    classify->add_option("--solution", solution, "Solution document from qmax --out");
    classify->add_option("--tol", class_tol, "Class equality tolerance")->check(CLI::PositiveNumber);

    report::Options ropt;
    std::string levels = "1ab,aq";
    auto* tables = app.add_subcommand("tables", "Full reproduction report");
    tables->add_option("--restarts", ropt.seesaw.restarts, "Random restarts per inequality")
        ->check(CLI::PositiveNumber);
    tables->add_option("--seed", ropt.seesaw.master_seed, "Master seed (64-bit)");
    tables->add_option("--tol", ropt.seesaw.convergence_tol, "Per-sweep convergence tolerance")
        ->check(CLI::PositiveNumber);
    tables->add_option("--levels", levels, "Comma-separated NPA levels, or none")->capture_default_str();
    tables->add_option("--out", out, "Write the JSON report here");
    tables->add_option("--csv", csv, "Write the flat CSV table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*list) return cmd_list();
        if (*show) return cmd_show(arg, as_json);
        if (*local) return cmd_local(arg, as_json);
        if (*qmax) return cmd_qmax(arg, sp, as_json, out);
        if (*npa) return cmd_npa(arg, level, as_json);
        if (*classify) return cmd_classify(arg, solution, class_tol, as_json);
        if (*tables) {
            ropt.levels.clear();
            if (levels != "none") {
                std::stringstream ss(levels);
                for (std::string item; std::getline(ss, item, ',');) ropt.levels.push_back(level_from_flag(item));
            }
            return cmd_tables(ropt, out, csv, as_json);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMismatch;
    }
    return kUsage;
}

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellmax/monotones.hpp"
#include "bellmax/npa.hpp"
#include "bellmax/seesaw.hpp"

namespace bellmax::report {

enum class Status { Match, Mismatch, Skipped, NotConverged };

std::string to_string(Status s);

struct Check {
    std::string name;
    double value = 0.0;
    std::optional<double> expected;
    double tolerance = 0.0;
    Status status = Status::Skipped;
    std::string note;
};

struct NpaEntry {
    NpaLevel level = NpaLevel::AlmostQuantum;
    double bound = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

struct Record {
    int id = 0;
    std::int64_t local_bound = 0;
    Solution seesaw;
    double seesaw_seconds = 0.0;
    double fixture_value = 0.0;
    std::vector<NpaEntry> npa;
    EntanglementProfile entanglement;
    IncompatibilityProfile incompatibility;
    std::vector<Check> checks;

    int count(Status s) const;
};

struct Options {
    SeesawParams seesaw;
    std::vector<NpaLevel> levels{NpaLevel::OnePlusAB, NpaLevel::AlmostQuantum};
    SdpParams sdp;
    int threads = 0;  // concurrent inequalities; 0 = default_thread_count()
};

struct Report {
    Options options;
    std::vector<Record> records;  // ordered by id
    double seconds = 0.0;

    int count(Status s) const;
};

Record build_record(int id, const Options& options);
Report build_report(const Options& options);

inline constexpr const char* kSolutionSchema = "bellmax.solution/1";
inline constexpr const char* kReportSchema = "bellmax.report/1";

nlohmann::json observable_to_json(const Observable& o);
Observable observable_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const Solution& sol);
/// Reads a document written by solution_to_json; the value is recomputed by
/// the caller.
Solution solution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Report& report);
void write_csv(const Report& report, std::ostream& out);
void write_text(const Report& report, std::ostream& out);

}  // namespace bellmax::report

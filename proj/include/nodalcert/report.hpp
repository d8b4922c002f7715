#ifndef NODALCERT_REPORT_HPP
#define NODALCERT_REPORT_HPP

#include "nodalcert/complex.hpp"
#include "nodalcert/holes.hpp"
#include "nodalcert/nodal_mesh.hpp"
#include "nodalcert/quadrature.hpp"
#include "nodalcert/regularity.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nodalcert {

enum class Task { frequency, regularity, holes, topology, regularized, figures };

const char* to_string(Task t);
Task parse_task(const std::string& name); // ConfigError on unknown names

struct Tolerances {
    double frequency = 1e-3;     // |N_1 - 2|
    double mesh_residual = 1e-9; // max |u~| on nodal vertices
    double cert_margin = 0.0;    // certified infimum must exceed this
};

struct RunConfig {
    std::vector<int> n{3};
    std::vector<int> ell{1};
    std::vector<int> m{1};
    std::vector<Task> tasks;
    QuadratureSpec quadrature;
    double frequency_radius = 1.0;
    WindowSpec window; // n_xi = n_z = 0: per-configuration defaults
    HoleResolution hole_resolution;
    double cert_radius = 0.5;
    std::int64_t cert_budget = kDefaultCertBudget;
    std::int64_t betti_limit = 300'000; // Betti numbers only for meshes up to this size
    Tolerances tol;
    bool rigorous = false;
    std::string out_dir = "out";
    std::uint64_t seed = 0x5eed;

    bool has(Task t) const;
};

/// "4", "1..8" or "1,3,5"; throws ConfigError.
std::vector<int> parse_range(const std::string& text);
std::vector<Task> parse_tasks(const std::string& text);

/// Throws ConfigError unless 1 <= ell <= n - 2 for every pair, m >= 1 and
/// the task list is nonempty.
void validate(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);
/// Fields missing from `j` keep the values of `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

enum class ClaimStatus { pass, fail, inconclusive };
const char* to_string(ClaimStatus s);

struct ClaimRecord {
    std::string id;
    ClaimStatus status = ClaimStatus::inconclusive;
    double measured = 0.0;
    double tolerance = 0.0;
    double margin = 0.0;
    std::string diagnostic;
    double runtime_s = 0.0; // reported in the metadata block
};

struct ConfigRun {
    int n = 0;
    int ell = 0;
    int m = 0;
    std::vector<ClaimRecord> claims;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
    std::vector<std::string> notices;

    // artifacts kept for emit_figures
    std::optional<double> frequency;
    std::optional<double> frequency_err;
    std::shared_ptr<const SimplicialMesh> nodal;
    std::shared_ptr<const std::vector<HoleDescriptor>> holes;
};

struct VerificationReport {
    RunConfig config;
    std::vector<ConfigRun> runs;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

    /// 0 all claims pass, 1 any fail, 3 no fail but some inconclusive.
    int exit_code() const;
};

/// Runs the requested tasks for every (n, ell, m); module errors turn the
/// affected claims inconclusive.  Deterministic given config and seed.
VerificationReport run_verification(const RunConfig& config);

/// {"config", "runs", "summary", "metadata"}; only "metadata" holds timings
/// and environment data.
nlohmann::ordered_json to_json(const VerificationReport& report, bool with_metadata = true);

struct FigureFiles {
    std::vector<std::string> written; // paths relative to the output directory
    std::vector<std::string> notices;
};

/// Writes meshes/*.obj (n = 3), meshes/*.smplx, curves/*.csv (ell = 1) and
/// frequency.csv under `out`.  Throws DependencyError for an empty report or
/// a run without nodal mesh and holes.
FigureFiles emit_figures(const VerificationReport& report, const std::string& out);

/// Writes report.json under `out`.
void write_report(const VerificationReport& report, const std::string& out);

} // namespace nodalcert

#endif

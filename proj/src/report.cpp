#include "nodalcert/report.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/frequency.hpp"
#include "nodalcert/homology.hpp"
#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

namespace nodalcert {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr Task kAllTasks[] = {Task::frequency, Task::regularity, Task::holes,
                              Task::topology,  Task::regularized, Task::figures};

std::string stem(const ConfigRun& run)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "n%d_l%d_m%d", run.n, run.ell, run.m);
    return buf;
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ClaimRecord make_claim(std::string id, bool pass, double measured, double tolerance, double margin,
                       std::string diagnostic = {})
{
    ClaimRecord c;
    c.id = std::move(id);
    c.status = pass ? ClaimStatus::pass : ClaimStatus::fail;
    c.measured = measured;
    c.tolerance = tolerance;
    c.margin = margin;
    c.diagnostic = std::move(diagnostic);
    return c;
}

// Runs `body`; a thrown error becomes an inconclusive claim `id` when the
// claim was requested.  Returns false on error.
bool attempt(ConfigRun& run, const std::string& id, bool claimed, const std::function<void()>& body)
{
    const Stopwatch sw;
    try {
        body();
        return true;
    } catch (const std::exception& e) {
        if (claimed) {
            ClaimRecord c;
            c.id = id;
            c.diagnostic = e.what();
            c.runtime_s = sw.seconds();
            run.claims.push_back(std::move(c));
        } else {
            run.notices.push_back(id + ": " + e.what());
        }
        return false;
    }
}

void add_claim(ConfigRun& run, ClaimRecord c, const Stopwatch& sw)
{
    c.runtime_s = sw.seconds();
    run.claims.push_back(std::move(c));
}

IndependenceMatrix cycle_independence(const std::vector<SimplicialMesh>& cycles, int ell,
                                      const std::vector<HoleDescriptor>& holes, std::uint64_t seed)
{
    std::vector<SimplicialMesh> projected;
    std::vector<std::vector<double>> witnesses;
    for (std::size_t j = 0; j < cycles.size(); ++j) {
        projected.push_back(drop_coordinate(cycles[j], ell));
        witnesses.push_back(holes.at(j).witness);
    }
    DegreeOptions opt;
    opt.seed = seed;
    return independence_matrix(projected, witnesses, opt);
}

ConfigRun run_one(const RunConfig& cfg, int n, int ell, int m)
{
    ConfigRun run;
    run.n = n;
    run.ell = ell;
    run.m = m;
    const auto p = derive_params(n, ell, m);
    const bool want_mesh = cfg.has(Task::topology) || cfg.has(Task::regularity) ||
                           cfg.has(Task::regularized) || cfg.has(Task::figures);
    const bool want_holes = cfg.has(Task::holes) || cfg.has(Task::topology) ||
                            cfg.has(Task::regularized) || cfg.has(Task::figures);

    if (cfg.has(Task::frequency) || cfg.has(Task::figures)) {
        attempt(run, "frequency", cfg.has(Task::frequency), [&] {
            const Stopwatch sw;
            const auto f = frequency(p, cfg.frequency_radius, cfg.quadrature, FieldKind::family);
            run.frequency = f.value;
            run.frequency_err = f.err_est;
            run.details["frequency"] = {{"radius", cfg.frequency_radius},
                                        {"value", f.value},
                                        {"err_est", f.err_est},
                                        {"dirichlet", f.dirichlet.value},
                                        {"boundary_l2", f.boundary_l2.value}};
            if (!cfg.has(Task::frequency)) {
                return;
            }
            const double dev = std::abs(f.value - 2.0);
            auto c = make_claim("frequency", dev + f.err_est <= cfg.tol.frequency, f.value,
                                cfg.tol.frequency, cfg.tol.frequency - dev);
            if (c.status == ClaimStatus::fail && dev - f.err_est <= cfg.tol.frequency) {
                c.status = ClaimStatus::inconclusive;
                c.diagnostic = "quadrature error estimate straddles the tolerance";
            }
            add_claim(run, std::move(c), sw);
        });
    }

    if (cfg.has(Task::regularity)) {
        attempt(run, "regularity.critical_system", true, [&] {
            const Stopwatch sw;
            const auto r = critical_system_check(p);
            run.details["critical_system"] = {{"x1_star", r.x1_star},
                                              {"lhs", r.lhs},
                                              {"rhs_log", r.rhs_log},
                                              {"log_margin", r.log_margin},
                                              {"consistent", r.consistent}};
            add_claim(run,
                      make_claim("regularity.critical_system", !r.consistent && r.plus_branch_impossible,
                                 r.log_margin, 0.0, r.log_margin,
                                 r.consistent ? "critical system admits a solution" : ""),
                      sw);
        });
        if (cfg.rigorous) {
            attempt(run, "regularity.certificate", true, [&] {
                const Stopwatch sw;
                const auto c = certify_no_singular_zeros(p, cfg.cert_radius, cfg.cert_budget);
                run.details["certificate"] = {{"region", c.region},
                                              {"quantity", c.quantity},
                                              {"status", to_string(c.status)},
                                              {"margin", c.margin},
                                              {"boxes_processed", c.boxes_processed}};
                auto claim = make_claim("regularity.certificate",
                                        c.status == CertStatus::proved && c.margin > cfg.tol.cert_margin,
                                        c.margin, cfg.tol.cert_margin, c.margin - cfg.tol.cert_margin);
                if (c.status == CertStatus::budget_exhausted) {
                    claim.status = ClaimStatus::inconclusive;
                    claim.diagnostic = "box budget exhausted";
                } else if (c.status == CertStatus::failed) {
                    claim.diagnostic = "a box encloses a possible singular zero";
                }
                add_claim(run, std::move(claim), sw);
            });
        }
    }

    std::shared_ptr<std::vector<HoleDescriptor>> holes;
    if (want_holes) {
        attempt(run, "holes.layout", cfg.has(Task::holes), [&] {
            const Stopwatch sw;
            holes = std::make_shared<std::vector<HoleDescriptor>>(build_holes(p, cfg.hole_resolution));
            if (!cfg.has(Task::holes)) {
                return;
            }
            const auto rep = verify_hole_layout(p, *holes);
            run.details["holes"] = {{"count", holes->size()},
                                    {"horizontal_min", rep.horizontal_min},
                                    {"vertical_min", rep.vertical_min},
                                    {"vertical_floor", rep.vertical_floor},
                                    {"scan_points", rep.scan_points},
                                    {"min_witness_depth", min_witness_depth(p, *holes)}};
            std::string diag;
            for (const auto& v : rep.violations) {
                diag += (diag.empty() ? "" : "; ") + v;
            }
            add_claim(run,
                      make_claim("holes.layout", rep.ok() && holes->size() == static_cast<std::size_t>(2 * m),
                                 rep.vertical_min, 0.0, rep.vertical_min, diag),
                      sw);
        });
        if (holes) {
            run.holes = holes;
        }
    }

    std::shared_ptr<SimplicialMesh> mesh;
    if (want_mesh) {
        try {
            mesh = std::make_shared<SimplicialMesh>(mesh_nodal_set(p, cfg.window));
        } catch (const std::exception& e) {
            for (auto [task, id] : {std::pair{Task::regularity, "regularity.nodal_gradient"},
                                    std::pair{Task::topology, "topology.nodal_mesh"}}) {
                if (cfg.has(task)) {
                    ClaimRecord c;
                    c.id = id;
                    c.diagnostic = e.what();
                    run.claims.push_back(std::move(c));
                }
            }
            run.notices.push_back(std::string("nodal mesh: ") + e.what());
        }
    }

    if (mesh && (cfg.has(Task::topology) || cfg.has(Task::regularity))) {
        const Stopwatch sw;
        const auto vr = check_nodal_vertices(p, *mesh);
        run.details["nodal_mesh"] = {{"vertices", vr.vertex_count},
                                     {"simplices", mesh->simplices.size()},
                                     {"max_residual", vr.max_residual},
                                     {"min_raw_gradient", vr.min_raw_gradient},
                                     {"min_scaled_gradient", vr.min_scaled_gradient},
                                     {"max_branch_upsilon", vr.max_branch_upsilon}};
        const double elapsed = sw.seconds();
        if (cfg.has(Task::regularity)) {
            auto c = make_claim("regularity.nodal_gradient",
                                vr.min_raw_gradient > 0.0 && vr.max_residual <= cfg.tol.mesh_residual,
                                vr.min_raw_gradient, 0.0, vr.min_raw_gradient);
            if (vr.max_residual > cfg.tol.mesh_residual) {
                c.diagnostic = "nodal vertices off the zero set";
            } else if (vr.min_raw_gradient <= 0.0 && vr.min_scaled_gradient > 0.0) {
                c.status = ClaimStatus::inconclusive;
                c.diagnostic = "raw gradient underflows; scaled gradient is positive";
            }
            c.runtime_s = elapsed;
            run.claims.push_back(std::move(c));
        }
        if (cfg.has(Task::topology)) {
            const Stopwatch sw2;
            const bool small = static_cast<std::int64_t>(mesh->simplices.size()) <= cfg.betti_limit;
            std::int64_t defects = 0;
            if (small) {
                defects = interior_face_defects(*mesh, cfg.window);
                run.details["nodal_mesh"]["interior_face_defects"] = defects;
            }
            add_claim(run,
                      make_claim("topology.nodal_mesh", vr.max_residual <= cfg.tol.mesh_residual && defects == 0,
                                 vr.max_residual, cfg.tol.mesh_residual,
                                 cfg.tol.mesh_residual - vr.max_residual,
                                 defects ? "mesh has interior face defects" : ""),
                      sw2);
            if (small) {
                attempt(run, "topology.betti", true, [&] {
                    const Stopwatch sw3;
                    const auto b = betti_numbers(*mesh);
                    run.details["betti"] = b;
                    const double b_ell = static_cast<double>(b.at(static_cast<std::size_t>(ell)));
                    add_claim(run, make_claim("topology.betti", b_ell >= 2.0 * m, b_ell, 2.0 * m, b_ell - 2.0 * m),
                              sw3);
                });
            } else {
                char buf[128];
                std::snprintf(buf, sizeof buf, "Betti numbers skipped: %zu simplices exceed the limit %lld",
                              mesh->simplices.size(), static_cast<long long>(cfg.betti_limit));
                run.notices.emplace_back(buf);
            }
        }
    }

    if (cfg.has(Task::topology)) {
        attempt(run, "topology.independence", true, [&] {
            if (!holes) {
                throw DependencyError("holes unavailable");
            }
            Stopwatch sw;
            const auto cycles = extract_gamma_cycles(p, *holes);
            bool closed = true;
            bool contained = true;
            double max_r2 = 0.0;
            double max_res = 0.0;
            for (const auto& g : cycles) {
                const auto gr = check_gamma_cycle(p, g);
                closed = closed && gr.closed;
                contained = contained && gr.contained;
                max_r2 = std::max(max_r2, gr.max_raw_radius2);
                max_res = std::max(max_res, gr.max_residual);
            }
            run.details["gamma"] = {{"cycles", cycles.size()},
                                    {"closed", closed},
                                    {"max_residual", max_res},
                                    {"max_raw_radius2", max_r2}};
            add_claim(run,
                      make_claim("topology.containment", closed && contained, max_r2, 0.25, 0.25 - max_r2,
                                 closed ? (contained ? "" : "a cycle leaves the containment ball")
                                        : "a cycle is not closed"),
                      sw);
            sw = Stopwatch{};
            const auto im = cycle_independence(cycles, ell, *holes, cfg.seed);
            run.details["independence_matrix"] = im.entries;
            add_claim(run,
                      make_claim("topology.independence", im.is_identity() && im.rank >= 2 * m,
                                 static_cast<double>(im.rank), 2.0 * m, im.rank - 2.0 * m,
                                 im.is_identity() ? "" : "degree matrix is not the identity"),
                      sw);
        });
    }

    if (cfg.has(Task::regularized)) {
        attempt(run, "regularized.independence", true, [&] {
            if (!holes || !mesh) {
                throw DependencyError("nodal mesh or holes unavailable");
            }
            const Stopwatch sw;
            const double a_m = min_witness_depth(p, *holes);
            const double theta = a_m / 4.0;
            const double eps = theta / 100.0;
            const auto rl = mesh_regularized_level_set(p, eps, theta, *mesh, *holes);
            const auto plus = cycle_independence(rl.cycles_plus, ell, *holes, cfg.seed);
            const auto minus = cycle_independence(rl.cycles_minus, ell, *holes, cfg.seed);
            run.details["regularized"] = {{"a_m", a_m},
                                          {"theta", theta},
                                          {"eps", eps},
                                          {"max_residual", rl.max_residual},
                                          {"max_abs_u", rl.max_abs_u},
                                          {"min_witness_distance", rl.min_witness_distance},
                                          {"matrix_plus", plus.entries},
                                          {"matrix_minus", minus.entries}};
            const bool ok = plus.is_identity() && minus.is_identity() && plus.rank >= 2 * m &&
                            minus.rank >= 2 * m;
            const double rank = std::min(plus.rank, minus.rank);
            add_claim(run,
                      make_claim("regularized.independence", ok, rank, 2.0 * m, rank - 2.0 * m,
                                 ok ? "" : "perturbed degree matrix is not the identity"),
                      sw);
        });
    }

    if (cfg.has(Task::figures)) {
        run.nodal = mesh;
    }
    if (!cfg.has(Task::figures)) {
        run.holes.reset();
    }
    return run;
}

std::string utc_timestamp()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

std::vector<int> read_range(const nlohmann::json& v)
{
    if (v.is_number_integer()) {
        return {v.get<int>()};
    }
    if (v.is_string()) {
        return parse_range(v.get<std::string>());
    }
    if (v.is_array()) {
        return v.get<std::vector<int>>();
    }
    throw ConfigError("a range must be an integer, a string or an array");
}

} // namespace

const char* to_string(Task t)
{
    switch (t) {
    case Task::frequency:
        return "frequency";
    case Task::regularity:
        return "regularity";
    case Task::holes:
        return "holes";
    case Task::topology:
        return "topology";
    case Task::regularized:
        return "regularized";
    case Task::figures:
        return "figures";
    }
    return "?";
}

Task parse_task(const std::string& name)
{
    for (Task t : kAllTasks) {
        if (name == to_string(t)) {
            return t;
        }
    }
    throw ConfigError("unknown task '" + name + "'");
}

const char* to_string(ClaimStatus s)
{
    switch (s) {
    case ClaimStatus::pass:
        return "pass";
    case ClaimStatus::fail:
        return "fail";
    case ClaimStatus::inconclusive:
        return "inconclusive";
    }
    return "?";
}

bool RunConfig::has(Task t) const
{
    return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

std::vector<int> parse_range(const std::string& text)
{
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad integer '" + s + "' in range '" + text + "'");
        }
        if (used != s.size()) {
            throw ConfigError("bad integer '" + s + "' in range '" + text + "'");
        }
        return v;
    };
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = to_int(text.substr(0, dots));
        const int hi = to_int(text.substr(dots + 2));
        if (hi < lo) {
            throw ConfigError("empty range '" + text + "'");
        }
        for (int v = lo; v <= hi; ++v) {
            out.push_back(v);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        out.push_back(to_int(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

std::vector<Task> parse_tasks(const std::string& text)
{
    std::vector<Task> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        const std::string name = text.substr(start, end - start);
        if (name == "all") {
            out.assign(std::begin(kAllTasks), std::end(kAllTasks));
        } else {
            out.push_back(parse_task(name));
        }
        start = end + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void validate(const RunConfig& c)
{
    if (c.n.empty() || c.ell.empty() || c.m.empty()) {
        throw ConfigError("n, ell and m ranges must be nonempty");
    }
    if (c.tasks.empty()) {
        throw ConfigError("no tasks requested");
    }
    for (int n : c.n) {
        for (int ell : c.ell) {
            if (ell < 1 || ell > n - 2) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "(n, ell) = (%d, %d) violates 1 <= ell <= n - 2", n, ell);
                throw ConfigError(buf);
            }
        }
    }
    for (int m : c.m) {
        if (m < 1) {
            throw ConfigError("m must be at least 1");
        }
    }
    if (!(c.tol.frequency > 0.0) || !(c.tol.mesh_residual > 0.0) || !(c.tol.cert_margin >= 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (!(c.frequency_radius > 0.0 && c.frequency_radius <= 1.0)) {
        throw ConfigError("frequency radius must lie in (0, 1]");
    }
    if (!(c.cert_radius > 0.0 && c.cert_radius < 1.0) || c.cert_budget < 1) {
        throw ConfigError("certificate radius must lie in (0, 1) with a positive budget");
    }
    if (c.out_dir.empty()) {
        throw ConfigError("empty output directory");
    }
}

json to_json(const RunConfig& c)
{
    json tasks = json::array();
    for (Task t : c.tasks) {
        tasks.push_back(to_string(t));
    }
    return {{"n", c.n},
            {"ell", c.ell},
            {"m", c.m},
            {"tasks", tasks},
            {"quadrature",
             {{"radial_nodes", c.quadrature.radial_nodes},
              {"angular_degree", c.quadrature.angular_degree},
              {"target_rel_tol", c.quadrature.target_rel_tol},
              {"max_refinements", c.quadrature.max_refinements}}},
            {"frequency_radius", c.frequency_radius},
            {"window", {{"xi_radius", c.window.xi_radius}, {"n_xi", c.window.n_xi}, {"n_z", c.window.n_z}}},
            {"hole_resolution", {{"n_z", c.hole_resolution.n_z}, {"n_omega", c.hole_resolution.n_omega}}},
            {"cert_radius", c.cert_radius},
            {"cert_budget", c.cert_budget},
            {"betti_limit", c.betti_limit},
            {"tolerances",
             {{"frequency", c.tol.frequency},
              {"mesh_residual", c.tol.mesh_residual},
              {"cert_margin", c.tol.cert_margin}}},
            {"rigorous", c.rigorous},
            {"out_dir", c.out_dir},
            {"seed", c.seed}};
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c)
{
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    try {
        if (j.contains("n")) {
            c.n = read_range(j.at("n"));
        }
        if (j.contains("ell")) {
            c.ell = read_range(j.at("ell"));
        }
        if (j.contains("m")) {
            c.m = read_range(j.at("m"));
        }
        if (j.contains("tasks")) {
            const auto& t = j.at("tasks");
            std::string joined;
            if (t.is_string()) {
                joined = t.get<std::string>();
            } else {
                for (const auto& name : t) {
                    joined += (joined.empty() ? "" : ",") + name.get<std::string>();
                }
            }
            c.tasks = parse_tasks(joined);
        }
        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            read_field(q, "radial_nodes", c.quadrature.radial_nodes);
            read_field(q, "angular_degree", c.quadrature.angular_degree);
            read_field(q, "target_rel_tol", c.quadrature.target_rel_tol);
            read_field(q, "max_refinements", c.quadrature.max_refinements);
        }
        read_field(j, "frequency_radius", c.frequency_radius);
        if (j.contains("window")) {
            const auto& w = j.at("window");
            read_field(w, "xi_radius", c.window.xi_radius);
            read_field(w, "n_xi", c.window.n_xi);
            read_field(w, "n_z", c.window.n_z);
        }
        if (j.contains("hole_resolution")) {
            const auto& h = j.at("hole_resolution");
            read_field(h, "n_z", c.hole_resolution.n_z);
            read_field(h, "n_omega", c.hole_resolution.n_omega);
        }
        read_field(j, "cert_radius", c.cert_radius);
        read_field(j, "cert_budget", c.cert_budget);
        read_field(j, "betti_limit", c.betti_limit);
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            read_field(t, "frequency", c.tol.frequency);
            read_field(t, "mesh_residual", c.tol.mesh_residual);
            read_field(t, "cert_margin", c.tol.cert_margin);
        }
        read_field(j, "rigorous", c.rigorous);
        read_field(j, "out_dir", c.out_dir);
        read_field(j, "seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad configuration value: ") + e.what());
    }
    return c;
}

int VerificationReport::exit_code() const
{
    bool inconclusive = false;
    for (const auto& run : runs) {
        for (const auto& c : run.claims) {
            if (c.status == ClaimStatus::fail) {
                return 1;
            }
            inconclusive = inconclusive || c.status == ClaimStatus::inconclusive;
        }
    }
    return inconclusive ? 3 : 0;
}

VerificationReport run_verification(const RunConfig& config)
{
    validate(config);
    VerificationReport report;
    report.config = config;
    struct Triple {
        int n, ell, m;
    };
    std::vector<Triple> triples;
    for (int n : config.n) {
        for (int ell : config.ell) {
            for (int m : config.m) {
                triples.push_back({n, ell, m});
            }
        }
    }
    const Stopwatch total;
    report.metadata["started_utc"] = utc_timestamp();
    report.runs.resize(triples.size());
    parallel_for(triples.size(), 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            report.runs[i] = run_one(config, triples[i].n, triples[i].ell, triples[i].m);
        }
    });
    json timings = json::array();
    for (const auto& run : report.runs) {
        for (const auto& c : run.claims) {
            timings.push_back({{"n", run.n}, {"ell", run.ell}, {"m", run.m}, {"claim", c.id},
                               {"runtime_s", c.runtime_s}});
        }
    }
    report.metadata["total_runtime_s"] = total.seconds();
    report.metadata["timings"] = timings;
    report.metadata["hardware_threads"] = std::thread::hardware_concurrency();
#ifdef __VERSION__
    report.metadata["compiler"] = __VERSION__;
#endif
    return report;
}

json to_json(const VerificationReport& report, bool with_metadata)
{
    json runs = json::array();
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& run : report.runs) {
        json claims = json::array();
        for (const auto& c : run.claims) {
            ++counts[static_cast<int>(c.status)];
            claims.push_back({{"id", c.id},
                              {"status", to_string(c.status)},
                              {"measured", c.measured},
                              {"tolerance", c.tolerance},
                              {"margin", c.margin},
                              {"diagnostic", c.diagnostic}});
        }
        runs.push_back({{"n", run.n},
                        {"ell", run.ell},
                        {"m", run.m},
                        {"claims", claims},
                        {"details", run.details},
                        {"notices", run.notices}});
    }
    const int code = report.exit_code();
    json out = {{"config", to_json(report.config)},
                {"runs", runs},
                {"summary",
                 {{"pass", counts[0]},
                  {"fail", counts[1]},
                  {"inconclusive", counts[2]},
                  {"status", code == 0 ? "pass" : code == 1 ? "fail" : "inconclusive"},
                  {"exit_code", code}}}};
    if (with_metadata) {
        out["metadata"] = report.metadata;
    }
    return out;
}

FigureFiles emit_figures(const VerificationReport& report, const std::string& out)
{
    if (report.runs.empty()) {
        throw DependencyError("report has no runs");
    }
    for (const auto& run : report.runs) {
        if (!run.nodal || !run.holes) {
            throw DependencyError("nodal mesh and holes missing for " + stem(run) +
                                  "; run the topology and figures tasks");
        }
    }
    const fs::path root(out);
    fs::create_directories(root / "meshes");
    fs::create_directories(root / "curves");
    FigureFiles files;
    auto open = [&](const fs::path& rel) {
        std::ofstream os(root / rel);
        if (!os) {
            throw FormatError("cannot write " + (root / rel).string());
        }
        files.written.push_back(rel.generic_string());
        return os;
    };
    for (const auto& run : report.runs) {
        const std::string s = stem(run);
        {
            auto os = open(fs::path("meshes") / ("nodal_" + s + ".smplx"));
            write_simplicial_text(os, *run.nodal);
        }
        if (run.n == 3) {
            auto os = open(fs::path("meshes") / ("nodal_" + s + ".obj"));
            write_obj(os, *run.nodal);
        } else {
            files.notices.push_back("OBJ skipped for " + s + ": surface export needs n = 3");
        }
        if (run.ell == 1) {
            auto os = open(fs::path("curves") / ("holes_" + s + ".csv"));
            write_hole_curves_csv(os, *run.holes);
        } else {
            files.notices.push_back("hole curves skipped for " + s + ": boundaries are not curves");
        }
    }
    auto os = open("frequency.csv");
    os << "n,ell,m,N1,err_est\n";
    for (const auto& run : report.runs) {
        if (run.frequency) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.3g\n", run.n, run.ell, run.m, *run.frequency,
                          run.frequency_err.value_or(0.0));
            os << buf;
        }
    }
    return files;
}

void write_report(const VerificationReport& report, const std::string& out)
{
    fs::create_directories(out);
    std::ofstream os(fs::path(out) / "report.json");
    if (!os) {
        throw FormatError("cannot write report.json under " + out);
    }
    os << to_json(report).dump(2) << '\n';
}

} // namespace nodalcert

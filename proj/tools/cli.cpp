#include "cli.hpp"

#include <geoflow/diagnostics.hpp>
#include <geoflow/error.hpp>
#include <geoflow/mesh_io.hpp>
#include <geoflow/operators.hpp>
#include <geoflow/run.hpp>
#include <geoflow/shapes.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

namespace geoflow::cli {

namespace {

using nlohmann::ordered_json;

using FieldRef = std::variant<std::string RunManifest::*, int RunManifest::*, long RunManifest::*,
    double RunManifest::*, std::uint64_t RunManifest::*>;

struct Field
{
    const char* key;
    FieldRef ref;
    const char* help;
};

const std::vector<Field>& fields()
{
    static const std::vector<Field> all = {
        {"input", &RunManifest::input, "input mesh (.obj or .off)"},
        {"output", &RunManifest::output, "output path"},
        {"csv", &RunManifest::csv, "diagnostics CSV (default: output with .csv)"},
        {"json", &RunManifest::json, "diagnostics JSON (default: output with .json)"},
        {"shape", &RunManifest::shape, "icosphere | ellipsoid | torus | disk"},
        {"subdiv", &RunManifest::subdiv, "subdivision level"},
        {"radius", &RunManifest::radius, "sphere or disk radius"},
        {"noise", &RunManifest::noise, "noise amplitude (0 = clean)"},
        {"seed", &RunManifest::seed, "noise RNG seed"},
        {"flow", &RunManifest::flow, "sdf | wf | qsdf | mcf"},
        {"scheme", &RunManifest::scheme, "explicit | semi-implicit"},
        {"dt", &RunManifest::dt, "time step, or auto"},
        {"safety", &RunManifest::safety, "auto-dt safety factor, or auto"},
        {"steps", &RunManifest::steps, "number of steps"},
        {"boundary", &RunManifest::boundary, "free | g0 | g1"},
        {"solver", &RunManifest::solver, "direct | cg"},
        {"solver-tol", &RunManifest::solver_tol, "relative residual tolerance"},
        {"stop-tol", &RunManifest::stop_tol, "stop when the monitored energy changes less than this (0 = off)"},
        {"volume-drift-tol", &RunManifest::volume_drift_tol, "SDF volume drift threshold"},
        {"monotone-slack", &RunManifest::monotone_slack, "allowed relative per-step energy increase"},
        {"area-rate-tol", &RunManifest::area_rate_tol, "SDF area-rate mismatch threshold"},
        {"short-time", &RunManifest::short_time, "short comparison horizon, or auto"},
        {"long-time", &RunManifest::long_time, "long comparison horizon, or auto"},
        {"long-steps", &RunManifest::long_steps, "steps for the long horizon"},
    };
    return all;
}

const Field& field(const std::string& key)
{
    for (const Field& f : fields()) {
        if (key == f.key) return f;
    }
    throw ConfigError("unknown manifest key '" + key + "'");
}

const std::map<std::string, std::vector<std::string>>& keys_by_subcommand()
{
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"gen", {"shape", "subdiv", "radius", "noise", "seed", "output"}},
        {"evolve", {"input", "output", "csv", "json", "flow", "scheme", "dt", "safety", "steps", "boundary", "solver",
                       "solver-tol", "stop-tol", "volume-drift-tol", "monotone-slack", "area-rate-tol"}},
        {"smooth", {"input", "output", "flow", "scheme", "dt", "safety", "steps", "boundary", "solver", "solver-tol"}},
        {"compare", {"input", "output", "scheme", "steps", "long-steps", "short-time", "long-time", "solver",
                        "solver-tol"}},
        {"validate", {"input"}},
    };
    return keys;
}

ordered_json field_to_json(const RunManifest& m, const Field& f)
{
    return std::visit([&](auto ptr) { return ordered_json(m.*ptr); }, f.ref);
}

void field_from_json(RunManifest& m, const Field& f, const nlohmann::json& value)
{
    try {
        std::visit([&](auto ptr) { value.get_to(m.*ptr); }, f.ref);
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("manifest key '") + f.key + "' has the wrong type");
    }
}

void copy_field(RunManifest& dst, const RunManifest& src, const Field& f)
{
    std::visit([&](auto ptr) { dst.*ptr = src.*ptr; }, f.ref);
}

/// "auto" -> nullopt; otherwise a positive number.
std::optional<double> auto_or_positive(const std::string& text, const char* what)
{
    if (text == "auto") return std::nullopt;
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(what) + " must be 'auto' or a positive number (got '" + text + "')");
    }
    return value;
}

void require(const std::string& value, const char* flag)
{
    if (value.empty()) throw ConfigError(std::string("missing required --") + flag);
}

std::string number(double x)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

std::filesystem::path sibling(const std::string& output, const std::string& override_path, const char* ext)
{
    if (!override_path.empty()) return override_path;
    return std::filesystem::path(output).replace_extension(ext);
}

StepConfig step_config(const RunManifest& m)
{
    StepConfig cfg;
    cfg.scheme = scheme_from_string(m.scheme);
    if (auto dt = auto_or_positive(m.dt, "--dt")) cfg.dt = *dt;
    if (auto c = auto_or_positive(m.safety, "--safety")) cfg.safety = *c;
    cfg.steps = m.steps;
    cfg.solver.method = solver_method_from_string(m.solver);
    cfg.solver.tolerance = m.solver_tol;
    if (m.stop_tol < 0.0) throw ConfigError("--stop-tol must be >= 0");
    if (m.stop_tol > 0.0) cfg.stop_energy_change = m.stop_tol;
    cfg.validate();
    return cfg;
}

BoundaryConstraint constraint_with_notes(const TriMesh& mesh, const RunManifest& m, FlowKind kind, std::ostream& out,
    std::ostream& err)
{
    const BoundaryMode mode = boundary_mode_from_string(m.boundary);
    BoundaryConstraint c = classify_boundary(mesh, mode);
    if (c.no_boundary_warning()) {
        err << "warning: mesh has no boundary; --boundary " << to_string(mode) << " ignored, running free\n";
    }
    if (c.mode() == BoundaryMode::G1 && !is_fourth_order(kind)) {
        out << "note: g1 with a second-order flow clamps an extra ring; the run is over-constrained\n";
    }
    if (c.mode() == BoundaryMode::G0 && is_fourth_order(kind)) {
        out << "note: g0 with a fourth-order flow is under-constrained; tangent planes at the rim are free\n";
    }
    if (c.mode() == BoundaryMode::Free && !mesh.is_closed()) {
        out << "note: free boundary on an open mesh; rim vertices move\n";
    }
    return c;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

double rms_distance(const Positions& a, const Positions& b)
{
    return std::sqrt((a - b).rowwise().squaredNorm().mean());
}

} // namespace

RunManifest defaults_for(const std::string& subcommand)
{
    RunManifest m;
    m.subcommand = subcommand;
    if (subcommand == "smooth") {
        m.flow = "wf";
        m.steps = 20;
    } else if (subcommand == "compare") {
        m.steps = 20;
    }
    return m;
}

const std::vector<std::string>& manifest_keys(const std::string& subcommand)
{
    const auto& all = keys_by_subcommand();
    const auto it = all.find(subcommand);
    if (it == all.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    return it->second;
}

std::string manifest_to_json(const RunManifest& m)
{
    ordered_json doc;
    doc["subcommand"] = m.subcommand;
    for (const std::string& key : manifest_keys(m.subcommand)) doc[key] = field_to_json(m, field(key));
    return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text, const std::string& expected_subcommand)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("subcommand") || !doc["subcommand"].is_string()) {
        throw ConfigError("manifest needs a string 'subcommand'");
    }
    const std::string sub = doc["subcommand"].get<std::string>();
    if (!expected_subcommand.empty() && sub != expected_subcommand) {
        throw ConfigError("manifest is for '" + sub + "', not '" + expected_subcommand + "'");
    }
    RunManifest m = defaults_for(sub);
    const auto& allowed = manifest_keys(sub);
    for (const auto& [key, value] : doc.items()) {
        if (key == "subcommand") continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("manifest key '" + key + "' does not apply to '" + sub + "'");
        }
        field_from_json(m, field(key), value);
    }
    return m;
}

int cmd_gen(const RunManifest& m, std::ostream& out, std::ostream&)
{
    require(m.output, "output");
    ShapeSpec spec;
    spec.kind = shape_kind_from_string(m.shape);
    spec.subdivision = m.subdiv;
    spec.radius = m.radius;
    spec.noise = m.noise;
    spec.seed = m.seed;
    const TriMesh mesh = generate_shape(spec);
    save_mesh(mesh, m.output);
    out << "wrote " << m.output << ": " << mesh.vertex_count() << " vertices, " << mesh.face_count() << " faces\n";
    return kExitOk;
}

int cmd_evolve(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    require(m.input, "input");
    require(m.output, "output");
    const FlowKind kind = flow_kind_from_string(m.flow);
    const StepConfig cfg = step_config(m);
    IdentityTolerances tol;
    tol.volume_drift = m.volume_drift_tol;
    tol.monotone_slack = m.monotone_slack;
    tol.area_rate = m.area_rate_tol;
    const auto csv_path = sibling(m.output, m.csv, ".csv");
    const auto json_path = sibling(m.output, m.json, ".json");
    format_from_path(m.output);

    const TriMesh mesh = load_mesh(m.input);
    const BoundaryConstraint constraint = constraint_with_notes(mesh, m, kind, out, err);

    RunMetadata meta;
    meta.provenance = "geoflow evolve " + m.input;
    const RunResult r = run_flow(mesh, kind, constraint, cfg, meta);

    save_mesh(r.final_state.mesh(), m.output);
    emit(r.series, csv_path, SeriesFormat::Csv);
    emit(r.series, json_path, SeriesFormat::Json);

    out << "flow " << to_string(kind) << ", scheme " << to_string(cfg.scheme) << ", boundary "
        << to_string(constraint.mode()) << ", dt " << number(r.dt) << ", steps " << r.final_state.step() << "/"
        << cfg.steps << " (" << to_string(r.reason) << ")\n";
    if (r.stopped_early()) {
        err << "error: " << to_string(r.reason) << " at step " << r.final_state.step() + 1 << ": " << r.message
            << "\n";
    }
    int code = kExitOk;
    if (r.series.size() >= 2) {
        const IdentityReport report = check_identities(r.series, kind, tol);
        out << format_report(report);
        if (!report.passed()) code = kExitIdentityFailure;
    }
    if (r.stopped_early()) code = kExitBlowUp;
    return code;
}

int cmd_smooth(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    require(m.input, "input");
    require(m.output, "output");
    const FlowKind kind = flow_kind_from_string(m.flow);
    const StepConfig cfg = step_config(m);
    format_from_path(m.output);

    const TriMesh mesh = load_mesh(m.input);
    const BoundaryConstraint constraint = constraint_with_notes(mesh, m, kind, out, err);
    RunMetadata meta;
    meta.provenance = "geoflow smooth " + m.input;
    const RunResult r = run_flow(mesh, kind, constraint, cfg, meta);
    save_mesh(r.final_state.mesh(), m.output);

    const double before = roughness(mesh);
    const double after = roughness(r.final_state.mesh());
    out << "flow " << to_string(kind) << ", dt " << number(r.dt) << ", steps " << r.final_state.step() << " ("
        << to_string(r.reason) << ")\n";
    out << "roughness before: " << number(before) << "\n";
    out << "roughness after: " << number(after) << "\n";
    out << "roughness change: " << number(before > 0.0 ? (after - before) / before : 0.0) << "\n";
    const auto& recs = r.series.records();
    if (recs.front().volume && recs.back().volume) {
        out << "volume: " << number(*recs.front().volume) << " -> " << number(*recs.back().volume) << "\n";
    }
    if (r.stopped_early()) {
        err << "error: " << to_string(r.reason) << ": " << r.message << "\n";
        return kExitBlowUp;
    }
    return kExitOk;
}

int cmd_compare(const RunManifest& m, std::ostream& out, std::ostream&)
{
    require(m.input, "input");
    require(m.output, "output");
    const TriMesh mesh = load_mesh(m.input);
    if (!mesh.is_closed()) throw Error("compare requires closed mesh");
    RunManifest base = m;
    base.dt = "auto";
    base.safety = "auto";
    base.stop_tol = 0.0;
    StepConfig cfg = step_config(base);
    if (m.long_steps < 1) throw ConfigError("--long-steps must be >= 1");

    const double h = min_edge_length(mesh);
    const double short_time = auto_or_positive(m.short_time, "--short-time").value_or(std::pow(h, 4));
    const double long_time = auto_or_positive(m.long_time, "--long-time").value_or(100.0 * short_time);
    const BoundaryConstraint constraint = classify_boundary(mesh, BoundaryMode::Free);
    constexpr std::array<FlowKind, 3> kinds = {FlowKind::SDF, FlowKind::WF, FlowKind::QSDF};

    std::ostringstream flows_csv, pairs_csv;
    flows_csv << "horizon,flow,status,time,steps,dt,rms_displacement,area,volume,willmore,biharmonic\n";
    pairs_csv << "horizon,flow_a,flow_b,rms_distance,mean_displacement,ratio\n";
    bool any_failed = false;

    struct Horizon
    {
        const char* name;
        double time;
        long steps;
    };
    for (const Horizon& hz : {Horizon{"short", short_time, m.steps}, Horizon{"long", long_time, m.long_steps}}) {
        StepConfig c = cfg;
        c.steps = hz.steps;
        c.dt = hz.time / static_cast<double>(hz.steps);
        std::array<std::future<RunResult>, 3> jobs;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            jobs[k] = std::async(std::launch::async, [&, k] { return run_flow(mesh, kinds[k], constraint, c); });
        }
        std::vector<RunResult> results;
        for (auto& j : jobs) results.push_back(j.get());

        out << hz.name << " horizon: t = " << number(hz.time) << " (" << hz.steps << " steps)\n";
        double mean_disp = 0.0;
        std::vector<double> disp;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const RunResult& r = results[k];
            const DiagnosticsRecord& last = r.series.records().back();
            const double d = rms_distance(r.final_state.mesh().positions(), mesh.positions());
            disp.push_back(d);
            mean_disp += d / static_cast<double>(kinds.size());
            any_failed = any_failed || r.stopped_early();
            flows_csv << hz.name << ',' << to_string(kinds[k]) << ',' << to_string(r.reason) << ','
                      << number(last.time) << ',' << last.step << ',' << number(*c.dt) << ',' << number(d) << ','
                      << number(last.area) << ',' << (last.volume ? number(*last.volume) : "") << ','
                      << number(last.willmore) << ',' << number(last.biharmonic) << '\n';
            out << "  " << to_string(kinds[k]) << ": " << to_string(r.reason) << ", rms displacement " << number(d)
                << ", W " << number(last.willmore) << "\n";
        }
        for (std::size_t a = 0; a < kinds.size(); ++a) {
            for (std::size_t b = a + 1; b < kinds.size(); ++b) {
                pairs_csv << hz.name << ',' << to_string(kinds[a]) << ',' << to_string(kinds[b]) << ',';
                if (results[a].stopped_early() || results[b].stopped_early()) {
                    pairs_csv << ",,\n";
                    out << "  " << to_string(kinds[a]) << " vs " << to_string(kinds[b]) << ": n/a\n";
                    continue;
                }
                const double dist = rms_distance(
                    results[a].final_state.mesh().positions(), results[b].final_state.mesh().positions());
                const double ratio = mean_disp > 0.0 ? dist / mean_disp : 0.0;
                pairs_csv << number(dist) << ',' << number(mean_disp) << ',' << number(ratio) << '\n';
                out << "  " << to_string(kinds[a]) << " vs " << to_string(kinds[b]) << ": rms " << number(dist)
                    << " (" << number(ratio) << " of mean displacement)\n";
            }
        }
    }
    write_text(m.output + ".flows.csv", flows_csv.str());
    write_text(m.output + ".pairs.csv", pairs_csv.str());
    return any_failed ? kExitBlowUp : kExitOk;
}

int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream&)
{
    require(m.input, "input");
    const RawMesh raw = load_raw_mesh(m.input);
    const ValidationReport report = validate(raw.positions, raw.faces);
    out << m.input << ": " << report.vertex_count << " vertices, " << report.face_count << " faces, "
        << report.edge_count << " edges, " << report.boundary_loop_count << " boundary loops\n";
    for (const Finding& f : report.findings) out << "  [" << to_string(f.kind) << "] " << f.message << "\n";
    if (report.structurally_valid()) {
        const TriMesh mesh(raw.positions, raw.faces);
        out << "euler characteristic " << mesh.topology().euler_characteristic() << ", "
            << (mesh.is_closed() ? "closed" : "open") << "\n";
    }
    out << (report.clean() ? "valid" : "invalid") << "\n";
    return report.clean() ? kExitOk : kExitIdentityFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fourth-order geometric flows on triangle meshes"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand all help");

    struct Sub
    {
        CLI::App* app = nullptr;
        RunManifest values;
        std::map<std::string, CLI::Option*> options;
        std::string manifest_path;
        std::string save_path;
    };
    std::map<std::string, Sub> subs;
    const std::map<std::string, std::string> about = {
        {"gen", "generate a shape"},
        {"evolve", "run one flow and check its identities"},
        {"smooth", "short smoothing run with a roughness summary"},
        {"compare", "run sdf, wf and qsdf to matched flow times"},
        {"validate", "report structural problems in a mesh"},
    };
    for (const auto& [name, keys] : keys_by_subcommand()) {
        Sub& s = subs[name];
        s.values = defaults_for(name);
        s.app = app.add_subcommand(name, about.at(name));
        for (const std::string& key : keys) {
            const Field& f = field(key);
            std::string names = "--" + key;
            if (key == "output") names = "-o," + names;
            if (key == "input") names = "input,-i," + names;
            std::visit(
                [&](auto ptr) {
                    s.options[key] = s.app->add_option(names, s.values.*ptr, f.help)->capture_default_str();
                },
                f.ref);
        }
        s.app->add_option("--manifest", s.manifest_path, "load settings from a saved manifest");
        s.app->add_option("--save-manifest", s.save_path, "write the effective settings as a manifest");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (auto& [name, s] : subs) {
            if (!s.app->parsed()) continue;
            RunManifest m = s.values;
            if (!s.manifest_path.empty()) {
                m = manifest_from_json(read_text(s.manifest_path), name);
                for (const auto& [key, opt] : s.options) {
                    if (opt->count() > 0) copy_field(m, s.values, field(key));
                }
            }
            if (!s.save_path.empty()) write_text(s.save_path, manifest_to_json(m));
            if (name == "gen") return cmd_gen(m, out, err);
            if (name == "evolve") return cmd_evolve(m, out, err);
            if (name == "smooth") return cmd_smooth(m, out, err);
            if (name == "compare") return cmd_compare(m, out, err);
            return cmd_validate(m, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.push_back("geoflow");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace geoflow::cli

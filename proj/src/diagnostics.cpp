#include <geoflow/diagnostics.hpp>
#include <geoflow/error.hpp>
#include <geoflow/operators.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace geoflow {

namespace {

void put(std::ostream& out, double x)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, ptr - buf);
}

IdentityCheck monotone_check(const std::vector<DiagnosticsRecord>& recs, const char* name, double slack,
    double DiagnosticsRecord::*field)
{
    IdentityCheck c;
    c.name = name;
    c.threshold = slack;
    c.worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
        const double before = recs[k].*field;
        const double after = recs[k + 1].*field;
        const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
        const double increase = (after - before) / scale;
        if (increase > c.worst) {
            c.worst = increase;
            c.at_step = recs[k + 1].step;
        }
    }
    c.passed = c.worst <= slack;
    c.detail = "largest relative per-step increase";
    return c;
}

} // namespace

void DiagnosticsSeries::append(DiagnosticsRecord record)
{
    if (!records_.empty() && record.step <= records_.back().step) {
        throw Error("diagnostics step indices must increase (got " + std::to_string(record.step) + " after " +
                    std::to_string(records_.back().step) + ")");
    }
    records_.push_back(record);
}

double min_angle_degrees(const TriMesh& mesh)
{
    const Positions& V = mesh.positions();
    const Faces& F = mesh.faces();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const Vec3 a = V.row(F(f, k));
            const Vec3 b = V.row(F(f, (k + 1) % 3));
            const Vec3 c = V.row(F(f, (k + 2) % 3));
            best = std::min(best, detail::corner_angle<double>(a, b, c));
        }
    }
    return best * 180.0 / std::numbers::pi;
}

DiagnosticsRecord measure(const FlowState& state, FlowKind kind)
{
    const TriMesh& mesh = state.mesh();
    const Geometry& g = state.geometry();
    DiagnosticsRecord r;
    r.step = state.step();
    r.time = state.time();
    r.area = surface_area(mesh.positions(), mesh.faces());
    if (mesh.is_closed()) r.volume = signed_volume(mesh.positions(), mesh.faces());
    r.willmore = willmore_energy(g.H, g.mass);
    r.dirichlet_h = dirichlet_energy(g.H, g.L);
    r.biharmonic = biharmonic_energy(g.curvature_normal, g.mass);
    r.min_edge = min_edge_length(mesh);
    r.min_angle_deg = min_angle_degrees(mesh);
    const VectorField v = velocity(state, kind);
    double speed = 0.0;
    for (int i : state.constraint().free()) speed = std::max(speed, v.row(i).norm());
    r.max_speed = speed;
    return r;
}

double roughness(const TriMesh& mesh)
{
    const Positions& V = mesh.positions();
    const SparseOperator L = cotan_laplacian(V, mesh.faces());
    const ScalarField mass = barycentric_mass_diagonal(V, mesh.faces());
    const ScalarField f = mean_curvature_normal(V, L, mass).rowwise().norm();
    const Topology& topo = mesh.topology();
    double deviation = 0.0;
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        double weighted = mass(i) * f(i);
        double total = mass(i);
        for (int j : topo.one_ring(i)) {
            weighted += mass(j) * f(j);
            total += mass(j);
        }
        deviation += mass(i) * std::abs(f(i) - weighted / total);
    }
    return deviation / mass.sum();
}

bool IdentityReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.informational || c.passed; });
}

const IdentityCheck* IdentityReport::find(const std::string& name) const
{
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

IdentityReport check_identities(const DiagnosticsSeries& series, FlowKind kind, const IdentityTolerances& tol)
{
    const auto& recs = series.records();
    if (recs.size() < 2) throw Error("need >= 2 records to check identities");
    IdentityReport report;
    report.kind = kind;
    const bool closed = recs.front().volume.has_value() && recs.back().volume.has_value();

    switch (kind) {
    case FlowKind::SDF: {
        IdentityCheck vol;
        vol.name = "volume_drift";
        vol.threshold = tol.volume_drift;
        vol.detail = "|Vol(end) - Vol(start)| / |Vol(start)|";
        if (closed) {
            vol.worst = std::abs(*recs.back().volume - *recs.front().volume) / std::abs(*recs.front().volume);
            vol.at_step = recs.back().step;
            vol.passed = vol.worst <= tol.volume_drift;
        } else {
            vol.exercised = false;
            vol.detail = "open surface, volume undefined";
        }
        report.checks.push_back(vol);
        report.checks.push_back(monotone_check(recs, "area_monotone", tol.monotone_slack, &DiagnosticsRecord::area));

        IdentityCheck rate;
        rate.name = "area_rate";
        rate.threshold = tol.area_rate;
        rate.detail = "|dArea/dt + H^T L H| / (H^T L H), forward differences";
        rate.exercised = false;
        for (std::size_t k = static_cast<std::size_t>(std::max<long>(0, tol.area_rate_skip)); k + 1 < recs.size();
             ++k) {
            const double dt = recs[k + 1].time - recs[k].time;
            const double expected = -recs[k].dirichlet_h;
            // Changes below the monotonicity slack are not resolvable.
            if (!(dt > 0.0) || recs[k].dirichlet_h * dt <= tol.monotone_slack * recs[k].area) continue;
            const double measured = (recs[k + 1].area - recs[k].area) / dt;
            const double err = std::abs(measured - expected) / std::abs(expected);
            if (!rate.exercised || err > rate.worst) {
                rate.worst = err;
                rate.at_step = recs[k].step;
            }
            rate.exercised = true;
        }
        rate.passed = !rate.exercised || rate.worst <= tol.area_rate;
        report.checks.push_back(rate);
        break;
    }
    case FlowKind::WF:
        report.checks.push_back(
            monotone_check(recs, "willmore_monotone", tol.monotone_slack, &DiagnosticsRecord::willmore));
        break;
    case FlowKind::QSDF: {
        report.checks.push_back(
            monotone_check(recs, "biharmonic_monotone", tol.monotone_slack, &DiagnosticsRecord::biharmonic));
        IdentityCheck vol;
        vol.name = "volume_change";
        vol.informational = true;
        vol.detail = "recorded only; this flow does not preserve volume";
        if (closed) {
            vol.worst = std::abs(*recs.back().volume - *recs.front().volume) / std::abs(*recs.front().volume);
            vol.at_step = recs.back().step;
        } else {
            vol.exercised = false;
        }
        report.checks.push_back(vol);
        break;
    }
    case FlowKind::MCF: break;
    }
    return report;
}

std::string format_report(const IdentityReport& report)
{
    std::ostringstream out;
    out << "identity report (" << to_string(report.kind) << ")\n";
    if (report.checks.empty()) out << "  no identities apply to this flow\n";
    for (const auto& c : report.checks) {
        const char* status = c.informational ? "INFO" : !c.exercised ? "SKIP" : c.passed ? "PASS" : "FAIL";
        out << "  [" << status << "] " << c.name;
        if (c.exercised) {
            out << ": worst ";
            put(out, c.worst);
            if (!c.informational) {
                out << " (threshold ";
                put(out, c.threshold);
                out << ")";
            }
            if (c.at_step >= 0) out << " at step " << c.at_step;
        }
        if (!c.detail.empty()) out << "  -- " << c.detail;
        out << '\n';
    }
    out << "  overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
    return out.str();
}

void write_csv(std::ostream& out, const DiagnosticsSeries& series)
{
    out << "step,time,area,volume,willmore,dirichlet_h,biharmonic,min_edge,min_angle_deg,max_speed\n";
    for (const auto& r : series.records()) {
        out << r.step << ',';
        put(out, r.time);
        out << ',';
        put(out, r.area);
        out << ',';
        if (r.volume) put(out, *r.volume);
        for (double x : {r.willmore, r.dirichlet_h, r.biharmonic, r.min_edge, r.min_angle_deg, r.max_speed}) {
            out << ',';
            put(out, x);
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const DiagnosticsSeries& series)
{
    using nlohmann::ordered_json;
    const RunMetadata& m = series.metadata();
    ordered_json meta = {{"flow", m.flow}, {"scheme", m.scheme}, {"dt", m.dt}, {"boundary", m.boundary},
        {"provenance", m.provenance}};
    meta["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
    ordered_json records = ordered_json::array();
    for (const auto& r : series.records()) {
        ordered_json rec = {{"step", r.step}, {"time", r.time}, {"area", r.area}};
        rec["volume"] = r.volume ? ordered_json(*r.volume) : ordered_json(nullptr);
        rec["willmore"] = r.willmore;
        rec["dirichlet_h"] = r.dirichlet_h;
        rec["biharmonic"] = r.biharmonic;
        rec["min_edge"] = r.min_edge;
        rec["min_angle_deg"] = r.min_angle_deg;
        rec["max_speed"] = r.max_speed;
        records.push_back(std::move(rec));
    }
    const ordered_json doc = {{"metadata", std::move(meta)}, {"records", std::move(records)}};
    out << doc.dump(2) << '\n';
}

DiagnosticsSeries read_json(std::istream& in)
{
    nlohmann::json doc;
    try {
        in >> doc;
        const auto& m = doc.at("metadata");
        RunMetadata meta;
        meta.flow = m.at("flow").get<std::string>();
        meta.scheme = m.at("scheme").get<std::string>();
        meta.dt = m.at("dt").get<double>();
        meta.boundary = m.at("boundary").get<std::string>();
        meta.provenance = m.at("provenance").get<std::string>();
        if (!m.at("seed").is_null()) meta.seed = m.at("seed").get<std::uint64_t>();
        DiagnosticsSeries series(std::move(meta));
        for (const auto& rec : doc.at("records")) {
            DiagnosticsRecord r;
            r.step = rec.at("step").get<long>();
            r.time = rec.at("time").get<double>();
            r.area = rec.at("area").get<double>();
            if (!rec.at("volume").is_null()) r.volume = rec.at("volume").get<double>();
            r.willmore = rec.at("willmore").get<double>();
            r.dirichlet_h = rec.at("dirichlet_h").get<double>();
            r.biharmonic = rec.at("biharmonic").get<double>();
            r.min_edge = rec.at("min_edge").get<double>();
            r.min_angle_deg = rec.at("min_angle_deg").get<double>();
            r.max_speed = rec.at("max_speed").get<double>();
            series.append(r);
        }
        return series;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("diagnostics JSON: ") + e.what(), 0);
    }
}

void emit(const DiagnosticsSeries& series, const std::filesystem::path& path, SeriesFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    if (format == SeriesFormat::Csv) {
        write_csv(out, series);
    } else {
        write_json(out, series);
    }
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace geoflow

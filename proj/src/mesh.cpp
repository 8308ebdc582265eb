#include <geoflow/error.hpp>
#include <geoflow/mesh.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>

namespace geoflow {

namespace {

std::uint64_t edge_key(int a, int b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct EdgeUse
{
    int face;
    int from;
    int to;
    int opposite;
};

// Groups the directed face edges by undirected edge, in first-seen order.
std::vector<std::vector<EdgeUse>> collect_edges(const Faces& faces, const std::vector<char>& skip_face)
{
    std::unordered_map<std::uint64_t, int> index;
    std::vector<std::vector<EdgeUse>> uses;
    index.reserve(static_cast<std::size_t>(faces.rows()) * 2);
    for (int f = 0; f < faces.rows(); ++f) {
        if (!skip_face.empty() && skip_face[f]) continue;
        for (int k = 0; k < 3; ++k) {
            const int a = faces(f, k);
            const int b = faces(f, (k + 1) % 3);
            const int c = faces(f, (k + 2) % 3);
            auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(uses.size()));
            if (inserted) uses.emplace_back();
            uses[it->second].push_back({f, a, b, c});
        }
    }
    return uses;
}

// Follows directed boundary edges (from -> to) into loops. Returns false if a
// vertex has more than one outgoing boundary edge.
bool trace_loops(const std::vector<std::pair<int, int>>& boundary, int vertex_count,
    std::vector<std::vector<int>>& loops, std::vector<long>& bad_vertices)
{
    std::vector<int> next(vertex_count, -1);
    bool ok = true;
    for (auto [from, to] : boundary) {
        if (next[from] >= 0) {
            bad_vertices.push_back(from);
            ok = false;
        }
        next[from] = to;
    }
    std::vector<int> starts;
    for (auto [from, to] : boundary) starts.push_back(from);
    std::sort(starts.begin(), starts.end());
    std::vector<char> visited(vertex_count, 0);
    for (int s : starts) {
        if (visited[s]) continue;
        std::vector<int> loop;
        int v = s;
        while (v >= 0 && !visited[v]) {
            visited[v] = 1;
            loop.push_back(v);
            v = next[v];
        }
        loops.push_back(std::move(loop));
    }
    return ok;
}

} // namespace

std::string to_string(FindingKind kind)
{
    switch (kind) {
    case FindingKind::IndexOutOfRange: return "index-out-of-range";
    case FindingKind::RepeatedIndex: return "repeated-index";
    case FindingKind::NonManifoldEdge: return "non-manifold-edge";
    case FindingKind::OrientationMismatch: return "orientation-mismatch";
    case FindingKind::NonManifoldVertex: return "non-manifold-vertex";
    case FindingKind::DegenerateFace: return "degenerate-face";
    }
    return "unknown";
}

bool ValidationReport::structurally_valid() const
{
    return std::all_of(findings.begin(), findings.end(),
        [](const Finding& f) { return f.kind == FindingKind::DegenerateFace; });
}

long ValidationReport::count(FindingKind kind) const
{
    return std::count_if(findings.begin(), findings.end(), [kind](const Finding& f) { return f.kind == kind; });
}

double degenerate_area_tolerance(const Positions& positions)
{
    if (positions.rows() == 0) return 0.0;
    const double diag = (positions.colwise().maxCoeff() - positions.colwise().minCoeff()).norm();
    return 1e-12 * diag * diag;
}

ValidationReport validate(const Positions& positions, const Faces& faces)
{
    ValidationReport report;
    const int n = static_cast<int>(positions.rows());
    report.vertex_count = n;
    report.face_count = static_cast<int>(faces.rows());

    std::vector<char> skip(faces.rows(), 0);
    for (int f = 0; f < faces.rows(); ++f) {
        const auto tri = faces.row(f);
        if ((tri.array() < 0).any() || (tri.array() >= n).any()) {
            report.findings.push_back({FindingKind::IndexOutOfRange, f,
                "face " + std::to_string(f) + " references a vertex outside [0, " + std::to_string(n) + ")"});
            skip[f] = 1;
        } else if (tri(0) == tri(1) || tri(1) == tri(2) || tri(0) == tri(2)) {
            report.findings.push_back({FindingKind::RepeatedIndex, f, "face " + std::to_string(f) + " repeats a vertex"});
            skip[f] = 1;
        }
    }

    const auto uses = collect_edges(faces, skip);
    report.edge_count = static_cast<int>(uses.size());
    std::vector<std::pair<int, int>> boundary;
    for (std::size_t e = 0; e < uses.size(); ++e) {
        const auto& u = uses[e];
        const std::string name = "edge (" + std::to_string(u[0].from) + "," + std::to_string(u[0].to) + ")";
        if (u.size() > 2) {
            report.findings.push_back({FindingKind::NonManifoldEdge, static_cast<long>(e),
                name + " is shared by " + std::to_string(u.size()) + " faces"});
        } else if (u.size() == 2 && u[0].from == u[1].from) {
            report.findings.push_back({FindingKind::OrientationMismatch, static_cast<long>(e),
                name + " is traversed twice in the same direction (faces " + std::to_string(u[0].face) + ", " +
                    std::to_string(u[1].face) + ")"});
        } else if (u.size() == 1) {
            boundary.emplace_back(u[0].from, u[0].to);
        }
    }

    std::vector<std::vector<int>> loops;
    std::vector<long> bad_vertices;
    trace_loops(boundary, n, loops, bad_vertices);
    report.boundary_loop_count = static_cast<int>(loops.size());
    for (long v : bad_vertices) {
        report.findings.push_back({FindingKind::NonManifoldVertex, v,
            "vertex " + std::to_string(v) + " has more than one outgoing boundary edge"});
    }

    std::vector<char> used(n, 0);
    for (int f = 0; f < faces.rows(); ++f) {
        if (skip[f]) continue;
        for (int k = 0; k < 3; ++k) used[faces(f, k)] = 1;
    }
    for (int v = 0; v < n; ++v) {
        if (!used[v]) {
            report.findings.push_back({FindingKind::NonManifoldVertex, v, "vertex " + std::to_string(v) + " is isolated"});
        }
    }

    const double tol = degenerate_area_tolerance(positions);
    for (int f = 0; f < faces.rows(); ++f) {
        if (skip[f]) continue;
        const Vec3 a = positions.row(faces(f, 0));
        const Vec3 b = positions.row(faces(f, 1));
        const Vec3 c = positions.row(faces(f, 2));
        const double area = 0.5 * (b - a).cross(c - a).norm();
        if (!(area >= tol) || area == 0.0) {
            report.findings.push_back({FindingKind::DegenerateFace, f,
                "face " + std::to_string(f) + " has area " + std::to_string(area) + " below tolerance"});
        }
    }
    return report;
}

ValidationReport validate(const TriMesh& mesh)
{
    return validate(mesh.positions(), mesh.faces());
}

Topology::Topology(Faces faces, int vertex_count)
    : faces_(std::move(faces))
    , vertex_count_(vertex_count)
{
    const auto uses = collect_edges(faces_, {});
    edges_.reserve(uses.size());
    std::vector<std::pair<int, int>> boundary;
    for (const auto& u : uses) {
        Edge e;
        e.v0 = u[0].from;
        e.v1 = u[0].to;
        for (std::size_t k = 0; k < u.size() && k < 2; ++k) {
            e.face[k] = u[k].face;
            e.opposite[k] = u[k].opposite;
        }
        if (u.size() == 1) boundary.emplace_back(u[0].from, u[0].to);
        edges_.push_back(e);
    }

    std::vector<std::vector<int>> vf(vertex_count_), ring(vertex_count_);
    for (int f = 0; f < faces_.rows(); ++f) {
        for (int k = 0; k < 3; ++k) vf[faces_(f, k)].push_back(f);
    }
    for (const Edge& e : edges_) {
        ring[e.v0].push_back(e.v1);
        ring[e.v1].push_back(e.v0);
    }
    auto flatten = [](std::vector<std::vector<int>>& lists, std::vector<int>& offsets, std::vector<int>& data) {
        offsets.assign(1, 0);
        for (auto& l : lists) {
            std::sort(l.begin(), l.end());
            data.insert(data.end(), l.begin(), l.end());
            offsets.push_back(static_cast<int>(data.size()));
        }
    };
    flatten(vf, vf_offsets_, vf_data_);
    flatten(ring, ring_offsets_, ring_data_);

    std::vector<long> bad;
    trace_loops(boundary, vertex_count_, loops_, bad);
    boundary_vertex_.assign(vertex_count_, 0);
    for (const auto& loop : loops_) {
        for (int v : loop) boundary_vertex_[v] = 1;
    }
}

std::span<const int> Topology::vertex_faces(int v) const
{
    return {vf_data_.data() + vf_offsets_[v], vf_data_.data() + vf_offsets_[v + 1]};
}

std::span<const int> Topology::one_ring(int v) const
{
    return {ring_data_.data() + ring_offsets_[v], ring_data_.data() + ring_offsets_[v + 1]};
}

TriMesh::TriMesh(Positions positions, Faces faces)
    : positions_(std::move(positions))
{
    const ValidationReport report = validate(positions_, faces);
    for (const Finding& f : report.findings) {
        if (f.kind != FindingKind::DegenerateFace) throw ValidationError(f.message, f.element);
    }
    topology_ = std::make_shared<const Topology>(std::move(faces), static_cast<int>(positions_.rows()));
}

TriMesh::TriMesh(Positions positions, std::shared_ptr<const Topology> topology)
    : positions_(std::move(positions))
    , topology_(std::move(topology))
{}

TriMesh TriMesh::with_positions(Positions positions) const
{
    if (positions.rows() != positions_.rows()) {
        throw ValidationError("position count " + std::to_string(positions.rows()) + " does not match mesh", -1);
    }
    return TriMesh(std::move(positions), topology_);
}

} // namespace geoflow

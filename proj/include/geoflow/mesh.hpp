#pragma once

#include <geoflow/types.hpp>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace geoflow {

/// Undirected edge with the (up to two) faces and opposite vertices around it.
/// `face[1] == -1` marks a boundary edge.
struct Edge
{
    int v0 = -1;
    int v1 = -1;
    int face[2] = {-1, -1};
    int opposite[2] = {-1, -1};

    bool is_boundary() const { return face[1] < 0; }
};

/// Connectivity of a triangle mesh. Built once from the face list and shared
/// by every position state of a flow; never mutated afterwards.
class Topology
{
public:
    /// Assumes the face list already passed validation.
    Topology(Faces faces, int vertex_count);

    int vertex_count() const { return vertex_count_; }
    int face_count() const { return static_cast<int>(faces_.rows()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Faces& faces() const { return faces_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const int> vertex_faces(int v) const;
    /// Sorted neighbour indices.
    std::span<const int> one_ring(int v) const;

    /// Each loop lists its vertices in boundary-traversal order.
    const std::vector<std::vector<int>>& boundary_loops() const { return loops_; }
    bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    bool is_closed() const { return loops_.empty(); }
    int euler_characteristic() const { return vertex_count_ - edge_count() + face_count(); }

private:
    Faces faces_;
    int vertex_count_;
    std::vector<Edge> edges_;
    std::vector<int> vf_offsets_, vf_data_;
    std::vector<int> ring_offsets_, ring_data_;
    std::vector<std::vector<int>> loops_;
    std::vector<char> boundary_vertex_;
};

/// Indexed triangle mesh: positions plus shared immutable connectivity.
class TriMesh
{
public:
    /// Validates connectivity; throws ValidationError on the first structural defect.
    TriMesh(Positions positions, Faces faces);

    /// Same connectivity, new positions (the only mutation a flow performs).
    TriMesh with_positions(Positions positions) const;

    const Positions& positions() const { return positions_; }
    const Faces& faces() const { return topology_->faces(); }
    const Topology& topology() const { return *topology_; }
    int vertex_count() const { return static_cast<int>(positions_.rows()); }
    int face_count() const { return topology_->face_count(); }
    bool is_closed() const { return topology_->is_closed(); }

private:
    TriMesh(Positions positions, std::shared_ptr<const Topology> topology);

    Positions positions_;
    std::shared_ptr<const Topology> topology_;
};

enum class FindingKind {
    IndexOutOfRange,
    RepeatedIndex,
    NonManifoldEdge,
    OrientationMismatch,
    NonManifoldVertex,
    DegenerateFace,
};

std::string to_string(FindingKind kind);

struct Finding
{
    FindingKind kind;
    /// Face index for face findings, edge index (into the report's edge
    /// numbering, i.e. first-seen order) for edge findings, vertex index otherwise.
    long element;
    std::string message;
};

struct ValidationReport
{
    std::vector<Finding> findings;
    int vertex_count = 0;
    int face_count = 0;
    int edge_count = 0;
    int boundary_loop_count = 0;

    /// Findings that prevent building a TriMesh (everything but DegenerateFace).
    bool structurally_valid() const;
    bool clean() const { return findings.empty(); }
    long count(FindingKind kind) const;
};

/// Degenerate-area threshold: 1e-12 times the squared bounding-box diagonal.
double degenerate_area_tolerance(const Positions& positions);

/// Reports every defect found; never throws.
ValidationReport validate(const Positions& positions, const Faces& faces);
ValidationReport validate(const TriMesh& mesh);

} // namespace geoflow

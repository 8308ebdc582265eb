#pragma once

#include <geoflow/mesh.hpp>
#include <geoflow/types.hpp>

#include <string>
#include <vector>

namespace geoflow {

enum class BoundaryMode { Free, G0, G1 };

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& name);

/// Partition of the vertices into free, rim (the boundary loops) and ring
/// (interior one-ring neighbours of the rim, clamped only under G1).
class BoundaryConstraint
{
public:
    BoundaryConstraint() = default;

    BoundaryMode mode() const { return mode_; }
    /// Mode requested by the caller; differs from mode() when a closed mesh forced Free.
    BoundaryMode requested_mode() const { return requested_; }
    /// Set when a constrained mode was requested on a mesh without boundary.
    bool no_boundary_warning() const { return warning_; }

    const std::vector<int>& rim() const { return rim_; }
    const std::vector<int>& ring() const { return ring_; }
    /// Sorted union of rim and ring.
    const std::vector<int>& clamped() const { return clamped_; }
    /// Sorted free vertices; its position in this list is a vertex's reduced index.
    const std::vector<int>& free() const { return free_; }
    bool is_clamped(int v) const { return !mask_.empty() && mask_[v] != 0; }
    int vertex_count() const { return static_cast<int>(mask_.size()); }

    friend BoundaryConstraint classify_boundary(const TriMesh& mesh, BoundaryMode mode);

private:
    BoundaryMode mode_ = BoundaryMode::Free;
    BoundaryMode requested_ = BoundaryMode::Free;
    bool warning_ = false;
    std::vector<int> rim_, ring_, clamped_, free_;
    std::vector<char> mask_;
};

BoundaryConstraint classify_boundary(const TriMesh& mesh, BoundaryMode mode);

/// Free-vertex system with the clamped values moved to the right-hand side.
struct ReducedSystem
{
    SparseOperator A;
    Eigen::MatrixXd b;
    /// free_vertices[k] is the full index of reduced unknown k.
    std::vector<int> free_vertices;
    /// Full-size values; clamped rows carry the prescribed data.
    Eigen::MatrixXd clamped_values;

    /// Scatters a reduced solution into a full-size block. Clamped rows are
    /// copied from clamped_values without arithmetic.
    Eigen::MatrixXd expand(const Eigen::MatrixXd& reduced_solution) const;
};

/// Eliminates the clamped rows and columns of A x = b. Throws Error("no free
/// unknowns") when every vertex is clamped.
ReducedSystem reduce_system(const SparseOperator& A, const Eigen::MatrixXd& b, const BoundaryConstraint& constraint,
    const Eigen::MatrixXd& clamped_values);

} // namespace geoflow

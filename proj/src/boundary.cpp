#include <geoflow/boundary.hpp>
#include <geoflow/error.hpp>

#include <algorithm>

namespace geoflow {

std::string to_string(BoundaryMode mode)
{
    switch (mode) {
    case BoundaryMode::Free: return "free";
    case BoundaryMode::G0: return "g0";
    case BoundaryMode::G1: return "g1";
    }
    return "unknown";
}

BoundaryMode boundary_mode_from_string(const std::string& name)
{
    if (name == "free") return BoundaryMode::Free;
    if (name == "g0" || name == "G0") return BoundaryMode::G0;
    if (name == "g1" || name == "G1") return BoundaryMode::G1;
    throw ConfigError("unknown boundary mode '" + name + "'");
}

BoundaryConstraint classify_boundary(const TriMesh& mesh, BoundaryMode mode)
{
    BoundaryConstraint c;
    const Topology& topo = mesh.topology();
    const int n = mesh.vertex_count();
    c.requested_ = mode;
    c.mode_ = mode;
    c.mask_.assign(n, 0);
    if (mode != BoundaryMode::Free && topo.is_closed()) {
        c.mode_ = BoundaryMode::Free;
        c.warning_ = true;
    }
    if (c.mode_ != BoundaryMode::Free) {
        for (int v = 0; v < n; ++v) {
            if (topo.is_boundary_vertex(v)) c.rim_.push_back(v);
        }
        for (int v : c.rim_) c.mask_[v] = 1;
        if (c.mode_ == BoundaryMode::G1) {
            std::vector<char> in_ring(n, 0);
            for (int v : c.rim_) {
                for (int w : topo.one_ring(v)) {
                    if (!c.mask_[w]) in_ring[w] = 1;
                }
            }
            for (int v = 0; v < n; ++v) {
                if (in_ring[v]) {
                    c.ring_.push_back(v);
                    c.mask_[v] = 1;
                }
            }
        }
    }
    for (int v = 0; v < n; ++v) (c.mask_[v] ? c.clamped_ : c.free_).push_back(v);
    return c;
}

Eigen::MatrixXd ReducedSystem::expand(const Eigen::MatrixXd& reduced_solution) const
{
    Eigen::MatrixXd full = clamped_values;
    for (std::size_t k = 0; k < free_vertices.size(); ++k) {
        full.row(free_vertices[k]) = reduced_solution.row(static_cast<Eigen::Index>(k));
    }
    return full;
}

ReducedSystem reduce_system(const SparseOperator& A, const Eigen::MatrixXd& b, const BoundaryConstraint& constraint,
    const Eigen::MatrixXd& clamped_values)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || b.rows() != n || clamped_values.rows() != n || clamped_values.cols() != b.cols()) {
        throw Error("reduce_system: dimension mismatch");
    }
    if (constraint.vertex_count() != 0 && constraint.vertex_count() != n) {
        throw Error("reduce_system: constraint was built for a different mesh");
    }

    ReducedSystem sys;
    sys.clamped_values = clamped_values;
    if (constraint.clamped().empty()) {
        sys.A = A;
        sys.b = b;
        sys.free_vertices.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) sys.free_vertices[static_cast<std::size_t>(i)] = static_cast<int>(i);
        return sys;
    }
    sys.free_vertices = constraint.free();
    if (sys.free_vertices.empty()) throw Error("no free unknowns: every vertex is clamped");

    std::vector<int> reduced(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < sys.free_vertices.size(); ++k) reduced[sys.free_vertices[k]] = static_cast<int>(k);

    const Eigen::Index m = static_cast<Eigen::Index>(sys.free_vertices.size());
    sys.b.resize(m, b.cols());
    for (Eigen::Index k = 0; k < m; ++k) sys.b.row(k) = b.row(sys.free_vertices[static_cast<std::size_t>(k)]);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(A.nonZeros()));
    for (Eigen::Index col = 0; col < A.outerSize(); ++col) {
        for (SparseOperator::InnerIterator it(A, col); it; ++it) {
            const int r = reduced[static_cast<std::size_t>(it.row())];
            if (r < 0) continue;
            const int cfree = reduced[static_cast<std::size_t>(it.col())];
            if (cfree >= 0) {
                entries.emplace_back(r, cfree, it.value());
            } else {
                sys.b.row(r) -= it.value() * clamped_values.row(it.col());
            }
        }
    }
    sys.A.resize(m, m);
    sys.A.setFromTriplets(entries.begin(), entries.end());
    return sys;
}

} // namespace geoflow

#include <geoflow/operators.hpp>

namespace geoflow {

namespace {

void require_same_size(const TriMesh& mesh, Eigen::Index n, const char* what)
{
    if (n != mesh.vertex_count()) {
        throw Error(std::string(what) + " has " + std::to_string(n) + " rows, mesh has " +
                    std::to_string(mesh.vertex_count()) + " vertices");
    }
}

} // namespace

std::vector<char> boundary_flags(const TriMesh& mesh)
{
    std::vector<char> flags(mesh.vertex_count(), 0);
    for (int v = 0; v < mesh.vertex_count(); ++v) flags[v] = mesh.topology().is_boundary_vertex(v) ? 1 : 0;
    return flags;
}

SparseOperator cotan_laplacian(const TriMesh& mesh)
{
    return cotan_laplacian(mesh.positions(), mesh.faces());
}

SparseOperator mass_matrix(const TriMesh& mesh)
{
    return mass_matrix(mesh.positions(), mesh.faces());
}

ScalarField mass_diagonal(const TriMesh& mesh)
{
    return mass_diagonal(mesh.positions(), mesh.faces());
}

VectorField mean_curvature_normal(const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M)
{
    require_same_size(mesh, L.rows(), "Laplacian");
    require_same_size(mesh, M.rows(), "mass matrix");
    const ScalarField mass = M.diagonal();
    return mean_curvature_normal(mesh.positions(), L, mass);
}

VectorField vertex_normals(const TriMesh& mesh)
{
    return vertex_normals(mesh.positions(), mesh.faces());
}

ScalarField mean_curvature_scalar(
    const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M, const VectorField& normals)
{
    require_same_size(mesh, normals.rows(), "normal field");
    return mean_curvature(mean_curvature_normal(mesh, L, M), normals);
}

ScalarField gauss_curvature(const TriMesh& mesh, const SparseOperator& M)
{
    require_same_size(mesh, M.rows(), "mass matrix");
    const ScalarField mass = M.diagonal();
    return gauss_curvature(mesh.positions(), mesh.faces(), mass, boundary_flags(mesh));
}

double total_gauss_curvature(const TriMesh& mesh)
{
    return angle_defects(mesh.positions(), mesh.faces(), boundary_flags(mesh)).sum();
}

double surface_area(const TriMesh& mesh)
{
    return surface_area(mesh.positions(), mesh.faces());
}

double enclosed_volume(const TriMesh& mesh)
{
    if (!mesh.is_closed()) throw Error("volume undefined: mesh has boundary");
    return signed_volume(mesh.positions(), mesh.faces());
}

double willmore_energy(const TriMesh& mesh, const ScalarField& H, const SparseOperator& M)
{
    require_same_size(mesh, H.size(), "mean curvature");
    const ScalarField mass = M.diagonal();
    return willmore_energy(H, mass);
}

double dirichlet_energy_of_H(const TriMesh& mesh, const ScalarField& H, const SparseOperator& L)
{
    require_same_size(mesh, H.size(), "mean curvature");
    return dirichlet_energy(H, L);
}

double biharmonic_energy(const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M)
{
    const ScalarField mass = M.diagonal();
    return biharmonic_energy(mean_curvature_normal(mesh, L, M), mass);
}

} // namespace geoflow

#pragma once

// Discrete differential-geometry operators on indexed triangle meshes.
//
// Conventions used throughout:
//   * L is the cotangent Laplacian with the positive semi-definite sign
//     (x^T L x >= 0), M the mixed Voronoi lumped mass, and the discrete
//     Laplace-Beltrami operator is Delta = -M^{-1} L.
//   * n is the outward unit normal and H = (k1 + k2) / 2, so a round sphere
//     of radius r has H = +1/r and Delta(rho) = -2 H n.
//   * M^{-1} L rho therefore equals +2 H n.

#include <geoflow/error.hpp>
#include <geoflow/mesh.hpp>
#include <geoflow/types.hpp>

#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace geoflow {

/// Cotangents are clamped to this magnitude after the degeneracy check.
inline constexpr double kMaxCotangent = 1e6;

namespace detail {

template <typename DerivedV>
typename DerivedV::Scalar degenerate_tolerance(const Eigen::MatrixBase<DerivedV>& V)
{
    using Scalar = typename DerivedV::Scalar;
    if (V.rows() == 0) return Scalar(0);
    const Scalar diag = (V.colwise().maxCoeff() - V.colwise().minCoeff()).norm();
    return Scalar(1e-12) * diag * diag;
}

template <typename DerivedV, typename DerivedF>
Eigen::Matrix<typename DerivedV::Scalar, 3, 1> corner(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F, Eigen::Index f, int k)
{
    return V.row(F(f, k)).transpose();
}

/// Interior angle at `a` of triangle (a, b, c).
template <typename Scalar>
Scalar corner_angle(const Eigen::Matrix<Scalar, 3, 1>& a, const Eigen::Matrix<Scalar, 3, 1>& b,
    const Eigen::Matrix<Scalar, 3, 1>& c)
{
    const Eigen::Matrix<Scalar, 3, 1> u = b - a;
    const Eigen::Matrix<Scalar, 3, 1> v = c - a;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

} // namespace detail

template <typename DerivedV, typename DerivedF>
ScalarFieldT<typename DerivedV::Scalar> face_areas(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    ScalarFieldT<Scalar> areas(F.rows());
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const auto a = detail::corner(V, F, f, 0);
        const auto b = detail::corner(V, F, f, 1);
        const auto c = detail::corner(V, F, f, 2);
        areas(f) = Scalar(0.5) * (b - a).cross(c - a).norm();
    }
    return areas;
}

/// Cotangent Laplacian: L(i,j) = -1/2 (cot a_ij + cot b_ij) off the diagonal,
/// L(i,i) = -sum_j L(i,j). Boundary edges carry their single cotangent.
/// Throws DegenerateFaceError for faces with area below the scale-relative tolerance.
template <typename DerivedV, typename DerivedF>
SparseOperatorT<typename DerivedV::Scalar> cotan_laplacian(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    using Triplet = Eigen::Triplet<Scalar>;
    const Eigen::Index n = V.rows();
    const Scalar tol = detail::degenerate_tolerance(V);

    std::vector<Triplet> off;
    off.reserve(static_cast<std::size_t>(F.rows()) * 6);
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const Eigen::Matrix<Scalar, 3, 1> p[3] = {
            detail::corner(V, F, f, 0), detail::corner(V, F, f, 1), detail::corner(V, F, f, 2)};
        const Scalar twice_area = (p[1] - p[0]).cross(p[2] - p[0]).norm();
        if (!(Scalar(0.5) * twice_area >= tol) || twice_area == Scalar(0)) {
            throw DegenerateFaceError(static_cast<long>(f));
        }
        for (int k = 0; k < 3; ++k) {
            // Corner k is opposite the edge (k+1, k+2).
            const auto& a = p[k];
            const auto& b = p[(k + 1) % 3];
            const auto& c = p[(k + 2) % 3];
            Scalar cot = (b - a).dot(c - a) / twice_area;
            cot = std::clamp(cot, Scalar(-kMaxCotangent), Scalar(kMaxCotangent));
            const int i = F(f, (k + 1) % 3);
            const int j = F(f, (k + 2) % 3);
            off.emplace_back(i, j, Scalar(-0.5) * cot);
            off.emplace_back(j, i, Scalar(-0.5) * cot);
        }
    }

    // Duplicates of (i,j) and (j,i) are summed in the same order, so the
    // assembled off-diagonal part is exactly symmetric.
    SparseOperatorT<Scalar> W(n, n);
    W.setFromTriplets(off.begin(), off.end());

    std::vector<Triplet> all;
    all.reserve(static_cast<std::size_t>(W.nonZeros() + n));
    ScalarFieldT<Scalar> diag = ScalarFieldT<Scalar>::Zero(n);
    for (Eigen::Index col = 0; col < W.outerSize(); ++col) {
        for (typename SparseOperatorT<Scalar>::InnerIterator it(W, col); it; ++it) {
            all.emplace_back(it.row(), it.col(), it.value());
            diag(it.row()) -= it.value();
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) all.emplace_back(i, i, diag(i));

    SparseOperatorT<Scalar> L(n, n);
    L.setFromTriplets(all.begin(), all.end());
    return L;
}

/// Barycentric lumped masses: one third of the incident face areas.
template <typename DerivedV, typename DerivedF>
ScalarFieldT<typename DerivedV::Scalar> barycentric_mass_diagonal(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    const auto areas = face_areas(V, F);
    ScalarFieldT<Scalar> mass = ScalarFieldT<Scalar>::Zero(V.rows());
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        for (int k = 0; k < 3; ++k) mass(F(f, k)) += areas(f) / Scalar(3);
    }
    return mass;
}

/// Mixed Voronoi masses: circumcentric Voronoi areas on non-obtuse
/// triangles, A/2 to the obtuse corner and A/4 to the others otherwise.
/// Each triangle's area is split exactly, so the masses sum to the surface area.
template <typename DerivedV, typename DerivedF>
ScalarFieldT<typename DerivedV::Scalar> mass_diagonal(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    using Vec = Eigen::Matrix<Scalar, 3, 1>;
    ScalarFieldT<Scalar> mass = ScalarFieldT<Scalar>::Zero(V.rows());
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const Vec p[3] = {detail::corner(V, F, f, 0), detail::corner(V, F, f, 1), detail::corner(V, F, f, 2)};
        const Scalar twice_area = (p[1] - p[0]).cross(p[2] - p[0]).norm();
        const Scalar area = Scalar(0.5) * twice_area;
        Scalar dots[3];
        for (int k = 0; k < 3; ++k) dots[k] = (p[(k + 1) % 3] - p[k]).dot(p[(k + 2) % 3] - p[k]);
        int obtuse = -1;
        for (int k = 0; k < 3; ++k) {
            if (dots[k] < Scalar(0)) obtuse = k;
        }
        for (int k = 0; k < 3; ++k) {
            Scalar share;
            if (obtuse >= 0) {
                share = k == obtuse ? area / Scalar(2) : area / Scalar(4);
            } else if (twice_area == Scalar(0)) {
                share = Scalar(0);
            } else {
                // (|e_ij|^2 cot k + |e_ik|^2 cot j) / 8
                const int j = (k + 1) % 3, l = (k + 2) % 3;
                const Scalar cot_j = dots[j] / twice_area;
                const Scalar cot_l = dots[l] / twice_area;
                share = ((p[j] - p[k]).squaredNorm() * cot_l + (p[l] - p[k]).squaredNorm() * cot_j) / Scalar(8);
            }
            mass(F(f, k)) += share;
        }
    }
    return mass;
}

template <typename DerivedV, typename DerivedF>
SparseOperatorT<typename DerivedV::Scalar> mass_matrix(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    const auto mass = mass_diagonal(V, F);
    SparseOperatorT<Scalar> M(V.rows(), V.rows());
    M.reserve(Eigen::VectorXi::Constant(V.rows(), 1));
    for (Eigen::Index i = 0; i < V.rows(); ++i) M.insert(i, i) = mass(i);
    M.makeCompressed();
    return M;
}

/// h = M^{-1} L rho, the mean-curvature normal; |h| = 2|H|, h = +2 H n.
template <typename DerivedV, typename Scalar>
PositionsT<Scalar> mean_curvature_normal(const Eigen::MatrixBase<DerivedV>& V, const SparseOperatorT<Scalar>& L,
    const ScalarFieldT<Scalar>& mass)
{
    PositionsT<Scalar> LV = L * V.derived();
    return LV.array().colwise() / mass.array();
}

/// Angle-weighted vertex normals, outward for counterclockwise faces.
/// Throws Error when the accumulated normal at a vertex vanishes.
template <typename DerivedV, typename DerivedF>
PositionsT<typename DerivedV::Scalar> vertex_normals(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    using Vec = Eigen::Matrix<Scalar, 3, 1>;
    PositionsT<Scalar> N = PositionsT<Scalar>::Zero(V.rows(), 3);
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const Vec p[3] = {detail::corner(V, F, f, 0), detail::corner(V, F, f, 1), detail::corner(V, F, f, 2)};
        const Vec face_normal = (p[1] - p[0]).cross(p[2] - p[0]);
        const Scalar len = face_normal.norm();
        if (len == Scalar(0)) continue;
        for (int k = 0; k < 3; ++k) {
            const Scalar angle = detail::corner_angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            N.row(F(f, k)) += (angle / len) * face_normal.transpose();
        }
    }
    for (Eigen::Index i = 0; i < N.rows(); ++i) {
        const Scalar len = N.row(i).norm();
        if (!(len > Scalar(0))) {
            throw Error("vertex " + std::to_string(i) + " has a vanishing accumulated normal");
        }
        N.row(i) /= len;
    }
    return N;
}

/// H(i) = 1/2 h(i) . n(i).
template <typename Scalar>
ScalarFieldT<Scalar> mean_curvature(const PositionsT<Scalar>& curvature_normal, const PositionsT<Scalar>& normals)
{
    return Scalar(0.5) * (curvature_normal.array() * normals.array()).rowwise().sum();
}

template <typename DerivedV, typename DerivedF>
ScalarFieldT<typename DerivedV::Scalar> angle_sums(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    ScalarFieldT<Scalar> sums = ScalarFieldT<Scalar>::Zero(V.rows());
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const Eigen::Matrix<Scalar, 3, 1> p[3] = {
            detail::corner(V, F, f, 0), detail::corner(V, F, f, 1), detail::corner(V, F, f, 2)};
        for (int k = 0; k < 3; ++k) sums(F(f, k)) += detail::corner_angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
    }
    return sums;
}

/// Integrated Gauss curvature per vertex: 2pi (interior) or pi (boundary)
/// minus the incident angle sum.
template <typename DerivedV, typename DerivedF>
ScalarFieldT<typename DerivedV::Scalar> angle_defects(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F, const std::vector<char>& on_boundary)
{
    using Scalar = typename DerivedV::Scalar;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    ScalarFieldT<Scalar> defect = angle_sums(V, F);
    for (Eigen::Index i = 0; i < defect.size(); ++i) {
        const Scalar full = on_boundary.empty() || !on_boundary[i] ? Scalar(2) * pi : pi;
        defect(i) = full - defect(i);
    }
    return defect;
}

/// Pointwise Gauss curvature K(i) = defect(i) / mass(i).
template <typename DerivedV, typename DerivedF, typename Scalar>
ScalarFieldT<Scalar> gauss_curvature(const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F,
    const ScalarFieldT<Scalar>& mass, const std::vector<char>& on_boundary)
{
    return angle_defects(V, F, on_boundary).cwiseQuotient(mass);
}

template <typename DerivedV, typename DerivedF>
typename DerivedV::Scalar surface_area(const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    return face_areas(V, F).sum();
}

/// (1/6) sum_f det(a, b, c); positive for outward orientation of a closed mesh.
template <typename DerivedV, typename DerivedF>
typename DerivedV::Scalar signed_volume(const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedF>& F)
{
    using Scalar = typename DerivedV::Scalar;
    Scalar sum(0);
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        const auto a = detail::corner(V, F, f, 0);
        const auto b = detail::corner(V, F, f, 1);
        const auto c = detail::corner(V, F, f, 2);
        sum += a.dot(b.cross(c));
    }
    return sum / Scalar(6);
}

/// W = sum_i H(i)^2 mass(i).
template <typename Scalar>
Scalar willmore_energy(const ScalarFieldT<Scalar>& H, const ScalarFieldT<Scalar>& mass)
{
    return (H.array().square() * mass.array()).sum();
}

/// H^T L H, the discrete integral of |grad H|^2.
template <typename Scalar>
Scalar dirichlet_energy(const ScalarFieldT<Scalar>& H, const SparseOperatorT<Scalar>& L)
{
    return H.dot(L * H);
}

/// sum_i |(M^{-1} L rho)(i)|^2 mass(i), the integral of the squared tension field.
template <typename Scalar>
Scalar biharmonic_energy(const PositionsT<Scalar>& curvature_normal, const ScalarFieldT<Scalar>& mass)
{
    return (curvature_normal.rowwise().squaredNorm().array() * mass.array()).sum();
}

// TriMesh conveniences. Mass matrices passed as SparseOperator are diagonal.

SparseOperator cotan_laplacian(const TriMesh& mesh);
SparseOperator mass_matrix(const TriMesh& mesh);
ScalarField mass_diagonal(const TriMesh& mesh);
VectorField mean_curvature_normal(const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M);
VectorField vertex_normals(const TriMesh& mesh);
ScalarField mean_curvature_scalar(
    const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M, const VectorField& normals);
ScalarField gauss_curvature(const TriMesh& mesh, const SparseOperator& M);
/// Sum of angle defects, equal to 2 pi chi on closed meshes.
double total_gauss_curvature(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);
/// Throws Error("volume undefined ...") for meshes with boundary.
double enclosed_volume(const TriMesh& mesh);
double willmore_energy(const TriMesh& mesh, const ScalarField& H, const SparseOperator& M);
double dirichlet_energy_of_H(const TriMesh& mesh, const ScalarField& H, const SparseOperator& L);
double biharmonic_energy(const TriMesh& mesh, const SparseOperator& L, const SparseOperator& M);

std::vector<char> boundary_flags(const TriMesh& mesh);

} // namespace geoflow

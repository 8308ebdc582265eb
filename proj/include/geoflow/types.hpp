#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

namespace geoflow {

/// Per-vertex 3-vectors (positions, normals, velocities), one row per vertex.
template <typename Scalar>
using PositionsT = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

/// Per-vertex scalars (H, K, masses).
template <typename Scalar>
using ScalarFieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SparseOperatorT = Eigen::SparseMatrix<Scalar>;

using Positions = PositionsT<double>;
using VectorField = PositionsT<double>;
using ScalarField = ScalarFieldT<double>;
using SparseOperator = SparseOperatorT<double>;

/// Vertex-index triples, counterclockwise seen from outside.
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;

using Vec3 = Eigen::Vector3d;

} // namespace geoflow

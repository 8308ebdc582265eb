#pragma once

#include <geoflow/mesh.hpp>

#include <cstdint>
#include <string>

namespace geoflow {

enum class ShapeKind { Icosphere, Ellipsoid, Torus, Disk };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

/// Largest accepted subdivision level (20 * 4^7 faces for an icosphere).
inline constexpr int kMaxSubdivision = 7;

struct ShapeSpec
{
    ShapeKind kind = ShapeKind::Icosphere;
    /// Sphere / disk radius.
    double radius = 1.0;
    /// Ellipsoid semi-axes along x, y, z.
    Vec3 semi_axes = Vec3(2.0, 1.0, 1.0);
    /// Torus radii.
    double major_radius = 2.0;
    double minor_radius = 0.5;
    /// Icosphere/ellipsoid: 1->4 refinements. Disk: 2^level rings.
    /// Torus: default grid 8*2^level by 4*2^level quads.
    int subdivision = 3;
    /// Torus grid override (segments around the axis, around the tube); 0 = from level.
    int torus_segments = 0;
    int torus_rings = 0;
    /// Uniform displacement amplitude; 0 disables the noisy variant.
    double noise = 0.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Sphere/ellipsoid noise is radial, torus/disk noise follows the clean
/// vertex normal. Faces are counterclockwise seen from outside (+z for the disk).
TriMesh generate_shape(const ShapeSpec& spec);

TriMesh make_icosphere(int subdivision, double radius = 1.0);

} // namespace geoflow

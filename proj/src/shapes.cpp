#include <geoflow/error.hpp>
#include <geoflow/operators.hpp>
#include <geoflow/shapes.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

namespace geoflow {

namespace {

struct RawMesh
{
    std::vector<Vec3> points;
    std::vector<Eigen::Vector3i> tris;

    TriMesh build() const
    {
        Positions V(static_cast<Eigen::Index>(points.size()), 3);
        for (std::size_t i = 0; i < points.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = points[i];
        Faces F(static_cast<Eigen::Index>(tris.size()), 3);
        for (std::size_t i = 0; i < tris.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = tris[i];
        return TriMesh(std::move(V), std::move(F));
    }
};

RawMesh icosahedron()
{
    const double t = std::numbers::phi;
    RawMesh m;
    m.points = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    m.tris = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2},
        {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9}, {4, 9, 5}, {2, 4, 11},
        {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& p : m.points) p.normalize();
    return m;
}

// One 1->4 split with new vertices projected back onto the unit sphere.
void subdivide_sphere(RawMesh& m)
{
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
        const std::uint64_t key = a < b ? (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b)
                                        : (static_cast<std::uint64_t>(b) << 32) | static_cast<std::uint32_t>(a);
        auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(m.points.size()));
        if (inserted) m.points.push_back((m.points[a] + m.points[b]).normalized());
        return it->second;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(m.tris.size() * 4);
    for (const auto& t : m.tris) {
        const int ab = mid(t(0), t(1));
        const int bc = mid(t(1), t(2));
        const int ca = mid(t(2), t(0));
        next.emplace_back(t(0), ab, ca);
        next.emplace_back(t(1), bc, ab);
        next.emplace_back(t(2), ca, bc);
        next.emplace_back(ab, bc, ca);
    }
    m.tris = std::move(next);
}

RawMesh unit_icosphere(int subdivision)
{
    RawMesh m = icosahedron();
    for (int k = 0; k < subdivision; ++k) subdivide_sphere(m);
    return m;
}

RawMesh torus(double major, double minor, int segments, int rings)
{
    RawMesh m;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < segments; ++i) {
        const double u = two_pi * i / segments;
        for (int j = 0; j < rings; ++j) {
            const double v = two_pi * j / rings;
            const double w = major + minor * std::cos(v);
            m.points.emplace_back(w * std::cos(u), w * std::sin(u), minor * std::sin(v));
        }
    }
    auto id = [&](int i, int j) { return (i % segments) * rings + (j % rings); };
    for (int i = 0; i < segments; ++i) {
        for (int j = 0; j < rings; ++j) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            m.tris.emplace_back(a, b, c);
            m.tris.emplace_back(a, c, d);
        }
    }
    return m;
}

// Triangular lattice clipped to a hexagon of `rings` rings, each point pushed
// radially so the hexagon's rings become concentric circles.
RawMesh disk(double radius, int rings)
{
    RawMesh m;
    std::map<std::pair<int, int>, int> index;
    auto hex_norm = [](int q, int r) { return std::max({std::abs(q), std::abs(r), std::abs(q + r)}); };
    const Eigen::Vector2d e1(1.0, 0.0);
    const Eigen::Vector2d e2(0.5, std::sqrt(3.0) / 2.0);
    for (int r = -rings; r <= rings; ++r) {
        for (int q = -rings; q <= rings; ++q) {
            if (hex_norm(q, r) > rings) continue;
            const Eigen::Vector2d p = q * e1 + r * e2;
            Eigen::Vector2d out = Eigen::Vector2d::Zero();
            if (q != 0 || r != 0) out = p.normalized() * (radius * hex_norm(q, r) / rings);
            index[{q, r}] = static_cast<int>(m.points.size());
            m.points.emplace_back(out.x(), out.y(), 0.0);
        }
    }
    auto find = [&](int q, int r) {
        auto it = index.find({q, r});
        return it == index.end() ? -1 : it->second;
    };
    for (int r = -rings; r <= rings; ++r) {
        for (int q = -rings; q <= rings; ++q) {
            const int a = find(q, r);
            if (a < 0) continue;
            const int b = find(q + 1, r);
            const int c = find(q, r + 1);
            const int d = find(q + 1, r + 1);
            if (b >= 0 && c >= 0) m.tris.emplace_back(a, b, c);
            if (b >= 0 && c >= 0 && d >= 0) m.tris.emplace_back(b, d, c);
        }
    }
    return m;
}

} // namespace

std::string to_string(ShapeKind kind)
{
    switch (kind) {
    case ShapeKind::Icosphere: return "icosphere";
    case ShapeKind::Ellipsoid: return "ellipsoid";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::Disk: return "disk";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name)
{
    if (name == "icosphere" || name == "sphere") return ShapeKind::Icosphere;
    if (name == "ellipsoid") return ShapeKind::Ellipsoid;
    if (name == "torus") return ShapeKind::Torus;
    if (name == "disk") return ShapeKind::Disk;
    throw ConfigError("unknown shape '" + name + "'");
}

void ShapeSpec::validate() const
{
    if (subdivision < 0) throw ConfigError("subdivision level must be >= 0");
    if (subdivision > kMaxSubdivision) {
        throw ConfigError("subdivision level " + std::to_string(subdivision) + " exceeds the cap of " +
                          std::to_string(kMaxSubdivision));
    }
    if (!(noise >= 0.0)) throw ConfigError("noise amplitude must be >= 0");
    switch (kind) {
    case ShapeKind::Icosphere:
    case ShapeKind::Disk:
        if (!(radius > 0.0)) throw ConfigError("radius must be > 0");
        break;
    case ShapeKind::Ellipsoid:
        if (!(semi_axes.array() > 0.0).all()) throw ConfigError("semi-axes must be > 0");
        break;
    case ShapeKind::Torus:
        if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
            throw ConfigError("torus radii must satisfy major > minor > 0");
        }
        if (torus_segments < 0 || torus_rings < 0 || (torus_segments > 0 && torus_segments < 3) ||
            (torus_rings > 0 && torus_rings < 3)) {
            throw ConfigError("torus grid needs at least 3 x 3 quads");
        }
        if (static_cast<long>(torus_segments) * torus_rings > (20L << (2 * kMaxSubdivision))) {
            throw ConfigError("torus grid exceeds the size cap");
        }
        break;
    }
}

TriMesh make_icosphere(int subdivision, double radius)
{
    ShapeSpec spec;
    spec.kind = ShapeKind::Icosphere;
    spec.subdivision = subdivision;
    spec.radius = radius;
    return generate_shape(spec);
}

TriMesh generate_shape(const ShapeSpec& spec)
{
    spec.validate();
    RawMesh raw;
    bool radial_noise = false;
    switch (spec.kind) {
    case ShapeKind::Icosphere:
        raw = unit_icosphere(spec.subdivision);
        for (auto& p : raw.points) p *= spec.radius;
        radial_noise = true;
        break;
    case ShapeKind::Ellipsoid:
        raw = unit_icosphere(spec.subdivision);
        for (auto& p : raw.points) p = p.cwiseProduct(spec.semi_axes);
        radial_noise = true;
        break;
    case ShapeKind::Torus: {
        const int segments = spec.torus_segments > 0 ? spec.torus_segments : 8 << spec.subdivision;
        const int rings = spec.torus_rings > 0 ? spec.torus_rings : 4 << spec.subdivision;
        raw = torus(spec.major_radius, spec.minor_radius, segments, rings);
        break;
    }
    case ShapeKind::Disk:
        raw = disk(spec.radius, 1 << spec.subdivision);
        break;
    }
    TriMesh mesh = raw.build();
    if (spec.noise == 0.0) return mesh;

    const Positions normals = radial_noise ? Positions(mesh.positions().rowwise().normalized())
                                           : vertex_normals(mesh);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(-spec.noise, spec.noise);
    Positions V = mesh.positions();
    for (Eigen::Index i = 0; i < V.rows(); ++i) V.row(i) += dist(rng) * normals.row(i);
    return mesh.with_positions(std::move(V));
}

} // namespace geoflow

#pragma once

#include "oracle/dense_reference.hpp"

#include <geoflow/mesh.hpp>
#include <geoflow/shapes.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline oracle::Mesh to_oracle(const geoflow::TriMesh& m)
{
    return {m.positions(), m.faces()};
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("geoflow_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

inline geoflow::TriMesh shape(geoflow::ShapeKind kind, int subdiv, double noise = 0.0, std::uint64_t seed = 0)
{
    geoflow::ShapeSpec s;
    s.kind = kind;
    s.subdivision = subdiv;
    s.noise = noise;
    s.seed = seed;
    return geoflow::generate_shape(s);
}

/// Two triangles on the unit square, split along (0,0)-(1,1).
inline geoflow::TriMesh unit_square()
{
    geoflow::Positions V(4, 3);
    V << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
    geoflow::Faces F(2, 3);
    F << 0, 1, 2, 0, 2, 3;
    return {V, F};
}

inline geoflow::TriMesh unit_cube()
{
    geoflow::Positions V(8, 3);
    V << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1;
    geoflow::Faces F(12, 3);
    F << 0, 2, 1, 0, 3, 2, // bottom
        4, 5, 6, 4, 6, 7, // top
        0, 1, 5, 0, 5, 4, // front
        1, 2, 6, 1, 6, 5, // right
        2, 3, 7, 2, 7, 6, // back
        3, 0, 4, 3, 4, 7; // left
    return {V, F};
}

} // namespace testing

#include "support.hpp"

#include <geoflow/error.hpp>
#include <geoflow/mesh.hpp>
#include <geoflow/mesh_io.hpp>
#include <geoflow/shapes.hpp>

#include <doctest.h>

#include <sstream>

using namespace geoflow;

TEST_CASE("tetrahedron OFF has 6 edges and no boundary")
{
    std::istringstream in("OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n");
    const TriMesh m = read_off(in);
    CHECK(m.vertex_count() == 4);
    CHECK(m.face_count() == 4);
    CHECK(m.topology().edge_count() == 6);
    CHECK(m.topology().boundary_loops().empty());
    CHECK(m.topology().euler_characteristic() == 2);
}

TEST_CASE("OFF counts may follow the header on the same line")
{
    std::istringstream in("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    CHECK(read_off(in).face_count() == 1);
}

TEST_CASE("OBJ quad is rejected with its line number")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    try {
        read_obj(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("non-triangle face") != std::string::npos);
        CHECK(e.line() == 5);
    }
}

TEST_CASE("OFF non-triangle face is rejected")
{
    std::istringstream in("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
    CHECK_THROWS_WITH_AS(read_off(in), doctest::Contains("non-triangle face"), ParseError);
}

TEST_CASE("malformed OBJ lines are reported")
{
    std::istringstream bad_vertex("v 0 0\n");
    CHECK_THROWS_AS(read_obj(bad_vertex), ParseError);
    std::istringstream bad_record("v 0 0 0\nxyz 1\n");
    CHECK_THROWS_WITH_AS(read_obj(bad_record), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("two triangles sharing an edge form one boundary loop of 4 edges")
{
    std::istringstream in("# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\nf 1 3 4\n");
    const TriMesh m = read_obj(in);
    REQUIRE(m.topology().boundary_loops().size() == 1);
    CHECK(m.topology().boundary_loops()[0].size() == 4);
    CHECK_FALSE(m.is_closed());
}

TEST_CASE("OBJ negative indices count back from the last vertex")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    const TriMesh m = read_obj(in);
    CHECK(m.faces().row(0) == Eigen::RowVector3i(0, 1, 2));
}

TEST_CASE("save then load preserves connectivity and positions bit-exactly")
{
    const auto dir = testing::scratch_dir("mesh_roundtrip");
    const TriMesh m = make_icosphere(1);
    for (const char* name : {"ico.obj", "ico.off"}) {
        const auto path = dir / name;
        save_mesh(m, path);
        const TriMesh back = load_mesh(path);
        CHECK(back.faces() == m.faces());
        CHECK(back.positions() == m.positions());
    }
}

TEST_CASE("coordinate 1/3 is stored with at least 9 significant digits")
{
    Positions V(3, 3);
    V << 1.0 / 3.0, 0, 0, 1, 0, 0, 0, 1, 0;
    Faces F(1, 3);
    F << 0, 1, 2;
    std::ostringstream out;
    write_obj(out, TriMesh(V, F));
    CHECK(out.str().find("0.333333333") != std::string::npos);
}

TEST_CASE("saving to an unwritable path is an I/O error")
{
    CHECK_THROWS_AS(save_mesh(make_icosphere(0), "/nonexistent-dir/x/out.obj"), IoError);
    CHECK_THROWS_AS(load_mesh("/nonexistent-dir/in.obj"), IoError);
    CHECK_THROWS_AS(format_from_path("mesh.stl"), IoError);
}

TEST_CASE("icosphere counts follow 1-to-4 subdivision")
{
    const TriMesh m0 = make_icosphere(0);
    CHECK(m0.vertex_count() == 12);
    CHECK(m0.face_count() == 20);
    CHECK(m0.topology().edge_count() == 30);
    for (int k = 1; k <= 4; ++k) {
        const TriMesh m = make_icosphere(k);
        CHECK(m.face_count() == 20 * (1 << (2 * k)));
        CHECK(m.vertex_count() == 10 * (1 << (2 * k)) + 2);
        CHECK((m.positions().rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("generated shapes have the expected Euler characteristic")
{
    ShapeSpec torus;
    torus.kind = ShapeKind::Torus;
    torus.torus_segments = 64;
    torus.torus_rings = 32;
    const TriMesh t = generate_shape(torus);
    CHECK(t.vertex_count() == 64 * 32);
    CHECK(t.is_closed());
    CHECK(t.topology().euler_characteristic() == 0);

    for (ShapeKind kind : {ShapeKind::Icosphere, ShapeKind::Ellipsoid}) {
        const TriMesh m = testing::shape(kind, 2);
        CHECK(m.is_closed());
        CHECK(m.topology().euler_characteristic() == 2);
    }
    const TriMesh disk = testing::shape(ShapeKind::Disk, 3);
    CHECK(disk.topology().boundary_loops().size() == 1);
    CHECK(disk.topology().euler_characteristic() == 1);
    CHECK(validate(disk).clean());
}

TEST_CASE("ellipsoid is the icosphere scaled by its semi-axes")
{
    const TriMesh e = testing::shape(ShapeKind::Ellipsoid, 2);
    const TriMesh s = make_icosphere(2);
    const Positions expected = s.positions().array().rowwise() * Eigen::RowVector3d(2, 1, 1).array();
    CHECK((e.positions() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("noise is deterministic per seed and bounded by sigma")
{
    const double sigma = 0.02;
    const TriMesh a = testing::shape(ShapeKind::Icosphere, 2, sigma, 7);
    const TriMesh b = testing::shape(ShapeKind::Icosphere, 2, sigma, 7);
    const TriMesh c = testing::shape(ShapeKind::Icosphere, 2, sigma, 8);
    CHECK(a.positions() == b.positions());
    CHECK(a.positions() != c.positions());
    const Eigen::VectorXd radial = a.positions().rowwise().norm().array() - 1.0;
    CHECK(radial.cwiseAbs().maxCoeff() <= sigma);
    CHECK(radial.cwiseAbs().maxCoeff() > 0.5 * sigma);
    // Radial: directions are unchanged.
    const TriMesh clean = make_icosphere(2);
    const Positions dirs = a.positions().rowwise().normalized();
    CHECK((dirs - clean.positions()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("disk noise moves vertices along the normal")
{
    const TriMesh clean = testing::shape(ShapeKind::Disk, 2);
    const TriMesh noisy = testing::shape(ShapeKind::Disk, 2, 0.05, 3);
    const Positions d = noisy.positions() - clean.positions();
    CHECK(d.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.col(2).cwiseAbs().maxCoeff() <= 0.05);
    CHECK(d.col(2).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("shape spec errors")
{
    ShapeSpec s;
    s.subdivision = kMaxSubdivision + 1;
    CHECK_THROWS_AS(generate_shape(s), ConfigError);
    s.subdivision = -1;
    CHECK_THROWS_AS(generate_shape(s), ConfigError);
    ShapeSpec e;
    e.kind = ShapeKind::Ellipsoid;
    e.semi_axes = Vec3(1, 0, 1);
    CHECK_THROWS_AS(generate_shape(e), ConfigError);
    CHECK_THROWS_AS(shape_kind_from_string("klein-bottle"), ConfigError);
    CHECK(shape_kind_from_string("sphere") == ShapeKind::Icosphere);
}

TEST_CASE("validate: closed icosphere is clean")
{
    const ValidationReport r = validate(make_icosphere(2));
    CHECK(r.clean());
    CHECK(r.boundary_loop_count == 0);
}

TEST_CASE("validate: zero-area triangle is a degenerate-face finding")
{
    Positions V(4, 3);
    V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0;
    Faces F(2, 3);
    F << 0, 1, 2, 0, 3, 1;
    const ValidationReport r = validate(V, F);
    CHECK(r.count(FindingKind::DegenerateFace) == 1);
    CHECK(r.structurally_valid());
    CHECK_FALSE(r.clean());
    // Degenerate faces are reported, not rejected, by the constructor.
    CHECK_NOTHROW(TriMesh(V, F));
}

TEST_CASE("validate: one flipped face gives orientation violations on its 3 edges")
{
    const TriMesh m = make_icosphere(1);
    Faces F = m.faces();
    std::swap(F(5, 1), F(5, 2));
    const ValidationReport r = validate(m.positions(), F);
    CHECK(r.count(FindingKind::OrientationMismatch) == 3);
    CHECK(r.findings.size() == 3);
    CHECK_THROWS_AS(TriMesh(m.positions(), F), ValidationError);
}

TEST_CASE("validate: non-manifold edge, bad indices, isolated vertex")
{
    Positions V(5, 3);
    V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1;
    Faces F(3, 3);
    F << 0, 1, 2, 1, 0, 3, 0, 1, 4;
    CHECK(validate(V, F).count(FindingKind::NonManifoldEdge) == 1);
    try {
        TriMesh bad(V, F);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.element() >= 0);
    }

    Faces G(1, 3);
    G << 0, 1, 7;
    CHECK(validate(V, G).count(FindingKind::IndexOutOfRange) == 1);
    G << 0, 1, 1;
    CHECK(validate(V, G).count(FindingKind::RepeatedIndex) == 1);
    G << 0, 1, 2;
    CHECK(validate(V, G).count(FindingKind::NonManifoldVertex) == 2);
}

TEST_CASE("adjacency of the icosahedron")
{
    const TriMesh m = make_icosphere(0);
    const Topology& t = m.topology();
    for (int v = 0; v < m.vertex_count(); ++v) {
        CHECK(t.one_ring(v).size() == 5);
        CHECK(t.vertex_faces(v).size() == 5);
        CHECK(std::is_sorted(t.one_ring(v).begin(), t.one_ring(v).end()));
    }
    for (const Edge& e : t.edges()) {
        CHECK_FALSE(e.is_boundary());
        CHECK(e.opposite[0] != e.opposite[1]);
    }
}

TEST_CASE("with_positions shares connectivity")
{
    const TriMesh m = make_icosphere(1);
    const TriMesh scaled = m.with_positions(2.0 * m.positions());
    CHECK(&scaled.topology() == &m.topology());
    CHECK_THROWS_AS(m.with_positions(Positions::Zero(3, 3)), ValidationError);
}

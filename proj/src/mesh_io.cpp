#include <geoflow/error.hpp>
#include <geoflow/mesh_io.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace geoflow {

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

std::string_view strip_comment(std::string_view line)
{
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

template <typename T>
bool parse_number(std::string_view token, T& value)
{
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    return ec == std::errc() && ptr == end;
}

Positions to_positions(const std::vector<Vec3>& points)
{
    Positions V(static_cast<Eigen::Index>(points.size()), 3);
    for (std::size_t i = 0; i < points.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = points[i];
    return V;
}

Faces to_faces(const std::vector<Eigen::Vector3i>& tris)
{
    Faces F(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t i = 0; i < tris.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = tris[i];
    return F;
}

void write_number(std::ostream& out, double x)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, ptr - buf);
}

void write_vertex_row(std::ostream& out, const Positions& V, Eigen::Index i)
{
    write_number(out, V(i, 0));
    out << ' ';
    write_number(out, V(i, 1));
    out << ' ';
    write_number(out, V(i, 2));
    out << '\n';
}

// Records that carry no geometry we use; skipped silently.
bool is_ignored_obj_record(std::string_view tag)
{
    return tag == "vn" || tag == "vt" || tag == "vp" || tag == "o" || tag == "g" || tag == "s" ||
           tag == "usemtl" || tag == "mtllib" || tag == "l";
}

} // namespace

MeshFormat format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") return MeshFormat::Obj;
    if (ext == ".off") return MeshFormat::Off;
    throw IoError("cannot infer mesh format from extension of '" + path.string() + "' (expected .obj or .off)");
}

RawMesh read_obj_raw(std::istream& in)
{
    std::vector<Vec3> points;
    std::vector<Eigen::Vector3i> tris;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto tokens = split(strip_comment(raw));
        if (tokens.empty()) continue;
        const std::string_view tag = tokens[0];
        if (tag == "v") {
            Vec3 p;
            if (tokens.size() < 4 || tokens.size() > 5 || !parse_number(tokens[1], p.x()) ||
                !parse_number(tokens[2], p.y()) || !parse_number(tokens[3], p.z())) {
                throw ParseError("malformed vertex line", line_no);
            }
            points.push_back(p);
        } else if (tag == "f") {
            if (tokens.size() != 4) throw ParseError("non-triangle face", line_no);
            Eigen::Vector3i tri;
            for (int k = 0; k < 3; ++k) {
                std::string_view t = tokens[k + 1];
                t = t.substr(0, t.find('/'));
                long idx = 0;
                if (!parse_number(t, idx) || idx == 0) throw ParseError("malformed face index", line_no);
                // Negative indices count back from the most recent vertex.
                idx = idx > 0 ? idx - 1 : static_cast<long>(points.size()) + idx;
                tri(k) = static_cast<int>(idx);
            }
            tris.push_back(tri);
        } else if (!is_ignored_obj_record(tag)) {
            throw ParseError("unsupported record '" + std::string(tag) + "'", line_no);
        }
    }
    return {to_positions(points), to_faces(tris)};
}

RawMesh read_off_raw(std::istream& in)
{
    std::string raw;
    std::size_t line_no = 0;

    // Returns the tokens of the next non-empty line.
    auto next_tokens = [&](const char* what) {
        while (std::getline(in, raw)) {
            ++line_no;
            auto tokens = split(strip_comment(raw));
            if (!tokens.empty()) return tokens;
        }
        throw ParseError(std::string("unexpected end of file, expected ") + what, line_no);
    };

    auto header = next_tokens("OFF header");
    if (header[0] != "OFF") throw ParseError("missing OFF header", line_no);
    std::vector<std::string_view> counts(header.begin() + 1, header.end());
    if (counts.empty()) {
        counts = next_tokens("vertex/face counts");
    }
    long nv = 0, nf = 0;
    if (counts.size() < 2 || !parse_number(counts[0], nv) || !parse_number(counts[1], nf) || nv < 0 || nf < 0) {
        throw ParseError("malformed counts line", line_no);
    }

    std::vector<Vec3> points;
    points.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        const auto t = next_tokens("vertex");
        Vec3 p;
        if (t.size() < 3 || !parse_number(t[0], p.x()) || !parse_number(t[1], p.y()) || !parse_number(t[2], p.z())) {
            throw ParseError("malformed vertex line", line_no);
        }
        points.push_back(p);
    }
    std::vector<Eigen::Vector3i> tris;
    tris.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        const auto t = next_tokens("face");
        long arity = 0;
        if (!parse_number(t[0], arity)) throw ParseError("malformed face line", line_no);
        if (arity != 3) throw ParseError("non-triangle face", line_no);
        if (t.size() < 4) throw ParseError("malformed face line", line_no);
        Eigen::Vector3i tri;
        for (int k = 0; k < 3; ++k) {
            if (!parse_number(t[k + 1], tri(k))) throw ParseError("malformed face index", line_no);
        }
        tris.push_back(tri);
    }
    return {to_positions(points), to_faces(tris)};
}

TriMesh read_obj(std::istream& in)
{
    RawMesh raw = read_obj_raw(in);
    return TriMesh(std::move(raw.positions), std::move(raw.faces));
}

TriMesh read_off(std::istream& in)
{
    RawMesh raw = read_off_raw(in);
    return TriMesh(std::move(raw.positions), std::move(raw.faces));
}

RawMesh load_raw_mesh(const std::filesystem::path& path)
{
    const MeshFormat format = format_from_path(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return format == MeshFormat::Obj ? read_obj_raw(in) : read_off_raw(in);
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return format == MeshFormat::Obj ? read_obj(in) : read_off(in);
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    return load_mesh(path, format_from_path(path));
}

void write_obj(std::ostream& out, const TriMesh& mesh)
{
    const Positions& V = mesh.positions();
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        out << "v ";
        write_vertex_row(out, V, i);
    }
    const Faces& F = mesh.faces();
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        out << "f " << F(f, 0) + 1 << ' ' << F(f, 1) + 1 << ' ' << F(f, 2) + 1 << '\n';
    }
}

void write_off(std::ostream& out, const TriMesh& mesh)
{
    const Positions& V = mesh.positions();
    const Faces& F = mesh.faces();
    out << "OFF\n" << V.rows() << ' ' << F.rows() << ' ' << mesh.topology().edge_count() << '\n';
    for (Eigen::Index i = 0; i < V.rows(); ++i) write_vertex_row(out, V, i);
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
        out << "3 " << F(f, 0) << ' ' << F(f, 1) << ' ' << F(f, 2) << '\n';
    }
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    if (format == MeshFormat::Obj) {
        write_obj(out, mesh);
    } else {
        write_off(out, mesh);
    }
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path)
{
    save_mesh(mesh, path, format_from_path(path));
}

} // namespace geoflow

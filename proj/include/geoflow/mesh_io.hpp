#pragma once

#include <geoflow/mesh.hpp>

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace geoflow {

enum class MeshFormat { Obj, Off };

/// Picks the format from the file extension (.obj / .off, case-insensitive).
MeshFormat format_from_path(const std::filesystem::path& path);

/// Parsed arrays before any structural validation.
struct RawMesh
{
    Positions positions;
    Faces faces;
};

/// Throws ParseError (with 1-based line).
RawMesh read_obj_raw(std::istream& in);
RawMesh read_off_raw(std::istream& in);
RawMesh load_raw_mesh(const std::filesystem::path& path);

/// Throws ParseError (with 1-based line) or ValidationError.
TriMesh read_obj(std::istream& in);
TriMesh read_off(std::istream& in);
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

/// Coordinates are written in shortest round-trip form, so reloading
/// reproduces positions bit-exactly.
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_off(std::ostream& out, const TriMesh& mesh);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

} // namespace geoflow

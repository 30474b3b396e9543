// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "pdm/math.h"

namespace pdm {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with per-vertex position, unit normal and uv.
/// Attributes are per corner tuple, so uv seams keep duplicate positions.
struct BaseMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;
  std::vector<Face> faces;

  std::size_t face_count() const { return faces.size(); }
  const Vec3& position(std::size_t f, int k) const { return vertices[faces[f][k]]; }
};

enum class MeshFormat { kObj };

inline constexpr double kMinFaceArea = 1e-12;

/// Parses an OBJ subset (v, vt, vn, f). Polygons are fan-triangulated.
/// Missing normals are synthesized by area-weighted face normal averaging.
BaseMesh load_mesh(std::istream& in, MeshFormat format = MeshFormat::kObj);
BaseMesh load_mesh_file(const std::filesystem::path& path);

void write_obj(std::ostream& out, const BaseMesh& mesh);

/// Throws ValidationError / DegenerateFaceError when an invariant fails.
void validate_mesh(const BaseMesh& mesh);

Vec3 face_normal(const BaseMesh& mesh, std::size_t face);  // unit, CCW
double face_area(const BaseMesh& mesh, std::size_t face);

/// Area-weighted vertex normals keyed by vertex index.
std::vector<Vec3> area_weighted_normals(const BaseMesh& mesh);

/// Smallest N_i . N_g over all faces and corners.
double min_normal_dot(const BaseMesh& mesh);

struct CreaseReport {
  int passes = 0;
  bool pass_cap_hit = false;
  std::size_t edges_split = 0;
  std::size_t normals_reset = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> non_manifold_edges;
  // Corners still below sin(threshold) after all passes.
  std::size_t violations_remaining = 0;
};

inline constexpr double kDefaultCreaseDeg = 5.0;
inline constexpr int kMaxCreasePasses = 4;

/// Replaces every interior edge whose interior dihedral angle is below
/// threshold_deg with a bevel strip and re-derives the offending normals
/// so that N_i . N_g >= sin(threshold) holds on all corners.
BaseMesh split_crease_edges(const BaseMesh& mesh, double threshold_deg = kDefaultCreaseDeg,
                            CreaseReport* report = nullptr);

/// Interior dihedral angle in degrees between two faces sharing an edge
/// (180 for coplanar, near 0 for a knife fold).
double interior_dihedral_deg(const Vec3& n_a, const Vec3& n_b);

}  // namespace pdm

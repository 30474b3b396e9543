// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/mesh.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "pdm/error.h"

namespace pdm {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError("bad number '" + std::string(tok) + "'", line_no);
  return v;
}

long parse_index(std::string_view tok, std::size_t count, std::size_t line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
    throw ParseError("bad index '" + std::string(tok) + "'", line_no);
  long idx = v > 0 ? v - 1 : static_cast<long>(count) + v;
  if (idx < 0 || idx >= static_cast<long>(count))
    throw ParseError("index out of range '" + std::string(tok) + "'", line_no);
  return idx;
}

// v/vt/vn with optional parts; -1 when absent.
std::array<long, 3> parse_corner(std::string_view tok, std::size_t nv, std::size_t nt,
                                 std::size_t nn, std::size_t line_no) {
  std::array<long, 3> out{-1, -1, -1};
  std::size_t part = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= tok.size(); ++i) {
    if (i == tok.size() || tok[i] == '/') {
      if (part > 2) throw ParseError("bad face corner '" + std::string(tok) + "'", line_no);
      std::string_view piece = tok.substr(start, i - start);
      if (!piece.empty()) {
        const std::size_t count = part == 0 ? nv : part == 1 ? nt : nn;
        out[part] = parse_index(piece, count, line_no);
      } else if (part == 0) {
        throw ParseError("face corner without position", line_no);
      }
      ++part;
      start = i + 1;
    }
  }
  return out;
}

Vec3 tri_cross(const Vec3& a, const Vec3& b, const Vec3& c) { return (b - a).cross(c - a); }

}  // namespace

BaseMesh load_mesh(std::istream& in, MeshFormat format) {
  if (format != MeshFormat::kObj) throw ParseError("unsupported mesh format");
  std::vector<Vec3> pos;
  std::vector<Vec2> tex;
  std::vector<Vec3> nrm;
  // Corner tuple -> output vertex, numbered by first appearance.
  std::map<std::tuple<long, long, long>, std::uint32_t> corner_ids;
  std::vector<std::tuple<long, long, long>> corners;
  std::vector<Face> faces;
  bool missing_uv = false;
  bool missing_normal = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    auto tok = split_ws(sv);
    if (tok.empty()) continue;
    const std::string_view kw = tok[0];
    if (kw == "v") {
      if (tok.size() < 4) throw ParseError("vertex needs 3 coordinates", line_no);
      pos.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                       parse_double(tok[3], line_no));
    } else if (kw == "vt") {
      if (tok.size() < 3) throw ParseError("texcoord needs 2 coordinates", line_no);
      tex.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no));
    } else if (kw == "vn") {
      if (tok.size() < 4) throw ParseError("normal needs 3 coordinates", line_no);
      nrm.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                       parse_double(tok[3], line_no));
    } else if (kw == "f") {
      if (tok.size() < 4) throw ParseError("face needs at least 3 corners", line_no);
      std::vector<std::uint32_t> poly;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto c = parse_corner(tok[i], pos.size(), tex.size(), nrm.size(), line_no);
        missing_uv |= c[1] < 0;
        missing_normal |= c[2] < 0;
        auto key = std::make_tuple(c[0], c[1], c[2]);
        auto [it, inserted] = corner_ids.emplace(key, static_cast<std::uint32_t>(corners.size()));
        if (inserted) corners.push_back(key);
        poly.push_back(it->second);
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) faces.push_back({poly[0], poly[i], poly[i + 1]});
    } else if (kw == "o" || kw == "g" || kw == "s" || kw == "usemtl" || kw == "mtllib" ||
               kw == "l" || kw == "p") {
      continue;
    } else {
      throw ParseError("unknown directive '" + std::string(kw) + "'", line_no);
    }
  }
  if (faces.empty()) throw ParseError("mesh has no faces");
  if (missing_uv) throw ValidationError("mesh is missing UV coordinates (a UV atlas is required)");

  BaseMesh mesh;
  mesh.vertices.reserve(corners.size());
  mesh.uvs.reserve(corners.size());
  mesh.normals.reserve(corners.size());
  for (const auto& [vi, ti, ni] : corners) {
    mesh.vertices.push_back(pos[vi]);
    mesh.uvs.push_back(tex[ti]);
    mesh.normals.push_back(ni >= 0 ? nrm[ni] : Vec3::Zero());
  }
  mesh.faces = std::move(faces);

  if (missing_normal) {
    // Averaged per position index so uv seams share a normal.
    std::vector<Vec3> acc(pos.size(), Vec3::Zero());
    for (const Face& f : mesh.faces) {
      const Vec3 n = tri_cross(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
      for (int k = 0; k < 3; ++k) acc[std::get<0>(corners[f[k]])] += n;
    }
    for (std::size_t i = 0; i < corners.size(); ++i) {
      if (std::get<2>(corners[i]) >= 0) continue;
      mesh.normals[i] = acc[std::get<0>(corners[i])];
    }
  }
  for (Vec3& n : mesh.normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  validate_mesh(mesh);
  return mesh;
}

BaseMesh load_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file: " + path.string());
  return load_mesh(in, MeshFormat::kObj);
}

void write_obj(std::ostream& out, const BaseMesh& mesh) {
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Vec2& t : mesh.uvs) out << "vt " << t.x() << ' ' << t.y() << '\n';
  for (const Vec3& n : mesh.normals) out << "vn " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (int k = 0; k < 3; ++k) {
      const auto i = f[k] + 1;
      out << ' ' << i << '/' << i << '/' << i;
    }
    out << '\n';
  }
}

void validate_mesh(const BaseMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  if (mesh.normals.size() != nv || mesh.uvs.size() != nv)
    throw ValidationError("normals/uvs arrays must match vertex count");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (auto i : mesh.faces[f])
      if (i >= nv) throw ValidationError("face " + std::to_string(f) + " index out of range");
  for (std::size_t i = 0; i < nv; ++i) {
    if (std::abs(mesh.normals[i].norm() - 1.0) > 1e-6)
      throw ValidationError("vertex " + std::to_string(i) + " normal is not unit length");
    const Vec2& t = mesh.uvs[i];
    if (!(t.x() >= -1e-9 && t.x() <= 1.0 + 1e-9 && t.y() >= -1e-9 && t.y() <= 1.0 + 1e-9))
      throw ValidationError("vertex " + std::to_string(i) + " uv outside [0,1]^2");
  }
  std::vector<std::size_t> degenerate;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    if (!(face_area(mesh, f) > kMinFaceArea)) degenerate.push_back(f);
  if (!degenerate.empty()) throw DegenerateFaceError(std::move(degenerate));
}

Vec3 face_normal(const BaseMesh& mesh, std::size_t face) {
  const Face& f = mesh.faces[face];
  return tri_cross(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]).normalized();
}

double face_area(const BaseMesh& mesh, std::size_t face) {
  const Face& f = mesh.faces[face];
  return 0.5 * tri_cross(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]).norm();
}

std::vector<Vec3> area_weighted_normals(const BaseMesh& mesh) {
  std::vector<Vec3> acc(mesh.vertices.size(), Vec3::Zero());
  for (const Face& f : mesh.faces) {
    const Vec3 n = tri_cross(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    for (auto i : f) acc[i] += n;
  }
  for (Vec3& n : acc) n = normalized_or(n, Vec3::UnitZ());
  return acc;
}

double min_normal_dot(const BaseMesh& mesh) {
  double m = 1.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 ng = face_normal(mesh, f);
    for (auto i : mesh.faces[f]) m = std::min(m, mesh.normals[i].dot(ng));
  }
  return m;
}

double interior_dihedral_deg(const Vec3& n_a, const Vec3& n_b) {
  return 180.0 - rad_to_deg(angle_between(n_a, n_b));
}

namespace {

constexpr double kBevel = 0.1;

using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;

struct HalfEdge {
  std::uint32_t face;
  int k;  // edge from faces[face][k] to faces[face][(k+1)%3]
};

struct EdgeTable {
  std::map<EdgeKey, std::vector<HalfEdge>> undirected;
  std::map<EdgeKey, std::uint32_t> directed;  // (from, to) -> face
};

EdgeTable build_edges(const std::vector<Face>& faces) {
  EdgeTable t;
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const auto a = faces[f][k];
      const auto b = faces[f][(k + 1) % 3];
      t.undirected[{std::min(a, b), std::max(a, b)}].push_back({f, k});
      t.directed[{a, b}] = f;
    }
  }
  return t;
}

// Rotates f so that f[0] == v.
Face rotate_to(const Face& f, std::uint32_t v) {
  if (f[1] == v) return {f[1], f[2], f[0]};
  if (f[2] == v) return {f[2], f[0], f[1]};
  return f;
}

struct MeshBuilder {
  BaseMesh& m;
  std::uint32_t lerp_vertex(std::uint32_t from, std::uint32_t to, double s) {
    m.vertices.push_back(m.vertices[from] + s * (m.vertices[to] - m.vertices[from]));
    m.uvs.push_back(m.uvs[from] + s * (m.uvs[to] - m.uvs[from]));
    m.normals.push_back(m.normals[from]);
    return static_cast<std::uint32_t>(m.vertices.size() - 1);
  }
};

double tri_area(const BaseMesh& m, const Face& f) {
  return 0.5 * tri_cross(m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]).norm();
}

// Equal-weight average of incident unit face normals.
void reset_normals(BaseMesh& m, const std::vector<bool>& mark) {
  std::vector<Vec3> acc(m.vertices.size(), Vec3::Zero());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Vec3 n = face_normal(m, f);
    for (auto i : m.faces[f])
      if (mark[i]) acc[i] += n;
  }
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    if (mark[i]) m.normals[i] = normalized_or(acc[i], m.normals[i]);
}

void compact_vertices(BaseMesh& m) {
  std::vector<std::int64_t> remap(m.vertices.size(), -1);
  BaseMesh out;
  for (Face& f : m.faces) {
    for (auto& i : f) {
      if (remap[i] < 0) {
        remap[i] = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(m.vertices[i]);
        out.normals.push_back(m.normals[i]);
        out.uvs.push_back(m.uvs[i]);
      }
      i = static_cast<std::uint32_t>(remap[i]);
    }
  }
  out.faces = std::move(m.faces);
  m = std::move(out);
}

}  // namespace

BaseMesh split_crease_edges(const BaseMesh& mesh, double threshold_deg, CreaseReport* report) {
  if (!(threshold_deg > 0.0 && threshold_deg < 90.0))
    throw ValidationError("crease threshold must be in (0, 90) degrees");
  CreaseReport rep;
  BaseMesh m = mesh;
  const double eps = std::sin(deg_to_rad(threshold_deg));
  std::vector<bool> is_new(m.vertices.size(), false);
  bool changed_any = false;

  for (int pass = 0;; ++pass) {
    EdgeTable edges = build_edges(m.faces);
    std::vector<std::pair<HalfEdge, HalfEdge>> creases;
    for (const auto& [key, hes] : edges.undirected) {
      if (hes.size() > 2) {
        if (pass == 0) rep.non_manifold_edges.push_back(key);
        continue;
      }
      if (hes.size() != 2) continue;
      const Vec3 na = face_normal(m, hes[0].face);
      const Vec3 nb = face_normal(m, hes[1].face);
      if (interior_dihedral_deg(na, nb) < threshold_deg) creases.emplace_back(hes[0], hes[1]);
    }
    if (creases.empty()) break;
    if (pass == kMaxCreasePasses) {
      rep.pass_cap_hit = true;
      break;
    }
    rep.passes = pass + 1;

    std::vector<bool> touched(m.faces.size(), false);
    std::vector<Face> added;
    MeshBuilder mb{m};
    for (auto [ha, hb] : creases) {
      Face fa = m.faces[ha.face];
      Face fb = m.faces[hb.face];
      const std::uint32_t u = fa[ha.k];
      const std::uint32_t w = fa[(ha.k + 1) % 3];
      // Orientation must be consistent: B traverses w -> u.
      if (fb[hb.k] != w || fb[(hb.k + 1) % 3] != u) continue;
      fa = rotate_to(fa, u);  // (u, w, a)
      fb = rotate_to(fb, w);  // (w, u, b)
      const std::uint32_t a = fa[2];
      const std::uint32_t b = fb[2];
      if (a == b) continue;

      auto neighbour = [&](std::uint32_t from, std::uint32_t to) -> std::int64_t {
        auto it = edges.directed.find({from, to});
        return it == edges.directed.end() ? -1 : static_cast<std::int64_t>(it->second);
      };
      const std::int64_t f_u = neighbour(u, a);  // across A's a->u
      const std::int64_t g_u = neighbour(b, u);  // across B's u->b
      const std::int64_t f_w = neighbour(a, w);  // across A's w->a
      const std::int64_t g_w = neighbour(w, b);  // across B's b->w
      std::vector<std::int64_t> involved{ha.face, hb.face, f_u, g_u, f_w, g_w};
      bool conflict = false;
      for (std::size_t i = 0; i < involved.size(); ++i) {
        if (involved[i] < 0) continue;
        if (touched[involved[i]]) conflict = true;
        for (std::size_t j = i + 1; j < involved.size(); ++j)
          if (involved[i] == involved[j]) conflict = true;
      }
      if (conflict) continue;

      const std::size_t vbase = m.vertices.size();
      const std::uint32_t uA = mb.lerp_vertex(u, a, kBevel);
      const std::uint32_t wA = mb.lerp_vertex(w, a, kBevel);
      const std::uint32_t uB = mb.lerp_vertex(u, b, kBevel);
      const std::uint32_t wB = mb.lerp_vertex(w, b, kBevel);

      std::vector<std::pair<std::int64_t, Face>> replace;
      std::vector<Face> extra;
      replace.emplace_back(ha.face, Face{uA, wA, a});
      replace.emplace_back(hb.face, Face{wB, uB, b});
      extra.push_back({wA, uA, uB});
      extra.push_back({wA, uB, wB});
      if (f_u >= 0) {
        const Face f = rotate_to(m.faces[f_u], u);  // (u, a, x)
        replace.emplace_back(f_u, Face{u, uA, f[2]});
        extra.push_back({uA, a, f[2]});
      }
      if (g_u >= 0) {
        const Face g = rotate_to(m.faces[g_u], b);  // (b, u, y)
        replace.emplace_back(g_u, Face{b, uB, g[2]});
        extra.push_back({uB, u, g[2]});
      }
      if (f_u >= 0 || g_u >= 0) extra.push_back({u, uB, uA});
      if (f_w >= 0) {
        const Face f = rotate_to(m.faces[f_w], a);  // (a, w, x)
        replace.emplace_back(f_w, Face{a, wA, f[2]});
        extra.push_back({wA, w, f[2]});
      }
      if (g_w >= 0) {
        const Face g = rotate_to(m.faces[g_w], w);  // (w, b, y)
        replace.emplace_back(g_w, Face{w, wB, g[2]});
        extra.push_back({wB, b, g[2]});
      }
      if (f_w >= 0 || g_w >= 0) extra.push_back({w, wA, wB});

      bool degenerate = false;
      for (const auto& [idx, f] : replace) degenerate |= !(tri_area(m, f) > kMinFaceArea);
      for (const Face& f : extra) degenerate |= !(tri_area(m, f) > kMinFaceArea);
      if (degenerate) {
        m.vertices.resize(vbase);
        m.uvs.resize(vbase);
        m.normals.resize(vbase);
        continue;
      }
      for (const auto& [idx, f] : replace) {
        m.faces[idx] = f;
        touched[idx] = true;
      }
      added.insert(added.end(), extra.begin(), extra.end());
      is_new.resize(m.vertices.size(), true);
      ++rep.edges_split;
      changed_any = true;
    }
    if (added.empty()) {
      // Every remaining crease was deferred or rejected; further passes cannot help.
      rep.pass_cap_hit = true;
      break;
    }
    m.faces.insert(m.faces.end(), added.begin(), added.end());
    is_new.resize(m.vertices.size(), false);
    reset_normals(m, is_new);
  }

  // Re-derive any corner normal that still violates the bound.
  std::vector<bool> bad(m.vertices.size(), false);
  bool any_bad = false;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Vec3 ng = face_normal(m, f);
    for (auto i : m.faces[f])
      if (m.normals[i].dot(ng) < eps) bad[i] = any_bad = true;
  }
  if (any_bad) {
    reset_normals(m, bad);
    rep.normals_reset = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), true));
    changed_any = true;
  }
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Vec3 ng = face_normal(m, f);
    for (auto i : m.faces[f])
      if (m.normals[i].dot(ng) < eps) ++rep.violations_remaining;
  }
  if (changed_any) compact_vertices(m);
  if (report) *report = std::move(rep);
  return m;
}

}  // namespace pdm

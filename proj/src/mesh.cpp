#include "ncr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "ncr/error.hpp"

namespace ncr {

int Triangulation::local_facet(Index c, Index f) const {
  const auto& cf = cell_facets_[c];
  for (int k = 0; k < 3; ++k)
    if (cf[k] == f) return k;
  return -1;
}

int Triangulation::local_vertex(Index c, Index v) const {
  const auto& cv = cells_[c];
  for (int k = 0; k < 3; ++k)
    if (cv[k] == v) return k;
  return -1;
}

std::array<double, 3> Triangulation::barycentric(Index c, const Vec2& x) const {
  const auto& cv = cells_[c];
  const Vec2& a = vertices_[cv[0]];
  const Vec2& b = vertices_[cv[1]];
  const Vec2& d = vertices_[cv[2]];
  const double area2 = signed_area2(a, b, d);
  const double l0 = signed_area2(x, b, d) / area2;
  const double l1 = signed_area2(a, x, d) / area2;
  return {l0, l1, 1.0 - l0 - l1};
}

Triangulation build_connectivity(std::vector<Vec2> vertices,
                                 std::vector<std::array<Index, 3>> cells) {
  Triangulation t;
  const auto nv = static_cast<Index>(vertices.size());
  if (cells.empty()) throw MeshError("triangulation has no cells");

  double extent = 0.0;
  for (const auto& v : vertices) extent = std::max({extent, std::abs(v.x), std::abs(v.y)});
  const double area_floor = 1e-14 * std::max(extent * extent, 1e-300);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cv = cells[c];
    for (Index v : cv)
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(c) + " references vertex " +
                        std::to_string(v) + " out of range");
    if (cv[0] == cv[1] || cv[1] == cv[2] || cv[0] == cv[2])
      throw MeshError("cell " + std::to_string(c) + " repeats a vertex");
    const double a2 = signed_area2(vertices[cv[0]], vertices[cv[1]], vertices[cv[2]]);
    if (std::abs(a2) <= area_floor)
      throw MeshError("cell " + std::to_string(c) + " is degenerate (zero area)");
    if (a2 < 0) std::swap(cv[1], cv[2]);
  }
  {
    std::vector<std::array<Index, 3>> sorted = cells;
    for (auto& s : sorted) std::sort(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError("duplicate cells");
  }

  // (key0, key1, cell, local)
  std::vector<std::tuple<Index, Index, Index, int>> half;
  half.reserve(3 * cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      Index a = cells[c][(k + 1) % 3];
      Index b = cells[c][(k + 2) % 3];
      if (a > b) std::swap(a, b);
      half.emplace_back(a, b, static_cast<Index>(c), k);
    }
  }
  std::sort(half.begin(), half.end());

  t.cells_ = std::move(cells);
  t.vertices_ = std::move(vertices);
  const std::size_t nc = t.cells_.size();
  t.cell_facets_.assign(nc, {-1, -1, -1});

  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && std::get<0>(half[j]) == std::get<0>(half[i]) &&
           std::get<1>(half[j]) == std::get<1>(half[i]))
      ++j;
    if (j - i > 2)
      throw MeshError("non-manifold facet (" + std::to_string(std::get<0>(half[i])) + ", " +
                      std::to_string(std::get<1>(half[i])) + ") shared by " +
                      std::to_string(j - i) + " cells");
    const auto f = static_cast<Index>(t.facets_.size());
    t.facets_.push_back({std::get<0>(half[i]), std::get<1>(half[i])});
    std::array<Index, 2> fc{std::get<2>(half[i]), kNoCell};
    t.cell_facets_[std::get<2>(half[i])][std::get<3>(half[i])] = f;
    if (j - i == 2) {
      fc[1] = std::get<2>(half[i + 1]);
      t.cell_facets_[std::get<2>(half[i + 1])][std::get<3>(half[i + 1])] = f;
      if (fc[1] < fc[0]) std::swap(fc[0], fc[1]);
    }
    t.facet_cells_.push_back(fc);
    i = j;
  }

  const std::size_t nf = t.facets_.size();
  t.facet_boundary_.assign(nf, 0);
  t.vertex_boundary_.assign(t.vertices_.size(), 0);
  t.num_boundary_facets_ = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    if (t.facet_cells_[f][1] == kNoCell) {
      t.facet_boundary_[f] = 1;
      t.vertex_boundary_[t.facets_[f][0]] = 1;
      t.vertex_boundary_[t.facets_[f][1]] = 1;
      ++t.num_boundary_facets_;
    }
  }

  t.vertex_cells_.assign(t.vertices_.size(), {});
  t.vertex_vertices_.assign(t.vertices_.size(), {});
  t.vertex_facets_.assign(t.vertices_.size(), {});
  for (std::size_t c = 0; c < nc; ++c)
    for (Index v : t.cells_[c]) t.vertex_cells_[v].push_back(static_cast<Index>(c));
  for (std::size_t f = 0; f < nf; ++f) {
    const auto [a, b] = t.facets_[f];
    t.vertex_vertices_[a].push_back(b);
    t.vertex_vertices_[b].push_back(a);
    t.vertex_facets_[a].push_back(static_cast<Index>(f));
    t.vertex_facets_[b].push_back(static_cast<Index>(f));
  }
  for (auto& vv : t.vertex_vertices_) std::sort(vv.begin(), vv.end());

  t.cell_area_.resize(nc);
  t.cell_centroid_.resize(nc);
  t.cell_normals_.resize(nc);
  t.domain_area_ = 0.0;
  t.diameter_ = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& cv = t.cells_[c];
    const Vec2 p[3] = {t.vertices_[cv[0]], t.vertices_[cv[1]], t.vertices_[cv[2]]};
    t.cell_area_[c] = 0.5 * signed_area2(p[0], p[1], p[2]);
    t.cell_centroid_[c] = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
    for (int k = 0; k < 3; ++k) {
      t.cell_normals_[c][k] = perp_right(p[(k + 2) % 3] - p[(k + 1) % 3]);
      t.diameter_ = std::max(t.diameter_, norm(p[(k + 2) % 3] - p[(k + 1) % 3]));
    }
    t.domain_area_ += t.cell_area_[c];
  }

  t.facet_length_.resize(nf);
  t.facet_midpoint_.resize(nf);
  t.facet_normal_.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const Vec2& a = t.vertices_[t.facets_[f][0]];
    const Vec2& b = t.vertices_[t.facets_[f][1]];
    t.facet_length_[f] = norm(b - a);
    t.facet_midpoint_[f] = 0.5 * (a + b);
    const Index c0 = t.facet_cells_[f][0];
    const int k = t.local_facet(c0, static_cast<Index>(f));
    t.facet_normal_[f] = (1.0 / t.facet_length_[f]) * t.cell_normals_[c0][k];
  }

  t.mesh_size_ = std::sqrt(2.0 * t.domain_area_ / static_cast<double>(nc));
  return t;
}

namespace {

void check_grid_size(int n, int minimum) {
  if (n < minimum)
    throw InvalidArgument("grid size n must be at least " + std::to_string(minimum) + ", got " +
                          std::to_string(n));
}

// Two triangles per grid square; `rising` cuts lower-left to upper-right.
void split_square(std::vector<std::array<Index, 3>>& cells, Index v00, Index v10, Index v01,
                  Index v11, bool rising) {
  if (rising) {
    cells.push_back({v00, v10, v11});
    cells.push_back({v00, v11, v01});
  } else {
    cells.push_back({v00, v10, v01});
    cells.push_back({v10, v11, v01});
  }
}

Triangulation grid(int n, const std::vector<Vec2>& vertices, auto&& rising) {
  std::vector<std::array<Index, 3>> cells;
  cells.reserve(2 * static_cast<std::size_t>(n) * n);
  const auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      split_square(cells, id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1), rising(i, j));
  return build_connectivity(vertices, std::move(cells));
}

}  // namespace

Triangulation generate_structured(int n, DiagonalMode mode) {
  check_grid_size(n, 2);
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  if (mode == DiagonalMode::Uniform) return grid(n, vertices, [](int, int) { return true; });

  return grid(n, vertices, [n](int i, int j) {
    const bool left = i == 0, right = i == n - 1, bottom = j == 0, top = j == n - 1;
    if ((left && bottom) || (right && top)) return true;
    if ((right && bottom) || (left && top)) return false;
    return (i + j) % 2 == 0;
  });
}

Triangulation generate_kershaw(int n, double distortion) {
  check_grid_size(n, 4);
  if (n % 4 != 0) throw InvalidArgument("Kershaw grid size must be divisible by 4");
  if (!(distortion >= 0.0 && distortion < 1.0))
    throw InvalidArgument("Kershaw distortion must lie in [0, 1)");

  // Zigzag through +1/2, -1/2, +1/2, -1/2, +1/2 at the quarter lines.
  const auto zigzag = [](double x) {
    const double s = 4.0 * x;
    const int strip = std::min(3, static_cast<int>(std::floor(s)));
    const double t = s - strip;
    const double sign = strip % 2 == 0 ? 1.0 : -1.0;
    return sign * (0.5 - t);
  };

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      const double eta = static_cast<double>(j) / n;
      double y = eta;
      if (distortion != 0.0 && j != 0 && j != n)
        y += distortion * zigzag(x) * 2.0 * eta * (1.0 - eta);
      vertices.push_back({x, y});
    }
  }
  return grid(n, vertices, [](int, int) { return true; });
}

Triangulation repair_boundary_corners(const Triangulation& tri, int* swaps) {
  std::vector<std::array<Index, 3>> cells = tri.cells();
  std::vector<std::uint8_t> touched(cells.size(), 0);
  int count = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    int nb = 0;
    Index interior = -1;
    for (Index f : tri.cell_facets(static_cast<Index>(c))) {
      if (tri.facet_on_boundary(f))
        ++nb;
      else
        interior = f;
    }
    if (nb < 2) continue;
    if (interior < 0) throw MeshError("isolated triangle " + std::to_string(c));
    const auto fc = tri.facet_cells(interior);
    const Index other = fc[0] == static_cast<Index>(c) ? fc[1] : fc[0];
    if (touched[c] || touched[other])
      throw MeshError("cannot repair adjacent corner triangles " + std::to_string(c));
    // Quad (apex_c, a, apex_o, b) where a-b is the shared edge.
    const int kc = tri.local_facet(static_cast<Index>(c), interior);
    const int ko = tri.local_facet(other, interior);
    const Index apex_c = cells[c][kc];
    const Index a = cells[c][(kc + 1) % 3];
    const Index b = cells[c][(kc + 2) % 3];
    const Index apex_o = cells[other][ko];
    const std::array<Index, 3> t1{apex_c, a, apex_o};
    const std::array<Index, 3> t2{apex_c, apex_o, b};
    for (const auto& t : {t1, t2})
      if (signed_area2(tri.vertex(t[0]), tri.vertex(t[1]), tri.vertex(t[2])) <= 0.0)
        throw MeshError("corner quadrilateral at cell " + std::to_string(c) + " is not convex");
    cells[c] = t1;
    cells[other] = t2;
    touched[c] = touched[other] = 1;
    ++count;
  }
  if (swaps) *swaps = count;
  return build_connectivity(tri.vertices(), std::move(cells));
}

ValidationReport validate(const Triangulation& tri) {
  ValidationReport r;
  for (std::size_t c = 0; c < tri.num_cells(); ++c) {
    const auto& cv = tri.cell(static_cast<Index>(c));
    if (signed_area2(tri.vertex(cv[0]), tri.vertex(cv[1]), tri.vertex(cv[2])) <= 0.0)
      r.orientation_ok = false;
    Vec2 sum{};
    double perimeter = 0.0;
    for (int k = 0; k < 3; ++k) {
      sum += tri.cell_normal(static_cast<Index>(c), k);
      perimeter += norm(tri.cell_normal(static_cast<Index>(c), k));
    }
    if (norm(sum) > 1e-14 * perimeter) r.normals_ok = false;
    int nb = 0;
    for (Index f : tri.cell_facets(static_cast<Index>(c)))
      if (tri.facet_on_boundary(f)) ++nb;
    if (nb >= 2) r.hypothesis_41_violations.push_back(static_cast<Index>(c));
  }
  std::vector<int> incidence(tri.num_facets(), 0);
  for (std::size_t c = 0; c < tri.num_cells(); ++c)
    for (Index f : tri.cell_facets(static_cast<Index>(c))) ++incidence[f];
  for (std::size_t f = 0; f < tri.num_facets(); ++f) {
    const int expected = tri.facet_on_boundary(static_cast<Index>(f)) ? 1 : 2;
    if (incidence[f] != expected) r.manifold_ok = false;
    if (std::abs(norm(tri.facet_normal(static_cast<Index>(f))) - 1.0) > 1e-14)
      r.normals_ok = false;
  }
  r.euler_characteristic = static_cast<long>(tri.num_vertices()) -
                           static_cast<long>(tri.num_facets()) +
                           static_cast<long>(tri.num_cells());
  r.euler_ok = r.euler_characteristic == 1;
  return r;
}

void write_mesh(const Triangulation& tri, std::ostream& out) {
  out << "ncr-mesh 1\n" << tri.num_vertices() << ' ' << tri.num_cells() << '\n';
  out << std::setprecision(17);
  for (const auto& v : tri.vertices()) out << v.x << ' ' << v.y << '\n';
  for (const auto& c : tri.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
}

void write_mesh(const Triangulation& tri, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_mesh(tri, out);
  if (!out) throw Error("write failed for " + path.string());
}

Triangulation read_mesh(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  const auto next = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw ParseError("unexpected end of file", lineno + 1);
  };

  if (!std::getline(in, line)) throw ParseError("missing header 'ncr-mesh 1'", 1);
  lineno = 1;
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "ncr-mesh" || version != 1)
      throw ParseError("malformed header, expected 'ncr-mesh 1'", lineno);
  }
  long nv = -1, nc = -1;
  {
    auto ls = next();
    if (!(ls >> nv >> nc) || nv < 3 || nc < 1)
      throw ParseError("malformed counts line '<nvertices> <ncells>'", lineno);
  }
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    auto ls = next();
    if (!(ls >> v.x >> v.y)) throw ParseError("cannot parse vertex coordinates", lineno);
  }
  std::vector<std::array<Index, 3>> cells(static_cast<std::size_t>(nc));
  for (auto& c : cells) {
    auto ls = next();
    long a, b, d;
    if (!(ls >> a >> b >> d)) throw ParseError("cannot parse cell indices", lineno);
    for (long idx : {a, b, d})
      if (idx < 0 || idx >= nv)
        throw ParseError("vertex index " + std::to_string(idx) + " out of range [0, " +
                             std::to_string(nv) + ")",
                         lineno);
    c = {static_cast<Index>(a), static_cast<Index>(b), static_cast<Index>(d)};
  }
  return build_connectivity(std::move(vertices), std::move(cells));
}

Triangulation read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path.string());
  return read_mesh(in);
}

}  // namespace ncr

#include "plfem/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace plfem {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a;
  const Eigen::Vector2d v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

// Clockwise rotation; applied to the edge vector of {a,b} with a < b this
// fixes the facet normal deterministically.
Eigen::Vector2d rot_cw(const Eigen::Vector2d& v) {
  return Eigen::Vector2d(v.y(), -v.x());
}

std::pair<int, int> edge_key(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("mesh: " + what);
}

}  // namespace

// --------------------------------------------------------------------------
// MacroMesh
// --------------------------------------------------------------------------

void MacroMesh::finalise() {
  const int nn = static_cast<int>(nodes.size());
  std::map<std::pair<int, int>, int> edge_count;
  for (size_t k = 0; k < elements.size(); ++k) {
    const auto& e = elements[k];
    for (int j = 0; j < 3; ++j) {
      if (e[j] < 0 || e[j] >= nn)
        fail("element " + std::to_string(k) + " references node " +
             std::to_string(e[j]) + " out of range");
      if (e[j] == e[(j + 1) % 3])
        fail("element " + std::to_string(k) + " is degenerate");
    }
    if (signed_area(nodes[e[0]], nodes[e[1]], nodes[e[2]]) <= 0.0)
      fail("element " + std::to_string(k) +
           " has non-positive area (vertices must be CCW)");
    for (int j = 0; j < 3; ++j) {
      const auto key = edge_key(e[(j + 1) % 3], e[(j + 2) % 3]);
      if (++edge_count[key] > 2)
        fail("non-conforming mesh: edge (" + std::to_string(key.first) + "," +
             std::to_string(key.second) + ") has more than two elements");
    }
  }
  boundary_node.assign(nn, false);
  for (const auto& [key, count] : edge_count) {
    if (count == 1) {
      boundary_node[key.first] = true;
      boundary_node[key.second] = true;
    }
  }
}

MacroMesh unit_square_macro(int n) {
  if (n < 1) fail("unit_square_macro: n must be >= 1");
  MacroMesh m;
  m.nodes.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.nodes.emplace_back(static_cast<double>(i) / n,
                           static_cast<double>(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  m.elements.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Split along the lower-left / upper-right diagonal, both CCW.
      m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  m.finalise();
  return m;
}

MacroMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  MacroMesh m;
  std::string line;
  int lineno = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      fail("'" + path + "': unexpected end of file, expected " +
           std::string(what));
    ++lineno;
  };

  next_line("'nodes <count>'");
  {
    std::istringstream ss(line);
    std::string tag;
    long count = -1;
    if (!(ss >> tag >> count) || tag != "nodes" || count < 0)
      fail("'" + path + "' line " + std::to_string(lineno) +
           ": expected 'nodes <count>'");
    m.nodes.reserve(count);
    for (long i = 0; i < count; ++i) {
      next_line("a node coordinate line");
      std::istringstream ns(line);
      double x, y;
      if (!(ns >> x >> y))
        fail("'" + path + "' line " + std::to_string(lineno) +
             ": expected 'x y'");
      m.nodes.emplace_back(x, y);
    }
  }

  next_line("'elements <count>'");
  {
    std::istringstream ss(line);
    std::string tag;
    long count = -1;
    if (!(ss >> tag >> count) || tag != "elements" || count < 0)
      fail("'" + path + "' line " + std::to_string(lineno) +
           ": expected 'elements <count>'");
    m.elements.reserve(count);
    for (long i = 0; i < count; ++i) {
      next_line("an element line");
      std::istringstream es(line);
      int a, b, c;
      if (!(es >> a >> b >> c))
        fail("'" + path + "' line " + std::to_string(lineno) +
             ": expected 'i j k'");
      m.elements.push_back({a, b, c});
    }
  }

  m.finalise();
  return m;
}

void write_mesh(const MacroMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  char buf[128];
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x(), p.y());
    out << buf;
  }
  out << "elements " << mesh.elements.size() << "\n";
  for (const auto& e : mesh.elements)
    out << e[0] << " " << e[1] << " " << e[2] << "\n";
}

// --------------------------------------------------------------------------
// Red refinement
// --------------------------------------------------------------------------

namespace {

// Facet topology of the fine mesh.  Normal orientation: for {a,b} with
// a < b, n = cw-rotation of (x_b - x_a), and elems[0] is the element the
// normal exits.  Boundary facets are flipped outward if necessary.
void build_facets(FineMesh& mesh) {
  std::map<std::pair<int, int>, int> facet_of_edge;
  mesh.element_facets.assign(mesh.elements.size(), {-1, -1, -1});

  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    for (int j = 0; j < 3; ++j) {
      const int a = e[(j + 1) % 3];
      const int b = e[(j + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = facet_of_edge.find(key);
      if (it == facet_of_edge.end()) {
        Facet f;
        f.nodes = {key.first, key.second};
        f.elems = {k, -1};
        const Eigen::Vector2d t =
            mesh.nodes[key.second] - mesh.nodes[key.first];
        f.length = t.norm();
        f.normal = rot_cw(t) / f.length;
        const int idx = static_cast<int>(mesh.facets.size());
        mesh.facets.push_back(f);
        facet_of_edge.emplace(key, idx);
        mesh.element_facets[k][j] = idx;
      } else {
        Facet& f = mesh.facets[it->second];
        if (f.elems[1] != -1) fail("non-conforming refinement");
        f.elems[1] = k;
        mesh.element_facets[k][j] = it->second;
      }
    }
  }

  // Orient: elems[0] must be the element the normal points out of.
  for (Facet& f : mesh.facets) {
    const Eigen::Vector2d mid =
        0.5 * (mesh.nodes[f.nodes[0]] + mesh.nodes[f.nodes[1]]);
    auto outward_of = [&](int k) {
      const auto& e = mesh.elements[k];
      int opp = -1;
      for (int j = 0; j < 3; ++j)
        if (e[j] != f.nodes[0] && e[j] != f.nodes[1]) opp = e[j];
      return f.normal.dot(mid - mesh.nodes[opp]) > 0.0;
    };
    if (f.elems[1] == -1) {
      // Boundary: force outward.
      if (!outward_of(f.elems[0])) f.normal = -f.normal;
    } else if (!outward_of(f.elems[0])) {
      std::swap(f.elems[0], f.elems[1]);
    }
  }

  // Classification.
  for (Facet& f : mesh.facets) {
    if (f.elems[1] == -1) {
      f.cls = FacetClass::Boundary;
      f.macro = -1;
    } else {
      const int m0 = mesh.parent_macro[f.elems[0]];
      const int m1 = mesh.parent_macro[f.elems[1]];
      if (m0 == m1) {
        f.cls = FacetClass::MacroInterior;
        f.macro = m0;
      } else {
        f.cls = FacetClass::MacroInterface;
        f.macro = -1;
      }
    }
  }

  // Boundary nodes.
  mesh.boundary_node.assign(mesh.nodes.size(), false);
  for (const Facet& f : mesh.facets) {
    if (f.cls == FacetClass::Boundary) {
      mesh.boundary_node[f.nodes[0]] = true;
      mesh.boundary_node[f.nodes[1]] = true;
    }
  }
}

void build_geometry(FineMesh& mesh) {
  mesh.area.resize(mesh.n_elements());
  mesh.grad_hat.resize(mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    const Eigen::Vector2d& p0 = mesh.nodes[e[0]];
    const Eigen::Vector2d& p1 = mesh.nodes[e[1]];
    const Eigen::Vector2d& p2 = mesh.nodes[e[2]];
    const double A = signed_area(p0, p1, p2);
    if (A <= 0.0) fail("refined element with non-positive area");
    mesh.area[k] = A;
    // grad of hat_j is the inward normal of the opposite edge scaled by
    // 1/height; ccw rotation of the opposite edge vector over 2A.
    auto ccw = [](const Eigen::Vector2d& v) {
      return Eigen::Vector2d(-v.y(), v.x());
    };
    mesh.grad_hat[k][0] = ccw(p2 - p1) / (2.0 * A);
    mesh.grad_hat[k][1] = ccw(p0 - p2) / (2.0 * A);
    mesh.grad_hat[k][2] = ccw(p1 - p0) / (2.0 * A);
  }

  mesh.macro_area.assign(mesh.macro.elements.size(), 0.0);
  for (int k = 0; k < mesh.n_elements(); ++k)
    mesh.macro_area[mesh.parent_macro[k]] += mesh.area[k];

  mesh.h = 0.0;
  for (const Facet& f : mesh.facets) mesh.h = std::max(mesh.h, f.length);
  mesh.H = 0.0;
  for (const auto& e : mesh.macro.elements)
    for (int j = 0; j < 3; ++j)
      mesh.H = std::max(mesh.H, (mesh.macro.nodes[e[(j + 1) % 3]] -
                                 mesh.macro.nodes[e[(j + 2) % 3]])
                                    .norm());
}

}  // namespace

FineMesh red_refine(const MacroMesh& macro) {
  FineMesh mesh;
  mesh.macro = macro;
  mesh.nodes = macro.nodes;

  // Midpoint nodes, one per macro edge; exact dedup via integer edge keys.
  std::map<std::pair<int, int>, int> midpoint_of_edge;
  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint_of_edge.find(key);
    if (it != midpoint_of_edge.end()) return it->second;
    const int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(0.5 * (macro.nodes[a] + macro.nodes[b]));
    midpoint_of_edge.emplace(key, id);
    return id;
  };

  mesh.elements.reserve(4 * macro.elements.size());
  mesh.parent_macro.reserve(4 * macro.elements.size());
  for (size_t m = 0; m < macro.elements.size(); ++m) {
    const auto& e = macro.elements[m];
    const int m01 = midpoint(e[0], e[1]);
    const int m12 = midpoint(e[1], e[2]);
    const int m20 = midpoint(e[2], e[0]);
    // Three corner children plus the inner child, all CCW.
    mesh.elements.push_back({e[0], m01, m20});
    mesh.elements.push_back({e[1], m12, m01});
    mesh.elements.push_back({e[2], m20, m12});
    mesh.elements.push_back({m01, m12, m20});
    for (int c = 0; c < 4; ++c) mesh.parent_macro.push_back(static_cast<int>(m));
  }

  build_facets(mesh);
  build_geometry(mesh);

  // Macro facets with their midpoint nodes and macro adjacency.
  std::map<std::pair<int, int>, int> macro_facet_of_edge;
  for (size_t m = 0; m < macro.elements.size(); ++m) {
    const auto& e = macro.elements[m];
    for (int j = 0; j < 3; ++j) {
      const auto key = edge_key(e[(j + 1) % 3], e[(j + 2) % 3]);
      auto it = macro_facet_of_edge.find(key);
      if (it == macro_facet_of_edge.end()) {
        MacroFacet f;
        f.macro_nodes = {key.first, key.second};
        f.midpoint_node = midpoint_of_edge.at(key);
        f.macros = {static_cast<int>(m), -1};
        const Eigen::Vector2d t =
            macro.nodes[key.second] - macro.nodes[key.first];
        f.length = t.norm();
        f.normal = rot_cw(t) / f.length;
        macro_facet_of_edge.emplace(key,
                                    static_cast<int>(mesh.macro_facets.size()));
        mesh.macro_facets.push_back(f);
      } else {
        mesh.macro_facets[it->second].macros[1] = static_cast<int>(m);
      }
    }
  }
  for (MacroFacet& f : mesh.macro_facets) f.boundary = (f.macros[1] == -1);

  return mesh;
}

FacetSet classify_facets(const FineMesh& mesh) {
  FacetSet set;
  set.interior_of_macro.resize(mesh.n_macros());

  // Re-derive adjacency counts from scratch as a conformity check.
  std::map<std::pair<int, int>, int> count;
  for (const auto& e : mesh.elements)
    for (int j = 0; j < 3; ++j) {
      const auto key = edge_key(e[(j + 1) % 3], e[(j + 2) % 3]);
      if (++count[key] > 2) fail("classify_facets: non-conforming mesh");
    }
  if (count.size() != mesh.facets.size())
    fail("classify_facets: facet table inconsistent with element topology");

  for (int i = 0; i < mesh.n_facets(); ++i) {
    const Facet& f = mesh.facets[i];
    const int expected = (f.elems[1] == -1) ? 1 : 2;
    if (count.at(edge_key(f.nodes[0], f.nodes[1])) != expected)
      fail("classify_facets: stored adjacency disagrees with topology");
    switch (f.cls) {
      case FacetClass::Boundary:
        set.boundary.push_back(i);
        break;
      case FacetClass::MacroInterior:
        set.interior_of_macro[f.macro].push_back(i);
        break;
      case FacetClass::MacroInterface:
        set.interface.push_back(i);
        break;
    }
  }

  // One red refinement leaves exactly the inner-child edges inside each
  // macro cell.
  for (size_t m = 0; m < set.interior_of_macro.size(); ++m)
    if (set.interior_of_macro[m].size() != 3)
      fail("classify_facets: macro cell " + std::to_string(m) +
           " has " + std::to_string(set.interior_of_macro[m].size()) +
           " interior facets, expected 3 (mesh is not a red refinement)");

  return set;
}

}  // namespace plfem

// ============================================================================
// mesh.hpp
//
// Two-level triangulations of a planar polygon.  The discretisation lives on
// a fine mesh obtained from a coarse (macro) mesh by exactly one red
// refinement: every macro triangle is split into four congruent children
// through its edge midpoints.  That construction guarantees the two
// structural properties the stabilisation relies on:
//
//   * every macro cell M contains exactly three fine facets interior to M
//     (the edges of the inner child), collected in F_I(M);
//   * every macro facet carries a fine node at its midpoint.
//
// Facet normals follow a deterministic orientation rule: the normal of the
// facet {a,b} with a < b is the clockwise rotation of x_b - x_a, and the
// adjacent element the normal points out of is stored first.  Boundary
// facets are forced outward.
// ============================================================================

#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace plfem {

// --------------------------------------------------------------------------
// Macro level
// --------------------------------------------------------------------------

struct MacroMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> elements;  // CCW vertex triples
  std::vector<bool> boundary_node;           // derived from edge topology

  // Validates indices, orientation (positive signed area) and conformity
  // (no edge with more than two incident elements), then fills the
  // boundary flags.  Called by every constructor path.
  void finalise();
};

// Structured macro triangulation of the unit square: n x n cells, each cut
// into two CCW triangles along the (lower-left, upper-right) diagonal.
MacroMesh unit_square_macro(int n);

// Plain ASCII mesh format:
//   nodes <count>        followed by one "x y" line per node
//   elements <count>     followed by one "i j k" line per element
// Writer and reader are inverse to each other bit for bit.
MacroMesh read_mesh(const std::string& path);
void write_mesh(const MacroMesh& mesh, const std::string& path);

// --------------------------------------------------------------------------
// Fine level
// --------------------------------------------------------------------------

enum class FacetClass {
  Boundary,        // on the domain boundary
  MacroInterior,   // interior to a single macro cell (member of F_I(M))
  MacroInterface,  // interior to the domain, on a macro-cell boundary
};

struct Facet {
  std::array<int, 2> nodes{};   // fine node ids, nodes[0] < nodes[1]
  std::array<int, 2> elems{};   // elems[0] = element the normal exits,
                                // elems[1] = other side or -1 on boundary
  Eigen::Vector2d normal;       // unit
  double length = 0.0;
  FacetClass cls = FacetClass::Boundary;
  int macro = -1;               // owning macro cell for MacroInterior
};

// A facet of the macro mesh together with the refinement data the Fortin
// corrector needs: its midpoint node and its two fine sub-facets.
struct MacroFacet {
  std::array<int, 2> macro_nodes{};  // macro ids (= fine ids, a < b)
  int midpoint_node = -1;            // fine node at the facet midpoint
  std::array<int, 2> macros{};       // adjacent macro cells, [1] = -1 on bdry
  Eigen::Vector2d normal;            // unit, same orientation rule as Facet
  double length = 0.0;
  bool boundary = false;
};

struct FineMesh {
  MacroMesh macro;

  std::vector<Eigen::Vector2d> nodes;        // macro nodes first, then midpoints
  std::vector<std::array<int, 3>> elements;  // CCW
  std::vector<int> parent_macro;             // per fine element
  std::vector<bool> boundary_node;

  std::vector<Facet> facets;
  std::vector<std::array<int, 3>> element_facets;  // facet opposite vertex j
  std::vector<MacroFacet> macro_facets;

  std::vector<double> area;        // per fine element
  std::vector<double> macro_area;  // per macro element
  // Per-element gradients of the three nodal hat functions (constant).
  std::vector<std::array<Eigen::Vector2d, 3>> grad_hat;

  double h = 0.0;  // max fine edge length
  double H = 0.0;  // max macro edge length

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_facets() const { return static_cast<int>(facets.size()); }
  int n_macros() const { return static_cast<int>(macro.elements.size()); }

  Eigen::Vector2d centroid(int k) const {
    const auto& e = elements[k];
    return (nodes[e[0]] + nodes[e[1]] + nodes[e[2]]) / 3.0;
  }
};

// One red refinement of the macro mesh; builds the complete facet topology.
FineMesh red_refine(const MacroMesh& macro);

// Labelled facet index sets.  classify_facets re-derives the labels from the
// element topology and cross-checks them against the stored ones, so it
// doubles as a conformity check on externally supplied meshes.
struct FacetSet {
  std::vector<std::vector<int>> interior_of_macro;  // F_I(M) per macro cell
  std::vector<int> boundary;
  std::vector<int> interface;
};

FacetSet classify_facets(const FineMesh& mesh);

}  // namespace plfem

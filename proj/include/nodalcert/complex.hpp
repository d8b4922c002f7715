#ifndef NODALCERT_COMPLEX_HPP
#define NODALCERT_COMPLEX_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nodalcert {

/// Ordered vertex list; the order carries the orientation.
using Simplex = std::vector<int>;

/// Vertex labels used by the nodal meshes.
enum class VertexLabel : std::uint8_t { none, upper, lower, branch, gamma };
const char* to_string(VertexLabel l);

/// Geometric simplicial complex given by its maximal simplices.
struct SimplicialMesh {
    int ambient_dim = 0;
    int dim = 0; // dimension of the maximal simplices
    std::vector<double> coords;
    std::vector<Simplex> simplices;
    std::vector<VertexLabel> labels; // empty or one per vertex

    std::size_t vertex_count() const;
    std::span<const double> vertex(std::size_t i) const;
    std::span<double> vertex(std::size_t i);
    int add_vertex(std::span<const double> x, VertexLabel label = VertexLabel::none);
};

/// All faces of the given simplices, sorted and deduplicated per dimension:
/// result[k] lists the k-simplices with sorted vertex ids.
std::vector<std::vector<Simplex>> face_closure(const std::vector<Simplex>& simplices);

std::int64_t euler_characteristic(const std::vector<std::vector<Simplex>>& closure);

/// Sign of the permutation sorting s.
int permutation_sign(const Simplex& s);

/// True when every codimension-1 face of the (pure) mesh lies in exactly two
/// maximal simplices.
bool is_closed_pseudomanifold(const SimplicialMesh& mesh);

/// Reorders vertices of the maximal simplices so that neighbours induce
/// opposite orientations on shared faces.  Orientation is propagated from the
/// lowest-index simplex of each connected component.  Throws StructuralError
/// for branching faces or non-orientable components.
void orient_consistently(SimplicialMesh& mesh);

/// Reverses the orientation of every maximal simplex.
void flip_orientation(SimplicialMesh& mesh);

/// Sum over maximal simplices of det[v0 - p, v1 - v0, ..., vd - v0] for a
/// codimension-1 mesh (ambient_dim = dim + 1).  For a closed oriented
/// hypersurface this is (dim+1)! times the signed volume it encloses.
double signed_volume_about(const SimplicialMesh& mesh, std::span<const double> p);

/// Barycentric subdivision; each new simplex inherits the orientation of its
/// parent.  Vertices of the result: the original ones first, then one barycenter
/// per face of dimension >= 1.
SimplicialMesh barycentric_subdivision(const SimplicialMesh& mesh);

/// Boundary of the cross-polytope in R^d (a (d-1)-sphere with 2d vertices ±e_i),
/// barycentrically subdivided `levels` times and projected onto the unit sphere.
/// For d = 1 the two points {+1, -1}; for d = 2 use regular_polygon instead.
SimplicialMesh sphere_complex(int d, int levels);

/// Regular n-gon on the unit circle, counterclockwise.
SimplicialMesh regular_polygon(int n);

/// Determinant of a small dense matrix (row major, size k x k).
double small_det(std::vector<double> a, int k);

} // namespace nodalcert

#endif

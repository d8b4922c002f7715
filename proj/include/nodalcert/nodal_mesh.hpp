#ifndef NODALCERT_NODAL_MESH_HPP
#define NODALCERT_NODAL_MESH_HPP

#include "nodalcert/complex.hpp"
#include "nodalcert/field.hpp"
#include "nodalcert/holes.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nodalcert {

/// Rescaled window [-xi_radius, xi_radius]^ell x [z_min, z_max] and its grid.
/// n_xi = 0 or n_z = 0 selects the defaults of default_window.
struct WindowSpec {
    double xi_radius = kDefaultXiRadius;
    double z_min = -kZWindow;
    double z_max = kZWindow;
    int n_xi = 0; // cells per xi axis, even so that xi = 0 is a grid plane
    int n_z = 0;  // cells along z
};

/// n_xi = 32 / 16 / 8 for ell = 1 / 2 / >= 3 and n_z = 72m / 36m.
WindowSpec default_window(const FamilyParams& params, double xi_radius = kDefaultXiRadius);

/// The same window with both resolutions doubled.
WindowSpec refined(const WindowSpec& w);

/// Nodal set {u~ = 0} over the window as a two-sheeted graph
/// ups = +-sqrt(Phi~ / ell) over {Phi~ >= 0}, glued along the branch set.
/// Coordinates (xi_1 .. xi_ell, ups, z); dimension ell + 1.  Cells crossing
/// {Phi~ = 0} are clipped with root-found vertices on grid edges.  The upper
/// sheet carries the orientation of (xi, z)-space, the lower one the opposite.
/// Throws ResolutionError when n_z < 32m (fewer than 8 cells per half period)
/// and ParameterError for an invalid window.
SimplicialMesh mesh_nodal_set(const FamilyParams& params, const WindowSpec& window);

/// Independent isosurface of sign(u~) over the box window x [-ups_max, ups_max]
/// by marching Freudenthal simplices in (xi, ups, z); unoriented.  Used as a
/// cross-check of mesh_nodal_set.
SimplicialMesh mesh_sign_oracle(const FamilyParams& params, const WindowSpec& window);

struct NodalVertexReport {
    std::size_t vertex_count = 0;
    double max_residual = 0.0;        // max |u~(v)|
    double min_raw_gradient = 0.0;    // min |grad u| at the raw points
    double min_scaled_gradient = 0.0; // min |grad u| / sqrt(eta)
    double max_branch_upsilon = 0.0;  // max |ups| over branch vertices
};

NodalVertexReport check_nodal_vertices(const FamilyParams& params, const SimplicialMesh& mesh);

/// Number of codimension-1 faces off the window boundary that do not lie in
/// exactly two maximal simplices.
std::int64_t interior_face_defects(const SimplicialMesh& mesh, const WindowSpec& window);

/// Gamma_j: the boundary of hole j placed at ups = 0 in (xi, ups, z)-space.
std::vector<SimplicialMesh> extract_gamma_cycles(const FamilyParams& params,
                                                 const std::vector<HoleDescriptor>& holes);

struct GammaReport {
    bool closed = false;          // every (ell-1)-face has even multiplicity
    double max_residual = 0.0;    // max |u~| on vertices
    double max_raw_radius2 = 0.0; // max |X|^2 + y^2 + z^2 in raw coordinates
    bool contained = false;       // max_raw_radius2 <= sigma^2 + 1/16 < 1/4
};

GammaReport check_gamma_cycle(const FamilyParams& params, const SimplicialMesh& gamma);

/// Smallest depth -Phi~(p_j) over the hole witnesses (rescaled units).
double min_witness_depth(const FamilyParams& params, const std::vector<HoleDescriptor>& holes);

struct RegularizedLevelSet {
    double a_m = 0.0;
    double eps = 0.0;
    double theta = 0.0;
    SimplicialMesh sigma; // the two normal graphs over the nodal mesh, plus side first
    std::vector<SimplicialMesh> cycles_plus;  // Gamma_j pushed to u~ > 0
    std::vector<SimplicialMesh> cycles_minus; // Gamma_j pushed to u~ < 0
    double max_residual = 0.0;         // max |u~^2 + eps^2 |V|^2 - theta^2| over all vertices
    double max_abs_u = 0.0;            // max |u~| over all vertices
    double min_witness_distance = 0.0; // min distance of projected vertices to the witnesses
};

/// Level set u~^2 + eps^2 |V|^2 = theta^2 in rescaled units (u = eta u~,
/// V = (X, y, z) raw) as two graphs over `nodal`: each vertex follows the
/// flow of grad u~ / |grad u~|^2 (metric of (xi, ups, lambda z)) to
/// u~ = +-theta, then Newton steps land it on the level set.  Requires 0 < theta < a_m / 2
/// and 0 < eps <= theta / 100 (ParameterError otherwise).
RegularizedLevelSet mesh_regularized_level_set(const FamilyParams& params, double eps, double theta,
                                               const SimplicialMesh& nodal,
                                               const std::vector<HoleDescriptor>& holes);

/// Wavefront OBJ ("v x y z", "f i j k", 1-indexed).  Requires dim 2 in 3
/// ambient dimensions (FormatError otherwise); an empty mesh writes nothing.
void write_obj(std::ostream& os, const SimplicialMesh& mesh);

/// Line-based text format:
///   simplicial_text 1
///   ambient A
///   vertices N
///   N lines "x_1 .. x_A label"
///   dim k C
///   C lines of k+1 space-separated 0-indexed vertex ids
/// Simplices are written sorted by their sorted vertex ids; the vertex order
/// inside each simplex (its orientation) is kept.
void write_simplicial_text(std::ostream& os, const SimplicialMesh& mesh);

/// Inverse of write_simplicial_text; throws FormatError on malformed input.
SimplicialMesh read_simplicial_text(std::istream& is);

} // namespace nodalcert

#endif

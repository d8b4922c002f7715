#ifndef NODALCERT_HOMOLOGY_HPP
#define NODALCERT_HOMOLOGY_HPP

#include "nodalcert/complex.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nodalcert {

/// Boundary map from k-simplices to (k-1)-simplices over GF(2); column c
/// lists the sorted row indices of the faces of k-simplex c.
struct BoundaryMatrix {
    int k = 1;
    std::size_t rows = 0;
    std::vector<std::vector<int>> columns;
};

/// Boundary matrices for k = 1 .. top of a closed complex given per
/// dimension (as returned by face_closure).  Throws StructuralError when a
/// face of some simplex is missing.
std::vector<BoundaryMatrix> boundary_matrices(const std::vector<std::vector<Simplex>>& complex);

/// Rank over GF(2) by left-to-right column reduction pivoting on the lowest
/// nonzero entry of each column (its largest row index).
std::int64_t gf2_rank(const BoundaryMatrix& m);

/// True when every composite boundary(k-1) * boundary(k) vanishes.
bool boundary_squared_is_zero(const std::vector<BoundaryMatrix>& mats);

using BettiVector = std::vector<std::int64_t>;

/// Betti numbers over GF(2).  The per-dimension overload checks face
/// closure; the mesh overload closes the maximal simplices first.
BettiVector betti_numbers(const std::vector<std::vector<Simplex>>& complex);
BettiVector betti_numbers(const SimplicialMesh& mesh);

struct DegreeOptions {
    std::uint64_t seed = 0x5eedULL;
    int max_attempts = 10;
};

/// Degree about `point` of an oriented closed dim-cycle in R^(dim+1), by
/// signed crossings of a seeded random ray.  Orientation convention: a
/// counterclockwise circle has degree +1 about interior points.  Throws
/// GeometricError when the point lies on the cycle and NumericalError after
/// max_attempts degenerate rays.
int degree(const SimplicialMesh& cycle, std::span<const double> point, const DegreeOptions& opt = {});

/// Copy of the mesh with one ambient coordinate removed.
SimplicialMesh drop_coordinate(const SimplicialMesh& mesh, int coord);

struct IndependenceMatrix {
    std::vector<std::vector<int>> entries; // entries[i][j] = degree(cycle i, witness j)
    int rank = 0;                          // over the rationals
    bool is_identity() const;
};

IndependenceMatrix independence_matrix(const std::vector<SimplicialMesh>& cycles,
                                       const std::vector<std::vector<double>>& witnesses,
                                       const DegreeOptions& opt = {});

/// Exact rank of an integer matrix (fraction-free elimination).
int integer_rank(const std::vector<std::vector<int>>& m);

} // namespace nodalcert

#endif

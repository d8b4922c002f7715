#ifndef NODALCERT_HOLES_HPP
#define NODALCERT_HOLES_HPP

#include "nodalcert/complex.hpp"
#include "nodalcert/field.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nodalcert {

/// The open interval ((pi/2 + 2 pi j)/lambda, (3 pi/2 + 2 pi j)/lambda) on which
/// cos(lambda z) < 0.
struct NegativeInterval {
    int j = 0;
    double z_minus = 0.0;
    double z_plus = 0.0;
    double z_center = 0.0; // cos(lambda z) = -1
};

/// j = -m .. m-1, sorted by z.
std::vector<NegativeInterval> negative_intervals(const FamilyParams& params);

/// Unique minimizer of xi -> Phi~(xi, z) (rescaled units).  Only the first
/// component is nonzero.  Requires |z| <= 1/4.
std::vector<double> slice_minimizer(const FamilyParams& params, double z);

/// rho > 0 with Phi~(c(z) + rho*omega, z) = 0 for a unit vector omega.
/// Throws NoRootError when Phi~(c(z), z) >= 0.
double radial_root(const FamilyParams& params, double z, std::span<const double> omega);

struct HoleResolution {
    int n_z = 32;     // z-cells; rings at Chebyshev points z_c - h cos(pi k / n_z)
    int n_omega = 16; // directions (ell = 2: polygon size; ell >= 3: minimum count)
};

struct HoleDescriptor {
    NegativeInterval interval;
    std::vector<double> center_z;
    std::vector<std::vector<double>> center_curve; // c(z) at center_z
    /// Oriented ell-sphere in (xi, z) space, ambient dimension ell + 1.
    SimplicialMesh boundary;
    std::vector<double> witness; // (xi, z), rescaled
    double depth = 0.0;          // -Phi~(witness)
    double max_residual = 0.0;   // max |Phi~| over boundary vertices
    double rho_lipschitz = 0.0;  // max |d rho| / step over adjacent samples
    std::int64_t euler_characteristic = 0;
};

HoleDescriptor build_hole(const FamilyParams& params, int j, const HoleResolution& res = {});
std::vector<HoleDescriptor> build_holes(const FamilyParams& params, const HoleResolution& res = {});

struct LayoutReport {
    bool count_ok = false;
    bool disjoint_ok = false;
    bool horizontal_ok = false; // Phi > 0 on z = +-1/4
    bool vertical_ok = false;   // Phi >= floor > 0 on |X| = sigma
    bool scan_ok = false;       // Phi >= 0 off the holes
    double horizontal_min = 0.0;
    double vertical_min = 0.0;
    double vertical_floor = 0.0;
    std::int64_t scan_points = 0;
    std::vector<std::string> violations;

    bool ok() const
    {
        return count_ok && disjoint_ok && horizontal_ok && vertical_ok && scan_ok;
    }
};

LayoutReport verify_hole_layout(const FamilyParams& params, const std::vector<HoleDescriptor>& holes);

/// ell = 1 hole boundaries as closed polylines: header j,vertex_order,xi_1,z
/// and the first vertex repeated at the end of each curve.
void write_hole_curves_csv(std::ostream& os, const std::vector<HoleDescriptor>& holes);

} // namespace nodalcert

#endif

#ifndef NODALCERT_REGULARITY_HPP
#define NODALCERT_REGULARITY_HPP

#include "nodalcert/field.hpp"
#include "nodalcert/interval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nodalcert {

/// At a singular zero with cos(lambda z) = -1 the equations
/// x1^2 = eta e^(lambda x1) and 2 x1 = eta lambda e^(lambda x1) force
/// x1 = 2/lambda and then 4/lambda^2 = eta e^2.  Both sides are compared in
/// log space.
struct CriticalSystemReport {
    double x1_star = 0.0;
    double lhs = 0.0;      // 4 / lambda^2
    double rhs_log = 0.0;  // log(eta) + 2
    double log_margin = 0.0;
    bool consistent = false;
    /// On the cos = +1 branch u = x1^2 + eta e^(lambda x1) > 0, always.
    bool plus_branch_impossible = true;
};

CriticalSystemReport critical_system_check(const FamilyParams& params);

enum class CertStatus { proved, failed, budget_exhausted };
const char* to_string(CertStatus s);

using Box = std::vector<Interval>; // (x_1..x_ell, y, z)

struct Certificate {
    std::string region;
    std::string quantity = "inf(|u| + |grad u|) > 0";
    /// Lower bound for |u| + |grad u| over the region (valid when proved).
    double margin = 0.0;
    std::int64_t boxes_processed = 0;
    CertStatus status = CertStatus::failed;
    /// First box (in processing order) that could not be certified.
    Box failing_box;
};

inline constexpr std::int64_t kDefaultCertBudget = 4'000'000;

/// Interval enclosures of u and its (X, y, z) partial derivatives over a box.
struct BoxEnclosure {
    Interval value;
    std::vector<Interval> gradient;
};
BoxEnclosure enclose_u(const FamilyParams& params, const Box& box,
                       FieldKind kind = FieldKind::family);

/// Branch and bound over [-radius, radius]^(ell+2).  A box is discharged when
/// u or one partial derivative excludes 0 on it.  Boxes are split along the
/// widest side measured in the rescaled units (X, y)/sqrt(eta) and lambda z;
/// an undecided box narrower than 1e-14 in those units fails the proof.
/// Requires 0 < radius < 1.
Certificate certify_no_singular_zeros(const FamilyParams& params, double radius,
                                      std::int64_t budget = kDefaultCertBudget,
                                      FieldKind kind = FieldKind::family);

struct PerturbationBounds {
    double sup_value = 0.0;  // eta e^lambda = lambda^-4
    double sup_grad = 0.0;   // lambda eta e^lambda = lambda^-3
    double sup_dz = 0.0;     // same amplitude for the z-derivative alone
    double grid_sup_value = 0.0;
    double grid_sup_grad = 0.0;
    std::int64_t grid_points = 0;
};

/// Analytic suprema over the closed unit ball, cross-checked on a
/// (grid_side+1)^2 grid of the (x1, z) disk.
PerturbationBounds verify_perturbation_bounds(const FamilyParams& params, int grid_side = 1200);

} // namespace nodalcert

#endif

#ifndef NODALCERT_FREQUENCY_HPP
#define NODALCERT_FREQUENCY_HPP

#include "nodalcert/field.hpp"
#include "nodalcert/quadrature.hpp"

#include <functional>
#include <span>

namespace nodalcert {

/// A smooth scalar field on a ball in R^dim with its gradient.
struct ScalarField {
    int dim = 3;
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
};

struct FrequencyResult {
    double value = 0.0;
    double err_est = 0.0;
    IntegralResult dirichlet;   // integral of |grad u|^2 over B_r
    IntegralResult boundary_l2; // integral of u^2 over the sphere of radius r
};

/// Almgren frequency N_r(u) = r * int_{B_r} |grad u|^2 / int_{dB_r} u^2.
/// Throws NumericalError when the denominator's error estimate is comparable
/// to its value.
FrequencyResult frequency(const ScalarField& field, double r, const QuadratureSpec& spec);

/// Frequency of the family (or of the cone Q_ell).  For the family, the cone
/// part is integrated with nested rules; the oscillatory part, of size
/// <= lambda^-3, is integrated on the same nodes and its possible quadrature
/// error is bounded analytically and added to err_est.
FrequencyResult frequency(const FamilyParams& params, double r, const QuadratureSpec& spec,
                          FieldKind kind);

struct ConeIntegrals {
    double dirichlet = 0.0;   // 4 ell (ell+1) V_n r^(n+2) / (n+2)
    double boundary_l2 = 0.0; // 2 ell (ell+1) A_(n-1) r^(n+3) / (n (n+2))
};
ConeIntegrals closed_form_cone_integrals(const FamilyParams& params, double r);

} // namespace nodalcert

#endif

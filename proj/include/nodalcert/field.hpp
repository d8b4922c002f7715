#ifndef NODALCERT_FIELD_HPP
#define NODALCERT_FIELD_HPP

#include <span>
#include <vector>

namespace nodalcert {

inline constexpr double kSigma = 1.0 / 16.0;
inline constexpr double kZWindow = 0.25;
inline constexpr double kDefaultXiRadius = 4.0;

/// Parameters of the harmonic family
///
///     u(X, y, z, w) = |X|^2 - ell*y^2 + eta * exp(lambda*x1) * cos(lambda*z)
///
/// with lambda = 8*pi*m and eta = exp(-lambda) * lambda^-4.  eta is kept in
/// log space only: it underflows a double for m >= ~28.
struct FamilyParams {
    int n = 3;
    int ell = 1;
    int m = 1;
    double lambda = 0.0;
    double log_eta = 0.0;
    double sigma = kSigma;
    double z_min = -kZWindow;
    double z_max = kZWindow;

    int w_dim() const noexcept { return n - ell - 2; }

    /// sqrt(eta); returns 0 when it leaves the normal double range.
    double sqrt_eta() const noexcept;
    bool sqrt_eta_underflows() const noexcept;

    /// lambda * sqrt(eta) = exp(-lambda/2) / lambda: the x1-rate of the
    /// perturbation in rescaled coordinates.
    double kappa() const noexcept;
};

/// Throws ParameterError naming the violated inequality.
FamilyParams derive_params(int n, int ell, int m);

/// A point of R^n split as (X, y, z, w) with X in R^ell and w in R^(n-ell-2).
struct Point {
    std::vector<double> X;
    double y = 0.0;
    double z = 0.0;
    std::vector<double> w;

    double norm() const;
    /// Coordinates in the order (X, y, z, w).
    std::vector<double> flatten() const;
    static Point from_flat(const FamilyParams& params, std::span<const double> coords);
};

/// Field value and gradient in the coordinate order of Point::flatten().
struct EvalResult {
    double value = 0.0;
    std::vector<double> gradient;
};

enum class FieldKind { family, cone };

/// eta * exp(lambda*x1) * cos(lambda*z), evaluated as exp(lambda*x1 + log_eta).
double perturbation(const FamilyParams& params, double x1, double z);

/// u_{m,ell} and its gradient; DomainError when |p| > 1.
EvalResult eval_u(const FamilyParams& params, const Point& p);

/// The family or the unperturbed cone Q = |X|^2 - ell*y^2.
EvalResult eval_field(const FamilyParams& params, const Point& p, FieldKind kind);

struct PhiEval {
    double value = 0.0;
    std::vector<double> grad_X;
    double grad_z = 0.0;
    std::vector<double> hess_X; // ell x ell, row major
};

/// Projection function Phi(X, z) = |X|^2 + eta*exp(lambda*x1)*cos(lambda*z) on
/// R_ell = {|X| <= sigma} x [-1/4, 1/4]; DomainError outside.
double eval_phi(const FamilyParams& params, std::span<const double> X, double z);
PhiEval eval_phi_full(const FamilyParams& params, std::span<const double> X, double z);

/// Rescaled field u~(xi, ups, z) = u(sqrt(eta) xi, sqrt(eta) ups, z, 0) / eta
///                              = |xi|^2 - ell*ups^2 + exp(kappa*xi1)*cos(lambda*z).
/// Window: max_i |xi_i| <= xi_radius and |z| <= 1/4.
double eval_u_rescaled(const FamilyParams& params, std::span<const double> xi, double upsilon,
                       double z, double xi_radius = kDefaultXiRadius);

/// Rescaled field and its gradient in (xi, ups, z); no window check.
EvalResult eval_u_rescaled_full(const FamilyParams& params, std::span<const double> xi,
                                double upsilon, double z);

/// Phi~(xi, z) = Phi(sqrt(eta) xi, z) / eta with xi-gradient, z-derivative and
/// xi-Hessian; no window check.
PhiEval eval_phi_rescaled(const FamilyParams& params, std::span<const double> xi, double z);
double phi_rescaled(const FamilyParams& params, std::span<const double> xi, double z);

/// |grad u| at the raw point corresponding to rescaled (xi, ups, z), both in
/// units of sqrt(eta) (always representable) and raw (0 if sqrt(eta) underflows).
struct GradientNorm {
    double scaled = 0.0;
    double raw = 0.0;
};
GradientNorm raw_gradient_norm(const FamilyParams& params, std::span<const double> xi,
                               double upsilon, double z);

} // namespace nodalcert

#endif

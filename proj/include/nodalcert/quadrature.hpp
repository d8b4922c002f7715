#ifndef NODALCERT_QUADRATURE_HPP
#define NODALCERT_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nodalcert {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule for the weight (1 - t^2)^alpha on [-1, 1] (alpha = 0: Legendre),
/// computed by Golub-Welsch and symmetrized about 0.
GaussRule gauss_gegenbauer(int count, double alpha);
GaussRule gauss_legendre(int count);

/// Product rule on the unit sphere S^(dim-1) in R^dim, exact for polynomials of
/// total degree <= degree.  Built recursively: x_dim = t with Gegenbauer weight
/// (1 - t^2)^((dim-3)/2) over an equispaced circle rule.
struct SphereRule {
    int dim = 0;
    std::vector<double> nodes; // dim coordinates per node
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    std::span<const double> node(std::size_t i) const
    {
        return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};
SphereRule sphere_rule(int dim, int degree);

/// |S^(dim-1)| and |B^dim| for the unit sphere and ball in R^dim.
double sphere_area(int dim);
double ball_volume(int dim);

struct QuadratureSpec {
    int radial_nodes = 8;
    int angular_degree = 8;
    double target_rel_tol = 1e-10;
    int max_refinements = 3;
};

struct IntegralResult {
    double value = 0.0;
    double err_est = 0.0; // absolute
    std::size_t nodes_used = 0;
    bool tolerance_met = false;
    /// Rule order that produced value (the finer of the last compared pair).
    QuadratureSpec final_spec;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Integral over the sphere of radius r in R^dim; the error estimate is the
/// difference between two rules of increasing order.  When the target is not
/// met after max_refinements, the result is returned with tolerance_met = false.
IntegralResult integrate_sphere(const Integrand& f, int dim, double r, const QuadratureSpec& spec);

/// Integral over the ball of radius r: radial Gauss-Legendre times sphere rule.
IntegralResult integrate_ball(const Integrand& f, int dim, double r, const QuadratureSpec& spec);

/// Single application of a fixed rule (no error estimate).
double apply_sphere_rule(const Integrand& f, int dim, double r, int angular_degree);
double apply_ball_rule(const Integrand& f, int dim, double r, int radial_nodes, int angular_degree);

} // namespace nodalcert

#endif

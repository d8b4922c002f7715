#include "nodalcert/frequency.hpp"

#include "nodalcert/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nodalcert {

namespace {

constexpr int kMaxDim = 6;

FrequencyResult quotient(double r, const IntegralResult& dirichlet, const IntegralResult& boundary)
{
    if (!(boundary.err_est < 0.5 * std::abs(boundary.value))) {
        throw NumericalError("unreliable frequency quotient: boundary integral " +
                             std::to_string(boundary.value) + " with error estimate " +
                             std::to_string(boundary.err_est));
    }
    FrequencyResult out;
    out.dirichlet = dirichlet;
    out.boundary_l2 = boundary;
    out.value = r * dirichlet.value / boundary.value;
    const double rel_d = dirichlet.value != 0.0 ? dirichlet.err_est / std::abs(dirichlet.value)
                                                : dirichlet.err_est;
    const double rel_b = boundary.err_est / std::abs(boundary.value);
    out.err_est = std::abs(out.value) * (rel_d + rel_b);
    return out;
}

double cone_value(const FamilyParams& p, std::span<const double> x)
{
    double s = 0.0;
    for (int i = 0; i < p.ell; ++i) {
        s += x[i] * x[i];
    }
    const double y = x[p.ell];
    return s - p.ell * y * y;
}

double cone_grad_sq(const FamilyParams& p, std::span<const double> x)
{
    double s = 0.0;
    for (int i = 0; i < p.ell; ++i) {
        s += x[i] * x[i];
    }
    const double y = x[p.ell];
    return 4.0 * s + 4.0 * p.ell * p.ell * y * y;
}

} // namespace

FrequencyResult frequency(const ScalarField& field, double r, const QuadratureSpec& spec)
{
    const auto d = static_cast<std::size_t>(field.dim);
    auto grad_sq = [&](std::span<const double> x) {
        double g[kMaxDim];
        field.gradient(x, std::span<double>(g, d));
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s += g[i] * g[i];
        }
        return s;
    };
    auto value_sq = [&](std::span<const double> x) {
        const double v = field.value(x);
        return v * v;
    };
    return quotient(r, integrate_ball(grad_sq, field.dim, r, spec),
                    integrate_sphere(value_sq, field.dim, r, spec));
}

FrequencyResult frequency(const FamilyParams& params, double r, const QuadratureSpec& spec,
                          FieldKind kind)
{
    const int n = params.n;
    IntegralResult dirichlet = integrate_ball(
        [&](std::span<const double> x) { return cone_grad_sq(params, x); }, n, r, spec);
    IntegralResult boundary = integrate_sphere(
        [&](std::span<const double> x) {
            const double q = cone_value(params, x);
            return q * q;
        },
        n, r, spec);
    if (kind == FieldKind::cone) {
        return quotient(r, dirichlet, boundary);
    }

    const double lam = params.lambda;
    const double ell = params.ell;
    const int z_slot = params.ell + 1;
    // |P| <= a0 * E and |grad P| = lam * a0 * E with E = exp(lam (x1 - 1))
    const double a0 = std::exp(params.log_eta + lam);
    auto envelope = [&](std::span<const double> x) { return std::exp(lam * (x[0] - 1.0)); };

    auto pert_dirichlet = [&](std::span<const double> x) {
        const double e = std::exp(lam * x[0] + params.log_eta);
        const double c = std::cos(lam * x[z_slot]);
        // 2 gradQ.gradP + |gradP|^2
        return 4.0 * lam * x[0] * e * c + lam * lam * e * e;
    };
    auto pert_boundary = [&](std::span<const double> x) {
        const double pv = std::exp(lam * x[0] + params.log_eta) * std::cos(lam * x[z_slot]);
        return 2.0 * cone_value(params, x) * pv + pv * pv;
    };
    const double c_dir = 4.0 * ell * r * lam * a0 + lam * lam * a0 * a0;
    const double c_bnd = 2.0 * ell * r * r * a0 + a0 * a0;
    const double env_r = std::exp(lam * (r - 1.0)) / lam;
    const double bound_dir = c_dir * ball_volume(n - 1) * std::pow(r, n - 1) * env_r;
    const double bound_bnd = c_bnd * sphere_area(n - 1) * std::pow(r, n - 2) * env_r;

    const QuadratureSpec& sd = dirichlet.final_spec;
    const QuadratureSpec& sb = boundary.final_spec;
    dirichlet.value += apply_ball_rule(pert_dirichlet, n, r, sd.radial_nodes, sd.angular_degree);
    dirichlet.err_est += bound_dir + c_dir * apply_ball_rule(envelope, n, r, sd.radial_nodes,
                                                             sd.angular_degree);
    boundary.value += apply_sphere_rule(pert_boundary, n, r, sb.angular_degree);
    boundary.err_est += bound_bnd + c_bnd * apply_sphere_rule(envelope, n, r, sb.angular_degree);
    return quotient(r, dirichlet, boundary);
}

ConeIntegrals closed_form_cone_integrals(const FamilyParams& params, double r)
{
    const double n = params.n;
    const double ell = params.ell;
    ConeIntegrals c;
    c.dirichlet = 4.0 * ell * (ell + 1.0) * ball_volume(params.n) * std::pow(r, n + 2.0) / (n + 2.0);
    c.boundary_l2 = 2.0 * ell * (ell + 1.0) * sphere_area(params.n) * std::pow(r, n + 3.0) /
                    (n * (n + 2.0));
    return c;
}

} // namespace nodalcert

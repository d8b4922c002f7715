#include "nodalcert/field.hpp"

#include "nodalcert/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nodalcert {

namespace {

constexpr double kWindowSlack = 1e-12;

double sq_norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return s;
}

} // namespace

double FamilyParams::sqrt_eta() const noexcept
{
    if (sqrt_eta_underflows()) {
        return 0.0;
    }
    return std::exp(0.5 * log_eta);
}

bool FamilyParams::sqrt_eta_underflows() const noexcept
{
    return 0.5 * log_eta < std::log(std::numeric_limits<double>::min());
}

double FamilyParams::kappa() const noexcept
{
    return std::exp(0.5 * log_eta + std::log(lambda));
}

FamilyParams derive_params(int n, int ell, int m)
{
    if (n < 3) {
        throw ParameterError("n >= 3 violated (n = " + std::to_string(n) + ")");
    }
    if (ell < 1) {
        throw ParameterError("1 <= ell violated (ell = " + std::to_string(ell) + ")");
    }
    if (ell > n - 2) {
        throw ParameterError("ell <= n - 2 violated (n = " + std::to_string(n) +
                             ", ell = " + std::to_string(ell) + ")");
    }
    if (m < 1) {
        throw ParameterError("m >= 1 violated (m = " + std::to_string(m) + ")");
    }
    FamilyParams p;
    p.n = n;
    p.ell = ell;
    p.m = m;
    p.lambda = 8.0 * std::numbers::pi * m;
    p.log_eta = -p.lambda - 4.0 * std::log(p.lambda);
    return p;
}

double Point::norm() const
{
    return std::sqrt(sq_norm(X) + y * y + z * z + sq_norm(w));
}

std::vector<double> Point::flatten() const
{
    std::vector<double> out(X);
    out.push_back(y);
    out.push_back(z);
    out.insert(out.end(), w.begin(), w.end());
    return out;
}

Point Point::from_flat(const FamilyParams& params, std::span<const double> coords)
{
    if (coords.size() != static_cast<std::size_t>(params.n)) {
        throw ParameterError("point has " + std::to_string(coords.size()) +
                             " coordinates, expected n = " + std::to_string(params.n));
    }
    const auto ell = static_cast<std::size_t>(params.ell);
    Point p;
    p.X.assign(coords.begin(), coords.begin() + ell);
    p.y = coords[ell];
    p.z = coords[ell + 1];
    p.w.assign(coords.begin() + ell + 2, coords.end());
    return p;
}

double perturbation(const FamilyParams& params, double x1, double z)
{
    return std::exp(params.lambda * x1 + params.log_eta) * std::cos(params.lambda * z);
}

EvalResult eval_field(const FamilyParams& params, const Point& p, FieldKind kind)
{
    if (p.X.size() != static_cast<std::size_t>(params.ell) ||
        p.w.size() != static_cast<std::size_t>(params.w_dim())) {
        throw ParameterError("point block sizes do not match (n, ell)");
    }
    if (p.norm() > 1.0 + kWindowSlack) {
        throw DomainError("point outside the closed unit ball (|p| = " +
                          std::to_string(p.norm()) + ")");
    }
    const auto ell = static_cast<std::size_t>(params.ell);
    EvalResult r;
    r.gradient.assign(static_cast<std::size_t>(params.n), 0.0);
    r.value = sq_norm(p.X) - params.ell * p.y * p.y;
    for (std::size_t i = 0; i < ell; ++i) {
        r.gradient[i] = 2.0 * p.X[i];
    }
    r.gradient[ell] = -2.0 * params.ell * p.y;
    if (kind == FieldKind::family) {
        const double amp = std::exp(params.lambda * p.X[0] + params.log_eta);
        const double c = std::cos(params.lambda * p.z);
        const double s = std::sin(params.lambda * p.z);
        r.value += amp * c;
        r.gradient[0] += params.lambda * amp * c;
        r.gradient[ell + 1] = -params.lambda * amp * s;
    }
    return r;
}

EvalResult eval_u(const FamilyParams& params, const Point& p)
{
    return eval_field(params, p, FieldKind::family);
}

PhiEval eval_phi_full(const FamilyParams& params, std::span<const double> X, double z)
{
    if (X.size() != static_cast<std::size_t>(params.ell)) {
        throw ParameterError("X must have ell components");
    }
    if (std::sqrt(sq_norm(X)) > params.sigma * (1.0 + kWindowSlack) ||
        std::abs(z) > kZWindow * (1.0 + kWindowSlack)) {
        throw DomainError("(X, z) outside R_ell = {|X| <= 1/16} x [-1/4, 1/4]");
    }
    const auto ell = X.size();
    const double amp = std::exp(params.lambda * X[0] + params.log_eta);
    const double c = std::cos(params.lambda * z);
    const double s = std::sin(params.lambda * z);
    PhiEval r;
    r.value = sq_norm(X) + amp * c;
    r.grad_X.resize(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        r.grad_X[i] = 2.0 * X[i];
    }
    r.grad_X[0] += params.lambda * amp * c;
    r.grad_z = -params.lambda * amp * s;
    r.hess_X.assign(ell * ell, 0.0);
    for (std::size_t i = 0; i < ell; ++i) {
        r.hess_X[i * ell + i] = 2.0;
    }
    r.hess_X[0] += params.lambda * params.lambda * amp * c;
    return r;
}

double eval_phi(const FamilyParams& params, std::span<const double> X, double z)
{
    return eval_phi_full(params, X, z).value;
}

PhiEval eval_phi_rescaled(const FamilyParams& params, std::span<const double> xi, double z)
{
    const auto ell = xi.size();
    const double kappa = params.kappa();
    const double e = 1.0 + std::expm1(kappa * xi[0]);
    const double c = std::cos(params.lambda * z);
    const double s = std::sin(params.lambda * z);
    PhiEval r;
    r.value = sq_norm(xi) + e * c;
    r.grad_X.resize(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        r.grad_X[i] = 2.0 * xi[i];
    }
    r.grad_X[0] += kappa * e * c;
    r.grad_z = -params.lambda * e * s;
    r.hess_X.assign(ell * ell, 0.0);
    for (std::size_t i = 0; i < ell; ++i) {
        r.hess_X[i * ell + i] = 2.0;
    }
    r.hess_X[0] += kappa * kappa * e * c;
    return r;
}

double phi_rescaled(const FamilyParams& params, std::span<const double> xi, double z)
{
    const double e = 1.0 + std::expm1(params.kappa() * xi[0]);
    return sq_norm(xi) + e * std::cos(params.lambda * z);
}

double eval_u_rescaled(const FamilyParams& params, std::span<const double> xi, double upsilon,
                       double z, double xi_radius)
{
    if (xi.size() != static_cast<std::size_t>(params.ell)) {
        throw ParameterError("xi must have ell components");
    }
    for (double v : xi) {
        if (std::abs(v) > xi_radius * (1.0 + kWindowSlack)) {
            throw DomainError("xi outside the rescaled window");
        }
    }
    if (std::abs(z) > kZWindow * (1.0 + kWindowSlack)) {
        throw DomainError("z outside [-1/4, 1/4]");
    }
    return phi_rescaled(params, xi, z) - params.ell * upsilon * upsilon;
}

EvalResult eval_u_rescaled_full(const FamilyParams& params, std::span<const double> xi,
                                double upsilon, double z)
{
    const PhiEval phi = eval_phi_rescaled(params, xi, z);
    EvalResult r;
    r.value = phi.value - params.ell * upsilon * upsilon;
    r.gradient = phi.grad_X;
    r.gradient.push_back(-2.0 * params.ell * upsilon);
    r.gradient.push_back(phi.grad_z);
    return r;
}

GradientNorm raw_gradient_norm(const FamilyParams& params, std::span<const double> xi,
                               double upsilon, double z)
{
    // grad u / sqrt(eta) = (2 xi1 + kappa e cos, 2 xi', -2 ell ups, -kappa e sin)
    const double kappa = params.kappa();
    const double e = 1.0 + std::expm1(kappa * xi[0]);
    const double c = std::cos(params.lambda * z);
    const double s = std::sin(params.lambda * z);
    double sum = 0.0;
    const double g1 = 2.0 * xi[0] + kappa * e * c;
    sum += g1 * g1;
    for (std::size_t i = 1; i < xi.size(); ++i) {
        sum += 4.0 * xi[i] * xi[i];
    }
    const double gy = 2.0 * params.ell * upsilon;
    const double gz = kappa * e * s;
    sum += gy * gy + gz * gz;
    GradientNorm g;
    g.scaled = std::sqrt(sum);
    g.raw = g.scaled * params.sqrt_eta();
    return g;
}

} // namespace nodalcert

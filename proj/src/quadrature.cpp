#include "nodalcert/quadrature.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace nodalcert {

namespace {

constexpr int kMaxDim = 6;
constexpr std::size_t kChunk = 4096;

void check_common(int dim, double r, const QuadratureSpec& spec)
{
    if (dim < 3 || dim > kMaxDim) {
        throw ParameterError("quadrature dimension must satisfy 3 <= n <= 6 (n = " +
                             std::to_string(dim) + ")");
    }
    if (!(r > 0.0 && r <= 1.0)) {
        throw ParameterError("radius must satisfy 0 < r <= 1");
    }
    if (spec.radial_nodes < 4) {
        throw ParameterError("radial_nodes >= 4 violated");
    }
    if (spec.angular_degree < 2) {
        throw ParameterError("angular_degree >= 2 violated");
    }
}

const SphereRule& cached_sphere_rule(int dim, int degree)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<SphereRule>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[{dim, degree}];
    if (!slot) {
        slot = std::make_unique<SphereRule>(sphere_rule(dim, degree));
    }
    return *slot;
}

double weighted_sum(std::size_t count, const std::function<double(std::size_t)>& term)
{
    std::vector<double> terms(count);
    parallel_for(count, kChunk, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            terms[i] = term(i);
        }
    });
    return compensated_sum(terms);
}

QuadratureSpec refined(const QuadratureSpec& s)
{
    QuadratureSpec out = s;
    out.radial_nodes = s.radial_nodes + std::max(4, s.radial_nodes / 2);
    out.angular_degree = s.angular_degree + std::max(4, s.angular_degree / 2);
    return out;
}

template <typename Apply, typename Count>
IntegralResult integrate_nested(const QuadratureSpec& spec, Apply apply, Count count)
{
    IntegralResult res;
    QuadratureSpec coarse = spec;
    double coarse_value = apply(coarse);
    res.nodes_used = count(coarse);
    for (int level = 0;; ++level) {
        const QuadratureSpec fine = refined(coarse);
        const double fine_value = apply(fine);
        res.nodes_used += count(fine);
        res.value = fine_value;
        res.err_est = std::abs(fine_value - coarse_value);
        res.final_spec = fine;
        res.tolerance_met = res.err_est <= spec.target_rel_tol * std::abs(fine_value);
        if (res.tolerance_met || level >= spec.max_refinements) {
            return res;
        }
        coarse = fine;
        coarse_value = fine_value;
    }
}

} // namespace

GaussRule gauss_gegenbauer(int count, double alpha)
{
    if (count < 1) {
        throw ParameterError("Gauss rule needs at least one node");
    }
    if (alpha <= -1.0) {
        throw ParameterError("Gegenbauer weight exponent must exceed -1");
    }
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + 2.0 * alpha;
        sub[k - 1] = std::sqrt(kk * (kk + 2.0 * alpha) / ((s + 1.0) * (s - 1.0)));
    }
    const double mu0 = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 1.0) -
                                                              std::lgamma(alpha + 1.5));
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(count));
    rule.weights.resize(static_cast<std::size_t>(count));
    if (count == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    // eigenvalues come sorted ascending; enforce exact reflection symmetry
    const auto half = rule.nodes.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j = rule.nodes.size() - 1 - i;
        const double t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -t;
        rule.nodes[j] = t;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (rule.nodes.size() % 2 == 1) {
        rule.nodes[half] = 0.0;
    }
    return rule;
}

GaussRule gauss_legendre(int count)
{
    return gauss_gegenbauer(count, 0.0);
}

SphereRule sphere_rule(int dim, int degree)
{
    if (dim < 2) {
        throw ParameterError("sphere rule needs dim >= 2");
    }
    if (degree < 0) {
        throw ParameterError("sphere rule degree must be nonnegative");
    }
    SphereRule rule;
    rule.dim = dim;
    if (dim == 2) {
        // even count keeps the rule symmetric under x -> -x and y -> -y
        int count = degree + 1;
        count += count % 2;
        count = std::max(count, 4);
        for (int k = 0; k < count; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / count;
            rule.nodes.push_back(std::cos(phi));
            rule.nodes.push_back(std::sin(phi));
            rule.weights.push_back(2.0 * std::numbers::pi / count);
        }
        return rule;
    }
    const SphereRule inner = sphere_rule(dim - 1, degree);
    const GaussRule t_rule = gauss_gegenbauer((degree + 2) / 2, 0.5 * (dim - 3));
    const std::size_t inner_dim = static_cast<std::size_t>(dim - 1);
    for (std::size_t a = 0; a < t_rule.nodes.size(); ++a) {
        const double t = t_rule.nodes[a];
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (std::size_t b = 0; b < inner.size(); ++b) {
            const auto v = inner.node(b);
            for (std::size_t c = 0; c < inner_dim; ++c) {
                rule.nodes.push_back(s * v[c]);
            }
            rule.nodes.push_back(t);
            rule.weights.push_back(t_rule.weights[a] * inner.weights[b]);
        }
    }
    return rule;
}

double sphere_area(int dim)
{
    const double h = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double ball_volume(int dim)
{
    const double h = 0.5 * dim;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double apply_sphere_rule(const Integrand& f, int dim, double r, int angular_degree)
{
    const SphereRule& rule = cached_sphere_rule(dim, angular_degree);
    const double scale = std::pow(r, dim - 1);
    const auto d = static_cast<std::size_t>(dim);
    const double sum = weighted_sum(rule.size(), [&](std::size_t i) {
        double x[kMaxDim];
        const auto v = rule.node(i);
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = r * v[c];
        }
        return rule.weights[i] * f(std::span<const double>(x, d));
    });
    return scale * sum;
}

double apply_ball_rule(const Integrand& f, int dim, double r, int radial_nodes, int angular_degree)
{
    const SphereRule& rule = cached_sphere_rule(dim, angular_degree);
    const GaussRule radial = gauss_legendre(radial_nodes);
    const auto d = static_cast<std::size_t>(dim);
    const std::size_t n_ang = rule.size();
    const double sum = weighted_sum(radial.nodes.size() * n_ang, [&](std::size_t idx) {
        const std::size_t a = idx / n_ang;
        const std::size_t b = idx % n_ang;
        const double s = 0.5 * r * (1.0 + radial.nodes[a]);
        const double w = 0.5 * r * radial.weights[a] * std::pow(s, dim - 1) * rule.weights[b];
        double x[kMaxDim];
        const auto v = rule.node(b);
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = s * v[c];
        }
        return w * f(std::span<const double>(x, d));
    });
    return sum;
}

IntegralResult integrate_sphere(const Integrand& f, int dim, double r, const QuadratureSpec& spec)
{
    check_common(dim, r, spec);
    return integrate_nested(
        spec, [&](const QuadratureSpec& s) { return apply_sphere_rule(f, dim, r, s.angular_degree); },
        [&](const QuadratureSpec& s) { return cached_sphere_rule(dim, s.angular_degree).size(); });
}

IntegralResult integrate_ball(const Integrand& f, int dim, double r, const QuadratureSpec& spec)
{
    check_common(dim, r, spec);
    return integrate_nested(
        spec,
        [&](const QuadratureSpec& s) {
            return apply_ball_rule(f, dim, r, s.radial_nodes, s.angular_degree);
        },
        [&](const QuadratureSpec& s) {
            return cached_sphere_rule(dim, s.angular_degree).size() *
                   static_cast<std::size_t>(s.radial_nodes);
        });
}

} // namespace nodalcert

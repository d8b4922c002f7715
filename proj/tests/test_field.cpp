#include "doctest.h"

#include "nodalcert/errors.hpp"
#include "nodalcert/field.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace nodalcert;

namespace {

Point random_point(const FamilyParams& p, std::mt19937_64& rng, double radius)
{
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    std::vector<double> v(static_cast<std::size_t>(p.n));
    double norm = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    const double scale = radius * std::pow(unif(rng), 1.0 / p.n) / std::sqrt(norm);
    for (auto& x : v) {
        x *= scale;
    }
    return Point::from_flat(p, v);
}

double eval_flat(const FamilyParams& p, const std::vector<double>& x)
{
    return eval_u(p, Point::from_flat(p, x)).value;
}

} // namespace

TEST_CASE("derive_params substitutes lambda = 8 pi m and log-space eta")
{
    const auto p = derive_params(3, 1, 1);
    CHECK(p.lambda == doctest::Approx(25.132741228718345).epsilon(1e-15));
    CHECK(std::exp(p.log_eta) == doctest::Approx(3.0603e-17).epsilon(1e-3));
    CHECK(p.sigma == 1.0 / 16.0);
    CHECK(p.z_min == -0.25);
    CHECK(p.z_max == 0.25);
    CHECK(p.w_dim() == 0);

    const auto p4 = derive_params(3, 1, 4);
    CHECK(p4.lambda == doctest::Approx(32.0 * std::numbers::pi).epsilon(1e-15));
    CHECK(p4.lambda == doctest::Approx(100.531).epsilon(1e-5));

    CHECK(derive_params(6, 2, 3).w_dim() == 2);
}

TEST_CASE("derive_params rejects constraint violations")
{
    CHECK_THROWS_AS(derive_params(3, 2, 5), ParameterError);
    CHECK_THROWS_WITH_AS(derive_params(3, 2, 5), doctest::Contains("ell <= n - 2"), ParameterError);
    CHECK_THROWS_AS(derive_params(2, 1, 1), ParameterError);
    CHECK_THROWS_AS(derive_params(4, 0, 1), ParameterError);
    CHECK_THROWS_AS(derive_params(4, 1, 0), ParameterError);
}

TEST_CASE("sqrt(eta) underflow is flagged instead of materialized")
{
    CHECK_FALSE(derive_params(3, 1, 8).sqrt_eta_underflows());
    // exp(log_eta) itself underflows from m ~ 28 on; sqrt(eta) from m ~ 56
    CHECK(std::exp(derive_params(3, 1, 30).log_eta) == 0.0);
    const auto big = derive_params(3, 1, 64);
    CHECK(big.sqrt_eta_underflows());
    CHECK(big.sqrt_eta() == 0.0);
    CHECK(std::isfinite(big.kappa()));
    CHECK(derive_params(3, 1, 30).kappa() > 0.0);
}

TEST_CASE("eval_u on the documented points")
{
    for (int m : {1, 2, 5}) {
        const auto p = derive_params(4, 1, m);
        const double eta = std::exp(p.log_eta);
        Point origin{{0.0}, 0.0, 0.0, {0.0}};
        const auto r0 = eval_u(p, origin);
        CHECK(r0.value == doctest::Approx(eta).epsilon(1e-14));
        REQUIRE(r0.gradient.size() == 4);
        CHECK(r0.gradient[0] == doctest::Approx(eta * p.lambda).epsilon(1e-14));
        CHECK(r0.gradient[1] == 0.0);
        CHECK(r0.gradient[2] == 0.0);
        CHECK(r0.gradient[3] == 0.0);

        const double t = 0.3;
        Point on_y{{0.0}, t, 0.0, {0.0}};
        CHECK(eval_u(p, on_y).value == doctest::Approx(-p.ell * t * t + eta).epsilon(1e-15));

        Point half_period{{0.0}, 0.0, std::numbers::pi / p.lambda, {0.0}};
        CHECK(eval_u(p, half_period).value == doctest::Approx(-eta).epsilon(1e-12));
    }
}

TEST_CASE("eval_u rejects points outside the unit ball")
{
    const auto p = derive_params(3, 1, 1);
    CHECK_THROWS_AS(eval_u(p, Point{{0.8}, 0.8, 0.0, {}}), DomainError);
    CHECK_NOTHROW(eval_u(p, Point{{1.0}, 0.0, 0.0, {}}));
}

TEST_CASE("gradient w-slots are exactly zero and u ignores w")
{
    const auto p = derive_params(6, 2, 3);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Point a = random_point(p, rng, 0.9);
        Point b = a;
        b.w = {-a.w[1], a.w[0]};
        const auto ra = eval_u(p, a);
        const auto rb = eval_u(p, b);
        CHECK(ra.value == rb.value);
        CHECK(ra.gradient[4] == 0.0);
        CHECK(ra.gradient[5] == 0.0);
        CHECK(ra.gradient == rb.gradient);
    }
}

TEST_CASE("analytic gradient matches central differences")
{
    std::mt19937_64 rng(11);
    for (auto [n, ell] : {std::pair{3, 1}, std::pair{4, 2}, std::pair{5, 3}}) {
        for (int m : {1, 3, 8}) {
            const auto p = derive_params(n, ell, m);
            for (int trial = 0; trial < 100; ++trial) {
                const Point pt = random_point(p, rng, 0.9);
                const auto g = eval_u(p, pt).gradient;
                auto x = pt.flatten();
                const double h = 1e-6;
                double err = 0.0;
                double norm = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    auto xp = x;
                    auto xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    const double fd = (eval_flat(p, xp) - eval_flat(p, xm)) / (2 * h);
                    err += (fd - g[i]) * (fd - g[i]);
                    norm += g[i] * g[i];
                }
                CHECK(std::sqrt(err) <= 1e-6 * std::sqrt(norm));
            }
        }
    }
}

TEST_CASE("perturbation derivatives match differences at the oscillation scale")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-0.6, 0.6);
    for (int m : {1, 4, 16}) {
        const auto p = derive_params(3, 1, m);
        for (int trial = 0; trial < 100; ++trial) {
            const double x1 = unif(rng);
            const double z = unif(rng);
            const double h = 1e-5 / p.lambda;
            const double amp = std::exp(p.lambda * x1 + p.log_eta);
            const double d1 = p.lambda * amp * std::cos(p.lambda * z);
            const double dz = -p.lambda * amp * std::sin(p.lambda * z);
            const double fd1 = (perturbation(p, x1 + h, z) - perturbation(p, x1 - h, z)) / (2 * h);
            const double fdz = (perturbation(p, x1, z + h) - perturbation(p, x1, z - h)) / (2 * h);
            const double scale = p.lambda * amp;
            CHECK(std::abs(fd1 - d1) <= 1e-6 * scale);
            CHECK(std::abs(fdz - dz) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("u is harmonic")
{
    std::mt19937_64 rng(3);
    for (auto [n, ell] : {std::pair{3, 1}, std::pair{5, 2}}) {
        for (int m : {1, 2, 6}) {
            const auto p = derive_params(n, ell, m);
            for (int trial = 0; trial < 50; ++trial) {
                const Point pt = random_point(p, rng, 0.9);
                const auto x = pt.flatten();
                // closed-form second partials: 2 per X slot, -2 ell for y, and
                // lambda^2 P (x1) - lambda^2 P (z) for the perturbation
                const double P = perturbation(p, pt.X[0], pt.z);
                const double analytic = 2.0 * ell - 2.0 * ell + p.lambda * p.lambda * P -
                                        p.lambda * p.lambda * P;
                CHECK(analytic == 0.0);

                const double h = 1e-3;
                double lap = 0.0;
                double scale = 0.0;
                const double f0 = eval_flat(p, x);
                for (std::size_t i = 0; i < x.size(); ++i) {
                    auto xp = x;
                    auto xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    const double d2 = (eval_flat(p, xp) - 2 * f0 + eval_flat(p, xm)) / (h * h);
                    lap += d2;
                    scale = std::max(scale, std::abs(d2));
                }
                CHECK(std::abs(lap) <= 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("evaluation is overflow and NaN free on the closed ball up to m = 64")
{
    std::mt19937_64 rng(13);
    for (int m = 1; m <= 64; ++m) {
        const auto p = derive_params(3, 1, m);
        std::vector<Point> pts = {Point{{1.0}, 0.0, 0.0, {}}, Point{{-1.0}, 0.0, 0.0, {}},
                                  Point{{0.0}, 0.0, 1.0, {}}};
        for (int i = 0; i < 50; ++i) {
            pts.push_back(random_point(p, rng, 1.0));
        }
        for (const auto& pt : pts) {
            const auto r = eval_u(p, pt);
            CHECK(std::isfinite(r.value));
            for (double g : r.gradient) {
                CHECK(std::isfinite(g));
            }
        }
        // sup of the perturbation is lambda^-4, attained at x1 = 1, z = 0
        CHECK(perturbation(p, 1.0, 0.0) == doctest::Approx(std::pow(p.lambda, -4.0)).epsilon(1e-12));
    }
}

TEST_CASE("eval_phi on the documented slices")
{
    const auto p = derive_params(4, 2, 3);
    const double eta = std::exp(p.log_eta);
    const std::vector<double> zero{0.0, 0.0};
    for (double z : {-0.2, 0.013, 0.1}) {
        CHECK(eval_phi(p, zero, z) == doctest::Approx(eta * std::cos(p.lambda * z)).epsilon(1e-13));
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 100; ++i) {
        const double a = ang(rng);
        const double r = 0.05 * std::abs(std::sin(a * 3.0));
        const std::vector<double> X{r * std::cos(a), r * std::sin(a)};
        for (double z : {-0.25, 0.25}) {
            const double expected = r * r + std::exp(p.lambda * X[0] + p.log_eta);
            CHECK(eval_phi(p, X, z) == doctest::Approx(expected).epsilon(1e-10));
            CHECK(eval_phi(p, X, z) > 0.0);
        }
        const std::vector<double> rim{p.sigma * std::cos(a), p.sigma * std::sin(a)};
        const double floor = p.sigma * p.sigma -
                             std::exp(-(1.0 - p.sigma) * p.lambda) * std::pow(p.lambda, -4.0);
        CHECK(eval_phi(p, rim, ang(rng) / 30.0) >= floor * (1.0 - 1e-14));
    }
    CHECK_THROWS_AS(eval_phi(p, std::vector<double>{0.07, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(eval_phi(p, zero, 0.26), DomainError);
}

TEST_CASE("rescaled field on the documented points")
{
    const auto p = derive_params(3, 1, 2);
    const std::vector<double> zero{0.0};
    CHECK(eval_u_rescaled(p, zero, 0.0, 0.0) == 1.0);
    for (double ups : {0.0, 0.5, -1.3}) {
        for (double z : {-0.2, 0.01, 0.24}) {
            CHECK(eval_u_rescaled(p, zero, ups, z) == -p.ell * ups * ups + std::cos(p.lambda * z));
        }
    }
    CHECK_THROWS_AS(eval_u_rescaled(p, std::vector<double>{4.5}, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(eval_u_rescaled(p, zero, 0.0, 0.3), DomainError);
}

TEST_CASE("eta * u~ equals u at the rescaled point")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (auto [n, ell] : {std::pair{3, 1}, std::pair{4, 2}, std::pair{5, 3}}) {
        for (int m = 1; m <= 8; ++m) {
            const auto p = derive_params(n, ell, m);
            const double se = p.sqrt_eta();
            const double eta = std::exp(p.log_eta);
            for (int i = 0; i < 100; ++i) {
                std::vector<double> xi(static_cast<std::size_t>(ell));
                for (auto& v : xi) {
                    v = 4.0 * unif(rng);
                }
                const double ups = 2.0 * unif(rng);
                const double z = 0.25 * unif(rng);
                Point raw;
                for (double v : xi) {
                    raw.X.push_back(se * v);
                }
                raw.y = se * ups;
                raw.z = z;
                raw.w.assign(static_cast<std::size_t>(p.w_dim()), 0.0);
                const double lhs = eta * eval_u_rescaled(p, xi, ups, z);
                const double rhs = eval_u(p, raw).value;
                double mag = ell * ups * ups + 1.0;
                for (double v : xi) {
                    mag += v * v;
                }
                CHECK(std::abs(lhs - rhs) <= 1e-12 * eta * mag);
            }
        }
    }
}

TEST_CASE("raw gradient norm agrees with eval_u at the rescaled point")
{
    const auto p = derive_params(4, 2, 1);
    const double se = p.sqrt_eta();
    const std::vector<double> xi{0.7, -0.2};
    const double ups = 0.4;
    const double z = 0.05;
    const auto g = raw_gradient_norm(p, xi, ups, z);
    const auto r = eval_u(p, Point{{se * xi[0], se * xi[1]}, se * ups, z, {}});
    double norm = 0.0;
    for (double v : r.gradient) {
        norm += v * v;
    }
    CHECK(g.raw == doctest::Approx(std::sqrt(norm)).epsilon(1e-12));
    CHECK(g.scaled == doctest::Approx(std::sqrt(norm) / se).epsilon(1e-12));
}

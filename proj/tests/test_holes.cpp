#include "doctest.h"

#include "nodalcert/errors.hpp"
#include "nodalcert/holes.hpp"
#include "nodalcert/homology.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace nodalcert;

namespace {

// Root of 2 t + kappa e^{kappa t} cos(lambda z) by plain bisection.
double minimizer_oracle(const FamilyParams& p, double z)
{
    const double kappa = p.kappa();
    const double c = std::cos(p.lambda * z);
    auto g = [&](double t) { return 2.0 * t + kappa * std::exp(kappa * t) * c; };
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> unit(int ell, int axis, double sign)
{
    std::vector<double> v(static_cast<std::size_t>(ell), 0.0);
    v[static_cast<std::size_t>(axis)] = sign;
    return v;
}

} // namespace

TEST_CASE("negative intervals")
{
    const auto p = derive_params(3, 1, 1);
    const auto iv = negative_intervals(p);
    REQUIRE(iv.size() == 2);
    CHECK(iv[0].z_minus == doctest::Approx(-3.0 / 16.0).epsilon(1e-14));
    CHECK(iv[0].z_plus == doctest::Approx(-1.0 / 16.0).epsilon(1e-14));
    CHECK(iv[1].z_minus == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(iv[1].z_plus == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
    CHECK(iv[1].z_center == doctest::Approx(1.0 / 8.0).epsilon(1e-14));

    for (int m = 1; m <= 32; ++m) {
        const auto q = derive_params(3, 1, m);
        const auto ivs = negative_intervals(q);
        CHECK(ivs.size() == static_cast<std::size_t>(2 * m));
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            CHECK(ivs[i].z_minus > -0.25);
            CHECK(ivs[i].z_plus < 0.25);
            CHECK(std::cos(q.lambda * ivs[i].z_center) == doctest::Approx(-1.0));
            if (i > 0) {
                CHECK(ivs[i].z_minus > ivs[i - 1].z_plus);
            }
        }
    }
}

TEST_CASE("slice minimizer")
{
    for (int m : {1, 3, 8}) {
        const auto p = derive_params(4, 2, m);
        // cos(lambda z) = 0 gives a minimizer at the origin
        const double z0 = 1.0 / (16.0 * m);
        const auto c0 = slice_minimizer(p, z0);
        CHECK(std::abs(c0[0]) <= 1e-14);
        CHECK(c0[1] == 0.0);

        const double zc = 1.0 / (8.0 * m);
        const auto c = slice_minimizer(p, zc);
        CHECK(c[0] == doctest::Approx(minimizer_oracle(p, zc)).epsilon(1e-12));
        CHECK(c[0] == doctest::Approx(p.kappa() / 2.0).epsilon(1e-6));

        std::mt19937_64 rng(static_cast<std::uint64_t>(m));
        std::uniform_real_distribution<double> zd(-0.25, 0.25);
        for (int i = 0; i < 100; ++i) {
            const double z = zd(rng);
            const auto ci = slice_minimizer(p, z);
            const auto pe = eval_phi_rescaled(p, ci, z);
            CHECK(std::abs(pe.grad_X[0]) <= 1e-12);
            CHECK(ci[0] == doctest::Approx(minimizer_oracle(p, z)).epsilon(1e-10));
        }
    }
    const auto p = derive_params(3, 1, 1);
    CHECK_THROWS_AS(slice_minimizer(p, 0.3), DomainError);
}

TEST_CASE("radial root")
{
    const auto p = derive_params(4, 2, 2);
    const auto iv = negative_intervals(p);
    const auto& hole = iv[1];
    const auto omega = unit(2, 0, 1.0);
    const double rho_center = radial_root(p, hole.z_center, omega);
    CHECK(rho_center == doctest::Approx(1.0).epsilon(1e-6));

    double previous = rho_center;
    for (double frac : {0.3, 0.1, 0.01, 1e-4}) {
        const double z = hole.z_plus - frac * (hole.z_plus - hole.z_minus) / 2.0;
        const double rho = radial_root(p, z, omega);
        CHECK(rho < previous);
        previous = rho;
        const double cz = -std::cos(p.lambda * z);
        CHECK(rho == doctest::Approx(std::sqrt(cz)).epsilon(1e-5));
    }
    CHECK(previous < 0.02);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> w = {nd(rng), nd(rng)};
        const double len = std::hypot(w[0], w[1]);
        w[0] /= len;
        w[1] /= len;
        const double z = hole.z_minus + ud(rng) * (hole.z_plus - hole.z_minus);
        const auto c = slice_minimizer(p, z);
        const double rho = radial_root(p, z, w);
        std::vector<double> inner = {c[0] + 0.5 * rho * w[0], c[1] + 0.5 * rho * w[1]};
        std::vector<double> outer = {c[0] + 1.5 * rho * w[0], c[1] + 1.5 * rho * w[1]};
        std::vector<double> on = {c[0] + rho * w[0], c[1] + rho * w[1]};
        CHECK(phi_rescaled(p, inner, z) < 0.0);
        CHECK(phi_rescaled(p, outer, z) > 0.0);
        CHECK(std::abs(phi_rescaled(p, on, z)) <= 1e-12);
    }
    // cos(lambda z) > 0: no root
    CHECK_THROWS_AS(radial_root(p, 0.0, omega), NoRootError);
}

TEST_CASE("slice Hessian dominates the identity")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> zd(-0.25, 0.25);
    for (auto [n, ell] : {std::pair{3, 1}, std::pair{4, 2}, std::pair{5, 3}}) {
        const auto p = derive_params(n, ell, 1);
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> xi(static_cast<std::size_t>(ell));
            for (auto& v : xi) {
                v = u(rng);
            }
            const auto pe = eval_phi_rescaled(p, xi, zd(rng));
            // Hessian is diagonal; the (1,1) entry carries the perturbation
            CHECK(pe.hess_X[0] >= 1.0);
            for (int a = 1; a < ell; ++a) {
                CHECK(pe.hess_X[static_cast<std::size_t>(a * ell + a)] >= 1.0);
            }
        }
    }
}

TEST_CASE("hole boundaries are spheres around their witness")
{
    for (auto [n, ell, chi] : {std::tuple{3, 1, 0}, std::tuple{4, 2, 2}, std::tuple{5, 3, 0}}) {
        const auto p = derive_params(n, ell, 1);
        const auto holes = build_holes(p);
        REQUIRE(holes.size() == 2);
        for (const auto& h : holes) {
            CHECK(h.euler_characteristic == chi);
            CHECK(h.boundary.dim == ell);
            CHECK(h.boundary.ambient_dim == ell + 1);
            CHECK(is_closed_pseudomanifold(h.boundary));
            CHECK(h.depth >= 0.9);
            CHECK(h.depth <= 1.0 + 1e-12);
            CHECK(h.max_residual <= 1e-12);
            CHECK(std::isfinite(h.rho_lipschitz));
            CHECK(phi_rescaled(p, std::span<const double>(h.witness).first(static_cast<std::size_t>(ell)),
                               h.witness.back()) < 0.0);
            CHECK(signed_volume_about(h.boundary, h.witness) > 0.0);
            CHECK(degree(h.boundary, h.witness) == 1);
        }
        std::vector<SimplicialMesh> cycles;
        std::vector<std::vector<double>> witnesses;
        for (const auto& h : holes) {
            cycles.push_back(h.boundary);
            witnesses.push_back(h.witness);
        }
        std::vector<double> far(static_cast<std::size_t>(ell) + 1, 0.0);
        far[0] = 3.0;
        witnesses.push_back(far);
        const auto im = independence_matrix(cycles, witnesses);
        CHECK(im.rank == 2);
        CHECK(im.entries[0] == std::vector<int>{1, 0, 0});
        CHECK(im.entries[1] == std::vector<int>{0, 1, 0});
    }
}

TEST_CASE("hole construction preconditions")
{
    const auto p = derive_params(3, 1, 1);
    CHECK_THROWS_AS(build_hole(p, 5), ParameterError);
    CHECK_THROWS_AS(build_hole(p, 0, HoleResolution{4, 16}), ParameterError);
}

TEST_CASE("hole layout")
{
    for (int m = 1; m <= 8; ++m) {
        const auto p = derive_params(3, 1, m);
        const auto holes = build_holes(p);
        const auto rep = verify_hole_layout(p, holes);
        INFO("m = " << m);
        CHECK(rep.ok());
        CHECK(rep.violations.empty());
        CHECK(rep.vertical_min >= rep.vertical_floor);
        CHECK(rep.horizontal_min > 0.0);
    }
    for (auto [n, ell] : {std::pair{4, 2}, std::pair{5, 3}}) {
        for (int m : {1, 4, 8}) {
            const auto p = derive_params(n, ell, m);
            const auto rep = verify_hole_layout(p, build_holes(p));
            INFO("n = " << n << " m = " << m);
            CHECK(rep.ok());
        }
    }
    // dropping a hole breaks the count and the scan
    const auto p = derive_params(3, 1, 2);
    auto holes = build_holes(p);
    holes.pop_back();
    const auto rep = verify_hole_layout(p, holes);
    CHECK_FALSE(rep.count_ok);
    CHECK_FALSE(rep.scan_ok);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("hole curves csv")
{
    const auto p = derive_params(3, 1, 3);
    const auto holes = build_holes(p);
    std::ostringstream os;
    write_hole_curves_csv(os, holes);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "j,vertex_order,xi_1,z");
    std::map<int, std::vector<std::pair<double, double>>> curves;
    while (std::getline(is, line)) {
        int j = 0;
        int order = 0;
        double x = 0.0;
        double z = 0.0;
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &j, &order, &x, &z) == 4);
        CHECK(order == static_cast<int>(curves[j].size()));
        curves[j].emplace_back(x, z);
    }
    CHECK(curves.size() == 6);
    for (const auto& [j, pts] : curves) {
        REQUIRE(pts.size() > 3);
        CHECK(pts.front() == pts.back());
        for (const auto& [x, z] : pts) {
            const double v[1] = {x};
            CHECK(std::abs(phi_rescaled(p, v, z)) <= 1e-12);
        }
    }
}

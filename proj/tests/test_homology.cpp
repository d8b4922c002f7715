#include "doctest.h"

#include "nodalcert/errors.hpp"
#include "nodalcert/homology.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

using namespace nodalcert;
using namespace nodalcert::oracle;

namespace {

SimplicialMesh circle(int segments, double radius, double cx, double cy)
{
    SimplicialMesh m;
    m.ambient_dim = 2;
    m.dim = 1;
    for (int k = 0; k < segments; ++k) {
        const double a = 2.0 * std::numbers::pi * k / segments;
        const double p[2] = {cx + radius * std::cos(a), cy + radius * std::sin(a)};
        m.add_vertex(p);
        m.simplices.push_back({k, (k + 1) % segments});
    }
    return m;
}

SimplicialMesh outward_sphere(int d, int levels)
{
    SimplicialMesh m = d == 2 ? regular_polygon(32) : sphere_complex(d, levels);
    orient_consistently(m);
    const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    if (signed_volume_about(m, origin) < 0.0) {
        flip_orientation(m);
    }
    return m;
}

} // namespace

TEST_CASE("Betti numbers of spheres")
{
    for (int ell = 0; ell <= 4; ++ell) {
        const auto b = betti_numbers(face_closure(simplex_boundary(ell)));
        REQUIRE(b.size() == static_cast<std::size_t>(ell) + 1);
        for (int k = 0; k <= ell; ++k) {
            const std::int64_t expected = (k == 0 || k == ell) ? (ell == 0 ? 2 : 1) : 0;
            CHECK(b[static_cast<std::size_t>(k)] == expected);
        }
    }
}

TEST_CASE("Betti numbers of the 7-vertex torus")
{
    const auto b = betti_numbers(face_closure(seven_vertex_torus()));
    CHECK(b == BettiVector{1, 2, 1});
    const auto closure = face_closure(seven_vertex_torus());
    CHECK(closure[1].size() == 21);
    CHECK(euler_characteristic(closure) == 0);
}

TEST_CASE("Betti numbers of disjoint unions")
{
    std::vector<Simplex> two_circles = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}};
    CHECK(betti_numbers(face_closure(two_circles)) == BettiVector{2, 2});

    std::vector<Simplex> mixed = seven_vertex_torus();
    for (auto s : simplex_boundary(2)) {
        for (int& v : s) {
            v += 10;
        }
        mixed.push_back(s);
    }
    mixed.push_back({20, 21});
    CHECK(betti_numbers(face_closure(mixed)) == BettiVector{3, 2, 2});
}

TEST_CASE("missing faces are a structural error")
{
    std::vector<std::vector<Simplex>> broken = {{{0}, {1}, {2}}, {{0, 1}, {1, 2}}, {{0, 1, 2}}};
    CHECK_THROWS_AS(betti_numbers(broken), StructuralError);
    CHECK_THROWS_AS(boundary_matrices(broken), StructuralError);
}

TEST_CASE("GF(2) ranks agree with a dense oracle on random complexes")
{
    std::mt19937_64 rng(2024);
    int compared = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> nv(4, 11);
        std::uniform_int_distribution<int> dim(1, 4);
        const int vertices = nv(rng);
        std::vector<Simplex> maximal;
        std::uniform_int_distribution<int> count(1, 25);
        const int n_max = count(rng);
        for (int i = 0; i < n_max; ++i) {
            const int d = std::min(dim(rng), vertices - 1);
            std::vector<int> pool(static_cast<std::size_t>(vertices));
            for (int v = 0; v < vertices; ++v) {
                pool[static_cast<std::size_t>(v)] = v;
            }
            std::shuffle(pool.begin(), pool.end(), rng);
            maximal.emplace_back(pool.begin(), pool.begin() + d + 1);
        }
        const auto closure = face_closure(maximal);
        std::size_t total = 0;
        for (const auto& level : closure) {
            total += level.size();
        }
        if (total > 200) {
            continue;
        }
        ++compared;
        const auto b = betti_numbers(closure);
        const auto oracle = dense_betti(maximal);
        CHECK(b == oracle);
        std::int64_t alt = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            alt += (k % 2 == 0) ? b[k] : -b[k];
        }
        CHECK(alt == euler_characteristic(closure));
        CHECK(boundary_squared_is_zero(boundary_matrices(closure)));
    }
    CHECK(compared >= 60);
}

TEST_CASE("gf2 rank of a single boundary matrix")
{
    const auto mats = boundary_matrices(face_closure(seven_vertex_torus()));
    REQUIRE(mats.size() == 2);
    CHECK(gf2_rank(mats[0]) == 6);
    CHECK(gf2_rank(mats[1]) == 13);
}

TEST_CASE("degree of circles")
{
    const auto c = circle(64, 1.0, 0.0, 0.0);
    const double origin[2] = {0.0, 0.0};
    const double outside[2] = {2.0, 0.0};
    CHECK(degree(c, origin) == 1);
    CHECK(degree(c, outside) == 0);
    SimplicialMesh rev = c;
    flip_orientation(rev);
    CHECK(degree(rev, origin) == -1);
    const double near_rim[2] = {0.999, 0.0};
    CHECK(degree(c, near_rim) == 1);
    const double vertex[2] = {1.0, 0.0};
    CHECK_THROWS_AS(degree(c, vertex), GeometricError);
}

TEST_CASE("degree of embedded spheres")
{
    for (int d : {2, 3, 4}) {
        const auto s = outward_sphere(d, 0);
        std::vector<double> inside(static_cast<std::size_t>(d), 0.05);
        std::vector<double> outside(static_cast<std::size_t>(d), 0.0);
        outside[0] = 3.0;
        CHECK(degree(s, inside) == 1);
        CHECK(degree(s, outside) == 0);
        SimplicialMesh rev = s;
        flip_orientation(rev);
        CHECK(degree(rev, inside) == -1);
    }
}

TEST_CASE("degree is independent of the ray direction")
{
    const auto s = outward_sphere(3, 1);
    const double p[3] = {0.1, -0.2, 0.15};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        DegreeOptions opt;
        opt.seed = seed;
        CHECK(degree(s, p, opt) == 1);
    }
    const auto c = circle(40, 0.5, 0.2, 0.1);
    const double q[2] = {0.3, 0.2};
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL}) {
        DegreeOptions opt;
        opt.seed = seed;
        CHECK(degree(c, q, opt) == 1);
    }
}

TEST_CASE("degree is invariant under barycentric subdivision")
{
    for (int d : {2, 3}) {
        const auto s = outward_sphere(d, 0);
        const auto sub = barycentric_subdivision(s);
        const auto sub2 = barycentric_subdivision(sub);
        std::vector<double> inside(static_cast<std::size_t>(d), -0.1);
        std::vector<double> outside(static_cast<std::size_t>(d), 1.5);
        CHECK(degree(sub, inside) == degree(s, inside));
        CHECK(degree(sub2, inside) == degree(s, inside));
        CHECK(degree(sub2, outside) == 0);
    }
}

TEST_CASE("independence matrix")
{
    std::vector<SimplicialMesh> cycles;
    std::vector<std::vector<double>> witnesses;
    for (int i = 0; i < 4; ++i) {
        cycles.push_back(circle(32, 0.4, 1.0 * i, 0.0));
        witnesses.push_back({1.0 * i, 0.05});
    }
    auto m = independence_matrix(cycles, witnesses);
    CHECK(m.is_identity());
    CHECK(m.rank == 4);

    witnesses.push_back({10.0, 0.0});
    m = independence_matrix(cycles, witnesses);
    CHECK(m.rank == 4);
    for (const auto& row : m.entries) {
        CHECK(row.back() == 0);
    }

    cycles.push_back(cycles[2]);
    m = independence_matrix(cycles, witnesses);
    CHECK(m.entries[4] == m.entries[2]);
    CHECK(m.rank == 4);
}

TEST_CASE("integer rank")
{
    CHECK(integer_rank({{1, 0}, {0, 1}}) == 2);
    CHECK(integer_rank({{2, 4}, {1, 2}}) == 1);
    CHECK(integer_rank({{0, 0}, {0, 0}}) == 0);
    CHECK(integer_rank({{0, 1, 1}, {1, 0, 1}, {1, 1, 2}}) == 2);
    CHECK(integer_rank({{1, -1, 0}, {0, 1, -1}, {-1, 0, 1}}) == 2);
}

TEST_CASE("drop_coordinate")
{
    SimplicialMesh m;
    m.ambient_dim = 3;
    m.dim = 1;
    const double a[3] = {1.0, 2.0, 3.0};
    const double b[3] = {4.0, 5.0, 6.0};
    m.add_vertex(a);
    m.add_vertex(b);
    m.simplices = {{0, 1}};
    const auto p = drop_coordinate(m, 1);
    CHECK(p.ambient_dim == 2);
    CHECK(p.coords == std::vector<double>{1.0, 3.0, 4.0, 6.0});
    CHECK_THROWS_AS(drop_coordinate(m, 3), ParameterError);
}

#include "doctest.h"

#include "nodalcert/complex.hpp"
#include "nodalcert/errors.hpp"

#include <cmath>
#include <numbers>

using namespace nodalcert;

TEST_CASE("face closure and Euler characteristic")
{
    const std::vector<Simplex> tetra_boundary = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    const auto c = face_closure(tetra_boundary);
    REQUIRE(c.size() == 3);
    CHECK(c[0].size() == 4);
    CHECK(c[1].size() == 6);
    CHECK(c[2].size() == 4);
    CHECK(euler_characteristic(c) == 2);

    const auto mixed = face_closure({{0, 1, 2}, {2, 3}, {4}});
    CHECK(mixed[0].size() == 5);
    CHECK(mixed[1].size() == 4);
    CHECK(mixed[2].size() == 1);
}

TEST_CASE("permutation sign")
{
    CHECK(permutation_sign({0, 1, 2}) == 1);
    CHECK(permutation_sign({1, 0, 2}) == -1);
    CHECK(permutation_sign({2, 0, 1}) == 1);
    CHECK(permutation_sign({5, 9}) == 1);
    CHECK_THROWS_AS(permutation_sign({1, 1}), StructuralError);
}

TEST_CASE("consistent orientation of a closed surface")
{
    SimplicialMesh m = sphere_complex(3, 0);
    CHECK(m.vertex_count() == 6);
    CHECK(m.simplices.size() == 8);
    CHECK(is_closed_pseudomanifold(m));
    orient_consistently(m);
    const double origin[3] = {0.0, 0.0, 0.0};
    const double vol = signed_volume_about(m, origin);
    // octahedron volume 4/3, times 3!
    CHECK(std::abs(vol) == doctest::Approx(8.0));
    if (vol < 0) {
        flip_orientation(m);
    }
    CHECK(signed_volume_about(m, origin) == doctest::Approx(8.0));
    // volume is independent of the reference point for a closed surface
    const double other[3] = {0.3, -0.2, 0.1};
    CHECK(signed_volume_about(m, other) == doctest::Approx(8.0));
}

TEST_CASE("orientation failures are structural errors")
{
    SimplicialMesh book;
    book.ambient_dim = 3;
    book.dim = 2;
    for (int i = 0; i < 5; ++i) {
        const double x[3] = {std::cos(i * 1.0), std::sin(i * 1.0), static_cast<double>(i % 2)};
        book.add_vertex(x);
    }
    // three triangles sharing the edge {0, 1}
    book.simplices = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
    CHECK_FALSE(is_closed_pseudomanifold(book));
    CHECK_THROWS_AS(orient_consistently(book), StructuralError);

    // Moebius strip on 5 vertices is not orientable
    SimplicialMesh moebius;
    moebius.ambient_dim = 3;
    moebius.dim = 2;
    for (int i = 0; i < 5; ++i) {
        const double x[3] = {static_cast<double>(i), 0.0, 0.0};
        moebius.add_vertex(x);
    }
    moebius.simplices = {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 0}, {4, 0, 1}};
    CHECK_THROWS_AS(orient_consistently(moebius), StructuralError);
}

TEST_CASE("barycentric subdivision counts and orientation")
{
    SimplicialMesh m = sphere_complex(3, 0);
    orient_consistently(m);
    const double origin[3] = {0.0, 0.0, 0.0};
    if (signed_volume_about(m, origin) < 0) {
        flip_orientation(m);
    }
    const SimplicialMesh s = barycentric_subdivision(m);
    CHECK(s.simplices.size() == 8 * 6);
    CHECK(s.vertex_count() == 6 + 12 + 8);
    CHECK(euler_characteristic(face_closure(s.simplices)) == 2);
    CHECK(is_closed_pseudomanifold(s));
    // inherited orientation is already consistent and keeps the volume
    SimplicialMesh copy = s;
    orient_consistently(copy);
    CHECK(copy.simplices == s.simplices);
    CHECK(signed_volume_about(s, origin) == doctest::Approx(8.0));
}

TEST_CASE("sphere complexes")
{
    const auto s0 = sphere_complex(1, 0);
    CHECK(s0.dim == 0);
    CHECK(s0.vertex_count() == 2);
    for (int d = 2; d <= 4; ++d) {
        for (int levels : {0, 1}) {
            const auto s = sphere_complex(d, levels);
            CHECK(s.dim == d - 1);
            CHECK(is_closed_pseudomanifold(s));
            const auto chi = euler_characteristic(face_closure(s.simplices));
            CHECK(chi == (d % 2 == 1 ? 2 : 0));
            for (std::size_t v = 0; v < s.vertex_count(); ++v) {
                double n = 0.0;
                for (double c : s.vertex(v)) {
                    n += c * c;
                }
                CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
            }
        }
    }
    const auto poly = regular_polygon(12);
    CHECK(poly.simplices.size() == 12);
    const double origin[2] = {0.0, 0.0};
    CHECK(signed_volume_about(poly, origin) > 0.0);
}

TEST_CASE("small determinant")
{
    CHECK(small_det({2.0}, 1) == 2.0);
    CHECK(small_det({1.0, 2.0, 3.0, 4.0}, 2) == doctest::Approx(-2.0));
    CHECK(small_det({0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0}, 3) == doctest::Approx(-1.0));
    CHECK(small_det({1.0, 2.0, 2.0, 4.0}, 2) == 0.0);
}

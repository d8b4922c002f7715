#include "nodalcert/holes.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace nodalcert {

namespace {

constexpr int kMaxNewton = 100;  // slice minimizer
constexpr double kStationaryTol = 1e-12;
constexpr double kRootTol = 1e-12;

void check_z(double z)
{
    if (!(std::abs(z) <= kZWindow)) {
        throw DomainError("slice height outside [-1/4, 1/4]");
    }
}

SimplicialMesh direction_complex(int ell, int n_omega)
{
    if (ell == 1) {
        return sphere_complex(1, 0);
    }
    if (ell == 2) {
        return regular_polygon(n_omega);
    }
    int levels = 0;
    SimplicialMesh mesh = sphere_complex(ell, 0);
    while (static_cast<int>(mesh.vertex_count()) < n_omega) {
        ++levels;
        mesh = sphere_complex(ell, levels);
    }
    return mesh;
}

double angle_between(std::span<const double> a, std::span<const double> b)
{
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
    }
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

// Is (xi, z) inside the hole, judged by the radial function about c(z)?
bool inside_hole(const FamilyParams& p, std::span<const double> xi, double z)
{
    for (double v : xi) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    const auto c = slice_minimizer(p, z);
    if (phi_rescaled(p, c, z) >= 0.0) {
        return false;
    }
    std::vector<double> d(xi.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        d[i] = xi[i] - c[i];
        norm += d[i] * d[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        return true;
    }
    for (double& v : d) {
        v /= norm;
    }
    return norm < radial_root(p, z, d) * (1.0 + 1e-9);
}

} // namespace

std::vector<NegativeInterval> negative_intervals(const FamilyParams& params)
{
    std::vector<NegativeInterval> out;
    const double pi = std::numbers::pi;
    for (int j = -params.m; j <= params.m - 1; ++j) {
        NegativeInterval iv;
        iv.j = j;
        iv.z_minus = (pi / 2.0 + 2.0 * pi * j) / params.lambda;
        iv.z_plus = (3.0 * pi / 2.0 + 2.0 * pi * j) / params.lambda;
        iv.z_center = (pi + 2.0 * pi * j) / params.lambda;
        out.push_back(iv);
    }
    return out;
}

std::vector<double> slice_minimizer(const FamilyParams& params, double z)
{
    check_z(z);
    const double kappa = params.kappa();
    const double c = std::cos(params.lambda * z);
    // d/dxi1 Phi~ = 2 xi1 + kappa e^(kappa xi1) cos; the remaining
    // components of the gradient are 2 xi_i and vanish at 0
    double t = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
        const double e = 1.0 + std::expm1(kappa * t);
        const double g = 2.0 * t + kappa * e * c;
        if (std::abs(g) <= kStationaryTol) {
            std::vector<double> out(static_cast<std::size_t>(params.ell), 0.0);
            out[0] = t;
            return out;
        }
        t -= g / (2.0 + kappa * kappa * e * c);
    }
    throw NumericalError("slice minimizer did not converge at z = " + std::to_string(z));
}

double radial_root(const FamilyParams& params, double z, std::span<const double> omega)
{
    if (omega.size() != static_cast<std::size_t>(params.ell)) {
        throw ParameterError("direction must have ell components");
    }
    const auto c = slice_minimizer(params, z);
    std::vector<double> x(c.size());
    auto at = [&](double t) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            x[i] = c[i] + t * omega[i];
        }
        return x;
    };
    auto f = [&](double t) { return phi_rescaled(params, at(t), z); };
    if (!(f(0.0) < 0.0)) {
        throw NoRootError("slice is not negative at its minimizer (z = " + std::to_string(z) + ")");
    }
    double lo = 0.0;
    double hi = 1.0;
    int expand = 0;
    while (f(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++expand > 60) {
            throw NumericalError("radial root bracket expansion failed");
        }
    }
    // bisection down to adjacent doubles, then one guarded Newton polish
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (f(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double t = std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
    const PhiEval e = eval_phi_rescaled(params, at(t), z);
    double slope = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        slope += e.grad_X[i] * omega[i];
    }
    if (slope > 0.0) {
        const double next = t - e.value / slope;
        if (std::abs(f(next)) < std::abs(e.value)) {
            t = next;
        }
    }
    const double residual = std::abs(f(t));
    if (!(residual <= kRootTol)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "radial root residual %.3e above 1e-12 (z = %.17g, rho = %.17g)",
                      residual, z, t);
        throw NumericalError(buf);
    }
    return t;
}

HoleDescriptor build_hole(const FamilyParams& params, int j, const HoleResolution& res)
{
    if (j < -params.m || j > params.m - 1) {
        throw ParameterError("hole index j must satisfy -m <= j <= m - 1");
    }
    if (res.n_z < 8 || res.n_omega < 8) {
        throw ParameterError("hole resolution must be at least (8, 8)");
    }
    const auto ell = static_cast<std::size_t>(params.ell);
    HoleDescriptor hole;
    hole.interval = negative_intervals(params)[static_cast<std::size_t>(j + params.m)];
    const auto& iv = hole.interval;

    const SimplicialMesh dirs = direction_complex(params.ell, res.n_omega);
    const std::size_t n_dir = dirs.vertex_count();
    const auto n_z = static_cast<std::size_t>(res.n_z);
    const double h = 0.5 * (iv.z_plus - iv.z_minus);

    hole.center_z.resize(n_z + 1);
    for (std::size_t k = 0; k <= n_z; ++k) {
        hole.center_z[k] = iv.z_center - h * std::cos(std::numbers::pi * static_cast<double>(k) /
                                                      static_cast<double>(n_z));
    }
    hole.center_z.front() = iv.z_minus;
    hole.center_z.back() = iv.z_plus;
    hole.center_curve.assign(n_z + 1, std::vector<double>(ell, 0.0));

    // rho[k][a] for rings k = 1 .. n_z - 1
    std::vector<std::vector<double>> rho(n_z + 1, std::vector<double>(n_dir, 0.0));
    parallel_for(n_z - 1, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::size_t k = r + 1;
            const double z = hole.center_z[k];
            hole.center_curve[k] = slice_minimizer(params, z);
            for (std::size_t a = 0; a < n_dir; ++a) {
                rho[k][a] = radial_root(params, z, dirs.vertex(a));
            }
        }
    });

    SimplicialMesh& mesh = hole.boundary;
    mesh.ambient_dim = params.ell + 1;
    mesh.dim = params.ell;
    std::vector<double> v(ell + 1, 0.0);
    v[ell] = iv.z_minus;
    mesh.add_vertex(v);
    v[ell] = iv.z_plus;
    mesh.add_vertex(v);
    for (std::size_t k = 1; k < n_z; ++k) {
        for (std::size_t a = 0; a < n_dir; ++a) {
            const auto w = dirs.vertex(a);
            for (std::size_t i = 0; i < ell; ++i) {
                v[i] = hole.center_curve[k][i] + rho[k][a] * w[i];
            }
            v[ell] = hole.center_z[k];
            mesh.add_vertex(v);
        }
    }
    auto id = [&](std::size_t k, int a) {
        return static_cast<int>(2 + (k - 1) * n_dir + static_cast<std::size_t>(a));
    };
    for (const Simplex& s : dirs.simplices) {
        Simplex sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t d1 = sorted.size();
        for (std::size_t k = 1; k + 1 < n_z; ++k) {
            // staircase triangulation of the prism sorted x [k, k+1]
            for (std::size_t i = 0; i < d1; ++i) {
                Simplex t;
                for (std::size_t q = 0; q <= i; ++q) {
                    t.push_back(id(k, sorted[q]));
                }
                for (std::size_t q = i; q < d1; ++q) {
                    t.push_back(id(k + 1, sorted[q]));
                }
                mesh.simplices.push_back(std::move(t));
            }
        }
        Simplex bottom{0};
        Simplex top{1};
        for (int a : sorted) {
            bottom.push_back(id(1, a));
            top.push_back(id(n_z - 1, a));
        }
        mesh.simplices.push_back(std::move(bottom));
        mesh.simplices.push_back(std::move(top));
    }
    if (!is_closed_pseudomanifold(mesh)) {
        throw StructuralError("hole boundary is not a closed pseudomanifold");
    }
    orient_consistently(mesh);

    hole.witness = slice_minimizer(params, iv.z_center);
    hole.witness.push_back(iv.z_center);
    hole.depth = -phi_rescaled(params, std::span<const double>(hole.witness.data(), ell), iv.z_center);
    const double vol = signed_volume_about(mesh, hole.witness);
    if (!(std::abs(vol) > 0.0)) {
        throw StructuralError("hole boundary encloses no volume around its witness");
    }
    if (vol < 0.0) {
        flip_orientation(mesh);
    }

    for (std::size_t q = 0; q < mesh.vertex_count(); ++q) {
        const auto x = mesh.vertex(q);
        hole.max_residual = std::max(
            hole.max_residual, std::abs(phi_rescaled(params, x.subspan(0, ell), x[ell])));
    }
    hole.euler_characteristic = euler_characteristic(face_closure(mesh.simplices));

    for (std::size_t k = 0; k < n_z; ++k) {
        const double dz = params.lambda * (hole.center_z[k + 1] - hole.center_z[k]);
        for (std::size_t a = 0; a < n_dir; ++a) {
            hole.rho_lipschitz = std::max(hole.rho_lipschitz, std::abs(rho[k + 1][a] - rho[k][a]) / dz);
        }
    }
    if (params.ell >= 2) {
        const auto dir_edges = face_closure(dirs.simplices)[1];
        for (std::size_t k = 1; k < n_z; ++k) {
            for (const Simplex& s : dir_edges) {
                const double ang = angle_between(dirs.vertex(static_cast<std::size_t>(s[0])),
                                                 dirs.vertex(static_cast<std::size_t>(s[1])));
                const double dr = std::abs(rho[k][static_cast<std::size_t>(s[0])] -
                                           rho[k][static_cast<std::size_t>(s[1])]);
                hole.rho_lipschitz = std::max(hole.rho_lipschitz, dr / ang);
            }
        }
    }
    return hole;
}

std::vector<HoleDescriptor> build_holes(const FamilyParams& params, const HoleResolution& res)
{
    const auto count = static_cast<std::size_t>(2 * params.m);
    std::vector<HoleDescriptor> holes(count);
    parallel_for(count, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            holes[i] = build_hole(params, static_cast<int>(i) - params.m, res);
        }
    });
    return holes;
}

LayoutReport verify_hole_layout(const FamilyParams& params, const std::vector<HoleDescriptor>& holes)
{
    LayoutReport rep;
    const auto ell = static_cast<std::size_t>(params.ell);
    const auto intervals = negative_intervals(params);
    const auto expected = static_cast<std::size_t>(2 * params.m);
    rep.count_ok = holes.size() == expected && intervals.size() == expected;
    if (!rep.count_ok) {
        rep.violations.push_back("count: expected " + std::to_string(expected) + " holes, got " +
                                 std::to_string(holes.size()));
    }

    std::vector<NegativeInterval> ivs;
    for (const auto& h : holes) {
        ivs.push_back(h.interval);
    }
    std::sort(ivs.begin(), ivs.end(),
              [](const NegativeInterval& a, const NegativeInterval& b) { return a.z_minus < b.z_minus; });
    rep.disjoint_ok = true;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (!(ivs[i].z_minus > params.z_min && ivs[i].z_plus < params.z_max)) {
            rep.disjoint_ok = false;
            rep.violations.push_back("containment: interval j = " + std::to_string(ivs[i].j) +
                                     " leaves (-1/4, 1/4)");
        }
        if (i + 1 < ivs.size() && !(ivs[i].z_plus < ivs[i + 1].z_minus)) {
            rep.disjoint_ok = false;
            rep.violations.push_back("disjointness: intervals j = " + std::to_string(ivs[i].j) +
                                     " and " + std::to_string(ivs[i + 1].j) + " overlap");
        }
    }

    // sample directions on the unit sphere of R^ell
    const SimplicialMesh dirs = direction_complex(params.ell, 32);
    const double sigma = params.sigma;

    rep.horizontal_min = std::numeric_limits<double>::infinity();
    bool horizontal = true;
    for (double z : {params.z_min, params.z_max}) {
        // the axis point in rescaled units (the raw value eta*cos may underflow)
        const std::vector<double> zero(ell, 0.0);
        horizontal = horizontal && phi_rescaled(params, zero, z) > 0.0;
        for (int r = 1; r <= 16; ++r) {
            for (std::size_t a = 0; a < dirs.vertex_count(); ++a) {
                std::vector<double> X(ell);
                const auto w = dirs.vertex(a);
                for (std::size_t i = 0; i < ell; ++i) {
                    X[i] = sigma * r / 16.0 * w[i];
                }
                const double v = eval_phi(params, X, z);
                rep.horizontal_min = std::min(rep.horizontal_min, v);
                horizontal = horizontal && v > 0.0;
            }
        }
    }
    rep.horizontal_ok = horizontal;
    if (!horizontal) {
        rep.violations.push_back("horizontal boundary: Phi <= 0 at z = +-1/4");
    }

    rep.vertical_floor = sigma * sigma -
                         std::exp(-(1.0 - sigma) * params.lambda) * std::pow(params.lambda, -4.0);
    rep.vertical_min = std::numeric_limits<double>::infinity();
    const int nz_side = 4000;
    for (int k = 0; k <= nz_side; ++k) {
        const double z = params.z_min + (params.z_max - params.z_min) * k / nz_side;
        for (std::size_t a = 0; a < dirs.vertex_count(); ++a) {
            std::vector<double> X(ell);
            const auto w = dirs.vertex(a);
            for (std::size_t i = 0; i < ell; ++i) {
                X[i] = sigma * w[i];
            }
            rep.vertical_min = std::min(rep.vertical_min, eval_phi(params, X, z));
        }
    }
    rep.vertical_ok = rep.vertical_floor > 0.0 && rep.vertical_min >= rep.vertical_floor * (1.0 - 1e-12);
    if (!rep.vertical_ok) {
        rep.violations.push_back("vertical boundary: Phi below sigma^2 - e^(-(1-sigma) lambda) lambda^-4");
    }

    // dense sign scan: rescaled grid around the axis and raw grid over R_ell;
    // every point with Phi < 0 must lie in a hole
    const int xi_side = ell == 1 ? 40 : (ell == 2 ? 20 : 10);
    const double xi_extent = 2.0;
    const int z_side = (ell == 1 ? 256 : (ell == 2 ? 128 : 48)) * params.m;
    std::vector<std::int64_t> bad(static_cast<std::size_t>(z_side) + 1, 0);
    std::vector<std::int64_t> seen(static_cast<std::size_t>(z_side) + 1, 0);
    std::size_t xi_points = 1;
    for (std::size_t i = 0; i < ell; ++i) {
        xi_points *= static_cast<std::size_t>(2 * xi_side + 1);
    }
    const double se = params.sqrt_eta();
    auto covered = [&](double z) {
        for (const auto& h : holes) {
            if (z >= h.interval.z_minus - 1e-12 && z <= h.interval.z_plus + 1e-12) {
                return true;
            }
        }
        return false;
    };
    parallel_for(static_cast<std::size_t>(z_side) + 1, 4, [&](std::size_t begin, std::size_t end) {
        std::vector<double> xi(ell);
        for (std::size_t k = begin; k < end; ++k) {
            const double z = params.z_min + (params.z_max - params.z_min) * static_cast<double>(k) / z_side;
            const bool in_listed = covered(z);
            for (std::size_t q = 0; q < xi_points; ++q) {
                std::size_t rest = q;
                for (std::size_t i = 0; i < ell; ++i) {
                    const auto idx = static_cast<int>(rest % static_cast<std::size_t>(2 * xi_side + 1));
                    rest /= static_cast<std::size_t>(2 * xi_side + 1);
                    xi[i] = xi_extent * (idx - xi_side) / xi_side;
                }
                ++seen[k];
                if (phi_rescaled(params, xi, z) < 0.0 && !(in_listed && inside_hole(params, xi, z))) {
                    ++bad[k];
                }
            }
            // raw grid at this height, excluding the axis (covered above)
            for (int r = 1; r <= 16; ++r) {
                for (std::size_t a = 0; a < dirs.vertex_count(); ++a) {
                    std::vector<double> X(ell);
                    const auto w = dirs.vertex(a);
                    for (std::size_t i = 0; i < ell; ++i) {
                        X[i] = sigma * r / 16.0 * w[i];
                    }
                    ++seen[k];
                    if (eval_phi(params, X, z) < 0.0) {
                        std::vector<double> xr(ell);
                        for (std::size_t i = 0; i < ell; ++i) {
                            xr[i] = se > 0.0 ? X[i] / se : std::numeric_limits<double>::infinity();
                        }
                        if (!(in_listed && inside_hole(params, xr, z))) {
                            ++bad[k];
                        }
                    }
                }
            }
        }
    });
    std::int64_t bad_total = 0;
    for (std::size_t k = 0; k < bad.size(); ++k) {
        bad_total += bad[k];
        rep.scan_points += seen[k];
    }
    rep.scan_ok = bad_total == 0;
    if (!rep.scan_ok) {
        rep.violations.push_back("sign scan: " + std::to_string(bad_total) +
                                 " points with Phi < 0 outside every hole");
    }
    return rep;
}

void write_hole_curves_csv(std::ostream& os, const std::vector<HoleDescriptor>& holes)
{
    os << "j,vertex_order,xi_1,z\n";
    os.precision(17);
    for (const auto& h : holes) {
        const SimplicialMesh& b = h.boundary;
        if (b.ambient_dim != 2 || b.dim != 1) {
            throw FormatError("curve export needs ell = 1 hole boundaries");
        }
        std::map<int, int> next;
        for (const Simplex& e : b.simplices) {
            next[e[0]] = e[1];
        }
        int v = 0;
        int order = 0;
        do {
            const auto x = b.vertex(static_cast<std::size_t>(v));
            os << h.interval.j << ',' << order++ << ',' << x[0] << ',' << x[1] << '\n';
            const auto it = next.find(v);
            if (it == next.end()) {
                throw StructuralError("hole boundary is not a closed curve");
            }
            v = it->second;
            if (order > static_cast<int>(b.vertex_count())) {
                throw StructuralError("hole boundary is not a single closed curve");
            }
        } while (v != 0);
        if (order != static_cast<int>(b.vertex_count())) {
            throw StructuralError("hole boundary is not a single closed curve");
        }
        const auto x = b.vertex(0);
        os << h.interval.j << ',' << order << ',' << x[0] << ',' << x[1] << '\n';
    }
}

} // namespace nodalcert

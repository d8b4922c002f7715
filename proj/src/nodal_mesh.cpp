#include "nodalcert/nodal_mesh.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>
#include <utility>

namespace nodalcert {

namespace {

constexpr int kMinZCellsPerHalfPeriod = 8;
constexpr double kMinXiRadius = 1.5; // hole radius is about 1
constexpr int kFlowSteps = 32;
constexpr int kMaxNewton = 20;

// Freudenthal simplex of a unit cube: start at the base corner and step along
// axes perm[0], perm[1], ...; sign is the orientation of that simplex.
struct KuhnPath {
    std::vector<int> perm;
    int sign = 1;
};

std::vector<KuhnPath> kuhn_paths(int d)
{
    std::vector<int> p(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        p[static_cast<std::size_t>(i)] = i;
    }
    std::vector<KuhnPath> out;
    do {
        out.push_back({p, permutation_sign(p)});
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Vertex of a clipped simplex: i == j is an original vertex, otherwise the
// zero on the edge from positive vertex i to negative vertex j.
struct PVert {
    int i = 0;
    int j = 0;
    bool operator==(const PVert&) const = default;
};

// Pulling triangulation of {f >= 0} within one simplex and of its cut face
// {f = 0}.  Pulling at the globally smallest vertex key makes triangulations
// of shared faces agree between neighbouring simplices.
class SimplexClipper {
public:
    SimplexClipper(int d, const std::uint64_t* gid, const bool* pos) : d_(d), gid_(gid), pos_(pos) {}

    std::vector<std::vector<PVert>> body() const { return triangulate(full_mask(), false); }
    std::vector<std::vector<PVert>> cut_face() const { return triangulate(full_mask(), true); }

private:
    unsigned full_mask() const { return (1U << (d_ + 1)) - 1U; }

    std::pair<std::uint64_t, std::uint64_t> key(const PVert& v) const
    {
        const std::uint64_t a = gid_[v.i];
        const std::uint64_t b = gid_[v.j];
        return {std::min(a, b), std::max(a, b)};
    }

    bool has_pos(unsigned mask) const
    {
        for (int i = 0; i <= d_; ++i) {
            if ((mask >> i & 1U) && pos_[i]) {
                return true;
            }
        }
        return false;
    }

    bool has_neg(unsigned mask) const
    {
        for (int i = 0; i <= d_; ++i) {
            if ((mask >> i & 1U) && !pos_[i]) {
                return true;
            }
        }
        return false;
    }

    std::vector<PVert> verts(unsigned mask, bool cut) const
    {
        std::vector<PVert> out;
        if (!cut) {
            for (int i = 0; i <= d_; ++i) {
                if ((mask >> i & 1U) && pos_[i]) {
                    out.push_back({i, i});
                }
            }
        }
        for (int i = 0; i <= d_; ++i) {
            if (!(mask >> i & 1U) || !pos_[i]) {
                continue;
            }
            for (int j = 0; j <= d_; ++j) {
                if ((mask >> j & 1U) && !pos_[j]) {
                    out.push_back({i, j});
                }
            }
        }
        return out;
    }

    std::vector<std::pair<unsigned, bool>> facets(unsigned mask, bool cut) const
    {
        std::vector<std::pair<unsigned, bool>> out;
        for (int i = 0; i <= d_; ++i) {
            if (!(mask >> i & 1U)) {
                continue;
            }
            const unsigned sub = mask & ~(1U << i);
            if (cut ? (has_pos(sub) && has_neg(sub)) : (sub != 0 && has_pos(sub))) {
                out.emplace_back(sub, cut);
            }
        }
        if (!cut && has_neg(mask)) {
            out.emplace_back(mask, true);
        }
        return out;
    }

    std::vector<std::vector<PVert>> triangulate(unsigned mask, bool cut) const
    {
        const auto vs = verts(mask, cut);
        const int dim = std::popcount(mask) - 1 - (cut ? 1 : 0);
        if (dim == 0) {
            return {vs};
        }
        const PVert apex = *std::min_element(vs.begin(), vs.end(),
                                             [&](const PVert& a, const PVert& b) { return key(a) < key(b); });
        std::vector<std::vector<PVert>> out;
        for (const auto& [sub, sub_cut] : facets(mask, cut)) {
            const auto fv = verts(sub, sub_cut);
            if (std::find(fv.begin(), fv.end(), apex) != fv.end()) {
                continue;
            }
            for (auto& tau : triangulate(sub, sub_cut)) {
                tau.insert(tau.begin(), apex);
                out.push_back(std::move(tau));
            }
        }
        return out;
    }

    int d_;
    const std::uint64_t* gid_;
    const bool* pos_;
};

// Regular grid over a box; axis a has n[a] cells on [lo[a], hi[a]].
struct Grid {
    std::vector<int> n;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<std::uint64_t> stride;
    std::uint64_t size = 0;

    Grid(std::vector<int> cells, std::vector<double> lower, std::vector<double> upper)
        : n(std::move(cells)), lo(std::move(lower)), hi(std::move(upper))
    {
        std::uint64_t s = 1;
        for (int c : n) {
            stride.push_back(s);
            s *= static_cast<std::uint64_t>(c) + 1;
        }
        size = s;
    }

    int dim() const { return static_cast<int>(n.size()); }

    void point(std::uint64_t g, double* out) const
    {
        for (std::size_t a = 0; a < n.size(); ++a) {
            const auto idx = static_cast<int>(g / stride[a] % (static_cast<std::uint64_t>(n[a]) + 1));
            out[a] = idx == n[a] ? hi[a] : lo[a] + (hi[a] - lo[a]) * idx / n[a];
        }
    }

    std::uint64_t cell_count() const
    {
        std::uint64_t c = 1;
        for (int v : n) {
            c *= static_cast<std::uint64_t>(v);
        }
        return c;
    }

    std::uint64_t cell_base(std::uint64_t cell) const
    {
        std::uint64_t g = 0;
        for (std::size_t a = 0; a < n.size(); ++a) {
            g += (cell % static_cast<std::uint64_t>(n[a])) * stride[a];
            cell /= static_cast<std::uint64_t>(n[a]);
        }
        return g;
    }
};

// Zero of f on the segment from a (f >= 0) to b (f < 0) by bisection to
// machine precision; returns the parameter with the smaller |f|.
template <class F>
double edge_root(const F& f, const double* a, const double* b, int d)
{
    std::vector<double> p(static_cast<std::size_t>(d));
    auto at = [&](double t) {
        for (int i = 0; i < d; ++i) {
            p[static_cast<std::size_t>(i)] = a[i] + t * (b[i] - a[i]);
        }
        return f(p.data());
    };
    double lo = 0.0;
    double hi = 1.0;
    double f_lo = at(lo);
    double f_hi = at(hi);
    if (f_lo == 0.0) {
        return 0.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = at(mid);
        if (fm == 0.0) {
            return mid;
        }
        if (fm > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

WindowSpec resolve_window(const FamilyParams& params, const WindowSpec& in)
{
    WindowSpec w = in;
    const WindowSpec def = default_window(params, in.xi_radius);
    if (w.n_xi == 0) {
        w.n_xi = def.n_xi;
    }
    if (w.n_z == 0) {
        w.n_z = def.n_z;
    }
    if (!(w.xi_radius > kMinXiRadius) || !std::isfinite(w.xi_radius)) {
        throw ParameterError("xi_radius must exceed 1.5 so that the window covers the holes");
    }
    if (!(w.z_min >= -kZWindow && w.z_max <= kZWindow && w.z_min < w.z_max)) {
        throw ParameterError("z range must be a nonempty subinterval of [-1/4, 1/4]");
    }
    if (w.n_xi < 4 || w.n_xi % 2 != 0) {
        throw ParameterError("n_xi must be even and at least 4");
    }
    if (w.n_z < 1) {
        throw ParameterError("n_z must be positive");
    }
    // cells per half period pi/lambda over the window length
    const double half_periods = (w.z_max - w.z_min) * params.lambda / std::numbers::pi;
    if (w.n_z < kMinZCellsPerHalfPeriod * half_periods - 1e-9) {
        throw ResolutionError("n_z below 8 cells per half period (n_z >= 32m on the full window)");
    }
    return w;
}

Grid domain_grid(const FamilyParams& params, const WindowSpec& w)
{
    std::vector<int> n(static_cast<std::size_t>(params.ell), w.n_xi);
    std::vector<double> lo(static_cast<std::size_t>(params.ell), -w.xi_radius);
    std::vector<double> hi(static_cast<std::size_t>(params.ell), w.xi_radius);
    n.push_back(w.n_z);
    lo.push_back(w.z_min);
    hi.push_back(w.z_max);
    return Grid(n, lo, hi);
}

double phi_at(const FamilyParams& params, const double* q)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    return phi_rescaled(params, std::span<const double>(q, ell), q[ell]);
}

double u_at(const FamilyParams& params, const double* q)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    return phi_rescaled(params, std::span<const double>(q, ell), q[ell + 1]) -
           params.ell * q[ell] * q[ell];
}

std::vector<double> grid_values(const Grid& grid, const std::function<double(const double*)>& f)
{
    std::vector<double> values(grid.size);
    parallel_for(grid.size, 4096, [&](std::size_t begin, std::size_t end) {
        std::vector<double> q(static_cast<std::size_t>(grid.dim()));
        for (std::size_t g = begin; g < end; ++g) {
            grid.point(g, q.data());
            values[g] = f(q.data());
        }
    });
    return values;
}

double det_sign(const std::vector<std::vector<double>>& pts)
{
    const auto d = static_cast<int>(pts.size()) - 1;
    std::vector<double> a(static_cast<std::size_t>(d * d));
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            a[static_cast<std::size_t>(r * d + c)] =
                pts[static_cast<std::size_t>(r + 1)][static_cast<std::size_t>(c)] - pts[0][static_cast<std::size_t>(c)];
        }
    }
    return small_det(a, d);
}

// Edge zeros shared between neighbouring simplices.
struct CutTable {
    std::unordered_map<std::uint64_t, int> index;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges; // (positive, negative)

    int get(std::uint64_t a, std::uint64_t b, std::uint64_t grid_size)
    {
        const std::uint64_t k = std::min(a, b) * grid_size + std::max(a, b);
        const auto [it, fresh] = index.emplace(k, static_cast<int>(edges.size()));
        if (fresh) {
            edges.emplace_back(a, b);
        }
        return it->second;
    }
};

std::vector<double> cut_points(const Grid& grid, const CutTable& cuts,
                               const std::function<double(const double*)>& f)
{
    const int d = grid.dim();
    std::vector<double> out(cuts.edges.size() * static_cast<std::size_t>(d));
    parallel_for(cuts.edges.size(), 256, [&](std::size_t begin, std::size_t end) {
        std::vector<double> a(static_cast<std::size_t>(d));
        std::vector<double> b(static_cast<std::size_t>(d));
        for (std::size_t c = begin; c < end; ++c) {
            grid.point(cuts.edges[c].first, a.data());
            grid.point(cuts.edges[c].second, b.data());
            const double t = edge_root(f, a.data(), b.data(), d);
            for (int i = 0; i < d; ++i) {
                out[c * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] =
                    a[static_cast<std::size_t>(i)] + t * (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]);
            }
        }
    });
    return out;
}

} // namespace

WindowSpec default_window(const FamilyParams& params, double xi_radius)
{
    WindowSpec w;
    w.xi_radius = xi_radius;
    w.n_xi = params.ell == 1 ? 32 : (params.ell == 2 ? 16 : 8);
    w.n_z = (params.ell == 1 ? 72 : 36) * params.m;
    return w;
}

WindowSpec refined(const WindowSpec& w)
{
    WindowSpec r = w;
    r.n_xi *= 2;
    r.n_z *= 2;
    return r;
}

SimplicialMesh mesh_nodal_set(const FamilyParams& params, const WindowSpec& window)
{
    const WindowSpec w = resolve_window(params, window);
    const int ell = params.ell;
    const int d = ell + 1;
    const Grid grid = domain_grid(params, w);
    auto f = [&](const double* q) { return phi_at(params, q); };
    const std::vector<double> values = grid_values(grid, f);

    const auto paths = kuhn_paths(d);
    const std::uint64_t G = grid.size;
    CutTable cuts;
    std::vector<char> used(G, 0);
    // domain simplices: ids < G are grid vertices, G + c the zero on cut edge c
    std::vector<std::uint64_t> dom;

    std::vector<std::uint64_t> gid(static_cast<std::size_t>(d) + 1);
    bool pos[8];
    std::vector<std::vector<double>> local(static_cast<std::size_t>(d) + 1, std::vector<double>(static_cast<std::size_t>(d)));
    const std::uint64_t n_cells = grid.cell_count();
    const unsigned corners = 1U << d;
    for (std::uint64_t cell = 0; cell < n_cells; ++cell) {
        const std::uint64_t base = grid.cell_base(cell);
        bool all_pos = true;
        bool all_neg = true;
        for (unsigned c = 0; c < corners; ++c) {
            std::uint64_t g = base;
            for (int a = 0; a < d; ++a) {
                if (c >> a & 1U) {
                    g += grid.stride[static_cast<std::size_t>(a)];
                }
            }
            (values[g] >= 0.0 ? all_neg : all_pos) = false;
        }
        if (all_neg) {
            continue;
        }
        for (const auto& path : paths) {
            gid[0] = base;
            std::fill(local[0].begin(), local[0].end(), 0.0);
            for (int k = 0; k < d; ++k) {
                const int axis = path.perm[static_cast<std::size_t>(k)];
                gid[static_cast<std::size_t>(k) + 1] = gid[static_cast<std::size_t>(k)] + grid.stride[static_cast<std::size_t>(axis)];
                local[static_cast<std::size_t>(k) + 1] = local[static_cast<std::size_t>(k)];
                local[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(axis)] = 1.0;
            }
            int n_pos = 0;
            for (int k = 0; k <= d; ++k) {
                pos[k] = values[gid[static_cast<std::size_t>(k)]] >= 0.0;
                n_pos += pos[k] ? 1 : 0;
            }
            if (n_pos == 0) {
                continue;
            }
            if (all_pos || n_pos == d + 1) {
                const std::size_t at = dom.size();
                for (int k = 0; k <= d; ++k) {
                    dom.push_back(gid[static_cast<std::size_t>(k)]);
                    used[gid[static_cast<std::size_t>(k)]] = 1;
                }
                if (path.sign < 0) {
                    std::swap(dom[at], dom[at + 1]);
                }
                continue;
            }
            const SimplexClipper clip(d, gid.data(), pos);
            for (const auto& simplex : clip.body()) {
                std::vector<std::vector<double>> pts;
                const std::size_t at = dom.size();
                for (const PVert& v : simplex) {
                    if (v.i == v.j) {
                        dom.push_back(gid[static_cast<std::size_t>(v.i)]);
                        used[gid[static_cast<std::size_t>(v.i)]] = 1;
                        pts.push_back(local[static_cast<std::size_t>(v.i)]);
                    } else {
                        const std::uint64_t ga = gid[static_cast<std::size_t>(v.i)];
                        const std::uint64_t gb = gid[static_cast<std::size_t>(v.j)];
                        dom.push_back(G + static_cast<std::uint64_t>(cuts.get(ga, gb, G)));
                        // a grid zero is a positive vertex; any positive stand-in
                        // realizes the same clipped polytope
                        const double fa = values[ga] == 0.0 ? 1.0 : values[ga];
                        const double t = fa / (fa - values[gb]);
                        std::vector<double> p(static_cast<std::size_t>(d));
                        for (int a = 0; a < d; ++a) {
                            const auto ua = static_cast<std::size_t>(a);
                            p[ua] = local[static_cast<std::size_t>(v.i)][ua] +
                                    t * (local[static_cast<std::size_t>(v.j)][ua] - local[static_cast<std::size_t>(v.i)][ua]);
                        }
                        pts.push_back(std::move(p));
                    }
                }
                if (det_sign(pts) < 0.0) {
                    std::swap(dom[at], dom[at + 1]);
                }
            }
        }
    }

    const std::vector<double> cut_xyz = cut_points(grid, cuts, f);

    SimplicialMesh mesh;
    mesh.ambient_dim = ell + 2;
    mesh.dim = ell + 1;
    std::vector<int> upper(G, -1);
    std::vector<int> lower(G, -1);
    std::vector<double> x(static_cast<std::size_t>(ell) + 2);
    std::vector<double> q(static_cast<std::size_t>(d));
    auto lift = [&](const double* p, double ups) {
        for (int a = 0; a < ell; ++a) {
            x[static_cast<std::size_t>(a)] = p[a];
        }
        x[static_cast<std::size_t>(ell)] = ups;
        x[static_cast<std::size_t>(ell) + 1] = p[ell];
    };
    for (std::uint64_t g = 0; g < G; ++g) {
        if (!used[g]) {
            continue;
        }
        grid.point(g, q.data());
        // a grid zero counts as positive: its two lifts coincide but stay
        // distinct vertices, and the adjacent cut vertices sit on top of it
        const double ups = std::sqrt(values[g] / ell);
        lift(q.data(), ups);
        upper[g] = mesh.add_vertex(x, VertexLabel::upper);
        lift(q.data(), -ups);
        lower[g] = mesh.add_vertex(x, VertexLabel::lower);
    }
    std::vector<int> branch(cuts.edges.size());
    for (std::size_t c = 0; c < cuts.edges.size(); ++c) {
        lift(&cut_xyz[c * static_cast<std::size_t>(d)], 0.0);
        branch[c] = mesh.add_vertex(x, VertexLabel::branch);
    }

    const std::size_t n_dom = dom.size() / static_cast<std::size_t>(d + 1);
    mesh.simplices.reserve(2 * n_dom);
    for (int sheet = 0; sheet < 2; ++sheet) {
        const auto& ids = sheet == 0 ? upper : lower;
        for (std::size_t s = 0; s < n_dom; ++s) {
            Simplex simplex(static_cast<std::size_t>(d) + 1);
            for (int k = 0; k <= d; ++k) {
                const std::uint64_t v = dom[s * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(k)];
                simplex[static_cast<std::size_t>(k)] = v < G ? ids[v] : branch[v - G];
            }
            if (sheet == 1) {
                std::swap(simplex[0], simplex[1]);
            }
            mesh.simplices.push_back(std::move(simplex));
        }
    }
    return mesh;
}

SimplicialMesh mesh_sign_oracle(const FamilyParams& params, const WindowSpec& window)
{
    const WindowSpec w = resolve_window(params, window);
    const int ell = params.ell;
    const int d = ell + 2;
    // |ups| on the nodal set is at most sqrt(max Phi~ / ell)
    const double phi_max = ell * w.xi_radius * w.xi_radius + std::exp(params.kappa() * w.xi_radius);
    const double h = 2.0 * w.xi_radius / w.n_xi;
    const int half = static_cast<int>(std::ceil(std::sqrt(phi_max / ell) / h)) + 2;
    std::vector<int> n(static_cast<std::size_t>(ell), w.n_xi);
    std::vector<double> lo(static_cast<std::size_t>(ell), -w.xi_radius);
    std::vector<double> hi(static_cast<std::size_t>(ell), w.xi_radius);
    n.push_back(2 * half);
    lo.push_back(-half * h);
    hi.push_back(half * h);
    n.push_back(w.n_z);
    lo.push_back(w.z_min);
    hi.push_back(w.z_max);
    const Grid grid(n, lo, hi);
    auto f = [&](const double* q) { return u_at(params, q); };
    const std::vector<double> values = grid_values(grid, f);

    const auto paths = kuhn_paths(d);
    CutTable cuts;
    std::vector<int> faces;
    std::vector<std::uint64_t> gid(static_cast<std::size_t>(d) + 1);
    bool pos[8];
    const std::uint64_t n_cells = grid.cell_count();
    const unsigned corners = 1U << d;
    for (std::uint64_t cell = 0; cell < n_cells; ++cell) {
        const std::uint64_t base = grid.cell_base(cell);
        bool any_pos = false;
        bool any_neg = false;
        for (unsigned c = 0; c < corners; ++c) {
            std::uint64_t g = base;
            for (int a = 0; a < d; ++a) {
                if (c >> a & 1U) {
                    g += grid.stride[static_cast<std::size_t>(a)];
                }
            }
            (values[g] >= 0.0 ? any_pos : any_neg) = true;
        }
        if (!any_pos || !any_neg) {
            continue;
        }
        for (const auto& path : paths) {
            gid[0] = base;
            for (int k = 0; k < d; ++k) {
                gid[static_cast<std::size_t>(k) + 1] =
                    gid[static_cast<std::size_t>(k)] + grid.stride[static_cast<std::size_t>(path.perm[static_cast<std::size_t>(k)])];
            }
            int n_pos = 0;
            for (int k = 0; k <= d; ++k) {
                pos[k] = values[gid[static_cast<std::size_t>(k)]] >= 0.0;
                n_pos += pos[k] ? 1 : 0;
            }
            if (n_pos == 0 || n_pos == d + 1) {
                continue;
            }
            const SimplexClipper clip(d, gid.data(), pos);
            for (const auto& simplex : clip.cut_face()) {
                for (const PVert& v : simplex) {
                    faces.push_back(cuts.get(gid[static_cast<std::size_t>(v.i)], gid[static_cast<std::size_t>(v.j)], grid.size));
                }
            }
        }
    }
    const std::vector<double> xyz = cut_points(grid, cuts, f);
    SimplicialMesh mesh;
    mesh.ambient_dim = d;
    mesh.dim = d - 1;
    mesh.coords = xyz;
    mesh.labels.assign(cuts.edges.size(), VertexLabel::none);
    for (std::size_t s = 0; s < faces.size(); s += static_cast<std::size_t>(d)) {
        mesh.simplices.emplace_back(faces.begin() + static_cast<long>(s), faces.begin() + static_cast<long>(s) + d);
    }
    return mesh;
}

NodalVertexReport check_nodal_vertices(const FamilyParams& params, const SimplicialMesh& mesh)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    if (mesh.ambient_dim != params.ell + 2) {
        throw ParameterError("nodal mesh must live in (xi, ups, z)-space");
    }
    const std::size_t nv = mesh.vertex_count();
    std::vector<double> residual(nv, 0.0);
    std::vector<double> raw(nv, 0.0);
    std::vector<double> scaled(nv, 0.0);
    parallel_for(nv, 1024, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const auto x = mesh.vertex(v);
            residual[v] = std::abs(u_at(params, x.data()));
            const auto g = raw_gradient_norm(params, x.first(ell), x[ell], x[ell + 1]);
            raw[v] = g.raw;
            scaled[v] = g.scaled;
        }
    });
    NodalVertexReport rep;
    rep.vertex_count = nv;
    rep.min_raw_gradient = nv == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    rep.min_scaled_gradient = rep.min_raw_gradient;
    for (std::size_t v = 0; v < nv; ++v) {
        rep.max_residual = std::max(rep.max_residual, residual[v]);
        rep.min_raw_gradient = std::min(rep.min_raw_gradient, raw[v]);
        rep.min_scaled_gradient = std::min(rep.min_scaled_gradient, scaled[v]);
        if (!mesh.labels.empty() && mesh.labels[v] == VertexLabel::branch) {
            rep.max_branch_upsilon = std::max(rep.max_branch_upsilon, std::abs(mesh.vertex(v)[ell]));
        }
    }
    return rep;
}

std::int64_t interior_face_defects(const SimplicialMesh& mesh, const WindowSpec& window)
{
    const int ell = mesh.ambient_dim - 2;
    std::map<Simplex, int> count;
    for (const auto& s : mesh.simplices) {
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            Simplex f;
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (k != drop) {
                    f.push_back(s[k]);
                }
            }
            std::sort(f.begin(), f.end());
            ++count[f];
        }
    }
    auto on_wall = [&](const Simplex& f) {
        const double tol_xi = 1e-12 * window.xi_radius;
        for (int a = 0; a < ell; ++a) {
            for (double side : {-window.xi_radius, window.xi_radius}) {
                bool all = true;
                for (int v : f) {
                    all = all && std::abs(mesh.vertex(static_cast<std::size_t>(v))[static_cast<std::size_t>(a)] - side) <= tol_xi;
                }
                if (all) {
                    return true;
                }
            }
        }
        for (double side : {window.z_min, window.z_max}) {
            bool all = true;
            for (int v : f) {
                all = all && std::abs(mesh.vertex(static_cast<std::size_t>(v))[static_cast<std::size_t>(ell) + 1] - side) <= 1e-15;
            }
            if (all) {
                return true;
            }
        }
        return false;
    };
    std::int64_t defects = 0;
    for (const auto& [f, c] : count) {
        if (c != 2 && !on_wall(f)) {
            ++defects;
        }
    }
    return defects;
}

std::vector<SimplicialMesh> extract_gamma_cycles(const FamilyParams& params,
                                                 const std::vector<HoleDescriptor>& holes)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    std::vector<SimplicialMesh> out;
    out.reserve(holes.size());
    for (const auto& h : holes) {
        if (h.boundary.ambient_dim != params.ell + 1) {
            throw ParameterError("hole boundary does not match ell");
        }
        SimplicialMesh g;
        g.ambient_dim = params.ell + 2;
        g.dim = params.ell;
        std::vector<double> x(ell + 2);
        for (std::size_t v = 0; v < h.boundary.vertex_count(); ++v) {
            const auto p = h.boundary.vertex(v);
            std::copy(p.begin(), p.begin() + static_cast<long>(ell), x.begin());
            x[ell] = 0.0;
            x[ell + 1] = p[ell];
            g.add_vertex(x, VertexLabel::gamma);
        }
        g.simplices = h.boundary.simplices;
        out.push_back(std::move(g));
    }
    return out;
}

GammaReport check_gamma_cycle(const FamilyParams& params, const SimplicialMesh& gamma)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    GammaReport rep;
    std::map<Simplex, int> parity;
    for (const auto& s : gamma.simplices) {
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            Simplex f;
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (k != drop) {
                    f.push_back(s[k]);
                }
            }
            std::sort(f.begin(), f.end());
            parity[f] ^= 1;
        }
    }
    rep.closed = !gamma.simplices.empty();
    for (const auto& [f, p] : parity) {
        rep.closed = rep.closed && p == 0;
    }
    const double se = params.sqrt_eta();
    for (std::size_t v = 0; v < gamma.vertex_count(); ++v) {
        const auto x = gamma.vertex(v);
        rep.max_residual = std::max(rep.max_residual, std::abs(u_at(params, x.data())));
        double r2 = 0.0;
        for (std::size_t a = 0; a <= ell; ++a) {
            r2 += (se * x[a]) * (se * x[a]);
        }
        r2 += x[ell + 1] * x[ell + 1];
        rep.max_raw_radius2 = std::max(rep.max_raw_radius2, r2);
    }
    const double bound = params.sigma * params.sigma + kZWindow * kZWindow;
    rep.contained = rep.max_raw_radius2 <= bound && bound < 0.25;
    return rep;
}

double min_witness_depth(const FamilyParams& params, const std::vector<HoleDescriptor>& holes)
{
    if (holes.empty()) {
        throw DependencyError("no holes to take witnesses from");
    }
    const auto ell = static_cast<std::size_t>(params.ell);
    double a = std::numeric_limits<double>::infinity();
    for (const auto& h : holes) {
        a = std::min(a, -phi_rescaled(params, std::span<const double>(h.witness).first(ell), h.witness[ell]));
    }
    return a;
}

namespace {

// Moves x (in (xi, ups, z)) onto side * u~ = sqrt(theta^2 - eps^2 |V|^2):
// RK4 along side * grad u~ / |grad u~|^2 taken in the metric of
// (xi, ups, lambda z), on which u~ grows at unit rate, then Newton steps
// along the same field.
std::vector<double> push_to_level(const FamilyParams& params, std::span<const double> x, int side,
                                  double eps, double theta, double* residual)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    const std::size_t dim = ell + 2;
    const double eta = std::exp(params.log_eta);
    // metric of (xi, ups, lambda z), in which the level sets are O(1) round
    std::vector<double> weight(dim, 1.0);
    weight[ell + 1] = 1.0 / (params.lambda * params.lambda);
    auto field = [&](const std::vector<double>& q, std::vector<double>& dir) {
        const auto ev = eval_u_rescaled_full(params, std::span<const double>(q).first(ell), q[ell], q[ell + 1]);
        double g2 = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            g2 += weight[a] * ev.gradient[a] * ev.gradient[a];
        }
        if (!(g2 > 0.0)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "vanishing gradient near (%.6g, ..., %.6g, %.6g)", q[0], q[ell],
                          q[ell + 1]);
            throw NumericalError(buf);
        }
        for (std::size_t a = 0; a < dim; ++a) {
            dir[a] = weight[a] * ev.gradient[a] / g2;
        }
        return ev.value;
    };
    auto radius2 = [&](const std::vector<double>& q) {
        double r = 0.0;
        for (std::size_t a = 0; a <= ell; ++a) {
            r += q[a] * q[a];
        }
        return eta * r + q[ell + 1] * q[ell + 1];
    };

    std::vector<double> p(x.begin(), x.end());
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const double h = side * theta / kFlowSteps;
    for (int step = 0; step < kFlowSteps; ++step) {
        field(p, k1);
        for (std::size_t a = 0; a < dim; ++a) {
            tmp[a] = p[a] + 0.5 * h * k1[a];
        }
        field(tmp, k2);
        for (std::size_t a = 0; a < dim; ++a) {
            tmp[a] = p[a] + 0.5 * h * k2[a];
        }
        field(tmp, k3);
        for (std::size_t a = 0; a < dim; ++a) {
            tmp[a] = p[a] + h * k3[a];
        }
        field(tmp, k4);
        for (std::size_t a = 0; a < dim; ++a) {
            p[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_p = p;
    for (int it = 0; it < kMaxNewton; ++it) {
        const double u = field(p, k1);
        const double target = side * std::sqrt(std::max(0.0, theta * theta - eps * eps * radius2(p)));
        const double r = std::abs(u * u + eps * eps * radius2(p) - theta * theta);
        if (r < best) {
            best = r;
            best_p = p;
        } else {
            break;
        }
        for (std::size_t a = 0; a < dim; ++a) {
            p[a] += (target - u) * k1[a];
        }
    }
    *residual = best;
    return best_p;
}

SimplicialMesh push_mesh(const FamilyParams& params, const SimplicialMesh& mesh, int side, double eps,
                         double theta, double* max_residual)
{
    SimplicialMesh out;
    out.ambient_dim = mesh.ambient_dim;
    out.dim = mesh.dim;
    out.simplices = mesh.simplices;
    out.labels = mesh.labels;
    const std::size_t nv = mesh.vertex_count();
    out.coords.resize(mesh.coords.size());
    std::vector<double> res(nv, 0.0);
    const auto a = static_cast<std::size_t>(mesh.ambient_dim);
    parallel_for(nv, 512, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
            const auto p = push_to_level(params, mesh.vertex(v), side, eps, theta, &res[v]);
            std::copy(p.begin(), p.end(), out.coords.begin() + static_cast<long>(v * a));
        }
    });
    for (double r : res) {
        *max_residual = std::max(*max_residual, r);
    }
    return out;
}

} // namespace

RegularizedLevelSet mesh_regularized_level_set(const FamilyParams& params, double eps, double theta,
                                               const SimplicialMesh& nodal,
                                               const std::vector<HoleDescriptor>& holes)
{
    const auto ell = static_cast<std::size_t>(params.ell);
    RegularizedLevelSet out;
    out.a_m = min_witness_depth(params, holes);
    out.eps = eps;
    out.theta = theta;
    if (!(theta > 0.0 && theta < out.a_m / 2.0)) {
        throw ParameterError("theta must lie in (0, a_m / 2)");
    }
    if (!(eps > 0.0 && eps <= theta / 100.0)) {
        throw ParameterError("eps must lie in (0, theta / 100]");
    }
    if (nodal.ambient_dim != params.ell + 2) {
        throw ParameterError("nodal mesh must live in (xi, ups, z)-space");
    }

    const SimplicialMesh plus = push_mesh(params, nodal, 1, eps, theta, &out.max_residual);
    const SimplicialMesh minus = push_mesh(params, nodal, -1, eps, theta, &out.max_residual);
    out.sigma.ambient_dim = nodal.ambient_dim;
    out.sigma.dim = nodal.dim;
    out.sigma.coords = plus.coords;
    out.sigma.coords.insert(out.sigma.coords.end(), minus.coords.begin(), minus.coords.end());
    out.sigma.labels = plus.labels;
    out.sigma.labels.insert(out.sigma.labels.end(), minus.labels.begin(), minus.labels.end());
    out.sigma.simplices = plus.simplices;
    const auto offset = static_cast<int>(nodal.vertex_count());
    for (Simplex s : minus.simplices) {
        for (int& v : s) {
            v += offset;
        }
        out.sigma.simplices.push_back(std::move(s));
    }

    for (const auto& g : extract_gamma_cycles(params, holes)) {
        out.cycles_plus.push_back(push_mesh(params, g, 1, eps, theta, &out.max_residual));
        out.cycles_minus.push_back(push_mesh(params, g, -1, eps, theta, &out.max_residual));
    }

    out.min_witness_distance = std::numeric_limits<double>::infinity();
    auto scan = [&](const SimplicialMesh& m) {
        for (std::size_t v = 0; v < m.vertex_count(); ++v) {
            const auto x = m.vertex(v);
            out.max_abs_u = std::max(out.max_abs_u, std::abs(u_at(params, x.data())));
            for (const auto& h : holes) {
                double d2 = 0.0;
                for (std::size_t a = 0; a < ell; ++a) {
                    d2 += (x[a] - h.witness[a]) * (x[a] - h.witness[a]);
                }
                d2 += (x[ell + 1] - h.witness[ell]) * (x[ell + 1] - h.witness[ell]);
                out.min_witness_distance = std::min(out.min_witness_distance, std::sqrt(d2));
            }
        }
    };
    scan(out.sigma);
    for (const auto& c : out.cycles_plus) {
        scan(c);
    }
    for (const auto& c : out.cycles_minus) {
        scan(c);
    }
    return out;
}

} // namespace nodalcert

#include "nodalcert/homology.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nodalcert {

namespace {

std::vector<int> symmetric_difference(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Column reduction; columns listed in `skip` are known to reduce to zero.
// Returns the rank and fills pivot_rows with the pivots found.
std::int64_t reduce(const BoundaryMatrix& m, const std::vector<char>* skip, std::vector<int>* pivot_rows)
{
    std::vector<int> pivot_col(m.rows, -1);
    std::vector<std::vector<int>> reduced(m.columns.size());
    std::int64_t rank = 0;
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
        if (skip != nullptr && (*skip)[j]) {
            continue;
        }
        std::vector<int> col = m.columns[j];
        while (!col.empty()) {
            const int low = col.back();
            const int p = pivot_col[static_cast<std::size_t>(low)];
            if (p < 0) {
                pivot_col[static_cast<std::size_t>(low)] = static_cast<int>(j);
                ++rank;
                if (pivot_rows != nullptr) {
                    pivot_rows->push_back(low);
                }
                break;
            }
            col = symmetric_difference(col, reduced[static_cast<std::size_t>(p)]);
        }
        reduced[j] = std::move(col);
    }
    return rank;
}

std::vector<std::vector<Simplex>> normalized(const std::vector<std::vector<Simplex>>& complex)
{
    auto out = complex;
    for (auto& level : out) {
        for (auto& s : level) {
            std::sort(s.begin(), s.end());
        }
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
    }
    while (!out.empty() && out.back().empty()) {
        out.pop_back();
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Solves the small symmetric positive system a x = b in place (Gaussian
// elimination with partial pivoting); returns false when singular.
bool solve_small(std::vector<double>& a, std::vector<double>& b, std::size_t n)
{
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) {
                piv = r;
            }
        }
        if (a[piv * n + c] == 0.0) {
            return false;
        }
        if (piv != c) {
            for (std::size_t q = 0; q < n; ++q) {
                std::swap(a[c * n + q], a[piv * n + q]);
            }
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t q = c; q < n; ++q) {
                a[r * n + q] -= f * a[c * n + q];
            }
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t q = c + 1; q < n; ++q) {
            s -= a[c * n + q] * b[q];
        }
        b[c] = s / a[c * n + c];
    }
    return true;
}

enum class RayOutcome { ok, degenerate };

struct RayResult {
    RayOutcome outcome = RayOutcome::ok;
    int degree = 0;
};

RayResult cast_ray(const SimplicialMesh& cycle, std::span<const double> p, std::span<const double> d,
                   double scale)
{
    constexpr double kParallel = 1e-12;
    constexpr double kOnCarrier = 1e-12;
    constexpr double kBary = 1e-9;
    const auto D = static_cast<std::size_t>(cycle.ambient_dim);
    const std::size_t k = D - 1;
    std::vector<double> E(D * k);
    std::vector<double> minor(k * k);
    std::vector<double> n(D);
    std::vector<double> q(D);
    std::vector<double> gram(k * k);
    std::vector<double> rhs(k);
    RayResult res;
    for (const Simplex& s : cycle.simplices) {
        const auto v0 = cycle.vertex(static_cast<std::size_t>(s[0]));
        for (std::size_t c = 0; c < k; ++c) {
            const auto vc = cycle.vertex(static_cast<std::size_t>(s[c + 1]));
            for (std::size_t r = 0; r < D; ++r) {
                E[r * k + c] = vc[r] - v0[r];
            }
        }
        // normal by cofactors: n . x = det[x | E]
        for (std::size_t i = 0; i < D; ++i) {
            std::size_t rr = 0;
            for (std::size_t r = 0; r < D; ++r) {
                if (r == i) {
                    continue;
                }
                for (std::size_t c = 0; c < k; ++c) {
                    minor[rr * k + c] = E[r * k + c];
                }
                ++rr;
            }
            const double m = k == 0 ? 1.0 : small_det(minor, static_cast<int>(k));
            n[i] = (i % 2 == 0) ? m : -m;
        }
        const double n_norm = std::sqrt(dot(n, n));
        if (n_norm == 0.0) {
            throw GeometricError("degenerate simplex in cycle");
        }
        for (std::size_t r = 0; r < D; ++r) {
            q[r] = v0[r] - p[r];
        }
        const double nd = dot(n, d);
        const double h = dot(n, q);
        if (std::abs(nd) <= kParallel * n_norm) {
            if (std::abs(h) <= kOnCarrier * n_norm * scale) {
                res.outcome = RayOutcome::degenerate;
                return res;
            }
            continue;
        }
        const double t = h / nd;
        if (t < -kOnCarrier * scale) {
            continue;
        }
        // barycentric coordinates of the hit point by least squares on E
        for (std::size_t r = 0; r < D; ++r) {
            q[r] = p[r] + t * d[r] - v0[r];
        }
        for (std::size_t a = 0; a < k; ++a) {
            double sum = 0.0;
            for (std::size_t r = 0; r < D; ++r) {
                sum += E[r * k + a] * q[r];
            }
            rhs[a] = sum;
            for (std::size_t b = 0; b < k; ++b) {
                double g = 0.0;
                for (std::size_t r = 0; r < D; ++r) {
                    g += E[r * k + a] * E[r * k + b];
                }
                gram[a * k + b] = g;
            }
        }
        if (k > 0 && !solve_small(gram, rhs, k)) {
            throw GeometricError("degenerate simplex in cycle");
        }
        double s0 = 1.0;
        double smin = INFINITY;
        for (std::size_t a = 0; a < k; ++a) {
            s0 -= rhs[a];
            smin = std::min(smin, rhs[a]);
        }
        smin = std::min(smin, s0);
        if (smin < -kBary) {
            continue;
        }
        if (std::abs(t) <= kOnCarrier * scale) {
            throw GeometricError("point lies on the cycle");
        }
        if (smin <= kBary) {
            res.outcome = RayOutcome::degenerate;
            return res;
        }
        res.degree += nd > 0.0 ? 1 : -1;
    }
    return res;
}

} // namespace

std::vector<BoundaryMatrix> boundary_matrices(const std::vector<std::vector<Simplex>>& complex_in)
{
    const auto complex = normalized(complex_in);
    std::vector<BoundaryMatrix> out;
    for (std::size_t k = 1; k < complex.size(); ++k) {
        BoundaryMatrix m;
        m.k = static_cast<int>(k);
        m.rows = complex[k - 1].size();
        m.columns.reserve(complex[k].size());
        for (const Simplex& s : complex[k]) {
            if (s.size() != k + 1) {
                throw StructuralError("simplex of the wrong size in dimension " + std::to_string(k));
            }
            std::vector<int> col;
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex face;
                for (std::size_t q = 0; q < s.size(); ++q) {
                    if (q != drop) {
                        face.push_back(s[q]);
                    }
                }
                const auto& lower = complex[k - 1];
                const auto it = std::lower_bound(lower.begin(), lower.end(), face);
                if (it == lower.end() || *it != face) {
                    throw StructuralError("face closure violated: a face of a " + std::to_string(k) +
                                          "-simplex is missing");
                }
                col.push_back(static_cast<int>(it - lower.begin()));
            }
            std::sort(col.begin(), col.end());
            m.columns.push_back(std::move(col));
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::int64_t gf2_rank(const BoundaryMatrix& m)
{
    return reduce(m, nullptr, nullptr);
}

bool boundary_squared_is_zero(const std::vector<BoundaryMatrix>& mats)
{
    for (std::size_t i = 1; i < mats.size(); ++i) {
        const auto& lower = mats[i - 1];
        const auto& upper = mats[i];
        for (const auto& col : upper.columns) {
            std::vector<int> acc;
            for (int r : col) {
                const auto& c = lower.columns[static_cast<std::size_t>(r)];
                acc.insert(acc.end(), c.begin(), c.end());
            }
            std::sort(acc.begin(), acc.end());
            for (std::size_t q = 0; q < acc.size();) {
                std::size_t e = q;
                while (e < acc.size() && acc[e] == acc[q]) {
                    ++e;
                }
                if ((e - q) % 2 == 1) {
                    return false;
                }
                q = e;
            }
        }
    }
    return true;
}

BettiVector betti_numbers(const std::vector<std::vector<Simplex>>& complex_in)
{
    const auto complex = normalized(complex_in);
    for (std::size_t k = 0; k < complex.size(); ++k) {
        for (const auto& s : complex[k]) {
            if (s.size() != k + 1) {
                throw StructuralError("simplex listed in the wrong dimension");
            }
        }
    }
    const auto mats = boundary_matrices(complex);
    const std::size_t top = complex.size();
    // ranks from the top down, clearing columns that are known pivots
    std::vector<std::int64_t> rank(top + 1, 0);
    std::vector<int> pivots;
    for (std::size_t k = top; k-- > 1;) {
        const auto& m = mats[k - 1];
        std::vector<char> skip(m.columns.size(), 0);
        for (int p : pivots) {
            skip[static_cast<std::size_t>(p)] = 1;
        }
        pivots.clear();
        rank[k] = reduce(m, &skip, &pivots);
    }
    BettiVector b(top, 0);
    for (std::size_t k = 0; k < top; ++k) {
        b[k] = static_cast<std::int64_t>(complex[k].size()) - rank[k] - rank[k + 1];
    }
    return b;
}

BettiVector betti_numbers(const SimplicialMesh& mesh)
{
    return betti_numbers(face_closure(mesh.simplices));
}

int degree(const SimplicialMesh& cycle, std::span<const double> point, const DegreeOptions& opt)
{
    const auto D = static_cast<std::size_t>(cycle.ambient_dim);
    if (cycle.dim + 1 != cycle.ambient_dim) {
        throw ParameterError("degree needs a dim-cycle in R^(dim+1)");
    }
    if (point.size() != D) {
        throw ParameterError("point dimension does not match the cycle");
    }
    double scale = 0.0;
    {
        std::vector<double> lo(D, INFINITY);
        std::vector<double> hi(D, -INFINITY);
        for (std::size_t v = 0; v < cycle.vertex_count(); ++v) {
            const auto x = cycle.vertex(v);
            for (std::size_t i = 0; i < D; ++i) {
                lo[i] = std::min(lo[i], x[i]);
                hi[i] = std::max(hi[i], x[i]);
            }
        }
        for (std::size_t i = 0; i < D; ++i) {
            lo[i] = std::min(lo[i], point[i]);
            hi[i] = std::max(hi[i], point[i]);
            scale = std::max(scale, hi[i] - lo[i]);
        }
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    std::vector<double> dir(D);
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        double norm = 0.0;
        for (auto& c : dir) {
            c = normal(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
        for (auto& c : dir) {
            c /= norm;
        }
        const RayResult r = cast_ray(cycle, point, dir, scale);
        if (r.outcome == RayOutcome::ok) {
            return r.degree;
        }
    }
    throw NumericalError("degree: " + std::to_string(opt.max_attempts) +
                         " consecutive degenerate rays");
}

SimplicialMesh drop_coordinate(const SimplicialMesh& mesh, int coord)
{
    if (coord < 0 || coord >= mesh.ambient_dim) {
        throw ParameterError("coordinate index out of range");
    }
    SimplicialMesh out;
    out.ambient_dim = mesh.ambient_dim - 1;
    out.dim = mesh.dim;
    out.simplices = mesh.simplices;
    out.labels = mesh.labels;
    out.coords.reserve(mesh.vertex_count() * static_cast<std::size_t>(out.ambient_dim));
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const auto x = mesh.vertex(v);
        for (int i = 0; i < mesh.ambient_dim; ++i) {
            if (i != coord) {
                out.coords.push_back(x[static_cast<std::size_t>(i)]);
            }
        }
    }
    return out;
}

bool IndependenceMatrix::is_identity() const
{
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].size() != entries.size()) {
            return false;
        }
        for (std::size_t j = 0; j < entries[i].size(); ++j) {
            if (entries[i][j] != (i == j ? 1 : 0)) {
                return false;
            }
        }
    }
    return true;
}

IndependenceMatrix independence_matrix(const std::vector<SimplicialMesh>& cycles,
                                       const std::vector<std::vector<double>>& witnesses,
                                       const DegreeOptions& opt)
{
    IndependenceMatrix out;
    const std::size_t rows = cycles.size();
    const std::size_t cols = witnesses.size();
    out.entries.assign(rows, std::vector<int>(cols, 0));
    parallel_for(rows * cols, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const std::size_t i = idx / cols;
            const std::size_t j = idx % cols;
            out.entries[i][j] = degree(cycles[i], witnesses[j], opt);
        }
    });
    out.rank = integer_rank(out.entries);
    return out;
}

int integer_rank(const std::vector<std::vector<int>>& m)
{
    if (m.empty()) {
        return 0;
    }
    const std::size_t rows = m.size();
    const std::size_t cols = m[0].size();
    std::vector<std::vector<__int128>> a(rows, std::vector<__int128>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            a[i][j] = m[i][j];
        }
    }
    // Bareiss: every intermediate entry is a minor of the input
    __int128 prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) {
            ++piv;
        }
        if (piv == rows) {
            continue;
        }
        std::swap(a[piv], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return static_cast<int>(r);
}

} // namespace nodalcert

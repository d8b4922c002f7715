#include "nodalcert/complex.hpp"

#include "nodalcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <tuple>

namespace nodalcert {

namespace {

struct RidgeEntry {
    Simplex ridge;
    int simplex;
    int induced; // orientation induced on the sorted ridge
};

std::vector<RidgeEntry> ridge_entries(const SimplicialMesh& mesh)
{
    std::vector<RidgeEntry> entries;
    entries.reserve(mesh.simplices.size() * static_cast<std::size_t>(mesh.dim + 1));
    for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
        const Simplex& simplex = mesh.simplices[s];
        if (static_cast<int>(simplex.size()) != mesh.dim + 1) {
            throw StructuralError("mesh is not pure: simplex of size " +
                                  std::to_string(simplex.size()) + " in a " +
                                  std::to_string(mesh.dim) + "-dimensional mesh");
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            Simplex face;
            face.reserve(simplex.size() - 1);
            for (std::size_t k = 0; k < simplex.size(); ++k) {
                if (k != i) {
                    face.push_back(simplex[k]);
                }
            }
            const int sign = permutation_sign(face) * ((i % 2 == 0) ? 1 : -1);
            std::sort(face.begin(), face.end());
            entries.push_back({std::move(face), static_cast<int>(s), sign});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const RidgeEntry& a, const RidgeEntry& b) {
        return std::tie(a.ridge, a.simplex) < std::tie(b.ridge, b.simplex);
    });
    return entries;
}

} // namespace

const char* to_string(VertexLabel l)
{
    switch (l) {
    case VertexLabel::none:
        return "none";
    case VertexLabel::upper:
        return "upper";
    case VertexLabel::lower:
        return "lower";
    case VertexLabel::branch:
        return "branch";
    case VertexLabel::gamma:
        return "gamma";
    }
    return "none";
}

std::size_t SimplicialMesh::vertex_count() const
{
    return ambient_dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(ambient_dim);
}

std::span<const double> SimplicialMesh::vertex(std::size_t i) const
{
    const auto d = static_cast<std::size_t>(ambient_dim);
    return {coords.data() + i * d, d};
}

std::span<double> SimplicialMesh::vertex(std::size_t i)
{
    const auto d = static_cast<std::size_t>(ambient_dim);
    return {coords.data() + i * d, d};
}

int SimplicialMesh::add_vertex(std::span<const double> x, VertexLabel label)
{
    if (static_cast<int>(x.size()) != ambient_dim) {
        throw ParameterError("vertex dimension does not match the ambient dimension");
    }
    const int id = static_cast<int>(vertex_count());
    coords.insert(coords.end(), x.begin(), x.end());
    if (!labels.empty() || label != VertexLabel::none) {
        labels.resize(static_cast<std::size_t>(id), VertexLabel::none);
        labels.push_back(label);
    }
    return id;
}

std::vector<std::vector<Simplex>> face_closure(const std::vector<Simplex>& simplices)
{
    std::vector<std::vector<Simplex>> out;
    for (const Simplex& s : simplices) {
        Simplex sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t k = sorted.size();
        if (k == 0 || k > 20) {
            throw StructuralError("simplex with " + std::to_string(k) + " vertices");
        }
        if (out.size() < k) {
            out.resize(k);
        }
        for (std::uint32_t mask = 1; mask < (1U << k); ++mask) {
            Simplex face;
            for (std::size_t i = 0; i < k; ++i) {
                if (mask & (1U << i)) {
                    face.push_back(sorted[i]);
                }
            }
            out[face.size() - 1].push_back(std::move(face));
        }
    }
    for (auto& level : out) {
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
    }
    return out;
}

std::int64_t euler_characteristic(const std::vector<std::vector<Simplex>>& closure)
{
    std::int64_t chi = 0;
    for (std::size_t k = 0; k < closure.size(); ++k) {
        const auto c = static_cast<std::int64_t>(closure[k].size());
        chi += (k % 2 == 0) ? c : -c;
    }
    return chi;
}

int permutation_sign(const Simplex& s)
{
    int sign = 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (s[i] > s[j]) {
                sign = -sign;
            } else if (s[i] == s[j]) {
                throw StructuralError("degenerate simplex with a repeated vertex");
            }
        }
    }
    return sign;
}

bool is_closed_pseudomanifold(const SimplicialMesh& mesh)
{
    if (mesh.dim == 0) {
        return true;
    }
    const auto entries = ridge_entries(mesh);
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].ridge == entries[i].ridge) {
            ++j;
        }
        if (j - i != 2) {
            return false;
        }
        i = j;
    }
    return true;
}

void orient_consistently(SimplicialMesh& mesh)
{
    if (mesh.dim == 0 || mesh.simplices.empty()) {
        return;
    }
    const auto entries = ridge_entries(mesh);
    const std::size_t count = mesh.simplices.size();
    // adjacency: neighbour simplex and the product of induced signs
    std::vector<std::vector<std::pair<int, int>>> adj(count);
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].ridge == entries[i].ridge) {
            ++j;
        }
        if (j - i > 2) {
            throw StructuralError("branching face shared by " + std::to_string(j - i) +
                                  " simplices");
        }
        if (j - i == 2) {
            const auto& a = entries[i];
            const auto& b = entries[i + 1];
            adj[static_cast<std::size_t>(a.simplex)].push_back({b.simplex, a.induced * b.induced});
            adj[static_cast<std::size_t>(b.simplex)].push_back({a.simplex, a.induced * b.induced});
        }
        i = j;
    }
    std::vector<int> flip(count, 0);
    for (std::size_t root = 0; root < count; ++root) {
        if (flip[root] != 0) {
            continue;
        }
        flip[root] = 1;
        std::queue<std::size_t> queue;
        queue.push(root);
        while (!queue.empty()) {
            const std::size_t s = queue.front();
            queue.pop();
            for (auto [t, prod] : adj[s]) {
                const int want = -flip[s] * prod;
                auto& ft = flip[static_cast<std::size_t>(t)];
                if (ft == 0) {
                    ft = want;
                    queue.push(static_cast<std::size_t>(t));
                } else if (ft != want) {
                    throw StructuralError("mesh is not orientable");
                }
            }
        }
    }
    for (std::size_t s = 0; s < count; ++s) {
        if (flip[s] < 0) {
            std::swap(mesh.simplices[s][0], mesh.simplices[s][1]);
        }
    }
}

void flip_orientation(SimplicialMesh& mesh)
{
    for (auto& s : mesh.simplices) {
        if (s.size() >= 2) {
            std::swap(s[0], s[1]);
        }
    }
}

double small_det(std::vector<double> a, int k)
{
    const auto n = static_cast<std::size_t>(k);
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) {
                piv = r;
            }
        }
        if (a[piv * n + c] == 0.0) {
            return 0.0;
        }
        if (piv != c) {
            for (std::size_t q = 0; q < n; ++q) {
                std::swap(a[c * n + q], a[piv * n + q]);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t q = c; q < n; ++q) {
                a[r * n + q] -= f * a[c * n + q];
            }
        }
    }
    return det;
}

double signed_volume_about(const SimplicialMesh& mesh, std::span<const double> p)
{
    const int k = mesh.ambient_dim;
    if (mesh.dim + 1 != k) {
        throw ParameterError("signed volume needs a codimension-1 mesh");
    }
    const auto n = static_cast<std::size_t>(k);
    double total = 0.0;
    std::vector<double> m(n * n);
    for (const Simplex& s : mesh.simplices) {
        const auto v0 = mesh.vertex(static_cast<std::size_t>(s[0]));
        // columns: v0 - p, v1 - v0, ..., vd - v0
        for (std::size_t r = 0; r < n; ++r) {
            m[r * n] = v0[r] - p[r];
        }
        for (std::size_t c = 1; c < n; ++c) {
            const auto vc = mesh.vertex(static_cast<std::size_t>(s[c]));
            for (std::size_t r = 0; r < n; ++r) {
                m[r * n + c] = vc[r] - v0[r];
            }
        }
        total += small_det(m, k);
    }
    return total;
}

SimplicialMesh barycentric_subdivision(const SimplicialMesh& mesh)
{
    SimplicialMesh out;
    out.ambient_dim = mesh.ambient_dim;
    out.dim = mesh.dim;
    out.coords = mesh.coords;
    out.labels = mesh.labels;
    if (mesh.dim == 0) {
        out.simplices = mesh.simplices;
        return out;
    }
    const auto d1 = static_cast<std::size_t>(mesh.dim + 1);
    const auto amb = static_cast<std::size_t>(mesh.ambient_dim);
    std::map<Simplex, int> barycenter;
    auto barycenter_of = [&](Simplex face) {
        if (face.size() == 1) {
            return face[0];
        }
        std::sort(face.begin(), face.end());
        auto it = barycenter.find(face);
        if (it != barycenter.end()) {
            return it->second;
        }
        std::vector<double> c(amb, 0.0);
        for (int v : face) {
            const auto x = mesh.vertex(static_cast<std::size_t>(v));
            for (std::size_t q = 0; q < amb; ++q) {
                c[q] += x[q] / static_cast<double>(face.size());
            }
        }
        const int id = out.add_vertex(c);
        barycenter.emplace(std::move(face), id);
        return id;
    };

    std::vector<int> perm(d1);
    std::vector<double> bary(d1 * d1);
    for (const Simplex& s : mesh.simplices) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Simplex chain;
            Simplex face;
            std::fill(bary.begin(), bary.end(), 0.0);
            for (std::size_t k = 0; k < d1; ++k) {
                face.push_back(s[static_cast<std::size_t>(perm[k])]);
                chain.push_back(barycenter_of(face));
                for (std::size_t q = 0; q <= k; ++q) {
                    bary[k * d1 + static_cast<std::size_t>(perm[q])] = 1.0 / static_cast<double>(k + 1);
                }
            }
            // orientation relative to the parent = sign of the barycentric matrix
            if (small_det(bary, static_cast<int>(d1)) < 0.0) {
                std::swap(chain[0], chain[1]);
            }
            out.simplices.push_back(std::move(chain));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
}

SimplicialMesh sphere_complex(int d, int levels)
{
    if (d < 1) {
        throw ParameterError("sphere_complex needs d >= 1");
    }
    SimplicialMesh mesh;
    mesh.ambient_dim = d;
    mesh.dim = d - 1;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        for (double sgn : {1.0, -1.0}) {
            std::fill(x.begin(), x.end(), 0.0);
            x[static_cast<std::size_t>(i)] = sgn;
            mesh.add_vertex(x);
        }
    }
    if (d == 1) {
        mesh.simplices = {{0}, {1}};
        return mesh;
    }
    for (std::uint32_t mask = 0; mask < (1U << d); ++mask) {
        Simplex s;
        for (int i = 0; i < d; ++i) {
            s.push_back(2 * i + static_cast<int>((mask >> i) & 1U));
        }
        mesh.simplices.push_back(std::move(s));
    }
    for (int l = 0; l < levels; ++l) {
        mesh = barycentric_subdivision(mesh);
    }
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        auto p = mesh.vertex(v);
        double norm = 0.0;
        for (double c : p) {
            norm += c * c;
        }
        norm = std::sqrt(norm);
        for (double& c : p) {
            c /= norm;
        }
    }
    return mesh;
}

SimplicialMesh regular_polygon(int n)
{
    if (n < 3) {
        throw ParameterError("polygon needs at least 3 vertices");
    }
    SimplicialMesh mesh;
    mesh.ambient_dim = 2;
    mesh.dim = 1;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        const double p[2] = {std::cos(a), std::sin(a)};
        mesh.add_vertex(p);
        mesh.simplices.push_back({k, (k + 1) % n});
    }
    return mesh;
}

} // namespace nodalcert

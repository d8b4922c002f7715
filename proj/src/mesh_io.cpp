#include "nodalcert/nodal_mesh.hpp"

#include "nodalcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace nodalcert {

namespace {

std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

VertexLabel parse_label(const std::string& s)
{
    for (auto l : {VertexLabel::none, VertexLabel::upper, VertexLabel::lower, VertexLabel::branch,
                   VertexLabel::gamma}) {
        if (s == to_string(l)) {
            return l;
        }
    }
    throw FormatError("unknown vertex label '" + s + "'");
}

void expect(std::istream& is, const char* word)
{
    std::string tok;
    if (!(is >> tok) || tok != word) {
        throw FormatError(std::string("expected '") + word + "'");
    }
}

template <class T>
T read_value(std::istream& is, const char* what)
{
    T v{};
    if (!(is >> v)) {
        throw FormatError(std::string("could not read ") + what);
    }
    return v;
}

} // namespace

void write_obj(std::ostream& os, const SimplicialMesh& mesh)
{
    if (mesh.vertex_count() == 0 && mesh.simplices.empty()) {
        return;
    }
    if (mesh.dim != 2 || mesh.ambient_dim != 3) {
        throw FormatError("OBJ export needs a triangle mesh in three dimensions");
    }
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const auto x = mesh.vertex(v);
        os << "v " << fmt_double(x[0]) << ' ' << fmt_double(x[1]) << ' ' << fmt_double(x[2]) << '\n';
    }
    for (const auto& s : mesh.simplices) {
        if (s.size() != 3) {
            throw FormatError("OBJ export needs triangles only");
        }
        os << "f " << s[0] + 1 << ' ' << s[1] + 1 << ' ' << s[2] + 1 << '\n';
    }
}

void write_simplicial_text(std::ostream& os, const SimplicialMesh& mesh)
{
    os << "simplicial_text 1\n";
    os << "ambient " << mesh.ambient_dim << '\n';
    os << "vertices " << mesh.vertex_count() << '\n';
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        for (double c : mesh.vertex(v)) {
            os << fmt_double(c) << ' ';
        }
        os << to_string(mesh.labels.empty() ? VertexLabel::none : mesh.labels[v]) << '\n';
    }
    std::vector<Simplex> keys(mesh.simplices.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        keys[i] = mesh.simplices[i];
        std::sort(keys[i].begin(), keys[i].end());
    }
    std::vector<std::size_t> order(mesh.simplices.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a].size() != keys[b].size()) {
            return keys[a].size() < keys[b].size();
        }
        return keys[a] < keys[b];
    });
    std::size_t i = 0;
    while (i < order.size()) {
        const std::size_t k = mesh.simplices[order[i]].size();
        std::size_t j = i;
        while (j < order.size() && mesh.simplices[order[j]].size() == k) {
            ++j;
        }
        os << "dim " << k - 1 << ' ' << j - i << '\n';
        for (std::size_t q = i; q < j; ++q) {
            const auto& s = mesh.simplices[order[q]];
            for (std::size_t t = 0; t < s.size(); ++t) {
                os << (t ? " " : "") << s[t];
            }
            os << '\n';
        }
        i = j;
    }
}

SimplicialMesh read_simplicial_text(std::istream& is)
{
    expect(is, "simplicial_text");
    if (read_value<int>(is, "format version") != 1) {
        throw FormatError("unsupported simplicial_text version");
    }
    SimplicialMesh mesh;
    expect(is, "ambient");
    mesh.ambient_dim = read_value<int>(is, "ambient dimension");
    if (mesh.ambient_dim < 0) {
        throw FormatError("negative ambient dimension");
    }
    expect(is, "vertices");
    const auto nv = read_value<long long>(is, "vertex count");
    if (nv < 0) {
        throw FormatError("negative vertex count");
    }
    std::vector<double> x(static_cast<std::size_t>(mesh.ambient_dim));
    for (long long v = 0; v < nv; ++v) {
        for (auto& c : x) {
            c = read_value<double>(is, "coordinate");
            if (!std::isfinite(c)) {
                throw FormatError("non-finite coordinate");
            }
        }
        mesh.add_vertex(x, parse_label(read_value<std::string>(is, "label")));
    }
    std::string tok;
    mesh.dim = 0;
    while (is >> tok) {
        if (tok != "dim") {
            throw FormatError("expected 'dim', got '" + tok + "'");
        }
        const int k = read_value<int>(is, "simplex dimension");
        const auto count = read_value<long long>(is, "simplex count");
        if (k < 0 || count < 0) {
            throw FormatError("negative simplex dimension or count");
        }
        mesh.dim = std::max(mesh.dim, k);
        for (long long s = 0; s < count; ++s) {
            Simplex simplex(static_cast<std::size_t>(k) + 1);
            for (int& v : simplex) {
                v = read_value<int>(is, "vertex id");
                if (v < 0 || v >= nv) {
                    throw FormatError("vertex id out of range");
                }
            }
            mesh.simplices.push_back(std::move(simplex));
        }
    }
    return mesh;
}

} // namespace nodalcert

#ifndef NODALCERT_TESTS_ORACLES_HPP
#define NODALCERT_TESTS_ORACLES_HPP

#include "nodalcert/homology.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace nodalcert::oracle {

inline std::vector<Simplex> simplex_boundary(int ell)
{
    // all (ell+1)-subsets of {0, ..., ell+1}
    std::vector<Simplex> out;
    for (int skip = 0; skip <= ell + 1; ++skip) {
        Simplex s;
        for (int v = 0; v <= ell + 1; ++v) {
            if (v != skip) {
                s.push_back(v);
            }
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<Simplex> seven_vertex_torus()
{
    std::vector<Simplex> out;
    for (int i = 0; i < 7; ++i) {
        out.push_back({i, (i + 1) % 7, (i + 3) % 7});
        out.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return out;
}

// Dense GF(2) rank by row reduction of a 0/1 matrix
inline int dense_rank(std::vector<std::vector<int>> a)
{
    int rank = 0;
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && static_cast<std::size_t>(rank) < rows; ++c) {
        std::size_t piv = static_cast<std::size_t>(rank);
        while (piv < rows && a[piv][c] == 0) {
            ++piv;
        }
        if (piv == rows) {
            continue;
        }
        std::swap(a[piv], a[static_cast<std::size_t>(rank)]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != static_cast<std::size_t>(rank) && a[r][c]) {
                for (std::size_t q = 0; q < cols; ++q) {
                    a[r][q] ^= a[static_cast<std::size_t>(rank)][q];
                }
            }
        }
        ++rank;
    }
    return rank;
}

// Independent oracle: enumerates faces with std::set and builds dense
// boundary matrices directly.
inline BettiVector dense_betti(const std::vector<Simplex>& maximal)
{
    std::vector<std::set<Simplex>> faces;
    for (Simplex s : maximal) {
        std::sort(s.begin(), s.end());
        const std::size_t k = s.size();
        for (std::uint32_t mask = 1; mask < (1U << k); ++mask) {
            Simplex f;
            for (std::size_t i = 0; i < k; ++i) {
                if (mask >> i & 1U) {
                    f.push_back(s[i]);
                }
            }
            if (faces.size() < f.size()) {
                faces.resize(f.size());
            }
            faces[f.size() - 1].insert(f);
        }
    }
    const std::size_t top = faces.size();
    std::vector<int> rank(top + 1, 0);
    for (std::size_t k = 1; k < top; ++k) {
        std::map<Simplex, std::size_t> row_index;
        for (const auto& f : faces[k - 1]) {
            row_index.emplace(f, row_index.size());
        }
        std::vector<std::vector<int>> mat(faces[k - 1].size(), std::vector<int>(faces[k].size(), 0));
        std::size_t col = 0;
        for (const auto& s : faces[k]) {
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex f = s;
                f.erase(f.begin() + static_cast<long>(drop));
                mat[row_index.at(f)][col] = 1;
            }
            ++col;
        }
        rank[k] = dense_rank(mat);
    }
    BettiVector b(top);
    for (std::size_t k = 0; k < top; ++k) {
        b[k] = static_cast<std::int64_t>(faces[k].size()) - rank[k] - rank[k + 1];
    }
    return b;
}

} // namespace nodalcert::oracle

#endif

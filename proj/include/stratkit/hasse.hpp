#pragma once

#include <string>
#include <vector>

#include "stratkit/hn.hpp"

namespace stratkit {

// Covering relations of a finite poset given by a three-way comparator:
// edge (a, b) when a > b and nothing lies strictly between.
template <class T, class Compare>
std::vector<std::pair<std::size_t, std::size_t>> covering_edges(const std::vector<T>& elems,
                                                                Compare cmp) {
    const std::size_t n = elems.size();
    std::vector<std::vector<bool>> gt(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) gt[a][b] = cmp(elems[a], elems[b]) == OrderRelation::greater;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!gt[a][b]) continue;
            bool covering = true;
            for (std::size_t c = 0; c < n && covering; ++c)
                if (gt[a][c] && gt[c][b]) covering = false;
            if (covering) edges.emplace_back(a, b);
        }
    return edges;
}

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_dot(const std::vector<std::string>& labels,
                          const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::string out = "digraph hasse {\n";
    for (const auto& label : labels) out += "  " + dot_quote(label) + ";\n";
    for (const auto& [a, b] : edges)
        out += "  " + dot_quote(labels[a]) + " -> " + dot_quote(labels[b]) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace stratkit

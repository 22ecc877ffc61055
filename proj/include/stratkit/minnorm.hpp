#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "stratkit/errors.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

// Finitely many rational points with a diagonal positive rational metric
// <x,y> = sum_j w_j x_j y_j.
struct MetricPointSet {
    int dim = 0;
    std::vector<Rat> metric;                 // w_j > 0
    std::vector<std::vector<Rat>> points;
};

inline void validate(const MetricPointSet& s) {
    require_input(s.dim >= 1, "pointset", "dimension must be positive");
    require_input(static_cast<int>(s.metric.size()) == s.dim, "pointset",
                  "metric length must equal dim");
    for (const Rat& w : s.metric)
        require_input(w > 0, "pointset", "metric weights must be positive");
    require_input(!s.points.empty(), "pointset", "need at least one point");
    for (const auto& p : s.points)
        require_input(static_cast<int>(p.size()) == s.dim, "pointset",
                      "point dimension mismatch");
}

inline Rat metric_dot(const MetricPointSet& s, const std::vector<Rat>& a,
                      const std::vector<Rat>& b) {
    Rat acc = 0;
    for (int j = 0; j < s.dim; ++j) acc += s.metric[static_cast<std::size_t>(j)] *
                                           a[static_cast<std::size_t>(j)] *
                                           b[static_cast<std::size_t>(j)];
    return acc;
}

struct MinNormCertificate {
    std::vector<Rat> point;
    std::vector<Rat> coefficients;  // convex weights over the input points
    Rat normsq;
};

inline bool certificate_valid(const MetricPointSet& s, const MinNormCertificate& c) {
    if (c.coefficients.size() != s.points.size()) return false;
    Rat total = 0;
    std::vector<Rat> recon(static_cast<std::size_t>(s.dim), Rat(0));
    for (std::size_t v = 0; v < s.points.size(); ++v) {
        const Rat& l = c.coefficients[v];
        if (l < 0) return false;
        total += l;
        for (int j = 0; j < s.dim; ++j)
            recon[static_cast<std::size_t>(j)] += l * s.points[v][static_cast<std::size_t>(j)];
    }
    if (total != 1) return false;
    if (recon != c.point) return false;
    if (metric_dot(s, c.point, c.point) != c.normsq) return false;
    for (const auto& p : s.points)
        if (metric_dot(s, p, c.point) < c.normsq) return false;
    return true;
}

namespace detail {

// Bareiss elimination and back-substitution on an n x (n+1) integer
// augmented matrix; returns false when the left block is singular.
inline bool solve_augmented(std::vector<std::vector<Int>>& m, std::vector<Rat>& x) {
    const std::size_t n = m.size();
    Int prev = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col] == 0) ++pivot;
        if (pivot == n) return false;
        std::swap(m[pivot], m[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            for (std::size_t j = col + 1; j <= n; ++j)
                m[row][j] = (m[col][col] * m[row][j] - m[row][col] * m[col][j]) / prev;
            m[row][col] = 0;
        }
        prev = m[col][col];
    }
    x.assign(n, Rat(0));
    for (std::size_t i = n; i-- > 0;) {
        Rat acc(m[i][n]);
        for (std::size_t j = i + 1; j < n; ++j) acc -= Rat(m[i][j]) * x[j];
        x[i] = acc / Rat(m[i][i]);
    }
    return true;
}

// Gram matrix scaled to integers by a common positive denominator; scaling
// the metric does not move the minimizer, so all subset systems become pure
// integer eliminations.
struct ScaledGram {
    std::vector<std::vector<Int>> entries;  // scale * <p_i, p_j>
    Int scale = 1;
};

inline ScaledGram gram_matrix(const MetricPointSet& s) {
    const std::size_t p = s.points.size();
    std::vector<std::vector<Rat>> g(p, std::vector<Rat>(p));
    ScaledGram out;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            g[i][j] = g[j][i] = metric_dot(s, s.points[i], s.points[j]);
            const Int d = rat_den(g[i][j]);
            out.scale = out.scale / gcd(out.scale, d) * d;
        }
    out.entries.assign(p, std::vector<Int>(p));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            out.entries[i][j] = rat_num(g[i][j]) * (out.scale / rat_den(g[i][j]));
    return out;
}

// Affine minimizer of |sum lambda_v v|^2 over sum lambda = 1 for the chosen
// subset, via the bordered Gram system  G lambda = alpha 1, 1^T lambda = 1.
// Nonsingular exactly when the subset is affinely independent; then
// alpha = |y|^2 of the minimizer y.
inline bool affine_minimizer(const ScaledGram& gram, const std::vector<std::size_t>& subset,
                             std::vector<Rat>& lambda, Rat& alpha) {
    const std::size_t k = subset.size();
    std::vector<std::vector<Int>> m(k + 1, std::vector<Int>(k + 2, Int(0)));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) m[i][j] = gram.entries[subset[i]][subset[j]];
        m[i][k] = -gram.scale;
    }
    for (std::size_t j = 0; j < k; ++j) m[k][j] = 1;
    m[k][k + 1] = 1;
    std::vector<Rat> sol;
    if (!solve_augmented(m, sol)) return false;
    lambda.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(k));
    alpha = sol[k];
    return true;
}

inline MinNormCertificate certificate_from(const MetricPointSet& s,
                                           const std::vector<std::size_t>& subset,
                                           const std::vector<Rat>& lambda) {
    MinNormCertificate c;
    c.coefficients.assign(s.points.size(), Rat(0));
    for (std::size_t i = 0; i < subset.size(); ++i) c.coefficients[subset[i]] = lambda[i];
    c.point.assign(static_cast<std::size_t>(s.dim), Rat(0));
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (int j = 0; j < s.dim; ++j)
            c.point[static_cast<std::size_t>(j)] +=
                lambda[i] * s.points[subset[i]][static_cast<std::size_t>(j)];
    c.normsq = metric_dot(s, c.point, c.point);
    return c;
}

}  // namespace detail

// Exhaustive oracle: every affinely independent subset is solved exactly for
// its constrained minimizer; convex-feasible solutions are candidates.  The
// optimum lies in the relative interior of the hull of some affinely
// independent subset, so the scan is complete.  Subsets are visited by
// (size, index order) and the first optimum is kept, making certificates
// deterministic.
inline MinNormCertificate min_norm_face_search(const MetricPointSet& s) {
    validate(s);
    const auto gram = detail::gram_matrix(s);
    const std::size_t p = s.points.size();
    const std::size_t max_size = std::min<std::size_t>(p, static_cast<std::size_t>(s.dim) + 1);
    std::optional<MinNormCertificate> best;
    std::vector<std::size_t> subset;
    std::vector<Rat> lambda;
    Rat alpha;
    auto consider = [&]() {
        if (!detail::affine_minimizer(gram, subset, lambda, alpha)) return;
        for (const Rat& l : lambda)
            if (l < 0) return;
        if (!best || alpha < best->normsq) best = detail::certificate_from(s, subset, lambda);
    };
    for (std::size_t size = 1; size <= max_size; ++size) {
        std::vector<std::size_t> comb(size);
        // lexicographic combinations of {0..p-1} of the given size
        for (std::size_t i = 0; i < size; ++i) comb[i] = i;
        while (true) {
            subset = comb;
            consider();
            std::size_t i = size;
            while (i > 0 && comb[i - 1] == p - size + i - 1) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < size; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    require_internal(best.has_value(), "face search found no feasible subset");
    require_internal(certificate_valid(s, *best), "face search produced an invalid certificate");
    return *best;
}

// Wolfe's nearest-point algorithm over exact rationals.  The corral stays
// affinely independent throughout: a point strictly below the current level
// set can never lie in the corral's affine hull, and deletions only shrink
// an independent set.  Exact arithmetic makes the descent argument strict,
// so the iteration terminates.
inline MinNormCertificate min_norm_wolfe(const MetricPointSet& s) {
    validate(s);
    const auto gram = detail::gram_matrix(s);
    const std::size_t p = s.points.size();

    std::size_t start = 0;
    for (std::size_t i = 1; i < p; ++i)
        if (gram.entries[i][i] < gram.entries[start][start]) start = i;
    std::vector<std::size_t> corral{start};
    std::vector<Rat> weights{Rat(1)};

    // scale * <x, p_j>; every comparison below is scale invariant
    auto dot_with_x = [&](std::size_t j) {
        Rat acc = 0;
        for (std::size_t i = 0; i < corral.size(); ++i)
            acc += weights[i] * Rat(gram.entries[corral[i]][j]);
        return acc;
    };

    long guard = 0;
    const long guard_max = 1000 + static_cast<long>(p) * static_cast<long>(p) * 64;
    while (true) {
        require_internal(++guard < guard_max, "wolfe iteration guard exceeded");
        Rat normsq = 0;
        for (std::size_t i = 0; i < corral.size(); ++i) normsq += weights[i] * dot_with_x(corral[i]);
        // normsq computed as x.x via the corral expansion
        std::size_t best_j = p;
        Rat best_dot;
        for (std::size_t j = 0; j < p; ++j) {
            Rat d = dot_with_x(j);
            if (best_j == p || d < best_dot) {
                best_j = j;
                best_dot = d;
            }
        }
        if (best_dot >= normsq) break;  // first-order optimality, exact

        corral.push_back(best_j);
        weights.push_back(Rat(0));

        while (true) {
            require_internal(++guard < guard_max, "wolfe iteration guard exceeded");
            std::vector<Rat> lambda;
            Rat alpha;
            require_internal(detail::affine_minimizer(gram, corral, lambda, alpha),
                             "wolfe corral became affinely dependent");
            bool interior = true;
            for (const Rat& l : lambda)
                if (l <= 0) interior = false;
            if (interior) {
                weights = lambda;
                break;
            }
            // Step as far toward the affine minimizer as convexity allows.
            Rat theta = 1;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                if (lambda[i] <= 0 && weights[i] > lambda[i]) {
                    Rat cand = weights[i] / (weights[i] - lambda[i]);
                    if (cand < theta) theta = cand;
                }
            }
            std::vector<std::size_t> next_corral;
            std::vector<Rat> next_weights;
            bool deleted = false;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                Rat w = (1 - theta) * weights[i] + theta * lambda[i];
                if (w == 0 && !deleted) {
                    deleted = true;  // drop exactly one zero weight per pass
                    continue;
                }
                next_corral.push_back(corral[i]);
                next_weights.push_back(w);
            }
            require_internal(deleted, "wolfe line search failed to delete");
            corral = std::move(next_corral);
            weights = std::move(next_weights);
        }
    }

    MinNormCertificate c = detail::certificate_from(s, corral, weights);
    require_internal(certificate_valid(s, c), "wolfe produced an invalid certificate");
    return c;
}

// Dispatch: exhaustive face search up to the cap, Wolfe beyond it.
inline MinNormCertificate min_norm_point(const MetricPointSet& s,
                                         std::size_t face_search_cap = 10) {
    validate(s);
    if (s.points.size() <= face_search_cap) return min_norm_face_search(s);
    return min_norm_wolfe(s);
}

}  // namespace stratkit

#pragma once

#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "stratkit/errors.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

// Integer-coefficient power series truncated at a fixed degree K.  All
// arithmetic is exact modulo t^{K+1}; division is only defined for units
// (constant term +-1), which keeps every coefficient an integer.
class TruncatedSeries {
public:
    explicit TruncatedSeries(int truncation)
        : coeffs_(static_cast<std::size_t>(truncation) + 1, Int(0)) {
        require_input(truncation >= 0, "series", "truncation degree must be >= 0");
    }

    static TruncatedSeries one(int truncation) {
        TruncatedSeries s(truncation);
        s.coeffs_[0] = 1;
        return s;
    }

    int truncation() const { return static_cast<int>(coeffs_.size()) - 1; }

    const Int& operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
    Int& operator[](int i) { return coeffs_[static_cast<std::size_t>(i)]; }

    const std::vector<Int>& coeffs() const { return coeffs_; }

    TruncatedSeries restricted(int k) const {
        require_internal(k <= truncation(), "cannot extend a truncated series");
        TruncatedSeries s(k);
        for (int i = 0; i <= k; ++i) s[i] = coeffs_[static_cast<std::size_t>(i)];
        return s;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        require_internal(truncation() == o.truncation(), "truncation mismatch");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        require_internal(truncation() == o.truncation(), "truncation mismatch");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) {
        return a += b;
    }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) {
        return a -= b;
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        require_internal(a.truncation() == b.truncation(), "truncation mismatch");
        const int k = a.truncation();
        TruncatedSeries c(k);
        for (int i = 0; i <= k; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; i + j <= k; ++j) {
                if (b[j] == 0) continue;
                c[i + j] += a[i] * b[j];
            }
        }
        return c;
    }

    // Multiplies by the monomial t^k (coefficients above K fall away).
    TruncatedSeries shifted(int k) const {
        TruncatedSeries s(truncation());
        for (int i = 0; i + k <= truncation(); ++i) s[i + k] = coeffs_[static_cast<std::size_t>(i)];
        return s;
    }

    // Accumulates t^k * o into this series.
    void add_shifted(const TruncatedSeries& o, int k) {
        for (int i = 0; i + k <= truncation() && i <= o.truncation(); ++i)
            coeffs_[static_cast<std::size_t>(i + k)] += o[i];
    }

    bool is_unit() const { return coeffs_[0] == 1 || coeffs_[0] == -1; }

    // Coefficient recurrence for 1/u, valid for units.
    TruncatedSeries inverse() const {
        require_input(is_unit(), "series", "division requires a unit constant term");
        const int k = truncation();
        TruncatedSeries v(k);
        const Int u0 = coeffs_[0];
        v[0] = u0;  // 1/(+-1) = +-1
        for (int m = 1; m <= k; ++m) {
            Int acc = 0;
            for (int i = 1; i <= m; ++i) acc += coeffs_[static_cast<std::size_t>(i)] * v[m - i];
            v[m] = -acc * u0;
        }
        return v;
    }

    friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a * b.inverse();
    }

    // In-place multiplication by (1 - t^k)^{-1}: running k-strided prefix sums.
    void mul_geometric(int k) {
        for (int i = k; i <= truncation(); ++i)
            coeffs_[static_cast<std::size_t>(i)] += coeffs_[static_cast<std::size_t>(i - k)];
    }

    // In-place multiplication by (1 - t^k).
    void mul_one_minus(int k) {
        for (int i = truncation(); i >= k; --i)
            coeffs_[static_cast<std::size_t>(i)] -= coeffs_[static_cast<std::size_t>(i - k)];
    }

    bool operator==(const TruncatedSeries& o) const { return coeffs_ == o.coeffs_; }

private:
    std::vector<Int> coeffs_;
};

inline Int binomial(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (long long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// Generator degrees for the classifying-space cohomology at rank n:
// a_r in degree 2r (1 <= r <= n), b_r^j in degree 2r-1 (2g copies each),
// f_r in degree 2r-2 (2 <= r <= n).
struct GeneratorTable {
    std::vector<int> polynomial_degrees;          // even generators
    std::vector<std::pair<int, int>> exterior;    // (degree, count) odd generators
};

inline GeneratorTable generator_table(int n, Genus g) {
    require_input(n >= 1, "series", "rank must be positive");
    GeneratorTable t;
    for (int r = 1; r <= n; ++r) t.polynomial_degrees.push_back(2 * r);
    for (int r = 2; r <= n; ++r) t.polynomial_degrees.push_back(2 * r - 2);
    for (int r = 1; r <= n; ++r) t.exterior.emplace_back(2 * r - 1, 2 * g.value);
    return t;
}

// P_t(BG(n,d)) = prod_r (1+t^{2r-1})^{2g} / (prod_r (1-t^{2r}) * prod_{r>=2} (1-t^{2r-2})).
inline TruncatedSeries poincare_BG(int n, Genus g, int truncation) {
    const GeneratorTable table = generator_table(n, g);
    TruncatedSeries s = TruncatedSeries::one(truncation);
    for (const auto& [deg, count] : table.exterior) {
        // (1 + t^deg)^count expanded by binomials.
        TruncatedSeries f(truncation);
        for (long long j = 0; j * deg <= truncation; ++j)
            f[static_cast<int>(j * deg)] = binomial(count, j);
        s = s * f;
    }
    for (int deg : table.polynomial_degrees) s.mul_geometric(deg);
    return s;
}

using PoincareCache = std::map<std::tuple<long long, long long, int, int>, TruncatedSeries>;

// Equivariant series of the semistable stratum by the perfect-stratification
// recursion: P^G(C(n,d)^ss) = P(BG(n,d)) - sum over unstable types mu of
// t^{2 d_mu} prod_p P^G(C(n_p,d_p)^ss).  Twisting by a line bundle
// identifies degrees mod n, so the cache is keyed on (n, d mod n, g, K).
inline TruncatedSeries poincare_Css(long long n, long long d, Genus g, int truncation,
                                    PoincareCache& cache) {
    require_input(n >= 1, "series", "rank must be positive");
    const long long d_norm = ((d % n) + n) % n;
    const auto key = std::make_tuple(n, d_norm, g.value, truncation);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    TruncatedSeries result = poincare_BG(static_cast<int>(n), g, truncation);
    if (n > 1) {
        const long long max_codim = truncation / 2;
        for (const HNType& mu : enumerate_hn_types(n, d_norm, g, max_codim)) {
            if (mu.semistable()) continue;
            const long long d_mu = hn_codim(mu, g);
            const int shift = static_cast<int>(2 * d_mu);
            if (shift > truncation) continue;
            TruncatedSeries prod = TruncatedSeries::one(truncation - shift);
            for (const auto& [np, dp] : mu.blocks)
                prod = prod * poincare_Css(np, dp, g, truncation - shift, cache);
            TruncatedSeries term(truncation);
            term.add_shifted(prod, shift);
            result -= term;
        }
    }
    cache.emplace(key, result);
    return result;
}

inline TruncatedSeries poincare_Css(long long n, long long d, Genus g, int truncation) {
    PoincareCache cache;
    return poincare_Css(n, d, g, truncation, cache);
}

inline int poincare_M_default_truncation(long long n, Genus g) {
    return static_cast<int>(2 * (n * n * (g.value - 1) + 1) + 2);
}

// P_t(M(n,d)) = (1 - t^2) P^G(C(n,d)^ss) in the coprime case.  The result is
// a polynomial of degree 2(n^2(g-1)+1); the two coefficients beyond that are
// computed and checked to vanish.
inline TruncatedSeries poincare_M(long long n, long long d, Genus g, int truncation = -1) {
    require_input(std::gcd(n, d) == 1, "poincare",
                  "semistability and stability do not coincide: gcd(n, d) must be 1");
    const int def = poincare_M_default_truncation(n, g);
    const int K = truncation < 0 ? def : truncation;
    TruncatedSeries s = poincare_Css(n, d, g, K);
    s.mul_one_minus(2);
    const long long top = 2 * (n * n * (g.value - 1) + 1);
    for (long long i = top + 1; i <= K; ++i)
        require_internal(s[static_cast<int>(i)] == 0,
                         "nonzero coefficient above the moduli space dimension");
    return s;
}

}  // namespace stratkit

#pragma once

// Linear algebra over Z/N (Howell form, row-span membership) and the exact
// Van der Monde solves used to build basis series.

#include "arith.hpp"

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ckop {

using i64 = std::int64_t;

inline i64 mulmod(i64 a, i64 b, i64 n) { return static_cast<i64>((__int128)a * b % n); }

inline i64 modn(i64 a, i64 n) {
    a %= n;
    return a < 0 ? a + n : a;
}

inline i64 to_i64_mod(const Int& a, i64 n) { return mod(a, Int(static_cast<long>(n))).get_si(); }

struct ModMatrix {
    i64 modulus = 2;
    std::size_t cols = 0;
    std::vector<std::vector<i64>> rows;

    ModMatrix() = default;
    ModMatrix(i64 n, std::size_t c, std::vector<std::vector<i64>> r = {}) : modulus(n), cols(c), rows(std::move(r)) {
        if (n < 2 || n > (i64(1) << 62)) throw std::invalid_argument("modulus out of range");
        for (auto& row : rows) {
            if (row.size() != cols) throw std::invalid_argument("row length mismatch");
            for (auto& x : row) x = modn(x, modulus);
        }
    }
    static ModMatrix identity(i64 n, std::size_t d) {
        ModMatrix m(n, d);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<i64> r(d, 0);
            r[i] = 1;
            m.rows.push_back(r);
        }
        return m;
    }
    bool operator==(const ModMatrix&) const = default;
};

namespace detail {

inline void gcdex(i64 a, i64 b, i64& g, i64& s, i64& t) {
    // s*a + t*b = g = gcd(a, b) >= 0
    i64 s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        i64 q = a / b;
        i64 r = a - q * b;
        a = b;
        b = r;
        i64 s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
        i64 t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    if (a < 0) a = -a, s0 = -s0, t0 = -t0;
    g = a;
    s = s0;
    t = t0;
}

// unit u mod n with u*a = gcd(a, n) (mod n)
inline i64 unit_normalizer(i64 a, i64 n) {
    i64 g = std::gcd(a, n);
    if (g == n) return 1;
    i64 m = n / g;
    i64 u = 0;
    if (m > 1) {
        i64 gg, s, t;
        gcdex(modn(a / g, m), m, gg, s, t);
        u = modn(s, m);
    }
    while (std::gcd(u, n) != 1) u += m;
    return u % n;
}

struct TrackedRow {
    std::vector<i64> v;
    std::vector<i64> u;  // combination of the input rows producing v
};

inline bool nonzero(const std::vector<i64>& v) {
    for (auto x : v)
        if (x) return true;
    return false;
}

inline std::vector<TrackedRow> howell_rows(const ModMatrix& A, bool track) {
    const i64 N = A.modulus;
    const std::size_t nr = A.rows.size();
    std::vector<TrackedRow> work;
    for (std::size_t i = 0; i < nr; ++i) {
        TrackedRow r{A.rows[i], {}};
        if (track) {
            r.u.assign(nr, 0);
            r.u[i] = 1;
        }
        if (nonzero(r.v)) work.push_back(std::move(r));
    }
    auto lin = [&](i64 x, const TrackedRow& a, i64 y, const TrackedRow& b) {
        TrackedRow o;
        o.v.resize(a.v.size());
        for (std::size_t k = 0; k < a.v.size(); ++k) o.v[k] = modn(mulmod(x, a.v[k], N) + mulmod(y, b.v[k], N), N);
        if (track) {
            o.u.resize(a.u.size());
            for (std::size_t k = 0; k < a.u.size(); ++k)
                o.u[k] = modn(mulmod(x, a.u[k], N) + mulmod(y, b.u[k], N), N);
        }
        return o;
    };
    std::vector<TrackedRow> out;
    for (std::size_t c = 0; c < A.cols; ++c) {
        std::optional<TrackedRow> piv;
        std::vector<TrackedRow> rest;
        for (auto& row : work) {
            if (row.v[c] == 0) {
                rest.push_back(std::move(row));
                continue;
            }
            if (!piv) {
                piv = std::move(row);
                continue;
            }
            i64 a = piv->v[c], b = row.v[c], g, s, t;
            gcdex(a, b, g, s, t);
            TrackedRow np = lin(modn(s, N), *piv, modn(t, N), row);
            TrackedRow nr2 = lin(modn(-(b / g), N), *piv, modn(a / g, N), row);
            piv = std::move(np);
            if (nonzero(nr2.v)) rest.push_back(std::move(nr2));
        }
        if (!piv) {
            work = std::move(rest);
            continue;
        }
        i64 u = unit_normalizer(piv->v[c], N);
        TrackedRow zero{std::vector<i64>(A.cols, 0), std::vector<i64>(track ? nr : 0, 0)};
        *piv = lin(u, *piv, 0, zero);
        const i64 p = piv->v[c];
        for (auto& o : out) {
            i64 q = o.v[c] / p;
            if (q) o = lin(1, o, modn(-q, N), *piv);
        }
        TrackedRow extra = lin(N / p, *piv, 0, zero);
        if (nonzero(extra.v)) rest.push_back(std::move(extra));
        out.push_back(std::move(*piv));
        work = std::move(rest);
    }
    return out;
}

inline std::size_t lead(const std::vector<i64>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) return i;
    return v.size();
}

}  // namespace detail

// Howell normal form: nonzero rows only, pivots ascending.
inline ModMatrix howell_form(const ModMatrix& A) {
    ModMatrix H(A.modulus, A.cols);
    for (auto& r : detail::howell_rows(A, false)) H.rows.push_back(std::move(r.v));
    return H;
}

struct SpanResult {
    bool member = false;
    std::vector<i64> coefficients;  // over the rows of A, when member
};

inline SpanResult in_row_span(const ModMatrix& A, const std::vector<i64>& v) {
    if (v.size() != A.cols) throw std::invalid_argument("dimension mismatch in in_row_span");
    const i64 N = A.modulus;
    auto H = detail::howell_rows(A, true);
    std::vector<i64> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = modn(v[i], N);
    std::vector<i64> coef(A.rows.size(), 0);
    for (auto& r : H) {
        std::size_t c = detail::lead(r.v);
        i64 p = r.v[c];
        if (w[c] % p) return {};
        i64 q = w[c] / p;
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = modn(w[k] - mulmod(q, r.v[k], N), N);
        for (std::size_t k = 0; k < coef.size(); ++k) coef[k] = modn(coef[k] + mulmod(q, r.u[k], N), N);
    }
    if (detail::nonzero(w)) return {};
    return {true, coef};
}

// Membership against an already computed Howell form (no certificate).
inline bool howell_contains(const ModMatrix& H, std::vector<i64> w) {
    const i64 N = H.modulus;
    for (auto& x : w) x = modn(x, N);
    for (auto& r : H.rows) {
        std::size_t c = detail::lead(r);
        i64 p = r[c];
        if (w[c] % p) return false;
        i64 q = w[c] / p;
        if (q)
            for (std::size_t k = c; k < w.size(); ++k) w[k] = modn(w[k] - mulmod(q, r[k], N), N);
    }
    return !detail::nonzero(w);
}

// Reduce w by a Howell form; the result is the canonical coset representative.
inline std::vector<i64> howell_reduce(const ModMatrix& H, std::vector<i64> w, std::size_t from_col = 0) {
    const i64 N = H.modulus;
    for (auto& x : w) x = modn(x, N);
    for (auto& r : H.rows) {
        std::size_t c = detail::lead(r);
        if (c < from_col) continue;
        i64 q = w[c] / r[c];
        if (q)
            for (std::size_t k = c; k < w.size(); ++k) w[k] = modn(w[k] - mulmod(q, r[k], N), N);
    }
    return w;
}

// Exact solve of a square rational system; throws on singular input.
inline std::vector<Rational> solve_rational(std::vector<std::vector<Rational>> M, std::vector<Rational> b) {
    const std::size_t n = M.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && M[piv][c] == 0) ++piv;
        if (piv == n) throw std::domain_error("singular system");
        std::swap(M[piv], M[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || M[r][c] == 0) continue;
            Rational f = M[r][c] / M[c][c];
            for (std::size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / M[i][i];
    return x;
}

// L_a = (binom(a,0), ..., binom(a,n-1)); solves sum x_i L_{a_i} = target.
inline std::vector<Rational> solve_vandermonde(const std::vector<Int>& nodes, const std::vector<Rational>& target) {
    const std::size_t n = nodes.size();
    if (target.size() != n) throw std::invalid_argument("target length must equal the number of nodes");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (nodes[i] == nodes[j]) throw std::domain_error("repeated Van der Monde node " + nodes[i].get_str());
    std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) M[k][j] = Rational(binomial(nodes[j], k));
    return solve_rational(std::move(M), target);
}

// Same system over Z/p^e; fails when a solution is not p-integral.
inline std::vector<Int> solve_vandermonde_mod(const std::vector<Int>& nodes, const std::vector<Int>& target, long p,
                                              int e) {
    std::vector<Rational> t(target.begin(), target.end());
    auto x = solve_vandermonde(nodes, t);
    Int pe = ipow(p, e);
    std::vector<Int> out;
    for (auto& q : x) {
        if (mod(Int(q.get_den()), Int(p)) == 0)
            throw PrecisionError("solution has p-adic denominator " + q.get_den().get_str() + " at p=" +
                                 std::to_string(p));
        out.push_back(reduce_mod(q, pe));
    }
    return out;
}

}  // namespace ckop

#pragma once

// Independent reference computations for the tests. Nothing here calls the
// routine it is used to check.

#include "ckop/arith.hpp"

#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using ckop::Int;
using ckop::Rational;

// x with x = r_i (mod m_i), by scanning 0..prod-1.
inline long crt_scan(const std::vector<std::pair<long, long>>& pairs) {
    long M = 1;
    for (auto& [r, m] : pairs) M *= m;
    for (long x = 0; x < M; ++x) {
        bool ok = true;
        for (auto& [r, m] : pairs) ok = ok && ((x - r) % m + m) % m == 0;
        if (ok) return x;
    }
    return -1;
}

// Multivariate polynomials truncated at total degree T.
using Mono = std::vector<int>;
using Poly = std::map<Mono, Rational>;

inline int deg(const Mono& m) {
    int d = 0;
    for (int x : m) d += x;
    return d;
}

inline Poly mul(const Poly& a, const Poly& b, int T) {
    Poly r;
    for (auto& [ma, ca] : a)
        for (auto& [mb, cb] : b) {
            Mono m(ma.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
            if (deg(m) > T) continue;
            r[m] += ca * cb;
        }
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

inline void add_to(Poly& a, const Poly& b, const Rational& k = 1) {
    for (auto& [m, c] : b) {
        a[m] += k * c;
        if (a[m] == 0) a.erase(m);
    }
}

inline Poly constant(int n, const Rational& c) {
    Poly p;
    if (c != 0) p[Mono(n, 0)] = c;
    return p;
}

inline Poly variable(int n, int i) {
    Poly p;
    Mono m(n, 0);
    m[i] = 1;
    p[m] = 1;
    return p;
}

// Substitute polynomials for the variables of G (n_in vars) into n_out vars.
inline Poly substitute(const Poly& G, const std::vector<Poly>& subs, int n_out, int T) {
    Poly out;
    for (auto& [m, c] : G) {
        Poly term = constant(n_out, c);
        for (std::size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < m[i]; ++k) term = mul(term, subs[i], T);
        add_to(out, term);
    }
    return out;
}

// G(x1*x2, x3..) - G(x1, x3..) - G(x2, x3..) + G(0, x3..), with x*y = x + y - xy
// (mult) or x + y (add), by direct substitution.
inline Poly partial(const Poly& G, int nvars, int T, bool mult) {
    int no = nvars + 1;
    Poly sum = variable(no, 0);
    add_to(sum, variable(no, 1));
    if (mult) add_to(sum, mul(variable(no, 0), variable(no, 1), T), -1);
    auto rest = [&](Poly first) {
        std::vector<Poly> s{first};
        for (int i = 1; i < nvars; ++i) s.push_back(variable(no, i + 1));
        return s;
    };
    Poly out = substitute(G, rest(sum), no, T);
    add_to(out, substitute(G, rest(variable(no, 0)), no, T), -1);
    add_to(out, substitute(G, rest(variable(no, 1)), no, T), -1);
    add_to(out, substitute(G, rest(Poly{}), no, T));
    return out;
}

inline Poly univariate(const std::vector<Rational>& c) {
    Poly p;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) p[Mono{static_cast<int>(i)}] = c[i];
    return p;
}

// Unsigned Stirling numbers of the first kind.
inline std::vector<std::vector<Int>> stirling1(int n) {
    std::vector<std::vector<Int>> c(n + 1, std::vector<Int>(n + 1, Int(0)));
    c[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k) c[i][k] = Int(i - 1) * c[i - 1][k] + c[i - 1][k - 1];
    return c;
}

// lg_r = (-1)^r sum_k c(k, r) x^k / k!
inline std::vector<Rational> lg(int r, int T) {
    auto c = stirling1(T);
    std::vector<Rational> out(T + 1);
    for (int k = 0; k <= T; ++k) {
        if (r > k) continue;
        Rational v = Rational(c[k][r]) / Rational(ckop::factorial(k));
        out[k] = (r % 2) ? Rational(-v) : v;
    }
    return out;
}

// (1 - x)^r by repeated multiplication (r >= 0) or geometric inversion (r < 0).
inline std::vector<Int> adams(long r, int T) {
    std::vector<Int> a(T + 1, Int(0));
    a[0] = 1;
    long steps = r >= 0 ? r : -r;
    for (long s = 0; s < steps; ++s) {
        std::vector<Int> b(T + 1, Int(0));
        for (int i = 0; i <= T; ++i) {
            if (r >= 0) {
                b[i] += a[i];
                if (i + 1 <= T) b[i + 1] -= a[i];
            } else {
                for (int j = i; j <= T; ++j) b[j] += a[i];  // times 1/(1-x)
            }
        }
        a = b;
    }
    return a;
}

// All elements of the row span of A mod N (tiny sizes only).
inline std::set<std::vector<long>> span(const std::vector<std::vector<long>>& A, long N, std::size_t cols) {
    std::set<std::vector<long>> S{std::vector<long>(cols, 0)};
    for (auto& row : A) {
        std::set<std::vector<long>> next;
        for (auto& v : S)
            for (long k = 0; k < N; ++k) {
                std::vector<long> w = v;
                for (std::size_t i = 0; i < cols; ++i) w[i] = ((w[i] + k * row[i]) % N + N) % N;
                next.insert(w);
            }
        S = std::move(next);
    }
    return S;
}

// Least d > 0 with d x^n congruent mod x^{n+1} to some Phi^r(H), H in Z[x]:
// integer elimination on the rows Phi^r(x^k) mod x^{n+1}, k <= n + r.
inline Int tower_min_lead(int n, int r) {
    std::vector<std::vector<Int>> rows;
    for (int k = 0; k <= n + r; ++k) {
        std::vector<Int> c(n + r + 1, Int(0));
        c[k] = 1;
        for (int s = 0; s < r; ++s) {
            std::vector<Int> d(c.size(), Int(0));
            for (std::size_t i = 0; i < c.size(); ++i) {
                d[i] += Int(static_cast<long>(i)) * c[i];
                if (i + 1 < c.size()) d[i] -= Int(static_cast<long>(i + 1)) * c[i + 1];
            }
            c = d;
        }
        rows.emplace_back(c.begin(), c.begin() + n + 1);
    }
    for (int col = 0; col < n; ++col) {
        // Euclid down the column until one row holds its gcd, then drop that row
        for (;;) {
            std::vector<std::size_t> nz;
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (rows[i][col] != 0) nz.push_back(i);
            if (nz.size() <= 1) {
                if (!nz.empty()) rows.erase(rows.begin() + static_cast<long>(nz[0]));
                break;
            }
            std::size_t piv = nz[0];
            for (auto i : nz)
                if (abs(rows[i][col]) < abs(rows[piv][col])) piv = i;
            for (auto i : nz) {
                if (i == piv) continue;
                Int q = rows[i][col] / rows[piv][col];
                for (int j = 0; j <= n; ++j) rows[i][j] -= q * rows[piv][j];
            }
        }
    }
    Int g = 0;
    for (auto& row : rows) g = gcd(g, row[n]);
    return g;
}

struct Rng {
    std::mt19937_64 g;
    explicit Rng(unsigned long long seed) : g(seed) {}
    long range(long lo, long hi) { return lo + static_cast<long>(g() % static_cast<unsigned long long>(hi - lo + 1)); }
    Rational rational(long num = 9, long den = 6) {
        Rational q(Int(range(-num, num)), Int(range(1, den)));
        q.canonicalize();
        return q;
    }
};

}  // namespace oracle

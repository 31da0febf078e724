#pragma once

// Multivariate series truncated at total degree T, the formal-group-law
// partial derivative and its iterates, symmetry tests and integration.

#include "series.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace ckop {

enum class Fgl { Mult, Add };  // x + y - xy  |  x + y

using Mono = std::vector<int>;

inline int degree(const Mono& m) {
    int d = 0;
    for (int x : m) d += x;
    return d;
}

// General (unsorted-key) container.
template <class C>
struct MultiSeries {
    int nvars = 1;
    int trunc = 0;
    Fgl fgl = Fgl::Mult;
    std::map<Mono, C> terms;

    C coeff(const Mono& m) const {
        auto it = terms.find(m);
        return it == terms.end() ? C(0) : it->second;
    }
    void add(const Mono& m, const C& v) {
        if (degree(m) > trunc || is_zero_value(v)) return;
        auto [it, fresh] = terms.try_emplace(m, v);
        if (!fresh) {
            it->second += v;
            if (is_zero_value(it->second)) terms.erase(it);
        }
    }
    bool operator==(const MultiSeries& o) const {
        if (nvars != o.nvars || trunc != o.trunc) return false;
        for (auto& [m, v] : terms)
            if (!(o.coeff(m) == v)) return false;
        for (auto& [m, v] : o.terms)
            if (!(coeff(m) == v)) return false;
        return true;
    }
};

// Symmetric storage: keys are sorted exponent tuples.
template <class C>
struct SymSeries {
    int nvars = 1;
    int trunc = 0;
    Fgl fgl = Fgl::Mult;
    std::map<Mono, C> coeffs;

    C coeff(Mono m) const {
        std::sort(m.begin(), m.end());
        auto it = coeffs.find(m);
        return it == coeffs.end() ? C(0) : it->second;
    }
};

// Enumerate all exponent vectors of length n and total degree <= T.
inline void for_each_mono(int n, int T, const std::function<void(const Mono&)>& f) {
    Mono m(n, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == n) {
            f(m);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            m[i] = a;
            rec(i + 1, left - a);
        }
        m[i] = 0;
    };
    rec(0, T);
}

template <class C>
MultiSeries<C> expand(const SymSeries<C>& S) {
    MultiSeries<C> G{S.nvars, S.trunc, S.fgl, {}};
    for (auto& [k, v] : S.coeffs) {
        Mono m = k;
        do G.terms[m] = v;
        while (std::next_permutation(m.begin(), m.end()));
    }
    return G;
}

template <class C>
bool is_symmetric(const MultiSeries<C>& G) {
    for (auto& [m, v] : G.terms) {
        Mono s = m;
        std::sort(s.begin(), s.end());
        do
            if (!(G.coeff(s) == v)) return false;
        while (std::next_permutation(s.begin(), s.end()));
    }
    return true;
}

template <class C>
std::optional<SymSeries<C>> as_symmetric(const MultiSeries<C>& G) {
    if (!is_symmetric(G)) return std::nullopt;
    SymSeries<C> S{G.nvars, G.trunc, G.fgl, {}};
    for (auto& [m, v] : G.terms)
        if (std::is_sorted(m.begin(), m.end())) S.coeffs[m] = v;
    return S;
}

template <class C>
MultiSeries<C> univariate(const Series<C>& G, Fgl fgl = Fgl::Mult) {
    MultiSeries<C> M{1, G.trunc, fgl, {}};
    for (int i = 0; i <= G.trunc; ++i) M.add({i}, G.c[i]);
    return M;
}

// x_I: iterated formal sum of k variables.
inline MultiSeries<Rational> star_sum(int k, Fgl fgl, int T) {
    MultiSeries<Rational> S{std::max(k, 1), T, fgl, {}};
    if (k == 0) return S;
    if (fgl == Fgl::Add) {
        for (int i = 0; i < k; ++i) {
            Mono m(k, 0);
            m[i] = 1;
            S.add(m, 1);
        }
        return S;
    }
    // 1 - prod (1 - x_i)
    for (int mask = 1; mask < (1 << k); ++mask) {
        Mono m(k, 0);
        int bits = 0;
        for (int i = 0; i < k; ++i)
            if (mask >> i & 1) m[i] = 1, ++bits;
        S.add(m, Rational(bits % 2 ? 1 : -1));
    }
    return S;
}

namespace detail {

// [x1^s x2^t] (x1 * x2)^a under the chosen law
inline Int star_power_coeff(Fgl fgl, int a, int s, int t) {
    if (fgl == Fgl::Add) return (s + t == a) ? binomial(Int(a), s) : Int(0);
    // (x1 + x2 - x1 x2)^a: x1^i x2^j (x1 x2)^k with i+j+k = a, s = i+k, t = j+k
    Int acc = 0;
    for (int k = 0; k <= std::min(s, t); ++k) {
        int i = s - k, j = t - k;
        if (i + j + k != a) continue;
        Int m = factorial(a) / (factorial(i) * factorial(j) * factorial(k));
        acc += (k % 2) ? Int(-m) : m;
    }
    return acc;
}

}  // namespace detail

// (dG)(x1..x_{n+1}) = G(x1*x2, x3, ...) - G(x1, x3, ...) - G(x2, x3, ...) + G(0, x3, ...)
template <class C>
MultiSeries<C> partial_derivative(const MultiSeries<C>& G) {
    const int T = G.trunc;
    MultiSeries<C> D{G.nvars + 1, T, G.fgl, {}};
    std::map<std::tuple<int, int, int>, Int> cache;
    for (auto& [m, v] : G.terms) {
        int a = m[0];
        if (a == 0) continue;  // all four terms cancel
        int rest = degree(m) - a;
        for (int s = 1; s + 1 + rest <= T; ++s)
            for (int t = 1; s + t + rest <= T; ++t) {
                auto key = std::make_tuple(a, s, t);
                auto it = cache.find(key);
                if (it == cache.end()) it = cache.emplace(key, detail::star_power_coeff(G.fgl, a, s, t)).first;
                if (it->second == 0) continue;
                Mono out(G.nvars + 1);
                out[0] = s;
                out[1] = t;
                for (int i = 1; i < G.nvars; ++i) out[i + 1] = m[i];
                D.add(out, C(it->second) * v);
            }
    }
    return D;
}

template <class C>
MultiSeries<C> partial_zero(const MultiSeries<C>& G) {
    // d^0 G = G - G(0, x2, ...)
    MultiSeries<C> D = G;
    for (auto it = D.terms.begin(); it != D.terms.end();)
        it = (it->first[0] == 0) ? D.terms.erase(it) : std::next(it);
    return D;
}

// m-fold application of the partial derivative (m = 0 gives d^0).
template <class C>
MultiSeries<C> iter_partial_repeated(const MultiSeries<C>& G, int m) {
    if (m == 0) return partial_zero(G);
    MultiSeries<C> D = G;
    for (int i = 0; i < m; ++i) D = partial_derivative(D);
    return D;
}

// Subset-sum form: (d^m G)(x_1..x_{m+1}) = sum_I (-1)^{m+1-|I|} G(x_I).
template <class C>
MultiSeries<C> iter_partial(const Series<C>& G, int m, Fgl fgl = Fgl::Mult) {
    const int T = G.trunc;
    const int n = m + 1;
    MultiSeries<C> D{n, T, fgl, {}};
    std::vector<C> beta;
    if (fgl == Fgl::Mult) beta = one_minus_x_basis(G);
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) idx.push_back(i);
        const int k = static_cast<int>(idx.size());
        const bool neg = (n - k) % 2;
        if (k == 0) {
            D.add(Mono(n, 0), neg ? C(0) - G.c[0] : G.c[0]);
            continue;
        }
        for_each_mono(k, T, [&](const Mono& a) {
            C v(0);
            if (fgl == Fgl::Mult) {
                // G(x_I) = sum_j beta_j prod_{i in I} (1 - x_i)^j
                for (int j = 0; j <= T; ++j) {
                    if (is_zero_value(beta[j])) continue;
                    Int w = 1;
                    for (int ai : a) {
                        if (ai > j) {
                            w = 0;
                            break;
                        }
                        w *= binomial(Int(j), ai);
                    }
                    if (w == 0) continue;
                    if (degree(a) % 2) w = -w;
                    v += C(w) * beta[j];
                }
            } else {
                int d = degree(a);
                Int w = factorial(d);
                for (int ai : a) w /= factorial(ai);
                v = C(w) * G.c[d];
            }
            Mono full(n, 0);
            for (int i = 0; i < k; ++i) full[idx[i]] = a[i];
            D.add(full, neg ? C(0) - v : v);
        });
    }
    return D;
}

// Restriction to the diagonal x_1 = ... = x_n = x.
template <class C>
Series<C> diagonal(const MultiSeries<C>& G, RingKind ring = RingKind::Q) {
    Series<C> s(ring, G.trunc);
    for (auto& [m, v] : G.terms) s.c[degree(m)] += v;
    return s;
}

template <class C>
std::optional<int> min_degree(const MultiSeries<C>& G) {
    std::optional<int> best;
    for (auto& [m, v] : G.terms)
        if (!best || degree(m) < *best) best = degree(m);
    return best;
}

inline bool all_integral(const MultiSeries<Rational>& G) {
    for (auto& [m, v] : G.terms)
        if (!is_integer(v)) return false;
    return true;
}

inline bool all_integer_consistent(const MultiSeries<Zhat>& G) {
    for (auto& [m, v] : G.terms)
        if (!integer_consistent(v)) return false;
    return true;
}

template <class C>
bool is_double_symmetric(const SymSeries<C>& S) {
    auto G = expand(S);
    if (S.nvars == 1) return true;
    return is_symmetric(G) && is_symmetric(partial_derivative(G));
}

template <class C>
bool is_double_symmetric(const MultiSeries<C>& G) {
    if (G.nvars == 1) return true;
    return is_symmetric(G) && is_symmetric(partial_derivative(G));
}

struct NotIntegrable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Univariate L with d^{n-1} L = G, normalised to have no lg_0..lg_{n-1}
// component (valuation >= n in y = log(1-x)).
inline QSeries integrate_symmetric(const SymSeries<Rational>& S) {
    const int n = S.nvars;
    const int T = S.trunc;
    auto G = expand(S);
    for (auto& [m, v] : G.terms)
        for (int e : m)
            if (e == 0) throw NotIntegrable("G is not divisible by x_1...x_n");
    QSeries L(RingKind::Q, T);
    if (S.fgl == Fgl::Add) {
        // d^{n-1}(x^k) = sum over alpha >= 1, |alpha| = k of multinomial(k; alpha) x^alpha
        for (int k = n; k <= T; ++k) {
            Mono a(n, 1);
            a[0] = k - n + 1;
            Int mult = factorial(k) / factorial(k - n + 1);
            L.c[k] = G.coeff(a) / Rational(mult);
        }
    } else {
        // y_i = log(1 - x_i) turns the multiplicative law into the additive one; only
        // the coefficients at (k-n+1, 1, ..., 1) in y are needed.
        // x = 1 - e^y: powers P_b(y) = x^b as series in y
        std::vector<QSeries> P(T + 1, QSeries(RingKind::Q, T));
        QSeries xy(RingKind::Q, T);
        for (int i = 1; i <= T; ++i) xy.c[i] = Rational(-1) / Rational(factorial(i));
        P[0].c[0] = 1;
        for (int b = 1; b <= T; ++b) P[b] = P[b - 1] * xy;
        for (int k = n; k <= T; ++k) {
            Mono alpha(n, 1);
            alpha[0] = k - n + 1;
            Rational gy = 0;
            for (auto& [m, v] : G.terms) {
                Rational w = v;
                for (int i = 0; i < n && w != 0; ++i) w *= (m[i] <= alpha[i]) ? P[m[i]].c[alpha[i]] : Rational(0);
                gy += w;
            }
            Int mult = factorial(k) / factorial(k - n + 1);
            Rational mk = gy / Rational(mult);  // coefficient of y^k in M
            if (mk != 0) L = L + scale(Rational(mk * factorial(k)), lg_series(k, T));
        }
    }
    auto back = iter_partial(L, n - 1, S.fgl);
    if (!(back == G)) throw NotIntegrable("G is not double-symmetric within truncation");
    return L;
}

// Checks d^n G = sum_k (1/k!) d^{n-1}((1-x)^k G^{(k)})(x_1..x_n) x_{n+1}^k.
inline bool aformula_check(const QSeries& G, int n) {
    const int T = G.trunc;
    auto lhs = iter_partial(G, n);
    MultiSeries<Rational> rhs{n + 1, T, Fgl::Mult, {}};
    QSeries deriv = G;
    for (int k = 1; k <= T; ++k) {
        // k-th ordinary derivative, truncation T-k
        QSeries d(RingKind::Q, T - k);
        for (int i = 0; i <= T - k; ++i) d.c[i] = deriv.c[i + 1] * (i + 1);
        deriv = d;
        QSeries onemx = adams_series(Int(k), T - k);
        QSeries Hk = onemx * deriv;
        auto part = iter_partial(Hk, n - 1);
        Rational w = Rational(1) / Rational(factorial(k));
        for (auto& [m, v] : part.terms) {
            Mono out = m;
            out.push_back(k);
            rhs.add(out, w * v);
        }
    }
    return lhs == rhs;
}

}  // namespace ckop

#pragma once

// Univariate truncated power series over Q, Z and Zhat, the operator
// Phi = (x-1) d/dx, Adams and logarithm series, the composition product and
// the b-map to sequences.

#include "arith.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckop {

enum class RingKind { Q, Z, Profinite };

inline const char* ring_name(RingKind k) {
    switch (k) {
        case RingKind::Q: return "Q";
        case RingKind::Z: return "Z";
        default: return "profinite";
    }
}

// Dense series c_0 + ... + c_T x^T, known modulo x^{T+1}.
template <class C>
struct Series {
    RingKind ring = RingKind::Q;
    PrimeBudget budget;  // only meaningful for Profinite
    int trunc = 0;
    std::vector<C> c;
    Ledger ledger;

    Series() : c(1, C(0)) {}
    Series(RingKind r, int T, PrimeBudget b = {}) : ring(r), budget(std::move(b)), trunc(T), c(T + 1, C(0)) {
        if (T < 0) throw std::invalid_argument("truncation must be >= 0");
    }
    Series(RingKind r, int T, std::vector<C> coeffs, PrimeBudget b = {}) : Series(r, T, std::move(b)) {
        if (coeffs.size() > static_cast<std::size_t>(T) + 1) coeffs.resize(T + 1);
        for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i];
        check();
    }

    void check() const {
        if (c.size() != static_cast<std::size_t>(trunc) + 1) throw std::logic_error("series length != T+1");
        if constexpr (std::is_same_v<C, Rational>) {
            if (ring == RingKind::Z)
                for (auto& x : c)
                    if (!is_integer(x)) throw std::invalid_argument("non-integer coefficient in Z series");
        }
    }

    const C& operator[](int i) const { return c.at(i); }
    C& operator[](int i) { return c.at(i); }
    C coeff(int i) const { return i <= trunc ? c[i] : C(0); }

    Series with_coeffs(int T) const {
        Series s = *this;
        s.trunc = T;
        s.c.assign(T + 1, C(0));
        return s;
    }
};

using QSeries = Series<Rational>;
using ZhatSeries = Series<Zhat>;

// Sequence window a_start .. a_{start+len-1}.
template <class C>
struct SeqWindow {
    long start = 0;
    std::vector<C> values;

    long end() const { return start + static_cast<long>(values.size()) - 1; }
    bool covers(long i) const { return i >= start && i <= end(); }
    const C& at(long i) const {
        if (!covers(i)) throw std::out_of_range("index " + std::to_string(i) + " outside window");
        return values[i - start];
    }
    C& at(long i) {
        if (!covers(i)) throw std::out_of_range("index " + std::to_string(i) + " outside window");
        return values[i - start];
    }
    bool operator==(const SeqWindow&) const = default;
};

inline QSeries q_series(std::vector<Rational> c, int T = -1) {
    if (T < 0) T = static_cast<int>(c.size()) - 1;
    return QSeries(RingKind::Q, T, std::move(c));
}

inline QSeries z_series(const std::vector<Int>& c, int T = -1) {
    if (T < 0) T = static_cast<int>(c.size()) - 1;
    std::vector<Rational> q(c.begin(), c.end());
    return QSeries(RingKind::Z, T, std::move(q));
}

inline QSeries monomial(const Rational& a, int k, int T, RingKind r = RingKind::Q) {
    QSeries s(r, T);
    if (k <= T) s[k] = a;
    return s;
}

template <class C>
bool is_zero_value(const C& x) {
    if constexpr (std::is_same_v<C, Zhat>)
        return x.is_zero();
    else
        return x == 0;
}

template <class C>
Series<C> truncate(const Series<C>& G, int T) {
    if (T > G.trunc) throw PrecisionError("cannot raise truncation from " + std::to_string(G.trunc) + " to " +
                                          std::to_string(T));
    Series<C> s = G;
    s.c.resize(T + 1);
    s.trunc = T;
    return s;
}

template <class C>
void require_same_shape(const Series<C>& a, const Series<C>& b) {
    if (a.trunc != b.trunc) throw std::invalid_argument("truncation mismatch");
}

template <class C>
Series<C> operator+(const Series<C>& a, const Series<C>& b) {
    require_same_shape(a, b);
    Series<C> s = a;
    for (int i = 0; i <= a.trunc; ++i) s.c[i] = a.c[i] + b.c[i];
    s.ledger.absorb(b.ledger);
    if (b.ring == RingKind::Q) s.ring = RingKind::Q;
    return s;
}

template <class C>
Series<C> operator-(const Series<C>& a, const Series<C>& b) {
    require_same_shape(a, b);
    Series<C> s = a;
    for (int i = 0; i <= a.trunc; ++i) s.c[i] = a.c[i] - b.c[i];
    s.ledger.absorb(b.ledger);
    if (b.ring == RingKind::Q) s.ring = RingKind::Q;
    return s;
}

template <class C>
Series<C> scale(const C& k, const Series<C>& a) {
    Series<C> s = a;
    for (auto& x : s.c) x = k * x;
    if constexpr (std::is_same_v<C, Rational>)
        if (!is_integer(k)) s.ring = RingKind::Q;
    return s;
}

template <class C>
Series<C> operator*(const Series<C>& a, const Series<C>& b) {
    require_same_shape(a, b);
    Series<C> s = a.with_coeffs(a.trunc);
    for (int i = 0; i <= a.trunc; ++i) {
        if (is_zero_value(a.c[i])) continue;
        for (int j = 0; i + j <= a.trunc; ++j) s.c[i + j] += a.c[i] * b.c[j];
    }
    s.ledger.absorb(b.ledger);
    if (b.ring == RingKind::Q) s.ring = RingKind::Q;
    return s;
}

template <class C>
bool operator==(const Series<C>& a, const Series<C>& b) {
    if (a.trunc != b.trunc) return false;
    for (int i = 0; i <= a.trunc; ++i)
        if (!(a.c[i] == b.c[i])) return false;
    return true;
}

// Smallest i with c_i != 0; nullopt means every stored coefficient vanishes.
template <class C>
std::optional<int> valuation(const Series<C>& G) {
    for (int i = 0; i <= G.trunc; ++i)
        if (!is_zero_value(G.c[i])) return i;
    return std::nullopt;
}

// [x^k] Phi(G) = k c_k - (k+1) c_{k+1}; truncation drops by one.
template <class C>
Series<C> phi(const Series<C>& G) {
    if (G.trunc < 1) throw PrecisionError("Phi needs truncation >= 1 (truncation exhausted)");
    Series<C> s = G.with_coeffs(G.trunc - 1);
    for (int k = 0; k < G.trunc; ++k) s.c[k] = C(Int(k)) * G.c[k] - C(Int(k + 1)) * G.c[k + 1];
    s.ledger.trunc_drop += 1;
    return s;
}

template <class C>
Series<C> phi_power(Series<C> G, int r) {
    for (int i = 0; i < r; ++i) G = phi(G);
    return G;
}

// Desuspension: Phi(G) for n <= 1, Phi(G) - Phi(G)(0) otherwise.
template <class C>
Series<C> desuspend(const Series<C>& G, int n) {
    Series<C> s = phi(G);
    if (n > 1) s.c[0] = C(0);
    return s;
}

// A_r = (1 - x)^r for an integer r.
inline QSeries adams_series(const Int& r, int T) {
    QSeries s(RingKind::Z, T);
    for (int k = 0; k <= T; ++k) {
        Int b = binomial(r, k);
        s.c[k] = (k % 2) ? Rational(-b) : Rational(b);
    }
    return s;
}

// A_r for profinite r; coefficient k is known mod p^{e_p - v_p(k!)}.
inline ZhatSeries adams_series(const Zhat& r, const PrimeBudget& budget, int T) {
    ZhatSeries s(RingKind::Profinite, T, budget);
    if (r.is_exact()) {
        auto a = adams_series(r.exact_value(), T);
        for (int k = 0; k <= T; ++k) s.c[k] = Zhat(Int(a.c[k].get_num()));
        return s;
    }
    for (int k = 0; k <= T; ++k) {
        std::vector<Zhat::Component> cs;
        for (auto& [p, e_budget] : budget.entries()) {
            int e = r.precision(p) - static_cast<int>(vp_factorial(k, p));
            if (e < 1)
                throw PrecisionError("A_r up to x^" + std::to_string(T) + " needs r mod " + std::to_string(p) + "^" +
                                     std::to_string(1 + vp_factorial(T, p)));
            Int b = gen_binomial(r, k, p, e);
            cs.push_back({p, e, (k % 2) ? Int(-b) : b});
            int loss = static_cast<int>(vp_factorial(k, p));
            s.ledger.exponent_loss[p] = std::max(s.ledger.exponent_loss[p], loss);
        }
        s.c[k] = Zhat::from_components(std::move(cs));
    }
    return s;
}

// lg_r = log(1-x)^r / r!, exact over Q.
inline QSeries lg_series(int r, int T) {
    QSeries one(RingKind::Q, T);
    one.c[0] = 1;
    if (r == 0) return one;
    QSeries lg1(RingKind::Q, T);
    for (int i = 1; i <= T; ++i) lg1.c[i] = Rational(-1, i);
    QSeries acc = one;
    for (int k = 1; k <= r; ++k) acc = scale(Rational(1, k), acc * lg1);
    return acc;
}

// (-1)^r sum_{0<i_1<...<i_r<=T} a_{i_1} x^{i_r} / (i_1 ... i_r); a[i-1] = a_i.
inline QSeries weighted_lg(const std::vector<Rational>& a, int r, int T) {
    if (r < 1) throw std::invalid_argument("weighted_lg needs r >= 1");
    if (static_cast<int>(a.size()) < T) throw std::invalid_argument("sequence must cover indices 1..T");
    // S[j]: sum over chains ending at j of a_{i_1}/(i_1...i_k)
    std::vector<Rational> S(T + 1, Rational(0));
    for (int j = 1; j <= T; ++j) S[j] = a[j - 1] / j;
    for (int k = 2; k <= r; ++k) {
        std::vector<Rational> nxt(T + 1, Rational(0));
        Rational run = 0;
        for (int j = 1; j <= T; ++j) {
            nxt[j] = run / j;
            run += S[j];
        }
        S = std::move(nxt);
    }
    QSeries s(RingKind::Q, T);
    for (int j = 1; j <= T; ++j) s.c[j] = (r % 2) ? Rational(-S[j]) : S[j];
    return s;
}

// Coefficients of H in the basis (1-x)^j, j = 0..T (division-free).
template <class C>
std::vector<C> one_minus_x_basis(const Series<C>& H) {
    const int T = H.trunc;
    std::vector<C> beta(T + 1, C(0));
    for (int k = 0; k <= T; ++k) {
        if (is_zero_value(H.c[k])) continue;
        for (int j = 0; j <= k; ++j) {
            Int b = binomial(Int(k), j);
            if (j % 2) b = -b;
            beta[j] += C(b) * H.c[k];
        }
    }
    return beta;
}

namespace detail {

inline std::vector<Int> int_mul(const std::vector<Int>& a, const std::vector<Int>& b, int T) {
    std::vector<Int> r(T + 1, Int(0));
    for (int i = 0; i <= T; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; i + j <= T; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

}  // namespace detail

// (d^{i-1} H)(x, ..., x) for i = 1..T. The subset sum over I of [1,i]
// collapses on the diagonal to sum_j beta_j ((1-x)^j - 1)^i.
template <class C>
std::vector<Series<C>> diagonal_partials(const Series<C>& H) {
    const int T = H.trunc;
    auto beta = one_minus_x_basis(H);
    std::vector<Series<C>> D(T + 1, H.with_coeffs(T));
    for (int j = 0; j <= T; ++j) {
        if (is_zero_value(beta[j])) continue;
        std::vector<Int> q(T + 1, Int(0));
        for (int k = 1; k <= std::min(j, T); ++k) {
            q[k] = binomial(Int(j), k);
            if (k % 2) q[k] = -q[k];
        }
        std::vector<Int> pw = q;
        for (int i = 1; i <= T; ++i) {
            for (int k = i; k <= T; ++k)
                if (pw[k] != 0) D[i].c[k] += beta[j] * C(pw[k]);
            if (i < T) pw = detail::int_mul(pw, q, T);
        }
    }
    return D;
}

// H o H2 = a_0 H(0) + sum_{i>=1} (-1)^i a_i (d^{i-1} H)(x^{*i}), a_i = [x^i] H2.
template <class C>
Series<C> compose_op(const Series<C>& H, const Series<C>& H2) {
    require_same_shape(H, H2);
    const int T = H.trunc;
    auto D = diagonal_partials(H);
    Series<C> out = H.with_coeffs(T);
    out.c[0] = H2.c[0] * H.c[0];
    for (int i = 1; i <= T; ++i) {
        if (is_zero_value(H2.c[i])) continue;
        C a = (i % 2) ? C(0) - H2.c[i] : H2.c[i];
        for (int k = i; k <= T; ++k) out.c[k] += a * D[i].c[k];
    }
    out.ledger.absorb(H2.ledger);
    if (H2.ring == RingKind::Q) out.ring = RingKind::Q;
    return out;
}

// G = sum a_i lg_i (mod x^{T+1}) by ascending back-substitution.
inline std::vector<Rational> lg_decompose(const QSeries& G) {
    const int T = G.trunc;
    std::vector<QSeries> lgs;
    for (int i = 0; i <= T; ++i) lgs.push_back(lg_series(i, T));
    QSeries rest = G;
    std::vector<Rational> a(T + 1);
    for (int i = 0; i <= T; ++i) {
        a[i] = rest.c[i] / lgs[i].c[i];
        if (a[i] != 0) rest = rest - scale(a[i], lgs[i]);
    }
    return a;
}

inline std::vector<std::vector<Int>> stirling2_table(int n) {
    std::vector<std::vector<Int>> S(n + 1, std::vector<Int>(n + 1, Int(0)));
    S[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k) S[i][k] = Int(k) * S[i - 1][k] + S[i - 1][k - 1];
    return S;
}

// b(G)_n = sum_k (-1)^k k! S(n,k) c_k, n = 0..N-1.
template <class C>
std::vector<C> b_map(const Series<C>& G, int N) {
    auto S = stirling2_table(std::max(N, 1));
    std::vector<C> out;
    for (int n = 0; n < N; ++n) {
        C acc(0);
        for (int k = 0; k <= std::min(n, G.trunc); ++k) {
            if (is_zero_value(G.c[k]) || S[n][k] == 0) continue;
            Int w = factorial(k) * S[n][k];
            if (k % 2) w = -w;
            acc += C(w) * G.c[k];
        }
        out.push_back(acc);
    }
    return out;
}

// Reduce an exact series into the budget (denominators must be units).
inline ZhatSeries to_profinite(const QSeries& G, const PrimeBudget& b) {
    ZhatSeries s(RingKind::Profinite, G.trunc, b);
    for (int i = 0; i <= G.trunc; ++i) s.c[i] = Zhat::from_rational(G.c[i], b);
    s.ledger = G.ledger;
    return s;
}

inline ZhatSeries materialize(const ZhatSeries& G) {
    ZhatSeries s = G;
    for (auto& x : s.c) x = x.materialize(G.budget);
    return s;
}

}  // namespace ckop

#pragma once

// Graded K-theory: numerical polynomials paired with series, two-sided
// sequences with shift and reflection, the unit-node lattices N_L, the
// sequences f^(n) and the decomposition of T_Z windows.

#include "stable.hpp"

#include <map>
#include <optional>
#include <vector>

namespace ckop {

using BiSeqWindow = SeqWindow<Int>;

// Coefficients in the basis e_n = (-1)^n binom(s, n).
struct NumericalPoly {
    std::vector<Int> e;

    int degree() const {
        for (int n = static_cast<int>(e.size()) - 1; n >= 0; --n)
            if (e[n] != 0) return n;
        return -1;
    }
    Int operator()(const Int& s) const {
        Int acc = 0;
        for (std::size_t n = 0; n < e.size(); ++n) {
            Int b = binomial(s, n);
            acc += (n % 2) ? Int(-e[n] * b) : Int(e[n] * b);
        }
        return acc;
    }
};

template <class C>
C pair(const NumericalPoly& f, const Series<C>& G) {
    if (f.degree() > G.trunc)
        throw std::invalid_argument("pairing support " + std::to_string(f.degree()) + " exceeds truncation " +
                                    std::to_string(G.trunc));
    C acc(0);
    for (int n = 0; n <= f.degree(); ++n) acc += C(f.e[n]) * G.c[n];
    return acc;
}

// Polynomial in s (ascending rational coefficients) to the e-basis, or nullopt
// when it is not integer valued. [e_n] = (-1)^n Delta^n p(0).
inline std::optional<NumericalPoly> to_e_basis(const std::vector<Rational>& p) {
    const int d = static_cast<int>(p.size()) - 1;
    std::vector<Rational> vals;
    for (int s = 0; s <= std::max(d, 0); ++s) {
        Rational v = 0, pw = 1;
        for (int k = 0; k <= d; ++k) {
            v += p[k] * pw;
            pw *= s;
        }
        vals.push_back(v);
    }
    NumericalPoly f;
    for (int n = 0; n <= std::max(d, 0); ++n) {
        if (!is_integer(vals[0])) return std::nullopt;
        Int c(vals[0].get_num());
        f.e.push_back((n % 2) ? Int(-c) : c);
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) vals[k] = vals[k + 1] - vals[k];
        vals.pop_back();
    }
    return f;
}

// s^n in the e-basis: (-1)^k k! S(n, k).
inline NumericalPoly s_power(int n) {
    auto S = stirling2_table(n);
    NumericalPoly f;
    for (int k = 0; k <= n; ++k) {
        Int v = factorial(k) * S[n][k];
        f.e.push_back((k % 2) ? Int(-v) : v);
    }
    return f;
}

// (Pi^k a)_i = a_{i+k}
inline BiSeqWindow shift(const BiSeqWindow& a, long k) { return {a.start - k, a.values}; }

// theta(a)_i = a_{-i}
inline BiSeqWindow reflect(const BiSeqWindow& a) {
    return {-a.end(), std::vector<Int>(a.values.rbegin(), a.values.rend())};
}

// ---------------------------------------------------------------- N_L

namespace detail {

// Rows (1, r, ..., r^{L-1}) for r in a_min(p, L), columns permuted by order.
inline ModMatrix unit_node_lattice(long p, int L, i64 N, const std::vector<std::size_t>& order) {
    ModMatrix A(N, L);
    for (auto& r : a_min(p, L)) {
        std::vector<i64> row(L);
        i64 rr = to_i64_mod(r, N), pw = 1 % N;
        std::vector<i64> natural(L);
        for (int j = 0; j < L; ++j) {
            natural[j] = pw;
            pw = mulmod(pw, rr, N);
        }
        for (int j = 0; j < L; ++j) row[j] = natural[order[j]];
        A.rows.push_back(row);
    }
    return howell_form(A);
}

inline std::vector<std::size_t> identity_order(int L) {
    std::vector<std::size_t> o(L);
    for (int j = 0; j < L; ++j) o[j] = j;
    return o;
}

}  // namespace detail

// Exponent with p^E Z_p^L inside N_L: v_p of dn_tilde(L-1).
inline int n_lattice_exponent(long p, int L) { return static_cast<int>(*vp(dn_tilde(L - 1), p)); }

// Membership of an L-interval in N_L, checked at every prime where N_L is proper.
inline bool interval_in_N(const std::vector<Int>& v, const PrimeBudget* budget = nullptr) {
    const int L = static_cast<int>(v.size());
    if (L < 1) throw std::invalid_argument("interval must be nonempty");
    for (long p : primes_up_to(L)) {
        int E = n_lattice_exponent(p, L);
        if (E == 0) continue;
        if (budget && budget->exponent(p) < E)
            throw PrecisionError("N_" + std::to_string(L) + " membership needs precision " + std::to_string(E) +
                                 " at " + std::to_string(p));
        i64 N = ipow(p, E).get_si();
        auto H = detail::unit_node_lattice(p, L, N, detail::identity_order(L));
        std::vector<i64> w;
        for (auto& x : v) w.push_back(to_i64_mod(x, N));
        if (!howell_contains(H, w)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- f^(n)

namespace detail {

// Least nonnegative u with (u, known...) in N_L at every prime, L = 1 + known.size().
inline Int complete_left(const std::vector<Int>& known) {
    const int L = static_cast<int>(known.size()) + 1;
    std::vector<std::pair<Int, Int>> pairs;
    std::vector<std::size_t> order;  // fixed columns first, unknown last
    for (int j = 1; j < L; ++j) order.push_back(j);
    order.push_back(0);
    for (long p : primes_up_to(L)) {
        int E = n_lattice_exponent(p, L);
        if (E == 0) continue;
        i64 N = ipow(p, E).get_si();
        auto H = unit_node_lattice(p, L, N, order);
        std::vector<i64> w;
        for (auto& x : known) w.push_back(to_i64_mod(x, N));
        w.push_back(0);
        auto red = howell_reduce(H, w);
        for (int j = 0; j + 1 < L; ++j)
            if (red[j] != 0) throw std::logic_error("known part of the interval is not in the projected lattice");
        std::vector<i64> u(L, 0);
        u[L - 1] = modn(-red[L - 1], N);
        u = howell_reduce(H, u, L - 1);
        // solutions are u modulo the last-column ideal
        i64 g = N;
        for (auto& r : H.rows)
            if (lead(r) == static_cast<std::size_t>(L - 1)) g = std::gcd(g, r[L - 1]);
        if (g > 1) pairs.emplace_back(Int(static_cast<long>(u[L - 1] % g)), Int(static_cast<long>(g)));
    }
    if (pairs.empty()) return 0;
    return crt_lift(pairs);
}

}  // namespace detail

// Window [lo, hi] of f^(n): f^(0) = 1, f^(1)_i = 1 - (-1)^i, and for n >= 2 the
// b-map of (-1)^n F_n on [0, hi] completed to the left one index at a time.
inline BiSeqWindow fseq(int n, long lo = -4, long hi = 7) {
    if (lo > hi) throw std::invalid_argument("empty window");
    BiSeqWindow w{lo, std::vector<Int>(hi - lo + 1, Int(0))};
    if (n == 0) {
        for (auto& x : w.values) x = 1;
        return w;
    }
    if (n == 1) {
        for (long i = lo; i <= hi; ++i) w.at(i) = (i % 2 == 0) ? 0 : 2;
        return w;
    }
    const long top = std::max<long>(hi, std::max<long>(n, 0));
    auto F = construct_Fn(n, static_cast<int>(top));
    QSeries Fh = (n % 2) ? scale(Rational(-1), *F.integer) : *F.integer;
    auto b = b_map(Fh, static_cast<int>(top) + 1);
    std::vector<Int> full;  // indices from cur_lo to top
    for (auto& x : b) full.push_back(Int(x.get_num()));
    long cur_lo = 0;
    while (cur_lo > lo) {
        full.insert(full.begin(), detail::complete_left(full));
        --cur_lo;
    }
    for (long i = lo; i <= hi; ++i) w.at(i) = full[i - cur_lo];
    return w;
}

// f^(0..K) on a common window.
struct FTable {
    long lo, hi;
    std::vector<BiSeqWindow> f;
};

inline FTable f_table(int K, long lo, long hi) {
    FTable t{lo, hi, {}};
    for (int k = 0; k <= K; ++k) t.f.push_back(fseq(k, lo, hi));
    return t;
}

// Window requirement of decompose_TZ at depth m.
inline FTable f_table_for_depth(int m) { return f_table(2 * m + 1, std::min<long>(-4, -m - 1), std::max<long>(7, 2 * m + 1)); }

// Basis element B_k on the window [-m, m+1]: B_{2i}(j) = f^(2i)(i-j),
// B_{2i+1}(j) = f^(2i+1)(j+i).
inline Int basis_value(const FTable& t, int k, long j) {
    int i = k / 2;
    return (k % 2 == 0) ? t.f[k].at(i - j) : t.f[k].at(j + i);
}

struct NotInTZ : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<Int> decompose_TZ(const BiSeqWindow& a, int m, const FTable& t) {
    if (!a.covers(-m) || !a.covers(m + 1)) throw std::invalid_argument("window must cover [-m, m+1]");
    if (static_cast<int>(t.f.size()) < 2 * m + 2) throw std::invalid_argument("f table too short");
    std::map<long, Int> res;
    for (long j = -m; j <= m + 1; ++j) res[j] = a.at(j);
    std::vector<Int> b(2 * m + 2, Int(0));
    auto subtract = [&](int k) {
        for (long j = -m; j <= m + 1; ++j) res[j] -= b[k] * basis_value(t, k, j);
    };
    for (int i = 0; i <= m; ++i) {
        Int piv = dn_tilde(2 * i);
        if (mod(res[-i], piv) != 0) throw NotInTZ("non-integral coefficient b_" + std::to_string(2 * i));
        b[2 * i] = res[-i] / piv;
        subtract(2 * i);
        piv = dn_tilde(2 * i + 1);
        if (mod(res[i + 1], piv) != 0) throw NotInTZ("non-integral coefficient b_" + std::to_string(2 * i + 1));
        b[2 * i + 1] = res[i + 1] / piv;
        subtract(2 * i + 1);
    }
    for (auto& [j, v] : res)
        if (v != 0) throw NotInTZ("window is not matched by the basis at index " + std::to_string(j));
    return b;
}

inline BiSeqWindow assemble_TZ(const std::vector<Int>& b, const FTable& t, long lo, long hi) {
    BiSeqWindow a{lo, std::vector<Int>(hi - lo + 1, Int(0))};
    for (std::size_t k = 0; k < b.size(); ++k)
        if (b[k] != 0)
            for (long j = lo; j <= hi; ++j) a.at(j) += b[k] * basis_value(t, static_cast<int>(k), j);
    return a;
}

}  // namespace ckop

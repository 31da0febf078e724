#pragma once

// Membership in Q^n and Q^{n,m}, the Phi-route test for Op^{n,m}, the
// decomposition over Q-hat and its Q-hat/Q class, and the integral
// approximation of members by polynomials.

#include "linalg.hpp"
#include "multisym.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ckop {

// Integrality of d^{n-1}G: exact integers for rational series, reconstruction to a
// small integer for profinite ones.
inline bool in_Qn(const QSeries& G, int n) {
    if (n < 1) throw std::invalid_argument("in_Qn needs n >= 1");
    return all_integral(iter_partial(G, n - 1));
}

inline bool in_Qn(const ZhatSeries& G, int n) {
    if (n < 1) throw std::invalid_argument("in_Qn needs n >= 1");
    return all_integer_consistent(iter_partial(materialize(G), n - 1));
}

template <class C>
bool in_Qnm(const Series<C>& G, int n, int m) {
    if (n < 1) throw std::invalid_argument("in_Qnm needs n >= 1");
    if constexpr (std::is_same_v<C, Zhat>) {
        auto D = iter_partial(materialize(G), n - 1);
        if (!all_integer_consistent(D)) return false;
        auto v = min_degree(D);
        return !v || *v >= m;
    } else {
        auto D = iter_partial(G, n - 1);
        if (!all_integral(D)) return false;
        auto v = min_degree(D);
        return !v || *v >= m;
    }
}

inline bool series_integral(const QSeries& G) {
    for (auto& x : G.c)
        if (!is_integer(x)) return false;
    return true;
}

inline bool series_integer_consistent(const ZhatSeries& G) {
    for (auto& x : G.c)
        if (!integer_consistent(x)) return false;
    return true;
}

// Phi^n(G) integral with valuation >= m - n.
template <class C>
bool in_Opnm_phi(const Series<C>& G, int n, int m) {
    if (n < 1 || m < n) throw std::invalid_argument("in_Opnm_phi needs m >= n >= 1");
    if (G.trunc < n) throw PrecisionError("truncation " + std::to_string(G.trunc) + " too small for Phi^" +
                                          std::to_string(n));
    auto P = phi_power(G, n);
    bool integral;
    if constexpr (std::is_same_v<C, Zhat>)
        integral = series_integer_consistent(materialize(P));
    else
        integral = series_integral(P);
    if (!integral) return false;
    auto v = valuation(P);
    return !v || *v >= m - n;
}

struct NotInQn : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// c_r = q + w with q in [0,1): w is one consistent choice of the integer part,
// meaningful modulo the modulus of determination.
struct HatComponent {
    int r = 0;
    Rational q = 0;
    Int w = 0;
    Int modulus = 1;

    Rational representative() const { return q + Rational(w); }
};

struct HatDecomposition {
    std::vector<HatComponent> components;  // r = 1..n-1
    QSeries remainder;                     // integral
};

namespace detail {

inline Rational frac_part(const Rational& q, Int& floor_out) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    floor_out = f;
    return q - Rational(f);
}

}  // namespace detail

namespace detail {

// p-adic part of the decomposition: y_r = D_p c_r solves
//   sum_r y_r (D_p lg_r)_k = D_p^2 G_k  (mod D_p^2),  k = 1..T,
// and shifting c_r by D_p Z_p changes nothing. Returns the solution y and, per r,
// the exponent j with y_r determined modulo p^j.
struct LocalSolve {
    std::vector<i64> y;
    std::vector<int> j;
};

inline LocalSolve local_components(const QSeries& G, const std::vector<QSeries>& lg, long p, int v) {
    const int T = G.trunc;
    const std::size_t R = lg.size();
    if (2 * v > 60) throw PrecisionError("denominators too large at p = " + std::to_string(p));
    const Int Dp = ipow(p, v);
    const i64 N = ipow(p, 2 * v).get_si();
    auto red = [&](const Rational& q) { return to_i64_mod(reduce_mod(q, Int(static_cast<long>(N))), N); };
    std::vector<std::vector<i64>> rows(R, std::vector<i64>(T, 0));
    ModMatrix Aug(N, T + R);
    for (std::size_t r = 0; r < R; ++r) {
        for (int k = 1; k <= T; ++k) rows[r][k - 1] = red(Rational(Dp) * lg[r].c[k]);
        std::vector<i64> aug = rows[r];
        aug.resize(T + R, 0);
        aug[T + r] = 1;
        Aug.rows.push_back(aug);
    }
    std::vector<i64> target(T);
    for (int k = 1; k <= T; ++k) target[k - 1] = red(Rational(Dp * Dp) * G.c[k]);
    auto sol = in_row_span(ModMatrix(N, T, rows), target);
    if (!sol.member)
        throw NotInQn("no decomposition into logarithms and an integral series at p = " + std::to_string(p) +
                      " (truncation " + std::to_string(T) + ")");
    // kernel rows of the Howell form are those vanishing on the first T columns
    std::vector<int> j(R, 2 * v);
    auto H = howell_form(Aug);
    for (std::size_t r = 0; r < R; ++r) {
        i64 g = N;
        for (auto& row : H.rows)
            if (ckop::detail::lead(row) >= static_cast<std::size_t>(T)) g = std::gcd(g, row[T + r]);
        j[r] = static_cast<int>(*vp(Int(static_cast<long>(g)), p));
    }
    return {sol.coefficients, j};
}

}  // namespace detail

// G = sum_{0<r<n} c_r lg_r + remainder. All components are solved for jointly,
// one prime of the denominators at a time: a top-down peel would leave the
// ambiguity of c_r (a multiple of its modulus times lg_r, not integral at
// finite truncation) for the lower components to absorb, and they cannot.
// Each c_r carries the modulus to which the truncated data determines it.
inline HatDecomposition decompose_Qn_hat(const QSeries& G, int n) {
    if (!in_Qn(G, n)) throw NotInQn("series is not in Q^" + std::to_string(n));
    const int T = G.trunc;
    const int R = std::min(n - 1, T);
    std::vector<QSeries> lg;
    Int D = 1;
    for (auto& x : G.c) D = lcm(D, Int(x.get_den()));
    for (int r = 1; r <= R; ++r) {
        lg.push_back(lg_series(r, T));
        for (auto& x : lg.back().c) D = lcm(D, Int(x.get_den()));
    }
    std::vector<Congruence> Y(R);  // D c_r, jointly consistent
    std::vector<Int> M(R, Int(1));
    std::vector<long> primes;
    {
        Int rest = D;
        if (!rest.fits_slong_p()) throw PrecisionError("denominators too large to factor");
        for (long p = 2; rest > 1; ++p) {
            if (Int(p) * p > rest) {
                primes.push_back(rest.get_si());
                break;
            }
            if (rest % p != 0) continue;
            primes.push_back(p);
            while (rest % p == 0) rest /= p;
        }
    }
    for (long p : primes) {
        int v = static_cast<int>(*vp(D, p));
        if (R == 0) break;
        auto loc = detail::local_components(G, lg, p, v);
        const Int N = ipow(p, 2 * v), cof = D / ipow(p, v);
        for (int r = 0; r < R; ++r) {
            if (loc.j[r] < v) throw PrecisionError("truncation too small to fix the fractional part of c_" +
                                                   std::to_string(r + 1));
            M[r] *= ipow(p, loc.j[r] - v);
            Y[r] = *merge(Y[r], {mod(cof * Int(static_cast<long>(loc.y[r])), N), N});
        }
    }
    std::vector<HatComponent> comps;
    QSeries rest = G;
    for (int r = 1; r < n; ++r) {
        if (r > R) {
            comps.push_back({r, 0, 0, 1});
            continue;
        }
        Rational c(mod_balanced(Y[r - 1].residue, Y[r - 1].modulus), D);
        c.canonicalize();
        Int fl;
        Rational q = detail::frac_part(c, fl);
        comps.push_back({r, q, fl, M[r - 1]});
        rest = rest - scale(c, lg[r - 1]);
    }
    if (!series_integral(rest)) throw std::logic_error("decomposition remainder is not integral");
    rest.ring = RingKind::Z;
    return {comps, rest};
}

// Class of G in (Q-hat/Q)^{n-1}. A component counts as rational if w
// reconstructs to a small fraction modulo its modulus; otherwise the witness
// gives the first prime of the modulus with the residue there.
struct RhoClass {
    int r = 0;
    bool zero = true;
    long p = 0;
    int e = 0;
    Int residue = 0;
};

inline std::vector<RhoClass> rho_n(const QSeries& G, int n) {
    auto dec = decompose_Qn_hat(G, n);
    std::vector<RhoClass> out;
    for (auto& c : dec.components) {
        RhoClass k{c.r};
        if (c.modulus > 1 && !rational_reconstruct(mod(c.w, c.modulus), c.modulus)) {
            k.zero = false;
            long p = 2;
            while (mod(c.modulus, Int(p)) != 0) ++p;
            k.p = p;
            k.e = static_cast<int>(*vp(c.modulus, p));
            k.residue = mod(c.w, ipow(p, k.e));
        }
        out.push_back(k);
    }
    return out;
}

namespace detail {

// largest sum of k values v_p(i) over distinct i <= T
inline int top_valuation_sum(long p, int k, int T) {
    std::vector<int> v;
    for (int i = 1; i <= T; ++i) v.push_back(static_cast<int>(*vp(Int(i), p)));
    std::sort(v.rbegin(), v.rend());
    int s = 0;
    for (int i = 0; i < k && i < static_cast<int>(v.size()); ++i) s += v[i];
    return s;
}

}  // namespace detail

// Integers c_1..c_T with c_i = c (mod i) and (c - c~) . lg_k integral for k <= r.
inline std::vector<Int> N33_sequence(const Zhat& c, int r, int T, const PrimeBudget& budget) {
    if (r < 1 || T < 1) throw std::invalid_argument("N33_sequence needs r, T >= 1");
    Zhat cm = c.materialize(budget);
    for (long p : primes_up_to(T)) {
        int need = std::max(detail::top_valuation_sum(p, r, T), static_cast<int>(vp_factorial(r, p)));
        if (cm.precision(p) < need)
            throw PrecisionError("N33 sequence to " + std::to_string(T) + " needs precision " + std::to_string(need) +
                                 " at " + std::to_string(p));
    }
    Int C = cm.components().empty() ? Int(0) : cm.crt().residue;
    std::vector<Int> seq(T, Int(0));
    auto coeff_at = [&](int k, int deg) {
        std::vector<Rational> a(deg, Rational(0));
        for (int i = 1; i <= deg && i <= T; ++i) a[i - 1] = Rational(C - seq[i - 1]);
        return weighted_lg(a, k, deg).c[deg];
    };
    seq[0] = mod(C, factorial(r));
    for (int m = 1; m < T; ++m) {  // choose c_{m+1}
        seq[m] = mod(C, Int(m + 1));
        Int step = m + 1;
        for (int k = 2; k <= r && m + k <= T; ++k) {
            int t = 0;
            while (!is_integer(coeff_at(k, m + k))) {
                seq[m] += step;
                if (++t > m + k) throw std::logic_error("N33 repair step found no integer");
            }
            step *= (m + k);
        }
    }
    for (int k = 1; k <= r; ++k) {
        std::vector<Rational> a;
        for (auto& s : seq) a.push_back(Rational(C - s));
        if (!series_integral(weighted_lg(a, k, T))) throw std::logic_error("N33 postcondition failed");
    }
    return seq;
}

struct ClassicalApprox {
    QSeries poly;                  // integer polynomial of degree <= d
    std::vector<Rational> shifts;  // q_r + e_r subtracted along lg_r
};

// Integer polynomial agreeing with G below degree d+1 modulo the Q-span of lg_r.
inline ClassicalApprox classical_approx(const QSeries& G, int n, int d) {
    if (d >= G.trunc) throw PrecisionError("classical_approx needs d < truncation");
    auto dec = decompose_Qn_hat(G, n);
    QSeries acc = G;
    std::vector<Rational> shifts;
    for (auto& c : dec.components) {
        QSeries lgr = lg_series(c.r, G.trunc);
        Int L = 1;
        for (int i = 1; i <= d; ++i) L = lcm(L, Int(lgr.c[i].get_den()));
        Int e = mod(c.w, L);
        Rational s = c.q + Rational(e);
        shifts.push_back(s);
        acc = acc - scale(s, lgr);
    }
    QSeries P = truncate(acc, d);
    if (!series_integral(P))
        throw PrecisionError("components are not determined finely enough; increase the truncation");
    P.ring = RingKind::Z;
    return {P, shifts};
}

}  // namespace ckop

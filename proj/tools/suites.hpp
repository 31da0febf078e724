#pragma once

// Randomized identity suites behind `ckop verify`.

#include "ckop/io.hpp"

#include <functional>
#include <random>

namespace ckop::suites {

using io::json;

struct Report {
    bool pass = true;
    long cases = 0;
    json counterexample;
};

class Rng {
public:
    explicit Rng(unsigned long long seed) : g_(seed) {}
    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g_); }
    Rational rational(long num, long den) {
        Rational q(Int(range(-num, num)), Int(range(1, den)));
        q.canonicalize();
        return q;
    }

private:
    std::mt19937_64 g_;
};

// Zero out coefficients one at a time while the failure persists.
inline std::vector<Rational> minimize(std::vector<Rational> c, const std::function<bool(const std::vector<Rational>&)>& fails) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        auto t = c;
        t[i] = 0;
        if (fails(t)) c = t;
    }
    return c;
}

inline json coeffs_json(const std::vector<Rational>& c) {
    json a = json::array();
    for (auto& x : c) a.push_back(io::to_json(x));
    return a;
}

inline Report idempotents(int T) {
    Report r;
    std::vector<QSeries> lg;
    for (int k = 0; k <= T; ++k) lg.push_back(lg_series(k, T));
    QSeries zero(RingKind::Q, T);
    for (int n = 0; n <= T; ++n)
        for (int m = 0; m <= T; ++m) {
            ++r.cases;
            auto got = compose_op(lg[n], lg[m]);
            if (!(got == (n == m ? lg[n] : zero))) {
                r.pass = false;
                r.counterexample = {{"identity", "lg_n o lg_m"}, {"n", n}, {"m", m}, {"got", io::to_json(got)}};
                return r;
            }
        }
    QSeries sum(RingKind::Q, T);
    for (auto& s : lg) sum = sum + s;
    ++r.cases;
    if (!(sum == q_series({1, -1}, T))) {
        r.pass = false;
        r.counterexample = {{"identity", "sum lg_r = 1 - x"}, {"got", io::to_json(sum)}};
    }
    return r;
}

inline QSeries random_z(Rng& g, int T, long bound = 5) {
    std::vector<Rational> c;
    for (int i = 0; i <= T; ++i) c.push_back(Rational(Int(g.range(-bound, bound))));
    return QSeries(RingKind::Z, T, c);
}

// Commutativity, the lg-coordinate route, multiplicativity of b and A_k o A_m.
inline Report composition(int T, unsigned long long seed) {
    Report r;
    Rng g(seed);
    auto lg_route = [&](const QSeries& G, const QSeries& H) {
        auto a = lg_decompose(G), b = lg_decompose(H);
        QSeries s(RingKind::Q, T);
        for (int i = 0; i <= T; ++i)
            if (a[i] * b[i] != 0) s = s + scale(Rational(a[i] * b[i]), lg_series(i, T));
        return s;
    };
    for (int t = 0; t < 20; ++t) {
        auto G = random_z(g, T), H = random_z(g, T);
        auto fails = [&](const std::vector<Rational>& gc, const std::vector<Rational>& hc) {
            QSeries a(RingKind::Z, T, gc), b(RingKind::Z, T, hc);
            auto ab = compose_op(a, b);
            if (!(ab == compose_op(b, a))) return true;
            if (!(ab == lg_route(a, b))) return true;
            auto ba = b_map(a, T + 1), bb = b_map(b, T + 1), bab = b_map(ab, T + 1);
            for (int i = 0; i <= T; ++i)
                if (bab[i] != ba[i] * bb[i]) return true;
            return false;
        };
        ++r.cases;
        if (fails(G.c, H.c)) {
            auto gc = minimize(G.c, [&](auto& c) { return fails(c, H.c); });
            auto hc = minimize(H.c, [&](auto& c) { return fails(gc, c); });
            r.pass = false;
            r.counterexample = {{"G", coeffs_json(gc)}, {"H", coeffs_json(hc)}};
            return r;
        }
    }
    for (long k = -3; k <= 7; ++k)
        for (long m = -3; m <= 7; ++m) {
            ++r.cases;
            if (!(compose_op(adams_series(Int(k), T), adams_series(Int(m), T)) == adams_series(Int(k * m), T))) {
                r.pass = false;
                r.counterexample = {{"identity", "A_k o A_m = A_km"}, {"k", k}, {"m", m}};
                return r;
            }
        }
    return r;
}

inline QSeries random_q(Rng& g, int T) {
    std::vector<Rational> c{0};
    for (int i = 1; i <= T; ++i) c.push_back(g.rational(9, 6));
    return q_series(c, T);
}

inline Report aformula(int T, unsigned long long seed) {
    Report r;
    Rng g(seed);
    for (int t = 0; t < 30; ++t) {
        auto G = random_q(g, T);
        for (int n = 1; n <= 3; ++n) {
            ++r.cases;
            auto fails = [&](const std::vector<Rational>& c) { return !aformula_check(q_series(c, T), n); };
            if (fails(G.c)) {
                r.pass = false;
                r.counterexample = {{"n", n}, {"G", coeffs_json(minimize(G.c, fails))}};
                return r;
            }
        }
    }
    return r;
}

inline Zhat random_zhat(Rng& g, const PrimeBudget& b) {
    std::vector<Zhat::Component> cs;
    for (auto& [p, e] : b.entries()) cs.push_back({p, e, Int(g.range(0, ipow(p, e).get_si() - 1))});
    return Zhat::from_components(cs);
}

// L lg_k with L the lcm of its denominators up to x^T: an integer series.
inline QSeries cleared_lg(int k, int T) {
    QSeries s = lg_series(k, T);
    Int L = 1;
    for (auto& x : s.c) L = lcm(L, Int(x.get_den()));
    s = scale(Rational(L), s);
    s.ring = RingKind::Z;
    return s;
}

// Profinite witness in x Zhat[[x]] for membership at level n: an integer part of
// random valuation, profinite multiples of cleared lg_k for k < n, and sometimes
// a cleared lg_n or a stray profinite coefficient.
inline ZhatSeries zhat_witness(Rng& g, int n, int T, const PrimeBudget& b) {
    QSeries P(RingKind::Z, T);
    for (long i = g.range(1, n + 3); i <= T; ++i) P.c[i] = Rational(Int(g.range(-4, 4)));
    ZhatSeries G = to_profinite(P, b);
    auto add = [&](const ZhatSeries& H) { G = G + H; };
    for (int k = 1; k < n; ++k)
        if (g.range(0, 1)) add(scale(random_zhat(g, b), to_profinite(cleared_lg(k, T), b)));
    switch (g.range(0, 3)) {
        case 0: add(scale(random_zhat(g, b), to_profinite(cleared_lg(n, T), b))); break;
        case 1: G.c[g.range(1, T)] += random_zhat(g, b); break;
        default: break;
    }
    return G;
}

inline PrimeBudget witness_budget(int T) { return PrimeBudget::uniform(primes_up_to(T + 1), 6); }

inline json zhat_series_json(const ZhatSeries& G) { return io::to_json(G); }

// d^n G integral iff d^{n-1} Phi(G) integral; v(d^n G) >= m iff v(d^{n-1} Phi G) >= m - 1.
inline Report ifandonlyif(int T, unsigned long long seed) {
    Report r;
    Rng g(seed);
    const PrimeBudget b = witness_budget(T);
    for (int t = 0; t < 40; ++t) {
        const int n = static_cast<int>(g.range(1, 3));
        ZhatSeries G = zhat_witness(g, n + 1, T, b);
        auto lhs = iter_partial(materialize(G), n);
        auto rhs = iter_partial(materialize(phi(G)), n - 1);
        bool ok = all_integer_consistent(lhs) == all_integer_consistent(rhs);
        // Phi loses the top coefficient, so valuations are compared below T
        auto vl = min_degree(lhs), vr = min_degree(rhs);
        int L = vl ? *vl : T + 1, R = vr ? *vr + 1 : T + 1;
        ok = ok && std::min(L, T) == std::min(R, T);
        ++r.cases;
        if (!ok) {
            r.pass = false;
            r.counterexample = {{"n", n}, {"G", zhat_series_json(G)}};
            return r;
        }
    }
    return r;
}

// Criterion versus Phi-tower oracle at each (p, e) whose p^e fits into T coefficients.
inline Report s_dual_route(int T, unsigned long long seed) {
    Report r;
    Rng g(seed);
    for (long p : {2L, 3L, 5L})
        for (int e = 1; e <= 3; ++e) {
            long pe = ipow(p, e).get_si();
            int count = static_cast<int>((T / pe) * pe);
            if (count < pe) continue;
            PrimeBudget b({{p, e}});
            for (int t = 0; t < 10; ++t) {
                std::vector<Int> a(count, Int(0));
                int terms = static_cast<int>(g.range(1, 3));
                for (int k = 0; k < terms; ++k) {
                    long u;
                    do u = g.range(-9, 9);
                    while (u % p == 0);
                    Int w = g.range(-4, 4);
                    auto A = adams_series(Int(u), count - 1);
                    for (int i = 0; i < count; ++i) a[i] += w * Int(A.c[i].get_num());
                }
                if (t % 2) a[g.range(0, count - 1)] += g.range(1, pe - 1 > 0 ? pe - 1 : 1);
                ZhatSeries G(RingKind::Profinite, count - 1, b);
                for (int i = 0; i < count; ++i) G.c[i] = Zhat::from_integer(a[i], b);
                ++r.cases;
                bool crit = s_criterion(G).member;
                bool orac = s_oracle(a, p, e, count);
                if (crit != orac) {
                    json c = json::array();
                    for (auto& x : a) c.push_back(io::int_json(x));
                    r.pass = false;
                    r.counterexample = {{"p", p}, {"e", e}, {"coeffs", c}, {"criterion", crit}, {"oracle", orac}};
                    return r;
                }
            }
        }
    return r;
}

// <f, (1-x)^m> = f(m) and <s^n, G> = b(G)_n.
inline Report kgr_duality(int T, unsigned long long seed) {
    Report r;
    Rng g(seed);
    const int D = std::min(T, 8);
    for (int t = 0; t < 20; ++t) {
        NumericalPoly f;
        for (int k = 0; k <= D; ++k) f.e.push_back(Int(g.range(-5, 5)));
        for (long m = -10; m <= 10; ++m) {
            ++r.cases;
            Rational lhs = pair(f, adams_series(Int(m), D));
            if (lhs != Rational(f(Int(m)))) {
                json e = json::array();
                for (auto& x : f.e) e.push_back(io::int_json(x));
                r.pass = false;
                r.counterexample = {{"f_e_basis", e}, {"m", m}};
                return r;
            }
        }
    }
    for (int t = 0; t < 5; ++t) {
        auto G = random_z(g, T);
        auto b = b_map(G, T + 1);
        for (int n = 0; n <= T; ++n) {
            ++r.cases;
            if (pair(s_power(n), G) != b[n]) {
                r.pass = false;
                r.counterexample = {{"n", n}, {"G", coeffs_json(G.c)}};
                return r;
            }
        }
    }
    return r;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> v{"idempotents", "composition", "aformula",
                                            "ifandonlyif", "s-dual-route", "kgr-duality"};
    return v;
}

inline std::optional<Report> run(const std::string& name, int T, unsigned long long seed) {
    if (name == "idempotents") return idempotents(T);
    if (name == "composition") return composition(T, seed);
    if (name == "aformula") return aformula(T, seed);
    if (name == "ifandonlyif") return ifandonlyif(T, seed);
    if (name == "s-dual-route") return s_dual_route(T, seed);
    if (name == "kgr-duality") return kgr_duality(T, seed);
    return std::nullopt;
}

}  // namespace ckop::suites

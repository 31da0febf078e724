#pragma once

// Stable operations: the integers d_n, the binomial-sum criterion for S and the
// lattice oracle behind it, the Adams bases G_n and F_n, the desuspension
// tower and twisted Adams series.

#include "linalg.hpp"
#include "series.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace ckop {

// ---------------------------------------------------------------- d_n

struct DnRecord {
    int n = 0;
    Int value = 1;
    std::map<long, long> per_prime;  // only primes with positive exponent
};

inline long vp_dn(int n, long p) {
    long k = n / (p - 1);
    return k + vp_factorial(k, p) - vp_factorial(n, p);
}

inline DnRecord dn(int n) {
    if (n < 0) throw std::invalid_argument("dn needs n >= 0");
    DnRecord d{n, 1, {}};
    for (long p : primes_up_to(n + 1)) {
        long v = vp_dn(n, p);
        if (v > 0) {
            d.per_prime[p] = v;
            d.value *= ipow(p, v);
        }
    }
    return d;
}

inline Int dn_tilde(int n) { return factorial(n) * dn(n).value; }

// First n positive integers prime to p.
inline std::vector<Int> a_min(long p, int n) {
    std::vector<Int> a;
    for (long x = 1; static_cast<int>(a.size()) < n; ++x)
        if (x % p) a.push_back(Int(x));
    return a;
}

// prod_{s>t} (a_s - a_t) / prod_{k<n} k!
inline Rational vdm_value(const std::vector<Int>& a) {
    const std::size_t n = a.size();
    Int num = 1, den = 1;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < s; ++t) {
            if (a[s] == a[t]) throw std::domain_error("repeated node in Van der Monde value");
            num *= a[s] - a[t];
        }
    for (std::size_t k = 1; k < n; ++k) den *= factorial(k);
    Rational q(num, den);
    q.canonicalize();
    if (!is_integer(q)) throw std::logic_error("Van der Monde value is not an integer");
    return q;
}

// v_p(d_n) through the ratio d(a_min(p, n+1)) / d(a_min(p, n)).
inline long vp_dn_vandermonde(int n, long p) {
    Rational r = vdm_value(a_min(p, n + 1)) / vdm_value(a_min(p, n));
    return *vp(r, p);
}

// ---------------------------------------------------------------- criterion

struct SWitness {
    long p;
    int n;
    int m;
    int j;
    bool operator==(const SWitness&) const = default;
};

struct SCriterionResult {
    bool member = true;
    std::optional<SWitness> witness;
    long skipped = 0;                  // instances beyond stored precision
    std::vector<long> untested_primes; // primes <= T+1 outside the budget
};

namespace detail {

// Residue of each a_i at p, with its precision (exact values: unlimited).
struct LocalCoeffs {
    std::vector<Int> r;
    std::vector<int> prec;
};

inline bool s_instances(long p, int max_n, int count, const LocalCoeffs& a, SCriterionResult& out) {
    // count = number of usable coefficients a_0..a_{count-1}
    Int pn = 1;
    for (int n = 1; n <= max_n; ++n) {
        pn *= p;
        if (pn > count) break;
        long step = pn.get_si();
        for (long m = step; m <= count; m += step) {
            for (long j = 0; j < m; j += p) {
                bool usable = true;
                for (long i = j; i < m; ++i)
                    if (a.prec[i] < n) {
                        usable = false;
                        break;
                    }
                if (!usable) {
                    ++out.skipped;
                    continue;
                }
                Int s = 0;
                for (long i = j; i < m; ++i) s += binomial(Int(i), j) * a.r[i];
                if (mod(s, pn) != 0) {
                    out.member = false;
                    out.witness = SWitness{p, n, static_cast<int>(m), static_cast<int>(j)};
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace detail

// Binomial-sum congruences on the stored coefficients (m <= T+1).
inline SCriterionResult s_criterion(const QSeries& G) {
    SCriterionResult out;
    const int count = G.trunc + 1;
    for (auto& x : G.c)
        if (!is_integer(x)) {
            out.member = false;
            return out;
        }
    for (long p : primes_up_to(count)) {
        detail::LocalCoeffs a;
        for (auto& x : G.c) {
            a.r.push_back(Int(x.get_num()));
            a.prec.push_back(1 << 20);
        }
        if (!detail::s_instances(p, 1 << 20, count, a, out)) return out;
    }
    return out;
}

inline SCriterionResult s_criterion(const ZhatSeries& G) {
    SCriterionResult out;
    const int count = G.trunc + 1;
    for (long p : primes_up_to(count))
        if (!G.budget.contains(p)) out.untested_primes.push_back(p);
    for (auto& [p, e] : G.budget.entries()) {
        detail::LocalCoeffs a;
        for (auto& x : G.c) {
            auto v = x.at(p, e);
            if (!v) {
                a.r.push_back(0);
                a.prec.push_back(0);
            } else {
                a.r.push_back(v->first);
                a.prec.push_back(std::min(v->second, e));
            }
        }
        if (!detail::s_instances(p, e, count, a, out)) return out;
    }
    return out;
}

// ---------------------------------------------------------------- oracle

namespace detail {

// Phi on (Z/p^e)[x]/(x^{T'}) with p^e | T', where it is well defined.
inline std::vector<i64> phi_row(const std::vector<i64>& v, i64 N) {
    const std::size_t n = v.size();
    std::vector<i64> out(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        i64 a = mulmod(static_cast<i64>(k) % N, v[k], N);
        i64 b = (k + 1 < n) ? mulmod(static_cast<i64>(k + 1) % N, v[k + 1], N) : 0;
        out[k] = modn(a - b, N);
    }
    return out;
}

inline ModMatrix phi_image(const ModMatrix& L) {
    ModMatrix M(L.modulus, L.cols);
    for (auto& r : L.rows) M.rows.push_back(phi_row(r, L.modulus));
    return howell_form(M);
}

inline ModMatrix project(const ModMatrix& L, std::size_t cols) {
    ModMatrix M(L.modulus, cols);
    for (auto& r : L.rows) M.rows.emplace_back(r.begin(), r.begin() + cols);
    return howell_form(M);
}

inline std::size_t padded_length(std::size_t T, i64 pe) {
    std::size_t q = static_cast<std::size_t>(pe);
    return ((T + q - 1) / q) * q;
}

}  // namespace detail

struct NotStabilized : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int default_r_max(long p, int e, int T) { return e * static_cast<int>(p - 1) + T; }

// Image of S in (Z/p^e)[x]/(x^T), as a Howell form over T columns.
inline ModMatrix s_lattice(long p, int e, int T, int r_max) {
    if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");
    const i64 N = ipow(p, e).get_si();
    const std::size_t Tp = detail::padded_length(static_cast<std::size_t>(T), N);
    ModMatrix L = ModMatrix::identity(N, Tp);
    for (int r = 1; r <= r_max; ++r) {
        ModMatrix next = detail::phi_image(L);
        if (next == L) return detail::project(L, T);
        L = std::move(next);
    }
    throw NotStabilized("Phi-image lattice mod " + std::to_string(p) + "^" + std::to_string(e) +
                        " did not stabilize within r_max=" + std::to_string(r_max) + "; increase r_max");
}

// coeffs = residues of c_0..c_{T-1}
inline bool s_oracle(const std::vector<Int>& coeffs, long p, int e, int T, int r_max = -1) {
    if (static_cast<int>(coeffs.size()) < T) throw std::invalid_argument("s_oracle needs T coefficients");
    if (r_max < 0) r_max = default_r_max(p, e, T);
    auto H = s_lattice(p, e, T, r_max);
    std::vector<i64> w;
    for (int i = 0; i < T; ++i) w.push_back(to_i64_mod(coeffs[i], H.modulus));
    return howell_contains(H, w);
}

namespace detail {

// Howell form of Im(Phi^n) mod p^e projected to cols coefficients; memoized,
// since tower sweeps hit the same few lattices over and over.
inline const ModMatrix& tower_lattice(long p, int e, std::size_t cols, int n) {
    static std::map<std::tuple<long, int, std::size_t, int>, ModMatrix> cache;
    auto key = std::make_tuple(p, e, cols, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const i64 N = ipow(p, e).get_si();
    ModMatrix L = ModMatrix::identity(N, padded_length(cols, N));
    for (int r = 0; r < n; ++r) L = phi_image(L);
    return cache.emplace(key, project(L, cols)).first->second;
}

}  // namespace detail

// G in the image of Phi^n modulo p^e and x^{T+1}, at every budget prime.
inline bool tower_member(const ZhatSeries& G, int n) {
    if (n < 0) throw std::invalid_argument("tower_member needs n >= 0");
    const std::size_t cols = static_cast<std::size_t>(G.trunc) + 1;
    for (auto& [p, e] : G.budget.entries()) {
        const i64 N = ipow(p, e).get_si();
        const ModMatrix& H = detail::tower_lattice(p, e, cols, n);
        std::vector<i64> w;
        for (auto& x : G.c) {
            auto v = x.at(p, e);
            if (!v || v->second < e) throw PrecisionError("coefficient precision below budget at " + std::to_string(p));
            w.push_back(to_i64_mod(v->first, N));
        }
        if (!howell_contains(H, w)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- bases

// A p-adic family of exact rational series: local[p] is the component at each
// special prime, generic the common component at every other prime.
struct LocalFamily {
    int trunc = 0;
    std::map<long, QSeries> local;
    QSeries generic;

    const QSeries& at(long p) const {
        auto it = local.find(p);
        return it == local.end() ? generic : it->second;
    }

    // Uniform integer series when every component agrees and is integral.
    std::optional<QSeries> integer_series() const {
        for (auto& x : generic.c)
            if (!is_integer(x)) return std::nullopt;
        for (auto& [p, s] : local)
            if (!(s == generic)) return std::nullopt;
        QSeries z = generic;
        z.ring = RingKind::Z;
        return z;
    }

    ZhatSeries reduce(const PrimeBudget& b) const {
        ZhatSeries s(RingKind::Profinite, trunc, b);
        for (int i = 0; i <= trunc; ++i) {
            std::vector<Zhat::Component> cs;
            for (auto& [p, e] : b.entries()) cs.push_back({p, e, reduce_mod(at(p).c[i], ipow(p, e))});
            s.c[i] = Zhat::from_components(std::move(cs));
        }
        return s;
    }
};

enum class BasisKind { G, F };

struct BasisSeries {
    BasisKind kind;
    int n;
    LocalFamily family;
    std::optional<QSeries> integer;  // F_n only
};

namespace detail {

inline QSeries adams_combination(const std::vector<Int>& nodes, const std::vector<Rational>& coef, int T) {
    QSeries s(RingKind::Q, T);
    for (std::size_t j = 0; j < nodes.size(); ++j) s = s + scale(coef[j], adams_series(nodes[j], T));
    return s;
}

inline QSeries local_G(int n, long p, int T) {
    std::vector<Int> nodes;
    if (p > 0 && p <= n + 1)
        nodes = a_min(p, n + 1);
    else
        for (int a = 1; a <= n + 1; ++a) nodes.push_back(Int(a));
    std::vector<Rational> target(n + 1, Rational(0));
    Int d = dn(n).value;
    target[n] = (n % 2) ? Rational(-d) : Rational(d);
    auto x = solve_vandermonde(nodes, target);
    if (p > 0)
        for (auto& q : x)
            if (mod(Int(q.get_den()), Int(p)) == 0)
                throw std::logic_error("G_n coefficient not p-integral at " + std::to_string(p));
    return adams_combination(nodes, x, T);
}

}  // namespace detail

// Special primes are those <= T+1; above that the generic nodes 1..n+1 are used.
inline BasisSeries construct_Gn(int n, int T) {
    if (n < 0 || T < n) throw std::invalid_argument("construct_Gn needs 0 <= n <= T");
    LocalFamily f;
    f.trunc = T;
    f.generic = detail::local_G(n, 0, T);
    for (long p : primes_up_to(T + 1)) f.local[p] = detail::local_G(n, p, T);
    return {BasisKind::G, n, f, std::nullopt};
}

// F_n = G_n - sum_{i>n} b_i G_i with integer coefficients, degree by degree.
inline BasisSeries construct_Fn(int n, int T) {
    LocalFamily H = construct_Gn(n, T).family;
    auto primes = primes_up_to(T + 1);
    for (int i = n + 1; i <= T; ++i) {
        auto Gi = construct_Gn(i, T).family;
        DnRecord di = dn(i);
        // a'_i: the shared integer if all components agree, else the CRT of the
        // local residues modulo p^{v_p(d_i)}
        Int target;
        bool uniform = is_integer(H.generic.c[i]);
        for (auto& [p, s] : H.local) uniform = uniform && s.c[i] == H.generic.c[i];
        if (uniform) {
            target = Int(H.generic.c[i].get_num());
        } else {
            std::vector<std::pair<Int, Int>> pairs;
            for (auto& [p, v] : di.per_prime) pairs.emplace_back(reduce_mod(H.at(p).c[i], ipow(p, v)), ipow(p, v));
            target = crt_lift(pairs);
        }
        Rational d(di.value);
        auto fix = [&](QSeries& comp, const QSeries& g) {
            Rational b = (comp.c[i] - Rational(target)) / d;
            if (b != 0) comp = comp - scale(b, g);
        };
        fix(H.generic, Gi.generic);
        for (long p : primes) fix(H.local[p], Gi.local[p]);
    }
    auto z = H.integer_series();
    if (!z) throw std::logic_error("F_n components failed to agree");
    return {BasisKind::F, n, H, z};
}

struct NotInS0 : std::runtime_error {
    int degree;
    NotInS0(const std::string& s, int d) : std::runtime_error(s), degree(d) {}
};

// G = sum a_n F_n modulo x^{T+1}, peeled off by leading terms d_n x^n.
inline std::vector<Int> decompose_S0(const QSeries& G, const std::vector<QSeries>& F) {
    const int T = G.trunc;
    if (static_cast<int>(F.size()) < T + 1) throw std::invalid_argument("need F_0..F_T");
    QSeries cur = G;
    std::vector<Int> a(T + 1, Int(0));
    for (int n = 0; n <= T; ++n) {
        Rational q = cur.c[n] / F[n].c[n];
        if (!is_integer(q)) throw NotInS0("non-integral quotient at degree " + std::to_string(n), n);
        a[n] = Int(q.get_num());
        if (a[n] != 0) cur = cur - scale(q, F[n]);
    }
    return a;
}

// ---------------------------------------------------------------- twisted Adams

struct TwistedVerdict {
    bool integral = true;             // within budget
    std::optional<std::pair<long, int>> witness;  // (p, n)
    long undecidable = 0;
};

struct TwistedAdams {
    ZhatSeries gamma;
    TwistedVerdict verdict;
};

namespace detail {

// binom(r, k) mod p by Lucas, from r mod p^L with L the number of base-p digits of k.
inline std::optional<Int> lucas_mod_p(const Zhat& r, unsigned long k, long p) {
    int L = 0;
    for (unsigned long t = k; t; t /= p) ++L;
    auto a = r.at(p, L);
    if (!a || a->second < L) return std::nullopt;
    Int x = a->first;
    Int acc = 1;
    for (unsigned long t = k; t; t /= p) {
        long kd = static_cast<long>(t % p);
        long rd = mod(x, Int(p)).get_si();
        x = (x - rd) / p;
        acc = mod(acc * binomial(Int(rd), kd), Int(p));
    }
    return acc;
}

}  // namespace detail

// a_n = (-1)^{n-1} b binom(bc-1, n-1) / n, with the integrality verdict.
inline TwistedAdams twisted_adams(const Zhat& b0, const Zhat& c0, const PrimeBudget& budget, int T) {
    Zhat b = b0.materialize(budget), c = c0.materialize(budget);
    Zhat r = b * c - Zhat(1);
    TwistedAdams out{ZhatSeries(RingKind::Profinite, T, budget), {}};
    std::vector<std::vector<Zhat::Component>> comps(T + 1);
    for (auto& [p, e] : budget.entries()) {
        comps[0].push_back({p, e, 0});
        auto [rb, eb] = *b.at(p);
        for (int n = 1; n <= T; ++n) {
            const int vn = static_cast<int>(*vp(Int(n), p));
            // binomial residue and precision
            int et = r.precision(p) - static_cast<int>(vp_factorial(n - 1, p));
            Int B = 0;
            if (et >= 1) {
                B = gen_binomial(r, n - 1, p, et);
            } else if (auto l = detail::lucas_mod_p(r, n - 1, p)) {
                B = *l;
                et = 1;
            } else {
                et = 0;
            }
            // v(N) for N = b * B, as (value, exact?)
            long vb = (rb == 0) ? eb : *vp(rb, p);
            bool vb_exact = rb != 0;
            Int Bm = mod(B, ipow(p, et));
            long vB = (Bm == 0) ? et : *vp(Bm, p);
            bool vB_exact = Bm != 0;
            long vN = vb + vB;
            int eN = static_cast<int>(std::min<long>(eb + vB, et + vb));
            Int N = mod(rb * Bm, ipow(p, eN));
            if (vN >= vn) {
                int ea = std::max(0, eN - vn);
                Int q = mod(N / ipow(p, vn) * *inverse_mod(Int(n) / ipow(p, vn), ipow(p, ea)), ipow(p, ea));
                if (n % 2 == 0) q = mod(-q, ipow(p, ea));
                comps[n].push_back({p, ea, q});
            } else if (vb_exact && vB_exact) {
                if (out.verdict.integral) out.verdict.witness = std::make_pair(p, n);
                out.verdict.integral = false;
                comps[n].push_back({p, 0, 0});
            } else {
                ++out.verdict.undecidable;
                comps[n].push_back({p, 0, 0});
            }
        }
    }
    for (int n = 0; n <= T; ++n) out.gamma.c[n] = Zhat::from_components(std::move(comps[n]));
    return out;
}

// Exact rational version for integer b, c.
inline QSeries twisted_adams(const Int& b, const Int& c, int T) {
    QSeries s(RingKind::Q, T);
    for (int n = 1; n <= T; ++n) {
        Rational a = Rational(b * binomial(b * c - 1, n - 1)) / Rational(n);
        s.c[n] = (n % 2) ? a : Rational(-a);
    }
    return s;
}

inline bool twisted_rule(const Zhat& b, const Zhat& c, const PrimeBudget& budget) {
    Zhat bm = b.materialize(budget), cm = c.materialize(budget);
    for (auto& [p, e] : budget.entries()) {
        bool b_zero = bm.at(p)->first == 0;
        bool c_unit = mod(cm.at(p)->first, Int(p)) != 0;
        if (!b_zero && !c_unit) return false;
    }
    return true;
}

// c a unit within budget, A_c passes the criterion and Phi(A_c) = c A_c. The
// series is cut where the residues of c stop determining its coefficients.
inline bool stable_mult_check(const Zhat& c, const PrimeBudget& budget, int T) {
    if (!is_unit(c, budget)) return false;
    const Zhat cm = c.materialize(budget);
    if (!cm.is_exact())
        for (auto& [p, e] : budget.entries())
            while (T > 1 && cm.precision(p) - vp_factorial(T, p) < 1) --T;
    auto A = adams_series(cm, budget, T);
    if (!s_criterion(A).member) return false;
    auto P = phi(A);
    auto cA = scale(cm, truncate(A, T - 1));
    return P == cA;
}

}  // namespace ckop

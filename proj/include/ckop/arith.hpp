#pragma once

// Exact integers, rationals, valuations, CRT and finite-precision profinite
// integers. Everything else in the library is built on these.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ckop {

using Int = mpz_class;
using Rational = mpq_class;

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CongruenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int ipow(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Int ipow(long b, unsigned long e) { return ipow(Int(b), e); }

inline Int factorial(unsigned long n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

// binom(n, k) for any integer n (GMP handles negative n)
inline Int binomial(const Int& n, unsigned long k) {
    Int r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

inline Int mod(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

// representative in (-m/2, m/2]
inline Int mod_balanced(const Int& a, const Int& m) {
    Int r = mod(a, m);
    if (2 * r > m) r -= m;
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline std::optional<Int> inverse_mod(const Int& a, const Int& m) {
    if (m == 1) return Int(0);
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
    return r;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

// Rationals parse and print as "num/den" (or a bare integer).
inline Rational parse_rational(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline std::vector<long> primes_up_to(long n) {
    std::vector<long> out;
    for (long p = 2; p <= n; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

// p-adic valuation; nullopt stands for v(0) = infinity.
inline std::optional<long> vp(const Int& n, long p) {
    if (n == 0) return std::nullopt;
    Int t = n;
    Int pp = p;
    return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t()));
}

// v_p of a nonzero rational (may be negative)
inline std::optional<long> vp(const Rational& q, long p) {
    if (q == 0) return std::nullopt;
    return *vp(Int(q.get_num()), p) - *vp(Int(q.get_den()), p);
}

inline long vp_factorial(long n, long p) {
    long s = 0;
    for (long q = p; q <= n; q *= p) {
        s += n / q;
        if (q > n / p) break;
    }
    return s;
}

// p-integral rational reduced mod m (den must be invertible)
inline Int reduce_mod(const Rational& q, const Int& m) {
    auto inv = inverse_mod(Int(q.get_den()), m);
    if (!inv) throw PrecisionError("denominator " + q.get_den().get_str() + " not invertible mod " + m.get_str());
    return mod(Int(q.get_num()) * *inv, m);
}

// Pairwise coprime CRT, result in [0, prod).
inline Int crt_lift(const std::vector<std::pair<Int, Int>>& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].second < 1) throw CongruenceError("modulus must be >= 1");
        for (std::size_t j = i + 1; j < pairs.size(); ++j)
            if (gcd(pairs[i].second, pairs[j].second) != 1)
                throw CongruenceError("moduli " + pairs[i].second.get_str() + " and " + pairs[j].second.get_str() +
                                      " (pairs " + std::to_string(i) + ", " + std::to_string(j) + ") are not coprime");
    }
    Int x = 0, m = 1;
    for (const auto& [r, n] : pairs) {
        Int t = mod((r - x) * *inverse_mod(m, n), n);
        x += m * t;
        m *= n;
    }
    return x;
}

struct Congruence {
    Int residue = 0;  // in [0, modulus)
    Int modulus = 1;
};

// Merge x = r1 (mod m1) with x = r2 (mod m2), moduli arbitrary.
inline std::optional<Congruence> merge(const Congruence& a, const Congruence& b) {
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.modulus.get_mpz_t(), b.modulus.get_mpz_t());
    Int diff = b.residue - a.residue;
    if (mod(diff, g) != 0) return std::nullopt;
    Int l = a.modulus / g * b.modulus;
    Int x = a.residue + a.modulus * mod(diff / g * s, b.modulus / g);
    return Congruence{mod(x, l), l};
}

inline Congruence merge_all(const std::vector<Congruence>& cs) {
    Congruence acc;
    for (const auto& c : cs) {
        auto m = merge(acc, c);
        if (!m)
            throw CongruenceError("inconsistent congruence x = " + c.residue.get_str() + " mod " + c.modulus.get_str());
        acc = *m;
    }
    return acc;
}

// Smallest rational a/b with a/b = x (mod m), |a|, b <= sqrt(m/2).
inline std::optional<Rational> rational_reconstruct(const Int& x, const Int& m) {
    Int bound;
    Int half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    Int r0 = m, r1 = mod(x, m), t0 = 0, t1 = 1;
    while (r1 > bound) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        Int t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    if (t1 == 0 || abs(t1) > bound) return std::nullopt;
    if (gcd(t1, m) != 1) return std::nullopt;
    Rational q(r1, t1);
    q.canonicalize();
    return q;
}

class PrimeBudget {
public:
    PrimeBudget() = default;
    PrimeBudget(std::vector<std::pair<long, int>> pe) : pe_(std::move(pe)) {
        std::sort(pe_.begin(), pe_.end());
        for (std::size_t i = 0; i < pe_.size(); ++i) {
            if (!is_prime(pe_[i].first)) throw std::invalid_argument(std::to_string(pe_[i].first) + " is not prime");
            if (pe_[i].second < 1) throw std::invalid_argument("budget exponents must be >= 1");
            if (i && pe_[i].first == pe_[i - 1].first) throw std::invalid_argument("repeated prime in budget");
        }
    }
    static PrimeBudget uniform(const std::vector<long>& primes, int e) {
        std::vector<std::pair<long, int>> pe;
        for (long p : primes) pe.emplace_back(p, e);
        return PrimeBudget(pe);
    }

    const std::vector<std::pair<long, int>>& entries() const { return pe_; }
    std::size_t size() const { return pe_.size(); }
    bool contains(long p) const {
        return std::any_of(pe_.begin(), pe_.end(), [p](auto& x) { return x.first == p; });
    }
    int exponent(long p) const {
        for (auto& [q, e] : pe_)
            if (q == p) return e;
        return 0;
    }
    Int modulus() const {
        Int m = 1;
        for (auto& [p, e] : pe_) m *= ipow(p, e);
        return m;
    }
    bool operator==(const PrimeBudget&) const = default;

private:
    std::vector<std::pair<long, int>> pe_;
};

// Element of Zhat known modulo p^e at finitely many primes. The "exact" state
// holds an ordinary integer so generic code can write C(0) and C(1) without
// knowing the budget; it adapts to whatever it is combined with.
class ProfiniteApprox {
public:
    struct Component {
        long p;
        int e;
        Int r;  // in [0, p^e)
        bool operator==(const Component&) const = default;
    };

    ProfiniteApprox() : exact_(Int(0)) {}
    ProfiniteApprox(long v) : exact_(Int(v)) {}
    ProfiniteApprox(const Int& v) : exact_(v) {}

    static ProfiniteApprox from_components(std::vector<Component> cs) {
        std::sort(cs.begin(), cs.end(), [](auto& a, auto& b) { return a.p < b.p; });
        ProfiniteApprox x;
        x.exact_.reset();
        for (auto& c : cs) {
            if (!is_prime(c.p) || c.e < 0) throw std::invalid_argument("bad profinite component");
            c.r = mod(c.r, ipow(c.p, c.e));
        }
        x.comps_ = std::move(cs);
        return x;
    }
    static ProfiniteApprox from_integer(const Int& v, const PrimeBudget& b) {
        std::vector<Component> cs;
        for (auto& [p, e] : b.entries()) cs.push_back({p, e, v});
        return from_components(std::move(cs));
    }
    static ProfiniteApprox from_rational(const Rational& q, const PrimeBudget& b) {
        std::vector<Component> cs;
        for (auto& [p, e] : b.entries()) cs.push_back({p, e, reduce_mod(q, ipow(p, e))});
        return from_components(std::move(cs));
    }

    bool is_exact() const { return exact_.has_value(); }
    const Int& exact_value() const { return *exact_; }
    const std::vector<Component>& components() const { return comps_; }

    // (residue, precision) at p; exact values report the requested precision.
    std::optional<std::pair<Int, int>> at(long p, int want = 0) const {
        if (exact_) return std::make_pair(mod(*exact_, ipow(p, want)), want);
        for (auto& c : comps_)
            if (c.p == p) return std::make_pair(c.r, c.e);
        return std::nullopt;
    }
    int precision(long p) const {
        if (exact_) return 1 << 20;
        for (auto& c : comps_)
            if (c.p == p) return c.e;
        return 0;
    }

    ProfiniteApprox materialize(const PrimeBudget& b) const {
        if (!exact_) return *this;
        return from_integer(*exact_, b);
    }

    ProfiniteApprox with_precision(long p, int e) const {
        ProfiniteApprox x = *this;
        for (auto& c : x.comps_)
            if (c.p == p && e < c.e) {
                c.e = e;
                c.r = mod(c.r, ipow(p, e));
            }
        return x;
    }

    // Residue combination; precision is the minimum of the two inputs.
    template <class Op>
    static ProfiniteApprox combine(const ProfiniteApprox& a, const ProfiniteApprox& b, Op op) {
        if (a.exact_ && b.exact_) return ProfiniteApprox(op(*a.exact_, *b.exact_));
        if (a.exact_) return combine(from_like(*a.exact_, b), b, op);
        if (b.exact_) return combine(a, from_like(*b.exact_, a), op);
        if (a.comps_.size() != b.comps_.size()) throw std::invalid_argument("profinite operands over different primes");
        std::vector<Component> cs;
        for (std::size_t i = 0; i < a.comps_.size(); ++i) {
            if (a.comps_[i].p != b.comps_[i].p) throw std::invalid_argument("profinite operands over different primes");
            int e = std::min(a.comps_[i].e, b.comps_[i].e);
            cs.push_back({a.comps_[i].p, e, op(a.comps_[i].r, b.comps_[i].r)});
        }
        return from_components(std::move(cs));
    }

    friend ProfiniteApprox operator+(const ProfiniteApprox& a, const ProfiniteApprox& b) {
        return combine(a, b, [](const Int& x, const Int& y) { return Int(x + y); });
    }
    friend ProfiniteApprox operator-(const ProfiniteApprox& a, const ProfiniteApprox& b) {
        return combine(a, b, [](const Int& x, const Int& y) { return Int(x - y); });
    }
    friend ProfiniteApprox operator*(const ProfiniteApprox& a, const ProfiniteApprox& b) {
        return combine(a, b, [](const Int& x, const Int& y) { return Int(x * y); });
    }
    ProfiniteApprox operator-() const { return ProfiniteApprox(0) - *this; }
    ProfiniteApprox& operator+=(const ProfiniteApprox& o) { return *this = *this + o; }
    ProfiniteApprox& operator-=(const ProfiniteApprox& o) { return *this = *this - o; }
    ProfiniteApprox& operator*=(const ProfiniteApprox& o) { return *this = *this * o; }

    // Equality at the common precision of both sides.
    friend bool operator==(const ProfiniteApprox& a, const ProfiniteApprox& b) { return (a - b).is_zero(); }

    bool is_zero() const {
        if (exact_) return *exact_ == 0;
        return std::all_of(comps_.begin(), comps_.end(), [](auto& c) { return c.r == 0; });
    }

    // CRT of all components (modulus = product of p^e).
    Congruence crt() const {
        if (exact_) throw std::logic_error("crt of exact value");
        std::vector<Congruence> cs;
        for (auto& c : comps_) cs.push_back({c.r, ipow(c.p, c.e)});
        return merge_all(cs);
    }

private:
    static ProfiniteApprox from_like(const Int& v, const ProfiniteApprox& shape) {
        std::vector<Component> cs;
        for (auto& c : shape.comps_) cs.push_back({c.p, c.e, v});
        return from_components(std::move(cs));
    }

    std::optional<Int> exact_;
    std::vector<Component> comps_;
};

using Zhat = ProfiniteApprox;

inline bool is_unit(const Zhat& r) {
    if (r.is_exact()) return r.exact_value() == 1 || r.exact_value() == -1;
    for (auto& c : r.components())
        if (c.e < 1 || mod(c.r, Int(c.p)) == 0) return false;
    return true;
}

// Unit within a budget: exact integers are judged at the budget primes only.
inline bool is_unit(const Zhat& r, const PrimeBudget& b) { return is_unit(r.materialize(b)); }

// binom(r, k) mod p^e via an integer lift of r mod p^{e + v_p(k!)}.
inline Int gen_binomial(const Zhat& r, unsigned long k, long p, int e) {
    if (k == 0) return mod(Int(1), ipow(p, e));
    int need = e + static_cast<int>(vp_factorial(static_cast<long>(k), p));
    Int lift;
    if (r.is_exact()) {
        lift = r.exact_value();
    } else {
        auto a = r.at(p);
        if (!a) throw PrecisionError("prime " + std::to_string(p) + " not in budget");
        if (a->second < need)
            throw PrecisionError("binom(r," + std::to_string(k) + ") mod " + std::to_string(p) + "^" +
                                 std::to_string(e) + " needs r mod " + std::to_string(p) + "^" +
                                 std::to_string(need));
        lift = mod(a->first, ipow(p, need));
    }
    return mod(binomial(lift, k), ipow(p, e));
}

// Integer value if the element looks like a small rational integer
// (rational reconstruction across the budget yields denominator 1).
inline std::optional<Int> integer_candidate(const Zhat& z) {
    if (z.is_exact()) return z.exact_value();
    auto c = z.crt();
    auto q = rational_reconstruct(c.residue, c.modulus);
    if (!q || q->get_den() != 1) return std::nullopt;
    return Int(q->get_num());
}

inline bool integer_consistent(const Zhat& z) { return integer_candidate(z).has_value(); }

// b with b = b_i (mod i), i = 1..m, given b_i as integer residues. Uses the
// CRT over the maximal prime powers q <= m after checking compatibility.
inline Int compatible_lift(const std::vector<Int>& b) {
    const long m = static_cast<long>(b.size());
    for (long i = 1; i <= m; ++i)
        for (long j = 1; j < i; ++j)
            if (i % j == 0 && mod(b[i - 1] - b[j - 1], Int(j)) != 0)
                throw CongruenceError("b_" + std::to_string(i) + " != b_" + std::to_string(j) + " mod " +
                                      std::to_string(j));
    if (m <= 1) return 0;
    std::vector<std::pair<Int, Int>> pairs;
    for (long p : primes_up_to(m)) {
        long q = p;
        while (q <= m / p) q *= p;
        pairs.emplace_back(mod(b[q - 1], Int(q)), Int(q));
    }
    Int x = crt_lift(pairs);
    for (long i = 1; i <= m; ++i)
        if (mod(x - b[i - 1], Int(i)) != 0) throw std::logic_error("compatible_lift postcondition");
    return x;
}

// Profinite family: b_i is read modulo i from the components at the primes of i.
inline Int compatible_lift(const std::vector<Zhat>& b) {
    std::vector<Int> res;
    for (std::size_t idx = 0; idx < b.size(); ++idx) {
        long i = static_cast<long>(idx + 1);
        if (b[idx].is_exact()) {
            res.push_back(mod(b[idx].exact_value(), Int(i)));
            continue;
        }
        std::vector<std::pair<Int, Int>> parts;
        long rest = i;
        for (long p = 2; p <= rest; ++p) {
            if (rest % p) continue;
            int a = 0;
            long q = 1;
            while (rest % p == 0) rest /= p, q *= p, ++a;
            auto c = b[idx].at(p);
            if (!c || c->second < a)
                throw PrecisionError("b_" + std::to_string(i) + " needs precision " + std::to_string(a) + " at " +
                                     std::to_string(p));
            parts.emplace_back(mod(c->first, Int(q)), Int(q));
        }
        res.push_back(crt_lift(parts));
    }
    return compatible_lift(res);
}

// Precision bookkeeping carried by series values.
struct Ledger {
    int trunc_drop = 0;
    std::map<long, int> exponent_loss;

    void absorb(const Ledger& o) {
        trunc_drop = std::max(trunc_drop, o.trunc_drop);
        for (auto& [p, e] : o.exponent_loss) exponent_loss[p] = std::max(exponent_loss[p], e);
    }
    bool operator==(const Ledger&) const = default;
};

}  // namespace ckop

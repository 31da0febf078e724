#include "ckop/multisym.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace ckop;

namespace {

QSeries rand_q(oracle::Rng& g, int T, bool constant = true) {
    QSeries s(RingKind::Q, T);
    for (int i = constant ? 0 : 1; i <= T; ++i) s.c[i] = g.rational(7, 5);
    return s;
}

QSeries rand_z(oracle::Rng& g, int T, long bound = 6) {
    QSeries s(RingKind::Z, T);
    for (int i = 0; i <= T; ++i) s.c[i] = Rational(Int(g.range(-bound, bound)));
    return s;
}

oracle::Poly prod_log(int n, int T) {
    auto l = oracle::lg(1, T);
    oracle::Poly acc = oracle::constant(n, 1);
    for (int i = 0; i < n; ++i) {
        oracle::Poly f;
        for (int k = 1; k <= T; ++k) {
            oracle::Mono m(n, 0);
            m[i] = k;
            f[m] = l[k];
        }
        acc = oracle::mul(acc, f, T);
    }
    return acc;
}

}  // namespace

TEST_SUITE("series") {

TEST_CASE("valuation") {
    CHECK(*valuation(q_series({0, 0, 0, 1, 0, 1, 0, 0, 0})) == 3);
    CHECK_FALSE(valuation(QSeries(RingKind::Q, 6)).has_value());
    CHECK(*valuation(lg_series(2, 6)) == 2);
}

TEST_CASE("lg and Adams series against independent expansions") {
    for (int r = 0; r <= 8; ++r) CHECK(lg_series(r, 10).c == oracle::lg(r, 10));
    CHECK(lg_series(1, 3).c == std::vector<Rational>{0, -1, Rational(-1, 2), Rational(-1, 3)});
    CHECK(lg_series(0, 4).c == std::vector<Rational>{1, 0, 0, 0, 0});
    for (int r = 1; r <= 6; ++r) CHECK(lg_series(r, 8).c[r] == Rational((r % 2) ? -1 : 1) / Rational(factorial(r)));

    for (long r = -5; r <= 7; ++r) {
        auto o = oracle::adams(r, 9);
        CHECK(adams_series(Int(r), 9).c == std::vector<Rational>(o.begin(), o.end()));
    }
    CHECK(adams_series(Int(2), 3).c == std::vector<Rational>{1, -2, 1, 0});
    CHECK(adams_series(Int(-1), 3).c == std::vector<Rational>{1, 1, 1, 1});
    CHECK(adams_series(Int(-1), 6) * adams_series(Int(1), 6) == q_series({1, 0, 0, 0, 0, 0, 0}));
}

TEST_CASE("profinite Adams series") {
    PrimeBudget b({{2, 6}, {3, 4}});
    auto A = adams_series(Zhat::from_integer(7, b), b, 5);
    auto E = to_profinite(adams_series(Int(7), 5), b);
    CHECK(A == E);
    CHECK(A.c[4].precision(2) == 6 - static_cast<int>(vp_factorial(4, 2)));
    CHECK(A.ledger.exponent_loss.at(2) == 3);
    CHECK_THROWS_AS(adams_series(Zhat::from_integer(7, PrimeBudget({{2, 2}})), PrimeBudget({{2, 2}}), 4), PrecisionError);
}

TEST_CASE("phi") {
    for (long r = -4; r <= 6; ++r) {
        auto A = adams_series(Int(r), 8);
        CHECK(phi(A) == scale(Rational(r), truncate(A, 7)));
    }
    for (int r = 1; r <= 6; ++r) CHECK(phi(lg_series(r, 9)) == lg_series(r - 1, 8));
    CHECK(phi(q_series({5, 0, 0, 0})) == QSeries(RingKind::Q, 2));
    CHECK_THROWS_AS(phi(q_series({1})), PrecisionError);
    CHECK(phi(q_series({0, 1, 2})).ledger.trunc_drop == 1);
}

TEST_CASE("weighted lg") {
    oracle::Rng g(4);
    for (int r = 1; r <= 4; ++r) {
        std::vector<Rational> c(8, Rational(5));
        CHECK(weighted_lg(c, r, 8) == scale(Rational(5), lg_series(r, 8)));
    }
    std::vector<Rational> a{3, -1, 4, 1, -5, 9};
    auto w = weighted_lg(a, 1, 6);
    for (int i = 1; i <= 6; ++i) CHECK(w.c[i] == -a[i - 1] / i);
    // brute force over chains at r = 3
    auto w3 = weighted_lg(a, 3, 6);
    for (int j = 1; j <= 6; ++j) {
        Rational s = 0;
        for (int i1 = 1; i1 < j; ++i1)
            for (int i2 = i1 + 1; i2 < j; ++i2) s += a[i1 - 1] / Rational(i1 * i2 * j);
        CHECK(w3.c[j] == -s);
    }
    for (int t = 0; t < 20; ++t) {
        std::vector<Rational> s;
        for (int i = 0; i < 9; ++i) s.push_back(Rational(Int(g.range(-20, 20))));
        for (int r = 2; r <= 4; ++r) CHECK(phi(weighted_lg(s, r, 9)) == weighted_lg(s, r - 1, 8));
    }
}

TEST_CASE("composition examples") {
    oracle::Rng g(8);
    auto id = adams_series(Int(1), 8);
    for (int t = 0; t < 5; ++t) {
        auto H = rand_z(g, 8);
        CHECK(compose_op(id, H) == H);
        CHECK(compose_op(H, id) == H);
    }
    for (long k = -3; k <= 4; ++k)
        for (long m = -3; m <= 4; ++m)
            CHECK(compose_op(adams_series(Int(k), 8), adams_series(Int(m), 8)) == adams_series(Int(k * m), 8));
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; m <= 6; ++m)
            CHECK(compose_op(lg_series(n, 8), lg_series(m, 8)) == (n == m ? lg_series(n, 8) : QSeries(RingKind::Q, 8)));
    auto plus = adams_series(Int(1), 9) + adams_series(Int(-1), 9);
    auto minus = adams_series(Int(1), 9) - adams_series(Int(-1), 9);
    CHECK(compose_op(plus, minus) == QSeries(RingKind::Z, 9));
}

TEST_CASE("composition: commutative, bilinear, equal to the lg-coordinate route") {
    oracle::Rng g(21);
    for (int t = 0; t < 15; ++t) {
        const int T = static_cast<int>(g.range(1, 10));
        auto G = rand_z(g, T), H = rand_z(g, T), K = rand_z(g, T);
        CHECK(compose_op(G, H) == compose_op(H, G));
        CHECK(compose_op(G + K, H) == compose_op(G, H) + compose_op(K, H));
        CHECK(compose_op(G, H + K) == compose_op(G, H) + compose_op(G, K));
        auto Q1 = rand_q(g, T), Q2 = rand_q(g, T);
        // composition in lg coordinates, with lg_i and the projection from the oracle
        auto a = lg_decompose(Q1), b = lg_decompose(Q2);
        std::vector<Rational> want(T + 1, Rational(0));
        for (int i = 0; i <= T; ++i) {
            auto l = oracle::lg(i, T);
            for (int k = 0; k <= T; ++k) want[k] += a[i] * b[i] * l[k];
        }
        CHECK(compose_op(Q1, Q2).c == want);
    }
    PrimeBudget pb({{2, 5}, {3, 3}, {7, 2}});
    for (int t = 0; t < 5; ++t) {
        auto g1 = rand_z(g, 7), h1 = rand_z(g, 7);
        auto G = to_profinite(g1, pb), H = to_profinite(h1, pb);
        CHECK(compose_op(G, H) == compose_op(H, G));
        CHECK(compose_op(G, H) == to_profinite(compose_op(g1, h1), pb));
    }
}

TEST_CASE("lg_decompose and the b-map") {
    CHECK(lg_decompose(adams_series(Int(1), 7)) == std::vector<Rational>(8, Rational(1)));
    auto e3 = lg_decompose(lg_series(3, 7));
    for (int i = 0; i <= 7; ++i) CHECK(e3[i] == (i == 3 ? 1 : 0));
    for (long m = -3; m <= 10; ++m) {
        auto d = lg_decompose(adams_series(Int(m), 12));
        auto b = b_map(adams_series(Int(m), 12), 13);
        for (int n = 0; n <= 12; ++n) {
            CHECK(d[n] == Rational(ipow(Int(m), n)));
            CHECK(b[n] == Rational(ipow(Int(m), n)));
        }
    }
    auto one = b_map(q_series({1, 0, 0, 0}), 4);
    CHECK(one == std::vector<Rational>{1, 0, 0, 0});
    auto ep = scale(Rational(1, 2), adams_series(Int(1), 8) + adams_series(Int(-1), 8));
    auto em = scale(Rational(1, 2), adams_series(Int(1), 8) - adams_series(Int(-1), 8));
    auto bp = b_map(ep, 9), bm = b_map(em, 9);
    for (int n = 0; n <= 8; ++n) {
        CHECK(bp[n] == (n % 2 ? 0 : 1));
        CHECK(bm[n] == (n % 2 ? 1 : 0));
    }
    oracle::Rng g(13);
    for (int t = 0; t < 20; ++t) {
        int T = static_cast<int>(g.range(0, 10));
        auto G = rand_q(g, T);
        CHECK(b_map(G, T + 1) == lg_decompose(G));
    }
}

TEST_CASE("b-map is a ring map and lands in the integers") {
    oracle::Rng g(31);
    for (int t = 0; t < 10; ++t) {
        auto G = rand_z(g, 9), H = rand_z(g, 9);
        auto bg = b_map(G, 10), bh = b_map(H, 10), bgh = b_map(compose_op(G, H), 10), bs = b_map(G + H, 10);
        for (int i = 0; i < 10; ++i) {
            CHECK(bgh[i] == bg[i] * bh[i]);
            CHECK(bs[i] == bg[i] + bh[i]);
            CHECK(is_integer(bg[i]));
        }
    }
    PrimeBudget pb({{2, 4}, {5, 2}});
    auto z = rand_z(g, 6);
    auto bz = b_map(to_profinite(z, pb), 7);
    auto bq = b_map(z, 7);
    for (int i = 0; i < 7; ++i) CHECK(bz[i] == Zhat::from_rational(bq[i], pb));
}

TEST_CASE("congruences of b-map images") {
    oracle::Rng g(41);
    for (int t = 0; t < 15; ++t) {
        auto G = rand_z(g, 12, 20);
        auto b = b_map(G, 13);
        for (long p : {3L, 5L, 7L})
            for (int i = 1; i <= 12; ++i)
                for (int j = 1; j <= 12; ++j)
                    if ((i - j) % (p - 1) == 0) CHECK(mod(Int(b[i].get_num() - b[j].get_num()), Int(p)) == 0);
    }
}

TEST_CASE("desuspension") {
    for (long k = -3; k <= 5; ++k) {
        auto A = adams_series(Int(k), 7);
        CHECK(desuspend(A, 0) == scale(Rational(k), truncate(A, 6)));
        auto P = A - q_series({1, 0, 0, 0, 0, 0, 0, 0});
        CHECK(desuspend(P, 2).c[0] == 0);
    }
    CHECK(desuspend(q_series({3, 0, 0}), 1) == QSeries(RingKind::Q, 1));
    CHECK_THROWS_AS(desuspend(q_series({3}), 0), PrecisionError);
}

}  // TEST_SUITE series

TEST_SUITE("multisym") {

TEST_CASE("star sums") {
    auto s1 = star_sum(1, Fgl::Mult, 4);
    CHECK(s1.terms == oracle::variable(1, 0));
    auto s2 = star_sum(2, Fgl::Mult, 4);
    oracle::Poly want = oracle::variable(2, 0);
    oracle::add_to(want, oracle::variable(2, 1));
    oracle::add_to(want, oracle::mul(oracle::variable(2, 0), oracle::variable(2, 1), 4), -1);
    CHECK(s2.terms == want);
    auto s3 = star_sum(3, Fgl::Add, 4);
    CHECK(s3.terms.size() == 3);
    for (auto& [m, v] : s3.terms) CHECK((degree(m) == 1 && v == 1));
    CHECK(star_sum(0, Fgl::Mult, 3).terms.empty());
}

TEST_CASE("partial derivative examples") {
    auto Dx = partial_derivative(univariate(q_series({0, 1, 0, 0})));
    CHECK(Dx.terms.size() == 1);
    CHECK(Dx.coeff({1, 1}) == -1);
    CHECK(partial_derivative(univariate(lg_series(1, 8))).terms.empty());
    auto G = univariate(q_series({4, 1, 2}));
    auto D0 = iter_partial(q_series({4, 1, 2}), 0);
    CHECK(D0.coeff({0}) == 0);
    CHECK(D0.coeff({1}) == 1);
    CHECK(partial_zero(G).terms == D0.terms);
}

TEST_CASE("partial derivative agrees with direct substitution") {
    oracle::Rng g(3);
    for (Fgl f : {Fgl::Mult, Fgl::Add})
        for (int t = 0; t < 6; ++t) {
            const int T = static_cast<int>(g.range(2, 7));
            auto G = rand_q(g, T);
            auto U = univariate(G, f);
            auto o1 = oracle::partial(oracle::univariate(G.c), 1, T, f == Fgl::Mult);
            CHECK(partial_derivative(U).terms == o1);
            auto o2 = oracle::partial(o1, 2, T, f == Fgl::Mult);
            CHECK(partial_derivative(partial_derivative(U)).terms == o2);
        }
}

TEST_CASE("subset-sum iterate equals repeated derivative") {
    oracle::Rng g(9);
    for (Fgl f : {Fgl::Mult, Fgl::Add})
        for (int t = 0; t < 6; ++t) {
            const int T = static_cast<int>(g.range(1, 8));
            auto G = rand_q(g, T);
            for (int m = 0; m <= 3; ++m) CHECK(iter_partial(G, m, f) == iter_partial_repeated(univariate(G, f), m));
        }
}

TEST_CASE("d^{n-1} lg_n is the product of logarithms") {
    for (int n = 1; n <= 4; ++n) CHECK(iter_partial(lg_series(n, 8), n - 1).terms == prod_log(n, 8));
}

TEST_CASE("valuation of d^{n-1} x^m and constants") {
    for (int n = 1; n <= 4; ++n)
        for (int m = n; m <= 8; ++m) CHECK(*min_degree(iter_partial(monomial(1, m, 9), n - 1)) == m);
    for (int m = 1; m <= 3; ++m) CHECK(iter_partial(q_series({7, 0, 0, 0, 0}), m).terms.empty());
}

TEST_CASE("symmetry, double symmetry and integrality") {
    oracle::Rng g(12);
    for (int t = 0; t < 8; ++t) {
        auto G = rand_z(g, 7);
        for (int m = 1; m <= 3; ++m) {
            auto D = iter_partial(G, m);
            CHECK(is_symmetric(D));
            CHECK(is_double_symmetric(D));
            CHECK(all_integral(D));
        }
    }
    MultiSeries<Rational> A{2, 4, Fgl::Mult, {}};
    A.add({2, 1}, 1);
    A.add({1, 1}, 1);
    CHECK_FALSE(is_double_symmetric(A));
    CHECK_FALSE(as_symmetric(A).has_value());
    SymSeries<Rational> U{1, 5, Fgl::Mult, {{{3}, Rational(1, 2)}}};
    CHECK(is_double_symmetric(U));
}

TEST_CASE("integrate_symmetric") {
    oracle::Rng g(77);
    for (int t = 0; t < 12; ++t) {
        int n = static_cast<int>(g.range(1, 4));
        int T = static_cast<int>(g.range(n, 9));
        Fgl f = g.range(0, 1) ? Fgl::Mult : Fgl::Add;
        auto H = rand_q(g, T, false);
        auto G = iter_partial(H, n - 1, f);
        auto L = integrate_symmetric(*as_symmetric(G));
        CHECK(iter_partial(L, n - 1, f) == G);
        if (f == Fgl::Mult) {
            auto d = lg_decompose(H - L);  // H and L differ by the kernel
            for (int k = n; k <= T; ++k) CHECK(d[k] == 0);
        }
    }
    SymSeries<Rational> logs{3, 8, Fgl::Mult, {}};
    for (auto& [m, v] : prod_log(3, 8)) {
        Mono k = m;
        std::sort(k.begin(), k.end());
        logs.coeffs[k] = v;
    }
    auto L = integrate_symmetric(logs);
    auto d = lg_decompose(L - lg_series(3, 8));
    for (int k = 3; k <= 8; ++k) CHECK(d[k] == 0);
    SymSeries<Rational> mx{2, 6, Fgl::Mult, {{{1, 1}, Rational(-1)}}};
    auto Lx = integrate_symmetric(mx);
    CHECK(iter_partial(Lx, 1) == expand(mx));
    CHECK(lg_decompose(Lx - monomial(1, 1, 6))[2] == 0);
    // symmetric but not a derivative
    bool found = false;
    for (int a = 1; a <= 3 && !found; ++a) {
        SymSeries<Rational> S{2, 6, Fgl::Mult, {{{a, a + 1}, Rational(1)}}};
        if (!is_double_symmetric(S)) {
            found = true;
            CHECK_THROWS_AS(integrate_symmetric(S), NotIntegrable);
        }
    }
    SymSeries<Rational> S2{2, 6, Fgl::Mult, {{{1, 2}, Rational(1)}}};
    CHECK_THROWS_AS(integrate_symmetric(S2), NotIntegrable);
    SymSeries<Rational> S3{2, 5, Fgl::Mult, {{{0, 2}, Rational(1)}}};
    CHECK_THROWS_AS(integrate_symmetric(S3), NotIntegrable);
}

TEST_CASE("aformula") {
    oracle::Rng g(5);
    for (int t = 0; t < 6; ++t) {
        auto G = rand_q(g, 8);
        for (int n = 1; n <= 3; ++n) CHECK(aformula_check(G, n));
    }
    for (int n = 1; n <= 3; ++n) {
        CHECK(aformula_check(lg_series(1, 8), n));
        CHECK(iter_partial(lg_series(1, 8), n).terms.empty());
    }
    auto x2 = monomial(1, 2, 4);
    CHECK(aformula_check(x2, 1));
    // by hand: d(x^2) = 2 x1 x2 - 2 x1^2 x2 - 2 x1 x2^2 + x1^2 x2^2
    auto D = iter_partial(x2, 1);
    CHECK(D.terms == oracle::Poly{{{1, 1}, 2}, {{2, 1}, -2}, {{1, 2}, -2}, {{2, 2}, 1}});
}

}  // TEST_SUITE multisym

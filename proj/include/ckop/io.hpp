#pragma once

// JSON interchange for rationals, profinite values, series, symmetric series
// and sequence windows (nlohmann::json).

#include "classify.hpp"
#include "kgr.hpp"
#include "multisym.hpp"
#include "series.hpp"
#include "stable.hpp"

#include <json.hpp>

#include <variant>

namespace ckop::io {

using json = nlohmann::json;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline json int_json(const Int& x) {
    if (x.fits_slong_p()) return json(x.get_si());
    return json(x.get_str());
}

inline Rational rational_from(const json& j) {
    if (j.is_number_integer()) return Rational(Int(static_cast<long>(j.get<long long>())));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw FormatError("expected a rational (integer or \"num/den\" string), got " + j.dump());
}

inline Int int_from(const json& j) {
    Rational q = rational_from(j);
    if (!is_integer(q)) throw FormatError("expected an integer, got " + j.dump());
    return Int(q.get_num());
}

inline json to_json(const Rational& q) { return to_string(q); }

inline json to_json(const PrimeBudget& b) {
    json a = json::array();
    for (auto& [p, e] : b.entries()) a.push_back({p, e});
    return a;
}

inline PrimeBudget budget_from(const json& j) {
    if (!j.is_array()) throw FormatError("budget must be an array of [p, e]");
    std::vector<std::pair<long, int>> pe;
    for (auto& x : j) {
        if (!x.is_array() || x.size() != 2) throw FormatError("budget entry must be [p, e]");
        pe.emplace_back(x[0].get<long>(), x[1].get<int>());
    }
    try {
        return PrimeBudget(pe);
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

inline json to_json(const Zhat& z, const PrimeBudget& b) {
    json a = json::array();
    const Zhat m = z.materialize(b);
    for (auto& c : m.components()) a.push_back({c.p, c.e, int_json(c.r)});
    return {{"primes", a}};
}

inline Zhat zhat_from(const json& j, const PrimeBudget& b) {
    if (j.is_object()) {
        if (!j.contains("primes")) throw FormatError("profinite value needs a \"primes\" array");
        std::vector<Zhat::Component> cs;
        for (auto& x : j.at("primes")) {
            if (!x.is_array() || x.size() != 3) throw FormatError("profinite entry must be [p, e, residue]");
            long p = x[0].get<long>();
            int e = x[1].get<int>();
            if (!b.contains(p) || b.exponent(p) < e)
                throw FormatError("profinite entry at " + std::to_string(p) + " is outside the series budget");
            cs.push_back({p, e, int_from(x[2])});
        }
        if (cs.size() != b.size()) throw FormatError("profinite value must list every budget prime");
        return Zhat::from_components(cs);
    }
    return Zhat::from_rational(rational_from(j), b);
}

using AnySeries = std::variant<QSeries, ZhatSeries>;

inline json to_json(const QSeries& G) {
    json c = json::array();
    for (auto& x : G.c) c.push_back(G.ring == RingKind::Z ? int_json(Int(x.get_num())) : to_json(x));
    return {{"ring", G.ring == RingKind::Z ? "Z" : "Q"}, {"trunc", G.trunc}, {"coeffs", c}};
}

inline json to_json(const ZhatSeries& G) {
    json c = json::array();
    for (auto& x : G.c) c.push_back(to_json(x, G.budget));
    return {{"ring", {{"profinite", to_json(G.budget)}}}, {"trunc", G.trunc}, {"coeffs", c}};
}

inline AnySeries series_from(const json& j0) {
    const json& j = (j0.is_object() && j0.contains("series")) ? j0.at("series") : j0;
    if (!j.is_object() || !j.contains("ring") || !j.contains("trunc") || !j.contains("coeffs"))
        throw FormatError("series JSON needs ring, trunc and coeffs");
    int T = j.at("trunc").get<int>();
    if (T < 0) throw FormatError("trunc must be >= 0");
    const json& cs = j.at("coeffs");
    if (!cs.is_array() || static_cast<int>(cs.size()) != T + 1)
        throw FormatError("coeffs must have exactly trunc+1 entries");
    const json& ring = j.at("ring");
    if (ring.is_string()) {
        std::string r = ring.get<std::string>();
        if (r != "Q" && r != "Z") throw FormatError("unknown ring " + r);
        std::vector<Rational> c;
        for (auto& x : cs) c.push_back(rational_from(x));
        try {
            return QSeries(r == "Z" ? RingKind::Z : RingKind::Q, T, c);
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what());
        }
    }
    if (ring.is_object() && ring.contains("profinite")) {
        PrimeBudget b = budget_from(ring.at("profinite"));
        ZhatSeries s(RingKind::Profinite, T, b);
        for (int i = 0; i <= T; ++i) s.c[i] = zhat_from(cs[i], b);
        return s;
    }
    throw FormatError("ring must be \"Q\", \"Z\" or {\"profinite\": budget}");
}

inline json to_json(const SymSeries<Rational>& S) {
    json c = json::array();
    for (auto& [k, v] : S.coeffs) c.push_back({k, to_json(v)});
    return {{"nvars", S.nvars}, {"trunc", S.trunc}, {"fgl", S.fgl == Fgl::Mult ? "mult" : "add"}, {"coeffs", c}};
}

inline SymSeries<Rational> sym_from(const json& j) {
    SymSeries<Rational> S;
    S.nvars = j.at("nvars").get<int>();
    S.trunc = j.at("trunc").get<int>();
    std::string f = j.at("fgl").get<std::string>();
    if (f != "mult" && f != "add") throw FormatError("fgl must be mult or add");
    S.fgl = f == "mult" ? Fgl::Mult : Fgl::Add;
    for (auto& e : j.at("coeffs")) {
        Mono m = e.at(0).get<Mono>();
        if (static_cast<int>(m.size()) != S.nvars) throw FormatError("exponent tuple length != nvars");
        if (degree(m) > S.trunc) throw FormatError("monomial above truncation");
        std::sort(m.begin(), m.end());
        S.coeffs[m] += rational_from(e.at(1));
    }
    return S;
}

inline json to_json(const BiSeqWindow& w) {
    json v = json::array();
    for (auto& x : w.values) v.push_back(int_json(x));
    return {{"start", w.start}, {"values", v}};
}

inline BiSeqWindow window_from(const json& j) {
    BiSeqWindow w;
    w.start = j.at("start").get<long>();
    for (auto& x : j.at("values")) w.values.push_back(int_from(x));
    if (w.values.empty()) throw FormatError("window must be nonempty");
    return w;
}

inline json to_json(const SCriterionResult& r) {
    json j = {{"member", r.member}, {"skipped", r.skipped}, {"untested_primes", r.untested_primes}};
    if (r.witness) j["witness"] = {{"p", r.witness->p}, {"n", r.witness->n}, {"m", r.witness->m}, {"j", r.witness->j}};
    return j;
}

inline json to_json(const DnRecord& d) {
    json f = json::object();
    for (auto& [p, v] : d.per_prime) f[std::to_string(p)] = v;
    return {{"n", d.n}, {"value", int_json(d.value)}, {"per_prime", f}};
}

inline std::string factorization(const DnRecord& d) {
    if (d.per_prime.empty()) return "1";
    std::string s;
    for (auto& [p, v] : d.per_prime) {
        if (!s.empty()) s += "*";
        s += std::to_string(p);
        if (v > 1) s += "^" + std::to_string(v);
    }
    return s;
}

}  // namespace ckop::io

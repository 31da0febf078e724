// ckop: tables, membership checks, basis series and identity suites.
//
// Exit codes: 0 success / member, 1 non-member / suite failure, 2 usage,
// parse or precision error.

#include "suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace ckop;
using io::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<PrimeBudget> cli_budget(const std::vector<long>& primes, int prec) {
    if (primes.empty()) return std::nullopt;
    if (prec < 1) throw UsageError("--prec must be >= 1");
    try {
        return PrimeBudget::uniform(primes, prec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_dn(int max_n, const std::string& format) {
    if (max_n < 0) throw UsageError("--max must be >= 0");
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    std::vector<DnRecord> rows;
    for (int n = 0; n <= max_n; ++n) {
        auto d = dn(n);
        for (long p : primes_up_to(n + 1))
            if (vp_dn_vandermonde(n, p) != vp_dn(n, p)) {
                std::cerr << "d_" << n << ": routes disagree at p = " << p << "\n";
                return 1;
            }
        rows.push_back(d);
    }
    if (format == "csv") {
        std::cout << "n,d_n,factorization\n";
        for (auto& d : rows) std::cout << d.n << "," << d.value.get_str() << "," << io::factorization(d) << "\n";
    } else {
        json a = json::array();
        for (auto& d : rows) {
            json j = io::to_json(d);
            j["factorization"] = io::factorization(d);
            a.push_back(j);
        }
        emit(a);
    }
    return 0;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io::FormatError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw io::FormatError(std::string("malformed JSON: ") + e.what());
    }
}

template <class C>
json first_bad_monomial(const MultiSeries<C>& D) {
    for (auto& [m, v] : D.terms) {
        bool bad;
        if constexpr (std::is_same_v<C, Zhat>)
            bad = !integer_consistent(v);
        else
            bad = !is_integer(v);
        if (bad) {
            json j = {{"monomial", m}};
            if constexpr (std::is_same_v<C, Rational>) j["coeff"] = io::to_json(v);
            return j;
        }
    }
    return nullptr;
}

template <class C>
json check_series(const Series<C>& G, const std::string& test, int n, int m) {
    json out = {{"test", test}};
    auto need_n = [&] {
        if (n < 1) throw UsageError("--n must be >= 1");
        if (G.trunc < n)
            throw PrecisionError("truncation " + std::to_string(G.trunc) + " too small for n = " + std::to_string(n));
        out["n"] = n;
    };
    auto partials = [&] {
        if constexpr (std::is_same_v<C, Zhat>)
            return iter_partial(materialize(G), n - 1);
        else
            return iter_partial(G, n - 1);
    };
    if (test == "qn" || test == "qnm") {
        need_n();
        auto D = partials();
        json bad = first_bad_monomial(D);
        bool member = bad.is_null();
        if (!member) out["witness"] = bad;
        if (test == "qnm") {
            out["m"] = m;
            auto v = min_degree(D);
            out["valuation"] = v ? json(*v) : json("inf");
            if (member && v && *v < m) {
                member = false;
                out["witness"] = {{"valuation", *v}};
            }
        }
        out["member"] = member;
    } else if (test == "opnm") {
        need_n();
        if (m < n) throw UsageError("--m must be >= --n for opnm");
        out["m"] = m;
        bool member = in_Opnm_phi(G, n, m);
        out["member"] = member;
        if (!member) {
            auto P = phi_power(G, n);
            for (int i = 0; i <= P.trunc; ++i) {
                bool integral;
                if constexpr (std::is_same_v<C, Zhat>)
                    integral = integer_consistent(P.c[i].materialize(G.budget));
                else
                    integral = is_integer(P.c[i]);
                if (!integral || (!is_zero_value(P.c[i]) && i < m - n)) {
                    out["witness"] = {{"phi_power_degree", i}, {"reason", integral ? "valuation" : "not integral"}};
                    break;
                }
            }
        }
    } else if (test == "s") {
        auto r = s_criterion(G);
        out.update(io::to_json(r));
    } else if (test == "tower") {
        need_n();
        if constexpr (std::is_same_v<C, Zhat>) {
            out["member"] = tower_member(G, n);
        } else {
            throw UsageError("tower test needs a profinite series or --primes");
        }
    } else {
        throw UsageError("unknown test " + test + " (qn, qnm, opnm, s, tower)");
    }
    return out;
}

int cmd_check(const std::string& input, const std::string& test, int n, int m, int trunc,
              const std::optional<PrimeBudget>& budget) {
    auto S = io::series_from(read_json_file(input));
    if (trunc >= 0) {
        std::visit(
            [&](auto& G) {
                if (trunc > G.trunc) throw PrecisionError("--trunc exceeds the input truncation");
                G = truncate(G, trunc);
            },
            S);
    }
    if (budget) {
        if (auto* Q = std::get_if<QSeries>(&S)) {
            try {
                S = to_profinite(*Q, *budget);
            } catch (const PrecisionError& e) {
                throw PrecisionError(std::string("cannot reduce into budget: ") + e.what());
            }
        }
    }
    json out = std::visit([&](auto& G) { return check_series(G, test, n, m); }, S);
    if (auto* Z = std::get_if<ZhatSeries>(&S)) out["budget"] = io::to_json(Z->budget);
    emit(out);
    return out["member"].get<bool>() ? 0 : 1;
}

int cmd_basis(int n, int T, const std::optional<PrimeBudget>& budget) {
    if (n < 0 || T < n) throw UsageError("basis needs 0 <= n <= trunc");
    const Int d = dn(n).value;
    json out = {{"kind", "F"}, {"n", n}, {"trunc", T}, {"leading", io::int_json(d)}};
    if (budget) {
        // the leading term must survive the reduction at every budget prime
        json need = json::object();
        bool short_ = false;
        for (auto& [p, e] : budget->entries()) {
            int req = static_cast<int>(*vp(d, p)) + 1;
            need[std::to_string(p)] = req;
            short_ = short_ || e < req;
        }
        if (short_) throw PrecisionError("precision exhausted; required exponents " + need.dump());
        out["required_exponents"] = need;
    }
    auto F = construct_Fn(n, T);
    if (budget) {
        out["budget"] = io::to_json(*budget);
        out["series"] = io::to_json(F.family.reduce(*budget));
    } else {
        out["series"] = io::to_json(*F.integer);
    }
    emit(out);
    return 0;
}

int cmd_verify(const std::string& suite, int T, unsigned long long seed) {
    auto r = suites::run(suite, T, seed);
    if (!r) {
        std::string all;
        for (auto& s : suites::names()) all += (all.empty() ? "" : ", ") + s;
        std::cerr << "unknown suite " << suite << " (" << all << ")\n";
        return 2;
    }
    json out = {{"suite", suite}, {"T", T}, {"seed", seed}, {"cases", r->cases}, {"pass", r->pass}};
    if (!r->pass) out["counterexample"] = r->counterexample;
    emit(out);
    return r->pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ckop: series calculus for connective K-theory operations"};
    app.require_subcommand(1);

    std::vector<long> primes;
    int prec = 8;
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--primes", primes, "budget primes, e.g. 2,3,5")->delimiter(',');
        c->add_option("--prec", prec, "exponent at every budget prime");
    };

    int max_n = 7;
    std::string format = "csv";
    auto* dn_cmd = app.add_subcommand("dn", "table of d_n with factorizations");
    dn_cmd->add_option("--max", max_n, "largest n");
    dn_cmd->add_option("--format", format, "csv or json");

    std::string input, test;
    int n = 1, m = -1, trunc = -1;
    auto* check = app.add_subcommand("check", "membership test for a series given as JSON");
    check->add_option("--input", input, "series JSON file")->required();
    check->add_option("--test", test, "qn, qnm, opnm, s or tower")->required();
    check->add_option("--n", n);
    check->add_option("--m", m);
    check->add_option("--trunc", trunc, "truncate the input first");
    add_budget(check);

    int bn = 0, bT = 8;
    auto* basis = app.add_subcommand("basis", "the stable basis series F_n");
    basis->add_option("--n", bn)->required();
    basis->add_option("--trunc", bT);
    add_budget(basis);

    std::string suite;
    int vT = 8;
    unsigned long long seed = 1;
    auto* verify = app.add_subcommand("verify", "run a randomized identity suite");
    verify->add_option("suite", suite)->required();
    verify->add_option("--T,--trunc", vT);
    verify->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*dn_cmd) return cmd_dn(max_n, format);
        if (*check) return cmd_check(input, test, n, m < 0 ? n : m, trunc, cli_budget(primes, prec));
        if (*basis) return cmd_basis(bn, bT, cli_budget(primes, prec));
        if (*verify) return cmd_verify(suite, vT, seed);
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 2;
    } catch (const io::FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

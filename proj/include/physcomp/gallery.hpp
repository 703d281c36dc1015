#pragma once

// Ready-made systems and programs: tape machines, oracle machines, digit
// extraction by shift maps, timed advice recovery and timing-based binary
// search, plus the non-classical C1/C2 systems and the h_z demonstration
// map.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "physcomp/interpreter.hpp"
#include "physcomp/model.hpp"

namespace physcomp::gallery {

using WordPredicate = std::function<bool(const std::string&)>;
using Decider = std::function<bool(const std::string& advice, const std::string& word)>;

// ---------------------------------------------------------------------------
// Named callables

inline const std::map<std::string, WordPredicate>& predicates() {
    static const std::map<std::string, WordPredicate> table{
        {"even-ones",
         [](const std::string& w) { return std::count(w.begin(), w.end(), '1') % 2 == 0; }},
        {"palindrome", [](const std::string& w) { return std::equal(w.begin(), w.end(), w.rbegin()); }},
        {"contains-11", [](const std::string& w) { return w.find("11") != std::string::npos; }},
        {"all", [](const std::string&) { return true; }},
        {"none", [](const std::string&) { return false; }},
    };
    return table;
}

inline const std::map<std::string, Decider>& deciders() {
    static const std::map<std::string, Decider> table{
        {"xor-parity",
         [](const std::string& a, const std::string& w) {
             return (std::count(a.begin(), a.end(), '1') + std::count(w.begin(), w.end(), '1')) % 2 == 0;
         }},
        {"prefix-match", [](const std::string& a, const std::string& w) { return w.rfind(a, 0) == 0; }},
        {"advice-bit",
         [](const std::string& a, const std::string& w) {
             return !a.empty() && a[w.size() % a.size()] == '1';
         }},
    };
    return table;
}

inline WordPredicate predicate(const std::string& name) {
    const auto it = predicates().find(name);
    if (it == predicates().end()) {
        throw InvalidParameter("unknown predicate " + name);
    }
    return it->second;
}

inline Decider decider(const std::string& name) {
    const auto it = deciders().find(name);
    if (it == deciders().end()) {
        throw InvalidParameter("unknown decider " + name);
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Small construction helpers

namespace detail {

inline SetExpr half_open(const Rational& a, const Rational& b) { return sets::interval(a, b, true, false); }

/// 1-D polynomial c1 * x + c0.
inline ClassicalMap affine(const Rational& c1, const Rational& c0, const std::string& name) {
    std::vector<Term> terms;
    if (c1 != 0) {
        terms.push_back(Term{RealValue(c1), {Rational(1)}});
    }
    if (c0 != 0 || terms.empty()) {
        terms.push_back(Term{RealValue(c0), {Rational(0)}});
    }
    return ClassicalMap(1, {MultiPoly{1, terms}}, name);
}

inline SystemTransformation classical(const std::string& name, ClassicalMap m) {
    m.name = name;
    return SystemTransformation{name, std::move(m)};
}

/// Largest integer not above x.
inline Integer floor_value(const RealValue& x, std::size_t budget) {
    if (const auto e = x.exact()) {
        return floor_of(*e);
    }
    for (std::size_t d : depth_schedule(budget)) {
        const Interval iv = x.enclose(d);
        const Integer lo = floor_of(iv.lo);
        if (lo == floor_of(iv.hi) && Rational(iv.hi) != Rational(lo + 1)) {
            return lo;
        }
    }
    throw PrecisionExhausted("integer part undecided");
}

/// Membership in {x : binary of floor(x) is 1w with w in A}.
inline PredicateSet::Fn floor_word_in(WordPredicate pred) {
    return [pred](const Point& x, std::size_t budget) {
        const Integer n = floor_value(x[0], budget);
        if (n < 1) {
            return false;
        }
        const std::string bits = n.get_str(2);
        return pred(bits.substr(1));
    };
}

struct RuleSink {
    Program& q;

    void add(const std::string& from, const std::string& part, std::optional<std::string> elem,
             const std::string& to, Action a) {
        q.rules.push_back(Rule{from, part, std::move(elem), to, std::move(a)});
    }
    void tape(const std::string& from, Symbol s, const std::string& to, Action a) {
        add(from, kTapePartition, symbol_label(s), to, std::move(a));
    }
    /// One rule per symbol in `syms`, all with the same outcome.
    void any(const std::string& from, const std::string& syms, const std::string& to, const Action& a) {
        for (Symbol s : syms) {
            tape(from, s, to, a);
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Systems

inline std::string tape_op_name(const TapeOp& op) {
    switch (op.kind) {
        case TapeOp::Kind::Identity: return "x_id";
        case TapeOp::Kind::ShiftLeft: return "x_left";
        case TapeOp::Kind::ShiftRight: return "x_right";
        case TapeOp::Kind::Write: return op.symbol == kBlank ? "x_erase" : std::string("x_write_") + op.symbol;
    }
    return "x_id";
}

/// A Turing tape as configuration space: the read partition and the tape
/// operations over the given alphabet, starting from the blank tape.
inline SystemDef tm(const std::string& alphabet, const std::string& name = "tm") {
    SystemDef c;
    c.name = name;
    c.space = TapeSpace{alphabet};
    c.partitions.push_back(SystemPartition{"x_read", TapeReadPartition{alphabet}});
    std::vector<TapeOp> ops{TapeOp::identity(), TapeOp::left(), TapeOp::right()};
    for (Symbol s : alphabet) {
        ops.push_back(TapeOp::write(s));
    }
    ops.push_back(TapeOp::write(kBlank));
    for (const TapeOp& op : ops) {
        c.transformations.push_back(SystemTransformation{tape_op_name(op), op});
    }
    c.initial = TapeConfig{};
    return c;
}

inline std::string oracle_ref(const std::string& pred_name, Symbol a) {
    return "oracle:" + pred_name + ":" + std::string(1, a);
}

/// Oracle callable: writes `a` under the head when the word right of the
/// head is in A, otherwise leaves the tape unchanged.
inline std::function<Configuration(const Configuration&)> oracle_fn(WordPredicate pred, Symbol a) {
    return [pred, a](const Configuration& c) -> Configuration {
        TapeConfig t = std::get<TapeConfig>(c);
        if (pred(t.word_right_of_head())) {
            t.write(a);
        }
        return t;
    };
}

/// The configuration space is a second tape; `oracle` asks whether the
/// word right of its head lies in A.
inline SystemDef oracle_tm(const std::string& alphabet, const std::string& pred_name, WordPredicate pred, Symbol a) {
    std::string x_alpha = alphabet;
    if (x_alpha.find(a) == std::string::npos) {
        x_alpha.push_back(a);
    }
    SystemDef c = tm(x_alpha, "oracle_tm");
    c.transformations.push_back(SystemTransformation{"oracle", OpaqueMap{oracle_ref(pred_name, a), oracle_fn(std::move(pred), a)}});
    return c;
}

/// [0,1) with the halves partition and the doubling map, started at phi.
inline SystemDef cphi(const RealValue& phi) {
    SystemDef c;
    c.name = "cphi";
    const SetExpr unit = detail::half_open(0, 1);
    c.space = unit;
    const SetExpr lo = detail::half_open(0, Rational(1, 2));
    const SetExpr hi = detail::half_open(Rational(1, 2), 1);
    c.partitions.push_back(SystemPartition{"alpha", Partition{{{"lo", lo}, {"hi", hi}}, unit, {}}});
    PiecewiseMap t{{{lo, detail::affine(2, 0, "")}, {hi, detail::affine(2, -1, "")}}, unit, "T"};
    c.transformations.push_back(SystemTransformation{"T", t});
    c.initial = Point{phi};
    return c;
}

/// [0,1) with thirds, the ternary shift, started at the interleaved
/// encoding of g, with measurement time ceil(max_k |x - k/3|^-1).
inline SystemDecl cg(const std::string& advice_name, const PrefixAdvice& g) {
    SystemDef c;
    c.name = "cg";
    const SetExpr unit = detail::half_open(0, 1);
    c.space = unit;
    const SetExpr lo = detail::half_open(0, Rational(1, 3));
    const SetExpr mid = detail::half_open(Rational(1, 3), Rational(2, 3));
    const SetExpr hi = detail::half_open(Rational(2, 3), 1);
    c.partitions.push_back(SystemPartition{"alpha", Partition{{{"lo", lo}, {"mid", mid}, {"hi", hi}}, unit, {}}});
    PiecewiseMap t{{{lo, detail::affine(3, 0, "")}, {mid, detail::affine(3, -1, "")}, {hi, detail::affine(3, -2, "")}},
                   unit,
                   "T"};
    c.transformations.push_back(SystemTransformation{"T", t});
    c.initial = Point{advice_real(advice_name, g, Encoding::TernaryInterleaved)};
    KappaSpec k{DistanceFormula{{RealValue(0), RealValue(Rational(1, 3)), RealValue(Rational(2, 3)), RealValue(1)}}};
    return SystemDecl{c, true, {{"alpha", k}}};
}

/// [0,1] split at phi = 0.g(inf) in binary, with halving maps, a reset to
/// 1/2, and measurement time ceil(|x - phi|^-1).
inline SystemDecl dg(const std::string& advice_name, const PrefixAdvice& g) {
    SystemDef c;
    c.name = "dg";
    const SetExpr unit = sets::interval(Rational(0), Rational(1), true, true);
    c.space = unit;
    const RealValue phi = advice_real(advice_name, g, Encoding::Binary);
    const SetExpr le = sets::interval(RealValue(0), phi, true, true);
    const SetExpr gt = sets::interval(phi, RealValue(1), false, true);
    c.partitions.push_back(SystemPartition{"alpha", Partition{{{"le", le}, {"gt", gt}}, unit, {}}});
    c.transformations.push_back(detail::classical("T0", detail::affine(Rational(1, 2), 0, "")));
    c.transformations.push_back(detail::classical("T1", detail::affine(Rational(1, 2), Rational(1, 2), "")));
    c.transformations.push_back(detail::classical("R", detail::affine(0, Rational(1, 2), "")));
    c.initial = Point{RealValue(Rational(1, 2))};
    return SystemDecl{c, true, {{"alpha", KappaSpec{DistanceFormula{{phi}}}}}};
}

inline std::string floor_predicate_ref(const std::string& pred_name) { return "floor-word:" + pred_name; }

/// R with the (generally non-measurable) partition by the integer part's
/// binary word, and the maps x+1, 2x.
inline SystemDef c1(const std::string& pred_name, WordPredicate pred) {
    SystemDef c;
    c.name = "c1";
    c.space = sets::everything(1);
    const SetExpr in = sets::predicate(floor_predicate_ref(pred_name), 1, detail::floor_word_in(std::move(pred)));
    c.partitions.push_back(SystemPartition{"alpha_A", Partition{{{"in", in}, {"out", sets::complement(in)}}, {}, {}}});
    c.transformations.push_back(detail::classical("p", detail::affine(1, 1, "")));
    c.transformations.push_back(detail::classical("t", detail::affine(2, 0, "")));
    c.initial = Point{RealValue(0)};
    return c;
}

inline std::string sign_map_ref(const std::string& pred_name) { return "sign-of:" + pred_name; }

/// R with the sign partition, x+1, 2x, and an opaque map sending the
/// members of the C1 partition to 1 and everything else to -1.
inline SystemDef c2(const std::string& pred_name, WordPredicate pred) {
    SystemDef c;
    c.name = "c2";
    c.space = sets::everything(1);
    const SetExpr neg = sets::interval(std::nullopt, std::optional<RealValue>(RealValue(0)), false, false);
    const SetExpr nonneg = sets::interval(std::optional<RealValue>(RealValue(0)), std::nullopt, true, false);
    c.partitions.push_back(SystemPartition{"sign", Partition{{{"neg", neg}, {"nonneg", nonneg}}, {}, {}}});
    c.transformations.push_back(detail::classical("p", detail::affine(1, 1, "")));
    c.transformations.push_back(detail::classical("t", detail::affine(2, 0, "")));
    auto member = detail::floor_word_in(std::move(pred));
    OpaqueMap t{sign_map_ref(pred_name), [member](const Configuration& cfg) -> Configuration {
                    const Point& x = std::get<Point>(cfg);
                    return Point{RealValue(member(x, precision_cap()) ? 1 : -1)};
                }};
    c.transformations.push_back(SystemTransformation{"T", t});
    c.initial = Point{RealValue(0)};
    return c;
}

/// The plane with h_z acting on the first coordinate:
/// (x, y) -> (x - (x - z) / (y |x - z|), y).
inline SystemDef hz_demo(const Rational& z, const Point& start) {
    SystemDef c;
    c.name = "hz";
    c.space = sets::everything(2);
    const SetExpr left = sets::box({Bound{}, Bound{}}, {Bound{RealValue(z), false}, Bound{}});
    const SetExpr right = sets::box({Bound{RealValue(z), false}, Bound{}}, {Bound{}, Bound{}});
    const SetExpr right_closed = sets::box({Bound{RealValue(z), true}, Bound{}}, {Bound{}, Bound{}});
    c.partitions.push_back(SystemPartition{"side", Partition{{{"left", left}, {"right", right_closed}}, {}, {}}});
    auto h = [](const Rational& sign) {
        MultiPoly first{2, {Term{RealValue(1), {Rational(1), Rational(0)}}, Term{RealValue(sign), {Rational(0), Rational(-1)}}}};
        MultiPoly second{2, {Term{RealValue(1), {Rational(0), Rational(1)}}}};
        return ClassicalMap(2, {first, second});
    };
    PiecewiseMap map{{{right, h(-1)}, {left, h(1)}}, std::nullopt, "h"};
    c.transformations.push_back(SystemTransformation{"h", map});
    c.initial = start;
    return c;
}

// ---------------------------------------------------------------------------
// Programs

/// Reads n binary digits of the start point of cphi onto the tape: measure
/// the half, write the digit, double, move on.
inline Program extract_binary_digits(std::size_t n) {
    Program q;
    q.name = "extract_binary_digits";
    q.system = "cphi";
    q.alphabet = "01";
    q.initial = n == 0 ? q.accept : "d0";
    detail::RuleSink r{q};
    for (std::size_t i = 0; i < n; ++i) {
        const std::string d = "d" + std::to_string(i);
        const std::string s = "s" + std::to_string(i);
        const std::string t = "t" + std::to_string(i);
        const bool last = i + 1 == n;
        r.add(d, "alpha", "lo", last ? q.accept : s, Action::tape(TapeOp::write('0')));
        r.add(d, "alpha", "hi", last ? q.accept : s, Action::tape(TapeOp::write('1')));
        if (!last) {
            r.any(s, "01", t, Action::named("T"));
            r.any(t, "01", "d" + std::to_string(i + 1), Action::tape(TapeOp::left()));
        }
    }
    return q;
}

/// Recovers n advice symbols from cg under time-aware semantics: for each
/// symbol, measure and record the digit, shift, measure the inserted 2,
/// shift again.
inline Program extract_ternary_advice(std::size_t n) {
    Program q;
    q.name = "extract_ternary_advice";
    q.system = "cg";
    q.alphabet = "01";
    q.initial = n == 0 ? q.accept : "m0";
    detail::RuleSink r{q};
    const Action idle = Action::tape(TapeOp::identity());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string k = std::to_string(i);
        const std::string next = i + 1 == n ? q.accept : "m" + std::to_string(i + 1);
        r.any("m" + k, "01_", "w" + k, Action::named("alpha"));
        r.add("w" + k, "alpha", std::nullopt, "w" + k, idle);
        r.add("w" + k, "alpha", "lo", "t" + k, Action::tape(TapeOp::write('0')));
        r.add("w" + k, "alpha", "mid", "t" + k, Action::tape(TapeOp::write('1')));
        r.any("t" + k, "01", "u" + k, Action::named("T"));
        r.any("u" + k, "01", "x" + k, Action::named("alpha"));
        r.add("x" + k, "alpha", std::nullopt, "x" + k, idle);
        r.add("x" + k, "alpha", "hi", "v" + k, Action::named("T"));
        r.any("v" + k, "01", next, Action::tape(TapeOp::left()));
    }
    return q;
}

namespace detail {

inline constexpr const char* kSearchSymbols = "01ab_";

/// Plan for waiting exactly M - 1 applications after commencing a
/// measurement at cell 0 and ending on cell l: a k-bit down-counter
/// preloaded with n, then `pads` idle steps.  k == 0 means no counter.
struct WaitPlan {
    std::size_t k = 0;
    Integer n = 0;
    Integer pads = 0;
};

inline std::size_t popcount(const Integer& n) { return mpz_popcount(n.get_mpz_t()); }

/// Counter cost: preload 3k-1, each decrement of v costs 3*tz(v)+3, the
/// final borrow and erase 4k+2; the sum of tz over 1..n is n - popcount(n).
inline Integer counter_cost(std::size_t k, const Integer& n) {
    return Integer(6) * n - Integer(3 * popcount(n)) + Integer(7 * k + 1);
}

inline WaitPlan plan_wait(const Integer& m, std::size_t l) {
    const Integer budget = m - 1 - Integer(l);  // applications left after travelling l cells
    WaitPlan plan;
    if (budget <= 64) {
        plan.pads = budget;
        return plan;
    }
    for (std::size_t k = 1; k < 64; ++k) {
        Integer n = (budget - Integer(7 * k + 1)) / 6;
        if (n < 0) {
            break;
        }
        Integer cap;
        mpz_ui_pow_ui(cap.get_mpz_t(), 2, k);
        if (n >= cap) {
            continue;
        }
        plan.k = k;
        plan.n = n;
        plan.pads = budget - counter_cost(k, n);
        return plan;
    }
    plan.pads = budget;
    return plan;
}

/// Appends the chain `from -> ... -> to` of `count` single-action states.
inline void chain(RuleSink& r, const std::string& from, const std::string& stem, std::size_t count,
                  const std::string& to, const Action& a) {
    std::string cur = from;
    for (std::size_t i = 0; i < count; ++i) {
        const std::string nxt = i + 1 == count ? to : stem + std::to_string(i + 1);
        r.any(cur, kSearchSymbols, nxt, a);
        cur = nxt;
    }
}

/// Rounds 0..len-1 of the timing search, digits written from the head's
/// cell at entry rightwards; the counter lives to the left of that cell.
/// Returns the entry state.
inline std::string append_search_block(Program& q, const std::string& prefix, std::size_t len,
                                       const std::string& exit) {
    RuleSink r{q};
    const Action left = Action::tape(TapeOp::left());
    const Action right = Action::tape(TapeOp::right());
    const Action idle = Action::tape(TapeOp::identity());
    const std::string syms = kSearchSymbols;
    auto entry = [&](std::size_t l) { return prefix + "r" + std::to_string(l) + "_reset"; };
    for (std::size_t l = 0; l < len; ++l) {
        const std::string p = prefix + "r" + std::to_string(l) + "_";
        Integer m;
        mpz_ui_pow_ui(m.get_mpz_t(), 2, l + 2);

        // x = 0.a1..al01 built from 1/2, reading the known digits leftwards.
        r.any(p + "reset", syms, p + "half", Action::named("R"));
        r.any(p + "half", syms, l > 0 ? p + "sh" + std::to_string(l - 1) : p + "go", Action::named("T0"));
        for (std::size_t jj = l; jj-- > 0;) {
            const std::string j = std::to_string(jj);
            const std::string next = jj > 0 ? p + "sh" + std::to_string(jj - 1) : p + "go";
            r.any(p + "sh" + j, syms, p + "rd" + j, right);
            r.tape(p + "rd" + j, '0', next, Action::named("T0"));
            r.tape(p + "rd" + j, '1', next, Action::named("T1"));
        }

        const WaitPlan plan = plan_wait(m, l);
        const std::string travel = p + "tr";
        const std::string pads = p + "pad";
        const std::string check = p + "chk";
        const std::string after_travel = plan.pads > 0 ? pads + "0" : check;
        const std::string travel_start = l > 0 ? travel + "0" : after_travel;

        if (plan.k == 0) {
            r.any(p + "go", syms, travel_start, Action::named("alpha"));
        } else {
            r.any(p + "go", syms, p + "c_init", Action::named("alpha"));
            const std::size_t k = plan.k;
            r.any(p + "c_init", syms, p + "cw0", right);
            for (std::size_t j = 0; j < k; ++j) {
                const Symbol bit = mpz_tstbit(plan.n.get_mpz_t(), j) ? 'b' : 'a';
                const std::string w = p + "cw" + std::to_string(j);
                if (j + 1 < k) {
                    r.any(w, syms, p + "cm" + std::to_string(j), Action::tape(TapeOp::write(bit)));
                    r.any(p + "cm" + std::to_string(j), syms, p + "cw" + std::to_string(j + 1), right);
                } else {
                    r.any(w, syms, k > 1 ? p + "cb" + std::to_string(k - 1) : p + "D",
                          Action::tape(TapeOp::write(bit)));
                }
            }
            for (std::size_t j = k - 1; j >= 1; --j) {
                r.any(p + "cb" + std::to_string(j), syms, j > 1 ? p + "cb" + std::to_string(j - 1) : p + "D", left);
            }
            r.tape(p + "D", 'a', p + "D2", Action::tape(TapeOp::write('b')));
            r.tape(p + "D", 'b', p + "R1", Action::tape(TapeOp::write('a')));
            r.tape(p + "D", kBlank, p + "E", left);
            r.any(p + "D2", syms, p + "D", right);
            r.any(p + "R1", syms, p + "R2", left);
            r.any(p + "R2", "ab", p + "R2", left);
            r.any(p + "R2", "01_", p + "D", right);
            r.tape(p + "E", 'b', p + "E2", Action::tape(TapeOp::write(kBlank)));
            r.any(p + "E", "01_", travel_start, idle);
            r.any(p + "E2", syms, p + "E", left);
        }
        if (l > 0) {
            chain(r, travel + "0", travel, l, after_travel, left);
        }
        if (plan.pads > 0) {
            chain(r, pads + "0", pads, plan.pads.get_ui(), check, idle);
        }

        const bool last = l + 1 == len;
        const std::string after = last ? exit : p + "mv";
        r.add(check, "alpha", "le", after, Action::tape(TapeOp::write('1')));
        r.add(check, "alpha", "gt", after, Action::tape(TapeOp::write('0')));
        r.add(check, "alpha", std::nullopt, after, Action::tape(TapeOp::write('0')));
        if (!last) {
            r.any(p + "mv", "01", entry(l + 1), left);
        }
    }
    return len == 0 ? exit : entry(0);
}

}  // namespace detail

/// Recovers the first L binary digits of phi on dg, one digit per round,
/// from whether a measurement near phi finishes within a fixed number of
/// steps.
inline Program timing_binary_search(std::size_t L) {
    if (L > 24) {
        throw InvalidParameter("timing search supports at most 24 digits");
    }
    Program q;
    q.name = "timing_binary_search";
    q.system = "dg";
    q.alphabet = "01ab";
    q.initial = detail::append_search_block(q, "", L, q.accept);
    return q;
}

/// ceil(c * log2 n), with 0 for n <= 1.
inline std::size_t advice_length(std::size_t n, const Rational& c) {
    if (n <= 1) {
        return 0;
    }
    // smallest L with 2^(L q) >= n^p where c = p/q
    const unsigned long p = c.get_num().get_ui();
    const unsigned long qd = c.get_den().get_ui();
    Integer rhs;
    mpz_ui_pow_ui(rhs.get_mpz_t(), n, p);
    std::size_t len = 0;
    while (true) {
        Integer lhs;
        mpz_ui_pow_ui(lhs.get_mpz_t(), 2, len * qd);
        if (lhs >= rhs) {
            return len;
        }
        ++len;
    }
}

inline std::string decider_ref(const std::string& name) { return "decide:" + name; }

/// Procedure: read the advice run left of the head and the word right of
/// it, write '1' or '0' under the head.
inline std::function<void(TapeConfig&)> decider_procedure(Decider d) {
    return [d](TapeConfig& t) {
        std::string advice;
        for (long c = -1;; --c) {
            const Symbol s = t.at(c);
            if (s != '0' && s != '1') {
                break;
            }
            advice.insert(advice.begin(), s);
        }
        t.write(d(advice, t.word_right_of_head()) ? '1' : '0');
    };
}

/// Measures |w| = n, recovers ceil(c log2 n) advice digits by timing search
/// into the cells left of the word, then runs the decider on (advice, w).
inline Program advice_then_decide(const std::string& decider_name, const Rational& c, std::size_t max_n = 64) {
    if (c <= 0) {
        throw InvalidParameter("advice constant must be positive");
    }
    Program q;
    q.name = "advice_then_decide";
    q.system = "dg";
    q.alphabet = "01ab";
    q.initial = "n0";
    q.procedures["decide"] = TapeProcedure{decider_ref(decider_name), decider_procedure(decider(decider_name))};
    detail::RuleSink r{q};
    const Action left = Action::tape(TapeOp::left());
    const Action right = Action::tape(TapeOp::right());
    const Action idle = Action::tape(TapeOp::identity());
    std::map<std::size_t, std::string> blocks;  // L -> entry state
    for (std::size_t i = 0; i <= max_n; ++i) {
        const std::string s = "n" + std::to_string(i);
        if (i < max_n) {
            r.any(s, "01", "n" + std::to_string(i + 1), left);
        }
        if (i == 0) {
            r.tape(s, kBlank, "dec", right);
            continue;
        }
        const std::size_t len = advice_length(i, c);
        if (len > 24) {
            throw InvalidParameter("advice length above 24 digits");
        }
        r.tape(s, kBlank, "back" + std::to_string(len), right);
        blocks.emplace(len, "");
    }
    for (auto& [len, entry] : blocks) {
        const std::string ls = std::to_string(len);
        const std::string back = "back" + ls;
        r.any(back, "01", back, right);
        if (len == 0) {
            r.tape(back, kBlank, "dec", idle);
            continue;
        }
        entry = detail::append_search_block(q, "L" + ls + "_", len, "fin" + ls);
        const std::string out = "out" + ls + "_";
        if (len == 1) {
            r.tape(back, kBlank, entry, right);
        } else {
            r.tape(back, kBlank, out + "0", right);
            detail::chain(r, out + "0", out, len - 1, entry, right);
        }
        r.any("fin" + ls, "01", "dec", left);
    }
    r.any("dec", "01ab_", "res", Action::call("decide"));
    r.tape("res", '1', q.accept, idle);
    r.tape("res", '0', q.reject, idle);
    return q;
}

/// Builds 1w in the integer part with x+1 and 2x, then measures.
inline Program c1_decide() {
    Program q;
    q.name = "c1_decide";
    q.system = "c1";
    q.alphabet = "01";
    q.initial = "s0";
    detail::RuleSink r{q};
    const Action left = Action::tape(TapeOp::left());
    r.any("s0", "01_", "rd", Action::named("p"));
    r.tape("rd", '0', "mv", Action::named("t"));
    r.tape("rd", '1', "pl", Action::named("t"));
    r.tape("rd", kBlank, "meas", Action::tape(TapeOp::identity()));
    r.any("pl", "1", "mv", Action::named("p"));
    r.any("mv", "01", "rd", left);
    r.add("meas", "alpha_A", "in", q.accept, Action::tape(TapeOp::identity()));
    r.add("meas", "alpha_A", "out", q.reject, Action::tape(TapeOp::identity()));
    return q;
}

/// As c1_decide, but applies the opaque map and reads the sign.
inline Program c2_decide() {
    Program q;
    q.name = "c2_decide";
    q.system = "c2";
    q.alphabet = "01";
    q.initial = "s0";
    detail::RuleSink r{q};
    const Action left = Action::tape(TapeOp::left());
    r.any("s0", "01_", "rd", Action::named("p"));
    r.tape("rd", '0', "mv", Action::named("t"));
    r.tape("rd", '1', "pl", Action::named("t"));
    r.tape("rd", kBlank, "sg", Action::named("T"));
    r.any("pl", "1", "mv", Action::named("p"));
    r.any("mv", "01", "rd", left);
    r.add("sg", "sign", "nonneg", q.accept, Action::tape(TapeOp::identity()));
    r.add("sg", "sign", "neg", q.reject, Action::tape(TapeOp::identity()));
    return q;
}

/// Copies the input onto the second tape from its cell 1, returns that
/// head to cell 0, asks the oracle and reads the answer.
inline Program oracle_decide(const std::string& alphabet, Symbol a) {
    Program q;
    q.name = "oracle_decide";
    q.system = "oracle_tm";
    q.alphabet = alphabet;
    q.initial = "cp";
    std::string x_alpha = alphabet;
    if (x_alpha.find(a) == std::string::npos) {
        x_alpha.push_back(a);
    }
    detail::RuleSink r{q};
    const Action idle = Action::tape(TapeOp::identity());
    for (Symbol s : alphabet) {
        const std::string ws = std::string("ws_") + s;
        r.tape("cp", s, ws, Action::named("x_left"));
        r.tape(ws, s, "mv", Action::named(tape_op_name(TapeOp::write(s))));
    }
    r.any("mv", alphabet, "cp", Action::tape(TapeOp::left()));
    r.tape("cp", kBlank, "rw", idle);
    for (Symbol s : x_alpha) {
        r.add("rw", "x_read", symbol_label(s), "rw", Action::named("x_right"));
    }
    r.add("rw", "x_read", symbol_label(kBlank), "q", Action::named("oracle"));
    r.add("q", "x_read", symbol_label(a), q.accept, idle);
    r.add("q", "x_read", symbol_label(kBlank), q.reject, idle);
    return q;
}

/// Copies the input word onto the configuration tape and accepts.
inline Program tm_copy(const std::string& alphabet) {
    Program q;
    q.name = "tm_copy";
    q.system = "tm";
    q.alphabet = alphabet;
    q.initial = "cp";
    detail::RuleSink r{q};
    for (Symbol s : alphabet) {
        r.tape("cp", s, "mv", Action::named(tape_op_name(TapeOp::write(s))));
    }
    r.tape("cp", kBlank, q.accept, Action::tape(TapeOp::identity()));
    r.any("mv", alphabet, "mx", Action::tape(TapeOp::left()));
    r.any("mx", alphabet + kBlank, "cp", Action::named("x_left"));
    return q;
}

/// One application of h_z.
inline Program hz_step() {
    Program q;
    q.name = "hz_step";
    q.system = "hz";
    q.alphabet = "01";
    q.initial = "s0";
    detail::RuleSink r{q};
    r.any("s0", "01_", q.accept, Action::named("h"));
    return q;
}

// ---------------------------------------------------------------------------
// Catalog

/// A system, a program for it, and whatever the two refer to by name.
struct Item {
    std::string id;
    Model model;
    Externals externals;

    const SystemDecl& system() const { return model.systems.front(); }
    const Program& program() const { return model.programs.front(); }

    RunResult run(const std::string& input, RunOptions opt = {}) const {
        if (system().timed) {
            return timed_run(program(), system().as_timed(), input, opt);
        }
        return physcomp::run(program(), system().def, input, opt);
    }
};

inline AdviceDecl literal_advice(const std::string& name, const std::string& prefix, const std::string& cycle) {
    AdviceDecl a;
    a.name = name;
    a.kind = AdviceDecl::Kind::Literal;
    a.prefix = prefix;
    a.cycle = cycle;
    a.value = std::make_shared<PrefixAdvice>(PrefixAdvice::from_string(prefix, cycle, name));
    return a;
}

inline AdviceDecl extern_advice(const std::string& name, const std::string& ref, const PrefixAdvice& g) {
    AdviceDecl a;
    a.name = name;
    a.kind = AdviceDecl::Kind::Extern;
    a.ref = ref;
    a.value = std::make_shared<PrefixAdvice>(g);
    return a;
}

inline Item make_item(std::string id, std::vector<AdviceDecl> advice, SystemDecl sys, Program prog, Externals ext = {}) {
    Item it;
    it.id = std::move(id);
    for (const auto& a : advice) {
        if (a.kind == AdviceDecl::Kind::Extern) {
            ext.advice.emplace(a.ref, *a.value);
        }
    }
    it.model.advice = std::move(advice);
    it.model.systems.push_back(std::move(sys));
    it.model.programs.push_back(std::move(prog));
    it.externals = std::move(ext);
    return it;
}

inline Item tm_item(const std::string& alphabet = "01") {
    return make_item("tm", {}, SystemDecl{tm(alphabet), false, {}}, tm_copy(alphabet));
}

inline Item oracle_tm_item(const std::string& pred_name, Symbol a = '1', const std::string& alphabet = "01") {
    Externals ext;
    ext.maps.emplace(oracle_ref(pred_name, a), oracle_fn(predicate(pred_name), a));
    return make_item("oracle-tm", {}, SystemDecl{oracle_tm(alphabet, pred_name, predicate(pred_name), a), false, {}},
                     oracle_decide(alphabet, a), ext);
}

inline Item cphi_item(const Rational& phi, std::size_t digits) {
    return make_item("cphi", {}, SystemDecl{cphi(RealValue(phi)), false, {}}, extract_binary_digits(digits));
}

inline Item cg_item(const AdviceDecl& g, std::size_t symbols) {
    return make_item("cg", {g}, cg(g.name, *g.value), extract_ternary_advice(symbols));
}

inline Item dg_item(const AdviceDecl& g, std::size_t bits) {
    return make_item("dg", {g}, dg(g.name, *g.value), timing_binary_search(bits));
}

inline Item advice_decide_item(const AdviceDecl& g, const std::string& decider_name, const Rational& c,
                               std::size_t max_n = 64) {
    Externals ext;
    ext.procedures.emplace(decider_ref(decider_name), decider_procedure(decider(decider_name)));
    return make_item("advice-decide", {g}, dg(g.name, *g.value), advice_then_decide(decider_name, c, max_n), ext);
}

inline Item c1_item(const std::string& pred_name) {
    Externals ext;
    ext.predicates.emplace(floor_predicate_ref(pred_name), detail::floor_word_in(predicate(pred_name)));
    return make_item("c1", {}, SystemDecl{c1(pred_name, predicate(pred_name)), false, {}}, c1_decide(), ext);
}

inline Item c2_item(const std::string& pred_name) {
    Externals ext;
    const SystemDef sys = c2(pred_name, predicate(pred_name));
    ext.maps.emplace(sign_map_ref(pred_name), std::get<OpaqueMap>(sys.transformation("T")->kind).fn);
    return make_item("c2", {}, SystemDecl{sys, false, {}}, c2_decide(), ext);
}

inline Item hz_item(const Rational& z, const Rational& x, const Rational& y) {
    return make_item("hz", {}, SystemDecl{hz_demo(z, Point{RealValue(x), RealValue(y)}), false, {}}, hz_step());
}

/// Every callable the catalog items refer to by name, for parsing their
/// rendered text.
inline Externals standard_externals() {
    Externals ext;
    for (const auto& [name, pred] : predicates()) {
        ext.predicates.emplace(floor_predicate_ref(name), detail::floor_word_in(pred));
        ext.maps.emplace(sign_map_ref(name), std::get<OpaqueMap>(c2(name, pred).transformation("T")->kind).fn);
        for (char a : std::string("0123456789abcdefghijklmnopqrstuvwxyz")) {
            ext.maps.emplace(oracle_ref(name, a), oracle_fn(pred, a));
        }
    }
    for (const auto& [name, d] : deciders()) {
        ext.procedures.emplace(decider_ref(name), decider_procedure(d));
    }
    return ext;
}

struct CatalogEntry {
    std::string id;
    std::string params;
    std::string summary;
};

inline std::vector<CatalogEntry> catalog() {
    return {
        {"tm", "alphabet=01", "tape configuration space; copies the input onto it"},
        {"oracle-tm", "predicate=even-ones a=1", "second tape with a membership oracle"},
        {"cphi", "phi=5/8 digits=3", "doubling map; extracts binary digits of phi"},
        {"cg", "advice=10 repeat=01 symbols=2", "ternary shift, timed; recovers advice symbols"},
        {"dg", "advice=1011 repeat=0 bits=4", "timing binary search for the digits of phi"},
        {"advice-decide", "advice=1011 repeat=0 decider=xor-parity c=1 max_n=64",
         "recovers log-length advice by timing, then decides"},
        {"c1", "predicate=palindrome", "non-measurable partition by integer part"},
        {"c2", "predicate=palindrome", "opaque map onto the sign partition"},
        {"hz", "z=0 x=2 y=1", "one application of h_z"},
    };
}

/// Builds a catalog item from key=value parameters (defaults as listed by
/// catalog()).
inline Item build(const std::string& id, const std::map<std::string, std::string>& params) {
    auto get = [&](const std::string& k, const std::string& def) {
        const auto it = params.find(k);
        return it == params.end() ? def : it->second;
    };
    auto rational = [&](const std::string& k, const std::string& def) {
        Rational r;
        if (r.set_str(get(k, def), 10) != 0) {
            throw InvalidParameter(k + " is not a rational");
        }
        if (r.get_den() == 0) {
            throw InvalidParameter(k + ": zero denominator");
        }
        r.canonicalize();
        return r;
    };
    auto natural = [&](const std::string& k, const std::string& def) -> std::size_t {
        const std::string s = get(k, def);
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 9) {
            throw InvalidParameter(k + " is not a natural number");
        }
        return std::stoul(s);
    };
    auto advice = [&](const std::string& def_prefix, const std::string& def_cycle) {
        return literal_advice("g", get("advice", def_prefix), get("repeat", def_cycle));
    };
    if (id == "tm") {
        return tm_item(get("alphabet", "01"));
    }
    if (id == "oracle-tm") {
        const std::string a = get("a", "1");
        if (a.size() != 1 || a[0] == kBlank) {
            throw InvalidParameter("a must be a single non-blank symbol");
        }
        return oracle_tm_item(get("predicate", "even-ones"), a[0]);
    }
    if (id == "cphi") {
        const Rational phi = rational("phi", "5/8");
        if (phi < 0 || phi >= 1) {
            throw InvalidParameter("phi must lie in [0, 1)");
        }
        const std::size_t n = natural("digits", "3");
        if (n > 1000000) {
            throw InvalidParameter("digits above 10^6");
        }
        return cphi_item(phi, n);
    }
    if (id == "cg") {
        return cg_item(advice("10", "01"), natural("symbols", "2"));
    }
    if (id == "dg") {
        return dg_item(advice("1011", "0"), natural("bits", "4"));
    }
    if (id == "advice-decide") {
        return advice_decide_item(advice("1011", "0"), get("decider", "xor-parity"), rational("c", "1"),
                                  natural("max_n", "64"));
    }
    if (id == "c1") {
        return c1_item(get("predicate", "palindrome"));
    }
    if (id == "c2") {
        return c2_item(get("predicate", "palindrome"));
    }
    if (id == "hz") {
        return hz_item(rational("z", "0"), rational("x", "2"), rational("y", "1"));
    }
    throw InvalidParameter("unknown gallery item " + id);
}

}  // namespace physcomp::gallery

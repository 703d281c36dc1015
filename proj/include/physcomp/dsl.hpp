#pragma once

// Text format for advice, systems and programs.
//
//   advice g = "1011" repeat "0"
//   system cphi {
//     space interval(0, 1, closed, open)
//     partition alpha domain interval(0, 1, closed, open) {
//       lo = interval(0, 1/2, closed, open)
//       hi = interval(1/2, 1, closed, open)
//     }
//     map T = piecewise { case interval(0, 1/2, closed, open) -> [2*x1] ... }
//     start (5/8)
//   }
//   program digits on cphi {
//     alphabet "01"
//     initial d0
//     rule (d0, alpha, lo, accept, write '0')
//   }
//
// Comments run from '#' to the end of the line.

#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "physcomp/model.hpp"

namespace physcomp::dsl {

struct Diagnostic {
    std::size_t line = 0;
    std::size_t col = 0;
    std::string message;
};

inline std::string to_string(const Diagnostic& d) {
    return std::to_string(d.line) + ":" + std::to_string(d.col) + ": " + d.message;
}

struct ParseResult {
    Model model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty(); }
};

namespace detail {

enum class Tok { Ident, Number, String, Char, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 0;
    std::size_t col = 0;
};

inline const std::set<std::string>& hyphen_words() {
    static const std::set<std::string> words{"timed-system", "tape-read", "inverse-poly", "inverse-distance"};
    return words;
}

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t col = 1;
    auto bump = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump();
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') {
                bump();
            }
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) {
                ++j;
            }
            std::string word = src.substr(i, j - i);
            // join hyphenated keywords
            while (j < src.size() && src[j] == '-' && j + 1 < src.size() && ident_start(src[j + 1])) {
                std::size_t k = j + 1;
                while (k < src.size() && ident_char(src[k])) {
                    ++k;
                }
                const std::string joined = word + "-" + src.substr(j + 1, k - j - 1);
                if (hyphen_words().count(joined) == 0) {
                    break;
                }
                word = joined;
                j = k;
            }
            t.kind = Tok::Ident;
            t.text = word;
            bump(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            t.kind = Tok::Number;
            t.text = src.substr(i, j - i);
            bump(j - i);
        } else if (c == '"' || c == '\'') {
            bump();
            std::string body;
            bool closed = false;
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == c) {
                    closed = true;
                    bump();
                    break;
                }
                if (src[i] == '\\' && i + 1 < src.size()) {
                    bump();
                }
                body.push_back(src[i]);
                bump();
            }
            if (!closed) {
                diags.push_back({t.line, t.col, c == '"' ? "unterminated string" : "unterminated character"});
                continue;
            }
            if (c == '\'' && body.size() != 1) {
                diags.push_back({t.line, t.col, "character literal must hold one symbol"});
                continue;
            }
            t.kind = c == '"' ? Tok::String : Tok::Char;
            t.text = body;
        } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = Tok::Punct;
            t.text = "->";
            bump(2);
        } else if (std::string("()[]{},=/*^+-").find(c) != std::string::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            bump();
        } else {
            diags.push_back({line, col, std::string("unexpected character '") + c + "'"});
            bump();
            continue;
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

struct Failure {
    std::size_t line;
    std::size_t col;
    std::string message;
};

/// A named external real, rendered back as extern("name").
class ExternReal final : public LazyReal {
public:
    ExternReal(LazyPtr inner, std::string name) : inner_(std::move(inner)), name_(std::move(name)) {}

    bool algebraic() const override { return inner_->algebraic(); }
    std::optional<Rational> exact() const override { return inner_->exact(); }
    std::string origin() const override { return "extern(\"" + name_ + "\")"; }

protected:
    Interval compute(std::size_t depth) const override { return inner_->enclose(depth); }

private:
    LazyPtr inner_;
    std::string name_;
};

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out + "\"";
}

inline std::string quote_char(char c) {
    std::string out = "'";
    if (c == '\'' || c == '\\') {
        out.push_back('\\');
    }
    out.push_back(c);
    return out + "'";
}

inline std::string stream_origin(unsigned base, const std::string& prefix, const std::optional<std::string>& cycle) {
    std::string out = "stream(" + std::to_string(base) + ", " + quote(prefix);
    if (cycle) {
        out += ", repeat " + quote(*cycle);
    }
    return out + ")";
}

inline std::string stream_file_origin(unsigned base, const std::string& path) {
    return "stream(" + std::to_string(base) + ", file " + quote(path) + ")";
}

inline std::vector<unsigned> digit_values(const std::string& s, unsigned base) {
    std::vector<unsigned> out;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)) || static_cast<unsigned>(c - '0') >= base) {
            throw InvalidParameter(std::string("digit '") + c + "' outside base " + std::to_string(base));
        }
        out.push_back(static_cast<unsigned>(c - '0'));
    }
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const Externals& ext, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), ext_(ext), diags_(diags) {}

    Model parse() {
        while (peek().kind != Tok::End) {
            const std::size_t start = pos_;
            try {
                const Token& t = peek();
                if (is_word(t, "advice")) {
                    parse_advice();
                } else if (is_word(t, "system")) {
                    parse_system(false);
                } else if (is_word(t, "timed-system")) {
                    parse_system(true);
                } else if (is_word(t, "program")) {
                    parse_program();
                } else {
                    fail(t, "expected advice, system, timed-system or program");
                }
            } catch (const Failure& f) {
                diags_.push_back({f.line, f.col, f.message});
                recover(start);
            } catch (const Error& e) {
                diags_.push_back({last_.line, last_.col, e.what()});
                recover(start);
            }
        }
        return std::move(model_);
    }

private:
    std::vector<Token> toks_;
    const Externals& ext_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    Token last_;
    Model model_;

    // -- token helpers ------------------------------------------------------

    static bool is_word(const Token& t, const char* w) { return t.kind == Tok::Ident && t.text == w; }
    static bool is_punct(const Token& t, const char* p) { return t.kind == Tok::Punct && t.text == p; }
    static bool top_level(const Token& t) {
        return is_word(t, "advice") || is_word(t, "system") || is_word(t, "timed-system") || is_word(t, "program");
    }

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    const Token& next() {
        last_ = peek();
        if (pos_ < toks_.size() - 1) {
            ++pos_;
        }
        return last_;
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw Failure{t.line, t.col, msg + (t.kind == Tok::End ? " (at end of input)" : ", found '" + t.text + "'")};
    }

    [[noreturn]] void fail_here(const std::string& msg) const { throw Failure{last_.line, last_.col, msg}; }

    bool accept_punct(const char* p) {
        if (is_punct(peek(), p)) {
            next();
            return true;
        }
        return false;
    }

    void expect_punct(const char* p) {
        if (!accept_punct(p)) {
            fail(peek(), std::string("expected '") + p + "'");
        }
    }

    bool accept_word(const char* w) {
        if (is_word(peek(), w)) {
            next();
            return true;
        }
        return false;
    }

    void expect_word(const char* w) {
        if (!accept_word(w)) {
            fail(peek(), std::string("expected ") + w);
        }
    }

    std::string ident() {
        if (peek().kind != Tok::Ident) {
            fail(peek(), "expected a name");
        }
        return next().text;
    }

    std::string string_lit() {
        if (peek().kind != Tok::String) {
            fail(peek(), "expected a string");
        }
        return next().text;
    }

    char char_lit() {
        if (accept_word("BLANK")) {
            return kBlank;
        }
        if (peek().kind != Tok::Char) {
            fail(peek(), "expected a symbol literal");
        }
        return next().text[0];
    }

    Integer natural() {
        if (peek().kind != Tok::Number) {
            fail(peek(), "expected a natural number");
        }
        return Integer(next().text);
    }

    std::size_t small_natural() {
        const Integer n = natural();
        if (n > 1000000) {
            fail_here("number too large");
        }
        return n.get_ui();
    }

    bool open_or_closed() {
        if (accept_word("closed")) {
            return true;
        }
        if (accept_word("open")) {
            return false;
        }
        fail(peek(), "expected open or closed");
    }

    void recover(std::size_t start) {
        pos_ = start;
        next();
        long depth = 0;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (depth == 0 && top_level(t)) {
                return;
            }
            if (is_punct(t, "{")) {
                ++depth;
            } else if (is_punct(t, "}")) {
                depth = std::max(0L, depth - 1);
            }
            next();
        }
    }

    // -- numbers ------------------------------------------------------------

    Rational rational_literal(bool negative) {
        Integer num = natural();
        Integer den = 1;
        if (accept_punct("/")) {
            den = natural();
        }
        if (den == 0) {
            fail_here("zero denominator");
        }
        Rational r = make_rational(num, den);
        return negative ? Rational(-r) : r;
    }

    RealValue number() {
        if (accept_punct("-")) {
            return RealValue(rational_literal(true));
        }
        if (peek().kind == Tok::Number) {
            return RealValue(rational_literal(false));
        }
        if (accept_word("stream")) {
            expect_punct("(");
            const std::size_t base = small_natural();
            if (base < 2 || base > 10) {
                fail_here("stream base must be between 2 and 10");
            }
            expect_punct(",");
            if (accept_word("file")) {
                const std::string path = string_lit();
                expect_punct(")");
                const PrefixAdvice src = PrefixAdvice::from_file(path);
                const auto b = static_cast<unsigned>(base);
                auto digit = [src, b](std::size_t k) -> unsigned { return digit_values(std::string(1, src.symbol(k)), b)[0]; };
                return RealValue(LazyPtr(std::make_shared<StreamReal>(b, digit, stream_file_origin(b, path))));
            }
            const std::string prefix = string_lit();
            std::optional<std::string> cycle;
            if (accept_punct(",")) {
                expect_word("repeat");
                cycle = string_lit();
            }
            expect_punct(")");
            const auto b = static_cast<unsigned>(base);
            return RealValue(LazyPtr(StreamReal::pattern(b, digit_values(prefix, b),
                                                         cycle ? digit_values(*cycle, b) : std::vector<unsigned>{},
                                                         stream_origin(b, prefix, cycle))));
        }
        if (accept_word("advice")) {
            expect_punct("(");
            const std::string name = ident();
            expect_punct(",");
            Encoding scheme = Encoding::Binary;
            if (accept_word("ternary")) {
                scheme = Encoding::TernaryInterleaved;
            } else if (!accept_word("binary")) {
                fail(peek(), "expected binary or ternary");
            }
            expect_punct(")");
            const AdviceDecl* a = model_.find_advice(name);
            if (a == nullptr) {
                fail_here("unknown advice " + name);
            }
            return advice_real(name, *a->value, scheme);
        }
        if (accept_word("extern")) {
            expect_punct("(");
            const std::string name = string_lit();
            expect_punct(")");
            const auto it = ext_.reals.find(name);
            if (it == ext_.reals.end()) {
                fail_here("unresolved extern real " + name);
            }
            return RealValue(LazyPtr(std::make_shared<ExternReal>(it->second, name)));
        }
        fail(peek(), "expected a number");
    }

    Point point() {
        expect_punct("(");
        Point p{number()};
        while (accept_punct(",")) {
            p.push_back(number());
        }
        expect_punct(")");
        return p;
    }

    // -- polynomials --------------------------------------------------------

    Rational exponent() {
        if (accept_punct("(")) {
            const bool neg = accept_punct("-");
            const Rational r = rational_literal(neg);
            expect_punct(")");
            return r;
        }
        const bool neg = accept_punct("-");
        const Integer n = natural();
        return neg ? Rational(-n) : Rational(n);
    }

    bool variable_ahead() const {
        const Token& t = peek();
        return t.kind == Tok::Ident && t.text.size() > 1 && t.text[0] == 'x' &&
               t.text.find_first_not_of("0123456789", 1) == std::string::npos;
    }

    void variable(std::vector<Rational>& exps) {
        const std::string v = ident();
        const std::size_t k = std::stoul(v.substr(1));
        if (k < 1 || k > exps.size()) {
            fail_here("variable " + v + " outside dimension " + std::to_string(exps.size()));
        }
        Rational e = 1;
        if (accept_punct("^")) {
            e = exponent();
        }
        exps[k - 1] += e;
    }

    Term term(std::size_t arity, bool negative) {
        Term t{RealValue(negative ? -1 : 1), std::vector<Rational>(arity, Rational(0))};
        bool need_var = true;
        if (peek().kind == Tok::Number) {
            const Rational c = rational_literal(negative);
            t.coef = RealValue(c);
            need_var = false;
        } else if (accept_punct("(")) {
            if (negative) {
                fail_here("negated stream coefficients are not supported");
            }
            t.coef = number();
            expect_punct(")");
            need_var = false;
        }
        if (need_var) {
            if (!variable_ahead()) {
                fail(peek(), "expected a term");
            }
            variable(t.exps);
        } else if (accept_punct("*")) {
            variable(t.exps);
        } else {
            return t;
        }
        while (accept_punct("*")) {
            variable(t.exps);
        }
        return t;
    }

    MultiPoly poly(std::size_t arity) {
        MultiPoly p{arity, {}};
        p.terms.push_back(term(arity, accept_punct("-")));
        while (true) {
            if (accept_punct("+")) {
                p.terms.push_back(term(arity, false));
            } else if (accept_punct("-")) {
                p.terms.push_back(term(arity, true));
            } else {
                break;
            }
        }
        return p;
    }

    ClassicalMap map_literal(std::size_t arity) {
        expect_punct("[");
        std::vector<MultiPoly> comps{poly(arity)};
        while (accept_punct(",")) {
            comps.push_back(poly(arity));
        }
        expect_punct("]");
        return ClassicalMap(arity, std::move(comps));
    }

    // -- sets ---------------------------------------------------------------

    std::pair<Bound, Bound> interval_bounds() {
        std::optional<RealValue> lo;
        std::optional<RealValue> hi;
        if (is_punct(peek(), "-") && is_word(peek(1), "inf")) {
            next();
            next();
        } else {
            lo = number();
        }
        expect_punct(",");
        if (!accept_word("inf")) {
            hi = number();
        }
        expect_punct(",");
        const bool lc = open_or_closed();
        expect_punct(",");
        const bool hc = open_or_closed();
        return {Bound{lo, lo && lc}, Bound{hi, hi && hc}};
    }

    SetExpr set() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) {
            fail(t, "expected a set");
        }
        const std::string head = next().text;
        expect_punct("(");
        SetExpr out;
        if (head == "ball") {
            Point c = point();
            expect_punct(",");
            RealValue r = number();
            expect_punct(",");
            out = sets::ball(std::move(c), std::move(r), open_or_closed());
        } else if (head == "interval") {
            auto [lo, hi] = interval_bounds();
            out = sets::box({lo}, {hi});
        } else if (head == "box") {
            std::vector<Bound> lo;
            std::vector<Bound> hi;
            do {
                expect_word("interval");
                expect_punct("(");
                auto [l, h] = interval_bounds();
                expect_punct(")");
                lo.push_back(l);
                hi.push_back(h);
            } while (accept_punct(","));
            out = sets::box(std::move(lo), std::move(hi));
        } else if (head == "product" || head == "union" || head == "inter") {
            SetExpr a = set();
            expect_punct(",");
            SetExpr b = set();
            out = head == "product" ? sets::product(a, b)
                  : head == "union" ? sets::set_union(a, b)
                                    : sets::intersection(a, b);
        } else if (head == "compl") {
            out = sets::complement(set());
        } else if (head == "preimage") {
            // arity from the target, which comes last
            const std::size_t mark = pos_;
            skip_balanced_brackets();
            expect_word("inverse");
            skip_balanced_brackets();
            expect_punct(",");
            SetExpr target = set();
            const std::size_t after = pos_;
            pos_ = mark;
            ClassicalMap f = map_literal(target->dim());
            expect_word("inverse");
            ClassicalMap g = map_literal(target->dim());
            pos_ = after;
            out = sets::preimage(std::move(f), std::move(g), std::move(target));
        } else if (head == "extern") {
            const std::string name = string_lit();
            expect_punct(",");
            const std::size_t dim = small_natural();
            const auto it = ext_.predicates.find(name);
            if (it == ext_.predicates.end()) {
                fail_here("unresolved extern predicate " + name);
            }
            out = sets::predicate(name, dim, it->second);
        } else if (head == "everything") {
            const std::size_t m = small_natural();
            if (m == 0) {
                fail_here("dimension must be positive");
            }
            out = sets::everything(m);
        } else {
            fail_here("unknown set form " + head);
        }
        expect_punct(")");
        return out;
    }

    void skip_balanced_brackets() {
        if (!is_punct(peek(), "[")) {
            fail(peek(), "expected '['");
        }
        long depth = 0;
        do {
            if (is_punct(peek(), "[")) {
                ++depth;
            } else if (is_punct(peek(), "]")) {
                --depth;
            } else if (peek().kind == Tok::End) {
                fail(peek(), "unbalanced '['");
            }
            next();
        } while (depth > 0);
    }

    // -- blocks -------------------------------------------------------------

    void parse_advice() {
        expect_word("advice");
        AdviceDecl a;
        a.name = ident();
        if (model_.find_advice(a.name) != nullptr) {
            fail_here("duplicate advice " + a.name);
        }
        expect_punct("=");
        if (peek().kind == Tok::String) {
            a.kind = AdviceDecl::Kind::Literal;
            a.prefix = string_lit();
            if (accept_word("repeat")) {
                a.cycle = string_lit();
                if (a.cycle.empty()) {
                    fail_here("empty repeat block");
                }
            }
            a.value = std::make_shared<PrefixAdvice>(PrefixAdvice::from_string(a.prefix, a.cycle, a.name));
        } else if (accept_word("file")) {
            a.kind = AdviceDecl::Kind::File;
            expect_punct("(");
            a.ref = string_lit();
            expect_punct(")");
            a.value = std::make_shared<PrefixAdvice>(PrefixAdvice::from_file(a.ref, a.name));
        } else if (accept_word("extern")) {
            a.kind = AdviceDecl::Kind::Extern;
            expect_punct("(");
            a.ref = string_lit();
            expect_punct(")");
            const auto it = ext_.advice.find(a.ref);
            if (it == ext_.advice.end()) {
                fail_here("unresolved extern advice " + a.ref);
            }
            a.value = std::make_shared<PrefixAdvice>(it->second);
        } else {
            fail(peek(), "expected a string, file(...) or extern(...)");
        }
        model_.advice.push_back(std::move(a));
    }

    TapeOp tape_op() {
        if (accept_word("id")) {
            return TapeOp::identity();
        }
        if (accept_word("left")) {
            return TapeOp::left();
        }
        if (accept_word("right")) {
            return TapeOp::right();
        }
        if (accept_word("write")) {
            return TapeOp::write(char_lit());
        }
        fail(peek(), "expected id, left, right or write");
    }

    void parse_system(bool timed) {
        next();
        SystemDecl d;
        d.timed = timed;
        SystemDef& c = d.def;
        c.name = ident();
        if (model_.find_system(c.name) != nullptr) {
            fail_here("duplicate system " + c.name);
        }
        expect_punct("{");
        std::optional<std::size_t> dim;  // none for tape spaces
        bool have_space = false;
        bool have_start = false;
        while (!accept_punct("}")) {
            const Token& t = peek();
            if (accept_word("space")) {
                if (have_space) {
                    fail_here("space given twice");
                }
                have_space = true;
                if (accept_word("tape")) {
                    c.space = TapeSpace{string_lit()};
                    c.initial = TapeConfig{};
                } else {
                    const SetExpr s = set();
                    dim = s->dim();
                    c.space = s;
                }
            } else if (accept_word("partition")) {
                SystemPartition p;
                p.name = ident();
                if (accept_word("tape-read")) {
                    p.kind = TapeReadPartition{string_lit()};
                } else {
                    Partition alpha;
                    if (accept_word("domain")) {
                        alpha.domain = set();
                    }
                    expect_punct("{");
                    while (!accept_punct("}")) {
                        std::string label = element_label();
                        expect_punct("=");
                        alpha.elements.emplace_back(std::move(label), set());
                    }
                    if (alpha.elements.empty()) {
                        fail_here("partition " + p.name + " has no elements");
                    }
                    p.kind = std::move(alpha);
                }
                c.partitions.push_back(std::move(p));
            } else if (accept_word("map")) {
                SystemTransformation tr;
                tr.name = ident();
                expect_punct("=");
                if (accept_word("tape")) {
                    tr.kind = tape_op();
                } else if (accept_word("extern")) {
                    expect_punct("(");
                    const std::string ref = string_lit();
                    expect_punct(")");
                    const auto it = ext_.maps.find(ref);
                    if (it == ext_.maps.end()) {
                        fail_here("unresolved extern map " + ref);
                    }
                    tr.kind = OpaqueMap{ref, it->second};
                } else {
                    if (!dim) {
                        fail(t, "map formulas need a set as space, given before the map");
                    }
                    if (accept_word("piecewise")) {
                        PiecewiseMap pw;
                        pw.name = tr.name;
                        if (accept_word("domain")) {
                            pw.domain = set();
                        }
                        expect_punct("{");
                        while (!accept_punct("}")) {
                            expect_word("case");
                            SetExpr region = set();
                            expect_punct("->");
                            pw.cases.emplace_back(std::move(region), map_literal(*dim));
                        }
                        if (pw.cases.empty()) {
                            fail_here("piecewise map without cases");
                        }
                        tr.kind = std::move(pw);
                    } else {
                        ClassicalMap m = map_literal(*dim);
                        m.name = tr.name;
                        tr.kind = std::move(m);
                    }
                }
                c.transformations.push_back(std::move(tr));
            } else if (accept_word("kappa")) {
                if (!timed) {
                    fail_here("kappa in an untimed system");
                }
                const std::string part = ident();
                expect_punct("=");
                d.kappas.emplace_back(part, kappa());
            } else if (accept_word("start")) {
                if (have_start) {
                    fail_here("start given twice");
                }
                have_start = true;
                if (accept_word("blank")) {
                    c.initial = TapeConfig{};
                } else {
                    c.initial = point();
                }
            } else {
                fail(t, "expected space, partition, map, kappa, start or '}'");
            }
        }
        if (!have_space) {
            fail_here("system " + c.name + " has no space");
        }
        if (dim && !have_start) {
            fail_here("system " + c.name + " has no start point");
        }
        if (const auto* x = std::get_if<Point>(&c.initial); x && dim && x->size() != *dim) {
            fail_here("start point dimension differs from the space");
        }
        for (const auto& [part, k] : d.kappas) {
            if (c.partition(part) == nullptr) {
                fail_here("kappa for unknown partition " + part);
            }
        }
        model_.systems.push_back(std::move(d));
    }

    KappaSpec kappa() {
        if (accept_word("inverse-poly")) {
            expect_punct("(");
            std::vector<Integer> cs{natural()};
            while (accept_punct(",")) {
                cs.push_back(natural());
            }
            expect_punct(")");
            return KappaSpec::inverse_polynomial(std::move(cs));
        }
        if (accept_word("inverse-distance")) {
            expect_punct("(");
            DistanceFormula f;
            f.points.push_back(number());
            while (accept_punct(",")) {
                f.points.push_back(number());
            }
            expect_punct(")");
            return KappaSpec{f};
        }
        if (accept_word("constant")) {
            expect_punct("(");
            const Integer k = natural();
            expect_punct(")");
            return KappaSpec::constant(k);
        }
        if (accept_word("extern")) {
            expect_punct("(");
            const std::string ref = string_lit();
            expect_punct(")");
            const auto it = ext_.kappas.find(ref);
            if (it == ext_.kappas.end()) {
                fail_here("unresolved extern kappa " + ref);
            }
            return KappaSpec{ExplicitKappa{ref, it->second}};
        }
        fail(peek(), "expected inverse-poly, inverse-distance, constant or extern");
    }

    std::string element_label() {
        if (peek().kind == Tok::Char) {
            return next().text;
        }
        if (accept_word("BLANK")) {
            return symbol_label(kBlank);
        }
        const std::string l = ident();
        if (l == "EMPTY") {
            fail_here("EMPTY is reserved");
        }
        return l;
    }

    Action action() {
        const Token& t = peek();
        if (is_word(t, "id") || is_word(t, "left") || is_word(t, "right") || is_word(t, "write")) {
            return Action::tape(tape_op());
        }
        if (accept_word("call")) {
            return Action::call(ident());
        }
        if (accept_word("apply")) {
            return Action::named(ident());
        }
        return Action::named(ident());
    }

    void parse_program() {
        expect_word("program");
        Program q;
        q.name = ident();
        if (model_.find_program(q.name) != nullptr) {
            fail_here("duplicate program " + q.name);
        }
        if (accept_word("on")) {
            q.system = ident();
            if (model_.find_system(q.system) == nullptr) {
                fail_here("unknown system " + q.system);
            }
        }
        expect_punct("{");
        while (!accept_punct("}")) {
            const Token& t = peek();
            if (accept_word("alphabet")) {
                q.alphabet = string_lit();
                if (q.alphabet.find(kBlank) != std::string::npos) {
                    fail_here("the blank may not be an input symbol");
                }
            } else if (accept_word("initial")) {
                q.initial = ident();
            } else if (accept_word("accept")) {
                q.accept = ident();
            } else if (accept_word("reject")) {
                q.reject = ident();
            } else if (accept_word("procedure")) {
                const std::string name = ident();
                expect_punct("=");
                expect_word("extern");
                expect_punct("(");
                const std::string ref = string_lit();
                expect_punct(")");
                const auto it = ext_.procedures.find(ref);
                if (it == ext_.procedures.end()) {
                    fail_here("unresolved extern procedure " + ref);
                }
                q.procedures[name] = TapeProcedure{ref, it->second};
            } else if (accept_word("rule")) {
                Rule r;
                expect_punct("(");
                r.from = ident();
                expect_punct(",");
                r.partition = ident();
                expect_punct(",");
                if (!accept_word("EMPTY")) {
                    r.element = element_label();
                }
                expect_punct(",");
                r.to = ident();
                expect_punct(",");
                r.action = action();
                expect_punct(")");
                q.rules.push_back(std::move(r));
            } else {
                fail(t, "expected alphabet, initial, accept, reject, procedure, rule or '}'");
            }
        }
        model_.programs.push_back(std::move(q));
    }
};

// -- rendering --------------------------------------------------------------

inline std::string render_rational(const Rational& r) { return physcomp::to_string(r); }

inline std::string render_real(const RealValue& v) {
    if (v.is_rational()) {
        return render_rational(v.rational());
    }
    const std::string o = v.lazy()->origin();
    if (o.empty()) {
        throw InvalidParameter("computed value has no source form");
    }
    return o;
}

inline std::string render_point(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out += (i > 0 ? ", " : "") + render_real(p[i]);
    }
    return out + ")";
}

inline std::string render_poly(const MultiPoly& p) {
    std::string out;
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const Term& t = p.terms[i];
        std::string vars;
        for (std::size_t j = 0; j < t.exps.size(); ++j) {
            const Rational& e = t.exps[j];
            if (e == 0) {
                continue;
            }
            vars += (vars.empty() ? "" : "*") + std::string("x") + std::to_string(j + 1);
            if (e == 1) {
                continue;
            }
            if (e.get_den() == 1) {
                vars += "^" + e.get_num().get_str();
            } else {
                vars += "^(" + physcomp::to_string(e) + ")";
            }
        }
        if (t.coef.is_rational()) {
            const Rational& c = t.coef.rational();
            const Rational a = abs_of(c);
            if (c < 0) {
                out += i > 0 ? " - " : "-";
            } else if (i > 0) {
                out += " + ";
            }
            if (vars.empty()) {
                out += render_rational(a);
            } else if (a == 1) {
                out += vars;
            } else {
                out += render_rational(a) + "*" + vars;
            }
        } else {
            out += (i > 0 ? " + (" : "(") + render_real(t.coef) + ")";
            if (!vars.empty()) {
                out += "*" + vars;
            }
        }
    }
    return out.empty() ? "0" : out;
}

inline std::string render_map(const ClassicalMap& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.components.size(); ++i) {
        out += (i > 0 ? ", " : "") + render_poly(m.components[i]);
    }
    return out + "]";
}

inline std::string render_bounds(const Bound& lo, const Bound& hi) {
    return (lo.value ? render_real(*lo.value) : std::string("-inf")) + ", " +
           (hi.value ? render_real(*hi.value) : std::string("inf")) + ", " +
           (lo.value && lo.closed ? "closed" : "open") + ", " + (hi.value && hi.closed ? "closed" : "open");
}

inline std::string render_set(const SetExpr& e) {
    struct V {
        std::string operator()(const Ball& b) const {
            return "ball(" + render_point(b.center) + ", " + render_real(b.radius) + ", " +
                   (b.closed ? "closed" : "open") + ")";
        }
        std::string operator()(const Box& b) const {
            if (b.lo.size() == 1) {
                return "interval(" + render_bounds(b.lo[0], b.hi[0]) + ")";
            }
            std::string out = "box(";
            for (std::size_t i = 0; i < b.lo.size(); ++i) {
                out += (i > 0 ? ", " : "") + std::string("interval(") + render_bounds(b.lo[i], b.hi[i]) + ")";
            }
            return out + ")";
        }
        std::string operator()(const ProductSet& s) const {
            return "product(" + render_set(s.first) + ", " + render_set(s.second) + ")";
        }
        std::string operator()(const UnionSet& s) const {
            return "union(" + render_set(s.a) + ", " + render_set(s.b) + ")";
        }
        std::string operator()(const IntersectionSet& s) const {
            return "inter(" + render_set(s.a) + ", " + render_set(s.b) + ")";
        }
        std::string operator()(const ComplementSet& s) const { return "compl(" + render_set(s.a) + ")"; }
        std::string operator()(const PreimageSet& s) const {
            return "preimage(" + render_map(s.map) + " inverse " + render_map(s.inverse) + ", " +
                   render_set(s.target) + ")";
        }
        std::string operator()(const PredicateSet& s) const {
            return "extern(" + quote(s.name) + ", " + std::to_string(s.dim) + ")";
        }
    };
    return std::visit(V{}, e->node);
}

inline bool plain_ident(const std::string& s) {
    if (s.empty() || !ident_start(s[0])) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), ident_char);
}

inline std::string render_label(const std::string& l) {
    if (plain_ident(l) && l != "EMPTY" && l != "BLANK" && l != "_") {
        return l;
    }
    if (l.size() == 1) {
        return quote_char(l[0]);
    }
    throw InvalidParameter("label '" + l + "' has no source form");
}

inline std::string render_name(const std::string& n) {
    if (!plain_ident(n)) {
        throw InvalidParameter("name '" + n + "' is not an identifier");
    }
    return n;
}

inline std::string render_tape_op(const TapeOp& op) {
    if (op.kind == TapeOp::Kind::Write) {
        return "write " + quote_char(op.symbol);
    }
    return physcomp::to_string(op);
}

inline std::string render_action(const Action& a) {
    switch (a.kind) {
        case Action::Kind::Tape: return render_tape_op(a.op);
        case Action::Kind::Call: return "call " + render_name(a.id);
        case Action::Kind::Named: {
            static const std::set<std::string> reserved{"id", "left", "right", "write", "call", "apply"};
            return reserved.count(a.id) ? "apply " + a.id : render_name(a.id);
        }
    }
    return "id";
}

inline std::string render_kappa(const KappaSpec& k) {
    if (const auto* p = std::get_if<InversePolynomial>(&k.kind)) {
        std::string out = "inverse-poly(";
        for (std::size_t i = 0; i < p->coeffs.size(); ++i) {
            out += (i > 0 ? ", " : "") + p->coeffs[i].get_str();
        }
        return out + ")";
    }
    if (const auto* f = std::get_if<DistanceFormula>(&k.kind)) {
        std::string out = "inverse-distance(";
        for (std::size_t i = 0; i < f->points.size(); ++i) {
            out += (i > 0 ? ", " : "") + render_real(f->points[i]);
        }
        return out + ")";
    }
    const auto& e = std::get<ExplicitKappa>(k.kind);
    if (e.name.rfind("constant ", 0) == 0) {
        return "constant(" + e.name.substr(9) + ")";
    }
    return "extern(" + quote(e.name) + ")";
}

}  // namespace detail

/// Parses a model.  Names written extern("...") are looked up in `ext`;
/// advice, systems and programs may only refer to earlier definitions.
inline ParseResult parse(const std::string& text, const Externals& ext = {}) {
    ParseResult res;
    auto toks = detail::lex(text, res.diagnostics);
    detail::Parser p(std::move(toks), ext, res.diagnostics);
    res.model = p.parse();
    return res;
}

inline std::string render(const AdviceDecl& a) {
    std::string out = "advice " + detail::render_name(a.name) + " = ";
    switch (a.kind) {
        case AdviceDecl::Kind::Literal:
            out += detail::quote(a.prefix);
            if (!a.cycle.empty()) {
                out += " repeat " + detail::quote(a.cycle);
            }
            break;
        case AdviceDecl::Kind::File: out += "file(" + detail::quote(a.ref) + ")"; break;
        case AdviceDecl::Kind::Extern: out += "extern(" + detail::quote(a.ref) + ")"; break;
    }
    return out + "\n";
}

inline std::string render(const SystemDecl& d) {
    using namespace detail;
    const SystemDef& c = d.def;
    std::ostringstream os;
    os << (d.timed ? "timed-system " : "system ") << render_name(c.name) << " {\n";
    if (const auto* s = std::get_if<SetExpr>(&c.space)) {
        os << "  space " << render_set(*s) << "\n";
    } else {
        os << "  space tape " << quote(std::get<TapeSpace>(c.space).alphabet) << "\n";
    }
    for (const SystemPartition& p : c.partitions) {
        os << "  partition " << render_name(p.name);
        if (const auto* t = std::get_if<TapeReadPartition>(&p.kind)) {
            os << " tape-read " << quote(t->alphabet) << "\n";
            continue;
        }
        const Partition& alpha = std::get<Partition>(p.kind);
        if (alpha.domain) {
            os << " domain " << render_set(*alpha.domain);
        }
        os << " {\n";
        for (const auto& [label, set] : alpha.elements) {
            os << "    " << render_label(label) << " = " << render_set(set) << "\n";
        }
        os << "  }\n";
    }
    for (const SystemTransformation& t : c.transformations) {
        os << "  map " << render_name(t.name) << " = ";
        if (const auto* m = std::get_if<ClassicalMap>(&t.kind)) {
            os << render_map(*m) << "\n";
        } else if (const auto* pw = std::get_if<PiecewiseMap>(&t.kind)) {
            os << "piecewise";
            if (pw->domain) {
                os << " domain " << render_set(*pw->domain);
            }
            os << " {\n";
            for (const auto& [region, m] : pw->cases) {
                os << "    case " << render_set(region) << " -> " << render_map(m) << "\n";
            }
            os << "  }\n";
        } else if (const auto* op = std::get_if<TapeOp>(&t.kind)) {
            os << "tape " << render_tape_op(*op) << "\n";
        } else {
            os << "extern(" << quote(std::get<OpaqueMap>(t.kind).ref) << ")\n";
        }
    }
    for (const auto& [part, k] : d.kappas) {
        os << "  kappa " << render_name(part) << " = " << render_kappa(k) << "\n";
    }
    if (const auto* x = std::get_if<Point>(&c.initial)) {
        os << "  start " << render_point(*x) << "\n";
    } else {
        os << "  start blank\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string render(const Program& q) {
    using namespace detail;
    std::ostringstream os;
    os << "program " << render_name(q.name);
    if (!q.system.empty()) {
        os << " on " << render_name(q.system);
    }
    os << " {\n";
    os << "  alphabet " << quote(q.alphabet) << "\n";
    os << "  initial " << render_name(q.initial) << "\n";
    os << "  accept " << render_name(q.accept) << "\n";
    os << "  reject " << render_name(q.reject) << "\n";
    for (const auto& [name, p] : q.procedures) {
        os << "  procedure " << render_name(name) << " = extern(" << quote(p.ref) << ")\n";
    }
    for (const Rule& r : q.rules) {
        os << "  rule (" << render_name(r.from) << ", " << render_name(r.partition) << ", "
           << (r.element ? render_label(*r.element) : std::string("EMPTY")) << ", " << render_name(r.to) << ", "
           << render_action(r.action) << ")\n";
    }
    os << "}\n";
    return os.str();
}

/// Source text that parses back to a structurally equal model.
inline std::string render(const Model& m) {
    std::string out;
    for (const auto& a : m.advice) {
        out += render(a);
    }
    for (const auto& s : m.systems) {
        out += (out.empty() ? "" : "\n") + render(s);
    }
    for (const auto& q : m.programs) {
        out += (out.empty() ? "" : "\n") + render(q);
    }
    return out;
}

}  // namespace physcomp::dsl

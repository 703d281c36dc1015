#pragma once

// Exact rationals, lazily refinable reals and comparison under an explicit
// refinement budget.
//
// A RealValue is either an exact Rational or a shared, immutable LazyReal.
// A LazyReal is anything that can produce nested enclosing intervals whose
// width shrinks to zero as the requested depth grows.  Digit streams
// (StreamReal) are the primitive lazy values; sums, products, roots and the
// like are built on top of them with plain interval arithmetic.

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "physcomp/errors.hpp"

namespace physcomp {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) {
        throw InvalidParameter("zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Integer floor_of(const Rational& r) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Integer ceil_of(const Rational& r) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// base^k for k of either sign.
inline Rational power_of(unsigned long base, long k) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), base, static_cast<unsigned long>(k < 0 ? -k : k));
    if (k >= 0) {
        return Rational(p);
    }
    return make_rational(Integer(1), p);
}

/// r^e for integer e; r must be nonzero when e < 0.
inline Rational pow_int(const Rational& r, long e) {
    if (e < 0 && r == 0) {
        throw UndefinedValue("zero raised to a negative power");
    }
    const unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    Integer num;
    Integer den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), n);
    return e >= 0 ? make_rational(num, den) : make_rational(den, num);
}

inline Rational abs_of(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// ---------------------------------------------------------------------------
// Precision cap

namespace detail {
inline std::atomic<std::size_t>& precision_cap_ref() {
    static std::atomic<std::size_t> cap{4096};
    return cap;
}
}  // namespace detail

/// Global maximum refinement depth used when no explicit budget is given.
inline std::size_t precision_cap() { return detail::precision_cap_ref().load(); }
inline void set_precision_cap(std::size_t cap) { detail::precision_cap_ref().store(cap); }

class PrecisionCapGuard {
public:
    explicit PrecisionCapGuard(std::size_t cap) : saved_(precision_cap()) { set_precision_cap(cap); }
    ~PrecisionCapGuard() { set_precision_cap(saved_); }
    PrecisionCapGuard(const PrecisionCapGuard&) = delete;
    PrecisionCapGuard& operator=(const PrecisionCapGuard&) = delete;

private:
    std::size_t saved_;
};

/// Depths visited by comparisons: 0, 1, 2, 4, ... and finally the budget.
inline std::vector<std::size_t> depth_schedule(std::size_t budget) {
    std::vector<std::size_t> out{0};
    for (std::size_t d = 1; d < budget; d *= 2) {
        out.push_back(d);
    }
    if (budget > 0) {
        out.push_back(budget);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Intervals

struct Interval {
    Rational lo;
    Rational hi;

    Interval() = default;
    Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) {
            throw InvalidParameter("interval with lo > hi");
        }
    }
    static Interval point(const Rational& r) { return Interval(r, r); }

    Rational width() const { return hi - lo; }
    bool contains(const Rational& r) const { return lo <= r && r <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    bool excludes_zero() const { return lo > 0 || hi < 0; }

    friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(a.lo + b.lo, a.hi + b.hi);
    }
    friend Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }
    friend Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }
    friend Interval operator*(const Interval& a, const Interval& b) {
        const Rational p1 = a.lo * b.lo;
        const Rational p2 = a.lo * b.hi;
        const Rational p3 = a.hi * b.lo;
        const Rational p4 = a.hi * b.hi;
        return Interval(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
    }
};

inline std::string to_string(const Interval& iv) {
    return "[" + to_string(iv.lo) + ", " + to_string(iv.hi) + "]";
}

enum class Ordering { Less, Equal, Greater, Undecided };

inline const char* to_string(Ordering o) {
    switch (o) {
        case Ordering::Less: return "Less";
        case Ordering::Equal: return "Equal";
        case Ordering::Greater: return "Greater";
        case Ordering::Undecided: return "Undecided";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Lazy reals

/// A real number known through nested enclosures.
///
/// Implementations must guarantee enclose(d + 1) is contained in enclose(d)
/// and that the widths tend to zero.  Instances are immutable apart from an
/// internal cache, so they can be shared freely between threads.
class LazyReal {
public:
    virtual ~LazyReal() = default;

    Interval enclose(std::size_t depth) const {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (cache_ && cache_->first == depth) {
            return cache_->second;
        }
        Interval iv = compute(depth);
        cache_.emplace(depth, iv);
        return iv;
    }

    /// True when the value is known to be a real algebraic number.
    virtual bool algebraic() const = 0;
    /// The value as a rational, when that is known structurally.
    virtual std::optional<Rational> exact() const { return std::nullopt; }
    /// Source-level description (empty for computed values).
    virtual std::string origin() const { return {}; }

protected:
    virtual Interval compute(std::size_t depth) const = 0;

private:
    mutable std::mutex cache_mutex_;
    mutable std::optional<std::pair<std::size_t, Interval>> cache_;
};

using LazyPtr = std::shared_ptr<const LazyReal>;

/// Positional digit stream 0.d0 d1 d2 ... in a fixed base.
///
/// Digit k (zero based) has weight base^-(k+1).  The digit source is total;
/// digits are cached as they are pulled so the source runs once per index.
class StreamReal final : public LazyReal {
public:
    using DigitSource = std::function<unsigned(std::size_t)>;

    StreamReal(unsigned base, DigitSource source, std::string origin = {})
        : base_(base), source_(std::move(source)), origin_(std::move(origin)) {
        if (base_ < 2) {
            throw InvalidParameter("stream base must be at least 2");
        }
    }

    /// Eventually periodic stream: prefix digits then cycle digits forever
    /// (zeros when the cycle is empty).  Its value is rational.
    static std::shared_ptr<const StreamReal> pattern(unsigned base, std::vector<unsigned> prefix,
                                                     std::vector<unsigned> cycle,
                                                     std::string origin = {}) {
        for (unsigned d : prefix) {
            check_digit(base, d);
        }
        for (unsigned d : cycle) {
            check_digit(base, d);
        }
        Rational value = pattern_value(base, prefix, cycle);
        auto src = [prefix, cycle](std::size_t k) -> unsigned {
            if (k < prefix.size()) {
                return prefix[k];
            }
            if (cycle.empty()) {
                return 0;
            }
            return cycle[(k - prefix.size()) % cycle.size()];
        };
        auto s = std::make_shared<StreamReal>(base, src, std::move(origin));
        s->exact_ = value;
        return s;
    }

    unsigned base() const { return base_; }

    unsigned digit(std::size_t k) const {
        std::lock_guard<std::mutex> lock(digits_mutex_);
        while (digits_.size() <= k) {
            const unsigned d = source_(digits_.size());
            check_digit(base_, d);
            digits_.push_back(static_cast<std::uint8_t>(d));
        }
        return digits_[k];
    }

    std::vector<unsigned> digits(std::size_t n) const {
        std::vector<unsigned> out;
        out.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            out.push_back(digit(k));
        }
        return out;
    }

    /// Interval of width base^-k fixed by the first k digits.
    Interval refine(std::size_t k) const {
        Integer num = 0;
        for (std::size_t i = 0; i < k; ++i) {
            num = num * base_ + digit(i);
        }
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), base_, k);
        const Rational lo = make_rational(num, den);
        const Rational hi = make_rational(num + 1, den);
        return Interval(lo, hi);
    }

    bool algebraic() const override { return exact_.has_value(); }
    std::optional<Rational> exact() const override { return exact_; }
    std::string origin() const override { return origin_; }

protected:
    Interval compute(std::size_t depth) const override { return refine(depth); }

private:
    static void check_digit(unsigned base, unsigned d) {
        if (d >= base) {
            throw InvalidParameter("digit " + std::to_string(d) + " outside base " +
                                   std::to_string(base));
        }
    }

    static Rational pattern_value(unsigned base, const std::vector<unsigned>& prefix,
                                  const std::vector<unsigned>& cycle) {
        Integer p = 0;
        for (unsigned d : prefix) {
            p = p * base + d;
        }
        Rational value = p;
        value /= Rational(power_of(base, static_cast<long>(prefix.size())));
        if (!cycle.empty()) {
            Integer c = 0;
            for (unsigned d : cycle) {
                c = c * base + d;
            }
            Integer bk;
            mpz_ui_pow_ui(bk.get_mpz_t(), base, cycle.size());
            Rational tail = make_rational(c, bk - 1);
            tail /= Rational(power_of(base, static_cast<long>(prefix.size())));
            value += tail;
        }
        value.canonicalize();
        return value;
    }

    unsigned base_;
    DigitSource source_;
    std::string origin_;
    std::optional<Rational> exact_;
    mutable std::mutex digits_mutex_;
    mutable std::vector<std::uint8_t> digits_;
};

inline Interval refine(const StreamReal& r, std::size_t k) { return r.refine(k); }

// ---------------------------------------------------------------------------
// RealValue

class RealValue {
public:
    RealValue() : v_(Rational(0)) {}
    RealValue(Rational r) : v_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    RealValue(long n) : v_(Rational(n)) {}       // NOLINT(google-explicit-constructor)
    RealValue(int n) : v_(Rational(n)) {}        // NOLINT(google-explicit-constructor)
    RealValue(LazyPtr p) : v_(std::move(p)) {    // NOLINT(google-explicit-constructor)
        if (!std::get<LazyPtr>(v_)) {
            throw InvalidParameter("null lazy real");
        }
    }

    bool is_rational() const { return std::holds_alternative<Rational>(v_); }
    const Rational& rational() const { return std::get<Rational>(v_); }
    const LazyPtr& lazy() const { return std::get<LazyPtr>(v_); }

    /// Rational value if this is a rational, or a lazy value with a known
    /// rational value.
    std::optional<Rational> exact() const {
        if (is_rational()) {
            return rational();
        }
        return lazy()->exact();
    }

    Interval enclose(std::size_t depth) const {
        if (is_rational()) {
            return Interval::point(rational());
        }
        return lazy()->enclose(depth);
    }

    bool algebraic() const { return is_rational() || lazy()->algebraic(); }

    std::string to_string() const {
        if (is_rational()) {
            return physcomp::to_string(rational());
        }
        const std::string o = lazy()->origin();
        return o.empty() ? "<computed>" : o;
    }

    /// Same rational, or the same lazy object / same non-empty origin.
    friend bool structurally_equal(const RealValue& a, const RealValue& b) {
        if (a.is_rational() != b.is_rational()) {
            return false;
        }
        if (a.is_rational()) {
            return a.rational() == b.rational();
        }
        if (a.lazy() == b.lazy()) {
            return true;
        }
        const std::string oa = a.lazy()->origin();
        return !oa.empty() && oa == b.lazy()->origin();
    }

private:
    std::variant<Rational, LazyPtr> v_;
};

using Point = std::vector<RealValue>;

/// A nonnegative real or +infinity.
struct ExtendedReal {
    bool infinite = false;
    RealValue value;

    static ExtendedReal infinity() { return ExtendedReal{true, RealValue(0)}; }
    static ExtendedReal finite(RealValue v) { return ExtendedReal{false, std::move(v)}; }
};

namespace detail {

class ConstNode final : public LazyReal {
public:
    explicit ConstNode(Rational r) : r_(std::move(r)) {}
    bool algebraic() const override { return true; }
    std::optional<Rational> exact() const override { return r_; }

protected:
    Interval compute(std::size_t) const override { return Interval::point(r_); }

private:
    Rational r_;
};

inline LazyPtr as_lazy(const RealValue& v) {
    if (v.is_rational()) {
        return std::make_shared<ConstNode>(v.rational());
    }
    return v.lazy();
}

class UnaryNode : public LazyReal {
public:
    explicit UnaryNode(LazyPtr a) : a_(std::move(a)) {}
    bool algebraic() const override { return a_->algebraic(); }

protected:
    LazyPtr a_;
};

class BinaryNode : public LazyReal {
public:
    BinaryNode(LazyPtr a, LazyPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    bool algebraic() const override { return a_->algebraic() && b_->algebraic(); }

protected:
    LazyPtr a_;
    LazyPtr b_;
};

class SumNode final : public BinaryNode {
public:
    using BinaryNode::BinaryNode;

protected:
    Interval compute(std::size_t d) const override { return a_->enclose(d) + b_->enclose(d); }
};

class ProductNode final : public BinaryNode {
public:
    using BinaryNode::BinaryNode;

protected:
    Interval compute(std::size_t d) const override { return a_->enclose(d) * b_->enclose(d); }
};

class MinNode final : public BinaryNode {
public:
    using BinaryNode::BinaryNode;

protected:
    Interval compute(std::size_t d) const override {
        const Interval x = a_->enclose(d);
        const Interval y = b_->enclose(d);
        return Interval(std::min(x.lo, y.lo), std::min(x.hi, y.hi));
    }
};

class MaxNode final : public BinaryNode {
public:
    using BinaryNode::BinaryNode;

protected:
    Interval compute(std::size_t d) const override {
        const Interval x = a_->enclose(d);
        const Interval y = b_->enclose(d);
        return Interval(std::max(x.lo, y.lo), std::max(x.hi, y.hi));
    }
};

class NegNode final : public UnaryNode {
public:
    using UnaryNode::UnaryNode;

protected:
    Interval compute(std::size_t d) const override { return -a_->enclose(d); }
};

class AbsNode final : public UnaryNode {
public:
    using UnaryNode::UnaryNode;

protected:
    Interval compute(std::size_t d) const override {
        const Interval x = a_->enclose(d);
        if (x.lo >= 0) {
            return x;
        }
        if (x.hi <= 0) {
            return -x;
        }
        return Interval(Rational(0), std::max(Rational(-x.lo), x.hi));
    }
};

/// 1/a, where a's enclosure is known to exclude zero from depth `from` on.
class ReciprocalNode final : public UnaryNode {
public:
    ReciprocalNode(LazyPtr a, std::size_t from) : UnaryNode(std::move(a)), from_(from) {}

protected:
    Interval compute(std::size_t d) const override {
        const Interval x = a_->enclose(std::max(d, from_));
        return Interval(Rational(1 / x.hi), Rational(1 / x.lo));
    }

private:
    std::size_t from_;
};

/// a^n for a natural exponent n.
class IntPowNode final : public UnaryNode {
public:
    IntPowNode(LazyPtr a, unsigned long n) : UnaryNode(std::move(a)), n_(n) {}

protected:
    Interval compute(std::size_t d) const override {
        const Interval x = a_->enclose(d);
        const long n = static_cast<long>(n_);
        const Rational plo = pow_int(x.lo, n);
        const Rational phi = pow_int(x.hi, n);
        if (n_ % 2 == 1 || x.lo >= 0) {
            return Interval(std::min(plo, phi), std::max(plo, phi));
        }
        if (x.hi <= 0) {
            return Interval(phi, plo);
        }
        return Interval(Rational(0), std::max(plo, phi));
    }

private:
    unsigned long n_;
};

/// floor(root_b(t)) for an integer t >= 0.
inline Integer floor_root(const Integer& t, unsigned long b) {
    Integer r;
    mpz_root(r.get_mpz_t(), t.get_mpz_t(), b);
    return r;
}

/// Largest multiple of 2^-d not above the real b-th root of r.
inline Rational floor_root_dyadic(const Rational& r, unsigned long b, std::size_t d);

/// Smallest multiple of 2^-d not below the real b-th root of r.
inline Rational ceil_root_dyadic(const Rational& r, unsigned long b, std::size_t d) {
    if (r < 0) {
        return -floor_root_dyadic(Rational(-r), b, d);
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, d * b);
    const Rational t = r * Rational(scale);
    const Integer fl = floor_of(t);
    Integer s = floor_root(fl, b);
    Integer sb;
    mpz_pow_ui(sb.get_mpz_t(), s.get_mpz_t(), b);
    if (!(Rational(sb) == t)) {
        s += 1;
    }
    return make_rational(s, Integer(1) << static_cast<mp_bitcnt_t>(d));
}

inline Rational floor_root_dyadic(const Rational& r, unsigned long b, std::size_t d) {
    if (r < 0) {
        return -ceil_root_dyadic(Rational(-r), b, d);
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, d * b);
    const Integer fl = floor_of(r * Rational(scale));
    return make_rational(floor_root(fl, b), Integer(1) << static_cast<mp_bitcnt_t>(d));
}

/// Real b-th root: sign preserving for odd b, principal root of a
/// nonnegative radicand for even b.
class RootNode final : public UnaryNode {
public:
    RootNode(LazyPtr a, unsigned long b) : UnaryNode(std::move(a)), b_(b) {}

protected:
    Interval compute(std::size_t d) const override {
        Interval x = a_->enclose(d);
        if (b_ % 2 == 0) {
            if (x.lo < 0) {
                x.lo = 0;
            }
            if (x.hi < 0) {
                x.hi = 0;
            }
        }
        return Interval(floor_root_dyadic(x.lo, b_, d), ceil_root_dyadic(x.hi, b_, d));
    }

private:
    unsigned long b_;
};

/// Exact rational b-th root of r, when there is one (r >= 0 or b odd).
inline std::optional<Rational> exact_root(const Rational& r, unsigned long b) {
    if (r < 0) {
        if (b % 2 == 0) {
            return std::nullopt;
        }
        auto pos = exact_root(Rational(-r), b);
        if (!pos) {
            return std::nullopt;
        }
        return Rational(-*pos);
    }
    Integer n;
    Integer m;
    if (mpz_root(n.get_mpz_t(), r.get_num_mpz_t(), b) == 0) {
        return std::nullopt;
    }
    if (mpz_root(m.get_mpz_t(), r.get_den_mpz_t(), b) == 0) {
        return std::nullopt;
    }
    return make_rational(n, m);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Comparison and arithmetic

/// Orders a and b by refining both up to `budget`.
///
/// Equal is reported only when both values are rational (exactly known);
/// Undecided means the enclosures still overlapped at the budget.
inline Ordering cmp(const RealValue& a, const RealValue& b, std::size_t budget = precision_cap()) {
    const auto ea = a.exact();
    const auto eb = b.exact();
    if (ea && eb) {
        if (*ea < *eb) {
            return Ordering::Less;
        }
        return *ea > *eb ? Ordering::Greater : Ordering::Equal;
    }
    for (std::size_t d : depth_schedule(budget)) {
        const Interval x = a.enclose(d);
        const Interval y = b.enclose(d);
        if (x.hi < y.lo) {
            return Ordering::Less;
        }
        if (x.lo > y.hi) {
            return Ordering::Greater;
        }
    }
    return Ordering::Undecided;
}

inline RealValue operator+(const RealValue& a, const RealValue& b) {
    const auto ea = a.exact();
    const auto eb = b.exact();
    if (ea && eb) {
        return Rational(*ea + *eb);
    }
    if (ea && *ea == 0) {
        return b;
    }
    if (eb && *eb == 0) {
        return a;
    }
    return LazyPtr(std::make_shared<detail::SumNode>(detail::as_lazy(a), detail::as_lazy(b)));
}

inline RealValue operator-(const RealValue& a) {
    if (const auto ea = a.exact()) {
        return Rational(-*ea);
    }
    return LazyPtr(std::make_shared<detail::NegNode>(a.lazy()));
}

inline RealValue operator-(const RealValue& a, const RealValue& b) { return a + (-b); }

inline RealValue operator*(const RealValue& a, const RealValue& b) {
    const auto ea = a.exact();
    const auto eb = b.exact();
    if (ea && eb) {
        return Rational(*ea * *eb);
    }
    if ((ea && *ea == 0) || (eb && *eb == 0)) {
        return Rational(0);
    }
    if (ea && *ea == 1) {
        return b;
    }
    if (eb && *eb == 1) {
        return a;
    }
    return LazyPtr(std::make_shared<detail::ProductNode>(detail::as_lazy(a), detail::as_lazy(b)));
}

/// 1/b.  Throws UndefinedValue for an exact zero and PrecisionExhausted when
/// b cannot be separated from zero within the budget.
inline RealValue reciprocal(const RealValue& b, std::size_t budget = precision_cap()) {
    if (const auto eb = b.exact()) {
        if (*eb == 0) {
            throw UndefinedValue("division by zero");
        }
        return Rational(1 / *eb);
    }
    for (std::size_t d : depth_schedule(budget)) {
        if (b.enclose(d).excludes_zero()) {
            return LazyPtr(std::make_shared<detail::ReciprocalNode>(b.lazy(), d));
        }
    }
    throw PrecisionExhausted("divisor not separated from zero");
}

inline RealValue operator/(const RealValue& a, const RealValue& b) { return a * reciprocal(b); }

inline RealValue abs(const RealValue& a) {
    if (const auto ea = a.exact()) {
        return abs_of(*ea);
    }
    return LazyPtr(std::make_shared<detail::AbsNode>(a.lazy()));
}

inline RealValue min(const RealValue& a, const RealValue& b) {
    const auto ea = a.exact();
    const auto eb = b.exact();
    if (ea && eb) {
        return *ea < *eb ? *ea : *eb;
    }
    return LazyPtr(std::make_shared<detail::MinNode>(detail::as_lazy(a), detail::as_lazy(b)));
}

inline RealValue max(const RealValue& a, const RealValue& b) {
    const auto ea = a.exact();
    const auto eb = b.exact();
    if (ea && eb) {
        return *ea < *eb ? *eb : *ea;
    }
    return LazyPtr(std::make_shared<detail::MaxNode>(detail::as_lazy(a), detail::as_lazy(b)));
}

/// x^q with q = a/b in lowest terms, taking the greatest real y with
/// y^b = x^a.  Returns nullopt when no real root exists (even b with a
/// negative radicand, or a zero base with a negative exponent).
inline std::optional<RealValue> rat_pow(const RealValue& x, const Rational& q,
                                        std::size_t budget = precision_cap()) {
    Rational qc = q;
    qc.canonicalize();
    if (qc == 0) {
        return RealValue(Rational(1));
    }
    if (!qc.get_den().fits_ulong_p() || !qc.get_num().fits_slong_p()) {
        throw InvalidParameter("exponent too large: " + to_string(qc));
    }
    const unsigned long b = qc.get_den().get_ui();
    const long a = qc.get_num().get_si();
    const bool even_root = b % 2 == 0;

    if (const auto ex = x.exact()) {
        const Rational& r = *ex;
        if (r < 0 && even_root) {
            return std::nullopt;
        }
        if (r == 0) {
            if (a < 0) {
                return std::nullopt;
            }
            return RealValue(Rational(0));
        }
        if (auto root = detail::exact_root(r, b)) {
            return RealValue(pow_int(*root, a));
        }
        LazyPtr node = std::make_shared<detail::RootNode>(std::make_shared<detail::ConstNode>(r), b);
        if (a != 1 && a != -1) {
            node = std::make_shared<detail::IntPowNode>(node, static_cast<unsigned long>(a < 0 ? -a : a));
        }
        RealValue out{node};
        return a < 0 ? reciprocal(out, budget) : out;
    }

    if (even_root || a < 0) {
        const Ordering sign = cmp(x, RealValue(0), budget);
        if (sign == Ordering::Undecided) {
            throw PrecisionExhausted("sign of radicand undecided");
        }
        if (sign == Ordering::Less && even_root) {
            return std::nullopt;
        }
    }
    LazyPtr node = x.lazy();
    if (b != 1) {
        node = std::make_shared<detail::RootNode>(node, b);
    }
    if (a != 1 && a != -1) {
        node = std::make_shared<detail::IntPowNode>(node, static_cast<unsigned long>(a < 0 ? -a : a));
    }
    RealValue out{node};
    return a < 0 ? reciprocal(out, budget) : out;
}

/// Decimal enclosure "[lo, hi]" rounded outward to `places` digits.
inline std::string to_decimal_interval(const RealValue& v, int places = 12, std::size_t depth = 64) {
    const Interval iv = v.enclose(depth);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
    auto fmt = [&](const Integer& n) {
        Integer q = abs(n) / scale;
        Integer r = abs(n) % scale;
        std::string frac = r.get_str();
        frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
        return std::string(n < 0 ? "-" : "") + q.get_str() + "." + frac;
    };
    const Integer lo = floor_of(iv.lo * Rational(scale));
    const Integer hi = ceil_of(iv.hi * Rational(scale));
    return "[" + fmt(lo) + "," + fmt(hi) + "]";
}

inline std::string to_string(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += p[i].to_string();
    }
    return out + ")";
}

}  // namespace physcomp

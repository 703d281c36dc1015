#pragma once

// Polynomial maps with rational exponents, measurable set expressions,
// partitions and piecewise maps.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "physcomp/numerics.hpp"

namespace physcomp {

// ---------------------------------------------------------------------------
// Polynomials and maps

struct Term {
    RealValue coef;
    std::vector<Rational> exps;
};

/// F(x) = sum_i r_i * prod_j x_j^(q_ij)
struct MultiPoly {
    std::size_t arity = 0;
    std::vector<Term> terms;

    bool algebraic() const {
        return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.coef.algebraic(); });
    }
};

inline void check_dim(std::size_t expected, std::size_t got, const std::string& where) {
    if (expected != got) {
        throw DimensionMismatch(where + ": expected " + std::to_string(expected) + ", got " +
                                std::to_string(got));
    }
}

/// Value of F at x, or nullopt when some power has no real root.
inline std::optional<RealValue> eval_poly(const MultiPoly& f, const Point& x,
                                          std::size_t budget = precision_cap()) {
    check_dim(f.arity, x.size(), "polynomial arity");
    RealValue sum(Rational(0));
    for (const Term& t : f.terms) {
        check_dim(f.arity, t.exps.size(), "term exponent count");
        RealValue prod = t.coef;
        for (std::size_t j = 0; j < f.arity; ++j) {
            if (t.exps[j] == 0) {
                continue;
            }
            auto p = rat_pow(x[j], t.exps[j], budget);
            if (!p) {
                return std::nullopt;
            }
            prod = prod * *p;
        }
        sum = sum + prod;
    }
    return sum;
}

struct ClassicalMap {
    std::size_t arity = 0;
    std::vector<MultiPoly> components;
    std::string name;

    ClassicalMap() = default;
    ClassicalMap(std::size_t m, std::vector<MultiPoly> comps, std::string n = {})
        : arity(m), components(std::move(comps)), name(std::move(n)) {
        check_dim(arity, components.size(), "map component count");
        for (const MultiPoly& c : components) {
            check_dim(arity, c.arity, "component arity");
        }
    }

    bool algebraic() const {
        return std::all_of(components.begin(), components.end(),
                           [](const MultiPoly& p) { return p.algebraic(); });
    }

    /// Componentwise evaluation; throws UndefinedValue where some component is.
    Point apply(const Point& x, std::size_t budget = precision_cap()) const {
        check_dim(arity, x.size(), "map arity");
        Point out;
        out.reserve(arity);
        for (const MultiPoly& c : components) {
            auto v = eval_poly(c, x, budget);
            if (!v) {
                throw UndefinedValue("map " + (name.empty() ? std::string("<anonymous>") : name) +
                                     " at " + to_string(x));
            }
            out.push_back(std::move(*v));
        }
        return out;
    }

    /// x -> M x + b.
    static ClassicalMap linear(const std::vector<std::vector<RealValue>>& m, const Point& offset = {},
                               std::string n = {}) {
        const std::size_t dim = m.size();
        std::vector<MultiPoly> comps;
        for (std::size_t i = 0; i < dim; ++i) {
            check_dim(dim, m[i].size(), "matrix row");
            MultiPoly p{dim, {}};
            for (std::size_t j = 0; j < dim; ++j) {
                const auto e = m[i][j].exact();
                if (e && *e == 0) {
                    continue;
                }
                std::vector<Rational> exps(dim, Rational(0));
                exps[j] = 1;
                p.terms.push_back(Term{m[i][j], exps});
            }
            if (!offset.empty()) {
                check_dim(dim, offset.size(), "offset");
                const auto e = offset[i].exact();
                if (!e || *e != 0) {
                    p.terms.push_back(Term{offset[i], std::vector<Rational>(dim, Rational(0))});
                }
            }
            comps.push_back(std::move(p));
        }
        return ClassicalMap(dim, std::move(comps), std::move(n));
    }

    static ClassicalMap identity(std::size_t dim, std::string n = "id") {
        std::vector<std::vector<RealValue>> m(dim, std::vector<RealValue>(dim, RealValue(0)));
        for (std::size_t i = 0; i < dim; ++i) {
            m[i][i] = RealValue(1);
        }
        return linear(m, {}, std::move(n));
    }

    /// One-dimensional x -> a x + b.
    static ClassicalMap affine1(const RealValue& a, const RealValue& b, std::string n = {}) {
        return linear({{a}}, {b}, std::move(n));
    }
};

inline bool structurally_equal(const MultiPoly& a, const MultiPoly& b) {
    if (a.arity != b.arity || a.terms.size() != b.terms.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (!structurally_equal(a.terms[i].coef, b.terms[i].coef) || a.terms[i].exps != b.terms[i].exps) {
            return false;
        }
    }
    return true;
}

inline bool structurally_equal(const ClassicalMap& a, const ClassicalMap& b) {
    if (a.arity != b.arity || a.components.size() != b.components.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        if (!structurally_equal(a.components[i], b.components[i])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Set expressions

struct SetNode;
using SetExpr = std::shared_ptr<const SetNode>;

struct Ball {
    Point center;
    RealValue radius;
    bool closed = false;
};

/// One side of an axis interval; no value means unbounded.
struct Bound {
    std::optional<RealValue> value;
    bool closed = false;
};

/// Product of axis intervals.  A one-dimensional Box is an interval.
struct Box {
    std::vector<Bound> lo;
    std::vector<Bound> hi;
};

struct ProductSet {
    SetExpr first;
    SetExpr second;
};

struct UnionSet {
    SetExpr a;
    SetExpr b;
};

struct IntersectionSet {
    SetExpr a;
    SetExpr b;
};

struct ComplementSet {
    SetExpr a;
};

struct PreimageSet {
    ClassicalMap map;
    ClassicalMap inverse;
    SetExpr target;
};

/// Membership given by an arbitrary callable.  Not classically measurable.
struct PredicateSet {
    using Fn = std::function<bool(const Point&, std::size_t)>;
    std::string name;
    std::size_t dim = 1;
    Fn fn;
};

struct SetNode {
    std::variant<Ball, Box, ProductSet, UnionSet, IntersectionSet, ComplementSet, PreimageSet, PredicateSet>
        node;

    std::size_t dim() const;
    bool is_classical() const;
    std::size_t depth() const;
};

inline std::size_t SetNode::dim() const {
    struct V {
        std::size_t operator()(const Ball& b) const { return b.center.size(); }
        std::size_t operator()(const Box& b) const { return b.lo.size(); }
        std::size_t operator()(const ProductSet& p) const { return p.first->dim() + p.second->dim(); }
        std::size_t operator()(const UnionSet& u) const { return u.a->dim(); }
        std::size_t operator()(const IntersectionSet& u) const { return u.a->dim(); }
        std::size_t operator()(const ComplementSet& c) const { return c.a->dim(); }
        std::size_t operator()(const PreimageSet& p) const { return p.map.arity; }
        std::size_t operator()(const PredicateSet& p) const { return p.dim; }
    };
    return std::visit(V{}, node);
}

inline bool SetNode::is_classical() const {
    struct V {
        bool operator()(const Ball&) const { return true; }
        bool operator()(const Box&) const { return true; }
        bool operator()(const ProductSet& p) const { return p.first->is_classical() && p.second->is_classical(); }
        bool operator()(const UnionSet& u) const { return u.a->is_classical() && u.b->is_classical(); }
        bool operator()(const IntersectionSet& u) const { return u.a->is_classical() && u.b->is_classical(); }
        bool operator()(const ComplementSet& c) const { return c.a->is_classical(); }
        bool operator()(const PreimageSet& p) const { return p.target->is_classical(); }
        bool operator()(const PredicateSet&) const { return false; }
    };
    return std::visit(V{}, node);
}

inline std::size_t SetNode::depth() const {
    struct V {
        std::size_t operator()(const Ball&) const { return 0; }
        std::size_t operator()(const Box&) const { return 0; }
        std::size_t operator()(const ProductSet& p) const {
            return 1 + std::max(p.first->depth(), p.second->depth());
        }
        std::size_t operator()(const UnionSet& u) const { return 1 + std::max(u.a->depth(), u.b->depth()); }
        std::size_t operator()(const IntersectionSet& u) const {
            return 1 + std::max(u.a->depth(), u.b->depth());
        }
        std::size_t operator()(const ComplementSet& c) const { return 1 + c.a->depth(); }
        std::size_t operator()(const PreimageSet& p) const { return 1 + p.target->depth(); }
        std::size_t operator()(const PredicateSet&) const { return 0; }
    };
    return std::visit(V{}, node);
}

namespace sets {

inline SetExpr ball(Point center, RealValue radius, bool closed) {
    if (const auto r = radius.exact(); r && *r < 0) {
        throw InvalidParameter("negative radius");
    }
    if (!radius.exact() && cmp(radius, RealValue(0), 64) == Ordering::Less) {
        throw InvalidParameter("negative radius");
    }
    return std::make_shared<SetNode>(SetNode{Ball{std::move(center), std::move(radius), closed}});
}

inline SetExpr open_ball(Point c, RealValue r) { return ball(std::move(c), std::move(r), false); }
inline SetExpr closed_ball(Point c, RealValue r) { return ball(std::move(c), std::move(r), true); }

inline SetExpr box(std::vector<Bound> lo, std::vector<Bound> hi) {
    check_dim(lo.size(), hi.size(), "box bounds");
    if (lo.empty()) {
        throw InvalidParameter("zero-dimensional box");
    }
    return std::make_shared<SetNode>(SetNode{Box{std::move(lo), std::move(hi)}});
}

/// Interval with optional (infinite when absent) endpoints.
inline SetExpr interval(std::optional<RealValue> lo, std::optional<RealValue> hi, bool lo_closed,
                        bool hi_closed) {
    return box({Bound{std::move(lo), lo_closed}}, {Bound{std::move(hi), hi_closed}});
}

inline SetExpr interval(const Rational& lo, const Rational& hi, bool lo_closed, bool hi_closed) {
    return interval(std::optional<RealValue>(RealValue(lo)), std::optional<RealValue>(RealValue(hi)),
                    lo_closed, hi_closed);
}

/// All of R^m.
inline SetExpr everything(std::size_t m) {
    return box(std::vector<Bound>(m), std::vector<Bound>(m));
}

inline SetExpr product(SetExpr a, SetExpr b) {
    return std::make_shared<SetNode>(SetNode{ProductSet{std::move(a), std::move(b)}});
}

inline SetExpr set_union(SetExpr a, SetExpr b) {
    check_dim(a->dim(), b->dim(), "union operands");
    return std::make_shared<SetNode>(SetNode{UnionSet{std::move(a), std::move(b)}});
}

inline SetExpr intersection(SetExpr a, SetExpr b) {
    check_dim(a->dim(), b->dim(), "intersection operands");
    return std::make_shared<SetNode>(SetNode{IntersectionSet{std::move(a), std::move(b)}});
}

inline SetExpr complement(SetExpr a) { return std::make_shared<SetNode>(SetNode{ComplementSet{std::move(a)}}); }

inline SetExpr predicate(std::string name, std::size_t dim, PredicateSet::Fn fn) {
    return std::make_shared<SetNode>(SetNode{PredicateSet{std::move(name), dim, std::move(fn)}});
}

namespace detail {

/// Deterministic rational probe points used to spot-check inverses.
inline std::vector<Point> probe_points(std::size_t dim) {
    static const long nums[] = {0, 1, -1, 3, -5, 7, 11, -13};
    static const long dens[] = {1, 2, 3, 4, 7, 5, 8, 9};
    std::vector<Point> out;
    for (std::size_t k = 0; k < 8; ++k) {
        Point p;
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t idx = (k + 3 * j) % 8;
            p.emplace_back(make_rational(Integer(nums[idx]), Integer(dens[(idx + j) % 8])));
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline bool same_value(const RealValue& a, const RealValue& b) {
    const Ordering o = cmp(a, b, 64);
    return o == Ordering::Equal || o == Ordering::Undecided;
}

}  // namespace detail

/// Preimage of `target` under `map`; `inverse` is the witness of
/// invertibility and is checked by round trip on probe points.
inline SetExpr preimage(ClassicalMap map, ClassicalMap inverse, SetExpr target) {
    check_dim(map.arity, target->dim(), "preimage map vs target");
    check_dim(map.arity, inverse.arity, "preimage inverse");
    for (const Point& p : detail::probe_points(map.arity)) {
        Point y;
        try {
            y = map.apply(p, 64);
        } catch (const UndefinedValue&) {
            continue;
        } catch (const PrecisionExhausted&) {
            continue;
        }
        Point back;
        try {
            back = inverse.apply(y, 64);
        } catch (const Error&) {
            throw InvalidParameter("inverse witness undefined at image of " + to_string(p));
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!detail::same_value(p[j], back[j])) {
                throw InvalidParameter("inverse witness fails round trip at " + to_string(p));
            }
        }
    }
    return std::make_shared<SetNode>(SetNode{PreimageSet{std::move(map), std::move(inverse), std::move(target)}});
}

}  // namespace sets

// ---------------------------------------------------------------------------
// Membership

namespace detail {

using Tri = std::optional<bool>;  // nullopt: undecided at the budget

inline Tri tri_not(Tri a) { return a ? Tri(!*a) : std::nullopt; }
inline Tri tri_or(Tri a, Tri b) {
    if ((a && *a) || (b && *b)) {
        return true;
    }
    if (a && b) {
        return false;
    }
    return std::nullopt;
}
inline Tri tri_and(Tri a, Tri b) { return tri_not(tri_or(tri_not(a), tri_not(b))); }

/// Whether x lies on the inside of the bound, as seen from `lower`.
inline Tri bound_ok(const RealValue& x, const Bound& b, bool lower, std::size_t budget) {
    if (!b.value) {
        return true;
    }
    const Ordering o = cmp(x, *b.value, budget);
    switch (o) {
        case Ordering::Equal: return b.closed;
        case Ordering::Less: return !lower;
        case Ordering::Greater: return lower;
        case Ordering::Undecided: return std::nullopt;
    }
    return std::nullopt;
}

inline Tri contains3(const SetExpr& e, const Point& x, std::size_t budget);

struct ContainsVisitor {
    const Point& x;
    std::size_t budget;

    Tri operator()(const Ball& b) const {
        RealValue s(Rational(0));
        for (std::size_t i = 0; i < x.size(); ++i) {
            const RealValue d = x[i] - b.center[i];
            s = s + d * d;
        }
        const RealValue r2 = b.radius * b.radius;
        switch (cmp(s, r2, budget)) {
            case Ordering::Less: return true;
            case Ordering::Greater: return false;
            case Ordering::Equal: return b.closed;
            case Ordering::Undecided: return std::nullopt;
        }
        return std::nullopt;
    }

    Tri operator()(const Box& b) const {
        Tri acc = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
            acc = tri_and(acc, bound_ok(x[i], b.lo[i], true, budget));
            acc = tri_and(acc, bound_ok(x[i], b.hi[i], false, budget));
            if (acc && !*acc) {
                return false;
            }
        }
        return acc;
    }

    Tri operator()(const ProductSet& p) const {
        const std::size_t k = p.first->dim();
        const Point a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
        const Point b(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
        return tri_and(contains3(p.first, a, budget), contains3(p.second, b, budget));
    }

    Tri operator()(const UnionSet& u) const {
        return tri_or(contains3(u.a, x, budget), contains3(u.b, x, budget));
    }

    Tri operator()(const IntersectionSet& u) const {
        return tri_and(contains3(u.a, x, budget), contains3(u.b, x, budget));
    }

    Tri operator()(const ComplementSet& c) const { return tri_not(contains3(c.a, x, budget)); }

    Tri operator()(const PreimageSet& p) const {
        Point y;
        try {
            y = p.map.apply(x, budget);
        } catch (const UndefinedValue&) {
            return false;
        } catch (const PrecisionExhausted&) {
            return std::nullopt;
        }
        return contains3(p.target, y, budget);
    }

    Tri operator()(const PredicateSet& p) const {
        try {
            return p.fn(x, budget);
        } catch (const PrecisionExhausted&) {
            return std::nullopt;
        }
    }
};

inline Tri contains3(const SetExpr& e, const Point& x, std::size_t budget) {
    check_dim(e->dim(), x.size(), "membership point");
    return std::visit(ContainsVisitor{x, budget}, e->node);
}

}  // namespace detail

/// Decides x in E.  Throws PrecisionExhausted when x is too close to a
/// boundary to decide within `budget`.
inline bool contains(const SetExpr& e, const Point& x, std::size_t budget = precision_cap()) {
    const auto t = detail::contains3(e, x, budget);
    if (!t) {
        throw PrecisionExhausted("membership of " + to_string(x) + " undecided");
    }
    return *t;
}

inline bool structurally_equal(const SetExpr& a, const SetExpr& b);

namespace detail {

inline bool points_equal(const Point& a, const Point& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!structurally_equal(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

inline bool bounds_equal(const std::vector<Bound>& a, const std::vector<Bound>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].value.has_value() != b[i].value.has_value()) {
            return false;
        }
        if (a[i].value && (!structurally_equal(*a[i].value, *b[i].value) || a[i].closed != b[i].closed)) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

inline bool structurally_equal(const SetExpr& a, const SetExpr& b) {
    if (a == b) {
        return true;
    }
    if (!a || !b || a->node.index() != b->node.index()) {
        return false;
    }
    if (const auto* x = std::get_if<Ball>(&a->node)) {
        const auto& y = std::get<Ball>(b->node);
        return x->closed == y.closed && structurally_equal(x->radius, y.radius) &&
               detail::points_equal(x->center, y.center);
    }
    if (const auto* x = std::get_if<Box>(&a->node)) {
        const auto& y = std::get<Box>(b->node);
        return detail::bounds_equal(x->lo, y.lo) && detail::bounds_equal(x->hi, y.hi);
    }
    if (const auto* x = std::get_if<ProductSet>(&a->node)) {
        const auto& y = std::get<ProductSet>(b->node);
        return structurally_equal(x->first, y.first) && structurally_equal(x->second, y.second);
    }
    if (const auto* x = std::get_if<UnionSet>(&a->node)) {
        const auto& y = std::get<UnionSet>(b->node);
        return structurally_equal(x->a, y.a) && structurally_equal(x->b, y.b);
    }
    if (const auto* x = std::get_if<IntersectionSet>(&a->node)) {
        const auto& y = std::get<IntersectionSet>(b->node);
        return structurally_equal(x->a, y.a) && structurally_equal(x->b, y.b);
    }
    if (const auto* x = std::get_if<ComplementSet>(&a->node)) {
        return structurally_equal(x->a, std::get<ComplementSet>(b->node).a);
    }
    if (const auto* x = std::get_if<PreimageSet>(&a->node)) {
        const auto& y = std::get<PreimageSet>(b->node);
        return structurally_equal(x->map, y.map) && structurally_equal(x->inverse, y.inverse) &&
               structurally_equal(x->target, y.target);
    }
    const auto& x = std::get<PredicateSet>(a->node);
    const auto& y = std::get<PredicateSet>(b->node);
    return x.name == y.name && x.dim == y.dim;
}

// ---------------------------------------------------------------------------
// Partitions

struct Partition {
    using DistanceFn = std::function<ExtendedReal(const Point&)>;

    std::vector<std::pair<std::string, SetExpr>> elements;
    std::optional<SetExpr> domain;
    DistanceFn distance;

    std::size_t dim() const { return elements.empty() ? 0 : elements.front().second->dim(); }

    bool is_classical() const {
        return std::all_of(elements.begin(), elements.end(),
                           [](const auto& e) { return e.second->is_classical(); });
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (const auto& e : elements) {
            out.push_back(e.first);
        }
        return out;
    }

    const SetExpr* find(const std::string& label) const {
        for (const auto& e : elements) {
            if (e.first == label) {
                return &e.second;
            }
        }
        return nullptr;
    }

    /// Label of the first element containing x.
    std::string classify(const Point& x, std::size_t budget = precision_cap()) const {
        bool undecided = false;
        for (const auto& [label, set] : elements) {
            const auto t = detail::contains3(set, x, budget);
            if (t && *t) {
                return label;
            }
            undecided = undecided || !t;
        }
        if (undecided) {
            throw PrecisionExhausted("partition element of " + to_string(x) + " undecided");
        }
        throw OutsideDomain("no partition element contains " + to_string(x));
    }
};

namespace detail {

inline RealValue sqrt_of(const RealValue& v) {
    auto r = rat_pow(v, Rational(1, 2));
    if (!r) {
        throw UndefinedValue("square root of a negative value");
    }
    return *r;
}

inline RealValue norm(const Point& a, const Point& b) {
    RealValue s(Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const RealValue d = a[i] - b[i];
        s = s + d * d;
    }
    return sqrt_of(s);
}

/// Boundary points of a one-dimensional interval, ball or complement.
inline bool boundary_points_1d(const SetExpr& e, std::vector<RealValue>& out) {
    if (const auto* b = std::get_if<Box>(&e->node)) {
        if (b->lo[0].value) {
            out.push_back(*b->lo[0].value);
        }
        if (b->hi[0].value) {
            out.push_back(*b->hi[0].value);
        }
        return true;
    }
    if (const auto* b = std::get_if<Ball>(&e->node)) {
        const auto r = b->radius.exact();
        if (r && *r == 0) {
            if (b->closed) {
                out.push_back(b->center[0]);
            }
            return true;
        }
        out.push_back(b->center[0] - b->radius);
        out.push_back(b->center[0] + b->radius);
        return true;
    }
    if (const auto* c = std::get_if<ComplementSet>(&e->node)) {
        return boundary_points_1d(c->a, out);
    }
    return false;
}

/// Distance from x to the boundary of a box, ball or complement of either.
inline std::optional<RealValue> element_boundary_distance(const SetExpr& e, const Point& x) {
    if (const auto* c = std::get_if<ComplementSet>(&e->node)) {
        return element_boundary_distance(c->a, x);
    }
    if (const auto* b = std::get_if<Ball>(&e->node)) {
        return abs(norm(x, b->center) - b->radius);
    }
    if (const auto* b = std::get_if<Box>(&e->node)) {
        // Outside part: distance to the closed box.  Inside part: distance to
        // the nearest finite face.  At most one of the two is nonzero.
        RealValue out_sq(Rational(0));
        std::optional<RealValue> inside;
        for (std::size_t i = 0; i < x.size(); ++i) {
            RealValue excess(Rational(0));
            if (b->lo[i].value) {
                const RealValue d = x[i] - *b->lo[i].value;
                excess = max(excess, -d);
                inside = inside ? min(*inside, d) : d;
            }
            if (b->hi[i].value) {
                const RealValue d = *b->hi[i].value - x[i];
                excess = max(excess, -d);
                inside = inside ? min(*inside, d) : d;
            }
            out_sq = out_sq + excess * excess;
        }
        if (!inside) {
            return std::nullopt;  // all of R^m: no boundary
        }
        return sqrt_of(out_sq) + max(RealValue(0), *inside);
    }
    throw UnsupportedPartitionClass("boundary distance needs boxes, balls or a distance function");
}

}  // namespace detail

/// Euclidean distance from x to the union of the element boundaries.
///
/// In one dimension, element endpoints that are also endpoints of the
/// partition's domain are not counted: they bound the configuration space,
/// not a cell of the measurement.
inline ExtendedReal boundary_distance(const Partition& alpha, const Point& x) {
    if (alpha.distance) {
        return alpha.distance(x);
    }
    check_dim(alpha.dim(), x.size(), "boundary distance point");
    std::optional<RealValue> best;
    if (alpha.dim() == 1) {
        std::vector<RealValue> pts;
        for (const auto& e : alpha.elements) {
            if (!detail::boundary_points_1d(e.second, pts)) {
                throw UnsupportedPartitionClass("element " + e.first + " is not an interval or ball");
            }
        }
        std::vector<RealValue> domain_pts;
        if (alpha.domain) {
            detail::boundary_points_1d(*alpha.domain, domain_pts);
        }
        for (const RealValue& p : pts) {
            const bool at_domain_edge = std::any_of(domain_pts.begin(), domain_pts.end(), [&](const RealValue& q) {
                return structurally_equal(p, q);
            });
            if (at_domain_edge) {
                continue;
            }
            const RealValue d = abs(x[0] - p);
            best = best ? min(*best, d) : d;
        }
    } else {
        for (const auto& e : alpha.elements) {
            const auto d = detail::element_boundary_distance(e.second, x);
            if (d) {
                best = best ? min(*best, *d) : *d;
            }
        }
    }
    if (!best) {
        return ExtendedReal::infinity();
    }
    return ExtendedReal::finite(*best);
}

// ---------------------------------------------------------------------------
// Partition validation

struct PartitionReport {
    bool valid = true;
    bool exact = false;
    std::optional<Point> witness;
    std::string message;
};

namespace detail {

/// Rational with the smallest denominator (then numerator) in (a, b), or
/// in (a, infinity) when b is absent.  Requires a >= 0.
inline Rational simplest_above(const Rational& a, const std::optional<Rational>& b) {
    const Integer n = floor_of(a);
    const Rational next = Rational(n + 1);
    if (!b || next < *b) {
        return next;
    }
    // a and b both lie in [n, n + 1]
    const Rational frac_b = *b - Rational(n);
    const Rational frac_a = a - Rational(n);
    const std::optional<Rational> upper =
        frac_a == 0 ? std::nullopt : std::optional<Rational>(Rational(1 / frac_a));
    const Rational inner = simplest_above(Rational(1 / frac_b), upper);
    return Rational(n) + Rational(1 / inner);
}

inline Rational simplest_between(const Rational& a, const Rational& b) {
    if (a < 0 && b > 0) {
        return Rational(0);
    }
    if (b <= 0) {
        return -simplest_above(Rational(-b), Rational(-a));
    }
    return simplest_above(a, b);
}

inline bool exact_interval(const SetExpr& e) {
    const auto* b = std::get_if<Box>(&e->node);
    if (b == nullptr || b->lo.size() != 1) {
        return false;
    }
    return (!b->lo[0].value || b->lo[0].value->is_rational()) && (!b->hi[0].value || b->hi[0].value->is_rational());
}

inline void interval_endpoints(const SetExpr& e, std::vector<Rational>& out) {
    const auto& b = std::get<Box>(e->node);
    if (b.lo[0].value) {
        out.push_back(b.lo[0].value->rational());
    }
    if (b.hi[0].value) {
        out.push_back(b.hi[0].value->rational());
    }
}

/// Checks one probe point; returns a failure message or empty.
inline std::string probe(const Partition& alpha, const Point& x, std::size_t budget) {
    std::size_t count = 0;
    for (const auto& e : alpha.elements) {
        if (contains(e.second, x, budget)) {
            ++count;
        }
    }
    const bool in_domain = alpha.domain ? contains(*alpha.domain, x, budget) : count > 0;
    if (in_domain && count == 0) {
        return "point " + to_string(x) + " is covered by no element";
    }
    if (count > 1) {
        return "point " + to_string(x) + " lies in " + std::to_string(count) + " elements";
    }
    if (!in_domain && count > 0) {
        return "point " + to_string(x) + " lies in an element but outside the domain";
    }
    return {};
}

}  // namespace detail

/// Checks that the elements are pairwise disjoint and cover the domain.
///
/// One-dimensional partitions of intervals with rational endpoints are
/// decided exactly; anything else is probed at `samples` random rational
/// points drawn deterministically from `seed`.
inline PartitionReport validate_partition(const Partition& alpha, std::size_t samples = 1000,
                                          std::uint64_t seed = 1) {
    PartitionReport rep;
    if (alpha.elements.empty()) {
        rep.valid = false;
        rep.exact = true;
        rep.message = "partition has no elements";
        return rep;
    }
    const std::size_t dim = alpha.dim();
    for (const auto& e : alpha.elements) {
        if (e.second->dim() != dim) {
            rep.valid = false;
            rep.exact = true;
            rep.message = "element " + e.first + " has a different dimension";
            return rep;
        }
    }

    const bool exact = dim == 1 &&
                       std::all_of(alpha.elements.begin(), alpha.elements.end(),
                                   [](const auto& e) { return detail::exact_interval(e.second); }) &&
                       (!alpha.domain || detail::exact_interval(*alpha.domain));
    if (exact) {
        rep.exact = true;
        std::vector<Rational> ends;
        for (const auto& e : alpha.elements) {
            detail::interval_endpoints(e.second, ends);
        }
        if (alpha.domain) {
            detail::interval_endpoints(*alpha.domain, ends);
        }
        std::sort(ends.begin(), ends.end());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
        std::vector<Rational> probes;
        if (ends.empty()) {
            probes.emplace_back(0);
        } else {
            probes.emplace_back(Rational(ceil_of(ends.front()) - 1));
            for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
                probes.push_back(detail::simplest_between(ends[i], ends[i + 1]));
            }
            probes.emplace_back(Rational(floor_of(ends.back()) + 1));
            probes.insert(probes.end(), ends.begin(), ends.end());
        }
        for (const Rational& p : probes) {
            const std::string msg = detail::probe(alpha, Point{RealValue(p)}, 0);
            if (!msg.empty()) {
                rep.valid = false;
                rep.witness = Point{RealValue(p)};
                rep.message = msg;
                return rep;
            }
        }
        rep.message = "exact check passed";
        return rep;
    }

    // Sampled check over the domain's bounding box when it has one, else
    // over [-2, 2]^m.
    std::vector<Rational> lo(dim, Rational(-2));
    std::vector<Rational> hi(dim, Rational(2));
    if (alpha.domain) {
        if (const auto* b = std::get_if<Box>(&(*alpha.domain)->node)) {
            for (std::size_t i = 0; i < dim; ++i) {
                if (b->lo[i].value) {
                    lo[i] = b->lo[i].value->enclose(32).lo;
                }
                if (b->hi[i].value) {
                    hi[i] = b->hi[i].value->enclose(32).hi;
                }
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(0, 1L << 20);
    std::size_t checked = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Point x;
        for (std::size_t i = 0; i < dim; ++i) {
            const Rational t = make_rational(Integer(dist(rng)), Integer(1L << 20));
            x.emplace_back(Rational(lo[i] + t * (hi[i] - lo[i])));
        }
        std::string msg;
        try {
            msg = detail::probe(alpha, x, 64);
        } catch (const PrecisionExhausted&) {
            continue;
        }
        ++checked;
        if (!msg.empty()) {
            rep.valid = false;
            rep.witness = x;
            rep.message = msg;
            return rep;
        }
    }
    rep.message = "sampled check passed at " + std::to_string(checked) + " points";
    return rep;
}

// ---------------------------------------------------------------------------
// Piecewise maps

struct PiecewiseMap {
    std::vector<std::pair<SetExpr, ClassicalMap>> cases;
    std::optional<SetExpr> domain;
    std::string name;

    std::size_t arity() const { return cases.empty() ? 0 : cases.front().second.arity; }

    bool algebraic() const {
        return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.second.algebraic(); });
    }

    /// Applies the first case whose region contains x.
    Point apply(const Point& x, std::size_t budget = precision_cap()) const {
        if (domain && !contains(*domain, x, budget)) {
            throw OutsideDomain("point " + to_string(x) + " outside the domain of " + name);
        }
        bool undecided = false;
        for (const auto& [region, map] : cases) {
            const auto t = detail::contains3(region, x, budget);
            if (t && *t) {
                return map.apply(x, budget);
            }
            undecided = undecided || !t;
        }
        if (undecided) {
            throw PrecisionExhausted("case of " + to_string(x) + " undecided in " + name);
        }
        throw OutsideDomain("no case of " + name + " contains " + to_string(x));
    }
};

inline bool structurally_equal(const PiecewiseMap& a, const PiecewiseMap& b) {
    if (a.cases.size() != b.cases.size() || a.domain.has_value() != b.domain.has_value()) {
        return false;
    }
    if (a.domain && !structurally_equal(*a.domain, *b.domain)) {
        return false;
    }
    for (std::size_t i = 0; i < a.cases.size(); ++i) {
        if (!structurally_equal(a.cases[i].first, b.cases[i].first) ||
            !structurally_equal(a.cases[i].second, b.cases[i].second)) {
            return false;
        }
    }
    return true;
}

inline bool structurally_equal(const Partition& a, const Partition& b) {
    if (a.elements.size() != b.elements.size() || a.domain.has_value() != b.domain.has_value()) {
        return false;
    }
    if (a.domain && !structurally_equal(*a.domain, *b.domain)) {
        return false;
    }
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        if (a.elements[i].first != b.elements[i].first ||
            !structurally_equal(a.elements[i].second, b.elements[i].second)) {
            return false;
        }
    }
    return true;
}

}  // namespace physcomp

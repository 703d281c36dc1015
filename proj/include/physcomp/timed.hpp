#pragma once

// Measurement time functions and timed systems.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "physcomp/program.hpp"

namespace physcomp {

/// A natural number or infinity.
struct ExtendedNat {
    Integer value = 0;
    bool infinite = false;

    static ExtendedNat infinity() { return {Integer(0), true}; }
    static ExtendedNat of(Integer v) { return {std::move(v), false}; }

    friend bool operator==(const ExtendedNat& a, const ExtendedNat& b) {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
};

inline std::string to_string(const ExtendedNat& n) { return n.infinite ? "inf" : n.value.get_str(); }

/// kappa = p(ceil(1 / d)) where d is the distance of the point to the
/// partition boundary and p has the given natural coefficients
/// (constant term first).
struct InversePolynomial {
    std::vector<Integer> coeffs;

    Integer eval(const Integer& n) const {
        Integer acc = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            acc = acc * n + *it;
        }
        return acc;
    }
};

/// kappa given directly by a function of the configuration.
struct ExplicitKappa {
    std::string name;
    std::function<ExtendedNat(const Configuration&)> fn;
};

/// kappa = ceil(1 / d) where d is the distance from the point to the
/// nearest of a fixed set of one-dimensional points.
struct DistanceFormula {
    std::vector<RealValue> points;

    ExtendedReal distance(const Point& x) const {
        check_dim(1, x.size(), "distance formula point");
        std::optional<RealValue> best;
        for (const RealValue& p : points) {
            const RealValue d = abs(x[0] - p);
            best = best ? min(*best, d) : d;
        }
        return best ? ExtendedReal::finite(*best) : ExtendedReal::infinity();
    }
};

struct KappaSpec {
    std::variant<InversePolynomial, ExplicitKappa, DistanceFormula> kind;

    static KappaSpec inverse_polynomial(std::vector<Integer> coeffs) {
        bool nonconstant = false;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] < 0) {
                throw InvalidParameter("negative coefficient in measurement time polynomial");
            }
            nonconstant = nonconstant || (i > 0 && coeffs[i] > 0);
        }
        if (!nonconstant) {
            throw InvalidParameter("measurement time polynomial must be strictly increasing");
        }
        return KappaSpec{InversePolynomial{std::move(coeffs)}};
    }
    static KappaSpec constant(Integer k) {
        return KappaSpec{ExplicitKappa{"constant " + k.get_str(), [k](const Configuration&) { return ExtendedNat::of(k); }}};
    }
};

namespace detail {

inline ExtendedReal kappa_distance(const KappaSpec& spec, const SystemPartition& alpha, const Point& x) {
    if (const auto* f = std::get_if<DistanceFormula>(&spec.kind)) {
        return f->distance(x);
    }
    const auto* p = std::get_if<Partition>(&alpha.kind);
    if (p == nullptr) {
        throw UnsupportedPartitionClass("tape partitions have no boundary distance");
    }
    return boundary_distance(*p, x);
}

inline const Point& point_of(const Configuration& c) {
    const auto* x = std::get_if<Point>(&c);
    if (x == nullptr) {
        throw UnsupportedPartitionClass("measurement time on a tape configuration");
    }
    return *x;
}

/// ceil(1/d) for d >= 0, infinity for d = 0.
inline ExtendedNat ceil_inverse(const ExtendedReal& d, std::size_t budget) {
    if (d.infinite) {
        return ExtendedNat::of(0);
    }
    if (const auto e = d.value.exact()) {
        if (*e == 0) {
            return ExtendedNat::infinity();
        }
        return ExtendedNat::of(ceil_of(Rational(1 / *e)));
    }
    for (std::size_t depth : depth_schedule(budget)) {
        const Interval iv = d.value.enclose(depth);
        if (iv.lo <= 0) {
            continue;
        }
        const Integer lo = ceil_of(Rational(1 / iv.hi));
        const Integer hi = ceil_of(Rational(1 / iv.lo));
        if (lo == hi) {
            return ExtendedNat::of(lo);
        }
    }
    throw PrecisionExhausted("measurement time undecided");
}

}  // namespace detail

/// Exact measurement time of partition alpha at configuration c.
inline ExtendedNat kappa_eval(const KappaSpec& spec, const SystemPartition& alpha, const Configuration& c,
                              std::size_t budget = precision_cap()) {
    if (const auto* e = std::get_if<ExplicitKappa>(&spec.kind)) {
        return e->fn(c);
    }
    const ExtendedNat n = detail::ceil_inverse(detail::kappa_distance(spec, alpha, detail::point_of(c)), budget);
    if (const auto* p = std::get_if<InversePolynomial>(&spec.kind)) {
        if (n.infinite) {
            return n;
        }
        return ExtendedNat::of(p->eval(n.value));
    }
    return n;
}

/// Whether the measurement finishes within `elapsed` steps, i.e.
/// kappa <= elapsed.  Decides by comparing the distance with a threshold,
/// so it never needs kappa itself to be pinned down.
inline bool completes_within(const KappaSpec& spec, const SystemPartition& alpha, const Configuration& c,
                             const Integer& elapsed, std::size_t budget = precision_cap()) {
    if (const auto* e = std::get_if<ExplicitKappa>(&spec.kind)) {
        const ExtendedNat k = e->fn(c);
        return !k.infinite && k.value <= elapsed;
    }
    // Largest n with p(n) <= elapsed; kappa <= elapsed iff ceil(1/d) <= n
    // iff d >= 1/n.
    Integer n_max;
    if (const auto* p = std::get_if<InversePolynomial>(&spec.kind)) {
        if (p->eval(Integer(0)) > elapsed) {
            return false;
        }
        Integer lo = 0;
        Integer hi = 1;
        while (p->eval(hi) <= elapsed) {
            hi *= 2;
        }
        while (hi - lo > 1) {
            const Integer mid = (lo + hi) / 2;
            if (p->eval(mid) <= elapsed) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        n_max = lo;
    } else {
        n_max = elapsed;
    }
    const ExtendedReal d = detail::kappa_distance(spec, alpha, detail::point_of(c));
    if (d.infinite) {
        return true;  // ceil(1/inf) = 0
    }
    if (n_max <= 0) {
        return false;
    }
    switch (cmp(d.value, RealValue(make_rational(Integer(1), n_max)), budget)) {
        case Ordering::Greater:
        case Ordering::Equal: return true;
        case Ordering::Less: return false;
        case Ordering::Undecided: break;
    }
    throw PrecisionExhausted("measurement completion undecided at elapsed " + elapsed.get_str());
}

/// A system with a measurement time for each partition.  Partitions with no
/// entry take one step.
struct TimedSystem {
    SystemDef base;
    std::vector<std::pair<std::string, KappaSpec>> kappas;

    const KappaSpec* kappa(const std::string& partition) const {
        for (const auto& [n, k] : kappas) {
            if (n == partition) {
                return &k;
            }
        }
        return nullptr;
    }

    KappaSpec kappa_or_unit(const std::string& partition) const {
        const KappaSpec* k = kappa(partition);
        return k != nullptr ? *k : KappaSpec::constant(Integer(1));
    }
};

}  // namespace physcomp

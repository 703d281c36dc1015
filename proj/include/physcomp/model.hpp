#pragma once

// A collection of named advice streams, systems and programs, plus the
// registry of callables that definitions refer to by name.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "physcomp/advice.hpp"
#include "physcomp/timed.hpp"

namespace physcomp {

struct AdviceDecl {
    enum class Kind { Literal, File, Extern };
    std::string name;
    Kind kind = Kind::Literal;
    std::string prefix;  // Literal
    std::string cycle;   // Literal, may be empty
    std::string ref;     // File path or extern name
    std::shared_ptr<const PrefixAdvice> value;

    friend bool operator==(const AdviceDecl& a, const AdviceDecl& b) {
        return a.name == b.name && a.kind == b.kind && a.prefix == b.prefix && a.cycle == b.cycle && a.ref == b.ref;
    }
};

struct SystemDecl {
    SystemDef def;
    bool timed = false;
    std::vector<std::pair<std::string, KappaSpec>> kappas;

    TimedSystem as_timed() const { return TimedSystem{def, kappas}; }
};

struct Model {
    std::vector<AdviceDecl> advice;
    std::vector<SystemDecl> systems;
    std::vector<Program> programs;

    const AdviceDecl* find_advice(const std::string& n) const {
        for (const auto& a : advice) {
            if (a.name == n) {
                return &a;
            }
        }
        return nullptr;
    }
    const SystemDecl* find_system(const std::string& n) const {
        for (const auto& s : systems) {
            if (s.def.name == n) {
                return &s;
            }
        }
        return nullptr;
    }
    const Program* find_program(const std::string& n) const {
        for (const auto& p : programs) {
            if (p.name == n) {
                return &p;
            }
        }
        return nullptr;
    }
};

/// Callables and streams that definitions name with extern("...").
struct Externals {
    std::map<std::string, PredicateSet::Fn> predicates;
    std::map<std::string, std::function<Configuration(const Configuration&)>> maps;
    std::map<std::string, LazyPtr> reals;
    std::map<std::string, std::function<ExtendedNat(const Configuration&)>> kappas;
    std::map<std::string, std::function<void(TapeConfig&)>> procedures;
    std::map<std::string, PrefixAdvice> advice;

    void merge(const Externals& o) {
        predicates.insert(o.predicates.begin(), o.predicates.end());
        maps.insert(o.maps.begin(), o.maps.end());
        reals.insert(o.reals.begin(), o.reals.end());
        kappas.insert(o.kappas.begin(), o.kappas.end());
        procedures.insert(o.procedures.begin(), o.procedures.end());
        advice.insert(o.advice.begin(), o.advice.end());
    }
};

/// Canonical source text of a real encoding a named advice stream.
inline std::string advice_real_origin(const std::string& advice_name, Encoding scheme) {
    return "advice(" + advice_name + ", " + (scheme == Encoding::Binary ? "binary" : "ternary") + ")";
}

inline RealValue advice_real(const std::string& advice_name, const PrefixAdvice& g, Encoding scheme) {
    return RealValue(LazyPtr(encode_advice_real(g, scheme, advice_real_origin(advice_name, scheme))));
}

// ---------------------------------------------------------------------------
// Structural equality

inline bool structurally_equal(const KappaSpec& a, const KappaSpec& b) {
    if (a.kind.index() != b.kind.index()) {
        return false;
    }
    if (const auto* x = std::get_if<InversePolynomial>(&a.kind)) {
        return x->coeffs == std::get<InversePolynomial>(b.kind).coeffs;
    }
    if (const auto* x = std::get_if<ExplicitKappa>(&a.kind)) {
        return x->name == std::get<ExplicitKappa>(b.kind).name;
    }
    const auto& x = std::get<DistanceFormula>(a.kind).points;
    const auto& y = std::get<DistanceFormula>(b.kind).points;
    if (x.size() != y.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!structurally_equal(x[i], y[i])) {
            return false;
        }
    }
    return true;
}

inline bool structurally_equal(const SystemPartition& a, const SystemPartition& b) {
    if (a.name != b.name || a.kind.index() != b.kind.index()) {
        return false;
    }
    if (const auto* p = std::get_if<Partition>(&a.kind)) {
        return structurally_equal(*p, std::get<Partition>(b.kind));
    }
    return std::get<TapeReadPartition>(a.kind).alphabet == std::get<TapeReadPartition>(b.kind).alphabet;
}

inline bool structurally_equal(const SystemTransformation& a, const SystemTransformation& b) {
    if (a.name != b.name || a.kind.index() != b.kind.index()) {
        return false;
    }
    if (const auto* m = std::get_if<ClassicalMap>(&a.kind)) {
        return structurally_equal(*m, std::get<ClassicalMap>(b.kind));
    }
    if (const auto* m = std::get_if<PiecewiseMap>(&a.kind)) {
        return structurally_equal(*m, std::get<PiecewiseMap>(b.kind));
    }
    if (const auto* op = std::get_if<TapeOp>(&a.kind)) {
        return *op == std::get<TapeOp>(b.kind);
    }
    return std::get<OpaqueMap>(a.kind).ref == std::get<OpaqueMap>(b.kind).ref;
}

inline bool structurally_equal(const SystemDecl& a, const SystemDecl& b) {
    const SystemDef& x = a.def;
    const SystemDef& y = b.def;
    if (a.timed != b.timed || x.name != y.name || x.space.index() != y.space.index() ||
        x.partitions.size() != y.partitions.size() || x.transformations.size() != y.transformations.size() ||
        a.kappas.size() != b.kappas.size() || x.initial.index() != y.initial.index()) {
        return false;
    }
    if (const auto* s = std::get_if<SetExpr>(&x.space)) {
        if (!structurally_equal(*s, std::get<SetExpr>(y.space))) {
            return false;
        }
    } else if (std::get<TapeSpace>(x.space).alphabet != std::get<TapeSpace>(y.space).alphabet) {
        return false;
    }
    for (std::size_t i = 0; i < x.partitions.size(); ++i) {
        if (!structurally_equal(x.partitions[i], y.partitions[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < x.transformations.size(); ++i) {
        if (!structurally_equal(x.transformations[i], y.transformations[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.kappas.size(); ++i) {
        if (a.kappas[i].first != b.kappas[i].first || !structurally_equal(a.kappas[i].second, b.kappas[i].second)) {
            return false;
        }
    }
    if (const auto* p = std::get_if<Point>(&x.initial)) {
        const auto& q = std::get<Point>(y.initial);
        if (p->size() != q.size()) {
            return false;
        }
        for (std::size_t i = 0; i < p->size(); ++i) {
            if (!structurally_equal((*p)[i], q[i])) {
                return false;
            }
        }
        return true;
    }
    return std::get<TapeConfig>(x.initial) == std::get<TapeConfig>(y.initial);
}

inline bool structurally_equal(const Program& a, const Program& b) {
    if (a.name != b.name || a.alphabet != b.alphabet || a.initial != b.initial || a.accept != b.accept ||
        a.reject != b.reject || a.system != b.system || a.rules != b.rules ||
        a.procedures.size() != b.procedures.size()) {
        return false;
    }
    for (const auto& [n, p] : a.procedures) {
        const auto it = b.procedures.find(n);
        if (it == b.procedures.end() || it->second.ref != p.ref) {
            return false;
        }
    }
    return true;
}

inline bool structurally_equal(const Model& a, const Model& b) {
    if (a.advice != b.advice || a.systems.size() != b.systems.size() || a.programs.size() != b.programs.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.systems.size(); ++i) {
        if (!structurally_equal(a.systems[i], b.systems[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.programs.size(); ++i) {
        if (!structurally_equal(a.programs[i], b.programs[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace physcomp

#pragma once

// Computation systems (X, partitions, transformations, x0) and the rule
// programs that drive a device over them.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "physcomp/classical.hpp"
#include "physcomp/tape.hpp"

namespace physcomp {

/// A point of R^m, or a tape when the configuration space is itself a tape.
using Configuration = std::variant<Point, TapeConfig>;

inline std::string to_string(const Configuration& c) {
    if (const auto* p = std::get_if<Point>(&c)) {
        return to_string(*p);
    }
    return std::get<TapeConfig>(c).content();
}

inline std::string symbol_label(Symbol s) { return std::string(1, s); }

/// The tape-read partition: one element per tape symbol, blank included.
struct TapeReadPartition {
    std::string alphabet;

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (Symbol s : alphabet) {
            out.push_back(symbol_label(s));
        }
        out.push_back(symbol_label(kBlank));
        return out;
    }
};

struct TapeSpace {
    std::string alphabet;
};

struct SystemPartition {
    std::string name;
    std::variant<Partition, TapeReadPartition> kind;

    std::vector<std::string> labels() const {
        if (const auto* p = std::get_if<Partition>(&kind)) {
            return p->labels();
        }
        return std::get<TapeReadPartition>(kind).labels();
    }

    bool has_label(const std::string& l) const {
        const auto ls = labels();
        return std::find(ls.begin(), ls.end(), l) != ls.end();
    }

    bool is_classical() const {
        if (const auto* p = std::get_if<Partition>(&kind)) {
            return p->is_classical();
        }
        return true;
    }

    std::string classify(const Configuration& c, std::size_t budget = precision_cap()) const {
        if (const auto* p = std::get_if<Partition>(&kind)) {
            const auto* x = std::get_if<Point>(&c);
            if (x == nullptr) {
                throw DimensionMismatch("partition " + name + " measures points, not tapes");
            }
            return p->classify(*x, budget);
        }
        const auto* t = std::get_if<TapeConfig>(&c);
        if (t == nullptr) {
            throw DimensionMismatch("partition " + name + " reads a tape, not a point");
        }
        return symbol_label(t->read());
    }
};

/// A transformation given only as a callable.  Not classically constructable.
struct OpaqueMap {
    std::string ref;  // external name the callable is registered under
    std::function<Configuration(const Configuration&)> fn;
};

struct SystemTransformation {
    std::string name;
    std::variant<ClassicalMap, PiecewiseMap, TapeOp, OpaqueMap> kind;

    bool is_classical() const {
        return std::holds_alternative<ClassicalMap>(kind) || std::holds_alternative<PiecewiseMap>(kind) ||
               std::holds_alternative<TapeOp>(kind);
    }

    bool algebraic() const {
        if (const auto* m = std::get_if<ClassicalMap>(&kind)) {
            return m->algebraic();
        }
        if (const auto* m = std::get_if<PiecewiseMap>(&kind)) {
            return m->algebraic();
        }
        return std::holds_alternative<TapeOp>(kind);
    }

    Configuration apply(const Configuration& c, std::size_t budget = precision_cap()) const {
        if (const auto* op = std::get_if<TapeOp>(&kind)) {
            const auto* t = std::get_if<TapeConfig>(&c);
            if (t == nullptr) {
                throw DimensionMismatch("tape transformation " + name + " applied to a point");
            }
            return apply_tape_op(*op, *t);
        }
        if (const auto* o = std::get_if<OpaqueMap>(&kind)) {
            return o->fn(c);
        }
        const auto* x = std::get_if<Point>(&c);
        if (x == nullptr) {
            throw DimensionMismatch("transformation " + name + " applied to a tape");
        }
        if (const auto* m = std::get_if<ClassicalMap>(&kind)) {
            return m->apply(*x, budget);
        }
        return std::get<PiecewiseMap>(kind).apply(*x, budget);
    }
};

struct SystemDef {
    std::string name;
    std::variant<SetExpr, TapeSpace> space;
    std::vector<SystemPartition> partitions;
    std::vector<SystemTransformation> transformations;
    Configuration initial;

    const SystemPartition* partition(const std::string& n) const {
        for (const auto& p : partitions) {
            if (p.name == n) {
                return &p;
            }
        }
        return nullptr;
    }

    const SystemTransformation* transformation(const std::string& n) const {
        for (const auto& t : transformations) {
            if (t.name == n) {
                return &t;
            }
        }
        return nullptr;
    }

    /// Classically measurable partitions and classically constructable maps.
    bool is_classical() const {
        return std::all_of(partitions.begin(), partitions.end(), [](const auto& p) { return p.is_classical(); }) &&
               std::all_of(transformations.begin(), transformations.end(),
                           [](const auto& t) { return t.is_classical(); });
    }

    /// Rational-or-algebraic start point and map coefficients.
    bool algebraically_acting() const {
        if (const auto* x = std::get_if<Point>(&initial)) {
            for (const auto& v : *x) {
                if (!v.algebraic()) {
                    return false;
                }
            }
        }
        return std::all_of(transformations.begin(), transformations.end(),
                           [](const auto& t) { return t.algebraic(); });
    }
};

/// Structural problems with a system: start point outside X, invalid
/// partitions, clashing names.
inline std::vector<std::string> check_system(const SystemDef& c, std::size_t samples = 200) {
    std::vector<std::string> issues;
    std::set<std::string> names;
    for (const auto& p : c.partitions) {
        if (p.name == "tape") {
            issues.push_back("partition name 'tape' is reserved");
        }
        if (!names.insert(p.name).second) {
            issues.push_back("duplicate name " + p.name);
        }
        if (const auto* part = std::get_if<Partition>(&p.kind)) {
            const auto rep = validate_partition(*part, samples);
            if (!rep.valid) {
                issues.push_back("partition " + p.name + ": " + rep.message);
            }
        }
    }
    for (const auto& t : c.transformations) {
        if (!names.insert(t.name).second) {
            issues.push_back("duplicate name " + t.name);
        }
    }
    if (const auto* x = std::get_if<Point>(&c.initial)) {
        const auto* s = std::get_if<SetExpr>(&c.space);
        if (s == nullptr) {
            issues.push_back("point start in a tape space");
        } else {
            try {
                if (!contains(*s, *x)) {
                    issues.push_back("start point outside the configuration space");
                }
            } catch (const Error& e) {
                issues.push_back(std::string("start point: ") + e.what());
            }
        }
    } else if (!std::holds_alternative<TapeSpace>(c.space)) {
        issues.push_back("tape start in a point space");
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Programs

inline const std::string kTapePartition = "tape";

struct Action {
    enum class Kind { Tape, Named, Call };
    Kind kind = Kind::Tape;
    TapeOp op;
    std::string id;

    static Action tape(TapeOp o) { return {Kind::Tape, o, {}}; }
    /// A system transformation, or (time-aware programs) a partition to
    /// start measuring.
    static Action named(std::string n) { return {Kind::Named, TapeOp::identity(), std::move(n)}; }
    static Action call(std::string n) { return {Kind::Call, TapeOp::identity(), std::move(n)}; }

    friend bool operator==(const Action& a, const Action& b) {
        if (a.kind != b.kind) {
            return false;
        }
        return a.kind == Kind::Tape ? a.op == b.op : a.id == b.id;
    }
};

inline std::string to_string(const Action& a) {
    switch (a.kind) {
        case Action::Kind::Tape: return to_string(a.op);
        case Action::Kind::Named: return a.id;
        case Action::Kind::Call: return "call " + a.id;
    }
    return "?";
}

/// (from, partition, element, to, action).  A missing element is the
/// empty label used while a measurement is still running.
struct Rule {
    std::string from;
    std::string partition;
    std::optional<std::string> element;
    std::string to;
    Action action;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.from == b.from && a.partition == b.partition && a.element == b.element && a.to == b.to &&
               a.action == b.action;
    }
};

/// Opaque subroutine acting on the program tape in one step.
struct TapeProcedure {
    std::string ref;
    std::function<void(TapeConfig&)> fn;
};

struct Program {
    std::string name;
    std::string alphabet = "01";
    std::string initial = "s0";
    std::string accept = "accept";
    std::string reject = "reject";
    std::vector<Rule> rules;
    std::map<std::string, TapeProcedure> procedures;
    std::string system;  // name of the system the program is written for

    std::vector<std::string> states() const {
        std::vector<std::string> out{initial, accept, reject};
        for (const Rule& r : rules) {
            for (const std::string* s : {&r.from, &r.to}) {
                if (std::find(out.begin(), out.end(), *s) == out.end()) {
                    out.push_back(*s);
                }
            }
        }
        return out;
    }

    bool measures() const {
        return std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.partition != kTapePartition; });
    }
};

struct Violation {
    std::size_t rule = 0;
    std::string kind;
    std::string message;
};

/// Checks determinism and that every rule refers to known parts of the
/// system.  `time_aware` admits empty-label rules and measurement actions.
inline std::vector<Violation> validate_program(const Program& q, const SystemDef& c, bool time_aware = false) {
    std::vector<Violation> out;
    std::map<std::string, std::pair<std::size_t, std::string>> partition_of;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> outcome_of;
    const std::string tape_alpha = q.alphabet + kBlank;

    for (std::size_t i = 0; i < q.rules.size(); ++i) {
        const Rule& r = q.rules[i];
        auto add = [&](std::string kind, std::string msg) { out.push_back({i, std::move(kind), std::move(msg)}); };

        if (r.from == q.accept || r.from == q.reject) {
            add("halting-state", "rule leaves halting state " + r.from);
        }

        const auto [it, fresh] = partition_of.emplace(r.from, std::make_pair(i, r.partition));
        if (!fresh && it->second.second != r.partition) {
            add("partition-conflict", "same state, different partitions: " + r.from + " uses " +
                                          it->second.second + " and " + r.partition);
        }

        if (r.partition == kTapePartition) {
            if (!r.element) {
                add("empty-on-tape", "empty label on the tape partition");
            } else if (r.element->size() != 1 || tape_alpha.find((*r.element)[0]) == std::string::npos) {
                add("unknown-element", "tape element '" + *r.element + "' not in alphabet");
            }
        } else {
            const SystemPartition* p = c.partition(r.partition);
            if (p == nullptr) {
                add("unknown-partition", "unknown partition " + r.partition);
            } else if (r.element && !p->has_label(*r.element)) {
                add("unknown-element", "partition " + r.partition + " has no element " + *r.element);
            }
            if (!r.element && !time_aware) {
                add("empty-untimed", "empty label outside time-aware semantics");
            }
        }

        const std::string elem = r.element ? *r.element : std::string("\x01EMPTY");
        const auto key = std::make_tuple(r.from, r.partition, elem);
        const auto [jt, new_key] = outcome_of.emplace(key, i);
        if (!new_key) {
            const Rule& prev = q.rules[jt->second];
            if (prev.to != r.to || !(prev.action == r.action)) {
                add("conflicting-outcomes", "conflicting outcomes for (" + r.from + ", " + r.partition + ", " +
                                                (r.element ? *r.element : "EMPTY") + ")");
            }
        }

        switch (r.action.kind) {
            case Action::Kind::Tape:
                if (r.action.op.kind == TapeOp::Kind::Write &&
                    tape_alpha.find(r.action.op.symbol) == std::string::npos) {
                    add("unknown-action", std::string("write of '") + r.action.op.symbol + "' outside alphabet");
                }
                break;
            case Action::Kind::Call:
                if (q.procedures.find(r.action.id) == q.procedures.end()) {
                    add("unknown-action", "unknown procedure " + r.action.id);
                }
                break;
            case Action::Kind::Named:
                if (c.transformation(r.action.id) != nullptr) {
                    break;
                }
                if (c.partition(r.action.id) != nullptr) {
                    if (!time_aware) {
                        add("measure-untimed", "measurement action " + r.action.id + " outside time-aware semantics");
                    }
                    break;
                }
                add("unknown-action", "unknown transformation " + r.action.id);
                break;
        }
    }
    return out;
}

}  // namespace physcomp

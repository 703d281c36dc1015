#pragma once

// Device interpreter: untimed runs and time-aware runs with pending
// measurements.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "physcomp/timed.hpp"

namespace physcomp {

enum class Outcome { Accept, Reject, OutOfSteps };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Accept: return "Accept";
        case Outcome::Reject: return "Reject";
        case Outcome::OutOfSteps: return "OutOfSteps";
    }
    return "?";
}

struct TraceEvent {
    std::size_t step = 0;  // 0 for the implicit move to the rejecting state
    std::string from;
    std::string to;
    std::string partition;
    std::string element;  // "EMPTY" for the empty label, "" when no rule applied
    std::string action_kind;  // tape | transform | measure | call | none
    std::string action_id;
    std::string tape_window;
    std::string point;
    std::string point_exact;
    // time-aware runs only
    std::string pending_partition;
    std::optional<std::size_t> elapsed;
    std::string duration;
    std::string completed_output;

    friend bool operator==(const TraceEvent& a, const TraceEvent& b) {
        return a.step == b.step && a.from == b.from && a.to == b.to && a.partition == b.partition &&
               a.element == b.element && a.action_kind == b.action_kind && a.action_id == b.action_id &&
               a.tape_window == b.tape_window && a.point == b.point && a.point_exact == b.point_exact;
    }
};

inline nlohmann::json to_json(const TraceEvent& e, bool timed) {
    nlohmann::json j{{"step", e.step},           {"from", e.from},
                     {"state", e.to},            {"partition", e.partition},
                     {"element", e.element},     {"action_kind", e.action_kind},
                     {"action_id", e.action_id}, {"tape_window", e.tape_window},
                     {"point", e.point},         {"point_exact", e.point_exact}};
    if (timed) {
        j["pending_partition"] = e.pending_partition;
        j["elapsed"] = e.elapsed ? nlohmann::json(*e.elapsed) : nlohmann::json(nullptr);
        j["duration"] = e.duration;
        j["completed_output"] = e.completed_output;
    }
    return j;
}

/// One commenced measurement, as it played out.
struct MeasurementRecord {
    std::string partition;
    std::size_t commenced_at = 0;
    std::string duration;
    std::optional<std::string> output;  // set once the output was read
    std::optional<std::size_t> cancelled_at;
};

struct RunResult {
    Outcome outcome = Outcome::Reject;
    std::size_t rule_applications = 0;
    std::vector<TraceEvent> trace;
    TapeConfig tape;
    Configuration final_config;
    std::string final_state;
    std::vector<MeasurementRecord> measurements;
};

inline void write_trace(std::ostream& os, const RunResult& r, bool timed) {
    for (const auto& e : r.trace) {
        os << to_json(e, timed).dump() << '\n';
    }
}

struct RunOptions {
    std::size_t step_limit = 1000000;
    std::size_t budget = 0;  // 0: the global precision cap
    bool record_trace = true;
};

namespace detail {

struct Pending {
    std::string partition;
    std::size_t commenced_at = 0;  // index of the commencing application
    KappaSpec kappa;
    std::size_t record = 0;  // index into RunResult::measurements
};

struct Recorded {
    std::string partition;
    std::string label;
};

inline std::string point_decimal(const Configuration& c) {
    if (const auto* p = std::get_if<Point>(&c)) {
        std::string out = "(";
        for (std::size_t i = 0; i < p->size(); ++i) {
            out += (i > 0 ? ", " : "") + to_decimal_interval((*p)[i]);
        }
        return out + ")";
    }
    return std::get<TapeConfig>(c).window();
}

inline std::string point_exact(const Configuration& c) {
    if (const auto* p = std::get_if<Point>(&c)) {
        for (const auto& v : *p) {
            if (!v.exact()) {
                return {};
            }
        }
        std::string out = "(";
        for (std::size_t i = 0; i < p->size(); ++i) {
            out += (i > 0 ? ", " : "") + to_string(*(*p)[i].exact());
        }
        return out + ")";
    }
    return std::get<TapeConfig>(c).content();
}

inline RunResult execute(const Program& q, const SystemDef& c, const TimedSystem* timed, const std::string& w,
                         const RunOptions& opt) {
    const std::size_t budget = opt.budget == 0 ? precision_cap() : opt.budget;
    std::map<std::string, std::vector<const Rule*>> by_state;
    for (const Rule& r : q.rules) {
        by_state[r.from].push_back(&r);
    }

    RunResult res;
    res.tape = encode_input(w, q.alphabet);
    res.final_config = c.initial;
    std::string state = q.initial;
    std::optional<Pending> pending;
    std::optional<Recorded> recorded;
    std::size_t steps = 0;

    auto cancel = [&](std::size_t at) {
        if (pending) {
            res.measurements[pending->record].cancelled_at = at;
        }
        pending.reset();
        recorded.reset();
    };

    while (true) {
        if (state == q.accept) {
            res.outcome = Outcome::Accept;
            break;
        }
        if (state == q.reject) {
            res.outcome = Outcome::Reject;
            break;
        }
        if (steps >= opt.step_limit) {
            res.outcome = Outcome::OutOfSteps;
            break;
        }

        TraceEvent ev;
        ev.from = state;
        const auto it = by_state.find(state);
        const Rule* chosen = nullptr;
        std::optional<std::string> label;  // nullopt: the empty label
        bool measurable = true;
        if (it != by_state.end()) {
            const std::string& part = it->second.front()->partition;
            ev.partition = part;
            const std::size_t n = steps + 1;  // index of the application about to happen
            if (part == kTapePartition) {
                label = symbol_label(res.tape.read());
            } else if (timed == nullptr) {
                const SystemPartition* p = c.partition(part);
                if (p == nullptr) {
                    throw InvalidParameter("unknown partition " + part);
                }
                label = p->classify(res.final_config, budget);
            } else if (pending && pending->partition == part) {
                const SystemPartition* p = c.partition(part);
                const Integer elapsed(static_cast<unsigned long>(n - pending->commenced_at));
                if (completes_within(pending->kappa, *p, res.final_config, elapsed, budget)) {
                    label = p->classify(res.final_config, budget);
                    res.measurements[pending->record].output = label;
                    recorded = Recorded{part, *label};
                    pending.reset();
                } else {
                    label.reset();
                }
            } else if (recorded && recorded->partition == part) {
                label = recorded->label;
            } else {
                measurable = false;
            }
            if (measurable) {
                for (const Rule* r : it->second) {
                    if (r->element == label) {
                        chosen = r;
                        break;
                    }
                }
            }
            ev.element = label ? *label : std::string("EMPTY");
            if (!measurable) {
                ev.element.clear();
            }
        }

        if (chosen == nullptr) {
            state = q.reject;
            ev.to = state;
            ev.action_kind = "none";
            if (opt.record_trace) {
                ev.tape_window = res.tape.window();
                res.trace.push_back(std::move(ev));
            }
            continue;
        }

        ++steps;
        ev.step = steps;
        const Action& a = chosen->action;
        ev.action_id = a.kind == Action::Kind::Tape ? to_string(a.op) : a.id;
        switch (a.kind) {
            case Action::Kind::Tape:
                ev.action_kind = "tape";
                res.tape = apply_tape_op(a.op, std::move(res.tape));
                break;
            case Action::Kind::Call: {
                ev.action_kind = "call";
                const auto pr = q.procedures.find(a.id);
                if (pr == q.procedures.end()) {
                    throw InvalidParameter("unknown procedure " + a.id);
                }
                pr->second.fn(res.tape);
                break;
            }
            case Action::Kind::Named: {
                if (const SystemTransformation* t = c.transformation(a.id)) {
                    ev.action_kind = "transform";
                    cancel(steps);
                    res.final_config = t->apply(res.final_config, budget);
                    break;
                }
                const SystemPartition* p = c.partition(a.id);
                if (p == nullptr) {
                    throw InvalidParameter("unknown action " + a.id);
                }
                if (timed == nullptr) {
                    throw InvalidParameter("measurement action " + a.id + " in an untimed run");
                }
                ev.action_kind = "measure";
                cancel(steps);
                MeasurementRecord rec;
                rec.partition = a.id;
                rec.commenced_at = steps;
                const KappaSpec k = timed->kappa_or_unit(a.id);
                try {
                    rec.duration = to_string(kappa_eval(k, *p, res.final_config, std::min<std::size_t>(budget, 256)));
                } catch (const PrecisionExhausted&) {
                    rec.duration = "?";
                }
                res.measurements.push_back(rec);
                pending = Pending{a.id, steps, k, res.measurements.size() - 1};
                break;
            }
        }
        state = chosen->to;
        ev.to = state;
        if (opt.record_trace) {
            ev.tape_window = res.tape.window();
            ev.point = point_decimal(res.final_config);
            ev.point_exact = point_exact(res.final_config);
            if (timed != nullptr) {
                if (pending) {
                    ev.pending_partition = pending->partition;
                    ev.elapsed = steps - pending->commenced_at + 1;
                    ev.duration = res.measurements[pending->record].duration;
                }
                if (recorded) {
                    ev.completed_output = recorded->label;
                }
            }
            res.trace.push_back(std::move(ev));
        }
    }
    res.rule_applications = steps;
    res.final_state = state;
    return res;
}

}  // namespace detail

/// Untimed semantics: measuring is instantaneous and every application
/// costs one step.
inline RunResult run(const Program& q, const SystemDef& c, const std::string& w, RunOptions opt = {}) {
    return detail::execute(q, c, nullptr, w, opt);
}

inline RunResult run(const Program& q, const SystemDef& c, const std::string& w, std::size_t step_limit) {
    RunOptions opt;
    opt.step_limit = step_limit;
    return run(q, c, w, opt);
}

/// Time-aware semantics: measurements are commenced by actions and their
/// outputs become readable once the measurement time has elapsed.
inline RunResult timed_run(const Program& q, const TimedSystem& tc, const std::string& w, RunOptions opt = {}) {
    return detail::execute(q, tc.base, &tc, w, opt);
}

inline RunResult timed_run(const Program& q, const TimedSystem& tc, const std::string& w, std::size_t step_limit) {
    RunOptions opt;
    opt.step_limit = step_limit;
    return timed_run(q, tc, w, opt);
}

}  // namespace physcomp

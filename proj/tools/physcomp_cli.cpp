// physcomp: validate, run and render device descriptions; run gallery items.
//
// Exit codes
//   validate  0 valid, 1 violations found, 3 unreadable or unparsable input
//   run       0 accept, 1 reject, 2 out of steps, 3 unreadable or unparsable
//             input, 4 error during the run (including an input word outside
//             the program's alphabet)

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "physcomp/physcomp.hpp"

namespace {

using namespace physcomp;

constexpr int kInvalid = 1;
constexpr int kInputError = 3;
constexpr int kRunError = 4;

struct Loaded {
    Model model;
    bool ok = false;
};

Loaded load(const std::string& path, const Externals& ext) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << path << ": cannot read\n";
        return {};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    dsl::ParseResult res = dsl::parse(ss.str(), ext);
    for (const auto& d : res.diagnostics) {
        std::cerr << path << ":" << dsl::to_string(d) << "\n";
    }
    return {std::move(res.model), res.ok()};
}

int outcome_code(Outcome o) {
    switch (o) {
        case Outcome::Accept: return 0;
        case Outcome::Reject: return 1;
        case Outcome::OutOfSteps: return 2;
    }
    return kRunError;
}

struct RunArgs {
    std::string input;
    std::size_t steps = 1000000;
    std::string trace;  // "" none, "-" stdout
    bool timed = false;
    bool untimed = false;
};

int run_program(const Program& q, const SystemDecl& sys, const RunArgs& args) {
    RunOptions opt;
    opt.step_limit = args.steps;
    opt.record_trace = !args.trace.empty();
    const bool timed = (sys.timed || args.timed) && !args.untimed;
    RunResult r;
    try {
        r = timed ? timed_run(q, sys.as_timed(), args.input, opt) : run(q, sys.def, args.input, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
    if (args.trace == "-") {
        write_trace(std::cout, r, timed);
    } else if (!args.trace.empty()) {
        std::ofstream out(args.trace);
        if (!out) {
            std::cerr << args.trace << ": cannot write\n";
            return kInputError;
        }
        write_trace(out, r, timed);
    }
    std::cout << "outcome: " << to_string(r.outcome) << "\n"
              << "applications: " << r.rule_applications << "\n"
              << "state: " << r.final_state << "\n"
              << "tape: " << r.tape.content() << "\n"
              << "configuration: " << to_string(r.final_config) << "\n";
    return outcome_code(r.outcome);
}

int validate_model(const Model& m, std::size_t samples) {
    std::size_t issues = 0;
    for (const auto& s : m.systems) {
        for (const std::string& msg : check_system(s.def, samples)) {
            std::cout << "system " << s.def.name << ": " << msg << "\n";
            ++issues;
        }
    }
    for (const auto& q : m.programs) {
        const SystemDecl* s = m.find_system(q.system);
        if (s == nullptr) {
            std::cout << "program " << q.name << ": no system to check against\n";
            ++issues;
            continue;
        }
        for (const auto& v : validate_program(q, s->def, s->timed)) {
            std::cout << "program " << q.name << ": rule " << v.rule << ": " << v.kind << ": " << v.message << "\n";
            ++issues;
        }
    }
    if (issues == 0) {
        std::cout << "valid\n";
        return 0;
    }
    return kInvalid;
}

const Program* pick_program(const Model& m, const std::string& name) {
    if (name.empty()) {
        return m.programs.empty() ? nullptr : &m.programs.front();
    }
    return m.find_program(name);
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kv) {
    std::map<std::string, std::string> out;
    for (const auto& s : kv) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw InvalidParameter("expected key=value, got " + s);
        }
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physical-computation devices: validate, run and render"};
    app.require_subcommand(1);
    std::size_t precision = precision_cap();
    app.add_option("--precision-cap,--precision", precision, "Refinement depth cap for real comparisons")
        ->check(CLI::PositiveNumber);

    std::string file;
    std::size_t samples = 200;
    auto* validate = app.add_subcommand("validate", "Check systems and programs in a description file");
    validate->add_option("file", file, "Description file")->required();
    validate->add_option("--samples", samples, "Random samples per partition check");

    RunArgs run_args;
    std::string program_name;
    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--input,-i", run_args.input, "Input word");
        sub->add_option("--step-limit,--steps", run_args.steps, "Rule application limit");
        sub->add_option("--trace", run_args.trace, "Write a JSON-lines trace to a file, or - for stdout");
        auto* timed = sub->add_flag("--timed", run_args.timed, "Time-aware run (default for timed systems)");
        sub->add_flag("--untimed", run_args.untimed, "Ignore measurement times")->excludes(timed);
        sub->add_option("--precision-cap", precision, "Refinement depth cap for real comparisons")
            ->check(CLI::PositiveNumber);
    };
    auto* run_cmd = app.add_subcommand("run", "Run a program from a description file");
    run_cmd->add_option("file", file, "Description file")->required();
    std::string system_name;
    run_cmd->add_option("--program,-p", program_name, "Program to run (default: the first)");
    run_cmd->add_option("--system,-s", system_name, "System to run on (default: the program's own)");
    add_run_options(run_cmd);

    auto* render_cmd = app.add_subcommand("render", "Parse a description file and print it in canonical form");
    render_cmd->add_option("file", file, "Description file")->required();

    auto* gallery_cmd = app.add_subcommand("gallery", "Built-in systems and programs");
    gallery_cmd->require_subcommand(1);
    auto* list_cmd = gallery_cmd->add_subcommand("list", "List gallery items and their parameters");
    std::string item_id;
    std::vector<std::string> params;
    auto* show_cmd = gallery_cmd->add_subcommand("show", "Print an item as description text");
    show_cmd->add_option("id", item_id)->required();
    show_cmd->add_option("params", params, "key=value parameters");
    auto* grun_cmd = gallery_cmd->add_subcommand("run", "Run an item");
    grun_cmd->add_option("id", item_id)->required();
    grun_cmd->add_option("params", params, "key=value parameters");
    add_run_options(grun_cmd);

    CLI11_PARSE(app, argc, argv);
    set_precision_cap(precision);

    const Externals ext = gallery::standard_externals();

    if (validate->parsed()) {
        Loaded l = load(file, ext);
        if (!l.ok) {
            return kInputError;
        }
        return validate_model(l.model, samples);
    }
    if (run_cmd->parsed()) {
        Loaded l = load(file, ext);
        if (!l.ok) {
            return kInputError;
        }
        const Program* q = pick_program(l.model, program_name);
        if (q == nullptr) {
            std::cerr << file << ": no program " << program_name << "\n";
            return kInputError;
        }
        const SystemDecl* s = l.model.find_system(system_name.empty() ? q->system : system_name);
        if (s == nullptr) {
            std::cerr << file << ": no system " << (system_name.empty() ? q->system : system_name) << "\n";
            return kInputError;
        }
        return run_program(*q, *s, run_args);
    }
    if (render_cmd->parsed()) {
        Loaded l = load(file, ext);
        if (!l.ok) {
            return kInputError;
        }
        try {
            std::cout << dsl::render(l.model);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kRunError;
        }
        return 0;
    }
    if (list_cmd->parsed()) {
        for (const auto& e : gallery::catalog()) {
            std::cout << e.id << "  " << e.params << "\n    " << e.summary << "\n";
        }
        return 0;
    }
    gallery::Item item;
    try {
        item = gallery::build(item_id, parse_params(params));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    if (show_cmd->parsed()) {
        std::cout << dsl::render(item.model);
        return 0;
    }
    return run_program(item.program(), item.system(), run_args);
}

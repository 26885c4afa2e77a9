#include "vfva/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    using vfva::cli::Format;
    vfva::cli::RunConfig cfg;
    std::string format = "text";

    CLI::App app{"Exact formal calculus and finite vertex-structure checker"};
    app.require_subcommand(1);
    app.add_option("--window", cfg.window, "Coefficient window N (default: completeness bound)");
    app.add_option("--m-max", cfg.m_max, "Pole-clearing search bound (default: completeness bound)");
    app.add_option("--seed", cfg.seed, "Seed recorded in reports and used by randomized replays");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "machine"}));
    app.add_option("--out", cfg.out, "Write the report to PATH instead of stdout");
    app.add_flag("--timings", cfg.timings, "Record wall-clock durations (reports stop being reproducible)");

    auto* prove = app.add_subcommand("prove-deltas", "Prove the two- and three-term delta identities");
    auto* replay = app.add_subcommand("replay-elem", "Replay the (A)-(G) implications on random instances");
    replay->add_option("--n", cfg.count, "Number of instances")->check(CLI::PositiveNumber);
    auto* check = app.add_subcommand("check", "Check vertex-structure axioms");
    check->add_option("structure", cfg.inputs, "Structure file")->required()->expected(1);
    check->add_option("--axiom", cfg.axioms, "Axiom id (repeatable; default all)");
    auto* check_module = app.add_subcommand("check-module", "Check module axioms");
    check_module->add_option("module", cfg.inputs, "Module file")->required()->expected(1);
    check_module->add_option("--axiom", cfg.axioms, "Module axiom id (repeatable; default all)");
    auto* matrix = app.add_subcommand("implication-matrix", "Replay the axiom implications on a corpus");
    matrix->add_option("corpus", cfg.inputs, "Corpus directory")->required()->expected(1);
    auto* main_theorem = app.add_subcommand("main-theorem", "Compare weak properties with the module Jacobi identity");
    main_theorem->add_option("corpus", cfg.inputs, "Corpus directory")->required()->expected(1);
    auto* examples = app.add_subcommand("examples", "Built-in examples");
    auto* emit = examples->add_subcommand("emit", "Write the built-in corpus to a directory");
    emit->add_option("dir", cfg.inputs, "Output directory")->required()->expected(1);
    examples->require_subcommand(1);
    auto* suite = app.add_subcommand("suite", "Run the full built-in suite");
    for (auto* sub : {prove, replay, check, check_module, matrix, main_theorem, examples, emit, suite}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : vfva::cli::exit_code::config;
    }

    for (auto* sub : {prove, replay, check, check_module, matrix, main_theorem, suite}) {
        if (*sub) {
            cfg.command = sub->get_name();
        }
    }
    if (*emit) {
        cfg.command = "examples-emit";
    }
    cfg.format = format == "machine" ? Format::machine : Format::text;

    auto result = vfva::cli::run_command(cfg);
    std::string report = result.render(cfg);
    if (cfg.out) {
        std::ofstream f(*cfg.out);
        if (!f) {
            std::cerr << "cannot write " << *cfg.out << "\n";
            return vfva::cli::exit_code::config;
        }
        f << report;
    } else {
        std::cout << report;
    }
    return result.exit_code;
}

#include "qsp/cli_run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"qspk: quantum symmetric pair K-matrix toolkit"};
    app.require_subcommand(1);

    qsp::RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--datum", cfg.datum, "catalog name (e.g. A3-X2) or datum JSON file")->required();
        sub->add_option("--params", cfg.params_file, "parameter JSON file");
        sub->add_option("--cutoff", cfg.cutoff, "quasi K-matrix height cutoff");
        sub->add_option("--modules", cfg.modules, "module descriptors, e.g. V(w1)");
        sub->add_option("--checks", cfg.checks, "check selection (verify)");
        sub->add_option("--out", cfg.out, "write the JSON report here");
        sub->add_option("--jobs", cfg.jobs, "parallel check execution");
        sub->add_option("--seed", cfg.seed, "seed for randomized property sampling");
        sub->add_option("--rank-guard", cfg.rank_guard, "desk-scale rank ceiling (default 4)");
    };

    CLI::App* cdatum = app.add_subcommand("datum", "build and validate a root/Satake datum");
    add_common(cdatum);
    CLI::App* cquasik = app.add_subcommand("quasik", "compute the quasi K-matrix");
    add_common(cquasik);
    CLI::App* cverify = app.add_subcommand("verify", "run the operator-level verification suite");
    add_common(cverify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cdatum->parsed()) {
            auto j = qsp::cmd_datum(cfg);
            std::cout << j.dump(1) << "\n";
            return j.value("admissible", false) ? 0 : 1;
        }
        if (cquasik->parsed()) {
            auto j = qsp::cmd_quasik(cfg);
            std::cout << j.dump(1) << "\n";
            return 0;
        }
        bool ok = false;
        auto j = qsp::cmd_verify(cfg, ok);
        std::cout << j.dump(1) << "\n";
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

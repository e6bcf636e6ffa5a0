#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"

#include "acceptance.hpp"
#include "commands.hpp"

using namespace mixbound;
using mixbound::cli::RunConfig;

namespace {

// Renders the bound, mixing, simulate and verify outputs twice from the same
// inputs and compares the bytes.
acceptance::Outcome determinism_check() {
    acceptance::Outcome o{10, "in-process determinism"};
    const auto dir = std::filesystem::temp_directory_path() / ("mixbound-selftest-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const char* text) {
        auto p = (dir / name).string();
        io::write_atomic(p, text);
        return p;
    };
    const auto chain = write("chain.json", R"({"v": 1, "kind": "chain", "space": ["a", "b", "c"], "n": 4,
        "initial": [0.5, 0.3, 0.2],
        "kernel": [[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.3, 0.3, 0.4]]})");
    const auto bound = write("bound.json", R"({"v": 1, "kind": "bound", "n": 4000, "t": 0.2, "epsilon": 0.02, "m0": 0.3})");
    const auto family = write("family.json", R"({"v": 1, "kind": "family", "space": ["a", "b", "c"],
        "target": [0.5, 0.3, 0.2], "m0": 0.3,
        "proposals": [[[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]], [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]]],
        "schedule": {"c": 0.5, "alpha": 1.5, "gamma0": 0, "rule": "toward_state"},
        "x0": "c", "target_set": ["a"], "t": 0.2, "epsilon": 0.05, "n": 600, "replicates": 300,
        "n0_replicates": 200})");

    std::size_t same = 0, total = 0;
    auto compare = [&](auto render) {
        ++total;
        if (render() == render()) ++same;
    };
    for (const char* fmt : {"json", "csv"}) {
        RunConfig cfg;
        cfg.format = fmt;
        cfg.seed = 7;
        cfg.input = chain;
        compare([&] { return cli::render_mixing(cfg, cli::load_input(cfg)); });
        cfg.input = bound;
        compare([&] { return cli::render_bound(cfg, std::cerr); });
        cfg.input = family;
        cfg.replicates = 3;
        compare([&] { return cli::render_simulate(cfg, cli::load_input(cfg)); });
    }
    RunConfig cfg;
    cfg.seed = 11;
    cfg.input = family;
    compare([&] {
        auto v = cli::render_verify(cfg, cli::load_input(cfg));
        return v.report + v.deviations;
    });
    std::filesystem::remove_all(dir);
    o.pass = same == total;
    o.detail = acceptance::fmt("%zu of %zu renders byte-identical on repeat", same, total);
    return o;
}

int selftest(const RunConfig& cfg) {
    std::vector<acceptance::Outcome> results;
    auto checks = acceptance::library_checks();
    checks.push_back({10, "in-process determinism", determinism_check});
    io::json failed = io::json::array();
    for (const auto& c : checks) {
        results.push_back(acceptance::timed(c));
        std::cout << acceptance::line(results.back()) << std::endl;
        if (!results.back().pass) failed.push_back(results.back().id);
    }
    if (!cfg.output.empty()) {
        io::json out;
        out["passed"] = failed.empty();
        out["failures"] = failed;
        io::json rows = io::json::array();
        for (const auto& r : results) rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        out["criteria"] = std::move(rows);
        io::write_atomic(cfg.output, io::dump(out));
    }
    std::cout << "selftest: " << results.size() - failed.size() << "/" << results.size()
              << " passed; failures: " << failed.dump() << std::endl;
    return failed.empty() ? 0 : static_cast<int>(ExitCode::internal);
}

int run(const RunConfig& cfg) {
    const auto& c = cfg.command;
    if (c == "selftest") return selftest(cfg);
    if (c == "bound") {
        io::write_atomic(cfg.output, cli::render_bound(cfg, std::cerr));
    } else if (c == "sample-size") {
        io::write_atomic(cfg.output, cli::render_sample_size(cfg));
    } else if (c == "mixing") {
        io::write_atomic(cfg.output, cli::render_mixing(cfg, cli::load_input(cfg)));
    } else if (c == "simulate") {
        io::write_atomic(cfg.output, cli::render_simulate(cfg, cli::load_input(cfg)));
    } else if (c == "discretize") {
        io::write_atomic(cfg.output, cli::render_discretize(cfg, cli::load_input(cfg)));
    } else if (c == "verify") {
        auto v = cli::render_verify(cfg, cli::load_input(cfg));
        // Both files are rendered before either is written.
        std::string dev_path = cfg.deviations;
        if (dev_path.empty() && !cfg.output.empty() && cfg.output != "-") dev_path = cfg.output + ".deviations.csv";
        if (cli::csv(cfg)) {
            io::write_atomic(cfg.output, v.deviations);
        } else {
            if (!dev_path.empty()) io::write_atomic(dev_path, v.deviations);
            io::write_atomic(cfg.output, v.report);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixing coefficients and concentration certificates for finite Markov-type chains"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub, bool needs_input) {
        auto in = sub->add_option("--in", cfg.input, "spec file (JSON; '-' for stdin)");
        if (needs_input) in->required();
        sub->add_option("--out", cfg.output, "output file (default stdout)");
        sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };
    auto numbers = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "horizon");
        sub->add_option("--t", cfg.t, "deviation t");
        sub->add_option("--epsilon", cfg.epsilon, "bias allowance epsilon");
        sub->add_option("--theta", cfg.theta, "uniform contraction coefficient");
        sub->add_option("--m0", cfg.m0, "minorization constant");
    };

    auto* mixing = app.add_subcommand("mixing", "mixing matrix of a chain, hidden chain, adaptive chain or profile");
    common(mixing, true);
    mixing->add_option("--method", cfg.method, "exact or contraction")
        ->check(CLI::IsMember({"exact", "contraction"}))
        ->capture_default_str();
    mixing->add_option("--max-table", cfg.max_table, "largest path table to enumerate")->capture_default_str();

    auto* bound = app.add_subcommand("bound", "concentration certificate");
    common(bound, false);
    numbers(bound);

    auto* size = app.add_subcommand("sample-size", "smallest n reaching a confidence level");
    common(size, false);
    numbers(size);
    size->add_option("--delta", cfg.delta, "target tail probability");

    auto* simulate = app.add_subcommand("simulate", "draw paths from a family or adaptive spec");
    common(simulate, true);
    simulate->add_option("--n", cfg.n, "path length");
    simulate->add_option("--replicates", cfg.replicates, "number of paths");

    auto* verify = app.add_subcommand("verify", "Monte Carlo check of a certificate");
    common(verify, true);
    verify->add_option("--n", cfg.n, "horizon");
    verify->add_option("--t", cfg.t, "deviation t");
    verify->add_option("--epsilon", cfg.epsilon, "bias allowance epsilon");
    verify->add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
    verify->add_option("--deviations", cfg.deviations, "per-replicate deviation CSV");

    auto* discretize = app.add_subcommand("discretize", "coefficient trace of a continuous kernel");
    common(discretize, true);

    auto* self = app.add_subcommand("selftest", "run the acceptance suite");
    self->add_option("--out", cfg.output, "JSON summary");
    self->add_option("--seed", cfg.seed, "unused; the suite is seeded internally");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::parse);
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return run(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::internal);
    }
}

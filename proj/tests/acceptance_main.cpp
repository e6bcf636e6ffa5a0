// One line per acceptance criterion; exits non-zero if any fails.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "acceptance.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

acceptance::Outcome cli_determinism() {
    acceptance::Outcome o{10, "CLI determinism"};
    const std::string cli = MIXBOUND_CLI;
    const fs::path dir = fs::temp_directory_path() / ("mixbound-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    {
        std::ofstream(dir / "chain.json") << R"({"v": 1, "kind": "chain", "space": ["a", "b", "c"], "n": 5,
            "initial": [0.5, 0.3, 0.2], "kernel": [[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.3, 0.3, 0.4]]})";
        std::ofstream(dir / "bound.json") << R"({"v": 1, "kind": "bound", "n": 4000, "t": 0.2, "epsilon": 0.02, "m0": 0.3})";
        std::ofstream(dir / "broken.json") << "{\"v\": 1,\n  \"kind\": \"chain\",\n  \"n\": 3,,\n}";
    }
    const std::string quiet = " > /dev/null 2>&1";
    std::size_t identical = 0, runs = 0, bad_exit = 0;
    for (const std::string fmt : {"json", "csv"})
        for (const std::string cmd : {"mixing", "bound"}) {
            const std::string spec = (dir / (cmd == "mixing" ? "chain.json" : "bound.json")).string();
            std::string outputs[2];
            for (int rep = 0; rep < 2; ++rep) {
                const auto out = dir / (cmd + "-" + fmt + "-" + std::to_string(rep));
                if (run(cli + " " + cmd + " --in " + spec + " --out " + out.string() + " --format " + fmt +
                        " --seed 3" + quiet) != 0)
                    ++bad_exit;
                outputs[rep] = slurp(out);
            }
            ++runs;
            if (!outputs[0].empty() && outputs[0] == outputs[1]) ++identical;
        }
    const int parse_exit = run(cli + " mixing --in " + (dir / "broken.json").string() + quiet);
    const int selftest_exit = run(cli + " selftest > " + (dir / "selftest.log").string() + " 2>&1");
    if (selftest_exit != 0) std::cout << slurp(dir / "selftest.log");
    fs::remove_all(dir);
    o.pass = identical == runs && bad_exit == 0 && parse_exit == 2 && selftest_exit == 0;
    o.detail = acceptance::fmt("%zu/%zu command pairs byte-identical, malformed JSON exit %d, selftest exit %d",
                               identical, runs, parse_exit, selftest_exit);
    return o;
}

}  // namespace

int main() {
    auto checks = acceptance::library_checks();
    checks.push_back({10, "CLI determinism", cli_determinism});
    int failed = 0;
    for (const auto& c : checks) {
        auto o = acceptance::timed(c);
        std::cout << acceptance::line(o) << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}

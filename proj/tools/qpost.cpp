// Copyright 2026 The qpost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpost/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_common(CLI::App* cmd, qpost::cli::RunOptions& opt, std::string& seed_text) {
    cmd->add_option("--config", opt.config_path, "JSON config file");
    cmd->add_option("--seed", seed_text, "master seed (u64)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qpost::cli;
    CLI::App app{"qpost: measurement postulates from unitary evolution"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string seed_text;
    std::string n_list_text;

    auto* a = app.add_subcommand("postulate-a", "outcome subspaces: closure and orthogonality");
    add_common(a, opt, seed_text);

    auto* born = app.add_subcommand("born", "Born-rule convergence table");
    add_common(born, opt, seed_text);
    born->add_option("--p", opt.p, "outcome probability");
    born->add_option("--eps", opt.eps, "frequency margin");
    born->add_option("--n-list", n_list_text, "comma-separated repetition counts");

    auto* collapse = app.add_subcommand("collapse", "sequential measurement weights and frequencies");
    add_common(collapse, opt, seed_text);
    collapse->add_option("--samples", opt.samples, "Monte Carlo samples");

    auto* suite = app.add_subcommand("suite", "run every check");
    add_common(suite, opt, seed_text);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (!seed_text.empty()) {
            std::size_t used = 0;
            const auto v = std::stoull(seed_text, &used);
            if (used != seed_text.size() || seed_text.front() == '-') throw UsageError("bad seed '" + seed_text + "'");
            opt.seed = v;
        }
        if (born->parsed() && born->count("--n-list")) opt.n_list = parse_n_list(n_list_text);

        if (a->parsed()) return cmd_postulate_a(opt, std::cout);
        if (born->parsed()) return cmd_born(opt, std::cout);
        if (collapse->parsed()) return cmd_collapse(opt, std::cout);
        return cmd_suite(opt, std::cout);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}

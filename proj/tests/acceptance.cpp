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


// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "qpost/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qpost;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void hoeffding() {
    const auto grid = hoeffding_grid({}, 1);
    std::size_t holds = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& pt : grid) {
        holds += pt.holds;
        worst = std::max(worst, pt.log_chi_exact - pt.log_bound);
    }
    const double deep = chi_norm_exact({0.5, 0.1, 10000});
    report(1, "exact tail below Hoeffding bound on the default grid", holds == grid.size() && grid.size() == 108 && deep < 1e-80,
           std::to_string(holds) + "/" + std::to_string(grid.size()) + " points, max log(chi/bound) " +
               fmt("%.3g, chi(0.5,0.1,1e4) = %.6g", worst, deep));
}

void born_convergence() {
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 100; n <= 5000; n += 100) ns.push_back(n);
    const auto rows = born_convergence_curve(0.3, 0.05, ns);
    std::optional<std::int64_t> first;
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!first && rows[i].chi_exact < 1e-3) first = rows[i].n;
        if (i > 0 && rows[i - 1].n >= 800 &&
            !(rows[i].log_chi_exact < rows[i - 1].log_chi_exact + std::log1p(1e-12)))
            monotone = false;
    }
    report(2, "tail for p=0.3, eps=0.05 drops below 1e-3 and decreases for N >= 800", first && *first <= 5000 && monotone,
           "first N below 1e-3: " + (first ? std::to_string(*first) : std::string("none")) +
               (monotone ? ", monotone" : ", NOT monotone"));
}

void dense_vs_ledger() {
    double worst = 0.0;
    std::size_t strings = 0;
    for (std::int64_t n : {1, 2, 3})
        for (double p : {0.5, 0.3, 0.0}) {
            CrossValidationConfig cfg;
            cfg.n = n;
            cfg.p = p;
            cfg.seed = derive_seed(7, static_cast<std::uint64_t>(n * 10 + p * 10));
            const auto r = cross_validate(cfg);
            worst = std::max({worst, r.max_discrepancy, std::abs(r.chi_dense - r.chi_ledger)});
            strings += r.strings_compared;
        }
    report(3, "dense evolution matches branch ledger for N = 1, 2, 3", worst <= 1e-9,
           std::to_string(strings) + " outcome strings, max discrepancy " + fmt("%.3g", worst));
}

void postulate_a() {
    const auto micro = make_microsystem("s", 3, {{"1", {0, 1}}, {"2", {2}}}, 101);
    const Apparatus app("A", micro.labels(), 4, 102);
    ClosureOptions o;
    o.outcome = "1";
    o.trials = 100;
    o.seed = 103;
    const auto closure = check_outcome_subspace_closure(micro, app, o);

    const auto bad = overlapping_micro_pair(0.3);
    const Assembly as({bad, Apparatus("A", bad.labels(), 4, 104)});
    double defect = 0.0;
    bool rejected = false;
    try {
        measurement_step(as, "A", "s");
    } catch (const NoUnitaryCompletion& e) {
        rejected = e.defect() > 1e-6;
        defect = e.defect();
    }
    report(4, "outcome subspaces closed; overlapping micro states rejected", closure.defect <= 1e-10 && rejected,
           fmt("max closure defect %.3g over 100 trials, negative control ||M^dag M - I|| = %.3g", closure.defect, defect));
}

void postulate_b() {
    const auto micro = make_microsystem("s", 3, {{"1", {0}}, {"2", {1, 2}}}, 201);
    double worst = 0.0;
    int runs = 0;
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto as = postulate_b_assembly(micro, 4, derive_seed(202, k), derive_seed(203, k));
        for (std::uint64_t t = 0; t < 50; ++t) {
            const auto psi = random_state(micro.space, derive_seed(204 + k, t));
            worst = std::max(worst, check_postulate_b(psi, as, "s", derive_seed(205 + k, t)).defect);
            ++runs;
        }
    }
    report(5, "student attests a definite outcome", worst <= 1e-9,
           std::to_string(runs) + " runs, max B-false weight " + fmt("%.3g", worst));
}

void postulate_d() {
    const SpaceLabel s("s", 4);
    double w_err = 0.0, total_err = 0.0, f_err = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng(derive_seed(301, i));
        const auto psi = random_state(s, rng);
        const auto first = random_family(s, random_rank_profile(4, 2, rng), {"1", "2"}, rng);
        const auto second = random_family(s, random_rank_profile(4, 3, rng), {"a", "b", "c"}, rng);
        const auto ledger = collapse_branch_ledger(psi, first, second);
        for (const auto& l : first)
            for (const auto& x : second) {
                const Matrix& pl = l.projector.matrix();
                const double direct = psi.amplitudes().dot(pl * x.projector.matrix() * pl * psi.amplitudes()).real();
                w_err = std::max(w_err, std::abs(ledger.at(l.label + "," + x.label).weight() - direct));
                f_err = std::max(f_err, conditional_factorization_check(psi, first, second, l.label, x.label).defect);
            }
        total_err = std::max(total_err, std::abs(ledger.total_weight() - 1.0));
    }
    const auto q = qubit_collapse_case();
    const auto mc = sequential_frequency_check(q.psi, q.first, q.second, 100000, 302);
    const bool ok = w_err <= 1e-10 && total_err <= 1e-10 && f_err <= 1e-10 && mc.pass;
    report(6, "sequential weights equal projector algebra; frequencies in 4-sigma bands", ok,
           fmt("weight err %.3g, total err %.3g, factorization defect %.3g", w_err, total_err, f_err) +
               fmt(", worst MC deviation %.3g sigma-bands", mc.defect));
}

void overlaps() {
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    std::string detail;
    for (std::size_t d : {std::size_t{64}, std::size_t{1024}, std::size_t{4096}}) {
        OverlapOptions o;
        o.d = d;
        o.n_pairs = 10000;
        o.seed = derive_seed(401, d);
        o.n_subspace_pairs = 0;
        const auto st = overlap_statistics(o);
        const double z = (st.mean - st.expected_mean) / st.std_error;
        ok = ok && std::abs(z) <= 3.0 && st.mean < prev;
        prev = st.mean;
        detail += "d=" + std::to_string(d) + fmt(" mean %.4g (z %.2f) ", st.mean, z);
    }
    detail.pop_back();
    report(7, "mean random overlap matches 1/d and shrinks with d", ok, detail);
}

std::map<std::string, std::string> suite_files(const fs::path& dir, unsigned threads) {
    cli::RunOptions opt;
    opt.out_dir = dir.string();
    opt.threads = threads;
    std::ostringstream sink;
    cli::cmd_suite(opt, sink);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        files[e.path().filename().string()] = {std::istreambuf_iterator<char>(in), {}};
    }
    return files;
}

void determinism() {
    const auto root = fs::temp_directory_path() / "qpost-acceptance";
    fs::remove_all(root);
    const auto a = suite_files(root / "run1", 1);
    const auto b = suite_files(root / "run2", 1);
    const auto c = suite_files(root / "run3", 4);
    fs::remove_all(root);
    const bool ok = !a.empty() && a == b && a == c;
    report(8, "suite output byte-identical across runs and thread counts", ok,
           std::to_string(a.size()) + " files compared over 3 runs (threads 1, 1, 4)");
}

}  // namespace

int main() {
    hoeffding();
    born_convergence();
    dense_vs_ledger();
    postulate_a();
    postulate_b();
    postulate_d();
    overlaps();
    determinism();
    std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

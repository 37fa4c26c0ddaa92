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

// Command implementations behind the `qpost` tool. Each returns the process
// exit code: 0 all checks pass, 1 a check failed, 2 usage or config error.
// Reports are JSON, curves are CSV. With an output directory every file is
// written atomically (temp file + rename); otherwise the JSON report goes
// to `out`.

#pragma once

#include "qpost/assembly_json.hpp"
#include "qpost/checks.hpp"
#include "qpost/engine.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qpost::cli {

inline constexpr int kPass = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;

/// Bad flags, config or output location.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::int64_t> samples;
    std::optional<double> p;
    std::optional<double> eps;
    std::optional<std::vector<std::int64_t>> n_list;
    unsigned threads = 1;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

// ---------------------------------------------------------------------------
// I/O helpers
// ---------------------------------------------------------------------------

inline json load_config(const RunOptions& opt) {
    if (!opt.config_path) return json::object();
    std::ifstream in(*opt.config_path);
    if (!in) throw UsageError("cannot open config file '" + *opt.config_path + "'");
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw UsageError("config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed config: ") + e.what());
    }
}

/// Parses "10,100,1000".
inline std::vector<std::int64_t> parse_n_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw UsageError("bad N value '" + item + "'");
        }
        if (used != item.size() || v < 1) throw UsageError("bad N value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// Creates the directory and proves it is writable.
inline std::filesystem::path prepare_out_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + dir + "'");
    const fs::path probe = fs::path(dir) / ".qpost-write-probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "x") || !f.flush()) throw UsageError("output directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + tmp + "'");
        f << content;
        if (!f.flush()) throw UsageError("cannot write '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Postulate A
// ---------------------------------------------------------------------------

struct PostulateAConfig {
    std::size_t micro_dim = 3;
    std::vector<std::size_t> outcome_dims = {2, 1};
    std::size_t macrostate_dim = 4;
    int trials = 100;
    std::uint64_t seed = kDefaultSeed;
    double micro_overlap = 0.0;
};

inline PostulateAConfig postulate_a_config(const json& cfg, const RunOptions& opt) {
    try {
        require_keys(cfg, {"micro_dim", "outcome_dims", "macrostate_dim", "trials", "seed", "micro_overlap"}, "postulate-a config");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    PostulateAConfig c;
    c.micro_dim = get_or(cfg, "micro_dim", c.micro_dim);
    c.outcome_dims = get_or(cfg, "outcome_dims", c.outcome_dims);
    c.macrostate_dim = get_or(cfg, "macrostate_dim", c.macrostate_dim);
    c.trials = get_or(cfg, "trials", c.trials);
    c.seed = opt.seed.value_or(get_or(cfg, "seed", c.seed));
    c.micro_overlap = get_or(cfg, "micro_overlap", c.micro_overlap);
    std::size_t used = 0;
    for (auto d : c.outcome_dims) used += d;
    if (c.outcome_dims.size() < 2 || used > c.micro_dim || std::count(c.outcome_dims.begin(), c.outcome_dims.end(), 0u))
        throw UsageError("outcome_dims needs >= 2 positive entries summing to at most micro_dim");
    if (c.macrostate_dim < 1 || c.trials < 1) throw UsageError("macrostate_dim and trials must be positive");
    if (!(c.micro_overlap >= 0.0 && c.micro_overlap < 1.0)) throw UsageError("micro_overlap must be in [0,1)");
    return c;
}

/// Closure of every outcome subspace plus the orthogonality residual of
/// every outcome pair. A non-orthogonal micro pair fails at construction.
inline json run_postulate_a(const PostulateAConfig& c) {
    Microsystem micro = [&] {
        if (c.micro_overlap > 0.0) return overlapping_micro_pair(c.micro_overlap);
        std::vector<std::pair<std::string, std::vector<std::size_t>>> blocks;
        std::size_t at = 0;
        for (std::size_t i = 0; i < c.outcome_dims.size(); ++i) {
            std::vector<std::size_t> coords;
            for (std::size_t k = 0; k < c.outcome_dims[i]; ++k) coords.push_back(at++);
            blocks.emplace_back(std::to_string(i + 1), coords);
        }
        return make_microsystem("s", c.micro_dim, blocks, derive_seed(c.seed, "micro-rotation"));
    }();
    const Apparatus apparatus("A", micro.labels(), c.macrostate_dim, derive_seed(c.seed, "apparatus"));
    const MeasurementCompletion completion = measurement_completion(micro, apparatus);

    json report = {{"check", "postulate_a"}, {"completion_defect", completion.defect},
                   {"completion_tolerance", kCompletionTol}, {"micro_overlap", c.micro_overlap}};
    if (completion.defect > kCompletionTol) {
        report["pass"] = false;
        report["reason"] = "no unitary completion of the measurement map";
        return report;
    }

    bool pass = true;
    json closure = json::array();
    for (const auto& label : micro.labels()) {
        ClosureOptions o;
        o.outcome = label;
        o.trials = c.trials;
        o.seed = derive_seed(c.seed, "closure-" + label);
        const auto r = check_outcome_subspace_closure(micro, apparatus, o);
        pass = pass && r.pass;
        closure.push_back(r.to_json());
    }
    json ortho = json::array();
    Rng rng(derive_seed(c.seed, "orthogonality"));
    for (std::size_t i = 0; i < micro.outcomes.size(); ++i)
        for (std::size_t j = i + 1; j < micro.outcomes.size(); ++j) {
            const auto& a = micro.outcomes[i];
            const auto& b = micro.outcomes[j];
            const auto r = orthogonality_residual(random_state_in(a.subspace, rng), a.label,
                                                  random_state_in(b.subspace, rng), b.label,
                                                  random_state_in(apparatus.ready().subspace, rng), apparatus);
            const bool ok = r.residual <= 1e-10 && r.implied_bound <= 1e-10;
            pass = pass && ok;
            ortho.push_back({{"pair", {a.label, b.label}}, {"residual", r.residual},
                             {"apparatus_overlap", r.apparatus_overlap}, {"implied_micro_bound", r.implied_bound},
                             {"pass", ok}});
        }
    report["closure"] = closure;
    report["orthogonality"] = ortho;
    report["pass"] = pass;
    return report;
}

inline int emit(const json& report, const RunOptions& opt, const std::string& file, std::ostream& out,
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    if (opt.out_dir) {
        const auto dir = prepare_out_dir(*opt.out_dir);
        for (const auto& [name, content] : extra) write_atomic(dir / name, content);
        write_atomic(dir / file, dump(report));
        out << file << ": " << (report.at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
    } else {
        out << dump(report);
    }
    return report.at("pass").get<bool>() ? kPass : kCheckFailed;
}

inline int cmd_postulate_a(const RunOptions& opt, std::ostream& out) {
    const auto cfg = postulate_a_config(load_config(opt), opt);
    return emit(run_postulate_a(cfg), opt, "postulate_a.json", out);
}

// ---------------------------------------------------------------------------
// Born rule
// ---------------------------------------------------------------------------

inline json born_report(double p, double eps, const std::vector<BornCurveRow>& rows) {
    json jrows = json::array();
    bool holds = true;
    std::optional<std::int64_t> first_small;
    for (const auto& r : rows) {
        const bool ok = r.log_chi_exact <= r.log_bound;
        holds = holds && ok;
        if (!first_small && r.chi_exact < 1e-6) first_small = r.n;
        jrows.push_back({{"N", r.n}, {"chi_exact", r.chi_exact}, {"bound", r.bound}, {"log_chi_exact", r.log_chi_exact},
                         {"log_bound", r.log_bound}, {"bound_holds", ok}});
    }
    return {{"check", "born"}, {"p", p}, {"epsilon", eps}, {"rows", jrows},
            {"first_N_below_1e-6", first_small ? json(*first_small) : json(nullptr)}, {"pass", holds}};
}

inline int cmd_born(const RunOptions& opt, std::ostream& out) {
    const json cfg = load_config(opt);
    try {
        require_keys(cfg, {"p", "epsilon", "n_list"}, "born config");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const double p = opt.p.value_or(get_or(cfg, "p", 0.5));
    const double eps = opt.eps.value_or(get_or(cfg, "epsilon", 0.1));
    const auto n_list = opt.n_list.value_or(get_or(cfg, "n_list", std::vector<std::int64_t>{10, 100, 1000, 10000}));
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0,1]");
    if (!(eps > 0.0 && eps < 1.0)) throw UsageError("epsilon must lie in (0,1)");
    if (n_list.empty()) throw UsageError("N list is empty");
    std::vector<BornCurveRow> rows;
    try {
        rows = born_convergence_curve(p, eps, n_list);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::ostringstream csv;
    write_curve_csv(csv, rows);
    return emit(born_report(p, eps, rows), opt, "born.json", out, {{"born_curve.csv", csv.str()}});
}

// ---------------------------------------------------------------------------
// Collapse
// ---------------------------------------------------------------------------

inline ProjectorFamily family_from_config(const json& j, const SpaceLabel& space) {
    if (!j.is_array() || j.empty()) throw UsageError("projector family must be a non-empty array");
    std::vector<std::pair<std::string, Matrix>> frames;
    for (const auto& e : j) {
        require_keys(e, {"label", "span"}, "projector");
        frames.emplace_back(e.at("label").get<std::string>(), columns_from_json(e.at("span"), space.dim));
    }
    return family_from_frames(space, frames);
}

inline json collapse_report(const StateVector& psi, const ProjectorFamily& first, const ProjectorFamily& second,
                            std::int64_t samples, std::uint64_t seed, std::string* ledger_csv = nullptr) {
    const BranchLedger ledger = collapse_branch_ledger(psi, first, second);
    if (ledger_csv) {
        std::ostringstream os;
        write_ledger_csv(os, ledger);
        *ledger_csv = os.str();
    }
    json weights = json::object();
    for (const auto& b : ledger.branches) weights[b.outcome] = b.weight();
    bool pass = std::abs(ledger.total_weight() - 1.0) <= 1e-10;
    json factor = json::array();
    for (const auto& a : first) {
        if (a.projector.expectation(psi) <= 1e-12) continue;
        for (const auto& b : second) {
            const auto r = conditional_factorization_check(psi, first, second, a.label, b.label);
            pass = pass && r.pass;
            factor.push_back(r.to_json());
        }
    }
    json report = {{"check", "collapse"}, {"weights", weights}, {"total_weight", ledger.total_weight()},
                   {"factorization", factor}};
    if (samples > 0) {
        const auto mc = sequential_frequency_check(psi, first, second, samples, seed);
        pass = pass && mc.pass;
        report["frequency"] = mc.to_json();
    }
    report["pass"] = pass;
    return report;
}

inline int cmd_collapse(const RunOptions& opt, std::ostream& out) {
    const json cfg = load_config(opt);
    std::optional<StateVector> psi;
    ProjectorFamily first, second;
    std::int64_t samples = 0;
    std::uint64_t seed = kDefaultSeed;
    try {
        require_keys(cfg, {"psi", "first", "second", "samples", "seed"}, "collapse config");
        if (cfg.contains("psi") || cfg.contains("first") || cfg.contains("second")) {
            const Vector v = vector_from_json(cfg.at("psi"));
            const SpaceLabel space("s", static_cast<std::size_t>(v.size()));
            psi = StateVector(space, v).normalized();
            first = family_from_config(cfg.at("first"), space);
            second = family_from_config(cfg.at("second"), space);
        } else {
            auto q = qubit_collapse_case();
            psi = q.psi;
            first = q.first;
            second = q.second;
        }
        samples = opt.samples.value_or(get_or(cfg, "samples", std::int64_t{0}));
        seed = opt.seed.value_or(get_or(cfg, "seed", seed));
        validate_family(first);
        validate_family(second);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const json::exception& e) {
        throw UsageError(e.what());
    }
    if (samples < 0) throw UsageError("samples must be >= 0");
    std::string csv;
    const json report = collapse_report(*psi, first, second, samples, seed, &csv);
    return emit(report, opt, "collapse.json", out, {{"collapse_ledger.csv", csv}});
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::vector<std::pair<std::string, std::string>> files;  ///< name, content (summary last)
    bool pass = true;
};

inline json suite_postulate_b(std::uint64_t seed) {
    const Microsystem micro = make_microsystem("s", 2, {{"1", {0}}, {"2", {1}}}, derive_seed(seed, "micro"));
    double worst = 0.0;
    int runs = 0;
    json per_seed = json::array();
    for (std::uint64_t k = 0; k < 5; ++k) {
        const std::uint64_t app_seed = derive_seed(seed, "apparatus-" + std::to_string(k));
        const Assembly assembly = postulate_b_assembly(micro, 4, app_seed, derive_seed(app_seed, "student"));
        double seed_worst = 0.0;
        for (std::uint64_t t = 0; t < 50; ++t) {
            const std::uint64_t s = derive_seed(app_seed, t);
            const StateVector psi = random_state(micro.space, s);
            const auto r = check_postulate_b(psi, assembly, "s", derive_seed(s, "ready"));
            seed_worst = std::max(seed_worst, r.defect);
            ++runs;
        }
        worst = std::max(worst, seed_worst);
        per_seed.push_back({{"apparatus_seed", app_seed}, {"max_defect", seed_worst}});
    }
    return {{"check", "postulate_b"}, {"runs", runs}, {"max_b_false_weight", worst}, {"tolerance", kDeterministicTol},
            {"per_apparatus_seed", per_seed}, {"pass", worst <= kDeterministicTol}};
}

/// Born grid, tail at (0.5, 0.1, 10⁴), and the (0.3, 0.05) convergence curve.
inline json suite_born(unsigned threads, std::string& grid_csv, std::string& curve_csv) {
    const auto grid = hoeffding_grid({}, threads);
    bool grid_ok = true;
    std::ostringstream g;
    g << "p,epsilon,N,chi_exact,bound,log_chi_exact,log_bound,holds\n";
    char buf[256];
    for (const auto& pt : grid) {
        grid_ok = grid_ok && pt.holds;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%d\n", pt.p, pt.epsilon,
                      static_cast<long long>(pt.n), pt.chi_exact, pt.bound, pt.log_chi_exact, pt.log_bound, pt.holds ? 1 : 0);
        g << buf;
    }
    grid_csv = g.str();

    const double tail_1e4 = chi_norm_exact({0.5, 0.1, 10000});

    std::vector<std::int64_t> ns;
    for (std::int64_t n = 100; n <= 5000; n += 100) ns.push_back(n);
    const auto curve = born_convergence_curve(0.3, 0.05, ns);
    std::ostringstream c;
    write_curve_csv(c, curve);
    curve_csv = c.str();
    std::optional<std::int64_t> first_below;
    bool monotone = true;
    const double n_min = 2.0 / (0.05 * 0.05);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!first_below && curve[i].chi_exact < 1e-3) first_below = curve[i].n;
        if (i > 0 && static_cast<double>(curve[i - 1].n) >= n_min && curve[i].chi_exact > curve[i - 1].chi_exact * (1.0 + 1e-12))
            monotone = false;
    }
    const bool pass = grid_ok && tail_1e4 < 1e-80 && first_below && *first_below <= 5000 && monotone;
    return {{"check", "born"},
            {"grid_points", grid.size()},
            {"grid_bound_holds", grid_ok},
            {"chi_p0.5_eps0.1_N1e4", tail_1e4},
            {"curve", {{"p", 0.3}, {"epsilon", 0.05}, {"first_N_below_1e-3", first_below ? json(*first_below) : json(nullptr)},
                       {"monotone_from_N", n_min}, {"monotone", monotone}}},
            {"pass", pass}};
}

inline json suite_postulate_d(std::uint64_t seed) {
    bool pass = true;
    double worst_weight = 0.0, worst_total = 0.0, worst_factor = 0.0;
    const SpaceLabel space("s", 4);
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng(derive_seed(seed, i));
        const StateVector psi = random_state(space, rng);
        std::uniform_int_distribution<std::size_t> parts(2, 3);
        const auto r1 = random_rank_profile(4, parts(rng), rng);
        const auto r2 = random_rank_profile(4, parts(rng), rng);
        const auto lab = [](std::size_t n, const char* prefix) {
            std::vector<std::string> l;
            for (std::size_t k = 0; k < n; ++k) l.push_back(prefix + std::to_string(k + 1));
            return l;
        };
        const auto first = random_family(space, r1, lab(r1.size(), "l"), rng);
        const auto second = random_family(space, r2, lab(r2.size(), "x"), rng);
        const auto ledger = collapse_branch_ledger(psi, first, second);
        std::size_t k = 0;
        for (const auto& a : first)
            for (const auto& b : second) {
                const Matrix& pa = a.projector.matrix();
                const cplx direct = psi.amplitudes().dot(pa * b.projector.matrix() * pa * psi.amplitudes());
                worst_weight = std::max(worst_weight, std::abs(ledger.branches[k++].weight() - direct.real()));
                if (a.projector.expectation(psi) > 1e-12)
                    worst_factor = std::max(worst_factor,
                                            conditional_factorization_check(psi, first, second, a.label, b.label).defect);
            }
        worst_total = std::max(worst_total, std::abs(ledger.total_weight() - 1.0));
    }
    pass = worst_weight <= 1e-10 && worst_total <= 1e-10 && worst_factor <= 1e-10;

    const auto q = qubit_collapse_case();
    const auto mc = sequential_frequency_check(q.psi, q.first, q.second, 100000, derive_seed(seed, "qubit-mc"));
    pass = pass && mc.pass;

    // Dense two-apparatus oracle on random qutrit instances.
    double worst_dense = 0.0;
    const SpaceLabel qutrit("s", 3);
    for (std::uint64_t i = 0; i < 3; ++i) {
        Rng rng(derive_seed(seed, "dense-" + std::to_string(i)));
        const StateVector psi = random_state(qutrit, rng);
        const auto first = random_family(qutrit, random_rank_profile(3, 2, rng), {"1", "2"}, rng);
        const auto second = random_family(qutrit, random_rank_profile(3, 2, rng), {"alpha", "beta"}, rng);
        const auto ledger = collapse_branch_ledger(psi, first, second);
        const auto dense = sequential_dense_weights(psi, first, second, 4, derive_seed(seed, i));
        for (const auto& b : ledger.branches) worst_dense = std::max(worst_dense, std::abs(dense.at(b.outcome) - b.weight()));
    }
    pass = pass && worst_dense <= 1e-9;

    return {{"check", "postulate_d"},
            {"random_instances", 100},
            {"max_weight_vs_projector_algebra", worst_weight},
            {"max_total_weight_error", worst_total},
            {"max_factorization_defect", worst_factor},
            {"qubit_frequency", mc.to_json()},
            {"max_dense_oracle_discrepancy", worst_dense},
            {"pass", pass}};
}

inline json suite_overlap(std::uint64_t seed, unsigned threads, std::string& hist_csv) {
    json rows = json::array();
    bool pass = true;
    double prev_mean = std::numeric_limits<double>::infinity();
    std::ostringstream csv;
    bool header = true;
    for (std::size_t d : {std::size_t{64}, std::size_t{1024}, std::size_t{4096}}) {
        OverlapOptions o;
        o.d = d;
        o.n_pairs = 10000;
        o.seed = derive_seed(seed, d);
        o.threads = threads;
        const auto s = overlap_statistics(o);
        const bool within = std::abs(s.mean - s.expected_mean) <= 3.0 * s.std_error;
        const bool decreasing = s.mean < prev_mean;
        prev_mean = s.mean;
        pass = pass && within && decreasing;
        json j = s.to_json();
        j["within_3_std_errors"] = within;
        j["below_previous_mean"] = decreasing;
        rows.push_back(j);
        std::ostringstream one;
        write_histogram_csv(one, s);
        std::string text = one.str();
        if (!header) text = text.substr(text.find('\n') + 1);
        header = false;
        csv << text;
    }
    hist_csv = csv.str();
    return {{"check", "overlap"}, {"dims", rows}, {"pass", pass}};
}

inline json suite_cross_validation(std::uint64_t seed) {
    json runs = json::array();
    bool pass = true;
    const std::vector<std::pair<std::int64_t, double>> cases = {{1, 0.5}, {2, 0.3}, {3, 0.2}, {2, 0.0}};
    for (const auto& [n, p] : cases) {
        CrossValidationConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(p * 100));
        const auto r = cross_validate(cfg);
        const bool ok = r.max_discrepancy <= 1e-9 && std::abs(r.chi_dense - r.chi_ledger) <= 1e-9;
        pass = pass && ok;
        runs.push_back({{"N", n}, {"p", p}, {"joint_dim", r.joint_dim}, {"strings", r.strings_compared},
                        {"max_discrepancy", r.max_discrepancy}, {"chi_dense", r.chi_dense},
                        {"chi_ledger", r.chi_ledger}, {"pass", ok}});
    }
    return {{"check", "cross_validation"}, {"runs", runs}, {"tolerance", 1e-9}, {"pass", pass}};
}

/// Every check, with per-check seeds derived from the master seed by name.
inline SuiteResult run_suite(std::uint64_t master_seed, unsigned threads) {
    SuiteResult res;
    json summary = {{"master_seed", master_seed}, {"checks", json::object()}};
    const auto add = [&](const std::string& name, const json& report) {
        res.files.emplace_back(name + ".json", dump(report));
        const bool ok = report.at("pass").get<bool>();
        summary["checks"][name] = ok;
        res.pass = res.pass && ok;
    };

    PostulateAConfig a;
    a.seed = derive_seed(master_seed, "postulate_a");
    json pa = run_postulate_a(a);
    PostulateAConfig neg = a;
    neg.micro_overlap = 0.3;
    neg.micro_dim = 2;
    neg.outcome_dims = {1, 1};
    const json control = run_postulate_a(neg);
    const bool rejected = !control.at("pass").get<bool>() &&
                          control.at("completion_defect").get<double>() > kCompletionTol;
    pa["negative_control"] = {{"micro_overlap", 0.3}, {"completion_defect", control.at("completion_defect")},
                              {"rejected", rejected}};
    pa["pass"] = pa.at("pass").get<bool>() && rejected;
    add("postulate_a", pa);

    add("postulate_b", suite_postulate_b(derive_seed(master_seed, "postulate_b")));

    std::string grid_csv, curve_csv;
    const json born = suite_born(threads, grid_csv, curve_csv);
    res.files.emplace_back("born_grid.csv", grid_csv);
    res.files.emplace_back("born_curve.csv", curve_csv);
    add("born", born);

    std::ostringstream ledger_csv;
    write_ledger_csv(ledger_csv, born_branch_ledger(0.3, 20));
    res.files.emplace_back("born_ledger_N20.csv", ledger_csv.str());

    add("postulate_d", suite_postulate_d(derive_seed(master_seed, "postulate_d")));

    std::string hist;
    const json overlap = suite_overlap(derive_seed(master_seed, "overlap"), threads, hist);
    res.files.emplace_back("overlap_histogram.csv", hist);
    add("overlap", overlap);

    add("cross_validation", suite_cross_validation(derive_seed(master_seed, "cross_validation")));

    summary["pass"] = res.pass;
    res.files.emplace_back("summary.json", dump(summary));
    return res;
}

inline int cmd_suite(const RunOptions& opt, std::ostream& out) {
    const auto dir = prepare_out_dir(opt.out_dir.value_or("qpost-out"));
    const SuiteResult res = run_suite(opt.seed.value_or(kDefaultSeed), opt.threads);
    for (const auto& [name, content] : res.files) {
        write_atomic(dir / name, content);
        if (name.ends_with(".json") && name != "summary.json")
            out << name << ": " << (json::parse(content).at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
    }
    out << "suite: " << (res.pass ? "pass" : "FAIL") << "\n";
    return res.pass ? kPass : kCheckFailed;
}

}  // namespace qpost::cli

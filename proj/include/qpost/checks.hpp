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

// Executable checks that the measurement postulates follow from unitary
// evolution of the experiment model:
//
//   A  outcome states form mutually orthogonal subspaces
//   B  the student deterministically records an allowed outcome
//   C  the weight of "wrong frequency" branches vanishes as N grows
//   D  sequential statistics equal those of a collapsed, renormalized state
//
// plus a Monte Carlo study of overlaps between random high-dimensional vectors.

#pragma once

#include "qpost/assembly_json.hpp"
#include "qpost/born_band.hpp"
#include "qpost/engine.hpp"
#include "qpost/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace qpost {

inline constexpr double kDeterministicTol = 1e-9;

struct CheckReport {
    std::string name;
    bool pass = false;
    double defect = 0.0;
    double tolerance = 0.0;
    json details = json::object();

    json to_json() const {
        return {{"check", name}, {"pass", pass}, {"defect", defect}, {"tolerance", tolerance}, {"details", details}};
    }
};

inline CheckReport make_report(std::string name, double defect, double tolerance, json details = json::object()) {
    return {std::move(name), defect <= tolerance, defect, tolerance, std::move(details)};
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own output slot, so results do not depend on `threads`.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Postulate A
// ---------------------------------------------------------------------------

struct ClosureOptions {
    std::string outcome = "1";
    std::string checked_macrostate;  ///< defaults to `outcome`
    int trials = 100;
    std::uint64_t seed = 1;
    std::optional<std::pair<cplx, cplx>> coefficients;  ///< fixed (α, β); random when empty
};

/// Evolves α|s⟩ + β|s̃⟩ (both in outcome subspace λ) through the measurement
/// and reports the largest leak of the apparatus out of macrostate λ.
inline CheckReport check_outcome_subspace_closure(const Microsystem& micro, const Apparatus& apparatus,
                                                  const ClosureOptions& opt) {
    const Assembly assembly({micro, apparatus});
    const Evolution step = measurement_step(assembly, apparatus.name(), micro.space.id);
    const auto& sub = micro.outcome(opt.outcome).subspace;
    const std::string target = opt.checked_macrostate.empty() ? opt.outcome : opt.checked_macrostate;
    Rng rng(opt.seed);
    double worst = 0.0;
    double worst_norm_change = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
        const StateVector s1 = random_state_in(sub, rng);
        const StateVector s2 = random_state_in(sub, rng);
        cplx alpha{1.0, 0.0}, beta{0.0, 0.0};
        if (opt.coefficients) {
            std::tie(alpha, beta) = *opt.coefficients;
        } else {
            const Matrix c = gaussian_matrix(2, 1, rng);
            alpha = c(0, 0);
            beta = c(1, 0);
        }
        Vector mix = alpha * s1.amplitudes() + beta * s2.amplitudes();
        if (mix.norm() == 0.0) continue;
        const StateVector s(micro.space, mix / mix.norm());
        const StateVector a = random_state_in(apparatus.ready().subspace, rng);
        const std::vector<StateVector> parts{s, a};
        const StateVector out = step.apply(product_state(assembly, parts));
        worst = std::max(worst, realizes(out, assembly, apparatus.name(), target, 0.0).defect);
        worst_norm_change = std::max(worst_norm_change, std::abs(out.norm() - 1.0));
    }
    return make_report("outcome_subspace_closure", worst, 1e-10,
                       {{"outcome", opt.outcome}, {"checked_macrostate", target}, {"trials", opt.trials},
                        {"max_norm_change", worst_norm_change}});
}

struct OrthogonalityResidual {
    double micro_overlap;      ///< |⟨s_λ|s_λ′⟩|
    double apparatus_overlap;  ///< |⟨A_λ|A_λ′⟩|
    double residual;           ///< |⟨s_λ|s_λ′⟩| · |1 − ⟨A_λ|A_λ′⟩|
    double implied_bound;      ///< residual / |1 − ⟨A_λ|A_λ′⟩|, the bound unitarity puts on |⟨s_λ|s_λ′⟩|
};

/// Unitarity gives ⟨s_λ|s_λ′⟩⟨A_∅|A_∅⟩ = ⟨s_λ|s_λ′⟩⟨A_λ|A_λ′⟩. This takes the
/// final apparatus states directly, so a "microscopic" apparatus with
/// partially overlapping pointer states can be probed too.
inline OrthogonalityResidual orthogonality_residual(const StateVector& s_a, const StateVector& s_b,
                                                    const StateVector& apparatus_a, const StateVector& apparatus_b) {
    const cplx a_overlap = inner_product(apparatus_a, apparatus_b);
    const double gap = std::abs(1.0 - a_overlap);
    const double micro = std::abs(inner_product(s_a, s_b));
    const double residual = micro * gap;
    return {micro, std::abs(a_overlap), residual,
            gap > 0.0 ? residual / gap : std::numeric_limits<double>::infinity()};
}

inline OrthogonalityResidual orthogonality_residual(const StateVector& s_a, const std::string& label_a,
                                                    const StateVector& s_b, const std::string& label_b,
                                                    const StateVector& ready_state, const Apparatus& apparatus) {
    if (label_a == label_b) throw std::invalid_argument("orthogonality_residual needs two different outcomes");
    return orthogonality_residual(s_a, s_b, apparatus.isometry(label_a).apply(ready_state),
                                  apparatus.isometry(label_b).apply(ready_state));
}

/// Outcome states |1⟩ = e0 and |2⟩ = o·e0 + √(1−o²)·e1 in a qubit, i.e. a
/// micro pair with overlap `o`. Only o = 0 admits a unitary measurement.
inline Microsystem overlapping_micro_pair(double overlap, const std::string& name = "s") {
    if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("micro overlap must be in [0,1)");
    const SpaceLabel space(name, 2);
    Matrix f1 = Matrix::Zero(2, 1), f2 = Matrix::Zero(2, 1);
    f1(0, 0) = 1.0;
    f2(0, 0) = overlap;
    f2(1, 0) = std::sqrt(1.0 - overlap * overlap);
    return {space, {{"1", Subspace(space, f1)}, {"2", Subspace(space, f2)}}};
}

// ---------------------------------------------------------------------------
// Postulate B
// ---------------------------------------------------------------------------

/// micro ⊗ apparatus "A" ⊗ student "G" whose rule accepts every declared outcome.
inline Assembly postulate_b_assembly(const Microsystem& micro, std::size_t macrostate_dim, std::uint64_t apparatus_seed,
                                     std::uint64_t student_seed) {
    const auto labels = micro.labels();
    return Assembly({micro, Apparatus("A", labels, macrostate_dim, apparatus_seed),
                     GradStudent("G", {labels}, rules::allowed({labels}), macrostate_dim, student_seed, "B-true",
                                 "B-false")});
}

/// Measures psi with "A", lets "G" read "A", and reports the squared norm of
/// the "B-false" student block.
inline CheckReport check_postulate_b(const StateVector& psi, const Assembly& assembly, const std::string& micro,
                                     std::uint64_t seed) {
    const auto& m = assembly.get<Microsystem>(micro);
    const auto& a = assembly.get<Apparatus>("A");
    const auto& g = assembly.get<GradStudent>("G");
    if (psi.dim() != m.space.dim) throw std::invalid_argument("check_postulate_b: psi has the wrong dim");
    const double unmeasurable = (psi.amplitudes() - m.measurable_projector() * psi.amplitudes()).squaredNorm();
    if (unmeasurable > kDeterministicTol)
        throw std::invalid_argument("check_postulate_b: psi has weight " + std::to_string(unmeasurable) +
                                    " outside every outcome subspace");

    Rng rng(seed);
    std::vector<StateVector> parts;
    for (std::size_t i = 0; i < assembly.size(); ++i) {
        const auto& name = assembly.name(i);
        if (name == micro)
            parts.push_back(psi.normalized());
        else if (name == "A")
            parts.push_back(random_state_in(a.ready().subspace, rng));
        else if (name == "G")
            parts.push_back(random_state_in(g.ready().subspace, rng));
        else
            parts.push_back(random_state(space_of(assembly.member(i)), rng));
    }
    StateVector state = product_state(assembly, parts);
    state = measurement_step(assembly, "A", micro).apply(state);
    state = readout_step(assembly, "G", {"A"}).apply(state);

    const auto weights = block_weights(state, assembly, {"G"});
    const auto get = [&](const std::string& l) {
        const auto it = weights.find({l});
        return it == weights.end() ? 0.0 : it->second;
    };
    return make_report("postulate_b", get(g.false_label()), kDeterministicTol,
                       {{"b_true_weight", get(g.true_label())}, {"ready_weight", get("ready")}});
}

// ---------------------------------------------------------------------------
// Postulate C
// ---------------------------------------------------------------------------

namespace detail {

/// log Σ exp(x_i) over finite terms, −inf for an empty sum.
inline double log_sum_exp(const std::vector<double>& xs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - hi);
    return hi + std::log(s);
}

inline std::vector<double> tail_log_masses(const BornParams& params, bool tails) {
    const BornBand band = born_band(params);
    const BranchLedger ledger = born_branch_ledger(params.p, params.n);
    std::vector<double> xs;
    for (std::int64_t m = 0; m <= params.n; ++m)
        if (band.in_tail(m) == tails) xs.push_back(ledger.branches[static_cast<std::size_t>(m)].log_mass());
    return xs;
}

}  // namespace detail

/// log ⟨χ|χ⟩, exact to double rounding even where ⟨χ|χ⟩ underflows.
inline double log_chi_norm_exact(const BornParams& params) {
    return detail::log_sum_exp(detail::tail_log_masses(params, true));
}

/// ⟨χ|χ⟩: total weight of branches with m ≤ N(p−ε) or m ≥ N(p+ε).
inline double chi_norm_exact(const BornParams& params) { return std::exp(log_chi_norm_exact(params)); }

/// Weight of the band |m/N − p| < ε (the "C-true" student block).
inline double c_true_weight(const BornParams& params) {
    return std::exp(detail::log_sum_exp(detail::tail_log_masses(params, false)));
}

inline double hoeffding_bound(const BornParams& params) {
    params.validate();
    return 2.0 * std::exp(-2.0 * static_cast<double>(params.n) * params.epsilon * params.epsilon);
}

inline double log_hoeffding_bound(const BornParams& params) {
    params.validate();
    return std::log(2.0) - 2.0 * static_cast<double>(params.n) * params.epsilon * params.epsilon;
}

struct BornCurveRow {
    std::int64_t n;
    double chi_exact;
    double bound;
    double log_chi_exact;
    double log_bound;
};

inline std::vector<BornCurveRow> born_convergence_curve(double p, double epsilon, const std::vector<std::int64_t>& n_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw std::invalid_argument("born_convergence_curve: N list must be ascending");
    std::vector<BornCurveRow> rows;
    for (std::int64_t n : n_list) {
        const BornParams bp{p, epsilon, n};
        const double lc = log_chi_norm_exact(bp);
        const double lb = log_hoeffding_bound(bp);
        rows.push_back({n, std::exp(lc), std::exp(lb), lc, lb});
    }
    return rows;
}

inline void write_curve_csv(std::ostream& os, const std::vector<BornCurveRow>& rows) {
    os << "N,chi_exact,bound,log_chi_exact,log_bound\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(r.n), r.chi_exact,
                      r.bound, r.log_chi_exact, r.log_bound);
        os << buf;
    }
}

struct BoundGridSpec {
    std::vector<double> p = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> epsilon = {0.02, 0.05, 0.1};
    std::vector<std::int64_t> n = {10, 100, 1000, 10000};
};

struct BoundGridPoint {
    double p;
    double epsilon;
    std::int64_t n;
    double chi_exact;
    double bound;
    double log_chi_exact;
    double log_bound;
    bool holds;
};

/// chi_norm_exact against the bound at every grid point. The comparison is
/// made in log space so it stays meaningful where both values underflow.
inline std::vector<BoundGridPoint> hoeffding_grid(const BoundGridSpec& spec = {}, unsigned threads = 1) {
    std::vector<BornParams> pts;
    for (double p : spec.p)
        for (double e : spec.epsilon)
            for (std::int64_t n : spec.n) pts.push_back({p, e, n});
    std::vector<BoundGridPoint> out(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        const auto& bp = pts[i];
        const double lc = log_chi_norm_exact(bp);
        const double lb = log_hoeffding_bound(bp);
        out[i] = {bp.p, bp.epsilon, bp.n, std::exp(lc), std::exp(lb), lc, lb, lc <= lb};
    });
    return out;
}

// ---------------------------------------------------------------------------
// Postulate D
// ---------------------------------------------------------------------------

/// ⟨ψ|P_λ P_ξ P_λ|ψ⟩ = ⟨ψ|P_λ|ψ⟩ · ⟨ψ′|P_ξ|ψ′⟩ with ψ′ = P_λψ / ‖P_λψ‖.
inline CheckReport conditional_factorization_check(const StateVector& psi, const ProjectorFamily& first,
                                                   const ProjectorFamily& second, const std::string& first_label,
                                                   const std::string& second_label) {
    const auto find = [](const ProjectorFamily& f, const std::string& l) -> const Projector& {
        for (const auto& x : f)
            if (x.label == l) return x.projector;
        throw std::invalid_argument("no projector labeled '" + l + "'");
    };
    const Projector& p1 = find(first, first_label);
    const Projector& pa = find(second, second_label);
    const double first_weight = p1.expectation(psi);
    if (first_weight <= 1e-12)
        throw std::invalid_argument("conditional_factorization_check: outcome '" + first_label + "' has vanishing weight");
    const StateVector collapsed = p1.apply(psi).normalized();
    const double conditional = pa.expectation(collapsed);
    const double sequential = (psi.amplitudes().adjoint() * p1.matrix() * pa.matrix() * p1.matrix() * psi.amplitudes())(0, 0).real();
    const double defect = std::abs(sequential - first_weight * conditional);
    return make_report("conditional_factorization", defect, 1e-10,
                       {{"first", first_label}, {"second", second_label}, {"sequential_weight", sequential},
                        {"first_weight", first_weight}, {"conditional_weight", conditional},
                        {"collapsed_norm", collapsed.norm()}});
}

/// Draws n outcome pairs from the collapse ledger by inverse CDF (fixed branch
/// order) and checks each frequency against a 4σ band around its weight.
inline CheckReport sequential_frequency_check(const StateVector& psi, const ProjectorFamily& first,
                                              const ProjectorFamily& second, std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("sequential_frequency_check: need at least one sample");
    const BranchLedger ledger = collapse_branch_ledger(psi, first, second);
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& b : ledger.branches) cdf.push_back(acc += b.weight());
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < ledger.branches.size(); ++i)
        if (ledger.branches[i].weight() > 0.0) last_nonzero = i;

    std::vector<std::int64_t> counts(ledger.branches.size(), 0);
    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, acc);
    for (std::int64_t k = 0; k < n_samples; ++k) {
        const double u = uni(rng);
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        counts[std::min(i, last_nonzero)]++;
    }

    const auto n = static_cast<double>(n_samples);
    double worst_ratio = 0.0;
    json branches = json::array();
    bool pass = true;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double w = ledger.branches[i].weight();
        const double freq = static_cast<double>(counts[i]) / n;
        const double band = 4.0 * std::sqrt(w * (1.0 - w) / n);
        const double dev = std::abs(freq - w);
        const bool ok = dev <= band;
        pass = pass && ok;
        if (band > 0.0) worst_ratio = std::max(worst_ratio, dev / band);
        else if (dev > 0.0) worst_ratio = std::numeric_limits<double>::infinity();
        branches.push_back({{"outcome", ledger.branches[i].outcome}, {"weight", w}, {"count", counts[i]},
                            {"frequency", freq}, {"band", band}, {"pass", ok}});
    }
    CheckReport r{"sequential_frequency", pass, worst_ratio, 1.0,
                  {{"samples", n_samples}, {"branches", branches}}};
    return r;
}

inline ProjectorFamily family_from_frames(const SpaceLabel& space,
                                          const std::vector<std::pair<std::string, Matrix>>& frames) {
    ProjectorFamily f;
    for (const auto& [label, frame] : frames) f.push_back({label, projector_from_subspace(Subspace(space, frame))});
    return f;
}

/// Complete family from a Haar basis split into consecutive runs of `ranks`.
inline ProjectorFamily random_family(const SpaceLabel& space, const std::vector<std::size_t>& ranks,
                                     const std::vector<std::string>& labels, Rng& rng) {
    if (ranks.size() != labels.size()) throw std::invalid_argument("random_family: one label per rank");
    const Matrix u = haar_unitary(space.dim, rng);
    std::vector<std::pair<std::string, Matrix>> frames;
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        frames.emplace_back(labels[i], u.middleCols(at, static_cast<Eigen::Index>(ranks[i])));
        at += static_cast<Eigen::Index>(ranks[i]);
    }
    if (at != u.cols()) throw std::invalid_argument("random_family: ranks must sum to the space dim");
    return family_from_frames(space, frames);
}

/// Random split of `dim` into `parts` positive ranks.
inline std::vector<std::size_t> random_rank_profile(std::size_t dim, std::size_t parts, Rng& rng) {
    std::vector<std::size_t> cuts;
    for (std::size_t c = 1; c < dim; ++c) cuts.push_back(c);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(parts - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> ranks;
    std::size_t prev = 0;
    for (std::size_t c : cuts) {
        ranks.push_back(c - prev);
        prev = c;
    }
    ranks.push_back(dim - prev);
    return ranks;
}

/// |0⟩ measured in {|0⟩,|1⟩} then {|+⟩,|−⟩}.
struct QubitCollapseCase {
    StateVector psi;
    ProjectorFamily first;
    ProjectorFamily second;
};

inline QubitCollapseCase qubit_collapse_case() {
    const SpaceLabel q("s", 2);
    const double r = 1.0 / std::sqrt(2.0);
    Matrix e0(2, 1), e1(2, 1), plus(2, 1), minus(2, 1);
    e0 << 1.0, 0.0;
    e1 << 0.0, 1.0;
    plus << r, r;
    minus << r, -r;
    return {StateVector::basis(q, 0), family_from_frames(q, {{"1", e0}, {"2", e1}}),
            family_from_frames(q, {{"alpha", plus}, {"beta", minus}})};
}

// ---------------------------------------------------------------------------
// Generic overlaps
// ---------------------------------------------------------------------------

struct OverlapOptions {
    std::size_t d = 64;
    std::size_t n_pairs = 10000;
    std::uint64_t seed = 1;
    std::size_t bins = 20;
    std::size_t subspace_dim = 4;  ///< clipped to d
    std::size_t n_subspace_pairs = 100;
    unsigned threads = 1;
};

struct OverlapSummary {
    std::size_t d;
    std::size_t n_pairs;
    double mean;
    double std_error;
    double min;
    double max;
    double expected_mean;  ///< 1/d for Haar pairs
    std::vector<std::int64_t> histogram;  ///< |⟨u|v⟩|² over equal bins of [0,1]
    std::size_t subspace_dim;
    double max_principal_cosine;
    double mean_principal_cosine;

    json to_json() const {
        return {{"d", d}, {"n_pairs", n_pairs}, {"mean", mean}, {"std_error", std_error}, {"min", min}, {"max", max},
                {"expected_mean", expected_mean}, {"histogram", histogram}, {"subspace_dim", subspace_dim},
                {"max_principal_cosine", max_principal_cosine}, {"mean_principal_cosine", mean_principal_cosine}};
    }
};

/// Statistics of |⟨u|v⟩|² for independent random unit vectors, and of the
/// largest principal-angle cosine between random k-dimensional subspaces.
inline OverlapSummary overlap_statistics(const OverlapOptions& opt) {
    if (opt.d < 1) throw std::invalid_argument("overlap_statistics: d must be >= 1");
    if (opt.n_pairs < 2 || opt.bins < 1) throw std::invalid_argument("overlap_statistics: need >= 2 pairs and >= 1 bin");
    const SpaceLabel space("H", opt.d);
    std::vector<double> overlaps(opt.n_pairs);
    parallel_for(opt.n_pairs, opt.threads, [&](std::size_t i) {
        Rng rng(derive_seed(opt.seed, i));
        const StateVector u = random_state(space, rng);
        const StateVector v = random_state(space, rng);
        overlaps[i] = std::norm(inner_product(u, v));
    });

    OverlapSummary s{};
    s.d = opt.d;
    s.n_pairs = opt.n_pairs;
    s.expected_mean = 1.0 / static_cast<double>(opt.d);
    s.histogram.assign(opt.bins, 0);
    s.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double o : overlaps) {
        sum += o;
        s.min = std::min(s.min, o);
        s.max = std::max(s.max, o);
        const auto bin = std::min(opt.bins - 1, static_cast<std::size_t>(o * static_cast<double>(opt.bins)));
        s.histogram[bin]++;
    }
    const auto n = static_cast<double>(opt.n_pairs);
    s.mean = sum / n;
    double var = 0.0;
    for (double o : overlaps) var += (o - s.mean) * (o - s.mean);
    s.std_error = std::sqrt(var / (n - 1.0) / n);

    s.subspace_dim = std::min(opt.subspace_dim, opt.d);
    std::vector<double> cosines(opt.n_subspace_pairs, 0.0);
    if (s.subspace_dim > 0)
        parallel_for(opt.n_subspace_pairs, opt.threads, [&](std::size_t i) {
            Rng rng(derive_seed(derive_seed(opt.seed, "subspaces"), i));
            const Matrix a = haar_frame(opt.d, s.subspace_dim, rng);
            const Matrix b = haar_frame(opt.d, s.subspace_dim, rng);
            Eigen::JacobiSVD<Matrix> svd(a.adjoint() * b);
            cosines[i] = std::min(1.0, svd.singularValues()(0));
        });
    double csum = 0.0;
    s.max_principal_cosine = 0.0;
    for (double c : cosines) {
        csum += c;
        s.max_principal_cosine = std::max(s.max_principal_cosine, c);
    }
    s.mean_principal_cosine = cosines.empty() ? 0.0 : csum / static_cast<double>(cosines.size());
    return s;
}

inline void write_histogram_csv(std::ostream& os, const OverlapSummary& s) {
    os << "d,bin_lo,bin_hi,count\n";
    const auto bins = static_cast<double>(s.histogram.size());
    char buf[96];
    for (std::size_t b = 0; b < s.histogram.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%lld\n", s.d, static_cast<double>(b) / bins,
                      static_cast<double>(b + 1) / bins, static_cast<long long>(s.histogram[b]));
        os << buf;
    }
}

}  // namespace qpost

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

// Two evolution engines. The dense engine pushes explicit joint state
// vectors through evolution operators. The branch ledger exploits the exact
// orthogonality of post-measurement branches: it records only the squared
// norm of each branch (grouped by multiplicity), which is all that the
// measurement statistics depend on.

#pragma once

#include "qpost/born_band.hpp"
#include "qpost/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpost {

// ---------------------------------------------------------------------------
// Dense engine
// ---------------------------------------------------------------------------

struct DenseState {
    std::vector<std::size_t> dims;
    StateVector psi;

    DenseState(std::vector<std::size_t> dims_, StateVector psi_) : dims(std::move(dims_)), psi(std::move(psi_)) {
        if (detail::product(dims) != psi.dim()) throw std::invalid_argument("dense state does not match its factor dims");
        if (psi.squared_norm() > 1.0 + 1e-9) throw std::invalid_argument("dense state has norm^2 > 1");
    }
};

inline DenseState evolve_dense(const DenseState& state, const Evolution& op) {
    if (op.joint_dims() != state.dims) throw std::invalid_argument("evolve_dense: operator and state live in different spaces");
    return {state.dims, op.apply(state.psi)};
}

// ---------------------------------------------------------------------------
// Branch ledger
// ---------------------------------------------------------------------------

/// `multiplicity` orthogonal terms of squared norm `weight` each. The log
/// fields carry the exact values when the plain ones overflow or underflow.
struct Branch {
    std::string outcome;
    double log_multiplicity = 0.0;
    double log_weight = 0.0;

    double multiplicity() const { return std::round(std::exp(log_multiplicity)); }
    double weight() const { return std::exp(log_weight); }
    double log_mass() const { return log_multiplicity + log_weight; }
    /// multiplicity · weight
    double mass() const { return std::exp(log_mass()); }
};

struct BranchLedger {
    std::vector<Branch> branches;

    /// Σ multiplicity · weight, summed in ledger order.
    double total_weight() const {
        double s = 0.0;
        for (const auto& b : branches) s += b.mass();
        return s;
    }

    const Branch& at(const std::string& outcome) const {
        for (const auto& b : branches)
            if (b.outcome == outcome) return b;
        throw std::out_of_range("ledger has no branch '" + outcome + "'");
    }
};

namespace detail {

inline double log_binomial(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// k · log(x) with 0 · log(0) = 0.
inline double xlogy(double k, double x) {
    if (k == 0.0) return 0.0;
    return x == 0.0 ? -std::numeric_limits<double>::infinity() : k * std::log(x);
}

/// Shortest decimal that round-trips, or mantissa·10^e from the log when
/// the value leaves the double range.
inline std::string format_from_log(double value, double log_value) {
    char buf[64];
    if (std::isfinite(value) && (value == 0.0 ? !std::isfinite(log_value) : std::abs(std::log10(std::abs(value))) < 300)) {
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }
    const double l10 = log_value / std::log(10.0);
    const double e = std::floor(l10);
    std::snprintf(buf, sizeof buf, "%.15fe%+.0f", std::pow(10.0, l10 - e), e);
    return buf;
}

}  // namespace detail

/// N repetitions of a two-outcome measurement with Born weight p for outcome
/// "1": branch m collects the C(N,m) outcome strings with m ones.
inline BranchLedger born_branch_ledger(double p, std::int64_t n) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("born_branch_ledger: p outside [0,1]");
    if (n < 1) throw std::invalid_argument("born_branch_ledger: N must be >= 1");
    BranchLedger ledger;
    ledger.branches.reserve(static_cast<std::size_t>(n + 1));
    for (std::int64_t m = 0; m <= n; ++m) {
        Branch b;
        b.outcome = "m=" + std::to_string(m);
        b.log_multiplicity = detail::log_binomial(n, m);
        b.log_weight = detail::xlogy(static_cast<double>(m), p) + detail::xlogy(static_cast<double>(n - m), 1.0 - p);
        ledger.branches.push_back(std::move(b));
    }
    return ledger;
}

struct LabeledProjector {
    std::string label;
    Projector projector;
};

using ProjectorFamily = std::vector<LabeledProjector>;

/// Pairwise orthogonal and summing to the identity, to `tol` entrywise.
inline void validate_family(const ProjectorFamily& family, double tol = 1e-10) {
    if (family.empty()) throw std::invalid_argument("empty projector family");
    const auto n = static_cast<Eigen::Index>(family.front().projector.ambient().dim);
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Matrix& pi = family[i].projector.matrix();
        if (pi.rows() != n) throw std::invalid_argument("projector family mixes dimensions");
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if ((pi * family[j].projector.matrix()).cwiseAbs().maxCoeff() > tol)
                throw std::invalid_argument("projectors '" + family[i].label + "' and '" + family[j].label +
                                            "' are not orthogonal");
        sum += pi;
    }
    if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("projector family does not sum to the identity");
}

/// Sequential measurement by `first` then `second`: one branch per (λ, ξ),
/// of squared norm ‖P_ξ P_λ ψ‖².
inline BranchLedger collapse_branch_ledger(const StateVector& psi, const ProjectorFamily& first,
                                           const ProjectorFamily& second) {
    validate_family(first);
    validate_family(second);
    if (psi.dim() != first.front().projector.ambient().dim || psi.dim() != second.front().projector.ambient().dim)
        throw std::invalid_argument("collapse_branch_ledger: psi and projectors differ in dim");
    BranchLedger ledger;
    for (const auto& a : first) {
        const Vector pa = a.projector.matrix() * psi.amplitudes();
        for (const auto& b : second) {
            const double w = (b.projector.matrix() * pa).squaredNorm();
            ledger.branches.push_back({a.label + "," + b.label, 0.0, w == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(w)});
        }
    }
    return ledger;
}

/// CSV with columns outcome_tuple,multiplicity,weight,cumulative_weight.
inline void write_ledger_csv(std::ostream& os, const BranchLedger& ledger) {
    os << "outcome_tuple,multiplicity,weight,cumulative_weight\n";
    double cumulative = 0.0;
    for (const auto& b : ledger.branches) {
        cumulative += b.mass();
        char cum[32];
        std::snprintf(cum, sizeof cum, "%.17g", cumulative);
        os << b.outcome << ',' << detail::format_from_log(b.multiplicity(), b.log_multiplicity) << ','
           << detail::format_from_log(b.weight(), b.log_weight) << ',' << cum << '\n';
    }
}

/// Orthonormal frame of a projector's range.
inline Subspace range_of(const Projector& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.matrix());
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > 0.5) cols.push_back(i);
    if (cols.empty()) throw std::invalid_argument("range_of: zero projector");
    Matrix f(es.eigenvectors().rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) f.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(cols[k]);
    return {p.ambient(), f};
}

/// Dense route to the sequential-measurement branch weights: psi is measured
/// by apparatus "A" (family `first`) and then "B" (family `second`) through
/// explicit unitary evolution on micro ⊗ A ⊗ B; each (λ, ξ) weight is the
/// squared norm of the joint macrostate block (λ, ξ).
inline std::map<std::string, double> sequential_dense_weights(const StateVector& psi, const ProjectorFamily& first,
                                                              const ProjectorFamily& second,
                                                              std::size_t macrostate_dim, std::uint64_t seed) {
    const SpaceLabel space("s", psi.dim());
    const auto micro_for = [&](const ProjectorFamily& fam) {
        Microsystem m{space, {}};
        for (const auto& lp : fam) m.outcomes.push_back({lp.label, Subspace(space, range_of(lp.projector).frame())});
        return m;
    };
    const auto labels = [](const ProjectorFamily& fam) {
        std::vector<std::string> out;
        for (const auto& lp : fam) out.push_back(lp.label);
        return out;
    };
    // Same micro factor for both steps; each step reads its own outcome frames.
    const Microsystem by_first = micro_for(first);
    const Microsystem by_second = micro_for(second);
    const Apparatus a("A", labels(first), macrostate_dim, derive_seed(seed, "A"));
    const Apparatus b("B", labels(second), macrostate_dim, derive_seed(seed, "B"));
    const Assembly with_first({by_first, a, b});
    const Assembly with_second({by_second, a, b});

    Rng rng(derive_seed(seed, "ready"));
    const std::vector<StateVector> parts{StateVector(space, psi.amplitudes()), random_state_in(a.ready().subspace, rng),
                                         random_state_in(b.ready().subspace, rng)};
    StateVector state = product_state(with_first, parts);
    state = measurement_step(with_first, "A", "s").apply(state);
    state = measurement_step(with_second, "B", "s").apply(state);

    std::map<std::string, double> out;
    for (const auto& [key, w] : block_weights(state, with_first, {"A", "B"})) out[key[0] + "," + key[1]] = w;
    return out;
}

// ---------------------------------------------------------------------------
// Dense vs ledger cross-validation
// ---------------------------------------------------------------------------

/// Thrown when a dense run would exceed the joint-dimension budget.
class DenseBudgetExceeded : public std::length_error {
public:
    DenseBudgetExceeded(std::size_t dim, std::size_t budget)
        : std::length_error("dense joint dim " + std::to_string(dim) + " exceeds budget " + std::to_string(budget)),
          dim_(dim) {}
    std::size_t dim() const { return dim_; }

private:
    std::size_t dim_;
};

struct CrossValidationConfig {
    double p = 0.5;
    std::int64_t n = 1;
    std::size_t macrostate_dim = 4;
    std::uint64_t seed = 1;
    bool with_student = true;  ///< add a Born-frequency student and compare ⟨χ|χ⟩ too
    double epsilon = 0.1;
    std::int64_t n_max_dense = 3;
    std::size_t max_joint_dim = 200000;
};

struct CrossValidationReport {
    std::int64_t n = 0;
    std::size_t joint_dim = 0;
    double max_discrepancy = 0.0;  ///< over every outcome string and the grouped masses
    double chi_dense = 0.0;
    double chi_ledger = 0.0;
    double total_dense = 0.0;
    std::size_t strings_compared = 0;
};

inline std::size_t cross_validation_dim(const CrossValidationConfig& cfg) {
    const std::size_t app = 3 * cfg.macrostate_dim;
    std::size_t dim = 1;
    for (std::int64_t i = 0; i < cfg.n; ++i) dim *= 2 * app;
    return cfg.with_student ? dim * 3 * cfg.macrostate_dim : dim;
}

/// N copies of (qubit, apparatus) with outcome "1" of Born weight p, evolved
/// densely; every outcome-string block norm is compared with the ledger.
inline CrossValidationReport cross_validate(const CrossValidationConfig& cfg) {
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw std::invalid_argument("cross_validate: p outside [0,1]");
    if (cfg.n < 1) throw std::invalid_argument("cross_validate: N must be >= 1");
    const std::size_t dim = cross_validation_dim(cfg);
    if (cfg.n > cfg.n_max_dense || dim > cfg.max_joint_dim) throw DenseBudgetExceeded(dim, cfg.max_joint_dim);

    std::vector<Subsystem> members;
    std::vector<std::string> apps;
    for (std::int64_t i = 0; i < cfg.n; ++i) {
        const auto tag = std::to_string(i);
        members.emplace_back(make_microsystem("s" + tag, 2, {{"1", {0}}, {"2", {1}}}));
        members.emplace_back(Apparatus("A" + tag, {"1", "2"}, cfg.macrostate_dim, derive_seed(cfg.seed, 2 * i)));
        apps.push_back("A" + tag);
    }
    if (cfg.with_student)
        members.emplace_back(GradStudent("G", std::vector<std::vector<std::string>>(apps.size(), {"1", "2"}),
                                         rules::born_frequency("1", cfg.p, cfg.epsilon), cfg.macrostate_dim,
                                         derive_seed(cfg.seed, "student"), "C-true", "C-false"));
    const Assembly assembly(std::move(members));

    Rng rng(derive_seed(cfg.seed, "states"));
    std::vector<StateVector> factors;
    for (std::int64_t i = 0; i < cfg.n; ++i) {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        Vector s(2);
        s << std::sqrt(cfg.p), std::polar(std::sqrt(1.0 - cfg.p), phase(rng));
        factors.emplace_back(SpaceLabel("s" + std::to_string(i), 2), s);
        const auto& a = assembly.get<Apparatus>(apps[static_cast<std::size_t>(i)]);
        factors.push_back(random_state_in(a.ready().subspace, rng));
    }
    if (cfg.with_student) factors.push_back(random_state_in(assembly.get<GradStudent>("G").ready().subspace, rng));

    DenseState state(assembly.dims(), product_state(assembly, factors));
    for (std::int64_t i = 0; i < cfg.n; ++i)
        state = evolve_dense(state, measurement_step(assembly, apps[static_cast<std::size_t>(i)], "s" + std::to_string(i)));
    if (cfg.with_student) state = evolve_dense(state, readout_step(assembly, "G", apps));

    const BranchLedger ledger = born_branch_ledger(cfg.p, cfg.n);
    CrossValidationReport r;
    r.n = cfg.n;
    r.joint_dim = dim;
    r.total_dense = state.psi.squared_norm();

    std::vector<double> grouped(static_cast<std::size_t>(cfg.n + 1), 0.0);
    for (const auto& [labels, w] : block_weights(state.psi, assembly, apps)) {
        double expected = 0.0;
        if (std::find(labels.begin(), labels.end(), Apparatus::kReady) == labels.end()) {
            const auto m = std::count(labels.begin(), labels.end(), std::string("1"));
            expected = ledger.branches[static_cast<std::size_t>(m)].weight();
            grouped[static_cast<std::size_t>(m)] += w;
            ++r.strings_compared;
        }
        r.max_discrepancy = std::max(r.max_discrepancy, std::abs(w - expected));
    }
    for (std::size_t m = 0; m < grouped.size(); ++m)
        r.max_discrepancy = std::max(r.max_discrepancy, std::abs(grouped[m] - ledger.branches[m].mass()));

    if (cfg.with_student) {
        const BornBand band = born_band({cfg.p, cfg.epsilon, cfg.n});
        for (std::int64_t m = 0; m <= cfg.n; ++m)
            if (band.in_tail(m)) r.chi_ledger += ledger.branches[static_cast<std::size_t>(m)].mass();
        for (const auto& [labels, w] : block_weights(state.psi, assembly, {"G"}))
            if (labels.front() == "C-false") r.chi_dense += w;
    }
    return r;
}

}  // namespace qpost

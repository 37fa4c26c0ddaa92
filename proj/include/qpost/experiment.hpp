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

// The cast of a measurement experiment (microsystems, apparatuses, grad
// students, environment), their composite assembly, and the three kinds of
// time evolution between them:
//
//   environment_step   H_γ(S) ⊗ H(E)              → H_γ(S) ⊗ H(E)
//   measurement_step   |s_λ⟩ ⊗ |A_∅⟩               → |s_λ⟩ ⊗ U_λ|A_∅⟩
//   readout_step       ⊗ H_λi(Ai) ⊗ H_∅(G)         → ⊗ H_λi(Ai) ⊗ H_f(λ1..λk)(G)
//
// Macrostates of one macrosystem occupy disjoint coordinate blocks, so they
// are exactly orthogonal. Block 0 is always the ready macrostate ∅.

#pragma once

#include "qpost/born_band.hpp"
#include "qpost/evolution.hpp"
#include "qpost/linalg.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qpost {

inline constexpr double kCompletionTol = 1e-6;

/// Raised when a measurement or readout map cannot be completed to a unitary.
class NoUnitaryCompletion : public std::runtime_error {
public:
    explicit NoUnitaryCompletion(double defect)
        : std::runtime_error("no unitary completion exists: ||M^dag M - I|| = " + std::to_string(defect)),
          defect_(defect) {}
    double defect() const { return defect_; }

private:
    double defect_;
};

// ---------------------------------------------------------------------------
// Cast
// ---------------------------------------------------------------------------

struct MicroOutcome {
    std::string label;
    Subspace subspace;
};

/// Low-dimensional measured system. Outcome subspaces need not span the space.
struct Microsystem {
    SpaceLabel space;
    std::vector<MicroOutcome> outcomes;

    const MicroOutcome& outcome(const std::string& label) const {
        for (const auto& o : outcomes)
            if (o.label == label) return o;
        throw std::invalid_argument("microsystem '" + space.id + "' has no outcome '" + label + "'");
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (const auto& o : outcomes) out.push_back(o.label);
        return out;
    }

    FrameOrthogonalityReport certify() const {
        std::vector<Subspace> parts;
        for (const auto& o : outcomes) parts.push_back(o.subspace);
        return direct_sum_frames(parts);
    }

    /// Projector onto the span of all outcome subspaces.
    Matrix measurable_projector() const {
        const auto d = static_cast<Eigen::Index>(space.dim);
        Matrix p = Matrix::Zero(d, d);
        for (const auto& o : outcomes) p += o.subspace.frame() * o.subspace.frame().adjoint();
        return p;
    }
};

/// `blocks` lists (label, coordinate indices); an optional rotation applies a
/// seeded Haar unitary to every frame, keeping the outcome subspaces orthogonal.
inline Microsystem make_microsystem(const std::string& name, std::size_t dim,
                                    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& blocks,
                                    std::optional<std::uint64_t> rotation_seed = std::nullopt) {
    if (dim < 2) throw std::invalid_argument("microsystem needs dim >= 2");
    SpaceLabel space(name, dim);
    Matrix rot = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (rotation_seed) {
        Rng rng(*rotation_seed);
        rot = haar_unitary(dim, rng);
    }
    Microsystem m{space, {}};
    for (const auto& [label, coords] : blocks) {
        if (coords.empty()) throw std::invalid_argument("outcome '" + label + "' has no basis vectors");
        Matrix f = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(coords.size()));
        for (std::size_t k = 0; k < coords.size(); ++k) {
            if (coords[k] >= dim) throw std::out_of_range("outcome basis index outside microsystem");
            f.col(static_cast<Eigen::Index>(k)) = rot.col(static_cast<Eigen::Index>(coords[k]));
        }
        m.outcomes.push_back({label, Subspace(space, f)});
    }
    return m;
}

struct Macrostate {
    std::string label;
    std::size_t offset;  ///< first coordinate of the block
    Subspace subspace;

    std::size_t dim() const { return subspace.dim(); }
};

/// Bookkeeping shared by apparatuses and grad students: equal-size
/// macrostate blocks laid out back to back, ready state first.
class Macrosystem {
public:
    Macrosystem(const std::string& name, const std::vector<std::string>& labels, std::size_t macrostate_dim)
        : space_(name, labels.size() * macrostate_dim) {
        if (macrostate_dim < 1) throw std::invalid_argument("macrostate_dim must be >= 1");
        for (std::size_t i = 0; i < labels.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j)
                if (labels[j] == labels[i]) throw std::invalid_argument("duplicate macrostate '" + labels[i] + "'");
            macrostates_.push_back({labels[i], i * macrostate_dim,
                                    Subspace::coordinate_block(space_, i * macrostate_dim, macrostate_dim)});
        }
    }

    const SpaceLabel& space() const { return space_; }
    const std::string& name() const { return space_.id; }
    const std::vector<Macrostate>& macrostates() const { return macrostates_; }
    const Macrostate& ready() const { return macrostates_.front(); }
    std::size_t macrostate_dim() const { return macrostates_.front().dim(); }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < macrostates_.size(); ++i)
            if (macrostates_[i].label == label) return i;
        throw std::invalid_argument("macrosystem '" + name() + "' has no macrostate '" + label + "'");
    }
    const Macrostate& macrostate(const std::string& label) const { return macrostates_[index_of(label)]; }

    std::size_t block_of(std::size_t coordinate) const { return coordinate / macrostate_dim(); }

    /// Unitary on the whole macrosystem carrying ∅ to the target block via
    /// `u`, the target block back to ∅ via u†, and fixing every other block.
    Matrix transition_unitary(const Isometry& u) const {
        const auto n = static_cast<Eigen::Index>(space_.dim);
        const Matrix fwd = u.ambient_matrix();
        Matrix w = Matrix::Identity(n, n);
        const Matrix ready_p = ready().subspace.frame() * ready().subspace.frame().adjoint();
        const Matrix target_p = u.to().frame() * u.to().frame().adjoint();
        w -= ready_p + target_p;
        w += fwd + fwd.adjoint();
        return w;
    }

    Matrix block_projector(std::size_t index) const {
        const auto& f = macrostates_.at(index).subspace.frame();
        return f * f.adjoint();
    }

protected:
    SpaceLabel space_;
    std::vector<Macrostate> macrostates_;
};

class Apparatus : public Macrosystem {
public:
    Apparatus(const std::string& name, const std::vector<std::string>& outcome_labels, std::size_t macrostate_dim,
              std::uint64_t seed)
        : Macrosystem(name, with_ready(outcome_labels), macrostate_dim), labels_(outcome_labels), seed_(seed) {
        if (outcome_labels.size() < 2) throw std::invalid_argument("apparatus needs at least 2 outcomes");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            isometries_.push_back(random_isometry(ready().subspace, macrostates_[i + 1].subspace, derive_seed(seed, i)));
    }

    static constexpr const char* kReady = "ready";

    const std::vector<std::string>& outcome_labels() const { return labels_; }
    std::uint64_t seed() const { return seed_; }

    const Isometry& isometry(const std::string& label) const { return isometries_[outcome_index(label)]; }
    Matrix outcome_unitary(const std::string& label) const { return transition_unitary(isometry(label)); }

    std::size_t outcome_index(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return i;
        throw std::invalid_argument("apparatus '" + name() + "' has no outcome '" + label + "'");
    }

private:
    static std::vector<std::string> with_ready(const std::vector<std::string>& labels) {
        std::vector<std::string> all{kReady};
        all.insert(all.end(), labels.begin(), labels.end());
        return all;
    }

    std::vector<std::string> labels_;
    std::uint64_t seed_;
    std::vector<Isometry> isometries_;
};

inline Apparatus build_apparatus(int n_outcomes, int macrostate_dim, std::uint64_t seed, const std::string& name = "A") {
    if (n_outcomes < 2) throw std::invalid_argument("build_apparatus: n_outcomes must be >= 2");
    if (macrostate_dim < 1) throw std::invalid_argument("build_apparatus: macrostate_dim must be >= 1");
    std::vector<std::string> labels;
    for (int i = 1; i <= n_outcomes; ++i) labels.push_back(std::to_string(i));
    return {name, labels, static_cast<std::size_t>(macrostate_dim), seed};
}

/// Boolean function of a tuple of apparatus outcomes. Returning nullopt marks
/// the tuple as outside the rule's domain.
struct StudentRule {
    std::string name;
    std::function<std::optional<bool>(std::span<const std::string>)> f;
};

namespace rules {

/// True for every tuple of declared outcomes ("the needle points at an allowed value").
inline StudentRule allowed(std::vector<std::vector<std::string>> alphabets) {
    return {"allowed", [alphabets = std::move(alphabets)](std::span<const std::string> t) -> std::optional<bool> {
                if (t.size() != alphabets.size()) return std::nullopt;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (std::find(alphabets[i].begin(), alphabets[i].end(), t[i]) == alphabets[i].end()) return false;
                return true;
            }};
}

/// Parity of the sum of integer outcome labels; true when odd.
inline StudentRule parity() {
    return {"parity", [](std::span<const std::string> t) -> std::optional<bool> {
                long sum = 0;
                for (const auto& s : t) {
                    std::size_t used = 0;
                    long v = 0;
                    try {
                        v = std::stol(s, &used);
                    } catch (const std::exception&) {
                        return std::nullopt;
                    }
                    if (used != s.size()) return std::nullopt;
                    sum += v;
                }
                return (sum % 2 + 2) % 2 == 1;
            }};
}

/// True when the relative frequency m/N of `label` satisfies |m/N − p| < ε.
inline StudentRule born_frequency(std::string label, double p, double epsilon) {
    return {"born_frequency", [label = std::move(label), p, epsilon](std::span<const std::string> t) -> std::optional<bool> {
                if (t.empty()) return std::nullopt;
                const auto m = static_cast<std::int64_t>(std::count(t.begin(), t.end(), label));
                const BornBand band = born_band({p, epsilon, static_cast<std::int64_t>(t.size())});
                return !band.in_tail(m);
            }};
}

}  // namespace rules

class GradStudent : public Macrosystem {
public:
    /// `alphabets[i]` is the outcome alphabet of the i-th apparatus read.
    /// The rule must be defined on every tuple of the product alphabet.
    GradStudent(const std::string& name, std::vector<std::vector<std::string>> alphabets, StudentRule rule,
                std::size_t macrostate_dim, std::uint64_t seed, std::string true_label = "true",
                std::string false_label = "false")
        : Macrosystem(name, {"ready", true_label, false_label}, macrostate_dim),
          alphabets_(std::move(alphabets)), rule_(std::move(rule)), seed_(seed) {
        if (alphabets_.empty()) throw std::invalid_argument("grad student must read at least one apparatus");
        std::size_t n_tuples = 1;
        for (const auto& a : alphabets_) {
            if (a.empty()) throw std::invalid_argument("empty outcome alphabet");
            n_tuples *= a.size();
        }
        decisions_.reserve(n_tuples);
        std::vector<std::string> tuple(alphabets_.size());
        for (std::size_t code = 0; code < n_tuples; ++code) {
            std::size_t rem = code;
            for (std::size_t i = alphabets_.size(); i-- > 0;) {
                tuple[i] = alphabets_[i][rem % alphabets_[i].size()];
                rem /= alphabets_[i].size();
            }
            const auto verdict = rule_.f(tuple);
            if (!verdict) throw std::invalid_argument("rule '" + rule_.name + "' is undefined on outcome tuple (" +
                                                      join(tuple) + ")");
            decisions_.push_back(*verdict);
        }
        for (std::size_t i = 0; i < 2; ++i)
            isometries_.push_back(random_isometry(ready().subspace, macrostates_[i + 1].subspace, derive_seed(seed, i)));
    }

    const std::vector<std::vector<std::string>>& alphabets() const { return alphabets_; }
    const StudentRule& rule() const { return rule_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& true_label() const { return macrostates_[1].label; }
    const std::string& false_label() const { return macrostates_[2].label; }

    /// Decision on a tuple given as indices into the alphabets (left-major code).
    bool decision(std::size_t tuple_code) const { return decisions_.at(tuple_code); }

    const std::string& verdict_label(std::span<const std::string> tuple) const {
        const auto v = rule_.f(tuple);
        if (!v) throw std::invalid_argument("rule undefined on tuple");
        return *v ? true_label() : false_label();
    }

    Matrix verdict_unitary(bool verdict) const { return transition_unitary(isometries_[verdict ? 0 : 1]); }

private:
    static std::string join(const std::vector<std::string>& t) {
        std::string s;
        for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i];
        return s;
    }

    std::vector<std::vector<std::string>> alphabets_;
    StudentRule rule_;
    std::uint64_t seed_;
    std::vector<bool> decisions_;
    std::vector<Isometry> isometries_;
};

struct Environment {
    SpaceLabel space;

    Environment(const std::string& name, std::size_t dim) : space(name, dim) {
        if (dim < 2) throw std::invalid_argument("environment needs dim >= 2");
    }
};

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

using Subsystem = std::variant<Microsystem, Apparatus, GradStudent, Environment>;

inline const SpaceLabel& space_of(const Subsystem& s) {
    return std::visit([](const auto& x) -> const SpaceLabel& {
        if constexpr (std::is_base_of_v<Macrosystem, std::decay_t<decltype(x)>>)
            return x.space();
        else
            return x.space;
    }, s);
}

/// Ordered subsystems; the joint space is their tensor product in this order.
class Assembly {
public:
    Assembly() = default;
    explicit Assembly(std::vector<Subsystem> members) : members_(std::move(members)) {
        for (std::size_t i = 0; i < members_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (name(i) == name(j)) throw std::invalid_argument("duplicate subsystem id '" + name(i) + "'");
    }

    std::size_t size() const { return members_.size(); }
    const Subsystem& member(std::size_t i) const { return members_.at(i); }
    const std::vector<Subsystem>& members() const { return members_; }
    const std::string& name(std::size_t i) const { return space_of(members_.at(i)).id; }

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> d;
        for (const auto& m : members_) d.push_back(space_of(m).dim);
        return d;
    }
    std::size_t total_dim() const { return detail::product(dims()); }
    SpaceLabel joint_space() const { return {"joint", total_dim()}; }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (name(i) == id) return i;
        throw std::invalid_argument("assembly has no subsystem '" + id + "'");
    }

    template <class T>
    const T& get(const std::string& id) const {
        const auto* p = std::get_if<T>(&members_[index_of(id)]);
        if (!p) throw std::invalid_argument("subsystem '" + id + "' has the wrong kind");
        return *p;
    }

    const Macrosystem& macrosystem(const std::string& id) const {
        const auto& m = members_[index_of(id)];
        if (const auto* a = std::get_if<Apparatus>(&m)) return *a;
        if (const auto* g = std::get_if<GradStudent>(&m)) return *g;
        throw std::invalid_argument("subsystem '" + id + "' is not a macrosystem");
    }

private:
    std::vector<Subsystem> members_;
};

/// Product state, one factor per member, in assembly order.
inline StateVector product_state(const Assembly& assembly, std::span<const StateVector> factors) {
    if (factors.size() != assembly.size()) throw std::invalid_argument("product_state: one factor per member required");
    Vector v = Vector::Ones(1);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].dim() != space_of(assembly.member(i)).dim)
            throw std::invalid_argument("product_state: factor " + std::to_string(i) + " has the wrong dim");
        v = kron(v, factors[i].amplitudes());
    }
    return {assembly.joint_space(), std::move(v)};
}

// ---------------------------------------------------------------------------
// Evolution rules
// ---------------------------------------------------------------------------

struct MeasurementCompletion {
    Matrix local;   ///< on micro ⊗ apparatus
    double defect;  ///< spectral norm of local†local − I
};

/// Σ_λ P_λ ⊗ W_λ + (I − Σ_λ P_λ) ⊗ I with P_λ the frame projectors of the
/// micro outcomes. Unitary exactly when the outcome frames are orthogonal.
inline MeasurementCompletion measurement_completion(const Microsystem& micro, const Apparatus& apparatus) {
    auto mine = micro.labels();
    auto theirs = apparatus.outcome_labels();
    std::sort(mine.begin(), mine.end());
    std::sort(theirs.begin(), theirs.end());
    if (mine != theirs)
        throw std::invalid_argument("microsystem '" + micro.space.id + "' and apparatus '" + apparatus.name() +
                                    "' disagree on the outcome labels");
    const auto ds = static_cast<Eigen::Index>(micro.space.dim);
    const auto da = static_cast<Eigen::Index>(apparatus.space().dim);
    const Matrix rest = Matrix::Identity(ds, ds) - micro.measurable_projector();
    Matrix m = kron(rest, Matrix::Identity(da, da));
    for (const auto& o : micro.outcomes) {
        const Matrix p = o.subspace.frame() * o.subspace.frame().adjoint();
        m += kron(p, apparatus.outcome_unitary(o.label));
    }
    const double defect = unitarity_defect(m);
    return {std::move(m), defect};
}

inline Evolution measurement_step(const Assembly& assembly, const std::string& apparatus, const std::string& micro) {
    auto c = measurement_completion(assembly.get<Microsystem>(micro), assembly.get<Apparatus>(apparatus));
    if (c.defect > kCompletionTol) throw NoUnitaryCompletion(c.defect);
    return Evolution::dense(assembly.dims(), {assembly.index_of(micro), assembly.index_of(apparatus)}, std::move(c.local));
}

/// Student moves from ∅ to the block named by f(λ1..λk) whenever every read
/// apparatus sits in an outcome block; identity everywhere else.
inline Evolution readout_step(const Assembly& assembly, const std::string& student,
                              const std::vector<std::string>& apparatuses) {
    const auto& g = assembly.get<GradStudent>(student);
    if (apparatuses.size() != g.alphabets().size())
        throw std::invalid_argument("student '" + student + "' reads " + std::to_string(g.alphabets().size()) +
                                    " apparatuses, got " + std::to_string(apparatuses.size()));
    std::vector<const Apparatus*> apps;
    std::vector<std::size_t> controls;
    for (std::size_t i = 0; i < apparatuses.size(); ++i) {
        const auto& a = assembly.get<Apparatus>(apparatuses[i]);
        if (a.outcome_labels() != g.alphabets()[i])
            throw std::invalid_argument("apparatus '" + a.name() + "' alphabet differs from the student's declaration");
        apps.push_back(&a);
        controls.push_back(assembly.index_of(apparatuses[i]));
    }

    // Enumerate control coordinates left-major; map each to its outcome tuple.
    std::size_t n_control = 1;
    for (const auto* a : apps) n_control *= a->space().dim;
    Evolution::Controlled map;
    map.targets = {g.verdict_unitary(true), g.verdict_unitary(false)};
    map.table.assign(n_control, -1);
    for (std::size_t c = 0; c < n_control; ++c) {
        std::size_t rem = c;
        std::size_t code = 0;
        std::size_t radix = 1;
        bool measured = true;
        for (std::size_t i = apps.size(); i-- > 0;) {
            const std::size_t coord = rem % apps[i]->space().dim;
            rem /= apps[i]->space().dim;
            const std::size_t block = apps[i]->block_of(coord);
            if (block == 0) {
                measured = false;
                break;
            }
            code += (block - 1) * radix;
            radix *= apps[i]->outcome_labels().size();
        }
        if (measured) map.table[c] = g.decision(code) ? 0 : 1;
    }
    return Evolution::controlled(assembly.dims(), controls, assembly.index_of(student), std::move(map));
}

/// Independent seeded Haar unitary on each H_γ(S) ⊗ H(E) block.
inline Evolution environment_step(const Assembly& assembly, const std::string& macrosystem,
                                  const std::string& environment, std::uint64_t seed) {
    const auto& s = assembly.macrosystem(macrosystem);
    const auto& e = assembly.get<Environment>(environment);
    const std::size_t de = e.space.dim;
    const auto n = static_cast<Eigen::Index>(s.space().dim * de);
    Matrix m = Matrix::Identity(n, n);
    for (std::size_t b = 0; b < s.macrostates().size(); ++b) {
        const auto& ms = s.macrostates()[b];
        Rng rng(derive_seed(seed, b));
        const Matrix u = haar_unitary(ms.dim() * de, rng);
        // Coordinates (offset + i) ⊗ e are contiguous in the local left-major layout.
        const auto at = static_cast<Eigen::Index>(ms.offset * de);
        m.block(at, at, u.rows(), u.cols()) = u;
    }
    return Evolution::dense(assembly.dims(), {assembly.index_of(macrosystem), assembly.index_of(environment)}, std::move(m));
}

// ---------------------------------------------------------------------------
// Macrostate diagnostics
// ---------------------------------------------------------------------------

struct Realization {
    bool holds;
    double defect;  ///< norm of the component outside H_γ(S) ⊗ H_rest
};

inline Realization realizes(const StateVector& state, const Assembly& assembly, const std::string& macrosystem,
                            const std::string& label, double tol) {
    if (state.dim() != assembly.total_dim()) throw std::invalid_argument("realizes: state is not in the joint space");
    const auto& s = assembly.macrosystem(macrosystem);
    const auto& ms = s.macrostate(label);
    const std::size_t f = assembly.index_of(macrosystem);
    const auto dims = assembly.dims();
    const auto strides = detail::strides_of(dims);
    double outside = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const std::size_t coord = (i / strides[f]) % dims[f];
        if (coord < ms.offset || coord >= ms.offset + ms.dim()) outside += std::norm(state[i]);
    }
    const double defect = std::sqrt(outside);
    return {defect <= tol, defect};
}

/// Squared norm of the state in every joint macrostate block of the listed
/// macrosystems, keyed by the tuple of macrostate labels.
inline std::map<std::vector<std::string>, double> block_weights(const StateVector& state, const Assembly& assembly,
                                                                const std::vector<std::string>& macrosystems) {
    if (state.dim() != assembly.total_dim()) throw std::invalid_argument("block_weights: state is not in the joint space");
    const auto dims = assembly.dims();
    const auto strides = detail::strides_of(dims);
    std::vector<const Macrosystem*> ms;
    std::vector<std::size_t> idx;
    for (const auto& n : macrosystems) {
        ms.push_back(&assembly.macrosystem(n));
        idx.push_back(assembly.index_of(n));
    }
    std::map<std::vector<std::size_t>, double> acc;
    std::vector<std::size_t> key(ms.size());
    for (std::size_t i = 0; i < state.dim(); ++i) {
        for (std::size_t k = 0; k < ms.size(); ++k) key[k] = ms[k]->block_of((i / strides[idx[k]]) % dims[idx[k]]);
        acc[key] += std::norm(state[i]);
    }
    std::map<std::vector<std::string>, double> out;
    for (const auto& [k, w] : acc) {
        std::vector<std::string> labels;
        for (std::size_t j = 0; j < k.size(); ++j) labels.push_back(ms[j]->macrostates()[k[j]].label);
        out[labels] = w;
    }
    return out;
}

}  // namespace qpost

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

// JSON description of an assembly, enough to rebuild it bit for bit:
//
//   {"subsystems": [
//     {"kind": "micro", "id": "s", "dim": 3,
//      "outcomes": [{"label": "1", "basis": [0, 1]}, {"label": "2", "basis": [2]}],
//      "rotation_seed": 5},                        // optional
//     {"kind": "apparatus", "id": "A", "outcomes": ["1", "2"], "macrostate_dim": 4, "seed": 7},
//     {"kind": "student", "id": "G", "reads": ["A"], "macrostate_dim": 4, "seed": 9,
//      "true_label": "B-true", "false_label": "B-false", "rule": {"name": "allowed"}},
//     {"kind": "environment", "id": "E", "dim": 8}]}
//
// A micro outcome may give "frame" (list of columns, each a list of
// [re, im] pairs) instead of "basis". Serialization always writes frames.
// Rules: {"name": "allowed"}, {"name": "parity"},
//        {"name": "born_frequency", "label": "1", "p": 0.5, "epsilon": 0.1}.

#pragma once

#include "qpost/experiment.hpp"

#include "json.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace qpost {

using json = nlohmann::json;

/// Rejects keys outside `allowed`; used by every config reader.
inline void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw std::invalid_argument(where + ": unknown key '" + k + "'");
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex numbers are [re, im] pairs");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v[i]));
    return a;
}

inline Vector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("vectors are non-empty arrays");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
    return v;
}

/// Columns given as a list of vectors.
inline Matrix columns_from_json(const json& j, std::size_t dim) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("a frame needs at least one column");
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
        const Vector v = vector_from_json(j[c]);
        if (static_cast<std::size_t>(v.size()) != dim) throw std::invalid_argument("frame column has the wrong dim");
        m.col(static_cast<Eigen::Index>(c)) = v;
    }
    return m;
}

namespace detail {

inline StudentRule rule_from_json(const json& j, const std::vector<std::vector<std::string>>& alphabets) {
    const auto name = j.at("name").get<std::string>();
    if (name == "allowed") {
        require_keys(j, {"name"}, "rule");
        return rules::allowed(alphabets);
    }
    if (name == "parity") {
        require_keys(j, {"name"}, "rule");
        return rules::parity();
    }
    if (name == "born_frequency") {
        require_keys(j, {"name", "label", "p", "epsilon"}, "rule");
        return rules::born_frequency(j.at("label").get<std::string>(), j.at("p").get<double>(),
                                     j.at("epsilon").get<double>());
    }
    throw std::invalid_argument("unknown student rule '" + name + "'");
}

}  // namespace detail

/// Parsed assembly plus the rule parameters, which are not recoverable from
/// a built GradStudent.
struct AssemblyDocument {
    Assembly assembly;
    json rules;  ///< student id → rule description
};

inline AssemblyDocument assembly_from_json(const json& doc) {
    require_keys(doc, {"subsystems"}, "assembly");
    std::vector<Subsystem> members;
    json rule_docs = json::object();
    std::map<std::string, std::vector<std::string>> alphabets;
    for (const auto& s : doc.at("subsystems")) {
        const auto kind = s.at("kind").get<std::string>();
        const auto id = s.at("id").get<std::string>();
        if (kind == "micro") {
            require_keys(s, {"kind", "id", "dim", "outcomes", "rotation_seed"}, "micro '" + id + "'");
            const auto dim = s.at("dim").get<std::size_t>();
            std::vector<std::pair<std::string, std::vector<std::size_t>>> blocks;
            std::vector<MicroOutcome> frames;
            for (const auto& o : s.at("outcomes")) {
                require_keys(o, {"label", "basis", "frame"}, "micro outcome");
                const auto label = o.at("label").get<std::string>();
                if (o.contains("basis") == o.contains("frame"))
                    throw std::invalid_argument("micro outcome '" + label + "' needs exactly one of basis/frame");
                if (o.contains("basis"))
                    blocks.emplace_back(label, o.at("basis").get<std::vector<std::size_t>>());
                else
                    frames.push_back({label, Subspace(SpaceLabel(id, dim), columns_from_json(o.at("frame"), dim))});
            }
            if (!blocks.empty() && !frames.empty())
                throw std::invalid_argument("micro '" + id + "' mixes basis and frame outcomes");
            if (!frames.empty()) {
                if (s.contains("rotation_seed")) throw std::invalid_argument("rotation_seed only applies to basis outcomes");
                members.emplace_back(Microsystem{SpaceLabel(id, dim), std::move(frames)});
            } else {
                std::optional<std::uint64_t> rot;
                if (s.contains("rotation_seed")) rot = s.at("rotation_seed").get<std::uint64_t>();
                members.emplace_back(make_microsystem(id, dim, blocks, rot));
            }
        } else if (kind == "apparatus") {
            require_keys(s, {"kind", "id", "outcomes", "macrostate_dim", "seed"}, "apparatus '" + id + "'");
            auto labels = s.at("outcomes").get<std::vector<std::string>>();
            alphabets[id] = labels;
            members.emplace_back(Apparatus(id, labels, s.at("macrostate_dim").get<std::size_t>(),
                                           s.at("seed").get<std::uint64_t>()));
        } else if (kind == "student") {
            require_keys(s, {"kind", "id", "reads", "macrostate_dim", "seed", "true_label", "false_label", "rule"},
                         "student '" + id + "'");
            std::vector<std::vector<std::string>> read_alphabets;
            for (const auto& r : s.at("reads")) {
                const auto it = alphabets.find(r.get<std::string>());
                if (it == alphabets.end())
                    throw std::invalid_argument("student '" + id + "' reads unknown apparatus '" + r.get<std::string>() +
                                                "' (apparatuses must precede the student)");
                read_alphabets.push_back(it->second);
            }
            rule_docs[id] = s.at("rule");
            rule_docs[id]["reads"] = s.at("reads");
            members.emplace_back(GradStudent(id, read_alphabets, detail::rule_from_json(s.at("rule"), read_alphabets),
                                             s.at("macrostate_dim").get<std::size_t>(), s.at("seed").get<std::uint64_t>(),
                                             s.value("true_label", std::string("true")),
                                             s.value("false_label", std::string("false"))));
        } else if (kind == "environment") {
            require_keys(s, {"kind", "id", "dim"}, "environment '" + id + "'");
            members.emplace_back(Environment(id, s.at("dim").get<std::size_t>()));
        } else {
            throw std::invalid_argument("unknown subsystem kind '" + kind + "'");
        }
    }
    return {Assembly(std::move(members)), std::move(rule_docs)};
}

inline json assembly_to_json(const AssemblyDocument& doc) {
    json subs = json::array();
    for (const auto& m : doc.assembly.members()) {
        std::visit([&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Microsystem>) {
                json outs = json::array();
                for (const auto& o : x.outcomes) {
                    json cols = json::array();
                    for (Eigen::Index c = 0; c < o.subspace.frame().cols(); ++c)
                        cols.push_back(vector_to_json(o.subspace.frame().col(c)));
                    outs.push_back({{"label", o.label}, {"frame", cols}});
                }
                subs.push_back({{"kind", "micro"}, {"id", x.space.id}, {"dim", x.space.dim}, {"outcomes", outs}});
            } else if constexpr (std::is_same_v<T, Apparatus>) {
                subs.push_back({{"kind", "apparatus"}, {"id", x.name()}, {"outcomes", x.outcome_labels()},
                                {"macrostate_dim", x.macrostate_dim()}, {"seed", x.seed()}});
            } else if constexpr (std::is_same_v<T, GradStudent>) {
                json rule = doc.rules.at(x.name());
                json reads = rule.at("reads");
                rule.erase("reads");
                subs.push_back({{"kind", "student"}, {"id", x.name()}, {"reads", reads},
                                {"macrostate_dim", x.macrostate_dim()}, {"seed", x.seed()},
                                {"true_label", x.true_label()}, {"false_label", x.false_label()}, {"rule", rule}});
            } else {
                subs.push_back({{"kind", "environment"}, {"id", x.space.id}, {"dim", x.space.dim}});
            }
        }, m);
    }
    return {{"subsystems", subs}};
}

}  // namespace qpost

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

// Evolution operators on a tensor-product space that only touch a few
// factors. Two representations:
//
//   * dense local: a square matrix on the product of the acted factors, in
//     the factor order given at construction (left-major);
//   * block controlled: the control factors select, coordinate by
//     coordinate, which unitary (or the identity) acts on one target factor.
//
// Neither ever materializes the joint matrix; to_matrix() does so on demand
// for small spaces.

#pragma once

#include "qpost/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpost {

namespace detail {

inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
    return s;
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Joint-space offsets of every multi-index over `factors` (left-major in the given order).
inline std::vector<std::size_t> offsets_over(const std::vector<std::size_t>& factors,
                                             const std::vector<std::size_t>& dims,
                                             const std::vector<std::size_t>& strides) {
    std::vector<std::size_t> out{0};
    for (std::size_t f : factors) {
        std::vector<std::size_t> next;
        next.reserve(out.size() * dims[f]);
        for (std::size_t base : out)
            for (std::size_t k = 0; k < dims[f]; ++k) next.push_back(base + k * strides[f]);
        out = std::move(next);
    }
    return out;
}

inline std::vector<std::size_t> complement_of(const std::vector<std::size_t>& factors, std::size_t n) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(factors.begin(), factors.end(), i) == factors.end()) rest.push_back(i);
    return rest;
}

}  // namespace detail

class Evolution {
public:
    /// Coordinate-controlled map. For each control multi-index c, the target
    /// factor is acted on by targets[table[c]], or left alone if table[c] < 0.
    struct Controlled {
        std::vector<int> table;
        std::vector<Matrix> targets;
    };

    static Evolution dense(std::vector<std::size_t> joint_dims, std::vector<std::size_t> factors, Matrix local) {
        Evolution e(std::move(joint_dims), std::move(factors));
        const auto n = static_cast<Eigen::Index>(e.local_dim());
        if (local.rows() != n || local.cols() != n)
            throw std::invalid_argument("local matrix is " + std::to_string(local.rows()) + "x" +
                                        std::to_string(local.cols()) + ", expected " + std::to_string(n));
        e.dense_ = std::move(local);
        return e;
    }

    /// `controls` followed by `target`; table is indexed left-major over the controls.
    static Evolution controlled(std::vector<std::size_t> joint_dims, std::vector<std::size_t> controls,
                                std::size_t target, Controlled map) {
        std::vector<std::size_t> factors = std::move(controls);
        factors.push_back(target);
        Evolution e(std::move(joint_dims), std::move(factors));
        const std::size_t dt = e.joint_dims_[target];
        if (map.table.size() != e.local_dim() / dt) throw std::invalid_argument("control table has wrong size");
        for (int t : map.table)
            if (t >= static_cast<int>(map.targets.size())) throw std::invalid_argument("control table entry out of range");
        for (const auto& m : map.targets)
            if (m.rows() != static_cast<Eigen::Index>(dt) || m.cols() != static_cast<Eigen::Index>(dt))
                throw std::invalid_argument("controlled target matrix has wrong shape");
        e.controlled_ = std::move(map);
        e.is_controlled_ = true;
        return e;
    }

    static Evolution identity(std::vector<std::size_t> joint_dims) {
        return dense(std::move(joint_dims), {}, Matrix::Identity(1, 1));
    }

    const std::vector<std::size_t>& joint_dims() const { return joint_dims_; }
    const std::vector<std::size_t>& factors() const { return factors_; }
    std::size_t joint_dim() const { return detail::product(joint_dims_); }
    std::size_t local_dim() const {
        std::size_t d = 1;
        for (std::size_t f : factors_) d *= joint_dims_[f];
        return d;
    }
    bool is_controlled() const { return is_controlled_; }

    Vector apply(const Vector& x) const {
        if (static_cast<std::size_t>(x.size()) != joint_dim())
            throw std::invalid_argument("evolution applied to vector of dim " + std::to_string(x.size()) +
                                        ", expected " + std::to_string(joint_dim()));
        return is_controlled_ ? apply_controlled(x) : apply_dense(x);
    }

    StateVector apply(const StateVector& s) const { return {s.space(), apply(s.amplitudes())}; }

    /// Matrix on the acted factors (in factors() order).
    Matrix local_matrix() const {
        if (!is_controlled_) return dense_;
        const std::size_t dt = joint_dims_[factors_.back()];
        const auto n = static_cast<Eigen::Index>(local_dim());
        Matrix m = Matrix::Zero(n, n);
        for (std::size_t c = 0; c < controlled_.table.size(); ++c) {
            const auto at = static_cast<Eigen::Index>(c * dt);
            const int t = controlled_.table[c];
            if (t < 0)
                m.block(at, at, dt, dt).setIdentity();
            else
                m.block(at, at, dt, dt) = controlled_.targets[static_cast<std::size_t>(t)];
        }
        return m;
    }

    /// Full joint matrix; only for small joint spaces.
    Matrix to_matrix(std::size_t max_dim = 4096) const {
        const std::size_t n = joint_dim();
        if (n > max_dim) throw std::length_error("joint dim " + std::to_string(n) + " too large to materialize");
        Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            e[static_cast<Eigen::Index>(j)] = 1.0;
            m.col(static_cast<Eigen::Index>(j)) = apply(e);
            e[static_cast<Eigen::Index>(j)] = 0.0;
        }
        return m;
    }

    /// The same map acting on a different joint space, with factor i moved to positions[i].
    Evolution relocated(std::vector<std::size_t> joint_dims, const std::vector<std::size_t>& positions) const {
        std::vector<std::size_t> f;
        for (std::size_t old : factors_) f.push_back(positions.at(old));
        Evolution e(std::move(joint_dims), std::move(f));
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (e.joint_dims_[e.factors_[i]] != joint_dims_[factors_[i]])
                throw std::invalid_argument("relocated factor changes dimension");
        e.dense_ = dense_;
        e.controlled_ = controlled_;
        e.is_controlled_ = is_controlled_;
        return e;
    }

private:
    Evolution(std::vector<std::size_t> joint_dims, std::vector<std::size_t> factors)
        : joint_dims_(std::move(joint_dims)), factors_(std::move(factors)) {
        for (std::size_t d : joint_dims_)
            if (d == 0) throw std::invalid_argument("factor of dim 0");
        auto sorted = factors_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("evolution acts twice on one factor");
        for (std::size_t f : factors_)
            if (f >= joint_dims_.size()) throw std::out_of_range("evolution factor outside the assembly");
    }

    Vector apply_dense(const Vector& x) const {
        const auto strides = detail::strides_of(joint_dims_);
        const auto local = detail::offsets_over(factors_, joint_dims_, strides);
        const auto rest = detail::offsets_over(detail::complement_of(factors_, joint_dims_.size()), joint_dims_, strides);
        Vector y(x.size());
        Vector fiber(static_cast<Eigen::Index>(local.size()));
        for (std::size_t base : rest) {
            for (std::size_t l = 0; l < local.size(); ++l)
                fiber[static_cast<Eigen::Index>(l)] = x[static_cast<Eigen::Index>(base + local[l])];
            const Vector out = dense_ * fiber;
            for (std::size_t l = 0; l < local.size(); ++l)
                y[static_cast<Eigen::Index>(base + local[l])] = out[static_cast<Eigen::Index>(l)];
        }
        return y;
    }

    Vector apply_controlled(const Vector& x) const {
        const auto strides = detail::strides_of(joint_dims_);
        const std::vector<std::size_t> controls(factors_.begin(), factors_.end() - 1);
        const std::size_t target = factors_.back();
        const auto control_off = detail::offsets_over(controls, joint_dims_, strides);
        const auto target_off = detail::offsets_over({target}, joint_dims_, strides);
        const auto rest = detail::offsets_over(detail::complement_of(factors_, joint_dims_.size()), joint_dims_, strides);
        Vector y = x;
        Vector fiber(static_cast<Eigen::Index>(target_off.size()));
        for (std::size_t c = 0; c < control_off.size(); ++c) {
            const int t = controlled_.table[c];
            if (t < 0) continue;
            const Matrix& u = controlled_.targets[static_cast<std::size_t>(t)];
            for (std::size_t r : rest) {
                const std::size_t base = control_off[c] + r;
                for (std::size_t k = 0; k < target_off.size(); ++k)
                    fiber[static_cast<Eigen::Index>(k)] = x[static_cast<Eigen::Index>(base + target_off[k])];
                const Vector out = u * fiber;
                for (std::size_t k = 0; k < target_off.size(); ++k)
                    y[static_cast<Eigen::Index>(base + target_off[k])] = out[static_cast<Eigen::Index>(k)];
            }
        }
        return y;
    }

    std::vector<std::size_t> joint_dims_;
    std::vector<std::size_t> factors_;
    Matrix dense_;
    Controlled controlled_;
    bool is_controlled_ = false;
};

/// `second` after `first`, as one dense operator on the union of their factors.
inline Evolution compose(const Evolution& second, const Evolution& first) {
    if (first.joint_dims() != second.joint_dims()) throw std::invalid_argument("compose: different joint spaces");
    std::vector<std::size_t> uni = first.factors();
    for (std::size_t f : second.factors())
        if (std::find(uni.begin(), uni.end(), f) == uni.end()) uni.push_back(f);
    std::sort(uni.begin(), uni.end());

    std::vector<std::size_t> mini_dims;
    std::vector<std::size_t> positions(first.joint_dims().size(), 0);
    for (std::size_t i = 0; i < uni.size(); ++i) {
        mini_dims.push_back(first.joint_dims()[uni[i]]);
        positions[uni[i]] = i;
    }
    const Evolution a = first.relocated(mini_dims, positions);
    const Evolution b = second.relocated(mini_dims, positions);
    const std::size_t n = detail::product(mini_dims);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        e[static_cast<Eigen::Index>(j)] = 1.0;
        m.col(static_cast<Eigen::Index>(j)) = b.apply(a.apply(e));
        e[static_cast<Eigen::Index>(j)] = 0.0;
    }
    return Evolution::dense(first.joint_dims(), uni, std::move(m));
}

}  // namespace qpost

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

// Complex linear algebra substrate: labeled spaces, state vectors, subspace
// frames, projectors, isometries and seeded Haar-like sampling.
//
// Tensor products use the left-major convention everywhere: in u ⊗ v the
// index of u is the slow one, i.e. (u ⊗ v)[i * dim(v) + j] = u[i] * v[j].

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qpost {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr double kOrthonormalTol = 1e-10;

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`. Streams never depend on how
/// many other streams were drawn, so adding a consumer leaves others intact.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return derive_seed(master, h);
}

// ---------------------------------------------------------------------------
// Spaces and vectors
// ---------------------------------------------------------------------------

struct SpaceLabel {
    std::string id;
    std::size_t dim = 1;

    SpaceLabel() = default;
    SpaceLabel(std::string id_, std::size_t dim_) : id(std::move(id_)), dim(dim_) {
        if (dim == 0) throw std::invalid_argument("space '" + id + "' must have dim >= 1");
    }

    friend bool operator==(const SpaceLabel&, const SpaceLabel&) = default;
};

class StateVector {
public:
    StateVector(SpaceLabel space, Vector amplitudes)
        : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amplitudes_.size()) != space_.dim)
            throw std::invalid_argument("amplitude count " + std::to_string(amplitudes_.size()) +
                                        " does not match dim of space '" + space_.id + "'");
        if (!std::isfinite(amplitudes_.squaredNorm()))
            throw std::invalid_argument("state vector has non-finite norm");
    }

    static StateVector basis(const SpaceLabel& space, std::size_t index) {
        if (index >= space.dim) throw std::out_of_range("basis index outside space");
        Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim));
        v[static_cast<Eigen::Index>(index)] = 1.0;
        return {space, std::move(v)};
    }

    const SpaceLabel& space() const { return space_; }
    std::size_t dim() const { return space_.dim; }
    const Vector& amplitudes() const { return amplitudes_; }
    cplx operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

    double squared_norm() const { return amplitudes_.squaredNorm(); }
    double norm() const { return amplitudes_.norm(); }
    bool is_normalized() const { return std::abs(squared_norm() - 1.0) <= 1e-10; }

    StateVector normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
        return {space_, amplitudes_ / n};
    }

private:
    SpaceLabel space_;
    Vector amplitudes_;
};

inline cplx inner_product(const StateVector& u, const StateVector& v) {
    if (u.dim() != v.dim())
        throw std::invalid_argument("inner_product: dimension mismatch (" + std::to_string(u.dim()) +
                                    " vs " + std::to_string(v.dim()) + ")");
    return u.amplitudes().dot(v.amplitudes());  // Eigen's dot conjugates the left operand
}

inline Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline StateVector tensor_product(const StateVector& u, const StateVector& v) {
    return {SpaceLabel(u.space().id + "*" + v.space().id, u.dim() * v.dim()),
            kron(u.amplitudes(), v.amplitudes())};
}

// ---------------------------------------------------------------------------
// Subspaces, projectors, isometries
// ---------------------------------------------------------------------------

/// Largest entry of |F†F − I|.
inline double orthonormality_defect(const Matrix& frame) {
    const Matrix gram = frame.adjoint() * frame;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

class Subspace {
public:
    Subspace(SpaceLabel ambient, Matrix frame) : ambient_(std::move(ambient)), frame_(std::move(frame)) {
        if (frame_.cols() < 1) throw std::invalid_argument("subspace needs at least one column");
        if (static_cast<std::size_t>(frame_.rows()) != ambient_.dim)
            throw std::invalid_argument("subspace frame rows do not match ambient dim");
        if (static_cast<std::size_t>(frame_.cols()) > ambient_.dim)
            throw std::invalid_argument("subspace has more columns than ambient dim");
        if (const double d = orthonormality_defect(frame_); d > kOrthonormalTol)
            throw std::invalid_argument("subspace frame is not orthonormal (defect " + std::to_string(d) + ")");
    }

    /// span{e_begin, ..., e_{begin+count-1}}
    static Subspace coordinate_block(const SpaceLabel& ambient, std::size_t begin, std::size_t count) {
        if (count == 0 || begin + count > ambient.dim) throw std::out_of_range("coordinate block outside ambient space");
        Matrix f = Matrix::Zero(static_cast<Eigen::Index>(ambient.dim), static_cast<Eigen::Index>(count));
        for (std::size_t k = 0; k < count; ++k) f(static_cast<Eigen::Index>(begin + k), static_cast<Eigen::Index>(k)) = 1.0;
        return {ambient, std::move(f)};
    }

    const SpaceLabel& ambient() const { return ambient_; }
    const Matrix& frame() const { return frame_; }
    std::size_t dim() const { return static_cast<std::size_t>(frame_.cols()); }

    /// Ambient vector frame·c for frame coordinates c.
    StateVector embed(const Vector& coords) const {
        if (coords.size() != frame_.cols()) throw std::invalid_argument("coordinate count does not match subspace dim");
        return {ambient_, frame_ * coords};
    }

private:
    SpaceLabel ambient_;
    Matrix frame_;
};

class Projector {
public:
    Projector(SpaceLabel ambient, Matrix matrix) : ambient_(std::move(ambient)), matrix_(std::move(matrix)) {
        const auto n = static_cast<Eigen::Index>(ambient_.dim);
        if (matrix_.rows() != n || matrix_.cols() != n) throw std::invalid_argument("projector shape mismatch");
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("projector is not Hermitian");
        if ((matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("projector is not idempotent");
    }

    const SpaceLabel& ambient() const { return ambient_; }
    const Matrix& matrix() const { return matrix_; }
    double trace() const { return matrix_.trace().real(); }
    std::size_t rank() const { return static_cast<std::size_t>(std::llround(trace())); }

    StateVector apply(const StateVector& v) const {
        if (v.dim() != ambient_.dim) throw std::invalid_argument("projector applied to vector of wrong dim");
        return {v.space(), matrix_ * v.amplitudes()};
    }

    /// ⟨ψ|P|ψ⟩
    double expectation(const StateVector& psi) const { return apply(psi).squared_norm(); }

private:
    SpaceLabel ambient_;
    Matrix matrix_;
};

inline Projector projector_from_subspace(const Subspace& s) {
    return {s.ambient(), s.frame() * s.frame().adjoint()};
}

/// Inner-product-preserving map between two equal-dimension subspaces,
/// stored in frame coordinates (to-coordinates = matrix · from-coordinates).
class Isometry {
public:
    Isometry(Subspace from, Subspace to, Matrix matrix)
        : from_(std::move(from)), to_(std::move(to)), matrix_(std::move(matrix)) {
        if (from_.dim() != to_.dim()) throw std::invalid_argument("isometry between subspaces of different dim");
        const auto k = static_cast<Eigen::Index>(from_.dim());
        if (matrix_.rows() != k || matrix_.cols() != k) throw std::invalid_argument("isometry matrix shape mismatch");
        if (const double d = orthonormality_defect(matrix_); d > kOrthonormalTol)
            throw std::invalid_argument("isometry matrix is not unitary (defect " + std::to_string(d) + ")");
    }

    const Subspace& from() const { return from_; }
    const Subspace& to() const { return to_; }
    const Matrix& matrix() const { return matrix_; }

    /// The map as an operator from the from-ambient space to the to-ambient space.
    Matrix ambient_matrix() const { return to_.frame() * matrix_ * from_.frame().adjoint(); }

    StateVector apply(const StateVector& v) const {
        if (v.dim() != from_.ambient().dim) throw std::invalid_argument("isometry applied to vector of wrong dim");
        return {to_.ambient(), ambient_matrix() * v.amplitudes()};
    }

private:
    Subspace from_;
    Subspace to_;
    Matrix matrix_;
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Matrix of i.i.d. complex standard Gaussians, E|z|² = 1.
inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = {re, im};
        }
    return m;
}

/// Orthonormal columns from a full-column-rank matrix. The diagonal phases of
/// R are moved into Q so a Gaussian input gives a Haar-distributed frame.
inline Matrix orthonormalize(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline Matrix haar_frame(std::size_t dim, std::size_t k, Rng& rng) {
    return orthonormalize(gaussian_matrix(dim, k, rng));
}

inline Matrix haar_unitary(std::size_t dim, Rng& rng) { return haar_frame(dim, dim, rng); }

inline StateVector random_state(const SpaceLabel& space, Rng& rng) {
    Vector v = gaussian_matrix(space.dim, 1, rng).col(0);
    return StateVector(space, v).normalized();
}

inline StateVector random_state(const SpaceLabel& space, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(space, rng);
}

/// Random state supported on `s`.
inline StateVector random_state_in(const Subspace& s, Rng& rng) {
    Vector c = gaussian_matrix(s.dim(), 1, rng).col(0);
    return s.embed(c / c.norm());
}

inline Isometry random_isometry(const Subspace& from, const Subspace& to, std::uint64_t seed) {
    if (from.dim() != to.dim())
        throw std::invalid_argument("random_isometry: from dim " + std::to_string(from.dim()) +
                                    " differs from target dim " + std::to_string(to.dim()));
    Rng rng(seed);
    return {from, to, haar_unitary(to.dim(), rng)};
}

inline Subspace random_subspace(const SpaceLabel& ambient, std::size_t k, Rng& rng) {
    return {ambient, haar_frame(ambient.dim, k, rng)};
}

// ---------------------------------------------------------------------------
// Frame certification
// ---------------------------------------------------------------------------

struct FrameOrthogonalityReport {
    bool pass = true;
    double max_overlap = 0.0;
    double tolerance = kOrthonormalTol;
    std::optional<std::pair<std::size_t, std::size_t>> offending;  ///< worst pair when failing
};

/// Certifies that the parts are pairwise orthogonal, i.e. that their sum is direct.
inline FrameOrthogonalityReport direct_sum_frames(std::span<const Subspace> parts, double tol = kOrthonormalTol) {
    FrameOrthogonalityReport report;
    report.tolerance = tol;
    std::pair<std::size_t, std::size_t> worst{0, 0};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].ambient().dim != parts[0].ambient().dim)
            throw std::invalid_argument("direct_sum_frames: parts live in different ambient spaces");
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            const double o = (parts[i].frame().adjoint() * parts[j].frame()).cwiseAbs().maxCoeff();
            if (o > report.max_overlap) {
                report.max_overlap = o;
                worst = {i, j};
            }
        }
    }
    if (report.max_overlap > tol) {
        report.pass = false;
        report.offending = worst;
    }
    return report;
}

/// Spectral norm of M†M − I.
inline double unitarity_defect(const Matrix& m) {
    const Matrix g = m.adjoint() * m - Matrix::Identity(m.cols(), m.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qpost

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

#include "qpost/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

using namespace qpost;

namespace {

const SpaceLabel kQubit("q", 2);

StateVector plus_state() {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return {kQubit, v};
}

}  // namespace

TEST(InnerProduct, BasisCases) {
    const auto e0 = StateVector::basis(kQubit, 0);
    const auto e1 = StateVector::basis(kQubit, 1);
    EXPECT_EQ(inner_product(e0, e0), cplx(1.0));
    EXPECT_EQ(inner_product(e0, e1), cplx(0.0));
    EXPECT_NEAR(std::abs(inner_product(plus_state(), e0) - cplx(1.0 / std::sqrt(2.0))), 0.0, 1e-15);
}

TEST(InnerProduct, RejectsDimensionMismatch) {
    EXPECT_THROW(inner_product(StateVector::basis(kQubit, 0), StateVector::basis(SpaceLabel("r", 3), 0)),
                 std::invalid_argument);
}

TEST(InnerProduct, ConjugateSymmetryAndCauchySchwarz) {
    Rng rng(11);
    const SpaceLabel s("h", 7);
    for (int i = 0; i < 100; ++i) {
        const StateVector u(s, gaussian_matrix(7, 1, rng).col(0));
        const StateVector v(s, gaussian_matrix(7, 1, rng).col(0));
        EXPECT_NEAR(std::abs(inner_product(u, v) - std::conj(inner_product(v, u))), 0.0, 1e-13);
        EXPECT_LE(std::abs(inner_product(u, v)), u.norm() * v.norm() * (1 + 1e-14));
        // conjugate-linear in the left argument
        const cplx a(0.3, -1.2);
        const StateVector au(s, a * u.amplitudes());
        EXPECT_NEAR(std::abs(inner_product(au, v) - std::conj(a) * inner_product(u, v)), 0.0, 1e-12);
    }
}

TEST(TensorProduct, LeftFactorIsMajor) {
    const auto t = tensor_product(StateVector::basis(kQubit, 0), StateVector::basis(kQubit, 1));
    ASSERT_EQ(t.dim(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(t[i], cplx(i == 1 ? 1.0 : 0.0));
}

TEST(TensorProduct, MatchesNestedLoopAndMultipliesNorms) {
    Rng rng(3);
    const SpaceLabel a("a", 3), b("b", 5);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector u(a, gaussian_matrix(3, 1, rng).col(0));
        const StateVector v(b, gaussian_matrix(5, 1, rng).col(0));
        const auto t = tensor_product(u, v);
        std::size_t k = 0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 5; ++j, ++k) EXPECT_EQ(t[k], u[i] * v[j]);
        EXPECT_NEAR(t.norm(), u.norm() * v.norm(), 1e-12);
    }
}

TEST(TensorProduct, Associative) {
    Rng rng(4);
    const StateVector u(SpaceLabel("a", 2), gaussian_matrix(2, 1, rng).col(0));
    const StateVector v(SpaceLabel("b", 3), gaussian_matrix(3, 1, rng).col(0));
    const StateVector w(SpaceLabel("c", 4), gaussian_matrix(4, 1, rng).col(0));
    const auto left = tensor_product(tensor_product(u, v), w);
    const auto right = tensor_product(u, tensor_product(v, w));
    EXPECT_LE((left.amplitudes() - right.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RandomState, DimensionOneIsPhaseOnly) {
    const auto s = random_state(SpaceLabel("one", 1), 42);
    EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
}

TEST(RandomState, SameSeedIsBitIdentical) {
    const SpaceLabel s("h", 33);
    const auto a = random_state(s, 99);
    const auto b = random_state(s, 99);
    for (std::size_t i = 0; i < s.dim; ++i) EXPECT_EQ(a[i], b[i]);
    EXPECT_TRUE(a.is_normalized());
}

TEST(RandomState, SameResultFromAnotherThread) {
    const SpaceLabel s("h", 16);
    const auto here = random_state(s, 5);
    std::optional<StateVector> there;
    std::thread t([&] { there = random_state(s, 5); });
    t.join();
    for (std::size_t i = 0; i < s.dim; ++i) EXPECT_EQ(here[i], (*there)[i]);
}

TEST(RandomState, MeanOverlapMatchesHaarValue) {
    // Haar-random pairs in dim d have E|<u|v>|^2 = 1/d.
    const SpaceLabel s("h", 16);
    Rng rng(2024);
    const int n = 10000;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(std::norm(inner_product(random_state(s, rng), random_state(s, rng))));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (n - 1) / n);
    EXPECT_LE(std::abs(mean - 1.0 / 16.0), 3.0 * se);
}

TEST(RandomIsometry, SingleColumnIsUnitVectorInTarget) {
    const SpaceLabel amb("A", 8);
    const auto from = Subspace::coordinate_block(amb, 0, 1);
    const auto to = Subspace::coordinate_block(amb, 5, 1);
    const auto iso = random_isometry(from, to, 7);
    const auto out = iso.apply(StateVector::basis(amb, 0));
    EXPECT_NEAR(out.norm(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(out[5]), 1.0, 1e-14);
}

TEST(RandomIsometry, IsUnitaryAndPreservesNorms) {
    const SpaceLabel amb("A", 12);
    const auto from = Subspace::coordinate_block(amb, 0, 4);
    const auto to = Subspace::coordinate_block(amb, 4, 4);
    const auto iso = random_isometry(from, to, 8);
    EXPECT_LE(orthonormality_defect(iso.matrix()), 1e-10);
    EXPECT_LE(orthonormality_defect(iso.ambient_matrix() * from.frame()), 1e-10);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Vector x = gaussian_matrix(4, 1, rng).col(0);
        EXPECT_NEAR((iso.matrix() * x).norm(), x.norm(), 1e-10);
    }
}

TEST(RandomIsometry, SeedsGiveDifferentMaps) {
    const SpaceLabel amb("A", 12);
    const auto from = Subspace::coordinate_block(amb, 0, 4);
    const auto to = Subspace::coordinate_block(amb, 8, 4);
    const auto a = random_isometry(from, to, 1);
    const auto b = random_isometry(from, to, 2);
    Eigen::JacobiSVD<Matrix> svd(a.matrix() - b.matrix());
    EXPECT_GT(svd.singularValues()(0), 1e-6);
    const auto a2 = random_isometry(from, to, 1);
    EXPECT_EQ((a.matrix() - a2.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RandomIsometry, RejectsDimensionMismatch) {
    const SpaceLabel amb("A", 12);
    EXPECT_THROW(random_isometry(Subspace::coordinate_block(amb, 0, 3), Subspace::coordinate_block(amb, 4, 4), 1),
                 std::invalid_argument);
}

TEST(Projector, ProjectsPlusOntoE0) {
    const auto p = projector_from_subspace(Subspace::coordinate_block(kQubit, 0, 1));
    const auto out = p.apply(plus_state());
    EXPECT_NEAR(std::abs(out[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_EQ(out[1], cplx(0.0));
    EXPECT_EQ(p.rank(), 1u);
}

TEST(Projector, IdempotentAndFixesFrameColumns) {
    Rng rng(5);
    const SpaceLabel amb("h", 9);
    const auto s = random_subspace(amb, 4, rng);
    const auto p = projector_from_subspace(s);
    EXPECT_LE((p.matrix() * p.matrix() - p.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(p.trace(), 4.0, 1e-8);
    for (Eigen::Index c = 0; c < 4; ++c)
        EXPECT_LE((p.matrix() * s.frame().col(c) - s.frame().col(c)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projector, DisjointCoordinateBlocksAnnihilateExactly) {
    const SpaceLabel amb("h", 6);
    const auto p1 = projector_from_subspace(Subspace::coordinate_block(amb, 0, 3));
    const auto p2 = projector_from_subspace(Subspace::coordinate_block(amb, 3, 3));
    EXPECT_EQ((p1.matrix() * p2.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Projector, RejectsNonProjector) {
    Matrix m = Matrix::Identity(2, 2) * 2.0;
    EXPECT_THROW(Projector(kQubit, m), std::invalid_argument);
}

TEST(Subspace, RejectsNonOrthonormalFrame) {
    Matrix f(2, 2);
    f << 1.0, 0.3, 0.0, 1.0;
    EXPECT_THROW(Subspace(kQubit, f), std::invalid_argument);
}

TEST(DirectSumFrames, DisjointBlocksPass) {
    const SpaceLabel amb("A", 12);
    const std::vector<Subspace> parts{Subspace::coordinate_block(amb, 0, 4), Subspace::coordinate_block(amb, 4, 4)};
    const auto r = direct_sum_frames(parts);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_overlap, 0.0);
}

TEST(DirectSumFrames, DuplicatedFrameFails) {
    const SpaceLabel amb("A", 12);
    const auto b = Subspace::coordinate_block(amb, 0, 4);
    const std::vector<Subspace> parts{b, Subspace::coordinate_block(amb, 4, 4), b};
    const auto r = direct_sum_frames(parts);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.max_overlap, 1.0);
    ASSERT_TRUE(r.offending.has_value());
    EXPECT_EQ(*r.offending, (std::pair<std::size_t, std::size_t>{0, 2}));
}

TEST(DirectSumFrames, RotatedExactBlocksPass) {
    const SpaceLabel amb("A", 12);
    Rng rng(17);
    const Matrix u = haar_unitary(12, rng);
    std::vector<Subspace> parts;
    for (std::size_t b = 0; b < 3; ++b) parts.emplace_back(amb, u * Subspace::coordinate_block(amb, 4 * b, 4).frame());
    const auto r = direct_sum_frames(parts);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_overlap, 1e-10);
}

TEST(Seeds, DerivationIsStableAndSpreads) {
    EXPECT_EQ(derive_seed(1, "born"), derive_seed(1, "born"));
    EXPECT_NE(derive_seed(1, "born"), derive_seed(1, "overlap"));
    EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(2, std::uint64_t{0}));
}

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


#include "qpost/checks.hpp"
#include "qpost/engine.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <sstream>

using namespace qpost;

TEST(EvolveDense, IdentityIsBitExact) {
    const std::vector<std::size_t> dims{2, 3, 4};
    const auto psi = random_state(SpaceLabel("j", 24), 1);
    const DenseState s(dims, psi);
    const auto out = evolve_dense(s, Evolution::identity(dims));
    for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(out.psi[i], psi[i]);
}

TEST(EvolveDense, PreservesNormAndIsLinear) {
    const std::vector<std::size_t> dims{3, 4, 2};
    Rng rng(2);
    const auto op = Evolution::dense(dims, {2, 0}, haar_unitary(6, rng));
    for (int t = 0; t < 20; ++t) {
        const auto x = random_state(SpaceLabel("j", 24), rng);
        const auto y = random_state(SpaceLabel("j", 24), rng);
        EXPECT_NEAR(evolve_dense(DenseState(dims, x), op).psi.norm(), 1.0, 1e-12);
        const cplx a(0.3, 0.4), b(0.0, -0.5);
        const Vector lhs = op.apply(Vector(a * x.amplitudes() + b * y.amplitudes()));
        const Vector rhs = a * op.apply(x.amplitudes()) + b * op.apply(y.amplitudes());
        EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(EvolveDense, RejectsSpaceMismatchAndOverweightStates) {
    const auto psi = random_state(SpaceLabel("j", 6), 3);
    EXPECT_THROW(evolve_dense(DenseState({2, 3}, psi), Evolution::identity({3, 2})), std::invalid_argument);
    EXPECT_THROW(DenseState({2, 3}, StateVector(psi.space(), 2.0 * psi.amplitudes())), std::invalid_argument);
}

TEST(BornLedger, SingleTrial) {
    const auto l = born_branch_ledger(0.5, 1);
    ASSERT_EQ(l.branches.size(), 2u);
    for (const auto& b : l.branches) {
        EXPECT_EQ(b.multiplicity(), 1.0);
        EXPECT_NEAR(b.weight(), 0.5, 1e-15);
    }
}

TEST(BornLedger, TwoTrialsHalf) {
    const auto l = born_branch_ledger(0.5, 2);
    EXPECT_EQ(l.at("m=0").multiplicity(), 1.0);
    EXPECT_EQ(l.at("m=1").multiplicity(), 2.0);
    EXPECT_EQ(l.at("m=2").multiplicity(), 1.0);
    for (const auto& b : l.branches) EXPECT_NEAR(b.weight(), 0.25, 1e-15);
    EXPECT_NEAR(l.total_weight(), 1.0, 1e-15);
}

TEST(BornLedger, MatchesFullStringEnumeration) {
    // every one of the 2^20 outcome strings, tallied by count of "1"
    const double p = 0.3;
    const int n = 20;
    const auto l = born_branch_ledger(p, n);
    std::vector<double> count(n + 1, 0.0), mass(n + 1, 0.0), weight(n + 1, -1.0);
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
        const int m = std::popcount(s);
        double w = 1.0;
        for (int i = 0; i < n; ++i) w *= (s >> i) & 1u ? p : 1.0 - p;
        count[m] += 1.0;
        mass[m] += w;
        weight[m] = w;
    }
    for (int m = 0; m <= n; ++m) {
        const auto& b = l.at("m=" + std::to_string(m));
        EXPECT_EQ(b.multiplicity(), count[m]);
        EXPECT_NEAR(b.weight() / weight[m], 1.0, 1e-12);
        EXPECT_NEAR(b.mass(), mass[m], 1e-12);
    }
}

TEST(BornLedger, TotalWeightIsOne) {
    for (double p : {0.0, 0.01, 0.3, 0.5, 0.77, 1.0})
        for (std::int64_t n : {1, 2, 7, 50, 300, 2000}) EXPECT_NEAR(born_branch_ledger(p, n).total_weight(), 1.0, 1e-10);
}

TEST(BornLedger, DegenerateProbabilities) {
    const auto l = born_branch_ledger(0.0, 5);
    EXPECT_EQ(l.at("m=0").weight(), 1.0);
    for (int m = 1; m <= 5; ++m) EXPECT_EQ(l.at("m=" + std::to_string(m)).weight(), 0.0);
    EXPECT_EQ(born_branch_ledger(1.0, 5).at("m=5").weight(), 1.0);
}

TEST(BornLedger, RelabelSymmetry) {
    const auto a = born_branch_ledger(0.3, 40);
    const auto b = born_branch_ledger(0.7, 40);
    for (int m = 0; m <= 40; ++m)
        EXPECT_NEAR(a.branches[m].log_mass(), b.branches[40 - m].log_mass(), 1e-9);
}

TEST(BornLedger, RejectsBadInputs) {
    EXPECT_THROW(born_branch_ledger(1.5, 3), std::invalid_argument);
    EXPECT_THROW(born_branch_ledger(0.5, 0), std::invalid_argument);
}

TEST(Collapse, QubitPlusMinus) {
    const auto c = qubit_collapse_case();
    const auto l = collapse_branch_ledger(c.psi, c.first, c.second);
    EXPECT_NEAR(l.at("1,alpha").weight(), 0.5, 1e-15);
    EXPECT_NEAR(l.at("1,beta").weight(), 0.5, 1e-15);
    EXPECT_EQ(l.at("2,alpha").weight(), 0.0);
    EXPECT_EQ(l.at("2,beta").weight(), 0.0);
}

TEST(Collapse, CommutingFamiliesGiveJointDiagonal) {
    const SpaceLabel q("q", 3);
    Rng rng(5);
    const auto psi = random_state(q, rng);
    Matrix e = Matrix::Identity(3, 3);
    const auto first = family_from_frames(q, {{"a", e.leftCols(2)}, {"b", e.rightCols(1)}});
    const auto second = family_from_frames(q, {{"x", e.leftCols(1)}, {"y", e.rightCols(2)}});
    const auto l = collapse_branch_ledger(psi, first, second);
    EXPECT_NEAR(l.at("a,x").weight(), std::norm(psi[0]), 1e-15);
    EXPECT_NEAR(l.at("a,y").weight(), std::norm(psi[1]), 1e-15);
    EXPECT_NEAR(l.at("b,y").weight(), std::norm(psi[2]), 1e-15);
    EXPECT_EQ(l.at("b,x").weight(), 0.0);
}

TEST(Collapse, AgreesWithDenseApparatusEvolution) {
    // Oracle: two apparatuses measuring a qutrit in sequence, weights read off
    // the joint macrostate blocks of the full state.
    const SpaceLabel q("q", 3);
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const auto psi = random_state(q, rng);
        const auto first = random_family(q, random_rank_profile(3, 2, rng), {"1", "2"}, rng);
        const auto second = random_family(q, random_rank_profile(3, 3, rng), {"x", "y", "z"}, rng);
        const auto ledger = collapse_branch_ledger(psi, first, second);
        const auto dense = sequential_dense_weights(psi, first, second, 2, 100 + trial);
        double total = 0.0;
        for (const auto& b : ledger.branches) {
            EXPECT_NEAR(dense.at(b.outcome), b.weight(), 1e-10) << b.outcome;
            total += b.weight();
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(Collapse, MarginalOverSecondIsFirstWeight) {
    const SpaceLabel q("q", 4);
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto psi = random_state(q, rng);
        const auto first = random_family(q, {1, 3}, {"1", "2"}, rng);
        const auto second = random_family(q, {2, 2}, {"a", "b"}, rng);
        const auto l = collapse_branch_ledger(psi, first, second);
        for (const auto& f : first) {
            const double direct = (f.projector.matrix() * psi.amplitudes()).squaredNorm();
            EXPECT_NEAR(l.at(f.label + ",a").weight() + l.at(f.label + ",b").weight(), direct, 1e-12);
        }
    }
}

TEST(Collapse, RejectsIncompleteFamily) {
    const SpaceLabel q("q", 2);
    const auto partial = family_from_frames(q, {{"only", Matrix::Identity(2, 2).leftCols(1)}});
    const auto full = qubit_collapse_case();
    EXPECT_THROW(collapse_branch_ledger(full.psi, partial, full.second), std::invalid_argument);
}

TEST(CrossValidate, SingleQubit) {
    CrossValidationConfig cfg;
    cfg.p = 0.5;
    cfg.n = 1;
    cfg.seed = 11;
    const auto r = cross_validate(cfg);
    EXPECT_LE(r.max_discrepancy, 1e-10);
    EXPECT_NEAR(r.total_dense, 1.0, 1e-10);
    EXPECT_EQ(r.strings_compared, 2u);
    EXPECT_NEAR(r.chi_dense, r.chi_ledger, 1e-10);
}

TEST(CrossValidate, ThreeQubitsWithStudent) {
    CrossValidationConfig cfg;
    cfg.p = 0.2;
    cfg.n = 3;
    cfg.seed = 12;
    const auto r = cross_validate(cfg);
    EXPECT_LE(r.max_discrepancy, 1e-9);
    EXPECT_EQ(r.strings_compared, 8u);
    EXPECT_NEAR(r.chi_dense, r.chi_ledger, 1e-9);
    EXPECT_NEAR(r.chi_ledger, chi_norm_exact({0.2, 0.1, 3}), 1e-12);
}

TEST(CrossValidate, ZeroProbabilityBranchIsEmpty) {
    CrossValidationConfig cfg;
    cfg.p = 0.0;
    cfg.n = 2;
    const auto r = cross_validate(cfg);
    EXPECT_LE(r.max_discrepancy, 1e-12);
    EXPECT_EQ(born_branch_ledger(0.0, 2).at("m=2").weight(), 0.0);
}

TEST(CrossValidate, BudgetIsEnforced) {
    CrossValidationConfig cfg;
    cfg.n = 4;
    try {
        cross_validate(cfg);
        FAIL() << "expected DenseBudgetExceeded";
    } catch (const DenseBudgetExceeded& e) {
        EXPECT_EQ(e.dim(), cross_validation_dim(cfg));
    }
}

TEST(LedgerCsv, HeaderAndCumulativeColumn) {
    std::ostringstream os;
    write_ledger_csv(os, born_branch_ledger(0.5, 2));
    EXPECT_EQ(os.str(),
              "outcome_tuple,multiplicity,weight,cumulative_weight\n"
              "m=0,1,0.25,0.25\nm=1,2,0.25,0.75\nm=2,1,0.25,1\n");
}

TEST(LedgerCsv, HugeMultiplicitiesFallBackToLogs) {
    std::ostringstream os;
    write_ledger_csv(os, born_branch_ledger(0.5, 5000));
    const auto s = os.str();
    EXPECT_EQ(s.find("inf"), std::string::npos);
    EXPECT_EQ(s.find("nan"), std::string::npos);
    EXPECT_NE(s.find("m=2500,"), std::string::npos);
}

// Copyright 2026 The tmpft Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tmpft/quantum_core.hpp"
#include "tmpft/scenarios.hpp"

namespace {

using tmpft::Complex;
using tmpft::ComplexMatrix;
using tmpft::ComplexVector;
using tmpft::DensityOperator;
using tmpft::Subsystem;

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}

ComplexMatrix random_state(std::size_t n, std::mt19937_64& rng) {
    const ComplexMatrix g = random_matrix(n, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace();
    return (rho + rho.adjoint()) / 2.0;
}

ComplexMatrix werner(double p) {
    const ComplexMatrix phi = tmpft::bell_basis().col(0);
    return p * (phi * phi.adjoint()) + (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
}

ComplexMatrix diag(std::initializer_list<double> values) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                          static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) m(i, i) = v, ++i;
    return m;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(TensorProduct, IdentityTimesIdentityIsIdentity) {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    EXPECT_EQ(max_abs(tmpft::tensor_product(i2, i2) - ComplexMatrix::Identity(4, 4)), 0.0);
}

TEST(TensorProduct, ProjectorProduct) {
    EXPECT_EQ(max_abs(tmpft::tensor_product(diag({1, 0}), diag({0, 1})) - diag({0, 1, 0, 0})), 0.0);
}

TEST(TensorProduct, TraceIsMultiplicativeAndMatchesLoopKron) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(2, rng);
        const ComplexMatrix ab = tmpft::tensor_product(a, b);
        EXPECT_LT(std::abs(ab.trace() - a.trace() * b.trace()), 1e-12);
        EXPECT_LT(oracle::max_abs_diff(oracle::from(ab), oracle::kron(oracle::from(a), oracle::from(b))),
                  1e-14);
    }
}

TEST(PartialTrace, BellStateReducesToMaximallyMixed) {
    const ComplexMatrix phi = tmpft::bell_basis().col(0);
    const ComplexMatrix rho = phi * phi.adjoint();
    EXPECT_LT(max_abs(tmpft::partial_trace(rho, 2, 2, Subsystem::First) - 0.5 * ComplexMatrix::Identity(2, 2)),
              1e-15);
    EXPECT_LT(max_abs(tmpft::partial_trace(rho, 2, 2, Subsystem::Second) - 0.5 * ComplexMatrix::Identity(2, 2)),
              1e-15);
}

TEST(PartialTrace, ProductStateReturnsFactor) {
    std::mt19937_64 rng(3);
    const ComplexMatrix sa = random_state(2, rng), sb = random_state(3, rng);
    const ComplexMatrix prod = tmpft::tensor_product(sa, sb);
    EXPECT_LT(max_abs(tmpft::partial_trace(prod, 2, 3, Subsystem::First) - sa), 1e-14);
    EXPECT_LT(max_abs(tmpft::partial_trace(prod, 2, 3, Subsystem::Second) - sb), 1e-14);
}

TEST(PartialTrace, WernerHalfMatchesExplicitSum) {
    const ComplexMatrix rho = werner(0.5);
    const auto expected = oracle::ptrace(oracle::from(rho), 2, 2, false);
    const ComplexMatrix got = tmpft::partial_trace(rho, 2, 2, Subsystem::Second);
    EXPECT_LT(oracle::max_abs_diff(oracle::from(got), expected), 1e-15);
    EXPECT_LT(max_abs(got - 0.5 * ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(PartialTrace, RandomStatesMatchLoopOracle) {
    std::mt19937_64 rng(5);
    for (std::size_t d1 = 1; d1 <= 3; ++d1)
        for (std::size_t d2 = 1; d2 <= 3; ++d2) {
            const ComplexMatrix rho = random_state(d1 * d2, rng);
            for (bool first : {true, false}) {
                const auto got = tmpft::partial_trace(rho, d1, d2, first ? Subsystem::First : Subsystem::Second);
                EXPECT_LT(oracle::max_abs_diff(oracle::from(got), oracle::ptrace(oracle::from(rho), d1, d2, first)),
                          1e-14);
            }
        }
}

TEST(PartialTrace, DimensionMismatchThrows) {
    EXPECT_THROW(tmpft::partial_trace(ComplexMatrix::Identity(4, 4), 2, 3, Subsystem::First),
                 tmpft::DimensionError);
}

TEST(SpectralDecompose, MaximallyMixedQubitUsesComputationalBasis) {
    const auto d = tmpft::spectral_decompose(0.5 * ComplexMatrix::Identity(2, 2));
    ASSERT_EQ(d.dim(), 2u);
    EXPECT_DOUBLE_EQ(d.probabilities[0], 0.5);
    EXPECT_DOUBLE_EQ(d.probabilities[1], 0.5);
    EXPECT_LT(max_abs(d.eigenvectors - ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(SpectralDecompose, WernerSpectrumInBellBasis) {
    for (double p : {0.0, 0.3, 0.5, 0.9, 1.0}) {
        const auto d = tmpft::with_eigenbasis(tmpft::spectral_decompose(werner(p)), tmpft::bell_basis());
        EXPECT_NEAR(d.probabilities[0], (1 + 3 * p) / 4, 1e-14) << p;
        for (int k = 1; k < 4; ++k) EXPECT_NEAR(d.probabilities[k], (1 - p) / 4, 1e-14) << p;
        EXPECT_LT(max_abs(d.reconstruct() - werner(p)), 1e-14);
    }
}

TEST(SpectralDecompose, DegenerateBlockTieBreakIsDeterministic) {
    // The degenerate block of a Werner state is fixed by the subspace alone, so
    // any unitary conjugation that preserves the state gives the same vectors.
    const auto d = tmpft::spectral_decompose(werner(0.4));
    const ComplexVector phi = tmpft::bell_basis().col(0);
    EXPECT_NEAR(std::norm(d.eigenvectors.col(0).dot(phi)), 1.0, 1e-14);
    const auto again = tmpft::spectral_decompose(werner(0.4));
    EXPECT_EQ(max_abs(d.eigenvectors - again.eigenvectors), 0.0);
    EXPECT_LT(tmpft::orthonormality_defect(d.eigenvectors), 1e-14);
    for (Eigen::Index k = 0; k < 4; ++k) {
        const double best = d.eigenvectors.col(k).cwiseAbs().maxCoeff();
        Eigen::Index arg = 0;
        while (std::abs(d.eigenvectors(arg, k)) < best - 1e-12) ++arg;
        EXPECT_GT(d.eigenvectors(arg, k).real(), 0.0);
        EXPECT_EQ(d.eigenvectors(arg, k).imag(), 0.0);
    }
}

TEST(SpectralDecompose, RandomHermitianReconstructs) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 20; ++k) {
        const ComplexMatrix rho = random_state(1 + k % 9, rng);
        const auto d = tmpft::spectral_decompose(rho);
        EXPECT_LT(max_abs(d.reconstruct() - rho), 1e-10);
        EXPECT_LT(tmpft::orthonormality_defect(d.eigenvectors), 1e-10);
        for (std::size_t i = 1; i < d.dim(); ++i) EXPECT_GE(d.probabilities[i - 1], d.probabilities[i]);
        double total = 0.0;
        for (double p : d.probabilities) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(SpectralDecompose, SupportMaskMarksPositiveEntries) {
    const auto d = tmpft::spectral_decompose(diag({0.7, 0.3, 1e-14, 0.0}));
    EXPECT_EQ(d.support_mask, (std::vector<bool>{true, true, false, false}));
    EXPECT_EQ(d.probabilities[2], 0.0);
}

TEST(SpectralDecompose, NonHermitianThrows) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 1) = 0.1;
    EXPECT_THROW(tmpft::spectral_decompose(m), tmpft::HermiticityError);
}

TEST(SpectralDecompose, OverrideOutsideDegenerateBlockRejected) {
    const auto d = tmpft::spectral_decompose(diag({0.7, 0.3}));
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    EXPECT_THROW(tmpft::with_eigenbasis(d, h), tmpft::ConsistencyError);
}

TEST(DensityOperator, RejectsInvalidStates) {
    EXPECT_THROW(DensityOperator::from_matrix(diag({0.6, 0.6})), tmpft::StateError);
    EXPECT_THROW(DensityOperator::from_matrix(diag({1.2, -0.2})), tmpft::StateError);
    ComplexMatrix nan = diag({0.5, 0.5});
    nan(0, 1) = std::nan("");
    EXPECT_THROW(DensityOperator::from_matrix(nan), tmpft::DomainError);
}

TEST(Gibbs, DegenerateLevelsAreUniform) {
    const auto p = tmpft::gibbs_probabilities({{0.0, 0.0}, 1.0});
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Gibbs, LogTwoGapGivesTwoThirds) {
    const double beta = 1.7;
    const auto p = tmpft::gibbs_probabilities({{0.0, std::log(2.0) / beta}, beta});
    EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(Gibbs, HugeGapConcentratesOnGround) {
    const auto p = tmpft::gibbs_probabilities({{0.0, 1e6}, 1.0});
    EXPECT_EQ(p[0], 1.0);
    EXPECT_EQ(p[1], 0.0);
    const auto rho = tmpft::gibbs_state({{0.0, 1e6}, 1.0});
    EXPECT_EQ(rho.matrix()(0, 0).real(), 1.0);
}

TEST(Gibbs, InvalidBetaThrows) {
    EXPECT_THROW(tmpft::gibbs_probabilities({{0.0, 1.0}, 0.0}), tmpft::DomainError);
    EXPECT_THROW(tmpft::gibbs_probabilities({{}, 1.0}), tmpft::DimensionError);
}

TEST(Evolve, IdentityLeavesStateUnchanged) {
    std::mt19937_64 rng(2);
    const auto rho = DensityOperator::from_matrix(random_state(3, rng));
    const auto out = tmpft::evolve(rho, ComplexMatrix::Identity(3, 3));
    EXPECT_LT(max_abs(out.matrix() - rho.matrix()), 1e-15);
}

TEST(Evolve, SwapExchangesQubits) {
    ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    const auto out = tmpft::evolve(DensityOperator::from_matrix(diag({0, 1, 0, 0})), swap);
    EXPECT_LT(max_abs(out.matrix() - diag({0, 0, 1, 0})), 1e-15);
}

TEST(Evolve, RandomUnitaryPreservesSpectrum) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 10; ++k) {
        const std::size_t n = 2 + k % 6;
        const auto rho = DensityOperator::from_matrix(random_state(n, rng));
        const auto out = tmpft::evolve(rho, tmpft::haar_unitary(n, rng));
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(out.decomposition().probabilities[i], rho.decomposition().probabilities[i], 1e-10);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    }
}

TEST(Evolve, NonUnitaryThrows) {
    const auto rho = DensityOperator::from_matrix(diag({0.5, 0.5}));
    EXPECT_THROW(tmpft::evolve(rho, 1.01 * ComplexMatrix::Identity(2, 2)), tmpft::UnitarityError);
    EXPECT_THROW(tmpft::evolve(rho, ComplexMatrix::Identity(3, 3)), tmpft::DimensionError);
}

TEST(Evolve, ReducedFinalStateIsValid) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 10; ++k) {
        const auto rho = DensityOperator::from_matrix(random_state(4, rng));
        const auto bath = tmpft::gibbs_state({{0.0, 0.4, 1.3}, 1.0});
        const auto joint = tmpft::evolve(tmpft::tensor_product(rho, bath), tmpft::haar_unitary(12, rng));
        const auto reduced = tmpft::partial_trace(joint, 4, 3, Subsystem::First);
        EXPECT_NEAR(reduced.matrix().trace().real(), 1.0, 1e-10);
        EXPECT_GE(reduced.decomposition().probabilities.back(), 0.0);
    }
}

TEST(TimeReverse, RealVectorsUnchanged) {
    const auto d = tmpft::spectral_decompose(werner(0.3));
    const auto r = tmpft::time_reverse(d);
    EXPECT_LT(max_abs(r.eigenvectors - d.eigenvectors.conjugate()), 1e-16);
    const auto bell = tmpft::with_eigenbasis(d, tmpft::bell_basis());
    EXPECT_EQ(max_abs(tmpft::time_reverse(bell).eigenvectors - bell.eigenvectors), 0.0);
}

TEST(TimeReverse, ConjugatesComplexVector) {
    tmpft::SpectralDecomposition d;
    d.probabilities = {1.0, 0.0};
    d.support_mask = {true, false};
    d.eigenvectors.resize(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    d.eigenvectors << Complex(s, 0), Complex(s, 0), Complex(0, s), Complex(0, -s);
    const auto r = tmpft::time_reverse(d);
    EXPECT_EQ(r.eigenvectors(1, 0), Complex(0, -s));
    EXPECT_EQ(r.probabilities, d.probabilities);
}

TEST(TimeReverse, InvolutionPreservingOverlapModuli) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 5; ++k) {
        const auto d = tmpft::spectral_decompose(random_state(5, rng));
        const auto twice = tmpft::time_reverse(tmpft::time_reverse(d));
        EXPECT_EQ(max_abs(twice.eigenvectors - d.eigenvectors), 0.0);
        const ComplexMatrix u = tmpft::haar_unitary(5, rng);
        tmpft::SpectralDecomposition rotated = d;
        rotated.eigenvectors = u;
        const auto r = tmpft::time_reverse(rotated);
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = 0; j < 5; ++j)
                EXPECT_NEAR(std::abs(r.eigenvectors.col(i).dot(d.eigenvectors.conjugate().col(j))),
                            std::abs(u.col(i).dot(d.eigenvectors.col(j))), 1e-12);
    }
}

TEST(TimeReverse, UnitaryFactorApplied) {
    const auto d = tmpft::spectral_decompose(diag({0.6, 0.4}));
    ComplexMatrix y(2, 2);
    y << 0, -1, 1, 0;
    const auto r = tmpft::time_reverse(d, y);
    EXPECT_LT(max_abs(r.eigenvectors - y * d.eigenvectors.conjugate()), 1e-16);
    EXPECT_LT(max_abs(tmpft::time_reverse_operator(y, y) - y * y.conjugate() * y.adjoint()), 1e-16);
}

TEST(Entropy, PureAndMaximallyMixed) {
    EXPECT_EQ(tmpft::von_neumann_entropy(DensityOperator::from_matrix(diag({1, 0, 0}))), 0.0);
    EXPECT_NEAR(tmpft::von_neumann_entropy(DensityOperator::from_matrix(diag({0.5, 0.5}))),
                std::log(2.0), 1e-15);
}

TEST(Entropy, WernerEigenvalueSum) {
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double a = (1 + 3 * p) / 4, b = (1 - p) / 4;
        const double expected = -(a > 0 ? a * std::log(a) : 0) - 3 * (b > 0 ? b * std::log(b) : 0);
        EXPECT_NEAR(tmpft::von_neumann_entropy(DensityOperator::from_matrix(werner(p))), expected, 1e-13);
    }
}

TEST(Entropy, SubadditivityAndDimensionBound) {
    std::mt19937_64 rng(37);
    for (int k = 0; k < 30; ++k) {
        const std::size_t da = 1 + k % 3, db = 1 + (k / 3) % 3;
        const auto rho = DensityOperator::from_matrix(random_state(da * db, rng));
        const double s = tmpft::von_neumann_entropy(rho);
        const double sa = tmpft::von_neumann_entropy(tmpft::partial_trace(rho, da, db, Subsystem::First));
        const double sb = tmpft::von_neumann_entropy(tmpft::partial_trace(rho, da, db, Subsystem::Second));
        EXPECT_LE(s, sa + sb + 1e-10);
        EXPECT_LE(s, std::log(static_cast<double>(da * db)) + 1e-12);
        EXPECT_GE(s, 0.0);
        EXPECT_NEAR(tmpft::quantum_mutual_information(rho, da, db), sa + sb - s, 1e-14);
    }
}

}  // namespace

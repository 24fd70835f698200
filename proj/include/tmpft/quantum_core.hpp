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

// Dense linear algebra for finite-dimensional quantum states: composition,
// reduction, spectra, thermal states, unitary evolution and time reversal.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmpft/errors.hpp"
#include "tmpft/tolerances.hpp"

namespace tmpft {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Subsystem { First, Second };

namespace detail {

inline Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

inline double max_abs_entry(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

// Rotate v so that its largest-modulus component is real and positive. The
// first index within 1e-12 of the maximum wins, which keeps ties deterministic.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v(i)));
    if (best == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= best - 1e-12) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = Complex(v(i).real(), 0.0);
            return;
        }
    }
}

}  // namespace detail

inline double hermiticity_defect(const ComplexMatrix& m) {
    return detail::max_abs_entry(m - m.adjoint());
}

inline double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return detail::max_abs_entry(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline double orthonormality_defect(const ComplexMatrix& columns) {
    return detail::max_abs_entry(columns.adjoint() * columns -
                                 ComplexMatrix::Identity(columns.cols(), columns.cols()));
}

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out = Eigen::kroneckerProduct(a, b);
    return out;
}

inline ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out = Eigen::kroneckerProduct(a, b);
    return out;
}

/// Partial trace of an operator on C^d1 (x) C^d2, keeping the requested factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d1, std::size_t d2,
                                   Subsystem keep) {
    if (d1 == 0 || d2 == 0 || m.rows() != m.cols() ||
        static_cast<std::size_t>(m.rows()) != d1 * d2) {
        throw DimensionError("partial_trace: matrix of size " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " does not match dims " +
                             std::to_string(d1) + "x" + std::to_string(d2));
    }
    using detail::idx;
    if (keep == Subsystem::First) {
        ComplexMatrix out = ComplexMatrix::Zero(idx(d1), idx(d1));
        for (std::size_t i = 0; i < d1; ++i)
            for (std::size_t j = 0; j < d1; ++j)
                for (std::size_t k = 0; k < d2; ++k)
                    out(idx(i), idx(j)) += m(idx(i * d2 + k), idx(j * d2 + k));
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(idx(d2), idx(d2));
    for (std::size_t i = 0; i < d2; ++i)
        for (std::size_t j = 0; j < d2; ++j)
            for (std::size_t k = 0; k < d1; ++k)
                out(idx(i), idx(j)) += m(idx(k * d2 + i), idx(k * d2 + j));
    return out;
}

// ------------------------------------------------------------------------------
// Spectra

/// Eigenpairs of a Hermitian matrix, eigenvalues descending. Inside each
/// degenerate block the basis is rebuilt by ordered Gram-Schmidt of the
/// projected computational basis vectors; every eigenvector carries the phase
/// that makes its largest-modulus component real positive.
struct HermitianEigensystem {
    RealVector values;
    ComplexMatrix vectors;  // columns
};

/// [begin, end) ranges of equal eigenvalues in a descending list.
inline std::vector<std::pair<std::size_t, std::size_t>> degenerate_blocks(
    const std::vector<double>& descending, double tolerance) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    if (descending.empty()) return blocks;
    double scale = 1.0;
    for (double v : descending) scale = std::max(scale, std::abs(v));
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= descending.size(); ++i) {
        if (i == descending.size() ||
            std::abs(descending[i - 1] - descending[i]) > tolerance * scale) {
            blocks.emplace_back(begin, i);
            begin = i;
        }
    }
    return blocks;
}

namespace detail {

// Replace the columns [begin, end) of `vectors` by the canonical basis of the
// subspace they span.
inline void canonicalize_block(ComplexMatrix& vectors, std::size_t begin, std::size_t end) {
    const auto n = vectors.rows();
    const auto k = idx(end - begin);
    const ComplexMatrix block = vectors.middleCols(idx(begin), k);
    ComplexMatrix chosen(n, k);
    Eigen::Index found = 0;
    for (Eigen::Index j = 0; j < n && found < k; ++j) {
        ComplexVector v = block * block.row(j).adjoint();  // P e_j
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < found; ++c) {
                v -= chosen.col(c) * chosen.col(c).dot(v);
            }
        }
        const double norm = v.norm();
        if (norm > 1e-6) {
            chosen.col(found++) = v / norm;
        }
    }
    // Completion from the solver's own vectors; only reachable when the block
    // is numerically invisible from every computational basis vector.
    for (Eigen::Index c = 0; c < k && found < k; ++c) {
        ComplexVector v = block.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index q = 0; q < found; ++q) v -= chosen.col(q) * chosen.col(q).dot(v);
        const double norm = v.norm();
        if (norm > 1e-6) chosen.col(found++) = v / norm;
    }
    vectors.middleCols(idx(begin), k) = chosen;
}

}  // namespace detail

inline HermitianEigensystem eigen_decompose_hermitian(const ComplexMatrix& h,
                                                      const Tolerances& tol = {}) {
    detail::require_square(h, "eigen_decompose_hermitian");
    detail::require_finite(h, "eigen_decompose_hermitian");
    const double defect = hermiticity_defect(h);
    if (defect > tol.hermiticity) {
        throw HermiticityError("eigen_decompose_hermitian: matrix is not Hermitian (defect " +
                               std::to_string(defect) + ")");
    }
    const ComplexMatrix sym = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error("eigen_decompose_hermitian: eigensolver failed");
    }
    const auto n = sym.rows();
    HermitianEigensystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // ascending -> descending
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    std::vector<double> vals(out.values.data(), out.values.data() + n);
    for (const auto& [begin, end] : degenerate_blocks(vals, tol.degeneracy)) {
        if (end - begin > 1) {
            double mean = 0.0;
            for (std::size_t i = begin; i < end; ++i) mean += vals[i];
            mean /= static_cast<double>(end - begin);
            for (std::size_t i = begin; i < end; ++i) out.values(detail::idx(i)) = mean;
            detail::canonicalize_block(out.vectors, begin, end);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) detail::fix_phase(out.vectors.col(i));
    return out;
}

/// Probabilities and eigenvectors of a density operator. Probabilities at or
/// below `support` (relative to the largest one) are stored as exact zeros and
/// flagged outside the support.
struct SpectralDecomposition {
    std::vector<double> probabilities;  // descending
    ComplexMatrix eigenvectors;         // column k pairs with probabilities[k]
    std::vector<bool> support_mask;

    std::size_t dim() const { return probabilities.size(); }
    ComplexVector vector(std::size_t k) const { return eigenvectors.col(detail::idx(k)); }

    ComplexMatrix reconstruct() const {
        const auto n = eigenvectors.rows();
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (std::size_t k = 0; k < probabilities.size(); ++k) {
            const auto& v = eigenvectors.col(detail::idx(k));
            out += probabilities[k] * (v * v.adjoint());
        }
        return out;
    }
};

namespace detail {

inline SpectralDecomposition to_spectral(const HermitianEigensystem& eig, const Tolerances& tol) {
    SpectralDecomposition out;
    const auto n = static_cast<std::size_t>(eig.values.size());
    out.eigenvectors = eig.vectors;
    out.probabilities.resize(n);
    out.support_mask.resize(n);
    const double largest = std::max(eig.values(0), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::clamp(eig.values(detail::idx(k)), 0.0, 1.0);
        const bool supported = p > tol.support * largest;
        out.probabilities[k] = supported ? p : 0.0;
        out.support_mask[k] = supported;
    }
    return out;
}

}  // namespace detail

inline SpectralDecomposition spectral_decompose(const ComplexMatrix& rho,
                                                const Tolerances& tol = {}) {
    return detail::to_spectral(eigen_decompose_hermitian(rho, tol), tol);
}

/// Swap in a different eigenbasis for an existing decomposition. Only changes
/// inside degenerate blocks can pass: the new vectors must be orthonormal and
/// must reconstruct the same operator.
inline SpectralDecomposition with_eigenbasis(const SpectralDecomposition& decomp,
                                             const ComplexMatrix& vectors,
                                             const Tolerances& tol = {}) {
    if (vectors.rows() != decomp.eigenvectors.rows() ||
        vectors.cols() != decomp.eigenvectors.cols()) {
        throw DimensionError("with_eigenbasis: basis shape does not match the decomposition");
    }
    if (orthonormality_defect(vectors) > tol.orthonormality) {
        throw ConsistencyError("with_eigenbasis: replacement vectors are not orthonormal");
    }
    SpectralDecomposition out = decomp;
    out.eigenvectors = vectors;
    const double mismatch = detail::max_abs_entry(out.reconstruct() - decomp.reconstruct());
    if (mismatch > tol.reconstruction) {
        throw ConsistencyError(
            "with_eigenbasis: replacement basis does not diagonalize the state (mismatch " +
            std::to_string(mismatch) + ")");
    }
    return out;
}

/// Time reversal Theta = V K with K complex conjugation in the computational
/// basis and V an optional unitary factor (identity when absent).
inline SpectralDecomposition time_reverse(const SpectralDecomposition& decomp,
                                          const std::optional<ComplexMatrix>& unitary_factor = {}) {
    SpectralDecomposition out = decomp;
    out.eigenvectors = decomp.eigenvectors.conjugate();
    if (unitary_factor) out.eigenvectors = (*unitary_factor) * out.eigenvectors;
    return out;
}

/// The operator Theta A Theta^{-1} for Theta = V K.
inline ComplexMatrix time_reverse_operator(const ComplexMatrix& a,
                                           const std::optional<ComplexMatrix>& unitary_factor = {}) {
    if (!unitary_factor) return a.conjugate();
    return (*unitary_factor) * a.conjugate() * unitary_factor->adjoint();
}

// ------------------------------------------------------------------------------
// Density operators

/// Validated density operator with its spectral decomposition attached.
class DensityOperator {
 public:
    static DensityOperator from_matrix(const ComplexMatrix& m, const Tolerances& tol = {}) {
        detail::require_square(m, "DensityOperator");
        detail::require_finite(m, "DensityOperator");
        const Complex tr = m.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace) {
            throw StateError("DensityOperator: trace is " + std::to_string(tr.real()) + "+" +
                             std::to_string(tr.imag()) + "i, expected 1");
        }
        const HermitianEigensystem eig = eigen_decompose_hermitian(m, tol);
        const double smallest = eig.values(eig.values.size() - 1);
        if (smallest < -tol.psd) {
            throw StateError("DensityOperator: negative eigenvalue " + std::to_string(smallest));
        }
        DensityOperator out;
        out.matrix_ = (m + m.adjoint()) / 2.0;
        out.decomposition_ = detail::to_spectral(eig, tol);
        return out;
    }

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }
    const SpectralDecomposition& decomposition() const { return decomposition_; }

 private:
    DensityOperator() = default;
    ComplexMatrix matrix_;
    SpectralDecomposition decomposition_;
};

inline DensityOperator partial_trace(const DensityOperator& rho, std::size_t d1, std::size_t d2,
                                     Subsystem keep, const Tolerances& tol = {}) {
    return DensityOperator::from_matrix(partial_trace(rho.matrix(), d1, d2, keep), tol);
}

inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b,
                                      const Tolerances& tol = {}) {
    return DensityOperator::from_matrix(tensor_product(a.matrix(), b.matrix()), tol);
}

/// U rho U^dagger.
inline DensityOperator evolve(const DensityOperator& rho, const ComplexMatrix& u,
                              const Tolerances& tol = {}) {
    if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != rho.dim()) {
        throw DimensionError("evolve: unitary of size " + std::to_string(u.rows()) + "x" +
                             std::to_string(u.cols()) + " does not act on dimension " +
                             std::to_string(rho.dim()));
    }
    const double defect = unitarity_defect(u);
    if (defect > tol.unitarity) {
        throw UnitarityError("evolve: operator is not unitary (defect " + std::to_string(defect) +
                             ")");
    }
    return DensityOperator::from_matrix(u * rho.matrix() * u.adjoint(), tol);
}

// ------------------------------------------------------------------------------
// Entropies and thermal states

inline double shannon_entropy(const std::vector<double>& probabilities) {
    double s = 0.0;
    for (double p : probabilities)
        if (p > 0.0) s -= p * std::log(p);
    return s;
}

/// -Tr(rho ln rho) in nats, with 0 ln 0 = 0.
inline double von_neumann_entropy(const DensityOperator& rho) {
    return shannon_entropy(rho.decomposition().probabilities);
}

/// S(A) + S(B) - S(AB) for a state on C^dA (x) C^dB.
inline double quantum_mutual_information(const DensityOperator& rho_ab, std::size_t dim_a,
                                         std::size_t dim_b, const Tolerances& tol = {}) {
    const auto rho_a = partial_trace(rho_ab, dim_a, dim_b, Subsystem::First, tol);
    const auto rho_b = partial_trace(rho_ab, dim_a, dim_b, Subsystem::Second, tol);
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho_ab);
}

/// Reservoir Hamiltonian diagonal in the computational basis.
struct ReservoirSpec {
    std::vector<double> energies;
    double beta = 1.0;

    std::size_t dim() const { return energies.size(); }
};

/// Gibbs weights exp(-beta E_r) / Z, evaluated with a shifted exponent so
/// that large gaps underflow cleanly instead of overflowing.
inline std::vector<double> gibbs_probabilities(const ReservoirSpec& spec) {
    if (spec.energies.empty()) throw DimensionError("gibbs_probabilities: reservoir has no levels");
    if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
        throw DomainError("gibbs_probabilities: beta must be positive and finite");
    }
    for (double e : spec.energies)
        if (!std::isfinite(e)) throw DomainError("gibbs_probabilities: energies must be finite");
    const double ground = *std::min_element(spec.energies.begin(), spec.energies.end());
    std::vector<double> weights(spec.energies.size());
    double z = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        weights[r] = std::exp(-spec.beta * (spec.energies[r] - ground));
        z += weights[r];
    }
    for (double& w : weights) w /= z;
    return weights;
}

inline DensityOperator gibbs_state(const ReservoirSpec& spec, const Tolerances& tol = {}) {
    const auto p = gibbs_probabilities(spec);
    ComplexMatrix m = ComplexMatrix::Zero(detail::idx(p.size()), detail::idx(p.size()));
    for (std::size_t r = 0; r < p.size(); ++r) m(detail::idx(r), detail::idx(r)) = p[r];
    return DensityOperator::from_matrix(m, tol);
}

}  // namespace tmpft

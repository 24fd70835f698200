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

#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tmpft/errors.hpp"
#include "tmpft/fluctuation_theorems.hpp"
#include "tmpft/quantum_core.hpp"
#include "tmpft/tmp_probabilities.hpp"
#include "tmpft/tolerances.hpp"

namespace tmpft {

struct ReferenceValue {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;

    bool passed() const { return std::abs(actual - expected) <= tolerance; }
};

/// A qualitative statement about a scenario, such as a strict ordering.
struct ScenarioClaim {
    std::string name;
    bool holds = false;
};

struct ScenarioResult {
    std::string name;
    Process process;
    EvaluationOptions options;
    Evaluation evaluation;
    std::vector<ReferenceValue> references;
    std::vector<ScenarioClaim> claims;

    bool references_passed() const {
        for (const auto& r : references)
            if (!r.passed()) return false;
        for (const auto& c : claims)
            if (!c.holds) return false;
        return true;
    }
};

/// Evaluates an arbitrary prepared process; no reference values attached.
inline ScenarioResult run_process(std::string name, Process process,
                                  EvaluationOptions options = {}) {
    ScenarioResult out;
    out.name = std::move(name);
    out.evaluation = evaluate(process, options);
    out.process = std::move(process);
    out.options = std::move(options);
    return out;
}

// ------------------------------------------------------------------------------
// Bell states and closed forms

/// Columns |Phi+>, |Phi->, |Psi+>, |Psi-> in the computational basis of two qubits.
inline ComplexMatrix bell_basis() {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix b = ComplexMatrix::Zero(4, 4);
    b(0, 0) = s;  b(3, 0) = s;
    b(0, 1) = s;  b(3, 1) = -s;
    b(1, 2) = s;  b(2, 2) = s;
    b(1, 3) = s;  b(2, 3) = -s;
    return b;
}

namespace closed_form {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Mean information change of the isothermal Werner process (minus the
/// initial mutual information of the Werner state).
inline double werner_mean_delta_i(double p) {
    return -2.0 * std::log(2.0) - xlogx((1.0 + 3.0 * p) / 4.0) - 3.0 * xlogx((1.0 - p) / 4.0);
}

inline double werner_gamma(double p, double support) {
    return (1.0 - p) / 4.0 > support * (1.0 + 3.0 * p) / 4.0 ? 1.0 : 0.25;
}

inline double counterexample_mean_delta_i(double p) {
    return xlogx(1.0 + p) + xlogx(1.0 - p);
}

inline double counterexample_reverse_exp(double p) {
    return (1.0 + p - p * p) / ((1.0 + p) * (1.0 + p) * (1.0 - p));
}

}  // namespace closed_form

// ------------------------------------------------------------------------------
// Werner state, isothermal erasure of correlations

/// Two qubits in p|Phi+><Phi+| + (1-p) I/4 driven quasi-statically to |00>
/// by contact with a bath. The global transition is deterministic (m -> 0'),
/// the reverse process starts from |00> and relaxes to I/4, and every
/// trajectory carries beta Q = -2 ln 2.
inline ScenarioResult werner_isothermal(double p, double beta, const Tolerances& tol = {}) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("werner_isothermal: p must lie in [0, 1]");
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("werner_isothermal: beta must be positive and finite");
    }
    const double ln2 = std::log(2.0);
    const ComplexMatrix bell = bell_basis();
    const ComplexMatrix phi = bell.col(0);
    const ComplexMatrix rho_i =
        p * (phi * phi.adjoint()) + (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
    ComplexMatrix rho_f = ComplexMatrix::Zero(4, 4);
    rho_f(0, 0) = 1.0;

    Process process;
    process.space = TupleSpace(2, 2, 1);
    auto& bases = process.bases;
    bases.initial_global =
        with_eigenbasis(DensityOperator::from_matrix(rho_i, tol).decomposition(), bell, tol);
    bases.initial_a = spectral_decompose(partial_trace(rho_i, 2, 2, Subsystem::First), tol);
    bases.initial_b = spectral_decompose(partial_trace(rho_i, 2, 2, Subsystem::Second), tol);
    bases.final_global = with_eigenbasis(DensityOperator::from_matrix(rho_f, tol).decomposition(),
                                         ComplexMatrix::Identity(4, 4), tol);
    bases.final_a = spectral_decompose(partial_trace(rho_f, 2, 2, Subsystem::First), tol);
    bases.final_b = spectral_decompose(partial_trace(rho_f, 2, 2, Subsystem::Second), tol);

    const std::size_t d = 4;
    auto& kernel = process.kernel;
    kernel.forward.assign(d * d, 0.0);
    kernel.reverse.assign(d * d, 0.0);
    for (std::size_t m = 0; m < d; ++m) {
        kernel.forward[process.space.kernel_index(m, 0, 0, 0)] =
            bases.initial_global.probabilities[m];
        for (std::size_t mf = 0; mf < d; ++mf)
            kernel.reverse[process.space.kernel_index(m, mf, 0, 0)] =
                bases.final_global.probabilities[mf] / 4.0;
    }
    kernel.heat_exponent = {-2.0 * ln2};
    process.reservoir_initial = {1.0};
    process.rho_initial = rho_i;
    process.rho_final = rho_f;

    EvaluationOptions options;
    options.tol = tol;
    options.beta = beta;
    options.partition = HeatPartition::proportional(0.5, 0.5);
    options.free_energy = FreeEnergyInputs{0.0, 0.0};

    auto result = run_process("werner", std::move(process), options);
    const auto& rep = result.evaluation.report;
    const auto& avg = rep.averages;
    const double mean_di = closed_form::werner_mean_delta_i(p);
    const double gamma = closed_form::werner_gamma(p, tol.support);
    const auto bound_slack = [&](const std::string& name) {
        const auto* b = find_bound(rep.bounds, name);
        return b ? b->slack : std::numeric_limits<double>::quiet_NaN();
    };
    const double eps = tol.ft;
    result.references = {
        {"gamma_restricted", gamma, rep.gamma_restricted, eps},
        {"integral_ft_lhs", gamma, rep.integral_ft_lhs, eps},
        {"reverse_avg_exp_di", 1.0, rep.reverse_avg_exp_di, eps},
        {"reverse_ft_lhs", 1.0, rep.reverse_ft_lhs, eps},
        {"mean_beta_q", -2.0 * ln2, avg.beta_q, eps},
        {"mean_delta_s_a", -ln2, avg.delta_s_a, eps},
        {"mean_delta_s_b", -ln2, avg.delta_s_b, eps},
        {"mean_delta_i", mean_di, avg.delta_i, eps},
        {"local_entropy_production", 0.0, avg.delta_s_a + avg.delta_s_b - avg.beta_q, eps},
        {"bound_gap", -mean_di, rep.information.bound_gap, eps},
        {"heat_bound_reverse_slack", 0.0, bound_slack("heat_bound_reverse"), eps},
        {"heat_bound_integral_slack", -mean_di + std::log(gamma),
         bound_slack("heat_bound_integral"), eps},
    };
    return result;
}

// ------------------------------------------------------------------------------
// Adiabatic map of product states onto Bell states

/// Unitary sending the computational state |j> to the j-th Bell state.
inline ComplexMatrix product_to_bell_unitary() { return bell_basis(); }

/// Two qubits diagonal in the product basis, mapped unitarily onto the Bell
/// basis with no bath. Evaluated through the generic unitary pipeline and
/// compared with the closed forms.
inline ScenarioResult bell_adiabatic_counterexample(double p, const Tolerances& tol = {}) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("bell_adiabatic_counterexample: p must lie in (0, 1)");
    }
    BipartiteSystem system;
    system.dim_a = 2;
    system.dim_b = 2;
    system.rho_ab = ComplexMatrix::Zero(4, 4);
    system.rho_ab(0, 0) = (1.0 + 3.0 * p) / 4.0;
    for (int j = 1; j < 4; ++j) system.rho_ab(j, j) = (1.0 - p) / 4.0;
    system.reservoir = ReservoirSpec{{0.0}, 1.0};
    system.unitary = product_to_bell_unitary();

    EvaluationOptions options;
    options.tol = tol;
    auto result = run_process("counterexample", prepare_process(system, {}, tol), options);
    const auto& rep = result.evaluation.report;
    result.references = {
        {"mean_delta_i", closed_form::counterexample_mean_delta_i(p), rep.averages.delta_i, tol.ft},
        {"reverse_avg_exp_di", closed_form::counterexample_reverse_exp(p), rep.reverse_avg_exp_di,
         tol.ft},
        {"gamma_restricted", 1.0, rep.gamma_restricted, tol.ft},
    };
    result.claims = {
        {"reverse_term_below_mean_delta_i",
         -std::log(rep.reverse_avg_exp_di) < rep.averages.delta_i},
    };
    return result;
}

// ------------------------------------------------------------------------------
// Random instances

struct RandomOptions {
    double beta = 1.0;
    std::size_t rank = 0;              // 0 means full rank
    bool degenerate_spectrum = false;  // eigenvalues come in equal pairs
    bool decoupled_reservoir = false;  // U = U_AB (x) 1_R
};

/// Smallest eigenvalue of a full-rank random state.
inline constexpr double kSpectrumFloor = 1e-6;

/// Haar-distributed unitary from the QR factorization of a complex Ginibre matrix.
inline ComplexMatrix haar_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto k = detail::idx(n);
    ComplexMatrix z(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < k; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    for (Eigen::Index j = 0; j < k; ++j) {
        const Complex r = qr.matrixQR()(j, j);
        if (std::abs(r) > 0.0) q.col(j) *= r / std::abs(r);
    }
    return q;
}

/// Uniform point on the simplex of `n` entries, lifted so each entry is at
/// least `floor`.
inline std::vector<double> dirichlet_spectrum(std::size_t n, double floor, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> x(n);
    double sum = 0.0;
    for (double& v : x) sum += (v = expo(rng));
    const double scale = 1.0 - static_cast<double>(n) * floor;
    for (double& v : x) v = floor + scale * v / sum;
    return x;
}

namespace detail {

inline void require_random_dims(std::size_t da, std::size_t db, std::size_t dr) {
    (void)TupleSpace(da, db, dr);  // throws SizeError / DimensionError
}

inline std::vector<double> random_spectrum(std::size_t d, const RandomOptions& options,
                                           std::mt19937_64& rng) {
    std::vector<double> spectrum(d, 0.0);
    if (options.degenerate_spectrum) {
        const std::size_t levels = (d + 1) / 2;
        const auto w = dirichlet_spectrum(levels, kSpectrumFloor, rng);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t level = k / 2;
            const std::size_t multiplicity = (level == levels - 1 && d % 2 == 1) ? 1 : 2;
            spectrum[k] = w[level] / static_cast<double>(multiplicity);
        }
        return spectrum;
    }
    const std::size_t rank = options.rank == 0 ? d : std::min(options.rank, d);
    const auto w = dirichlet_spectrum(rank, rank == d ? kSpectrumFloor : 0.0, rng);
    std::copy(w.begin(), w.end(), spectrum.begin());
    return spectrum;
}

inline ReservoirSpec random_reservoir(std::size_t dr, double beta, std::mt19937_64& rng) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("random instance: beta must be positive and finite");
    }
    std::uniform_real_distribution<double> energy(0.0, 5.0 / beta);
    ReservoirSpec reservoir;
    reservoir.beta = beta;
    reservoir.energies.resize(dr);
    for (double& e : reservoir.energies) e = energy(rng);
    return reservoir;
}

}  // namespace detail

/// Haar-rotated random state, random bath levels in [0, 5/beta] and a Haar
/// global unitary, all from one seed.
inline BipartiteSystem random_instance(std::size_t dim_a, std::size_t dim_b, std::size_t dim_r,
                                       std::uint64_t seed, const RandomOptions& options = {}) {
    detail::require_random_dims(dim_a, dim_b, dim_r);
    std::mt19937_64 rng(seed);
    const std::size_t d = dim_a * dim_b;
    const auto spectrum = detail::random_spectrum(d, options, rng);
    const ComplexMatrix v = haar_unitary(d, rng);
    ComplexMatrix diag = ComplexMatrix::Zero(detail::idx(d), detail::idx(d));
    for (std::size_t k = 0; k < d; ++k) diag(detail::idx(k), detail::idx(k)) = spectrum[k];

    BipartiteSystem system;
    system.dim_a = dim_a;
    system.dim_b = dim_b;
    system.rho_ab = v * diag * v.adjoint();
    system.rho_ab = (system.rho_ab + system.rho_ab.adjoint()).eval() / 2.0;
    system.reservoir = detail::random_reservoir(dim_r, options.beta, rng);
    if (options.decoupled_reservoir) {
        system.unitary = tensor_product(haar_unitary(d, rng),
                                        ComplexMatrix::Identity(detail::idx(dim_r), detail::idx(dim_r)).eval());
    } else {
        system.unitary = haar_unitary(d * dim_r, rng);
    }
    return system;
}

/// State diagonal in the computational product basis, evolved by a random
/// phased permutation of AB (x) R followed by independent local unitaries.
/// Both global eigenbases are then product bases.
inline BipartiteSystem random_classical_instance(std::size_t dim_a, std::size_t dim_b,
                                                 std::size_t dim_r, std::uint64_t seed,
                                                 double beta = 1.0) {
    detail::require_random_dims(dim_a, dim_b, dim_r);
    std::mt19937_64 rng(seed);
    const std::size_t d = dim_a * dim_b, n = d * dim_r;
    const auto spectrum = dirichlet_spectrum(d, kSpectrumFloor, rng);

    BipartiteSystem system;
    system.dim_a = dim_a;
    system.dim_b = dim_b;
    system.rho_ab = ComplexMatrix::Zero(detail::idx(d), detail::idx(d));
    for (std::size_t k = 0; k < d; ++k) system.rho_ab(detail::idx(k), detail::idx(k)) = spectrum[k];
    system.reservoir = detail::random_reservoir(dim_r, beta, rng);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    ComplexMatrix shuffle = ComplexMatrix::Zero(detail::idx(n), detail::idx(n));
    for (std::size_t i = 0; i < n; ++i)
        shuffle(detail::idx(perm[i]), detail::idx(i)) = std::polar(1.0, angle(rng));
    const ComplexMatrix local =
        tensor_product(tensor_product(haar_unitary(dim_a, rng), haar_unitary(dim_b, rng)),
                       ComplexMatrix::Identity(detail::idx(dim_r), detail::idx(dim_r)).eval());
    system.unitary = local * shuffle;
    return system;
}

/// Eigenvectors with every degenerate block rotated by an independent Haar
/// unitary. The result diagonalizes the same operator.
inline ComplexMatrix remix_degenerate_blocks(const SpectralDecomposition& decomp,
                                             std::mt19937_64& rng, const Tolerances& tol = {}) {
    ComplexMatrix vectors = decomp.eigenvectors;
    for (const auto& [begin, end] : degenerate_blocks(decomp.probabilities, tol.degeneracy)) {
        if (end - begin < 2) continue;
        const auto k = detail::idx(end - begin);
        vectors.middleCols(detail::idx(begin), k) =
            decomp.eigenvectors.middleCols(detail::idx(begin), k) * haar_unitary(end - begin, rng);
    }
    return vectors;
}

/// Overrides that remix every degenerate block of all six measurement bases.
inline BasisOverrides remixed_overrides(const MeasurementBases& bases, std::mt19937_64& rng,
                                        const Tolerances& tol = {}) {
    BasisOverrides o;
    o.initial_global = remix_degenerate_blocks(bases.initial_global, rng, tol);
    o.initial_a = remix_degenerate_blocks(bases.initial_a, rng, tol);
    o.initial_b = remix_degenerate_blocks(bases.initial_b, rng, tol);
    o.final_global = remix_degenerate_blocks(bases.final_global, rng, tol);
    o.final_a = remix_degenerate_blocks(bases.final_a, rng, tol);
    o.final_b = remix_degenerate_blocks(bases.final_b, rng, tol);
    return o;
}

}  // namespace tmpft

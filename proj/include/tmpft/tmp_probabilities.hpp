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

// Two-point-measurement joint distributions. Only the global states of AB and
// the reservoir energy are measured; the local outcomes a, b (a', b') enter
// through the conditional weights |<m|a,b>|^2 without disturbing AB.
//
// Tables live on the full tuple space (m, a, b, m', a', b', r, r') in row-major
// order with r' fastest. Every reduction in this file walks that order, so
// results are bitwise reproducible.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmpft/errors.hpp"
#include "tmpft/quantum_core.hpp"
#include "tmpft/tolerances.hpp"

namespace tmpft {

enum class Axis : std::size_t { M = 0, A, B, MFinal, AFinal, BFinal, R, RFinal };

inline constexpr std::array<Axis, 8> kAllAxes = {Axis::M,      Axis::A,      Axis::B,
                                                 Axis::MFinal, Axis::AFinal, Axis::BFinal,
                                                 Axis::R,      Axis::RFinal};

inline const char* axis_name(Axis axis) {
    static constexpr std::array<const char*, 8> names = {"m", "a", "b", "m'", "a'", "b'", "r", "r'"};
    return names[static_cast<std::size_t>(axis)];
}

struct OutcomeTuple {
    std::size_t m = 0, a = 0, b = 0;
    std::size_t m_f = 0, a_f = 0, b_f = 0;
    std::size_t r = 0, r_f = 0;

    std::size_t operator[](Axis axis) const {
        const std::array<std::size_t, 8> v = {m, a, b, m_f, a_f, b_f, r, r_f};
        return v[static_cast<std::size_t>(axis)];
    }

    friend bool operator==(const OutcomeTuple&, const OutcomeTuple&) = default;
};

inline std::string to_string(const OutcomeTuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < kAllAxes.size(); ++i) {
        if (i) out += ",";
        out += std::string(axis_name(kAllAxes[i])) + "=" + std::to_string(t[kAllAxes[i]]);
    }
    return out + ")";
}

/// Index space of the augmented two-point-measurement tables.
class TupleSpace {
 public:
    TupleSpace() = default;

    TupleSpace(std::size_t dim_a, std::size_t dim_b, std::size_t dim_r)
        : dim_a_(dim_a), dim_b_(dim_b), dim_r_(dim_r) {
        if (dim_a == 0 || dim_b == 0 || dim_r == 0) {
            throw DimensionError("TupleSpace: subsystem dimensions must be positive");
        }
        const double entries = std::pow(static_cast<double>(dim_a * dim_b), 4.0) *
                               static_cast<double>(dim_r * dim_r);
        if (entries > static_cast<double>(kMaxTupleEntries)) {
            throw SizeError("TupleSpace: " + std::to_string(static_cast<long long>(entries)) +
                            " tuple entries exceed the dense-table limit of " +
                            std::to_string(kMaxTupleEntries));
        }
    }

    std::size_t dim_a() const { return dim_a_; }
    std::size_t dim_b() const { return dim_b_; }
    std::size_t dim_r() const { return dim_r_; }
    std::size_t dim_global() const { return dim_a_ * dim_b_; }

    std::array<std::size_t, 8> extents() const {
        const std::size_t d = dim_global();
        return {d, dim_a_, dim_b_, d, dim_a_, dim_b_, dim_r_, dim_r_};
    }

    std::size_t size() const {
        const std::size_t d = dim_global();
        return d * d * d * d * dim_r_ * dim_r_;
    }

    std::size_t index(const OutcomeTuple& t) const {
        const std::size_t d = dim_global();
        std::size_t i = t.m;
        i = i * dim_a_ + t.a;
        i = i * dim_b_ + t.b;
        i = i * d + t.m_f;
        i = i * dim_a_ + t.a_f;
        i = i * dim_b_ + t.b_f;
        i = i * dim_r_ + t.r;
        return i * dim_r_ + t.r_f;
    }

    OutcomeTuple tuple(std::size_t i) const {
        OutcomeTuple t;
        const std::size_t d = dim_global();
        t.r_f = i % dim_r_, i /= dim_r_;
        t.r = i % dim_r_, i /= dim_r_;
        t.b_f = i % dim_b_, i /= dim_b_;
        t.a_f = i % dim_a_, i /= dim_a_;
        t.m_f = i % d, i /= d;
        t.b = i % dim_b_, i /= dim_b_;
        t.a = i % dim_a_, i /= dim_a_;
        t.m = i;
        return t;
    }

    /// Calls f(flat_index, tuple) for every tuple in storage order.
    template <class F>
    void for_each(F&& f) const {
        const std::size_t d = dim_global();
        std::size_t i = 0;
        OutcomeTuple t;
        for (t.m = 0; t.m < d; ++t.m)
            for (t.a = 0; t.a < dim_a_; ++t.a)
                for (t.b = 0; t.b < dim_b_; ++t.b)
                    for (t.m_f = 0; t.m_f < d; ++t.m_f)
                        for (t.a_f = 0; t.a_f < dim_a_; ++t.a_f)
                            for (t.b_f = 0; t.b_f < dim_b_; ++t.b_f)
                                for (t.r = 0; t.r < dim_r_; ++t.r)
                                    for (t.r_f = 0; t.r_f < dim_r_; ++t.r_f) f(i++, t);
    }

    /// Flat index into a global (m, m', r, r') kernel.
    std::size_t kernel_index(std::size_t m, std::size_t m_f, std::size_t r, std::size_t r_f) const {
        return ((m * dim_global() + m_f) * dim_r_ + r) * dim_r_ + r_f;
    }
    std::size_t kernel_size() const { return dim_global() * dim_global() * dim_r_ * dim_r_; }

    /// Flat index of a local triple (m, a, b) in conditional-weight tables.
    std::size_t local_index(std::size_t m, std::size_t a, std::size_t b) const {
        return (m * dim_a_ + a) * dim_b_ + b;
    }

    std::size_t support_index(std::size_t m, std::size_t r) const { return m * dim_r_ + r; }

    friend bool operator==(const TupleSpace&, const TupleSpace&) = default;

 private:
    std::size_t dim_a_ = 0, dim_b_ = 0, dim_r_ = 0;
};

// ------------------------------------------------------------------------------
// Inputs

/// Open bipartite system: AB starts in rho_ab, decoupled from a Gibbs reservoir,
/// and the composite evolves under a unitary on AB (x) R.
struct BipartiteSystem {
    std::size_t dim_a = 0;
    std::size_t dim_b = 0;
    ComplexMatrix rho_ab;
    ReservoirSpec reservoir;
    ComplexMatrix unitary;
};

/// Eigenbases used for the measurements and the conditional weights.
struct MeasurementBases {
    SpectralDecomposition initial_global, initial_a, initial_b;
    SpectralDecomposition final_global, final_a, final_b;
};

/// Optional eigenbasis replacements. Each is validated with `with_eigenbasis`,
/// so only rotations inside degenerate blocks are accepted.
struct BasisOverrides {
    std::optional<ComplexMatrix> initial_global, initial_a, initial_b;
    std::optional<ComplexMatrix> final_global, final_a, final_b;
    std::optional<ComplexMatrix> theta_factor;  // unitary part of the time reversal
};

/// Global two-point kernels over (m, m', r, r'): forward p_{m,m';r,r'},
/// reverse p~_{m',m;r',r} stored at the same flat position, and beta*Q for
/// each reservoir pair (r, r').
struct TransitionKernel {
    std::vector<double> forward;
    std::vector<double> reverse;
    std::vector<double> heat_exponent;  // index r * dim_r + r'
};

/// Everything needed to enumerate the augmented tables.
struct Process {
    TupleSpace space;
    MeasurementBases bases;
    TransitionKernel kernel;
    std::vector<double> reservoir_initial;  // p_r
    ComplexMatrix rho_initial;  // AB at the start
    ComplexMatrix rho_final;    // AB at the end
};

// ------------------------------------------------------------------------------
// Conditional and global weights

/// |<m|a (x) b>|^2.
inline double conditional_local(const ComplexVector& m_vec, const ComplexVector& a_vec,
                                const ComplexVector& b_vec) {
    if (m_vec.size() != a_vec.size() * b_vec.size()) {
        throw DimensionError("conditional_local: global vector of size " +
                             std::to_string(m_vec.size()) + " does not match local sizes " +
                             std::to_string(a_vec.size()) + "x" + std::to_string(b_vec.size()));
    }
    Complex overlap = 0.0;
    for (Eigen::Index i = 0; i < a_vec.size(); ++i)
        for (Eigen::Index j = 0; j < b_vec.size(); ++j)
            overlap += std::conj(m_vec(i * b_vec.size() + j)) * a_vec(i) * b_vec(j);
    return std::norm(overlap);
}

/// Conditional weights for every (m, a, b), laid out by TupleSpace::local_index.
inline std::vector<double> conditional_table(const SpectralDecomposition& global,
                                             const SpectralDecomposition& local_a,
                                             const SpectralDecomposition& local_b) {
    const std::size_t d = global.dim(), da = local_a.dim(), db = local_b.dim();
    if (d != da * db) {
        throw DimensionError("conditional_table: global dimension " + std::to_string(d) +
                             " is not " + std::to_string(da) + "x" + std::to_string(db));
    }
    std::vector<double> out(d * da * db);
    std::size_t i = 0;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t b = 0; b < db; ++b)
                out[i++] = conditional_local(global.vector(m), local_a.vector(a), local_b.vector(b));
    return out;
}

namespace detail {

// Columns |m> (x) |r> for the reservoir energy basis, m major.
inline ComplexMatrix product_with_energy_basis(const ComplexMatrix& global_vectors,
                                               std::size_t dim_r) {
    return tensor_product(global_vectors,
                          ComplexMatrix::Identity(idx(dim_r), idx(dim_r)).eval());
}

inline void require_unitary_on(const ComplexMatrix& u, std::size_t dim, const Tolerances& tol,
                               const char* what) {
    if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != dim) {
        throw DimensionError(std::string(what) + ": unitary of size " + std::to_string(u.rows()) +
                             "x" + std::to_string(u.cols()) + " does not act on dimension " +
                             std::to_string(dim));
    }
    const double defect = unitarity_defect(u);
    if (defect > tol.unitarity) {
        throw UnitarityError(std::string(what) + ": operator is not unitary (defect " +
                             std::to_string(defect) + ")");
    }
}

}  // namespace detail

/// Forward global kernel p_{m,m';r,r'} = |<m',r'|U|m,r>|^2 p_m p_r, with the
/// reservoir measured in its energy basis at both times. `final_global` must
/// diagonalize Tr_R[U (rho_AB (x) rho_R) U^dagger].
inline std::vector<double> global_tmp_joint(const SpectralDecomposition& initial_global,
                                            const ReservoirSpec& reservoir,
                                            const ComplexMatrix& u,
                                            const SpectralDecomposition& final_global,
                                            const Tolerances& tol = {}) {
    using detail::idx;
    const std::size_t d = initial_global.dim(), dr = reservoir.dim();
    if (final_global.dim() != d) {
        throw DimensionError("global_tmp_joint: initial and final global dimensions differ");
    }
    detail::require_unitary_on(u, d * dr, tol, "global_tmp_joint");
    const auto p_r = gibbs_probabilities(reservoir);

    ComplexMatrix rho_r = ComplexMatrix::Zero(idx(dr), idx(dr));
    for (std::size_t r = 0; r < dr; ++r) rho_r(idx(r), idx(r)) = p_r[r];
    const ComplexMatrix evolved = u * tensor_product(initial_global.reconstruct(), rho_r) * u.adjoint();
    const ComplexMatrix reduced = partial_trace(evolved, d, dr, Subsystem::First);
    const double mismatch = detail::max_abs_entry(reduced - final_global.reconstruct());
    if (mismatch > tol.reconstruction) {
        throw ConsistencyError(
            "global_tmp_joint: final decomposition does not reconstruct the evolved state "
            "(mismatch " + std::to_string(mismatch) + ")");
    }

    const ComplexMatrix in = detail::product_with_energy_basis(initial_global.eigenvectors, dr);
    const ComplexMatrix out = detail::product_with_energy_basis(final_global.eigenvectors, dr);
    const ComplexMatrix amplitude = out.adjoint() * u * in;  // rows (m', r'), cols (m, r)

    std::vector<double> table(d * d * dr * dr);
    std::size_t i = 0;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t mf = 0; mf < d; ++mf)
            for (std::size_t r = 0; r < dr; ++r)
                for (std::size_t rf = 0; rf < dr; ++rf)
                    table[i++] = std::norm(amplitude(idx(mf * dr + rf), idx(m * dr + r))) *
                                 initial_global.probabilities[m] * p_r[r];
    return table;
}

/// Reverse global kernel p~_{m',m;r',r} = |<m,r|U^dagger|m',r'>|^2 p_{m'} p~_{r'}.
/// The reverse process starts from the forward final state of AB and a
/// re-thermalized reservoir; the amplitude is taken in the time-reversed frame,
/// <Theta(m,r)| Theta U^dagger Theta^-1 |Theta(m',r')>. Stored at the forward
/// (m, m', r, r') position.
inline std::vector<double> reverse_global_joint(
    const SpectralDecomposition& final_global, const ReservoirSpec& reservoir,
    const ComplexMatrix& u, const SpectralDecomposition& initial_global,
    const std::optional<ComplexMatrix>& theta_factor = {}, const Tolerances& tol = {}) {
    using detail::idx;
    const std::size_t d = initial_global.dim(), dr = reservoir.dim();
    if (final_global.dim() != d) {
        throw DimensionError("reverse_global_joint: initial and final global dimensions differ");
    }
    detail::require_unitary_on(u, d * dr, tol, "reverse_global_joint");
    const auto p_r = gibbs_probabilities(reservoir);

    std::optional<ComplexMatrix> theta_full;
    if (theta_factor) {
        if (static_cast<std::size_t>(theta_factor->rows()) != d) {
            throw DimensionError("reverse_global_joint: time-reversal factor must act on AB");
        }
        theta_full = tensor_product(*theta_factor,
                                    ComplexMatrix::Identity(idx(dr), idx(dr)).eval());
    }
    const ComplexMatrix u_reversed = time_reverse_operator(u.adjoint(), theta_full);
    const auto in = time_reverse(final_global, theta_factor);
    const auto out = time_reverse(initial_global, theta_factor);
    const ComplexMatrix start = detail::product_with_energy_basis(in.eigenvectors, dr);
    const ComplexMatrix end = detail::product_with_energy_basis(out.eigenvectors, dr);
    const ComplexMatrix amplitude = end.adjoint() * u_reversed * start;  // rows (m, r), cols (m', r')

    std::vector<double> table(d * d * dr * dr);
    std::size_t i = 0;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t mf = 0; mf < d; ++mf)
            for (std::size_t r = 0; r < dr; ++r)
                for (std::size_t rf = 0; rf < dr; ++rf)
                    table[i++] = std::norm(amplitude(idx(m * dr + r), idx(mf * dr + rf))) *
                                 final_global.probabilities[mf] * p_r[rf];
    return table;
}

/// beta (E_r - E_r') for every reservoir pair.
inline std::vector<double> heat_exponent_table(const ReservoirSpec& reservoir) {
    const std::size_t dr = reservoir.dim();
    std::vector<double> out(dr * dr);
    for (std::size_t r = 0; r < dr; ++r)
        for (std::size_t rf = 0; rf < dr; ++rf)
            out[r * dr + rf] = reservoir.beta * (reservoir.energies[r] - reservoir.energies[rf]);
    return out;
}

namespace detail {

inline SpectralDecomposition decompose_with_override(const ComplexMatrix& rho,
                                                     const std::optional<ComplexMatrix>& basis,
                                                     const Tolerances& tol) {
    auto decomp = DensityOperator::from_matrix(rho, tol).decomposition();
    return basis ? with_eigenbasis(decomp, *basis, tol) : decomp;
}

}  // namespace detail

/// Builds the measurement bases and kernels of a unitary process. The final
/// decompositions always come from the evolved state; overrides may only
/// re-choose eigenvectors inside degenerate blocks.
inline Process prepare_process(const BipartiteSystem& system, const BasisOverrides& overrides = {},
                               const Tolerances& tol = {}) {
    const std::size_t da = system.dim_a, db = system.dim_b, dr = system.reservoir.dim();
    Process process;
    process.space = TupleSpace(da, db, dr);
    const std::size_t d = da * db;
    if (static_cast<std::size_t>(system.rho_ab.rows()) != d) {
        throw DimensionError("prepare_process: rho_ab has dimension " +
                             std::to_string(system.rho_ab.rows()) + ", expected " +
                             std::to_string(d));
    }
    detail::require_unitary_on(system.unitary, d * dr, tol, "prepare_process");

    const auto rho_i = DensityOperator::from_matrix(system.rho_ab, tol);
    ComplexMatrix rho_r_energy = ComplexMatrix::Zero(detail::idx(dr), detail::idx(dr));
    const auto p_r = gibbs_probabilities(system.reservoir);
    for (std::size_t r = 0; r < dr; ++r) rho_r_energy(detail::idx(r), detail::idx(r)) = p_r[r];
    const ComplexMatrix evolved =
        system.unitary * tensor_product(rho_i.matrix(), rho_r_energy) * system.unitary.adjoint();
    const ComplexMatrix rho_f = partial_trace(evolved, d, dr, Subsystem::First);

    auto& bases = process.bases;
    bases.initial_global = detail::decompose_with_override(rho_i.matrix(), overrides.initial_global, tol);
    bases.initial_a = detail::decompose_with_override(
        partial_trace(rho_i.matrix(), da, db, Subsystem::First), overrides.initial_a, tol);
    bases.initial_b = detail::decompose_with_override(
        partial_trace(rho_i.matrix(), da, db, Subsystem::Second), overrides.initial_b, tol);
    bases.final_global = detail::decompose_with_override(rho_f, overrides.final_global, tol);
    bases.final_a = detail::decompose_with_override(partial_trace(rho_f, da, db, Subsystem::First),
                                                    overrides.final_a, tol);
    bases.final_b = detail::decompose_with_override(partial_trace(rho_f, da, db, Subsystem::Second),
                                                    overrides.final_b, tol);

    process.kernel.forward = global_tmp_joint(bases.initial_global, system.reservoir,
                                              system.unitary, bases.final_global, tol);
    process.kernel.reverse =
        reverse_global_joint(bases.final_global, system.reservoir, system.unitary,
                             bases.initial_global, overrides.theta_factor, tol);
    process.kernel.heat_exponent = heat_exponent_table(system.reservoir);
    process.reservoir_initial = p_r;
    process.rho_initial = rho_i.matrix();
    process.rho_final = (rho_f + rho_f.adjoint()) / 2.0;
    return process;
}

// ------------------------------------------------------------------------------
// Augmented tables

/// Dense table over the full tuple space.
struct JointTable {
    TupleSpace space;
    std::vector<double> table;

    double at(const OutcomeTuple& t) const { return table[space.index(t)]; }

    double total() const {
        double s = 0.0;
        for (double v : table) s += v;
        return s;
    }
};

/// Forward joint p_{m,a,b,m',a',b';r,r'} plus the initial support H_i on (m, r).
struct ForwardJointDistribution : JointTable {
    std::vector<bool> forward_support;  // TupleSpace::support_index(m, r)

    bool in_support(const OutcomeTuple& t) const {
        return forward_support[space.support_index(t.m, t.r)];
    }
};

/// Time-reversed joint on the same tuple layout. `restricted_mass` is the
/// reverse probability that lands back inside the forward support.
struct ReverseJointDistribution : JointTable {
    std::vector<bool> forward_support;
    double restricted_mass = 0.0;

    bool in_support(const OutcomeTuple& t) const {
        return forward_support[space.support_index(t.m, t.r)];
    }
};

/// (m, r) pairs whose total forward weight exceeds `threshold`.
inline std::vector<bool> forward_support_of(const TupleSpace& space,
                                            const std::vector<double>& global_forward,
                                            double threshold) {
    const std::size_t d = space.dim_global(), dr = space.dim_r();
    std::vector<bool> support(d * dr, false);
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t r = 0; r < dr; ++r) {
            double weight = 0.0;
            for (std::size_t mf = 0; mf < d; ++mf)
                for (std::size_t rf = 0; rf < dr; ++rf)
                    weight += global_forward[space.kernel_index(m, mf, r, rf)];
            support[space.support_index(m, r)] = weight > threshold;
        }
    return support;
}

namespace detail {

inline void require_kernel_shape(const TupleSpace& space, const std::vector<double>& kernel,
                                 const char* what) {
    if (kernel.size() != space.kernel_size()) {
        throw DimensionError(std::string(what) + ": kernel has " + std::to_string(kernel.size()) +
                             " entries, expected " + std::to_string(space.kernel_size()));
    }
}

inline void require_bases_shape(const TupleSpace& space, const MeasurementBases& bases) {
    const std::size_t d = space.dim_global();
    if (bases.initial_global.dim() != d || bases.final_global.dim() != d ||
        bases.initial_a.dim() != space.dim_a() || bases.final_a.dim() != space.dim_a() ||
        bases.initial_b.dim() != space.dim_b() || bases.final_b.dim() != space.dim_b()) {
        throw DimensionError("measurement bases do not match the tuple space");
    }
}

}  // namespace detail

/// p_{m,a,b,m',a',b';r,r'} = p_{m,m';r,r'} |<m|a,b>|^2 |<m'|a',b'>|^2.
inline ForwardJointDistribution augmented_forward(const TupleSpace& space,
                                                  const std::vector<double>& global_forward,
                                                  const MeasurementBases& bases,
                                                  const Tolerances& tol = {}) {
    detail::require_kernel_shape(space, global_forward, "augmented_forward");
    detail::require_bases_shape(space, bases);
    const auto cond_i = conditional_table(bases.initial_global, bases.initial_a, bases.initial_b);
    const auto cond_f = conditional_table(bases.final_global, bases.final_a, bases.final_b);

    ForwardJointDistribution out;
    out.space = space;
    out.table.resize(space.size());
    space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        out.table[i] = global_forward[space.kernel_index(t.m, t.m_f, t.r, t.r_f)] *
                       cond_i[space.local_index(t.m, t.a, t.b)] *
                       cond_f[space.local_index(t.m_f, t.a_f, t.b_f)];
    });
    out.forward_support = forward_support_of(space, global_forward, tol.support);
    return out;
}

/// p~_{m',a',b',m,a,b;r',r} = p~_{m',m;r',r} |<m'|a',b'>|^2 |<m|a,b>|^2, with
/// the restricted mass summed over tuples whose (m, r) lies in `forward_support`.
inline ReverseJointDistribution reverse_joint(const TupleSpace& space,
                                              const std::vector<double>& global_reverse,
                                              const MeasurementBases& bases,
                                              const std::vector<bool>& forward_support) {
    detail::require_kernel_shape(space, global_reverse, "reverse_joint");
    detail::require_bases_shape(space, bases);
    if (forward_support.size() != space.dim_global() * space.dim_r()) {
        throw DimensionError("reverse_joint: support mask has the wrong size");
    }
    const auto cond_i = conditional_table(bases.initial_global, bases.initial_a, bases.initial_b);
    const auto cond_f = conditional_table(bases.final_global, bases.final_a, bases.final_b);

    ReverseJointDistribution out;
    out.space = space;
    out.forward_support = forward_support;
    out.table.resize(space.size());
    double restricted = 0.0;
    space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double v = global_reverse[space.kernel_index(t.m, t.m_f, t.r, t.r_f)] *
                         cond_f[space.local_index(t.m_f, t.a_f, t.b_f)] *
                         cond_i[space.local_index(t.m, t.a, t.b)];
        out.table[i] = v;
        if (forward_support[space.support_index(t.m, t.r)]) restricted += v;
    });
    out.restricted_mass = restricted;
    return out;
}

inline ForwardJointDistribution augmented_forward(const Process& process,
                                                  const Tolerances& tol = {}) {
    return augmented_forward(process.space, process.kernel.forward, process.bases, tol);
}

inline ReverseJointDistribution reverse_joint(const Process& process,
                                              const ForwardJointDistribution& forward) {
    return reverse_joint(process.space, process.kernel.reverse, process.bases,
                         forward.forward_support);
}

// ------------------------------------------------------------------------------
// Marginals

/// Table over a subset of axes, row-major in the order the axes were requested.
struct MarginalTable {
    std::vector<Axis> axes;
    std::vector<std::size_t> extents;
    std::vector<double> values;

    double at(std::initializer_list<std::size_t> indices) const {
        std::size_t i = 0, k = 0;
        for (std::size_t v : indices) i = i * extents[k++] + v;
        return values[i];
    }
};

inline MarginalTable marginal(const JointTable& joint, const std::vector<Axis>& kept) {
    const auto extents = joint.space.extents();
    MarginalTable out;
    out.axes = kept;
    std::size_t size = 1;
    std::array<bool, 8> seen{};
    for (Axis axis : kept) {
        const auto k = static_cast<std::size_t>(axis);
        if (k >= 8 || seen[k]) throw DimensionError("marginal: invalid or repeated axis");
        seen[k] = true;
        out.extents.push_back(extents[k]);
        size *= extents[k];
    }
    out.values.assign(size, 0.0);
    joint.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        std::size_t target = 0;
        for (std::size_t k = 0; k < kept.size(); ++k) target = target * out.extents[k] + t[kept[k]];
        out.values[target] += joint.table[i];
    });
    return out;
}

}  // namespace tmpft

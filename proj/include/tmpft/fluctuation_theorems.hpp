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

// Fluctuation-theorem equalities and the heat / work bounds that follow from
// them, evaluated by exact enumeration of the forward and reverse tables.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tmpft/errors.hpp"
#include "tmpft/info_quantities.hpp"
#include "tmpft/quantum_core.hpp"
#include "tmpft/tmp_probabilities.hpp"
#include "tmpft/tolerances.hpp"

namespace tmpft {

namespace detail {

inline void require_same_space(const JointTable& x, const JointTable& y, const char* what) {
    if (!(x.space == y.space)) throw DimensionError(std::string(what) + ": tables differ in shape");
}

inline double log_or_minus_inf(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

// ------------------------------------------------------------------------------
// Equalities

struct DetailedCheck {
    double max_residual = 0.0;
    double max_relative_residual = 0.0;  // residual / exp(exponent); diagnostic only
    std::optional<OutcomeTuple> worst;
    std::size_t tuples_checked = 0;
};

/// max |p~/p - exp(-Delta s_A - Delta s_B + Delta I + beta Q)| over tuples
/// whose forward weight exceeds the support threshold.
inline DetailedCheck detailed_ft_check(const ForwardJointDistribution& forward,
                                       const ReverseJointDistribution& reverse,
                                       const TrajectoryLedger& ledger,
                                       const Tolerances& tol = {}) {
    detail::require_same_space(forward, reverse, "detailed_ft_check");
    DetailedCheck out;
    forward.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double p = forward.table[i];
        if (!(p > tol.support)) return;
        ++out.tuples_checked;
        const double expected = std::exp(ledger.exponent(t));
        const double residual = std::abs(reverse.table[i] / p - expected);
        if (std::isnan(out.max_residual)) return;  // the first NaN is sticky
        out.max_relative_residual = std::isnan(residual)
                                        ? residual
                                        : std::max(out.max_relative_residual, residual / expected);
        if (!(residual <= out.max_residual)) {
            out.max_residual = residual;
            out.worst = t;
        }
    });
    return out;
}

/// <exp(-Delta s_A - Delta s_B + Delta I + beta Q)> over the forward support.
/// Equals the restricted reverse mass.
inline double integral_ft(const ForwardJointDistribution& forward, const TrajectoryLedger& ledger) {
    return average_if(
        forward, [&](const OutcomeTuple& t) { return std::exp(ledger.exponent(t)); },
        [&](const OutcomeTuple& t) { return forward.in_support(t); });
}

struct ReverseAveragedFt {
    double lhs = 0.0;             // <exp(-Delta s_A - Delta s_B + beta Q)>, forward
    double rhs = 0.0;             // <exp(-Delta I)>, reverse, restricted to the forward support
    double rhs_full_space = 0.0;  // same over every reverse tuple; diagnostic only
};

inline ReverseAveragedFt reverse_averaged_ft(const ForwardJointDistribution& forward,
                                             const ReverseJointDistribution& reverse,
                                             const TrajectoryLedger& ledger) {
    detail::require_same_space(forward, reverse, "reverse_averaged_ft");
    ReverseAveragedFt out;
    out.lhs = average_if(
        forward,
        [&](const OutcomeTuple& t) {
            const auto traj = ledger.at(t);
            return std::exp(-traj.delta_s_a - traj.delta_s_b + traj.beta_q);
        },
        [&](const OutcomeTuple& t) { return forward.in_support(t); });
    const auto exp_minus_di = [&](const OutcomeTuple& t) { return std::exp(-ledger.at(t).delta_i); };
    out.rhs = average_if(reverse, exp_minus_di,
                         [&](const OutcomeTuple& t) { return reverse.in_support(t); });
    out.rhs_full_space = average(reverse, exp_minus_di);
    return out;
}

/// <exp(-sigma_A - sigma_B + Delta Gamma)> over the forward support.
inline double partitioned_integral_ft(const ForwardJointDistribution& forward,
                                      const TrajectoryLedger& ledger,
                                      const HeatPartition& partition) {
    return average_if(
        forward,
        [&](const OutcomeTuple& t) {
            const auto traj = ledger.at(t, partition);
            return std::exp(-*traj.sigma_a - *traj.sigma_b + *traj.delta_gamma);
        },
        [&](const OutcomeTuple& t) { return forward.in_support(t); });
}

/// Variance of Delta s_A + Delta s_B - beta Q under the forward distribution.
inline double local_production_variance(const ForwardJointDistribution& forward,
                                        const TrajectoryLedger& ledger) {
    const auto production = [&](const OutcomeTuple& t) {
        const auto traj = ledger.at(t);
        return traj.delta_s_a + traj.delta_s_b - traj.beta_q;
    };
    const double mean = average(forward, production);
    return average(forward, [&](const OutcomeTuple& t) {
        const double x = production(t) - mean;
        return x * x;
    });
}

// ------------------------------------------------------------------------------
// Classical reduction

/// True when every global eigenvector, initial and final, coincides (up to
/// phase) with a product of local eigenvectors.
inline bool has_product_eigenbases(const MeasurementBases& bases, const Tolerances& tol = {}) {
    const auto matched = [&](const SpectralDecomposition& global, const SpectralDecomposition& a,
                             const SpectralDecomposition& b) {
        const auto cond = conditional_table(global, a, b);
        const std::size_t local = a.dim() * b.dim();
        std::vector<int> hits(local, 0);
        for (std::size_t m = 0; m < global.dim(); ++m) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < local; ++k)
                if (cond[m * local + k] > cond[m * local + best]) best = k;
            if (cond[m * local + best] < 1.0 - tol.orthonormality) return false;
            ++hits[best];
        }
        return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
    };
    return matched(bases.initial_global, bases.initial_a, bases.initial_b) &&
           matched(bases.final_global, bases.final_a, bases.final_b);
}

struct ClassicalReduction {
    double lhs = 0.0;                  // <exp(-Delta s_A - Delta s_B + Delta J + beta Q)>
    double gamma = 0.0;                // restricted reverse mass
    double residual = 0.0;             // |lhs - gamma|
    double max_information_gap = 0.0;  // max |Delta I - Delta J| over the forward support
};

inline ClassicalReduction classical_reduction_check(const ForwardJointDistribution& forward,
                                                    const TrajectoryLedger& ledger,
                                                    const MeasurementBases& bases, double gamma,
                                                    const Tolerances& tol = {}) {
    if (!has_product_eigenbases(bases, tol)) {
        throw NotApplicable(
            "classical_reduction_check: global eigenbases are not products of local eigenbases");
    }
    ClassicalReduction out;
    out.gamma = gamma;
    out.lhs = average_if(
        forward,
        [&](const OutcomeTuple& t) {
            const auto traj = ledger.at(t);
            return std::exp(-traj.delta_s_a - traj.delta_s_b + traj.delta_j + traj.beta_q);
        },
        [&](const OutcomeTuple& t) { return forward.in_support(t); });
    out.residual = std::abs(out.lhs - gamma);
    forward.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        if (!(forward.table[i] > tol.support)) return;
        const auto traj = ledger.at(t);
        out.max_information_gap = std::max(out.max_information_gap,
                                           std::abs(traj.delta_i - traj.delta_j));
    });
    return out;
}

// ------------------------------------------------------------------------------
// Bounds

/// Internal-energy changes of the subsystems, used for the local work bounds.
struct FreeEnergyInputs {
    double delta_u_a = 0.0;
    double delta_u_b = 0.0;
};

struct BoundRecord {
    std::string name;
    std::string relation;  // human-readable statement of the bound
    bool equality = false;
    bool applicable = true;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double slack = std::numeric_limits<double>::quiet_NaN();  // rhs - lhs, or -|lhs - rhs|
    double tolerance = 0.0;
    bool satisfied = false;
    std::string note;
};

struct BoundInputs {
    Averages averages;
    double gamma_restricted = 1.0;
    double reverse_avg_exp_di = 1.0;  // support-restricted <exp(-Delta I)>
    double beta = 1.0;
    std::optional<ClassicalReduction> classical;
    std::optional<FreeEnergyInputs> free_energy;
    Tolerances tol;
};

namespace detail {

inline BoundRecord upper_bound(std::string name, std::string relation, double lhs, double rhs,
                               double tolerance) {
    BoundRecord rec;
    rec.name = std::move(name);
    rec.relation = std::move(relation);
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.tolerance = tolerance;
    if (std::isinf(rhs) && rhs < 0.0) {
        rec.applicable = false;
        rec.note = "vacuous: logarithm of a zero mass";
        return rec;
    }
    rec.slack = rhs - lhs;
    rec.satisfied = rec.slack >= -tolerance;
    return rec;
}

inline BoundRecord not_applicable(std::string name, std::string relation, std::string why) {
    BoundRecord rec;
    rec.name = std::move(name);
    rec.relation = std::move(relation);
    rec.applicable = false;
    rec.note = std::move(why);
    return rec;
}

}  // namespace detail

inline const BoundRecord* find_bound(const std::vector<BoundRecord>& bounds, const std::string& name) {
    for (const auto& b : bounds)
        if (b.name == name) return &b;
    return nullptr;
}

/// Every heat, memory-erasure and work bound, with applicability recorded
/// for the ones that need extra structure.
inline std::vector<BoundRecord> inequality_suite(const BoundInputs& in) {
    const auto& avg = in.averages;
    const double ln_gamma = detail::log_or_minus_inf(in.gamma_restricted);
    const double ln_reverse = detail::log_or_minus_inf(in.reverse_avg_exp_di);
    const double eps = in.tol.bound;
    std::vector<BoundRecord> out;

    out.push_back(detail::upper_bound("heat_bound_integral",
                                      "beta<Q> <= <ds_A> + <ds_B> - <dI> + ln gamma", avg.beta_q,
                                      avg.delta_s_a + avg.delta_s_b - avg.delta_i + ln_gamma, eps));
    out.push_back(detail::upper_bound("heat_bound_reverse",
                                      "beta<Q> <= <ds_A> + <ds_B> + ln<exp(-dI)>_rev", avg.beta_q,
                                      avg.delta_s_a + avg.delta_s_b + ln_reverse, eps));
    out.push_back(detail::upper_bound("heat_bound_conventional",
                                      "beta<Q> <= <ds_A> + <ds_B> - <dI>", avg.beta_q,
                                      avg.delta_s_a + avg.delta_s_b - avg.delta_i, eps));

    const char* classical_relation = "<exp(-ds_A - ds_B + dJ + beta Q)> = gamma";
    if (in.classical) {
        BoundRecord rec;
        rec.name = "classical_integral_ft";
        rec.relation = classical_relation;
        rec.equality = true;
        rec.lhs = in.classical->lhs;
        rec.rhs = in.classical->gamma;
        rec.slack = -in.classical->residual;
        rec.tolerance = in.tol.ft;
        rec.satisfied = in.classical->residual <= in.tol.ft;
        out.push_back(rec);
    } else {
        out.push_back(detail::not_applicable("classical_integral_ft", classical_relation,
                                             "global eigenbases are not product bases"));
    }

    const bool b_unchanged = std::abs(avg.delta_s_b) <= eps;
    const char* erase_classical = "beta<Q> <= <ds_A> - <dJ>";
    if (in.classical && b_unchanged) {
        out.push_back(detail::upper_bound("memory_erasure_classical", erase_classical, avg.beta_q,
                                          avg.delta_s_a - avg.delta_j, eps));
    } else {
        out.push_back(detail::not_applicable(
            "memory_erasure_classical", erase_classical,
            in.classical ? "<ds_B> is not zero" : "global eigenbases are not product bases"));
    }
    const char* erase_quantum = "beta<Q> <= <ds_A> - <dI> + ln gamma";
    const char* erase_reverse = "beta<Q> <= <ds_A> + ln<exp(-dI)>_rev";
    if (b_unchanged) {
        out.push_back(detail::upper_bound("memory_erasure_quantum", erase_quantum, avg.beta_q,
                                          avg.delta_s_a - avg.delta_i + ln_gamma, eps));
        out.push_back(detail::upper_bound("memory_erasure_reverse", erase_reverse, avg.beta_q,
                                          avg.delta_s_a + ln_reverse, eps));
    } else {
        out.push_back(detail::not_applicable("memory_erasure_quantum", erase_quantum,
                                             "<ds_B> is not zero"));
        out.push_back(detail::not_applicable("memory_erasure_reverse", erase_reverse,
                                             "<ds_B> is not zero"));
    }

    const char* work_integral = "W_A + W_B <= -dF_A - dF_B - <dI>/beta + ln(gamma)/beta";
    const char* work_reverse = "W_A + W_B <= -dF_A - dF_B + ln<exp(-dI)>_rev/beta";
    if (in.free_energy) {
        // Extracted work W = Q - dU and free energy dF = dU - <ds>/beta.
        const double kt = 1.0 / in.beta;
        const double work = avg.beta_q * kt - in.free_energy->delta_u_a - in.free_energy->delta_u_b;
        const double free_a = in.free_energy->delta_u_a - avg.delta_s_a * kt;
        const double free_b = in.free_energy->delta_u_b - avg.delta_s_b * kt;
        out.push_back(detail::upper_bound("local_work_integral", work_integral, work,
                                          -free_a - free_b - avg.delta_i * kt + ln_gamma * kt,
                                          eps * kt));
        out.push_back(detail::upper_bound("local_work_reverse", work_reverse, work,
                                          -free_a - free_b + ln_reverse * kt, eps * kt));
    } else {
        out.push_back(detail::not_applicable("local_work_integral", work_integral,
                                             "no internal-energy inputs supplied"));
        out.push_back(detail::not_applicable("local_work_reverse", work_reverse,
                                             "no internal-energy inputs supplied"));
    }
    return out;
}

/// The two information terms that lower-bound <ds_A> + <ds_B> - beta<Q>.
struct InformationTerms {
    double reverse_term = 0.0;    // -ln<exp(-dI)>_rev
    double integral_term = 0.0;   // <dI> - ln gamma
    double bound_gap = 0.0;       // -ln<exp(-dI)>_rev - <dI>
    std::string ordering;         // sign of reverse_term - integral_term: greater | less | equal
};

inline InformationTerms information_terms(double mean_delta_i, double gamma,
                                          double reverse_avg_exp_di, double tolerance) {
    InformationTerms out;
    out.reverse_term = -detail::log_or_minus_inf(reverse_avg_exp_di);
    out.integral_term = mean_delta_i - detail::log_or_minus_inf(gamma);
    out.bound_gap = out.reverse_term - mean_delta_i;
    const double diff = out.reverse_term - out.integral_term;
    out.ordering = std::abs(diff) <= tolerance ? "equal" : diff > 0.0 ? "greater" : "less";
    return out;
}

// ------------------------------------------------------------------------------
// Report

struct Check {
    std::string name;
    double value = 0.0;  // residual, or slack for bounds
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

inline Check residual_check(std::string name, double residual, double tolerance,
                            std::string detail = {}) {
    return {std::move(name), residual, tolerance, residual <= tolerance, std::move(detail)};
}

struct FTReport {
    double integral_ft_lhs = 0.0;
    double gamma_restricted = 0.0;
    double reverse_total_mass = 0.0;
    double reverse_ft_lhs = 0.0;
    double reverse_avg_exp_di = 0.0;
    double reverse_avg_exp_di_full = 0.0;
    DetailedCheck detailed;
    Averages averages;
    double local_production_variance = 0.0;
    InformationTerms information;
    std::optional<double> partitioned_ft_lhs;
    std::optional<ClassicalReduction> classical;
    std::vector<BoundRecord> bounds;
    std::vector<Check> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

struct EvaluationOptions {
    Tolerances tol;
    double beta = 1.0;  // only used to convert the work bounds to energy units
    std::optional<HeatPartition> partition;
    std::optional<FreeEnergyInputs> free_energy;
};

/// All fluctuation-theorem quantities for a forward/reverse pair.
inline FTReport assemble_report(const ForwardJointDistribution& forward,
                                const ReverseJointDistribution& reverse,
                                const TrajectoryLedger& ledger, const MeasurementBases& bases,
                                const EvaluationOptions& options) {
    const auto& tol = options.tol;
    FTReport rep;
    rep.gamma_restricted = reverse.restricted_mass;
    rep.reverse_total_mass = reverse.total();
    rep.integral_ft_lhs = integral_ft(forward, ledger);
    const auto rev_ft = reverse_averaged_ft(forward, reverse, ledger);
    rep.reverse_ft_lhs = rev_ft.lhs;
    rep.reverse_avg_exp_di = rev_ft.rhs;
    rep.reverse_avg_exp_di_full = rev_ft.rhs_full_space;
    rep.detailed = detailed_ft_check(forward, reverse, ledger, tol);
    rep.averages = forward_averages(forward, ledger);
    rep.local_production_variance = local_production_variance(forward, ledger);
    rep.information = information_terms(rep.averages.delta_i, rep.gamma_restricted,
                                        rep.reverse_avg_exp_di, tol.bound);
    if (has_product_eigenbases(bases, tol)) {
        rep.classical = classical_reduction_check(forward, ledger, bases, rep.gamma_restricted, tol);
    }
    if (options.partition) {
        rep.partitioned_ft_lhs = partitioned_integral_ft(forward, ledger, *options.partition);
    }

    BoundInputs in;
    in.averages = rep.averages;
    in.gamma_restricted = rep.gamma_restricted;
    in.reverse_avg_exp_di = rep.reverse_avg_exp_di;
    in.beta = options.beta;
    in.classical = rep.classical;
    in.free_energy = options.free_energy;
    in.tol = tol;
    rep.bounds = inequality_suite(in);

    rep.checks.push_back(residual_check(
        "detailed_ft", rep.detailed.max_residual, tol.ft,
        rep.detailed.worst ? "worst tuple " + to_string(*rep.detailed.worst) : std::string{}));
    rep.checks.push_back(residual_check(
        "integral_ft", std::abs(rep.integral_ft_lhs - rep.gamma_restricted), tol.ft));
    rep.checks.push_back(
        residual_check("reverse_averaged_ft", std::abs(rev_ft.lhs - rev_ft.rhs), tol.ft));
    if (rep.partitioned_ft_lhs) {
        rep.checks.push_back(residual_check(
            "partitioned_integral_ft", std::abs(*rep.partitioned_ft_lhs - rep.gamma_restricted),
            tol.ft));
    }
    if (rep.classical) {
        rep.checks.push_back(residual_check("classical_information_match",
                                            rep.classical->max_information_gap, 1e-12));
    }
    for (const auto& bound : rep.bounds) {
        if (!bound.applicable) continue;
        rep.checks.push_back({"bound:" + bound.name, bound.slack, bound.tolerance,
                              bound.satisfied, bound.relation});
    }
    return rep;
}

/// Forward and reverse tables of a process together with their report.
struct Evaluation {
    ForwardJointDistribution forward;
    ReverseJointDistribution reverse;
    TrajectoryLedger ledger;
    FTReport report;
};

inline Evaluation evaluate(const Process& process, const EvaluationOptions& options = {}) {
    Evaluation ev;
    ev.forward = augmented_forward(process, options.tol);
    ev.reverse = reverse_joint(process, ev.forward);
    ev.ledger = TrajectoryLedger(process);
    ev.report = assemble_report(ev.forward, ev.reverse, ev.ledger, process.bases, options);
    return ev;
}

// ------------------------------------------------------------------------------
// Invariant suite

/// Structural invariants of the tables and the information identities, on top
/// of the fluctuation-theorem checks already in the report.
inline std::vector<Check> invariant_suite(const Process& process, const Evaluation& ev,
                                          const EvaluationOptions& options) {
    const auto& tol = options.tol;
    const auto& space = process.space;
    const auto& bases = process.bases;
    const auto& fwd = ev.forward;
    const auto& rev = ev.reverse;
    std::vector<Check> out;

    out.push_back(residual_check("forward_normalization", std::abs(fwd.total() - 1.0), tol.ft));
    out.push_back(residual_check("reverse_normalization", std::abs(rev.total() - 1.0), tol.ft));
    {
        const double gamma = rev.restricted_mass;
        const double excess = std::max({0.0, -gamma, gamma - 1.0 - tol.ft});
        out.push_back(residual_check("restricted_mass_range", excess, 0.0));
    }

    // Factorization against per-tuple conditional weights.
    double factor_gap = 0.0;
    space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double expected =
            process.kernel.forward[space.kernel_index(t.m, t.m_f, t.r, t.r_f)] *
            conditional_local(bases.initial_global.vector(t.m), bases.initial_a.vector(t.a),
                              bases.initial_b.vector(t.b)) *
            conditional_local(bases.final_global.vector(t.m_f), bases.final_a.vector(t.a_f),
                              bases.final_b.vector(t.b_f));
        factor_gap = std::max(factor_gap, std::abs(fwd.table[i] - expected));
    });
    out.push_back(residual_check("forward_factorization", factor_gap, 1e-12));

    // Marginal on (m, a, b, r) is |<m|a,b>|^2 p_m p_r; the reverse analogue on
    // (m', a', b', r') is |<m'|a',b'>|^2 p_m' p~_r'.
    if (process.reservoir_initial.size() == space.dim_r()) {
        const auto cond_i = conditional_table(bases.initial_global, bases.initial_a, bases.initial_b);
        const auto cond_f = conditional_table(bases.final_global, bases.final_a, bases.final_b);
        const auto fm = marginal(fwd, {Axis::M, Axis::A, Axis::B, Axis::R});
        const auto rm = marginal(rev, {Axis::MFinal, Axis::AFinal, Axis::BFinal, Axis::RFinal});
        double fgap = 0.0, rgap = 0.0;
        for (std::size_t m = 0; m < space.dim_global(); ++m)
            for (std::size_t a = 0; a < space.dim_a(); ++a)
                for (std::size_t b = 0; b < space.dim_b(); ++b)
                    for (std::size_t r = 0; r < space.dim_r(); ++r) {
                        const double pr = process.reservoir_initial[r];
                        fgap = std::max(fgap, std::abs(fm.at({m, a, b, r}) -
                                                       cond_i[space.local_index(m, a, b)] *
                                                           bases.initial_global.probabilities[m] * pr));
                        rgap = std::max(rgap, std::abs(rm.at({m, a, b, r}) -
                                                       cond_f[space.local_index(m, a, b)] *
                                                           bases.final_global.probabilities[m] * pr));
                    }
        out.push_back(residual_check("forward_marginal_identity", fgap, tol.ft));
        out.push_back(residual_check("reverse_marginal_identity", rgap, tol.ft));
    }

    // Local marginals reproduce the reduced-state spectra.
    {
        double gap = 0.0;
        const auto compare = [&](Axis axis, const SpectralDecomposition& local) {
            const auto mt = marginal(fwd, {axis});
            for (std::size_t k = 0; k < local.dim(); ++k)
                gap = std::max(gap, std::abs(mt.values[k] - local.probabilities[k]));
        };
        compare(Axis::A, bases.initial_a);
        compare(Axis::B, bases.initial_b);
        compare(Axis::AFinal, bases.final_a);
        compare(Axis::BFinal, bases.final_b);
        out.push_back(residual_check("local_marginals", gap, tol.ft));
    }

    // <I> against the quantum mutual information of each endpoint.
    {
        const auto& avg = ev.report.averages;
        const auto mi = [&](const ComplexMatrix& rho) {
            return quantum_mutual_information(DensityOperator::from_matrix(rho, tol), space.dim_a(),
                                              space.dim_b(), tol);
        };
        out.push_back(residual_check("initial_mutual_information",
                                     std::abs(avg.initial_information - mi(process.rho_initial)),
                                     tol.ft));
        out.push_back(residual_check("final_mutual_information",
                                     std::abs(avg.final_information - mi(process.rho_final)),
                                     tol.ft));

        // <J> against the Shannon mutual information of the (a, b) marginal.
        const auto shannon_mi = [&](Axis a_axis, Axis b_axis) {
            const auto ab = marginal(fwd, {a_axis, b_axis});
            std::vector<double> pa(space.dim_a(), 0.0), pb(space.dim_b(), 0.0);
            for (std::size_t a = 0; a < space.dim_a(); ++a)
                for (std::size_t b = 0; b < space.dim_b(); ++b) {
                    pa[a] += ab.at({a, b});
                    pb[b] += ab.at({a, b});
                }
            return shannon_entropy(pa) + shannon_entropy(pb) - shannon_entropy(ab.values);
        };
        out.push_back(residual_check(
            "initial_classical_information",
            std::abs(avg.initial_classical - shannon_mi(Axis::A, Axis::B)), tol.ft));
        out.push_back(residual_check(
            "final_classical_information",
            std::abs(avg.final_classical - shannon_mi(Axis::AFinal, Axis::BFinal)), tol.ft));
    }

    // The exponent collapses to ln p_m' - ln p_m + beta Q on the support.
    {
        double gap = 0.0;
        space.for_each([&](std::size_t i, const OutcomeTuple& t) {
            if (!(fwd.table[i] > tol.support)) return;
            const auto traj = ev.ledger.at(t);
            const double collapsed = log0(bases.final_global.probabilities[t.m_f]) -
                                     log0(bases.initial_global.probabilities[t.m]) + traj.beta_q;
            gap = std::max(gap, std::abs(traj.exponent() - collapsed));
            if (options.partition) {
                const auto part = ev.ledger.at(t, *options.partition);
                gap = std::max(gap, std::abs(-*part.sigma_a - *part.sigma_b + *part.delta_gamma -
                                             traj.exponent()));
            }
        });
        out.push_back(residual_check("exponent_identity", gap, tol.ft));
    }
    return out;
}

}  // namespace tmpft

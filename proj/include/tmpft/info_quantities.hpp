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

// Per-trajectory information and heat functionals and their averages. All
// logarithms are natural. Inside a functional ln 0 is read as 0, and the
// information content of an outcome with zero global weight is 0; averages
// skip zero-weight tuples on top of that.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "tmpft/errors.hpp"
#include "tmpft/tmp_probabilities.hpp"

namespace tmpft {

inline double log0(double p) { return p > 0.0 ? std::log(p) : 0.0; }

/// Neumaier-compensated sum; exact cancellations between terms survive.
inline double compensated_sum(std::initializer_list<double> terms) {
    double sum = 0.0, carry = 0.0;
    for (double x : terms) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + carry;
}

/// Delta s = -ln p_final - (-ln p_initial).
inline double stochastic_entropy_change(double p_initial, double p_final) {
    return log0(p_initial) - log0(p_final);
}

/// I_{m,a,b} = ln[p_m / (p_a p_b)].
inline double mutual_info_content(double p_m, double p_a, double p_b) {
    if (!(p_m > 0.0)) return 0.0;
    return std::log(p_m) - log0(p_a) - log0(p_b);
}

/// J(a,b) = ln[p_{a,b} / (p_a p_b)].
inline double classical_mutual_info_content(double p_ab, double p_a, double p_b) {
    if (!(p_ab > 0.0)) return 0.0;
    return std::log(p_ab) - log0(p_a) - log0(p_b);
}

/// beta Q = beta (E_r - E_r'), heat drawn from the reservoir.
inline double heat_exponent(double e_r, double e_r_final, double beta) {
    return beta * (e_r - e_r_final);
}

struct TrajectoryFunctional {
    double delta_s_a = 0.0;
    double delta_s_b = 0.0;
    double delta_i = 0.0;
    double delta_j = 0.0;
    double beta_q = 0.0;
    std::optional<double> sigma_a, sigma_b, delta_gamma;

    /// -Delta s_A - Delta s_B + Delta I + beta Q.
    double exponent() const { return -delta_s_a - delta_s_b + delta_i + beta_q; }
};

/// Heat split between the subsystems for one trajectory, in units of 1/beta.
struct HeatShares {
    double beta_q_a = 0.0;
    double beta_q_b = 0.0;
};

/// Caller-supplied rule assigning beta Q_A and beta Q_B to each trajectory.
struct HeatPartition {
    std::function<HeatShares(const OutcomeTuple&, double beta_q)> split;

    static HeatPartition proportional(double share_a, double share_b) {
        return {[=](const OutcomeTuple&, double beta_q) {
            return HeatShares{share_a * beta_q, share_b * beta_q};
        }};
    }
};

struct EntropyProduction {
    double sigma_a = 0.0;
    double sigma_b = 0.0;
    double delta_gamma = 0.0;
};

/// sigma_X = Delta s_X - beta Q_X and Delta Gamma = Delta I + beta Q', where
/// Q' = Q - (Q_A + Q_B) is the interaction heat. The sign on Q' is the one
/// for which -sigma_A - sigma_B + Delta Gamma equals the full exponent.
inline EntropyProduction entropy_production(const TrajectoryFunctional& traj,
                                            const std::optional<HeatShares>& shares) {
    if (!shares) {
        throw PartitionUnavailable("entropy_production: no heat partition supplied");
    }
    const double beta_q_interaction = traj.beta_q - (shares->beta_q_a + shares->beta_q_b);
    return {traj.delta_s_a - shares->beta_q_a, traj.delta_s_b - shares->beta_q_b,
            traj.delta_i + beta_q_interaction};
}

/// Per-outcome probabilities of a process, indexed for fast evaluation of the
/// trajectory functionals on any tuple.
class TrajectoryLedger {
 public:
    TrajectoryLedger() = default;

    explicit TrajectoryLedger(const Process& process)
        : space_(process.space),
          p_m_(process.bases.initial_global.probabilities),
          p_a_(process.bases.initial_a.probabilities),
          p_b_(process.bases.initial_b.probabilities),
          p_m_f_(process.bases.final_global.probabilities),
          p_a_f_(process.bases.final_a.probabilities),
          p_b_f_(process.bases.final_b.probabilities),
          heat_(process.kernel.heat_exponent) {
        const auto& bases = process.bases;
        if (heat_.size() != space_.dim_r() * space_.dim_r()) {
            throw DimensionError("TrajectoryLedger: heat table does not match the reservoir");
        }
        const auto cond_i = conditional_table(bases.initial_global, bases.initial_a, bases.initial_b);
        const auto cond_f = conditional_table(bases.final_global, bases.final_a, bases.final_b);
        p_ab_ = classical_joint(cond_i, p_m_, p_a_, p_b_);
        p_ab_f_ = classical_joint(cond_f, p_m_f_, p_a_f_, p_b_f_);
    }

    const TupleSpace& space() const { return space_; }

    double initial_information(std::size_t m, std::size_t a, std::size_t b) const {
        return mutual_info_content(p_m_[m], p_a_[a], p_b_[b]);
    }
    double final_information(std::size_t m, std::size_t a, std::size_t b) const {
        return mutual_info_content(p_m_f_[m], p_a_f_[a], p_b_f_[b]);
    }
    double initial_classical_information(std::size_t a, std::size_t b) const {
        return classical_mutual_info_content(p_ab_[a * space_.dim_b() + b], p_a_[a], p_b_[b]);
    }
    double final_classical_information(std::size_t a, std::size_t b) const {
        return classical_mutual_info_content(p_ab_f_[a * space_.dim_b() + b], p_a_f_[a], p_b_f_[b]);
    }
    double heat(std::size_t r, std::size_t r_f) const { return heat_[r * space_.dim_r() + r_f]; }

    TrajectoryFunctional at(const OutcomeTuple& t) const {
        TrajectoryFunctional out;
        out.delta_s_a = stochastic_entropy_change(p_a_[t.a], p_a_f_[t.a_f]);
        out.delta_s_b = stochastic_entropy_change(p_b_[t.b], p_b_f_[t.b_f]);
        out.delta_i = final_information(t.m_f, t.a_f, t.b_f) - initial_information(t.m, t.a, t.b);
        out.delta_j = final_classical_information(t.a_f, t.b_f) -
                      initial_classical_information(t.a, t.b);
        out.beta_q = heat(t.r, t.r_f);
        return out;
    }

    /// -Delta s_A - Delta s_B + Delta I + beta Q summed term by term, so the
    /// local log-probabilities cancel before rounding. Agrees with
    /// at(t).exponent() up to rounding but stays accurate when exp() of it is
    /// large.
    double exponent(const OutcomeTuple& t) const {
        const double la = log0(p_a_[t.a]), lb = log0(p_b_[t.b]);
        const double la_f = log0(p_a_f_[t.a_f]), lb_f = log0(p_b_f_[t.b_f]);
        const bool has_i = p_m_[t.m] > 0.0, has_f = p_m_f_[t.m_f] > 0.0;
        return compensated_sum({-la, la_f, -lb, lb_f,
                                has_f ? std::log(p_m_f_[t.m_f]) : 0.0, has_f ? -la_f : 0.0,
                                has_f ? -lb_f : 0.0, has_i ? -std::log(p_m_[t.m]) : 0.0,
                                has_i ? la : 0.0, has_i ? lb : 0.0, heat(t.r, t.r_f)});
    }

    /// Functional with the entropy-production fields filled from a partition.
    TrajectoryFunctional at(const OutcomeTuple& t, const HeatPartition& partition) const {
        TrajectoryFunctional out = at(t);
        const auto production = entropy_production(out, partition.split(t, out.beta_q));
        out.sigma_a = production.sigma_a;
        out.sigma_b = production.sigma_b;
        out.delta_gamma = production.delta_gamma;
        return out;
    }

    const std::vector<double>& initial_classical_joint() const { return p_ab_; }
    const std::vector<double>& final_classical_joint() const { return p_ab_f_; }

 private:
    std::vector<double> classical_joint(const std::vector<double>& cond,
                                        const std::vector<double>& p_global,
                                        const std::vector<double>& pa,
                                        const std::vector<double>& pb) const {
        const std::size_t da = space_.dim_a(), db = space_.dim_b();
        std::vector<double> joint(da * db, 0.0);
        for (std::size_t m = 0; m < space_.dim_global(); ++m)
            for (std::size_t a = 0; a < da; ++a)
                for (std::size_t b = 0; b < db; ++b)
                    joint[a * db + b] += p_global[m] * cond[space_.local_index(m, a, b)];
        // Rounding leaves mass of order 1e-30 on outcomes whose clamped local
        // marginal is zero; drop it so J stays consistent with those marginals.
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t b = 0; b < db; ++b)
                if (pa[a] == 0.0 || pb[b] == 0.0) joint[a * db + b] = 0.0;
        return joint;
    }

    TupleSpace space_;
    std::vector<double> p_m_, p_a_, p_b_, p_m_f_, p_a_f_, p_b_f_;
    std::vector<double> p_ab_, p_ab_f_;
    std::vector<double> heat_;
};

// ------------------------------------------------------------------------------
// Averages

/// sum p f over tuples with p > 0 that satisfy `include`, in storage order.
template <class F, class Pred>
double average_if(const JointTable& joint, F&& f, Pred&& include) {
    double sum = 0.0;
    joint.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double p = joint.table[i];
        if (p > 0.0 && include(t)) sum += p * f(t);
    });
    return sum;
}

template <class F>
double average(const JointTable& joint, F&& f) {
    return average_if(joint, std::forward<F>(f), [](const OutcomeTuple&) { return true; });
}

/// Forward averages of the trajectory functionals.
struct Averages {
    double delta_s_a = 0.0;
    double delta_s_b = 0.0;
    double delta_i = 0.0;
    double delta_j = 0.0;
    double beta_q = 0.0;
    double initial_information = 0.0;  // <I_i>
    double final_information = 0.0;    // <I_f>
    double initial_classical = 0.0;    // <J_i>
    double final_classical = 0.0;      // <J_f>
};

inline Averages forward_averages(const ForwardJointDistribution& forward,
                                 const TrajectoryLedger& ledger) {
    Averages out;
    forward.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double p = forward.table[i];
        if (!(p > 0.0)) return;
        const auto traj = ledger.at(t);
        out.delta_s_a += p * traj.delta_s_a;
        out.delta_s_b += p * traj.delta_s_b;
        out.delta_i += p * traj.delta_i;
        out.delta_j += p * traj.delta_j;
        out.beta_q += p * traj.beta_q;
        out.initial_information += p * ledger.initial_information(t.m, t.a, t.b);
        out.final_information += p * ledger.final_information(t.m_f, t.a_f, t.b_f);
        out.initial_classical += p * ledger.initial_classical_information(t.a, t.b);
        out.final_classical += p * ledger.final_classical_information(t.a_f, t.b_f);
    });
    return out;
}

}  // namespace tmpft

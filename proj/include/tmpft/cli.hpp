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

// Configuration, report serialization and the run / sweep / verify drivers
// behind the command-line tool. Argument parsing itself lives in the tool.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tmpft/errors.hpp"
#include "tmpft/fluctuation_theorems.hpp"
#include "tmpft/scenarios.hpp"
#include "tmpft/tmp_probabilities.hpp"
#include "tmpft/tolerances.hpp"

namespace tmpft::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsageError = 2 };

inline constexpr const char* kToolVersion = "0.1.0";

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

 private:
    std::string field_;
};

struct ExplicitSystem {
    BipartiteSystem system;
    std::optional<ComplexMatrix> theta_factor;
};

struct Config {
    std::string scenario = "werner";
    double p = 1.0;
    double beta = 1.0;
    std::uint64_t seed = 0;
    std::size_t dim_a = 2, dim_b = 2, dim_r = 2;
    std::size_t rank = 0;
    std::optional<ExplicitSystem> system;
    std::optional<std::pair<double, double>> heat_partition;
    std::optional<FreeEnergyInputs> free_energy;
    Tolerances tol;
    std::vector<double> grid;
    std::string report_path;
    std::string table_path;
    bool emit_tuples = false;
    bool corrupt_reverse = false;  // debug: perturb one reverse kernel entry
};

// ------------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; })) {
            throw ConfigError(join(path, it.key()), "unknown field");
        }
    }
}

inline const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    return j;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

inline std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Complex complex_entry(const json& j, const std::string& path) {
    if (j.is_number()) return {number(j, path), 0.0};
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(path, "expected [real, imaginary] or a real number");
    }
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline void require_square(const ComplexMatrix& m, std::size_t n, const std::string& path) {
    if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n) {
        throw ConfigError(path, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
}

inline ComplexMatrix complex_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    ComplexMatrix m(tmpft::detail::idx(rows), tmpft::detail::idx(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols) {
            throw ConfigError(row_path, "expected a row of " + std::to_string(cols) + " entries");
        }
        for (std::size_t c = 0; c < cols; ++c)
            m(tmpft::detail::idx(r), tmpft::detail::idx(c)) =
                complex_entry(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
    return m;
}

inline std::vector<std::size_t> parse_dims_string(const std::string& text, const std::string& path) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const long v = std::strtol(item.c_str(), &end, 10);
        if (item.empty() || *end != '\0' || v <= 0) {
            throw ConfigError(path, "expected positive integers separated by commas");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.size() != 3) throw ConfigError(path, "expected three dimensions d_A,d_B,d_R");
    return out;
}

inline void apply_dims(Config& cfg, const std::vector<std::size_t>& dims) {
    cfg.dim_a = dims[0];
    cfg.dim_b = dims[1];
    cfg.dim_r = dims[2];
}

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
}

}  // namespace detail

inline void apply_tolerances(Tolerances& tol, const json& j, const std::string& path) {
    detail::require_object(j, path);
    detail::reject_unknown(j, path,
                           {"hermiticity", "unitarity", "orthonormality", "trace", "psd", "support",
                            "reconstruction", "degeneracy", "ft", "bound"});
    const auto set = [&](const char* key, double& field) {
        if (!j.contains(key)) return;
        const double v = detail::number(j[key], detail::join(path, key));
        if (!(v > 0.0)) throw ConfigError(detail::join(path, key), "tolerance must be positive");
        field = v;
    };
    set("hermiticity", tol.hermiticity);
    set("unitarity", tol.unitarity);
    set("orthonormality", tol.orthonormality);
    set("trace", tol.trace);
    set("psd", tol.psd);
    set("support", tol.support);
    set("reconstruction", tol.reconstruction);
    set("degeneracy", tol.degeneracy);
    set("ft", tol.ft);
    set("bound", tol.bound);
}

/// Reads a configuration document. Missing fields keep their defaults.
inline Config parse_config(const json& root, Config cfg = {}) {
    using namespace detail;
    require_object(root, "");
    reject_unknown(root, "",
                   {"scenario", "parameters", "system", "heat_partition", "free_energy",
                    "tolerances", "grid", "output", "emit_tuples"});
    if (root.contains("scenario")) {
        if (!root["scenario"].is_string()) throw ConfigError("scenario", "expected a string");
        cfg.scenario = root["scenario"].get<std::string>();
    }
    if (root.contains("parameters")) {
        const auto& j = require_object(root["parameters"], "parameters");
        reject_unknown(j, "parameters", {"p", "beta", "seed", "dims", "rank"});
        if (j.contains("p")) cfg.p = number(j["p"], "parameters.p");
        if (j.contains("beta")) cfg.beta = number(j["beta"], "parameters.beta");
        if (j.contains("seed")) cfg.seed = count(j["seed"], "parameters.seed");
        if (j.contains("rank")) cfg.rank = count(j["rank"], "parameters.rank");
        if (j.contains("dims")) {
            const auto& d = j["dims"];
            if (d.is_string()) {
                apply_dims(cfg, parse_dims_string(d.get<std::string>(), "parameters.dims"));
            } else {
                if (!d.is_array() || d.size() != 3) {
                    throw ConfigError("parameters.dims", "expected [d_A, d_B, d_R]");
                }
                std::vector<std::size_t> dims;
                for (std::size_t i = 0; i < 3; ++i) {
                    const std::string path = "parameters.dims[" + std::to_string(i) + "]";
                    dims.push_back(count(d[i], path));
                    if (dims.back() == 0) throw ConfigError(path, "dimension must be positive");
                }
                apply_dims(cfg, dims);
            }
        }
    }
    if (root.contains("system")) {
        const auto& j = require_object(root["system"], "system");
        reject_unknown(j, "system", {"dims", "rho_ab", "unitary", "reservoir", "theta_factor"});
        for (const char* key : {"dims", "rho_ab", "unitary", "reservoir"})
            if (!j.contains(key)) throw ConfigError(join("system", key), "required field missing");
        ExplicitSystem ex;
        const auto& d = j["dims"];
        if (!d.is_array() || d.size() != 2) throw ConfigError("system.dims", "expected [d_A, d_B]");
        ex.system.dim_a = count(d[0], "system.dims[0]");
        ex.system.dim_b = count(d[1], "system.dims[1]");
        ex.system.rho_ab = complex_matrix(j["rho_ab"], "system.rho_ab");
        ex.system.unitary = complex_matrix(j["unitary"], "system.unitary");
        const auto& r = require_object(j["reservoir"], "system.reservoir");
        reject_unknown(r, "system.reservoir", {"energies", "beta"});
        if (!r.contains("energies")) {
            throw ConfigError("system.reservoir.energies", "required field missing");
        }
        ex.system.reservoir.energies = number_list(r["energies"], "system.reservoir.energies");
        ex.system.reservoir.beta =
            r.contains("beta") ? number(r["beta"], "system.reservoir.beta") : cfg.beta;
        if (j.contains("theta_factor")) {
            ex.theta_factor = complex_matrix(j["theta_factor"], "system.theta_factor");
        }
        const std::size_t d_ab = ex.system.dim_a * ex.system.dim_b;
        const std::size_t d_total = d_ab * ex.system.reservoir.energies.size();
        require_square(ex.system.rho_ab, d_ab, "system.rho_ab");
        require_square(ex.system.unitary, d_total, "system.unitary");
        if (ex.theta_factor) require_square(*ex.theta_factor, d_ab, "system.theta_factor");
        cfg.system = std::move(ex);
    }
    if (root.contains("heat_partition")) {
        const auto& j = require_object(root["heat_partition"], "heat_partition");
        reject_unknown(j, "heat_partition", {"fraction_a", "fraction_b"});
        cfg.heat_partition = std::pair{
            j.contains("fraction_a") ? number(j["fraction_a"], "heat_partition.fraction_a") : 0.0,
            j.contains("fraction_b") ? number(j["fraction_b"], "heat_partition.fraction_b") : 0.0};
    }
    if (root.contains("free_energy")) {
        const auto& j = require_object(root["free_energy"], "free_energy");
        reject_unknown(j, "free_energy", {"delta_U_A", "delta_U_B"});
        FreeEnergyInputs f;
        if (j.contains("delta_U_A")) f.delta_u_a = number(j["delta_U_A"], "free_energy.delta_U_A");
        if (j.contains("delta_U_B")) f.delta_u_b = number(j["delta_U_B"], "free_energy.delta_U_B");
        cfg.free_energy = f;
    }
    if (root.contains("tolerances")) apply_tolerances(cfg.tol, root["tolerances"], "tolerances");
    if (root.contains("grid")) {
        const auto& j = require_object(root["grid"], "grid");
        reject_unknown(j, "grid", {"p", "p_min", "p_max", "points"});
        if (j.contains("p")) {
            cfg.grid = number_list(j["p"], "grid.p");
        } else if (j.contains("points")) {
            const std::size_t points = count(j["points"], "grid.points");
            if (points == 0) throw ConfigError("grid.points", "must be positive");
            const double lo = j.contains("p_min") ? number(j["p_min"], "grid.p_min") : 0.0;
            const double hi = j.contains("p_max") ? number(j["p_max"], "grid.p_max") : 1.0;
            cfg.grid = linspace(lo, hi, points);
        }
    }
    if (root.contains("output")) {
        const auto& j = require_object(root["output"], "output");
        reject_unknown(j, "output", {"report", "table"});
        for (const char* key : {"report", "table"})
            if (j.contains(key) && !j[key].is_string())
                throw ConfigError(join("output", key), "expected a path string");
        if (j.contains("report")) cfg.report_path = j["report"].get<std::string>();
        if (j.contains("table")) cfg.table_path = j["table"].get<std::string>();
    }
    if (root.contains("emit_tuples")) {
        if (!root["emit_tuples"].is_boolean()) throw ConfigError("emit_tuples", "expected a boolean");
        cfg.emit_tuples = root["emit_tuples"].get<bool>();
    }
    return cfg;
}

inline Config load_config_file(const std::string& path, Config cfg = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, std::move(cfg));
}

// ------------------------------------------------------------------------------
// Serialization helpers

/// Rounds to 15 significant digits; non-finite values become strings.
inline json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({number_json(m(r, c).real()), number_json(m(r, c).imag())});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json tolerances_json(const Tolerances& t) {
    return {{"hermiticity", t.hermiticity},       {"unitarity", t.unitarity},
            {"orthonormality", t.orthonormality}, {"trace", t.trace},
            {"psd", t.psd},                       {"support", t.support},
            {"reconstruction", t.reconstruction}, {"degeneracy", t.degeneracy},
            {"ft", t.ft},                         {"bound", t.bound}};
}

/// Canonical form of the resolved configuration (object keys sorted).
inline json config_json(const Config& cfg) {
    json j;
    j["scenario"] = cfg.scenario;
    j["parameters"] = {{"p", cfg.p},
                       {"beta", cfg.beta},
                       {"seed", cfg.seed},
                       {"dims", {cfg.dim_a, cfg.dim_b, cfg.dim_r}},
                       {"rank", cfg.rank}};
    if (cfg.system) {
        const auto& s = cfg.system->system;
        j["system"] = {{"dims", {s.dim_a, s.dim_b}},
                       {"rho_ab", matrix_json(s.rho_ab)},
                       {"unitary", matrix_json(s.unitary)},
                       {"reservoir", {{"energies", s.reservoir.energies}, {"beta", s.reservoir.beta}}}};
        if (cfg.system->theta_factor) j["system"]["theta_factor"] = matrix_json(*cfg.system->theta_factor);
    }
    if (cfg.heat_partition) {
        j["heat_partition"] = {{"fraction_a", cfg.heat_partition->first},
                               {"fraction_b", cfg.heat_partition->second}};
    }
    if (cfg.free_energy) {
        j["free_energy"] = {{"delta_U_A", cfg.free_energy->delta_u_a},
                            {"delta_U_B", cfg.free_energy->delta_u_b}};
    }
    j["tolerances"] = tolerances_json(cfg.tol);
    if (!cfg.grid.empty()) j["grid"] = {{"p", cfg.grid}};
    j["emit_tuples"] = cfg.emit_tuples;
    if (cfg.corrupt_reverse) j["debug_corrupt_reverse"] = true;
    return j;
}

/// FNV-1a 64-bit hash of the canonical configuration dump.
inline std::string config_hash(const Config& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : config_json(cfg).dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Writes via a temporary sibling and a rename so readers never see a
/// partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

// ------------------------------------------------------------------------------
// Scenario dispatch

/// Scales the reverse kernel entry under the heaviest forward transition so
/// the detailed check has something to catch.
inline void corrupt_reverse_kernel(Process& process) {
    auto& fwd = process.kernel.forward;
    const auto k = static_cast<std::size_t>(std::max_element(fwd.begin(), fwd.end()) - fwd.begin());
    auto& rev = process.kernel.reverse[k];
    rev = rev > 0.0 ? 2.0 * rev : 0.1;
}

inline EvaluationOptions evaluation_options(const Config& cfg) {
    EvaluationOptions o;
    o.tol = cfg.tol;
    o.beta = cfg.beta;
    if (cfg.heat_partition) {
        o.partition = HeatPartition::proportional(cfg.heat_partition->first, cfg.heat_partition->second);
    }
    o.free_energy = cfg.free_energy;
    return o;
}

inline ScenarioResult build_scenario(const Config& cfg, double p) {
    ScenarioResult result;
    if (cfg.scenario == "werner") {
        result = werner_isothermal(p, cfg.beta, cfg.tol);
        if (cfg.heat_partition || cfg.free_energy) {
            auto options = result.options;
            const auto overrides = evaluation_options(cfg);
            if (cfg.heat_partition) options.partition = overrides.partition;
            if (cfg.free_energy) options.free_energy = overrides.free_energy;
            result.options = options;
            result.evaluation = evaluate(result.process, options);
        }
    } else if (cfg.scenario == "counterexample") {
        result = bell_adiabatic_counterexample(p, cfg.tol);
    } else if (cfg.scenario == "random") {
        RandomOptions ro;
        ro.beta = cfg.beta;
        ro.rank = cfg.rank;
        const auto system = random_instance(cfg.dim_a, cfg.dim_b, cfg.dim_r, cfg.seed, ro);
        result = run_process("random", prepare_process(system, {}, cfg.tol), evaluation_options(cfg));
    } else if (cfg.scenario == "explicit") {
        if (!cfg.system) throw ConfigError("system", "required for the explicit scenario");
        BasisOverrides overrides;
        overrides.theta_factor = cfg.system->theta_factor;
        result = run_process("explicit", prepare_process(cfg.system->system, overrides, cfg.tol),
                             evaluation_options(cfg));
    } else {
        throw ConfigError("scenario", "unknown scenario '" + cfg.scenario +
                                          "' (expected werner, counterexample, random or explicit)");
    }
    if (cfg.corrupt_reverse) {
        corrupt_reverse_kernel(result.process);
        result.evaluation = evaluate(result.process, result.options);
    }
    return result;
}

// ------------------------------------------------------------------------------
// Reports

inline json tuple_json(const OutcomeTuple& t) {
    return {t.m, t.a, t.b, t.m_f, t.a_f, t.b_f, t.r, t.r_f};
}

inline json checks_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks) {
        json j = {{"name", c.name},
                  {"value", number_json(c.value)},
                  {"tolerance", number_json(c.tolerance)},
                  {"passed", c.passed}};
        if (!c.detail.empty()) j["detail"] = c.detail;
        out.push_back(std::move(j));
    }
    return out;
}

inline json tuples_json(const Evaluation& ev, double support) {
    json rows = json::array();
    ev.forward.space.for_each([&](std::size_t i, const OutcomeTuple& t) {
        const double p = ev.forward.table[i], q = ev.reverse.table[i];
        if (p <= 0.0 && q <= 0.0) return;
        const auto f = ev.ledger.at(t);
        json row = tuple_json(t);
        for (double v : {p, q, f.delta_s_a, f.delta_s_b, f.delta_i, f.delta_j, f.beta_q,
                         ev.ledger.exponent(t)})
            row.push_back(number_json(v));
        row.push_back(p > support && ev.forward.in_support(t));
        rows.push_back(std::move(row));
    });
    return {{"columns", {"m", "a", "b", "m'", "a'", "b'", "r", "r'", "p", "p_reverse", "delta_s_a",
                         "delta_s_b", "delta_i", "delta_j", "beta_q", "exponent", "checked"}},
            {"rows", std::move(rows)}};
}

inline json report_json(const ScenarioResult& result, const Config& cfg,
                        const std::vector<Check>& invariants = {}) {
    const auto& rep = result.evaluation.report;
    const auto& space = result.process.space;
    json j;
    j["scenario"] = result.name;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["config"] = config_json(cfg);
    j["tolerances"] = tolerances_json(result.options.tol);
    j["dims"] = {{"d_A", space.dim_a()}, {"d_B", space.dim_b()}, {"d_R", space.dim_r()}};
    j["gamma_restricted"] = number_json(rep.gamma_restricted);
    j["reverse_total_mass"] = number_json(rep.reverse_total_mass);
    j["integral_ft_lhs"] = number_json(rep.integral_ft_lhs);
    j["reverse_averaged_ft"] = {{"lhs", number_json(rep.reverse_ft_lhs)},
                                {"rhs", number_json(rep.reverse_avg_exp_di)},
                                {"rhs_full_space", number_json(rep.reverse_avg_exp_di_full)}};
    j["reverse_avg_exp_dI"] = number_json(rep.reverse_avg_exp_di);
    j["detailed_max_residual"] = number_json(rep.detailed.max_residual);
    j["detailed"] = {{"max_residual", number_json(rep.detailed.max_residual)},
                     {"max_relative_residual", number_json(rep.detailed.max_relative_residual)},
                     {"tuples_checked", rep.detailed.tuples_checked},
                     {"worst_tuple", rep.detailed.worst ? tuple_json(*rep.detailed.worst) : json()}};
    const auto& a = rep.averages;
    j["averages"] = {{"delta_s_A", number_json(a.delta_s_a)},
                     {"delta_s_B", number_json(a.delta_s_b)},
                     {"delta_I", number_json(a.delta_i)},
                     {"delta_J", number_json(a.delta_j)},
                     {"beta_Q", number_json(a.beta_q)},
                     {"I_initial", number_json(a.initial_information)},
                     {"I_final", number_json(a.final_information)},
                     {"J_initial", number_json(a.initial_classical)},
                     {"J_final", number_json(a.final_classical)}};
    j["local_production_variance"] = number_json(rep.local_production_variance);
    j["information"] = {{"reverse_term", number_json(rep.information.reverse_term)},
                        {"integral_term", number_json(rep.information.integral_term)},
                        {"bound_gap", number_json(rep.information.bound_gap)},
                        {"ordering", rep.information.ordering}};
    j["partitioned_integral_ft"] =
        rep.partitioned_ft_lhs ? number_json(*rep.partitioned_ft_lhs) : json();
    if (rep.classical) {
        j["classical_reduction"] = {{"lhs", number_json(rep.classical->lhs)},
                                    {"gamma", number_json(rep.classical->gamma)},
                                    {"residual", number_json(rep.classical->residual)},
                                    {"max_information_gap",
                                     number_json(rep.classical->max_information_gap)}};
    } else {
        j["classical_reduction"] = json();
    }
    json bounds = json::array();
    for (const auto& b : rep.bounds) {
        json jb = {{"name", b.name},
                   {"relation", b.relation},
                   {"applicable", b.applicable},
                   {"equality", b.equality}};
        if (b.applicable) {
            jb["lhs"] = number_json(b.lhs);
            jb["rhs"] = number_json(b.rhs);
            jb["slack"] = number_json(b.slack);
            jb["tolerance"] = number_json(b.tolerance);
            jb["satisfied"] = b.satisfied;
        }
        if (!b.note.empty()) jb["note"] = b.note;
        bounds.push_back(std::move(jb));
    }
    j["bounds"] = std::move(bounds);
    j["checks"] = checks_json(rep.checks);
    if (!invariants.empty()) j["invariants"] = checks_json(invariants);
    json refs = json::array();
    for (const auto& r : result.references)
        refs.push_back({{"name", r.name},
                        {"expected", number_json(r.expected)},
                        {"actual", number_json(r.actual)},
                        {"tolerance", number_json(r.tolerance)},
                        {"passed", r.passed()}});
    j["references"] = std::move(refs);
    json claims = json::array();
    for (const auto& c : result.claims) claims.push_back({{"name", c.name}, {"holds", c.holds}});
    j["claims"] = std::move(claims);
    const bool inv_ok = std::all_of(invariants.begin(), invariants.end(),
                                    [](const Check& c) { return c.passed; });
    j["passed"] = rep.passed() && result.references_passed() && inv_ok;
    if (cfg.emit_tuples) j["tuples"] = tuples_json(result.evaluation, result.options.tol.support);
    return j;
}

// ------------------------------------------------------------------------------
// Commands

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
    } else {
        write_atomic(path, content);
    }
}

inline int run_command(const Config& cfg, std::ostream& out, std::ostream& err) {
    const auto result = build_scenario(cfg, cfg.p);
    const json report = report_json(result, cfg);
    emit(cfg.report_path, report.dump(2) + "\n", out);
    if (report["passed"].get<bool>()) return kOk;
    for (const auto& c : result.evaluation.report.checks)
        if (!c.passed)
            err << "FAIL " << c.name << " value=" << format_number(c.value)
                << " tolerance=" << format_number(c.tolerance)
                << (c.detail.empty() ? "" : " " + c.detail) << "\n";
    for (const auto& r : result.references)
        if (!r.passed())
            err << "FAIL reference " << r.name << " expected=" << format_number(r.expected)
                << " actual=" << format_number(r.actual) << "\n";
    for (const auto& c : result.claims)
        if (!c.holds) err << "FAIL claim " << c.name << "\n";
    return kVerificationFailed;
}

/// One line per check: invariants, fluctuation theorems, bounds, references.
inline int verify_command(const Config& cfg, std::ostream& out, std::ostream& err) {
    const auto result = build_scenario(cfg, cfg.p);
    const auto invariants = invariant_suite(result.process, result.evaluation, result.options);
    bool ok = true;
    const auto line = [&](bool passed, const std::string& name, const std::string& detail) {
        ok = ok && passed;
        out << (passed ? "PASS " : "FAIL ") << name << " " << detail << "\n";
    };
    for (const auto& c : invariants)
        line(c.passed, c.name,
             "residual=" + format_number(c.value) + " tolerance=" + format_number(c.tolerance));
    for (const auto& c : result.evaluation.report.checks)
        line(c.passed, c.name,
             "value=" + format_number(c.value) + " tolerance=" + format_number(c.tolerance) +
                 (c.detail.empty() ? "" : " (" + c.detail + ")"));
    for (const auto& b : result.evaluation.report.bounds)
        if (!b.applicable) out << "N/A  bound:" << b.name << " (" << b.note << ")\n";
    for (const auto& r : result.references)
        line(r.passed(), "reference:" + r.name,
             "expected=" + format_number(r.expected) + " actual=" + format_number(r.actual));
    for (const auto& c : result.claims) line(c.holds, "claim:" + c.name, "");
    if (!cfg.report_path.empty()) {
        write_atomic(cfg.report_path, report_json(result, cfg, invariants).dump(2) + "\n");
    }
    if (!ok) err << "verification failed\n";
    return ok ? kOk : kVerificationFailed;
}

inline std::vector<double> default_grid(const std::string& scenario) {
    if (scenario == "counterexample") {
        std::vector<double> grid;
        for (int k = 1; k <= 21; ++k) grid.push_back(k / 22.0);
        return grid;
    }
    return detail::linspace(0.0, 1.0, 101);
}

struct SweepRow {
    double p = 0.0;
    FTReport report;
    bool passed = false;
};

/// Evaluates the scenario on every grid point, in parallel; rows keep grid order.
inline std::vector<SweepRow> sweep(const Config& cfg, const std::vector<double>& grid) {
    if (cfg.scenario != "werner" && cfg.scenario != "counterexample") {
        throw ConfigError("scenario", "sweep supports werner and counterexample only");
    }
    std::vector<SweepRow> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                const auto result = build_scenario(cfg, grid[i]);
                rows[i] = {grid[i], result.evaluation.report,
                           result.evaluation.report.passed() && result.references_passed()};
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1,
                                                        std::max<std::size_t>(grid.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!errors[i].empty()) throw ConfigError("grid.p[" + std::to_string(i) + "]", errors[i]);
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "p,gamma_restricted,ln_gamma,integral_ft_lhs,reverse_ft_lhs,reverse_avg_exp_dI,"
          "ln_reverse_avg_exp_dI,mean_delta_s_A,mean_delta_s_B,mean_beta_Q,mean_delta_I,"
          "reverse_term,integral_term,bound_gap,ordering,slack_heat_bound_integral,"
          "slack_heat_bound_reverse,detailed_max_residual,passed\n";
    const auto slack = [](const FTReport& rep, const char* name) {
        const auto* b = find_bound(rep.bounds, name);
        return b && b->applicable ? b->slack : std::numeric_limits<double>::quiet_NaN();
    };
    const auto ln = [](double x) {
        return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
    };
    for (const auto& r : rows) {
        const auto& rep = r.report;
        const double cols[] = {r.p,
                               rep.gamma_restricted,
                               ln(rep.gamma_restricted),
                               rep.integral_ft_lhs,
                               rep.reverse_ft_lhs,
                               rep.reverse_avg_exp_di,
                               ln(rep.reverse_avg_exp_di),
                               rep.averages.delta_s_a,
                               rep.averages.delta_s_b,
                               rep.averages.beta_q,
                               rep.averages.delta_i,
                               rep.information.reverse_term,
                               rep.information.integral_term,
                               rep.information.bound_gap};
        for (double v : cols) os << format_number(v) << ',';
        os << rep.information.ordering << ',' << format_number(slack(rep, "heat_bound_integral"))
           << ',' << format_number(slack(rep, "heat_bound_reverse")) << ','
           << format_number(rep.detailed.max_residual) << ',' << (r.passed ? "true" : "false")
           << '\n';
    }
    return os.str();
}

inline int sweep_command(const Config& cfg, std::ostream& out, std::ostream& err) {
    const auto grid = cfg.grid.empty() ? default_grid(cfg.scenario) : cfg.grid;
    const auto rows = sweep(cfg, grid);
    const std::string path = !cfg.table_path.empty() ? cfg.table_path : cfg.report_path;
    emit(path, sweep_csv(rows), out);
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.passed) {
            ++failed;
            err << "FAIL p=" << format_number(r.p) << "\n";
        }
    return failed == 0 ? kOk : kVerificationFailed;
}

}  // namespace tmpft::cli

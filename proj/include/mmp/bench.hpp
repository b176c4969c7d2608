#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "problem.hpp"
#include "problems/aloha.hpp"
#include "problems/energy.hpp"
#include "problems/interference.hpp"
#include "solver.hpp"

namespace mmp::bench {

using nlohmann::json;
using problems::RateRepresentation;

enum class Experiment { wsr_compare, gee_compare, aloha, single_solve };

constexpr std::string_view to_string(Experiment e) noexcept {
    switch (e) {
    case Experiment::wsr_compare: return "wsr-compare";
    case Experiment::gee_compare: return "gee-compare";
    case Experiment::aloha: return "aloha";
    case Experiment::single_solve: return "single-solve";
    }
    return "?";
}

inline Experiment parse_experiment(std::string_view s) {
    for (auto e : {Experiment::wsr_compare, Experiment::gee_compare, Experiment::aloha, Experiment::single_solve})
        if (s == to_string(e)) return e;
    throw Error(Errc::SpecError, "unknown experiment '" + std::string(s) + "'");
}

struct BenchSpec {
    Experiment experiment = Experiment::wsr_compare;
    std::size_t K = 2;
    std::size_t realizations = 1;
    double eta = 0.01;
    bool relative = false;
    std::vector<SelectionRule> selections{SelectionRule::best_first};
    std::vector<bool> reductions{false};
    std::vector<RateRepresentation> representations{RateRepresentation::mmp};
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> max_iterations;
    std::optional<double> max_wall_time;
    /// Instance file for single-solve.
    std::string instance_path;
    std::ostream* trace = nullptr;

    void validate() const {
        if (realizations < 1) throw Error(Errc::SpecError, "realizations must be at least 1");
        if (K < 1) throw Error(Errc::SpecError, "K must be at least 1");
        if (!(eta > 0.0)) throw Error(Errc::SpecError, "eta must be positive");
        if (selections.empty() || reductions.empty() || representations.empty())
            throw Error(Errc::SpecError, "every configuration axis needs at least one value");
        if (experiment == Experiment::single_solve && instance_path.empty())
            throw Error(Errc::SpecError, "single-solve needs an instance file");
    }
};

struct ResultRow {
    std::size_t instance_id = 0;
    std::string algorithm;
    std::string representation;
    std::string selection;
    std::string reduction;
    std::string status;
    double objective = -std::numeric_limits<double>::infinity();
    std::uint64_t iterations = 0;
    std::size_t peak_regions = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view csv_header =
    "instance_id,algorithm,representation,selection,reduction,status,objective,iterations,peak_regions,wall_time_s,seed";

/// splitmix64 finalizer over (seed, index); decorrelates per-instance streams.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Instance files

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
    throw Error(Errc::ParseError, "field '" + field + "': " + what);
}

inline const json* find(const json& doc, const char* field) {
    auto it = doc.find(field);
    return it == doc.end() ? nullptr : &*it;
}

inline double read_number(const json& doc, const char* field, std::optional<double> fallback = std::nullopt) {
    const json* v = find(doc, field);
    if (!v) {
        if (fallback) return *fallback;
        field_error(field, "missing");
    }
    if (!v->is_number()) field_error(field, "expected a number");
    return v->get<double>();
}

inline Vec read_vector(const json& doc, const char* field, std::size_t K, std::optional<double> fill = std::nullopt) {
    const json* v = find(doc, field);
    if (!v) {
        if (fill) return Vec(K, *fill);
        field_error(field, "missing");
    }
    if (!v->is_array() || v->size() != K) field_error(field, "expected an array of " + std::to_string(K) + " numbers");
    Vec out;
    for (const auto& e : *v) {
        if (!e.is_number()) field_error(field, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::vector<Vec> read_matrix(const json& doc, const char* field, std::size_t K) {
    const json* v = find(doc, field);
    if (!v) return std::vector<Vec>(K, Vec(K, 0.0));
    const std::string shape = "expected a " + std::to_string(K) + "x" + std::to_string(K) + " matrix";
    if (!v->is_array() || v->size() != K) field_error(field, shape);
    std::vector<Vec> out;
    for (const auto& row : *v) {
        if (!row.is_array() || row.size() != K) field_error(field, shape);
        Vec r;
        for (const auto& e : row) {
            if (!e.is_number()) field_error(field, shape);
            r.push_back(e.get<double>());
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline problems::InterferenceNetwork read_network(const json& doc, std::size_t K) {
    problems::InterferenceNetwork net;
    net.K = K;
    net.alpha = read_vector(doc, "alpha", K);
    net.beta = read_matrix(doc, "beta", K);
    net.sigma2 = read_number(doc, "sigma2", 0.01);
    net.P = read_vector(doc, "P", K, 1.0);
    net.w = read_vector(doc, "w", K, 1.0);
    net.rmin = read_vector(doc, "rmin", K, 0.0);
    return net;
}

inline problems::EnergyModel read_energy(const json& doc, std::size_t K, bool per_user) {
    problems::EnergyModel e;
    e.phi = read_vector(doc, "phi", K);
    e.B = read_number(doc, "B", 1.0);
    const json* pc = find(doc, "Pc");
    if (pc && pc->is_array()) {
        if (!per_user) field_error("Pc", "expected a number");
        e.Pc_user = read_vector(doc, "Pc", K);
    } else {
        e.Pc = read_number(doc, "Pc", 1.0);
        if (per_user) e.Pc_user.assign(K, e.Pc);
    }
    return e;
}

inline problems::AlohaNetwork read_aloha(const json& doc, std::size_t K) {
    problems::AlohaNetwork net;
    net.K = K;
    net.c = read_vector(doc, "c", K);
    net.rmin = read_vector(doc, "rmin", K, 0.0);
    const json* sets = find(doc, "interferers");
    if (!sets) {
        net.interferers = problems::full_interference(K);
    } else {
        if (!sets->is_array() || sets->size() != K) field_error("interferers", "expected K index lists");
        for (const auto& s : *sets) {
            if (!s.is_array()) field_error("interferers", "expected K index lists");
            std::vector<std::size_t> idx;
            for (const auto& j : s) {
                if (!j.is_number_unsigned()) field_error("interferers", "expected nonnegative integer indices");
                idx.push_back(j.get<std::size_t>());
            }
            net.interferers.push_back(std::move(idx));
        }
    }
    return net;
}

} // namespace detail

inline constexpr std::string_view instance_schema = "mmp-bench/1";

/// Builds the problem described by an instance document.
inline ProblemInstance instance_from_json(const json& doc, RateRepresentation repr = RateRepresentation::mmp) {
    if (!doc.is_object()) throw Error(Errc::ParseError, "instance document must be a JSON object");
    const json* schema = detail::find(doc, "schema");
    if (!schema || !schema->is_string()) detail::field_error("schema", "missing or not a string");
    if (schema->get<std::string>() != instance_schema)
        throw Error(Errc::SchemaVersionError,
                    "unsupported schema '" + schema->get<std::string>() + "', expected '" + std::string(instance_schema) + "'");
    const json* type = detail::find(doc, "type");
    if (!type || !type->is_string()) detail::field_error("type", "missing or not a string");
    const json* k = detail::find(doc, "K");
    if (!k || !k->is_number_unsigned() || k->get<std::size_t>() == 0) detail::field_error("K", "expected a positive integer");
    const std::size_t K = k->get<std::size_t>();
    const std::string t = type->get<std::string>();

    try {
        if (t == "wsr") return problems::wsr_problem(detail::read_network(doc, K), repr);
        if (t == "gee") return problems::gee_problem(detail::read_network(doc, K), detail::read_energy(doc, K, false));
        if (t == "wsee") return problems::wsee_problem(detail::read_network(doc, K), detail::read_energy(doc, K, true));
        if (t == "wmee") return problems::wmee_problem(detail::read_network(doc, K), detail::read_energy(doc, K, true));
        if (t == "aloha") return problems::aloha_problem(detail::read_aloha(doc, K));
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidNetwork) throw Error(Errc::ParseError, std::string("invalid instance: ") + e.what());
        throw;
    }
    detail::field_error("type", "unknown problem type '" + t + "'");
}

inline ProblemInstance load_instance(const std::string& path, RateRepresentation repr = RateRepresentation::mmp) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open instance file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, path + ": " + e.what());
    }
    return instance_from_json(doc, repr);
}

// ---------------------------------------------------------------------------
// Batch runs

namespace detail {

inline SolverConfig make_config(const BenchSpec& spec, SelectionRule selection, bool reduction) {
    SolverConfig cfg;
    cfg.eta = spec.eta;
    cfg.tolerance_mode = spec.relative ? ToleranceMode::relative : ToleranceMode::absolute;
    cfg.selection_rule = selection;
    cfg.reduction_enabled = reduction;
    cfg.max_iterations = spec.max_iterations;
    cfg.max_wall_time = spec.max_wall_time;
    cfg.trace = spec.trace;
    return cfg;
}

inline void fill(ResultRow& row, const SolverResult& r) {
    row.status = std::string(to_string(r.status));
    row.objective = r.value;
    row.iterations = r.iterations;
    row.peak_regions = r.peak_region_count;
    row.wall_time_s = r.wall_time;
}

template <class Run>
ResultRow guarded_row(ResultRow row, Run&& run) {
    try {
        fill(row, run());
    } catch (const std::exception& e) {
        row.status = "error";
        row.objective = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

} // namespace detail

/// Runs every configuration of `spec` on every realization. Rows come out in
/// instance order, then representation, selection, reduction.
inline std::vector<ResultRow> run_bench(const BenchSpec& spec) {
    spec.validate();
    std::vector<ResultRow> rows;
    const std::size_t count = spec.experiment == Experiment::single_solve ? 1 : spec.realizations;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t seed = spec.experiment == Experiment::single_solve ? spec.seed : instance_seed(spec.seed, i);
        for (auto repr : spec.representations) {
            for (auto sel : spec.selections) {
                for (bool red : spec.reductions) {
                    const SolverConfig cfg = detail::make_config(spec, sel, red);
                    ResultRow base;
                    base.instance_id = i;
                    base.algorithm = "brb";
                    base.representation = std::string(problems::to_string(repr));
                    base.selection = std::string(to_string(sel));
                    base.reduction = red ? "on" : "off";
                    base.seed = seed;
                    switch (spec.experiment) {
                    case Experiment::wsr_compare:
                        rows.push_back(detail::guarded_row(base, [&] {
                            return solve(problems::wsr_problem(problems::generate_channels(spec.K, seed), repr), cfg);
                        }));
                        break;
                    case Experiment::gee_compare: {
                        // The direct ratio objective only has an MMP form; the
                        // parametric baseline always uses difference-of-logs rates.
                        const auto net = problems::generate_channels(spec.K, seed);
                        const problems::EnergyModel energy{Vec(spec.K, 5.0), 1.0, {}, 1.0};
                        ResultRow direct = base;
                        direct.representation = "mmp";
                        ResultRow dinkelbach = base;
                        dinkelbach.algorithm = "dinkelbach";
                        dinkelbach.representation = "dm";
                        if (repr == RateRepresentation::mmp)
                            rows.push_back(detail::guarded_row(direct, [&] { return solve(problems::gee_problem(net, energy), cfg); }));
                        else
                            rows.push_back(detail::guarded_row(
                                dinkelbach, [&] { return SolverResult(problems::dinkelbach_gee(net, energy, cfg)); }));
                        break;
                    }
                    case Experiment::aloha:
                        base.representation = "mmp";
                        rows.push_back(detail::guarded_row(
                            base, [&] { return solve(problems::aloha_problem(problems::generate_aloha(spec.K, seed)), cfg); }));
                        break;
                    case Experiment::single_solve:
                        rows.push_back(detail::guarded_row(base, [&] { return solve(load_instance(spec.instance_path, repr), cfg); }));
                        break;
                    }
                }
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Result serialization

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double parse_real(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(Errc::ParseError, "not a number: '" + s + "'");
    }
    if (used != s.size()) throw Error(Errc::ParseError, "not a number: '" + s + "'");
    return v;
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << csv_header << '\n';
    for (const auto& r : rows)
        out << r.instance_id << ',' << r.algorithm << ',' << r.representation << ',' << r.selection << ',' << r.reduction
            << ',' << r.status << ',' << format_real(r.objective) << ',' << r.iterations << ',' << r.peak_regions << ','
            << format_real(r.wall_time_s) << ',' << r.seed << '\n';
}

inline json to_json(const std::vector<ResultRow>& rows) {
    // Reals go through the 12-digit text form so both outputs carry the
    // same precision; non-finite values are kept as strings.
    auto real = [](double v) -> json {
        if (!std::isfinite(v)) return format_real(v);
        return parse_real(format_real(v));
    };
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"instance_id", r.instance_id}, {"algorithm", r.algorithm}, {"representation", r.representation},
                       {"selection", r.selection}, {"reduction", r.reduction}, {"status", r.status},
                       {"objective", real(r.objective)}, {"iterations", r.iterations}, {"peak_regions", r.peak_regions},
                       {"wall_time_s", real(r.wall_time_s)}, {"seed", r.seed}});
    return arr;
}

inline void write_json(const std::vector<ResultRow>& rows, std::ostream& out) { out << to_json(rows).dump(2) << '\n'; }

namespace detail {

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

inline std::uint64_t parse_count(const std::string& s, const char* field) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        field_error(field, "expected a nonnegative integer, got '" + s + "'");
    return std::stoull(s);
}

} // namespace detail

inline void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    detail::write_file(path, [&](std::ostream& out) { write_csv(rows, out); });
}

inline void write_json(const std::vector<ResultRow>& rows, const std::string& path) {
    detail::write_file(path, [&](std::ostream& out) { write_json(rows, out); });
}

inline std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw Error(Errc::ParseError, "CSV header mismatch");
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected 11 columns");
        ResultRow r;
        r.instance_id = detail::parse_count(cells[0], "instance_id");
        r.algorithm = cells[1];
        r.representation = cells[2];
        r.selection = cells[3];
        r.reduction = cells[4];
        r.status = cells[5];
        r.objective = parse_real(cells[6]);
        r.iterations = detail::parse_count(cells[7], "iterations");
        r.peak_regions = detail::parse_count(cells[8], "peak_regions");
        r.wall_time_s = parse_real(cells[9]);
        r.seed = detail::parse_count(cells[10], "seed");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ResultRow> read_json(const json& arr) {
    if (!arr.is_array()) throw Error(Errc::ParseError, "result document must be an array");
    auto real = [](const json& v) { return v.is_string() ? parse_real(v.get<std::string>()) : v.get<double>(); };
    std::vector<ResultRow> rows;
    try {
        for (const auto& o : arr) {
            ResultRow r;
            r.instance_id = o.at("instance_id").get<std::size_t>();
            r.algorithm = o.at("algorithm").get<std::string>();
            r.representation = o.at("representation").get<std::string>();
            r.selection = o.at("selection").get<std::string>();
            r.reduction = o.at("reduction").get<std::string>();
            r.status = o.at("status").get<std::string>();
            r.objective = real(o.at("objective"));
            r.iterations = o.at("iterations").get<std::uint64_t>();
            r.peak_regions = o.at("peak_regions").get<std::size_t>();
            r.wall_time_s = real(o.at("wall_time_s"));
            r.seed = o.at("seed").get<std::uint64_t>();
            rows.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    return rows;
}

} // namespace mmp::bench

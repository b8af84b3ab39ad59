#pragma once

#include "arch.hpp"
#include "count.hpp"
#include "expsum.hpp"
#include "forms.hpp"
#include "gamma.hpp"
#include "int_types.hpp"
#include "local.hpp"
#include "reduction.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace qfrep {

using ordered_json = nlohmann::ordered_json;

// Floats are rounded to 12 significant digits before serialization so that
// reports diff byte-identically across runs and platforms.
inline double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline ordered_json int_json(const Int& v) {
    if (v >= Int(std::numeric_limits<std::int64_t>::min()) &&
        v <= Int(std::numeric_limits<std::int64_t>::max()))
        return v.convert_to<std::int64_t>();
    return v.str();
}

inline ordered_json rational_json(const Rat& r) {
    return ordered_json{{"num", int_json(numerator(r))}, {"den", int_json(denominator(r))}};
}

inline ordered_json matrix_json(const IntMat& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(int_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json form_json(const QuadraticForm& f) {
    return ordered_json{{"dim", f.dim()}, {"entries", matrix_json(f.gram())}};
}

// ---------------------------------------------------------------------------
// Form file format (shared repo-wide): {"dim": n, "entries": [[...], ...]}
// with exact integers; non-integral entries are rejected.
// ---------------------------------------------------------------------------

inline Int parse_exact_integer(const nlohmann::json& v, const std::string& where) {
    if (v.is_number_integer()) return Int(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return Int(v.get<std::uint64_t>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.empty()) throw ParseError("empty integer string in " + where);
        std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (k == s.size()) throw ParseError("malformed integer in " + where);
        for (; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k])))
                throw ParseError("non-integral entry in " + where);
        return Int(s);
    }
    throw ParseError("non-integral entry in " + where);
}

inline IntMat parse_form_matrix(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("entries"))
        throw ParseError("form file must be {\"dim\": n, \"entries\": [[...]]}");
    if (!doc["dim"].is_number_integer()) throw ParseError("dim must be an integer");
    const long long dim = doc["dim"].get<long long>();
    if (dim < 1 || dim > 64) throw ParseError("dim out of range");
    const auto& entries = doc["entries"];
    if (!entries.is_array() || static_cast<long long>(entries.size()) != dim)
        throw ParseError("entries must be a dim x dim array");
    IntMat m(dim, dim);
    for (long long i = 0; i < dim; ++i) {
        const auto& row = entries[i];
        if (!row.is_array() || static_cast<long long>(row.size()) != dim)
            throw ParseError("entries must be a dim x dim array");
        for (long long j = 0; j < dim; ++j)
            m(i, j) = parse_exact_integer(row[j], "entries[" + std::to_string(i) + "][" +
                                                     std::to_string(j) + "]");
    }
    return m;
}

inline IntMat load_form_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open form file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("JSON parse error in " + path + ": " + e.what());
    }
    return parse_form_matrix(doc);
}

// ---------------------------------------------------------------------------
// Result serializers (field order fixed).
// ---------------------------------------------------------------------------

inline ordered_json count_json(const RepresentationCount& c, bool with_timing = true) {
    ordered_json j;
    j["count"] = int_json(c.count);
    j["nodes"] = c.nodes_visited;
    j["ms"] = with_timing ? round12(c.elapsed_ms) : 0.0;
    return j;
}

inline ordered_json reduction_json(const ReductionResult& r) {
    ordered_json j;
    j["reduced"] = form_json(r.reduced);
    j["transform"] = matrix_json(r.transform);
    return j;
}

inline ordered_json gamma_json(const GammaProfile& g) {
    ordered_json j;
    ordered_json gi = ordered_json::array();
    for (long double v : g.gamma_i) gi.push_back(round12(static_cast<double>(v)));
    j["gamma_i"] = std::move(gi);
    if (g.degenerate)
        j["gamma"] = "infinity";
    else
        j["gamma"] = round12(static_cast<double>(g.gamma));
    j["degenerate"] = g.degenerate;
    return j;
}

inline ordered_json local_density_json(const LocalDensity& d) {
    ordered_json j;
    j["p"] = int_json(d.p);
    j["t_used"] = d.t_used;
    j["value"] = rational_json(d.value);
    return j;
}

inline ordered_json arch_json(const ArchimedeanDensity& d) {
    ordered_json j;
    j["value"] = round12(d.value);
    j["method"] = d.method;
    if (d.method == "shell_estimate") {
        j["epsilon"] = round12(d.epsilon);
        j["samples"] = d.samples;
        j["std_error"] = round12(d.std_error);
        j["seed"] = d.seed;
    }
    return j;
}

inline ordered_json sseries_json(const SingularSeriesTruncation& s) {
    ordered_json j;
    j["Q"] = int_json(s.Q);
    ordered_json terms = ordered_json::array();
    for (const auto& [q, term] : s.terms) {
        ordered_json t;
        t["q"] = int_json(q);
        t["re"] = round12(term.real().convert_to<double>());
        t["im"] = round12(term.imag().convert_to<double>());
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    j["partial_sum"] = round12(s.partial_sum.convert_to<double>());
    j["imag_residual"] = round12(s.imag_residual.convert_to<double>());
    j["euler_partial"] = round12(s.euler_partial.convert_to<double>());
    ordered_json table = ordered_json::array();
    for (const auto& d : s.alpha_table) table.push_back(local_density_json(d));
    j["alpha_p"] = std::move(table);
    return j;
}

}  // namespace qfrep

// Copyright 2026 The bfnlab Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "bfnlab/cube.hpp"
#include "bfnlab/deviation.hpp"
#include "bfnlab/hypergraph.hpp"
#include "bfnlab/oracle.hpp"
#include "bfnlab/sparse_junta.hpp"
#include "bfnlab/valueset.hpp"
#include <nlohmann/json.hpp>

namespace bfnlab {

using Json = nlohmann::json;

/// Malformed or inconsistent input data.
struct FormatError : Error {
    using Error::Error;
};

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json parse_json(const std::string &text, const std::string &what = "input") {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw FormatError("malformed JSON in " + what + ": " + e.what());
    }
}

inline Json read_json(const std::filesystem::path &path) {
    return parse_json(read_file(path), path.string());
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Scalars.

/// A coefficient given either as a JSON number or as an exact decimal string.
inline double read_real(const Json &j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        try {
            return Dyadic::parse_decimal(s).to_double();
        } catch (const std::exception &) {
        }
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used == s.size()) {
                return v;
            }
        } catch (const std::exception &) {
        }
        throw FormatError("not a number: \"" + s + "\"");
    }
    throw FormatError("expected a number");
}

/// Number, or an exact decimal string in rational mode.
inline Json write_real(double v, bool rational) {
    if (!rational) {
        return v;
    }
    auto d = Dyadic::from_double(v);
    if (!d) {
        throw Error("value is not representable as a dyadic rational");
    }
    return d->to_decimal();
}

// ---------------------------------------------------------------------------
// Value sets.

/// Parses "0,1,-0.5" into a value set.
inline ValueSet parse_values(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception &) {
            throw FormatError("bad value list entry: \"" + item + "\"");
        }
    }
    if (out.empty()) {
        throw FormatError("empty value list");
    }
    return ValueSet(std::move(out));
}

inline Json to_json(const ValueSet &a) {
    return a.values();
}

inline ValueSet value_set_from_json(const Json &j) {
    if (!j.is_array() || j.empty()) {
        throw FormatError("value set must be a nonempty array");
    }
    std::vector<double> out;
    for (const auto &v : j) {
        out.push_back(read_real(v));
    }
    return ValueSet(std::move(out));
}

// ---------------------------------------------------------------------------
// Functions.

inline std::vector<int> mask_indices(Mask m) {
    return IndexSubset(m).indices();
}

inline Mask mask_from_json(const Json &j, int n) {
    if (!j.is_array()) {
        throw FormatError("index set must be an array");
    }
    Mask m = 0;
    for (const auto &v : j) {
        if (!v.is_number_integer()) {
            throw FormatError("index must be an integer");
        }
        int i = v.get<int>();
        if (i < 0 || i >= n) {
            throw FormatError("index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
        }
        m |= Mask{1} << i;
    }
    return m;
}

inline Json function_to_json(const TruthTable &tt, bool rational = false) {
    Json values = Json::array();
    for (double v : tt.values()) {
        values.push_back(write_real(v, rational));
    }
    return {{"n", tt.n()}, {"repr", "truth_table"}, {"values", values}};
}

inline Json function_to_json(const SubsetPoly &poly, bool rational = false) {
    const SubsetPoly y = to_y_basis(poly);
    Json coeffs = Json::array();
    for (const auto &[key, c] : y.coeffs()) {
        coeffs.push_back({{"set", mask_indices(key)}, {"c", write_real(c, rational)}});
    }
    return {{"n", y.n()}, {"repr", "y_poly"}, {"coeffs", coeffs}};
}

/// Reads either representation into a y-basis polynomial.
inline SubsetPoly function_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
        throw FormatError("function must be an object with integer \"n\"");
    }
    const int n = j["n"].get<int>();
    if (n < 0 || n > kMaxVars) {
        throw FormatError("n out of range");
    }
    std::string repr = j.value("repr", j.contains("coeffs") ? "y_poly" : "truth_table");
    try {
        if (repr == "truth_table") {
            if (n > kDenseCap) {
                throw FormatError("truth tables are limited to n <= " + std::to_string(kDenseCap));
            }
            const Json &values = j.at("values");
            if (!values.is_array() || values.size() != (std::size_t{1} << n)) {
                throw FormatError("\"values\" must hold 2^n entries");
            }
            std::vector<double> v;
            v.reserve(values.size());
            for (const auto &x : values) {
                v.push_back(read_real(x));
            }
            return y_expand(TruthTable(n, std::move(v)));
        }
        if (repr == "y_poly") {
            SubsetPoly out(n);
            for (const auto &term : j.at("coeffs")) {
                out.add(mask_from_json(term.at("set"), n), read_real(term.at("c")));
            }
            return out;
        }
    } catch (const Json::exception &e) {
        throw FormatError(std::string("bad function file: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("bad function file: ") + e.what());
    }
    throw FormatError("unknown repr \"" + repr + "\"");
}

/// Tables are read as given, without a round trip through the y basis.
inline TruthTable table_from_json(const Json &j) {
    if (j.is_object() && j.value("repr", "") == "truth_table" && j.contains("n") && j["n"].is_number_integer() &&
        j["n"].get<int>() >= 0 && j["n"].get<int>() <= kDenseCap && j.contains("values") && j["values"].is_array() &&
        j["values"].size() == (std::size_t{1} << j["n"].get<int>())) {
        std::vector<double> v;
        v.reserve(j["values"].size());
        for (const auto &x : j["values"]) {
            v.push_back(read_real(x));
        }
        try {
            return TruthTable(j["n"].get<int>(), std::move(v));
        } catch (const std::invalid_argument &e) {
            throw FormatError(std::string("bad function file: ") + e.what());
        }
    }
    SubsetPoly y = function_from_json(j);
    if (y.n() > kDenseCap) {
        throw CapExceeded("function on " + std::to_string(y.n()) + " variables exceeds the dense cap");
    }
    return to_truth_table(y);
}

// ---------------------------------------------------------------------------
// Hypergraphs.

inline Json to_json(const Hypergraph &h) {
    Json edges = Json::array();
    for (Mask e : h.edges()) {
        edges.push_back(mask_indices(e));
    }
    return {{"n", h.n()}, {"edges", edges}};
}

inline Hypergraph hypergraph_from_json(const Json &j) {
    try {
        const int n = j.at("n").get<int>();
        if (n < 0 || n > kMaxVars) {
            throw FormatError("n out of range");
        }
        std::vector<Mask> edges;
        for (const auto &e : j.at("edges")) {
            edges.push_back(mask_from_json(e, n));
        }
        return Hypergraph(n, std::move(edges));
    } catch (const Json::exception &e) {
        throw FormatError(std::string("bad hypergraph file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports.

inline Json to_json(const CountDistribution &d) {
    return {{"pmf", d.pmf}, {"exact", d.exact}, {"samples", d.samples}};
}

inline Json to_json(const VerifyReport &r) {
    return {{"p", r.p},
            {"err2", r.err2},
            {"pr_not_in_A", r.pr_not_in_A},
            {"quantized", r.quantized},
            {"quantization_set", r.quantization_set},
            {"bf", r.bf},
            {"bf_times_p", r.bf_times_p},
            {"live_count_hist", r.live_counts.pmf}};
}

inline Json to_json(const VoteTally &v) {
    Json buckets = Json::array();
    for (const auto &[value, weight] : v.buckets) {
        buckets.push_back({{"value", value}, {"weight", weight}});
    }
    return {{"set", mask_indices(v.t)}, {"value", v.value},        {"margin", v.margin()},
            {"total", v.total_weight},  {"winner", v.winner_weight}, {"buckets", buckets}};
}

inline Json to_json(const SparseJuntaResult &r) {
    Json votes = Json::array();
    for (const auto &v : r.votes) {
        votes.push_back(to_json(v));
    }
    Json out = to_json(r.report);
    out["votes"] = votes;
    out["route"] = r.route;
    out["n_samples"] = r.n_samples;
    out["eps"] = r.eps;
    out["eps_estimate"] = r.eps_estimate;
    out["skipped"] = r.skipped;
    return out;
}

inline Json to_json(const KsLevel &l) {
    return {{"degree", l.degree}, {"route", l.route},   {"eps", l.eps},       {"delta", l.delta},
            {"A", l.a_size},      {"B", l.b_size},       {"C", l.c_size},      {"D", l.d_size},
            {"E", l.e_size},      {"err", l.err}};
}

inline Json to_json(const ConverseReport &r) {
    return {{"eps_prime", r.eps_prime}, {"e_dist2", r.e_dist2}, {"e_G2", r.e_G2},     {"bf", r.bf},
            {"bf_times_p", r.bf_times_p}, {"ratio", r.ratio},     {"exact", r.exact}, {"quantized", r.quantized},
            {"degree", r.degree}};
}

inline Json to_json(const MomentReport &r) {
    return {{"k", r.k},         {"d", r.d},         {"uniform", r.uniform}, {"moment", r.moment},
            {"bf", r.bf},       {"C", r.c},         {"C_eff", r.c_eff},     {"bound", r.bound},
            {"slack", r.slack}, {"holds", r.holds}};
}

}  // namespace bfnlab

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

// Command-line front end: approximate, verify, oracle, bf, experiment, gen-corpus.
//
// Exit status: 0 on success, 2 on usage or input errors, 3 when a cap or
// budget is exceeded (a JSON error record is printed on stderr).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bfnlab/bfnlab.hpp"

namespace {

using namespace bfnlab;
namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

/// Files are staged in memory and written together at the end, so a failing
/// command leaves nothing behind.
class Outputs {
   public:
    void add(const std::string &path, std::string content) {
        if (!path.empty()) {
            files_.emplace_back(path, std::move(content));
        }
    }
    void commit() const {
        for (const auto &[path, content] : files_) {
            atomic_write(path, content);
        }
    }

   private:
    std::vector<std::pair<std::string, std::string>> files_;
};

ValueSet values_option(const std::string &text) {
    try {
        return parse_values(text);
    } catch (const std::exception &e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------------------

struct ApproximateArgs {
    std::string input;
    std::string out;
    std::string report;
    std::string truth;
    double p = 0.1;
    int degree = 1;
    std::string values = "0,1";
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int junta_cap = 4;
    bool exact = false;
    double p0 = 0.2;
    unsigned workers = 1;
    bool rational = false;
};

Json approx_config(const ApproximateArgs &a, const ApproxParams &params) {
    return {{"subcommand", "approximate"},
            {"input", a.input},
            {"p", params.p},
            {"degree", params.degree},
            {"values", to_json(params.values)},
            {"samples", params.n_samples},
            {"seed", params.seed},
            {"junta_cap", params.junta_cap},
            {"exact", params.exact},
            {"p0", params.p0},
            {"workers", params.workers},
            {"vote_bucket", params.vote_bucket}};
}

int run_approximate(const ApproximateArgs &a) {
    ApproxParams params;
    params.p = a.p;
    params.degree = a.degree;
    params.values = values_option(a.values);
    params.n_samples = a.samples;
    params.seed = a.seed;
    params.junta_cap = a.junta_cap;
    params.exact = a.exact;
    params.p0 = a.p0;
    params.workers = resolve_workers(a.workers);

    const TruthTable f = table_from_json(read_json(a.input));
    std::optional<SubsetPoly> truth;
    if (!a.truth.empty()) {
        truth = function_from_json(read_json(a.truth));
    }
    SparseJuntaResult result = build(f, params);
    if (params.n_samples == 0) {
        params.n_samples = result.n_samples;
    }

    Json report = to_json(result);
    report["config"] = approx_config(a, params);
    if (truth) {
        report["recovery"] = (result.g == *truth);
    }
    Json g = function_to_json(result.g, a.rational);
    g["config"] = report["config"];

    Outputs outputs;
    outputs.add(a.out, dump(g));
    outputs.add(a.report, dump(report));
    outputs.commit();
    if (a.report.empty()) {
        std::cout << dump(report);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string f;
    std::string g;
    std::string out;
    double p = 0.1;
    int degree = -1;
    std::string values = "0,1";
    int junta_cap = 4;
};

int run_verify(const VerifyArgs &a) {
    ApproxParams params;
    params.p = a.p;
    params.values = values_option(a.values);
    params.junta_cap = a.junta_cap;
    const TruthTable f = table_from_json(read_json(a.f));
    const SubsetPoly g = function_from_json(read_json(a.g));
    if (g.n() != f.n()) {
        throw UsageError("f and g have different dimensions");
    }
    params.degree = a.degree >= 0 ? a.degree : g.degree();
    params.validate();
    VerifyReport report = verify_properties(f, g, params);
    Json out = to_json(report);
    out["config"] = {{"subcommand", "verify"}, {"f", a.f},          {"g", a.g},
                     {"p", params.p},          {"degree", params.degree}, {"values", to_json(params.values)},
                     {"junta_cap", params.junta_cap}};
    Outputs outputs;
    outputs.add(a.out, dump(out));
    outputs.commit();
    if (a.out.empty()) {
        std::cout << dump(out);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
    std::string input;
    std::string out;
    std::string method = "oracle";
    int degree = 1;
    std::string values = "0,1";
    int junta_cap = 4;
    bool exhaustive = false;
    double p = 0.5;
    int b_arity = 4;
    int c_arity = 3;
    unsigned workers = 1;
};

int run_oracle(const OracleArgs &a) {
    const ValueSet values = values_option(a.values);
    const TruthTable f = table_from_json(read_json(a.input));
    Json out;
    Json config = {{"subcommand", "oracle"}, {"input", a.input},   {"method", a.method},
                   {"degree", a.degree},     {"values", to_json(values)}, {"p", a.p}};
    if (a.method == "oracle") {
        OracleParams params;
        params.degree = a.degree;
        params.values = values;
        params.junta_cap = a.junta_cap;
        params.exhaustive = a.exhaustive;
        params.workers = resolve_workers(a.workers);
        OracleResult r = oracle_closest(f, params, BiasedMeasure(a.p));
        out = {{"g", function_to_json(r.g_poly)},
               {"err", r.err},
               {"junta", r.junta.indices()},
               {"fast_path", r.fast_path},
               {"subsets_searched", r.subsets_searched}};
        config["junta_cap"] = a.junta_cap;
        config["exhaustive"] = a.exhaustive;
    } else if (a.method == "fkn") {
        if (a.p != 0.5) {
            throw UsageError("the fkn method works at p = 0.5 only");
        }
        FknResult r = fkn_approx(f, values);
        out = {{"g", function_to_json(y_expand(r.g))},
               {"err", r.err},
               {"junta", r.junta.indices()},
               {"eps", r.eps},
               {"threshold", r.threshold},
               {"tail", r.tail},
               {"projected_mass", r.projected_mass},
               {"fallback", r.fallback}};
    } else if (a.method == "ks") {
        if (a.p != 0.5) {
            throw UsageError("the ks method works at p = 0.5 only");
        }
        QuantCaps caps;
        caps.b_arity = a.b_arity;
        caps.c_arity = a.c_arity;
        KsResult r = ks_recursive(f, values, a.degree, caps);
        Json trace = Json::array();
        for (const auto &level : r.trace) {
            trace.push_back(to_json(level));
        }
        out = {{"g", function_to_json(y_expand(r.g))}, {"err", r.err}, {"trace", trace}};
        config["b_arity"] = caps.b_arity;
        config["c_arity"] = caps.c_arity;
    } else {
        throw UsageError("unknown method " + a.method);
    }
    out["config"] = config;
    Outputs outputs;
    outputs.add(a.out, dump(out));
    outputs.commit();
    if (a.out.empty()) {
        std::cout << dump(out);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BfArgs {
    std::string hypergraph;
    bool json = false;
};

int run_bf(const BfArgs &a) {
    const Hypergraph h = hypergraph_from_json(read_json(a.hypergraph));
    const double bf = branching_factor(h);
    if (a.json) {
        std::cout << dump({{"bf", bf}, {"edges", h.size()}, {"n", h.n()}, {"hypergraph", a.hypergraph}});
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.15g", bf);
        std::cout << buf << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string csv;
    std::string json;
    // fd
    int d = 1;
    int n = 20;
    std::vector<double> deltas{0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3};
    // moments / tail / bias
    std::string hypergraph;
    std::string input;
    double p = 0.1;
    int k_max = 4;
    std::vector<double> t_grid;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string values = "0,1";
};

void emit_experiment(const ExperimentArgs &a, const std::string &csv, Json summary) {
    Outputs outputs;
    outputs.add(a.csv, csv);
    outputs.add(a.json, dump(summary));
    outputs.commit();
    if (a.csv.empty()) {
        std::cout << csv;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_fd(const ExperimentArgs &a) {
    const SubsetPoly f = fd_construct({a.d, a.n});
    std::ostringstream csv;
    csv << "delta,p,pr_not_binary,binomial_reference\n";
    std::vector<double> xs, ys;
    for (double delta : a.deltas) {
        const double p = delta / a.n;
        BiasProfile prof = bias_profile(f, ValueSet{0.0, 1.0}, BiasedMeasure(p));
        double off = 0;
        for (const auto &[v, pr] : prof.histogram) {
            if (std::abs(v) > 1e-9 && std::abs(v - 1) > 1e-9) {
                off += pr;
            }
        }
        double ref = fd_off_binary_prob(a.d, a.n, p);
        csv << fmt(delta) << "," << fmt(p) << "," << fmt(off) << "," << fmt(ref) << "\n";
        xs.push_back(delta);
        ys.push_back(off);
    }
    Json summary = {{"config", {{"subcommand", "experiment fd"}, {"d", a.d}, {"n", a.n}, {"deltas", a.deltas}}},
                    {"slope", loglog_slope(xs, ys)},
                    {"expected_slope", a.d % 2 == 1 ? a.d + 1 : a.d + 2}};
    emit_experiment(a, csv.str(), summary);
    return 0;
}

EvalMode mode_of(const ExperimentArgs &a) {
    return a.samples > 0 ? EvalMode::monte_carlo(a.samples, a.seed) : EvalMode::exact();
}

int run_moments(const ExperimentArgs &a) {
    const Hypergraph h = hypergraph_from_json(read_json(a.hypergraph));
    std::ostringstream csv;
    csv << "k,moment,bound,slack,holds\n";
    Json rows = Json::array();
    bool all = true;
    for (int k = 1; k <= a.k_max; ++k) {
        MomentReport r = moment_check(h, BiasedMeasure(a.p), k, mode_of(a));
        csv << k << "," << fmt(r.moment) << "," << fmt(r.bound) << "," << fmt(r.slack) << "," << r.holds << "\n";
        rows.push_back(to_json(r));
        all = all && r.holds;
    }
    Json summary = {{"config",
                     {{"subcommand", "experiment moments"},
                      {"hypergraph", a.hypergraph},
                      {"p", a.p},
                      {"k_max", a.k_max},
                      {"samples", a.samples},
                      {"seed", a.seed}}},
                    {"rows", rows},
                    {"all_hold", all}};
    emit_experiment(a, csv.str(), summary);
    return 0;
}

int run_tail(const ExperimentArgs &a) {
    if (a.hypergraph.empty() == a.input.empty()) {
        throw UsageError("tail needs exactly one of --hypergraph or --input");
    }
    std::vector<TailPoint> points;
    double m = 1;
    if (!a.hypergraph.empty()) {
        const Hypergraph h = hypergraph_from_json(read_json(a.hypergraph));
        points = tail_estimate(h, BiasedMeasure(a.p), a.t_grid.empty() ? default_t_grid() : a.t_grid, mode_of(a));
    } else {
        const SubsetPoly f = function_from_json(read_json(a.input));
        m = 0;
        for (const auto &[key, c] : f.coeffs()) {
            m = std::max(m, std::abs(c));
        }
        std::optional<MonteCarloBudget> mc;
        if (a.samples > 0) {
            mc = MonteCarloBudget{a.samples, a.seed};
        }
        points = tail_estimate(f, BiasedMeasure(a.p), a.t_grid.empty() ? default_t_grid(m) : a.t_grid, mc);
    }
    std::ostringstream csv;
    csv << "t,tail,lo,hi,exact\n";
    for (const auto &pt : points) {
        csv << fmt(pt.t) << "," << fmt(pt.tail) << "," << fmt(pt.lo) << "," << fmt(pt.hi) << "," << pt.exact << "\n";
    }
    Json summary = {{"config",
                     {{"subcommand", "experiment tail"},
                      {"hypergraph", a.hypergraph},
                      {"input", a.input},
                      {"p", a.p},
                      {"coefficient_bound", m},
                      {"samples", a.samples},
                      {"seed", a.seed}}},
                    {"points", points.size()}};
    emit_experiment(a, csv.str(), summary);
    return 0;
}

int run_bias(const ExperimentArgs &a) {
    const ValueSet values = values_option(a.values);
    const SubsetPoly g = function_from_json(read_json(a.input));
    BiasProfile prof = bias_profile(g, values, BiasedMeasure(a.p));
    std::ostringstream csv;
    csv << "value,probability\n";
    for (const auto &[v, pr] : prof.histogram) {
        csv << fmt(v) << "," << fmt(pr) << "\n";
    }
    Json rounded = Json::array();
    for (const auto &[v, pr] : prof.rounded) {
        rounded.push_back({{"value", v}, {"probability", pr}});
    }
    Json summary = {{"config",
                     {{"subcommand", "experiment bias"}, {"input", a.input}, {"p", a.p}, {"values", to_json(values)}}},
                    {"a_star", prof.a_star},
                    {"pr_ne", prof.pr_ne},
                    {"rounded", rounded}};
    emit_experiment(a, csv.str(), summary);
    return 0;
}

// ---------------------------------------------------------------------------

struct CorpusArgs {
    std::string kind;
    std::string out_dir;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    int n = 16;
    double p = 0.1;
    int degree = 2;
    std::string values = "0,1";
    double noise_lo = 1e-4;
    double noise_hi = 1e-3;
    int arity = 4;
    double rho = 5;
    std::size_t edges = 20;
    int min_size = 1;
    int max_size = 2;
    bool rational = false;
};

std::string indexed(const std::string &stem, std::size_t i, const std::string &suffix) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    return stem + "_" + buf + suffix;
}

int run_gen_corpus(const CorpusArgs &a) {
    const fs::path dir(a.out_dir);
    if (!fs::is_directory(dir)) {
        throw UsageError("output directory does not exist: " + a.out_dir);
    }
    const ValueSet values = values_option(a.values);
    Json config = {{"subcommand", "gen-corpus"}, {"kind", a.kind},         {"count", a.count},
                   {"seed", a.seed},             {"n", a.n},               {"p", a.p},
                   {"degree", a.degree},         {"values", to_json(values)}};
    Outputs outputs;
    Json manifest = Json::array();
    for (std::size_t i = 0; i < a.count; ++i) {
        Rng rng = stream_rng(a.seed, i);
        if (a.kind == "planted-sparse-junta" || a.kind == "perturbed-junta") {
            PlantedInstance inst;
            if (a.kind == "planted-sparse-junta") {
                inst = planted_sparse_junta(a.n, a.p, a.degree, values, a.noise_lo, a.noise_hi, rng, a.arity);
            } else {
                inst = perturbed_junta(a.n, a.arity, a.degree, values, a.noise_hi, rng);
            }
            Json f = function_to_json(inst.f, a.rational);
            Json truth = function_to_json(inst.truth, a.rational);
            truth["noise_norm2"] = inst.noise_norm2;
            truth["instance"] = i;
            const std::string name = indexed("instance", i, ".json");
            const std::string side = indexed("instance", i, ".truth.json");
            outputs.add((dir / name).string(), dump(f));
            outputs.add((dir / side).string(), dump(truth));
            manifest.push_back({{"function", name}, {"truth", side}, {"noise_norm2", inst.noise_norm2}});
        } else if (a.kind == "random-bf-hypergraph") {
            Hypergraph h = random_bf_hypergraph(a.n, a.min_size, a.max_size, a.rho, a.edges, rng);
            const double bf = branching_factor(h);
            if (bf > a.rho * (1 + 1e-12)) {
                throw Error("generated hypergraph violates the branching-factor target");
            }
            const std::string name = indexed("hypergraph", i, ".json");
            outputs.add((dir / name).string(), dump(to_json(h)));
            manifest.push_back({{"hypergraph", name}, {"bf", bf}, {"edges", h.size()}});
        } else if (a.kind == "fd-family") {
            const int d = static_cast<int>(i) + 1;
            const std::string name = indexed("fd", i, ".json");
            outputs.add((dir / name).string(), dump(function_to_json(fd_construct({d, a.n}), a.rational)));
            manifest.push_back({{"function", name}, {"d", d}, {"n", a.n}});
        } else {
            throw UsageError("unknown corpus kind " + a.kind);
        }
    }
    config["noise_lo"] = a.noise_lo;
    config["noise_hi"] = a.noise_hi;
    config["arity"] = a.arity;
    config["rho"] = a.rho;
    config["edges"] = a.edges;
    config["min_size"] = a.min_size;
    config["max_size"] = a.max_size;
    outputs.add((dir / "manifest.json").string(), dump({{"config", config}, {"items", manifest}}));
    outputs.commit();
    return 0;
}

void print_error_record(const char *kind, const std::string &message) {
    std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Analysis of real-valued functions on the p-biased hypercube"};
    app.require_subcommand(1);
    std::function<int()> action;

    ApproximateArgs approx;
    auto *cmd = app.add_subcommand("approximate", "Sparse-junta approximation of a function");
    cmd->add_option("--input", approx.input, "Function file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", approx.out, "Where to write g");
    cmd->add_option("--report", approx.report, "Where to write the report (default: stdout)");
    cmd->add_option("--truth", approx.truth, "Ground truth to compare against")->check(CLI::ExistingFile);
    cmd->add_option("--p", approx.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    cmd->add_option("--degree", approx.degree, "Degree d")->check(CLI::NonNegativeNumber);
    cmd->add_option("--values", approx.values, "Value set A, e.g. 0,1");
    cmd->add_option("--samples", approx.samples, "Samples per vote (0 = default rule)");
    auto *seed_opt = cmd->add_option("--seed", approx.seed, "Seed");
    cmd->add_option("--junta-cap", approx.junta_cap, "Local junta arity cap")->check(CLI::Range(0, 8));
    auto *exact_flag = cmd->add_flag("--exact", approx.exact, "Enumerate all restrictions");
    cmd->add_option("--p0", approx.p0, "Above this p, use the constant-p oracle");
    cmd->add_option("--workers", approx.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--rational", approx.rational, "Write coefficients as exact decimal strings");
    cmd->callback([&] {
        if (seed_opt->count() == 0 && !approx.exact) {
            throw CLI::RequiredError("--seed (or --exact)");
        }
        (void)exact_flag;
        action = [&] { return run_approximate(approx); };
    });

    VerifyArgs verify;
    cmd = app.add_subcommand("verify", "Report the properties of a candidate approximation");
    cmd->add_option("--f", verify.f, "Function file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--g", verify.g, "Candidate file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", verify.out, "Report file (default: stdout)");
    cmd->add_option("--p", verify.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    cmd->add_option("--degree", verify.degree, "Degree used for the quantization reference (default: deg g)");
    cmd->add_option("--values", verify.values, "Value set A");
    cmd->add_option("--junta-cap", verify.junta_cap, "Arity of the quantization reference")->check(CLI::Range(0, 8));
    cmd->callback([&] { action = [&] { return run_verify(verify); }; });

    OracleArgs oracle;
    cmd = app.add_subcommand("oracle", "Constant-p approximators");
    cmd->add_option("--input", oracle.input, "Function file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", oracle.out, "Result file (default: stdout)");
    cmd->add_option("--method", oracle.method, "oracle | fkn | ks")
        ->check(CLI::IsMember({"oracle", "fkn", "ks"}));
    cmd->add_option("--degree", oracle.degree, "Degree d")->check(CLI::NonNegativeNumber);
    cmd->add_option("--values", oracle.values, "Value set A");
    cmd->add_option("--junta-cap", oracle.junta_cap, "Junta arity cap")->check(CLI::Range(0, 8));
    cmd->add_flag("--exhaustive", oracle.exhaustive, "Search over all coordinates");
    cmd->add_option("--p", oracle.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    cmd->add_option("--b-arity", oracle.b_arity, "ks: arity of the juntas generating B")->check(CLI::Range(0, 8));
    cmd->add_option("--c-arity", oracle.c_arity, "ks: arity cap of the affine functions generating C")
        ->check(CLI::Range(0, 8));
    cmd->add_option("--workers", oracle.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->callback([&] { action = [&] { return run_oracle(oracle); }; });

    BfArgs bf;
    cmd = app.add_subcommand("bf", "Branching factor of a hypergraph");
    cmd->add_option("--hypergraph", bf.hypergraph, "Hypergraph file")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--json", bf.json, "Print a JSON record");
    cmd->callback([&] { action = [&] { return run_bf(bf); }; });

    ExperimentArgs exp;
    auto *experiment = app.add_subcommand("experiment", "Grid experiments (CSV rows plus a JSON summary)");
    experiment->require_subcommand(1);
    auto add_outputs = [&](CLI::App *sub) {
        sub->add_option("--csv", exp.csv, "CSV file (default: stdout)");
        sub->add_option("--json", exp.json, "JSON summary file");
    };
    auto *fd = experiment->add_subcommand("fd", "Pr[f_d not in {0,1}] against delta = n p");
    fd->add_option("--d", exp.d, "Degree")->check(CLI::Range(1, 8));
    fd->add_option("--n", exp.n, "Variables")->check(CLI::Range(1, 24));
    fd->add_option("--deltas", exp.deltas, "Delta grid")->delimiter(',');
    add_outputs(fd);
    fd->callback([&] { action = [&] { return run_fd(exp); }; });
    auto *moments = experiment->add_subcommand("moments", "Moments of the live edge count against the bound");
    moments->add_option("--hypergraph", exp.hypergraph, "Hypergraph file")->required()->check(CLI::ExistingFile);
    moments->add_option("--p", exp.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    moments->add_option("--k-max", exp.k_max, "Largest moment")->check(CLI::Range(1, 16));
    moments->add_option("--samples", exp.samples, "Monte Carlo samples (0 = exact)");
    moments->add_option("--seed", exp.seed, "Seed");
    add_outputs(moments);
    moments->callback([&] { action = [&] { return run_moments(exp); }; });
    auto *tail = experiment->add_subcommand("tail", "Tail probabilities on a t-grid");
    tail->add_option("--hypergraph", exp.hypergraph, "Hypergraph file")->check(CLI::ExistingFile);
    tail->add_option("--input", exp.input, "Function file")->check(CLI::ExistingFile);
    tail->add_option("--p", exp.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    tail->add_option("--t-grid", exp.t_grid, "Thresholds")->delimiter(',');
    tail->add_option("--samples", exp.samples, "Monte Carlo samples (0 = exact)");
    tail->add_option("--seed", exp.seed, "Seed");
    add_outputs(tail);
    tail->callback([&] { action = [&] { return run_tail(exp); }; });
    auto *bias = experiment->add_subcommand("bias", "Bias profile of a function");
    bias->add_option("--input", exp.input, "Function file")->required()->check(CLI::ExistingFile);
    bias->add_option("--p", exp.p, "Bias p")->check(CLI::Range(1e-9, 0.5));
    bias->add_option("--values", exp.values, "Value set A");
    add_outputs(bias);
    bias->callback([&] { action = [&] { return run_bias(exp); }; });

    CorpusArgs corpus;
    cmd = app.add_subcommand("gen-corpus", "Generate a seeded corpus with ground truth");
    cmd->add_option("--kind", corpus.kind, "Generator")
        ->required()
        ->check(CLI::IsMember({"planted-sparse-junta", "perturbed-junta", "random-bf-hypergraph", "fd-family"}));
    cmd->add_option("--out-dir", corpus.out_dir, "Output directory")->required();
    cmd->add_option("--count", corpus.count, "Instances")->check(CLI::Range(1, 100000));
    cmd->add_option("--seed", corpus.seed, "Seed")->required();
    cmd->add_option("--n", corpus.n, "Variables")->check(CLI::Range(1, 24));
    cmd->add_option("--p", corpus.p, "Bias p (noise normalization)")->check(CLI::Range(1e-9, 0.5));
    cmd->add_option("--degree", corpus.degree, "Degree")->check(CLI::Range(0, 8));
    cmd->add_option("--values", corpus.values, "Value set A");
    cmd->add_option("--noise-lo", corpus.noise_lo, "Lower end of the noise norm range")->check(CLI::NonNegativeNumber);
    cmd->add_option("--noise-hi", corpus.noise_hi, "Upper end of the noise norm range (perturbed-junta: the norm)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--arity", corpus.arity, "Junta arity")->check(CLI::Range(0, 8));
    cmd->add_option("--rho", corpus.rho, "Branching-factor target")->check(CLI::Range(1.0, 1e9));
    cmd->add_option("--edges", corpus.edges, "Target edge count");
    cmd->add_option("--min-size", corpus.min_size, "Smallest edge")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-size", corpus.max_size, "Largest edge")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--rational", corpus.rational, "Write values as exact decimal strings");
    cmd->callback([&] { action = [&] { return run_gen_corpus(corpus); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        return action();
    } catch (const CapExceeded &e) {
        print_error_record("cap_exceeded", e.what());
        return kExitCap;
    } catch (const BudgetExceeded &e) {
        print_error_record("budget_exceeded", e.what());
        return kExitCap;
    } catch (const FormatError &e) {
        print_error_record("bad_input", e.what());
        return kExitUsage;
    } catch (const UsageError &e) {
        print_error_record("usage", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        print_error_record("invalid_argument", e.what());
        return kExitUsage;
    } catch (const std::exception &e) {
        print_error_record("failure", e.what());
        return 1;
    }
}

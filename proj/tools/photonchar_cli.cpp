// Copyright 2026 photonchar contributors
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

// Command-line front end. All numerics go through the C API of the shared
// library; this file owns the file formats (JSON schemas, CSV layouts) and
// the exit-code contract:
//   0  success
//   2  schema violation (malformed files or arguments)
//   3  physics violation (non-unitary, non-PSD, guard limits)
//   4  optimizer non-convergence (the result is still written)

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "photonchar.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitConvergence = 4;

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail(int exit_code, const std::string& message) {
    throw CliError{exit_code, message};
}

[[noreturn]] void fail_status(pc_status status, const std::string& context) {
    int exit_code = kExitSchema;
    if (status == PC_ERR_PHYSICS || status == PC_ERR_LIMIT) exit_code = kExitPhysics;
    if (status == PC_ERR_CONVERGENCE) exit_code = kExitConvergence;
    fail(exit_code, context + ": " + pc_status_name(status) + ": " + pc_last_error());
}

void check(pc_status status, const std::string& context) {
    if (status != PC_OK) fail_status(status, context);
}

// RAII for C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { Free(ptr); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using Unitary = Handle<pc_unitary, pc_unitary_free>;
using SMatrix = Handle<pc_smatrix, pc_smatrix_free>;
using PmfHandle = Handle<pc_pmf, pc_pmf_free>;
using CountsHandle = Handle<pc_counts, pc_counts_free>;
using DesignHandle = Handle<pc_design, pc_design_free>;
using DesignResultHandle = Handle<pc_design_result, pc_design_result_free>;
using FimHandle = Handle<pc_fim, pc_fim_free>;
using FitResultHandle = Handle<pc_fit_result, pc_fit_result_free>;

// ---- file plumbing ----

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kExitSchema, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(kExitSchema, path + ": " + e.what());
    }
    return j;
}

void require_schema(const json& j, const std::string& name, const std::string& path) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != name) {
        fail(kExitSchema, path + ": expected schema \"" + name + "\"");
    }
}

/// Atomic write: temp file in the same directory, then rename.
void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(kExitSchema, "cannot write " + tmp);
        out << content;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(kExitSchema, "cannot rename " + tmp + " to " + path);
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

// ---- schema readers/writers ----

json complex_pair(double re, double im) { return json::array({re, im}); }

json matrix_to_json(int dim, const std::vector<double>& reim) {
    json rows = json::array();
    for (int i = 0; i < dim; ++i) {
        json row = json::array();
        for (int j = 0; j < dim; ++j) {
            const int k = 2 * (i * dim + j);
            row.push_back(complex_pair(reim[static_cast<std::size_t>(k)],
                                       reim[static_cast<std::size_t>(k + 1)]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> matrix_from_json(const json& rows, int& dim, const std::string& path) {
    if (!rows.is_array() || rows.empty()) fail(kExitSchema, path + ": entries must be an array");
    dim = static_cast<int>(rows.size());
    std::vector<double> reim(static_cast<std::size_t>(2 * dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            fail(kExitSchema, path + ": entries must be a square nested array");
        }
        for (int j = 0; j < dim; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_array() || cell.size() != 2) {
                fail(kExitSchema, path + ": complex entries are [re, im] pairs");
            }
            reim[static_cast<std::size_t>(2 * (i * dim + j))] = cell[0].get<double>();
            reim[static_cast<std::size_t>(2 * (i * dim + j) + 1)] = cell[1].get<double>();
        }
    }
    return reim;
}

struct MeshSpec {
    int n_modes = 3;
    std::vector<double> ratios;
    std::vector<double> phases;
};

MeshSpec mesh_from_json(const json& j, const std::string& path) {
    MeshSpec mesh;
    if (!j.contains("n_modes") || !j.contains("splitting_ratios") || !j.contains("phases")) {
        fail(kExitSchema, path + ": mesh needs n_modes, splitting_ratios, phases");
    }
    mesh.n_modes = j["n_modes"].get<int>();
    mesh.ratios = j["splitting_ratios"].get<std::vector<double>>();
    mesh.phases = j["phases"].get<std::vector<double>>();
    return mesh;
}

json mesh_to_json(const MeshSpec& mesh) {
    return json{{"n_modes", mesh.n_modes},
                {"splitting_ratios", mesh.ratios},
                {"phases", mesh.phases}};
}

Unitary load_unitary_file(const std::string& path) {
    const json j = load_json(path);
    require_schema(j, "unitary/v1", path);
    int dim = 0;
    const auto reim = matrix_from_json(j.at("entries"), dim, path);
    if (j.contains("dim") && j["dim"].get<int>() != dim) {
        fail(kExitSchema, path + ": dim does not match entries");
    }
    Unitary u;
    check(pc_unitary_from_entries(dim, reim.data(), u.out()), path);
    return u;
}

Unitary load_mesh_file(const std::string& path) {
    const json j = load_json(path);
    require_schema(j, "mesh/v1", path);
    const MeshSpec mesh = mesh_from_json(j, path);
    Unitary u;
    check(pc_unitary_mesh(mesh.n_modes, mesh.ratios.data(), static_cast<int>(mesh.ratios.size()),
                          mesh.phases.data(), static_cast<int>(mesh.phases.size()), u.out()),
          path);
    return u;
}

std::array<double, 4> overlaps_from_json(const json& j, const std::string& path) {
    for (const char* key : {"x12", "x13", "x23", "triad_phase"}) {
        if (!j.contains(key)) fail(kExitSchema, path + ": overlaps need " + std::string(key));
    }
    return {j["x12"].get<double>(), j["x13"].get<double>(), j["x23"].get<double>(),
            j["triad_phase"].get<double>()};
}

json overlaps_to_json(const std::array<double, 4>& overlaps) {
    return json{{"x12", overlaps[0]},
                {"x13", overlaps[1]},
                {"x23", overlaps[2]},
                {"triad_phase", overlaps[3]}};
}

/// overlaps/v1 or smatrix/v1.
SMatrix load_overlaps_file(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object() || !j.contains("schema")) fail(kExitSchema, path + ": missing schema");
    SMatrix s;
    if (j["schema"] == "overlaps/v1") {
        const auto overlaps = overlaps_from_json(j, path);
        check(pc_smatrix_from_overlaps(overlaps.data(), s.out()), path);
    } else if (j["schema"] == "smatrix/v1") {
        int dim = 0;
        const auto reim = matrix_from_json(j.at("entries"), dim, path);
        check(pc_smatrix_from_entries(dim, reim.data(), s.out()), path);
    } else {
        fail(kExitSchema, path + ": expected overlaps/v1 or smatrix/v1");
    }
    return s;
}

std::array<double, 8> params_from_json(const json& j, const std::string& path) {
    if (!j.contains("overlaps") || !j.contains("mesh")) {
        fail(kExitSchema, path + ": parameters need overlaps and mesh");
    }
    const auto overlaps = overlaps_from_json(j["overlaps"], path);
    const MeshSpec mesh = mesh_from_json(j["mesh"], path);
    if (mesh.n_modes != 3 || mesh.ratios.size() != 3 || mesh.phases.size() != 1) {
        fail(kExitSchema, path + ": the 8-parameter model needs a 3-mode mesh");
    }
    return {overlaps[0],    overlaps[1],    overlaps[2],    overlaps[3],
            mesh.ratios[0], mesh.ratios[1], mesh.ratios[2], mesh.phases[0]};
}

json params_to_json(const std::array<double, 8>& p) {
    return json{{"overlaps", overlaps_to_json({p[0], p[1], p[2], p[3]})},
                {"mesh", mesh_to_json({3, {p[4], p[5], p[6]}, {p[7]}})}};
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            fail(kExitSchema, "cannot parse " + what + " entry \"" + item + "\"");
        }
    }
    if (out.empty()) fail(kExitSchema, what + " must not be empty");
    return out;
}

std::vector<std::int64_t> parse_int64_list(const std::string& text, const std::string& what) {
    std::vector<std::int64_t> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            fail(kExitSchema, "cannot parse " + what + " entry \"" + item + "\"");
        }
    }
    if (out.empty()) fail(kExitSchema, what + " must not be empty");
    return out;
}

json outcomes_to_json(int n_photons, int n_modes) {
    const std::int64_t count = pc_outcome_count(n_photons, n_modes);
    json outcomes = json::array();
    std::vector<int> occ(static_cast<std::size_t>(n_modes));
    for (std::int64_t i = 0; i < count; ++i) {
        check(pc_outcome_at(n_photons, n_modes, i, occ.data()), "outcome enumeration");
        outcomes.push_back(occ);
    }
    return outcomes;
}

json pmf_to_json(const pc_pmf* p) {
    const int n_modes = pc_pmf_n_modes(p);
    const int n_photons = pc_pmf_n_photons(p);
    std::vector<double> probabilities(static_cast<std::size_t>(pc_pmf_size(p)));
    check(pc_pmf_probabilities(p, probabilities.data()), "pmf readback");
    return json{{"schema", "pmf/v1"},
                {"n_modes", n_modes},
                {"n_photons", n_photons},
                {"outcomes", outcomes_to_json(n_photons, n_modes)},
                {"probabilities", probabilities}};
}

struct DesignSpec {
    std::vector<MeshSpec> meshes;
    std::vector<std::vector<int>> inputs;
    std::vector<std::vector<int>> permutations;
    std::vector<double> weights;

    int n_configs() const { return static_cast<int>(meshes.size()); }
};

DesignSpec design_from_json(const json& root, const std::string& path) {
    json j = root;
    if (j.contains("schema") && j["schema"] == "design_result/v1") {
        j = j.at("design");
    }
    if (!j.contains("schema") || j["schema"] != "design/v1") {
        fail(kExitSchema, path + ": expected design/v1 or design_result/v1");
    }
    if (!j.contains("configs") || !j["configs"].is_array() || j["configs"].empty()) {
        fail(kExitSchema, path + ": design needs configs");
    }
    DesignSpec spec;
    for (const auto& config : j["configs"]) {
        if (!config.contains("mesh") || !config.contains("input") ||
            !config.contains("input_permutation")) {
            fail(kExitSchema, path + ": each config needs mesh, input, input_permutation");
        }
        spec.meshes.push_back(mesh_from_json(config["mesh"], path));
        spec.inputs.push_back(config["input"].get<std::vector<int>>());
        spec.permutations.push_back(config["input_permutation"].get<std::vector<int>>());
        spec.weights.push_back(config.value("weight", 1.0));
    }
    return spec;
}

json design_to_json(const DesignSpec& spec) {
    json configs = json::array();
    for (int k = 0; k < spec.n_configs(); ++k) {
        configs.push_back(json{{"mesh", mesh_to_json(spec.meshes[static_cast<std::size_t>(k)])},
                               {"input", spec.inputs[static_cast<std::size_t>(k)]},
                               {"input_permutation", spec.permutations[static_cast<std::size_t>(k)]},
                               {"weight", spec.weights[static_cast<std::size_t>(k)]}});
    }
    return json{{"schema", "design/v1"}, {"configs", configs}};
}

DesignHandle design_handle(const DesignSpec& spec, const std::string& context) {
    DesignHandle d;
    check(pc_design_create(spec.n_configs(), d.out()), context);
    for (int k = 0; k < spec.n_configs(); ++k) {
        const auto& mesh = spec.meshes[static_cast<std::size_t>(k)];
        const auto& input = spec.inputs[static_cast<std::size_t>(k)];
        const auto& perm = spec.permutations[static_cast<std::size_t>(k)];
        check(pc_design_set_config(d.get(), k, mesh.ratios.data(),
                                   static_cast<int>(mesh.ratios.size()), mesh.phases.data(),
                                   static_cast<int>(mesh.phases.size()), input.data(),
                                   static_cast<int>(input.size()), perm.data(),
                                   static_cast<int>(perm.size()),
                                   spec.weights[static_cast<std::size_t>(k)]),
              context);
    }
    return d;
}

DesignSpec design_from_handle(const pc_design* d) {
    DesignSpec spec;
    const int n = pc_design_n_configs(d);
    for (int k = 0; k < n; ++k) {
        MeshSpec mesh;
        mesh.n_modes = 3;
        mesh.ratios.resize(3);
        mesh.phases.resize(1);
        std::vector<int> input(3), perm(3);
        double weight = 0.0;
        check(pc_design_get_config(d, k, mesh.ratios.data(), mesh.phases.data(), input.data(),
                                   perm.data(), &weight),
              "design readback");
        spec.meshes.push_back(std::move(mesh));
        spec.inputs.push_back(std::move(input));
        spec.permutations.push_back(std::move(perm));
        spec.weights.push_back(weight);
    }
    return spec;
}

json fim_to_json(const pc_fim* f) {
    const int dim = pc_fim_dim(f);
    std::vector<double> entries(static_cast<std::size_t>(dim * dim));
    check(pc_fim_entries(f, entries.data()), "fim readback");
    json rows = json::array();
    for (int i = 0; i < dim; ++i) {
        json row = json::array();
        for (int j = 0; j < dim; ++j) row.push_back(entries[static_cast<std::size_t>(i * dim + j)]);
        rows.push_back(std::move(row));
    }
    json labels = json::array();
    if (dim == 3) labels = json::array({"x12", "x13", "x23"});
    return json{{"schema", "fim/v1"}, {"dim", dim}, {"parameter_labels", labels}, {"entries", rows}};
}

// ---- subcommands ----

struct PmfArgs {
    std::string unitary_file;
    std::string mesh_file;
    std::string input_text = "1,1,1";
    std::string overlaps_file;
    bool oracle = false;
    std::string out;
};

int run_pmf(const PmfArgs& args) {
    if (args.unitary_file.empty() == args.mesh_file.empty()) {
        fail(kExitSchema, "exactly one of --unitary or --mesh is required");
    }
    Unitary u = args.unitary_file.empty() ? load_mesh_file(args.mesh_file)
                                          : load_unitary_file(args.unitary_file);
    SMatrix s = load_overlaps_file(args.overlaps_file);
    const auto input = parse_int_list(args.input_text, "--input");
    if (static_cast<int>(input.size()) != pc_unitary_dim(u.get())) {
        fail(kExitSchema, "--input length must equal the mode count");
    }
    PmfHandle p;
    const pc_status status =
        args.oracle
            ? pc_pmf_compute_oracle(u.get(), input.data(), static_cast<int>(input.size()), s.get(),
                                    p.out())
            : pc_pmf_compute(u.get(), input.data(), static_cast<int>(input.size()), s.get(),
                             p.out());
    check(status, "pmf");
    write_file(args.out, pmf_to_json(p.get()).dump(2) + "\n");
    return kExitOk;
}

struct DesignArgs {
    double overlap = -1.0;
    std::string theta_file;
    int restarts = 32;
    std::uint64_t seed = 0;
    std::string out;
    std::string curve_file;
    int curve_points = 9;
    double fig1_ratio = -1.0;
};

std::array<double, 4> resolve_theta(double overlap, const std::string& theta_file) {
    if (!theta_file.empty()) {
        const json j = load_json(theta_file);
        require_schema(j, "overlaps/v1", theta_file);
        return overlaps_from_json(j, theta_file);
    }
    if (overlap < 0.0) fail(kExitSchema, "either --overlap or --theta is required");
    return {overlap, overlap, overlap, 0.0};
}

int run_design(const DesignArgs& args) {
    if (args.fig1_ratio >= 0.0) {
        DesignHandle d;
        check(pc_design_permuted_fig1(args.fig1_ratio, d.out()), "design construction");
        write_file(args.out, design_to_json(design_from_handle(d.get())).dump(2) + "\n");
        return kExitOk;
    }

    int exit_code = kExitOk;
    json output;

    if (args.overlap >= 0.0 || !args.theta_file.empty()) {
        const auto theta = resolve_theta(args.overlap, args.theta_file);
        DesignResultHandle result;
        const pc_status status =
            pc_design_optimize(theta.data(), args.restarts, args.seed, result.out());
        if (status == PC_ERR_CONVERGENCE) {
            exit_code = kExitConvergence;  // result is still written below
        } else if (status != PC_OK) {
            fail_status(status, "design optimization");
        }

        DesignHandle best;
        check(pc_design_result_design(result.get(), best.out()), "design readback");
        const DesignSpec spec = design_from_handle(best.get());
        FimHandle f;
        check(pc_design_result_fim(result.get(), f.out()), "design fim");

        const std::int64_t trace_size = pc_design_result_trace_size(result.get());
        std::vector<std::int64_t> evaluations(static_cast<std::size_t>(trace_size));
        std::vector<double> scores(static_cast<std::size_t>(trace_size));
        check(pc_design_result_trace(result.get(), evaluations.data(), scores.data()),
              "trace readback");
        json trace = json::array();
        for (std::int64_t i = 0; i < trace_size; ++i) {
            trace.push_back(json::array({evaluations[static_cast<std::size_t>(i)],
                                         scores[static_cast<std::size_t>(i)]}));
        }

        // Protocol-convention summary of the first configuration.
        const auto& mesh0 = spec.meshes.front();
        json summary{{"first_ratio", mesh0.ratios[0]},
                     {"second_splitting_ratio", 1.0 - mesh0.ratios[1]},
                     {"third_ratio", mesh0.ratios[2]}};

        output = json{{"schema", "design_result/v1"},
                      {"design", design_to_json(spec)},
                      {"score", pc_design_result_score(result.get())},
                      {"fim", fim_to_json(f.get())},
                      {"optimizer_trace", trace},
                      {"converged", pc_design_result_converged(result.get()) == 1},
                      {"summary", summary}};
    }

    if (!args.curve_file.empty()) {
        std::string csv = "overlap,optimal_second_ratio\n";
        for (int i = 0; i < args.curve_points; ++i) {
            const double x = 0.1 + 0.8 * (args.curve_points == 1
                                              ? 0.0
                                              : static_cast<double>(i) / (args.curve_points - 1));
            double ratio = 0.0;
            check(pc_optimal_second_ratio(x, 0, &ratio), "curve");
            csv += format_double(x) + "," + format_double(ratio) + "\n";
        }
        write_file(args.curve_file, csv);
    } else if (output.is_null()) {
        fail(kExitSchema, "nothing to do: pass --overlap/--theta, --curve, or --fig1-ratio");
    }

    if (!output.is_null()) {
        write_file(args.out, output.dump(2) + "\n");
    }
    return exit_code;
}

struct SimulateArgs {
    std::string design_file;
    std::string truth_file;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::string out_prefix;
};

int run_simulate(const SimulateArgs& args) {
    const DesignSpec spec = design_from_json(load_json(args.design_file), args.design_file);
    const json truth_json = load_json(args.truth_file);
    require_schema(truth_json, "params/v1", args.truth_file);
    const auto truth = params_from_json(truth_json, args.truth_file);
    DesignHandle d = design_handle(spec, args.design_file);

    for (int k = 0; k < spec.n_configs(); ++k) {
        PmfHandle model;
        check(pc_design_config_pmf(d.get(), k, truth.data(), model.out()), "model pmf");
        CountsHandle counts;
        // Independent per-configuration streams derived from the master seed.
        const std::uint64_t config_seed = args.seed + static_cast<std::uint64_t>(k);
        check(pc_pmf_sample(model.get(), args.samples, config_seed, counts.out()), "sampling");

        const std::int64_t size = pc_counts_size(counts.get());
        std::vector<std::int64_t> values(static_cast<std::size_t>(size));
        check(pc_counts_values(counts.get(), values.data()), "counts readback");
        const int n_modes = pc_pmf_n_modes(model.get());
        const int n_photons = pc_pmf_n_photons(model.get());
        const json out = json{{"schema", "counts/v1"},
                              {"n_modes", n_modes},
                              {"n_photons", n_photons},
                              {"input", spec.inputs[static_cast<std::size_t>(k)]},
                              {"input_permutation", spec.permutations[static_cast<std::size_t>(k)]},
                              {"outcomes", outcomes_to_json(n_photons, n_modes)},
                              {"counts", values},
                              {"total", pc_counts_total(counts.get())},
                              {"seed", config_seed}};
        write_file(args.out_prefix + "_config" + std::to_string(k) + ".json", out.dump(2) + "\n");
    }
    return kExitOk;
}

struct FitArgs {
    std::vector<std::string> counts_files;
    std::string init_file;
    int restarts = 8;
    std::uint64_t seed = 0;
    std::string out;
};

int run_fit(const FitArgs& args) {
    const json init_json = load_json(args.init_file);
    require_schema(init_json, "params/v1", args.init_file);
    const auto init = params_from_json(init_json, args.init_file);

    DesignSpec spec;
    std::vector<CountsHandle> counts;
    std::vector<const pc_counts*> counts_ptrs;
    for (const auto& path : args.counts_files) {
        const json j = load_json(path);
        require_schema(j, "counts/v1", path);
        for (const char* key : {"input", "input_permutation", "counts", "outcomes"}) {
            if (!j.contains(key)) fail(kExitSchema, path + ": counts need " + std::string(key));
        }
        const auto input = j["input"].get<std::vector<int>>();
        const auto values = j["counts"].get<std::vector<std::int64_t>>();
        int n_photons = 0;
        for (int c : input) n_photons += c;
        const int n_modes = static_cast<int>(input.size());
        // Outcomes must be the canonical enumeration.
        if (j["outcomes"] != outcomes_to_json(n_photons, n_modes)) {
            fail(kExitSchema, path + ": outcomes are not in canonical order");
        }
        CountsHandle c;
        check(pc_counts_create(n_photons, n_modes, values.data(),
                               static_cast<int64_t>(values.size()), c.out()),
              path);
        counts.push_back(std::move(c));
        counts_ptrs.push_back(counts.back().get());

        spec.meshes.push_back({3, {init[4], init[5], init[6]}, {init[7]}});
        spec.inputs.push_back(input);
        spec.permutations.push_back(j["input_permutation"].get<std::vector<int>>());
        spec.weights.push_back(1.0);
    }
    DesignHandle d = design_handle(spec, "fit configuration");

    int exit_code = kExitOk;
    FitResultHandle fit;
    const pc_status status =
        pc_fit(d.get(), counts_ptrs.data(), static_cast<int>(counts_ptrs.size()), init.data(),
               args.restarts, args.seed, fit.out());
    if (status == PC_ERR_CONVERGENCE) {
        exit_code = kExitConvergence;
    } else if (status != PC_OK) {
        fail_status(status, "fit");
    }

    std::array<double, 8> estimate{};
    check(pc_fit_result_estimate(fit.get(), estimate.data()), "estimate readback");
    std::vector<double> tvds(counts.size());
    check(pc_fit_result_tvd(fit.get(), tvds.data(), static_cast<int>(tvds.size())),
          "tvd readback");
    FimHandle observed;
    check(pc_fit_result_observed_fim(fit.get(), observed.out()), "observed fim");

    json estimate_json = params_to_json(estimate);
    estimate_json["schema"] = "params/v1";
    const json out = json{{"schema", "fit_result/v1"},
                          {"estimate", estimate_json},
                          {"log_likelihood", pc_fit_result_log_likelihood(fit.get())},
                          {"converged", pc_fit_result_converged(fit.get()) == 1},
                          {"tvd_per_config", tvds},
                          {"observed_fim", fim_to_json(observed.get())},
                          {"identifiability_condition",
                           pc_fit_result_identifiability(fit.get())}};
    write_file(args.out, out.dump(2) + "\n");
    return exit_code;
}

struct CompareArgs {
    std::string theta_file;
    std::vector<std::string> design_files;
    std::string checkpoints_text;
    std::uint64_t seed = 0;
    std::string mode = "truth";
    int refit_restarts = 2;
    std::string out;
};

int run_compare(const CompareArgs& args) {
    const json theta_json = load_json(args.theta_file);
    require_schema(theta_json, "overlaps/v1", args.theta_file);
    const auto theta = overlaps_from_json(theta_json, args.theta_file);

    std::vector<DesignSpec> specs;
    for (const auto& path : args.design_files) {
        specs.push_back(design_from_json(load_json(path), path));
    }
    if (specs.empty()) fail(kExitSchema, "at least one design is required");

    if (args.checkpoints_text.empty()) {
        // Noiseless per-design comparison table plus the pairwise baseline.
        std::string csv = "design,n_photons,d_optimality,det_inv,trace_inv,max_eig_inv\n";
        for (std::size_t i = 0; i < specs.size(); ++i) {
            DesignHandle d = design_handle(specs[i], args.design_files[i]);
            FimHandle f;
            check(pc_design_fim(d.get(), theta.data(), 1, f.out()), args.design_files[i]);
            double det = 0.0, det_inv = 0.0, trace_inv = 0.0, max_inv = 0.0;
            check(pc_fim_d_optimality(f.get(), &det), "d-optimality");
            check(pc_fim_inverse_metrics(f.get(), &det_inv, &trace_inv, &max_inv), "metrics");
            csv += std::filesystem::path(args.design_files[i]).filename().string() + ",3," +
                   format_double(det) + "," + format_double(det_inv) + "," +
                   format_double(trace_inv) + "," + format_double(max_inv) + "\n";
        }
        FimHandle baseline;
        check(pc_fim_hom_baseline(theta.data(), baseline.out()), "baseline");
        double det = 0.0, det_inv = 0.0, trace_inv = 0.0, max_inv = 0.0;
        check(pc_fim_d_optimality(baseline.get(), &det), "d-optimality");
        check(pc_fim_inverse_metrics(baseline.get(), &det_inv, &trace_inv, &max_inv), "metrics");
        csv += "hom_baseline,2," + format_double(det) + "," + format_double(det_inv) + "," +
               format_double(trace_inv) + "," + format_double(max_inv) + "\n";
        write_file(args.out, csv);
        return kExitOk;
    }

    // Convergence study along a synthetic stream of the first design.
    const auto checkpoints = parse_int64_list(args.checkpoints_text, "--checkpoints");
    const DesignSpec& spec = specs.front();
    for (int k = 1; k < spec.n_configs(); ++k) {
        if (spec.meshes[static_cast<std::size_t>(k)].ratios != spec.meshes[0].ratios ||
            spec.meshes[static_cast<std::size_t>(k)].phases != spec.meshes[0].phases) {
            fail(kExitSchema, "convergence study needs configs sharing one mesh");
        }
    }
    const std::array<double, 8> truth{theta[0],
                                      theta[1],
                                      theta[2],
                                      theta[3],
                                      spec.meshes[0].ratios[0],
                                      spec.meshes[0].ratios[1],
                                      spec.meshes[0].ratios[2],
                                      spec.meshes[0].phases[0]};
    DesignHandle d = design_handle(spec, args.design_files.front());

    const std::int64_t length = checkpoints.back();
    std::vector<std::vector<int>> streams(static_cast<std::size_t>(spec.n_configs()),
                                          std::vector<int>(static_cast<std::size_t>(length)));
    std::vector<const int*> stream_ptrs;
    for (int k = 0; k < spec.n_configs(); ++k) {
        PmfHandle model;
        check(pc_design_config_pmf(d.get(), k, truth.data(), model.out()), "model pmf");
        check(pc_pmf_sample_stream(model.get(), length, args.seed + static_cast<std::uint64_t>(k),
                                   streams[static_cast<std::size_t>(k)].data()),
              "stream sampling");
        stream_ptrs.push_back(streams[static_cast<std::size_t>(k)].data());
    }

    std::vector<double> rows(static_cast<std::size_t>(10 * checkpoints.size()));
    check(pc_convergence_study(d.get(), truth.data(), stream_ptrs.data(), length,
                               checkpoints.data(), static_cast<int>(checkpoints.size()),
                               args.mode == "refit" ? 1 : 0, args.refit_restarts, args.seed,
                               rows.data()),
          "convergence study");

    std::string csv =
        "n,observed_det_inv,hom_det_inv,ideal_det_inv,observed_trace_inv,hom_trace_inv,"
        "ideal_trace_inv,observed_maxeig_inv,hom_maxeig_inv,ideal_maxeig_inv\n";
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const double* row = rows.data() + 10 * i;
        csv += format_double(row[0]) + "," + format_double(row[1]) + "," + format_double(row[4]) +
               "," + format_double(row[7]) + "," + format_double(row[2]) + "," +
               format_double(row[5]) + "," + format_double(row[8]) + "," + format_double(row[3]) +
               "," + format_double(row[6]) + "," + format_double(row[9]) + "\n";
    }
    write_file(args.out, csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("PHOTONCHAR_THREADS")) {
        pc_set_max_threads(std::atoi(threads));
    }

    CLI::App app{"Multiphoton distinguishability characterization toolkit"};
    app.require_subcommand(1);

    PmfArgs pmf_args;
    auto* pmf_cmd = app.add_subcommand("pmf", "Output distribution of an interference experiment");
    pmf_cmd->add_option("--unitary", pmf_args.unitary_file, "unitary/v1 JSON file");
    pmf_cmd->add_option("--mesh", pmf_args.mesh_file, "mesh/v1 JSON file");
    pmf_cmd->add_option("--input", pmf_args.input_text, "occupation list, e.g. 1,1,1");
    pmf_cmd->add_option("--overlaps", pmf_args.overlaps_file, "overlaps/v1 or smatrix/v1 JSON")
        ->required();
    pmf_cmd->add_flag("--oracle", pmf_args.oracle, "use the Fock-space oracle");
    pmf_cmd->add_option("--out", pmf_args.out, "output path (stdout when omitted)");

    DesignArgs design_args;
    auto* design_cmd = app.add_subcommand("design", "D-optimal experiment design search");
    design_cmd->add_option("--overlap", design_args.overlap, "equal overlap magnitude");
    design_cmd->add_option("--theta", design_args.theta_file, "overlaps/v1 JSON");
    design_cmd->add_option("--restarts", design_args.restarts, "multi-start count");
    design_cmd->add_option("--seed", design_args.seed, "optimizer seed");
    design_cmd->add_option("--out", design_args.out, "design_result/v1 output path");
    design_cmd->add_option("--curve", design_args.curve_file, "ratio-vs-overlap CSV path");
    design_cmd->add_option("--curve-points", design_args.curve_points,
                           "grid size for --curve (overlaps 0.1..0.9)");
    design_cmd->add_option("--fig1-ratio", design_args.fig1_ratio,
                           "emit the permuted protocol design at this splitting ratio");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand("simulate", "Draw synthetic counts from a design");
    simulate_cmd->add_option("--design", simulate_args.design_file, "design/v1 JSON")->required();
    simulate_cmd->add_option("--truth", simulate_args.truth_file, "params/v1 JSON")->required();
    simulate_cmd->add_option("--samples", simulate_args.samples, "samples per configuration")
        ->required();
    simulate_cmd->add_option("--seed", simulate_args.seed, "sampling seed");
    simulate_cmd->add_option("--out-prefix", simulate_args.out_prefix, "output path prefix")
        ->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of count data");
    fit_cmd->add_option("--counts", fit_args.counts_files, "counts/v1 JSON files")->required();
    fit_cmd->add_option("--init", fit_args.init_file, "params/v1 initial guess")->required();
    fit_cmd->add_option("--restarts", fit_args.restarts, "multi-start count");
    fit_cmd->add_option("--seed", fit_args.seed, "fit seed");
    fit_cmd->add_option("--out", fit_args.out, "fit_result/v1 output path");

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "Protocol comparison tables");
    compare_cmd->add_option("--theta", compare_args.theta_file, "overlaps/v1 JSON")->required();
    compare_cmd->add_option("--designs", compare_args.design_files, "design/v1 JSON files")
        ->required();
    compare_cmd->add_option("--checkpoints", compare_args.checkpoints_text,
                            "sample counts for the convergence study, e.g. 1000,10000");
    compare_cmd->add_option("--seed", compare_args.seed, "stream seed");
    compare_cmd->add_option("--mode", compare_args.mode, "truth or refit")
        ->check(CLI::IsMember({"truth", "refit"}));
    compare_cmd->add_option("--refit-restarts", compare_args.refit_restarts,
                            "restarts per refit checkpoint");
    compare_cmd->add_option("--out", compare_args.out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitSchema;
    }

    try {
        if (pmf_cmd->parsed()) return run_pmf(pmf_args);
        if (design_cmd->parsed()) return run_design(design_args);
        if (simulate_cmd->parsed()) return run_simulate(simulate_args);
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (compare_cmd->parsed()) return run_compare(compare_args);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    }
    return kExitSchema;
}

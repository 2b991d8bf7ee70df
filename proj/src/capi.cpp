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

#include "photonchar.h"

#include <cstring>
#include <string>
#include <vector>

#include "photonchar/core.hpp"
#include "photonchar/engine.hpp"
#include "photonchar/estimator.hpp"
#include "photonchar/fisher.hpp"
#include "photonchar/interferometer.hpp"
#include "photonchar/optim.hpp"

using namespace phc;

namespace {

thread_local std::string g_last_error;

pc_status fail(pc_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
pc_status guarded(Fn&& fn) {
    try {
        fn();
        return PC_OK;
    } catch (const InvalidArgument& e) {
        return fail(PC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const PhysicsError& e) {
        return fail(PC_ERR_PHYSICS, e.what());
    } catch (const LimitError& e) {
        return fail(PC_ERR_LIMIT, e.what());
    } catch (const std::exception& e) {
        return fail(PC_ERR_INTERNAL, e.what());
    }
}

CMatrix matrix_from_interleaved(int dim, const double* reim) {
    if (dim < 1 || reim == nullptr) throw InvalidArgument("bad matrix buffer");
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const int k = 2 * (i * dim + j);
            m(i, j) = Complex(reim[k], reim[k + 1]);
        }
    }
    return m;
}

void matrix_to_interleaved(const CMatrix& m, double* reim) {
    const int dim = static_cast<int>(m.rows());
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const int k = 2 * (i * static_cast<int>(m.cols()) + j);
            reim[k] = m(i, j).real();
            reim[k + 1] = m(i, j).imag();
        }
    }
}

OverlapParameters overlaps_from4(const double overlaps4[4]) {
    if (overlaps4 == nullptr) throw InvalidArgument("null overlap parameters");
    return OverlapParameters(overlaps4[0], overlaps4[1], overlaps4[2], overlaps4[3]);
}

FullParameters params_from8(const double params8[8]) {
    if (params8 == nullptr) throw InvalidArgument("null model parameters");
    std::array<double, 8> a;
    for (int i = 0; i < 8; ++i) a[static_cast<std::size_t>(i)] = params8[i];
    return FullParameters::from_array(a);
}

FimOptions fim_options_for(int method) {
    if (method != 0 && method != 1) {
        throw InvalidArgument("method must be 0 (hessian) or 1 (score)");
    }
    FimOptions options;
    options.method = method == 0 ? FimMethod::hessian : FimMethod::score;
    return options;
}

}  // namespace

struct pc_unitary {
    ScatteringMatrix value;
};
struct pc_smatrix {
    DistinguishabilityMatrix value;
};
struct pc_pmf {
    Pmf value;
};
struct pc_counts {
    CountTable value;
};
struct pc_fim {
    FisherMatrix value;
};
struct pc_design_result {
    DesignResult value;
};
struct pc_fit_result {
    FitResult value;
};

struct pc_design {
    struct Entry {
        MeshParameters mesh;
        std::vector<int> input;
        std::vector<int> permutation;
        double weight = 1.0;
        bool set = false;
    };
    std::vector<Entry> entries;

    ExperimentDesign materialize() const {
        std::vector<ExperimentConfig> configs;
        std::vector<double> weights;
        for (const auto& entry : entries) {
            if (!entry.set) throw InvalidArgument("design has unset configurations");
            configs.emplace_back(entry.mesh, OccupationList(entry.input), entry.permutation);
            weights.push_back(entry.weight);
        }
        return ExperimentDesign(std::move(configs), std::move(weights));
    }

    ConfigData config_data(int index) const {
        const auto& entry = entries.at(static_cast<std::size_t>(index));
        if (!entry.set) throw InvalidArgument("configuration not set");
        const OccupationList input(entry.input);
        const auto outcomes = enumerate_outcomes(input.n_photons(), input.n_modes());
        return ConfigData(entry.permutation, input,
                          CountTable(outcomes, std::vector<std::int64_t>(outcomes.size(), 0)));
    }
};

namespace {

std::vector<ConfigData> gather_data(const pc_design* d, const pc_counts* const* counts,
                                    int n_configs) {
    if (d == nullptr || counts == nullptr) throw InvalidArgument("null argument");
    if (n_configs != static_cast<int>(d->entries.size())) {
        throw InvalidArgument("one count table per design configuration is required");
    }
    std::vector<ConfigData> data;
    for (int k = 0; k < n_configs; ++k) {
        if (counts[k] == nullptr) throw InvalidArgument("null count table");
        const auto& entry = d->entries[static_cast<std::size_t>(k)];
        if (!entry.set) throw InvalidArgument("design has unset configurations");
        data.emplace_back(entry.permutation, OccupationList(entry.input), counts[k]->value);
    }
    return data;
}

pc_design* design_handle_from(const ExperimentDesign& design) {
    auto* d = new pc_design();
    for (std::size_t k = 0; k < design.configs.size(); ++k) {
        pc_design::Entry entry;
        entry.mesh = design.configs[k].mesh;
        entry.input = design.configs[k].input.values();
        entry.permutation = design.configs[k].input_permutation;
        entry.weight = design.weights[k];
        entry.set = true;
        d->entries.push_back(std::move(entry));
    }
    return d;
}

}  // namespace

extern "C" {

const char* pc_status_name(pc_status status) {
    switch (status) {
        case PC_OK:
            return "ok";
        case PC_ERR_INVALID_ARGUMENT:
            return "invalid_argument";
        case PC_ERR_PHYSICS:
            return "physics";
        case PC_ERR_LIMIT:
            return "limit";
        case PC_ERR_CONVERGENCE:
            return "convergence";
        case PC_ERR_INTERNAL:
            return "internal";
    }
    return "unknown";
}

const char* pc_last_error(void) { return g_last_error.c_str(); }

void pc_set_max_threads(int n) { set_max_threads(n); }

int64_t pc_outcome_count(int n_photons, int n_modes) {
    if (n_photons < 0 || n_modes < 1) return -1;
    return outcome_count(n_photons, n_modes);
}

pc_status pc_outcome_at(int n_photons, int n_modes, int64_t index, int* occupation_out) {
    return guarded([&] {
        if (occupation_out == nullptr) throw InvalidArgument("null output buffer");
        const auto outcomes = enumerate_outcomes(n_photons, n_modes);
        if (index < 0 || index >= static_cast<int64_t>(outcomes.size())) {
            throw InvalidArgument("outcome index out of range");
        }
        const auto& occ = outcomes[static_cast<std::size_t>(index)].values();
        std::memcpy(occupation_out, occ.data(), occ.size() * sizeof(int));
    });
}

pc_status pc_unitary_from_entries(int dim, const double* entries_reim, pc_unitary** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_unitary{ScatteringMatrix(matrix_from_interleaved(dim, entries_reim))};
    });
}

pc_status pc_unitary_mesh(int n_modes, const double* ratios, int n_ratios, const double* phases,
                          int n_phases, pc_unitary** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        if ((n_ratios > 0 && ratios == nullptr) || (n_phases > 0 && phases == nullptr)) {
            throw InvalidArgument("null parameter buffer");
        }
        MeshParameters params(std::vector<double>(ratios, ratios + n_ratios),
                              std::vector<double>(phases, phases + n_phases));
        *out = new pc_unitary{build_mesh(params, n_modes)};
    });
}

pc_status pc_unitary_fig1(double second_splitting_ratio, pc_unitary** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_unitary{protocol_fig1(second_splitting_ratio)};
    });
}

pc_status pc_unitary_cascade(int n_photons, const double* splitting_ratios, int n_ratios,
                             pc_unitary** out) {
    return guarded([&] {
        if (out == nullptr || splitting_ratios == nullptr) throw InvalidArgument("null argument");
        *out = new pc_unitary{cascade_protocol(
            n_photons, std::vector<double>(splitting_ratios, splitting_ratios + n_ratios))};
    });
}

pc_status pc_unitary_layered(int n_photons, const int* pair_modes, const double* ratios,
                             int n_couplers, pc_unitary** out) {
    return guarded([&] {
        if (out == nullptr || (n_couplers > 0 && (pair_modes == nullptr || ratios == nullptr))) {
            throw InvalidArgument("null argument");
        }
        std::vector<LayeredCoupler> couplers;
        for (int k = 0; k < n_couplers; ++k) {
            couplers.push_back({pair_modes[2 * k], pair_modes[2 * k + 1], ratios[k]});
        }
        *out = new pc_unitary{layered_protocol(n_photons, couplers)};
    });
}

pc_status pc_unitary_permute_rows(const pc_unitary* u, const int* perm, int n, pc_unitary** out) {
    return guarded([&] {
        if (u == nullptr || perm == nullptr || out == nullptr) {
            throw InvalidArgument("null argument");
        }
        *out = new pc_unitary{permute_inputs(u->value, std::vector<int>(perm, perm + n))};
    });
}

int pc_unitary_dim(const pc_unitary* u) { return u == nullptr ? -1 : u->value.dim(); }

pc_status pc_unitary_entries(const pc_unitary* u, double* entries_reim_out) {
    return guarded([&] {
        if (u == nullptr || entries_reim_out == nullptr) throw InvalidArgument("null argument");
        matrix_to_interleaved(u->value.entries(), entries_reim_out);
    });
}

pc_status pc_unitary_fidelity(const pc_unitary* target, const pc_unitary* set, double* out) {
    return guarded([&] {
        if (target == nullptr || set == nullptr || out == nullptr) {
            throw InvalidArgument("null argument");
        }
        *out = amplitude_fidelity(target->value, set->value);
    });
}

void pc_unitary_free(pc_unitary* u) { delete u; }

pc_status pc_smatrix_from_entries(int dim, const double* entries_reim, pc_smatrix** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_smatrix{DistinguishabilityMatrix(matrix_from_interleaved(dim, entries_reim))};
    });
}

pc_status pc_smatrix_from_overlaps(const double overlaps4[4], pc_smatrix** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_smatrix{overlaps_from4(overlaps4).to_matrix()};
    });
}

int pc_smatrix_dim(const pc_smatrix* s) { return s == nullptr ? -1 : s->value.dim(); }

pc_status pc_smatrix_entries(const pc_smatrix* s, double* entries_reim_out) {
    return guarded([&] {
        if (s == nullptr || entries_reim_out == nullptr) throw InvalidArgument("null argument");
        matrix_to_interleaved(s->value.entries(), entries_reim_out);
    });
}

void pc_smatrix_free(pc_smatrix* s) { delete s; }

pc_status pc_pmf_compute(const pc_unitary* u, const int* input_occupation, int n_modes,
                         const pc_smatrix* s, pc_pmf** out) {
    return guarded([&] {
        if (u == nullptr || input_occupation == nullptr || s == nullptr || out == nullptr) {
            throw InvalidArgument("null argument");
        }
        const OccupationList input(std::vector<int>(input_occupation, input_occupation + n_modes));
        *out = new pc_pmf{pmf(u->value, input, s->value)};
    });
}

pc_status pc_pmf_compute_oracle(const pc_unitary* u, const int* input_occupation, int n_modes,
                                const pc_smatrix* s, pc_pmf** out) {
    return guarded([&] {
        if (u == nullptr || input_occupation == nullptr || s == nullptr || out == nullptr) {
            throw InvalidArgument("null argument");
        }
        const OccupationList input(std::vector<int>(input_occupation, input_occupation + n_modes));
        *out = new pc_pmf{fock_oracle_pmf(u->value, input, s->value)};
    });
}

int64_t pc_pmf_size(const pc_pmf* p) { return p == nullptr ? -1 : p->value.n_outcomes(); }
int pc_pmf_n_modes(const pc_pmf* p) { return p == nullptr ? -1 : p->value.n_modes(); }
int pc_pmf_n_photons(const pc_pmf* p) { return p == nullptr ? -1 : p->value.n_photons(); }

pc_status pc_pmf_probabilities(const pc_pmf* p, double* out) {
    return guarded([&] {
        if (p == nullptr || out == nullptr) throw InvalidArgument("null argument");
        std::memcpy(out, p->value.probabilities.data(),
                    p->value.probabilities.size() * sizeof(double));
    });
}

pc_status pc_pmf_tvd(const pc_pmf* p, const pc_pmf* q, double* out) {
    return guarded([&] {
        if (p == nullptr || q == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = total_variation_distance(p->value, q->value);
    });
}

pc_status pc_pmf_coarse_grain(const pc_pmf* p, int mode_a, int mode_b, double out2[2]) {
    return guarded([&] {
        if (p == nullptr || out2 == nullptr) throw InvalidArgument("null argument");
        const auto grained = coarse_grain_bunching(p->value, mode_a, mode_b);
        out2[0] = grained.anti_bunched;
        out2[1] = grained.bunched;
    });
}

void pc_pmf_free(pc_pmf* p) { delete p; }

pc_status pc_pmf_sample(const pc_pmf* p, int64_t n_samples, uint64_t seed, pc_counts** out) {
    return guarded([&] {
        if (p == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = new pc_counts{sample(p->value, n_samples, seed)};
    });
}

pc_status pc_pmf_sample_stream(const pc_pmf* p, int64_t n_samples, uint64_t seed,
                               int* stream_out) {
    return guarded([&] {
        if (p == nullptr || stream_out == nullptr) throw InvalidArgument("null argument");
        const auto stream = sample_stream(p->value, n_samples, seed);
        std::memcpy(stream_out, stream.data(), stream.size() * sizeof(int));
    });
}

pc_status pc_counts_create(int n_photons, int n_modes, const int64_t* counts, int64_t n_outcomes,
                           pc_counts** out) {
    return guarded([&] {
        if (counts == nullptr || out == nullptr) throw InvalidArgument("null argument");
        const auto outcomes = enumerate_outcomes(n_photons, n_modes);
        if (static_cast<int64_t>(outcomes.size()) != n_outcomes) {
            throw InvalidArgument("count vector does not cover the canonical outcome set");
        }
        *out = new pc_counts{
            CountTable(outcomes, std::vector<std::int64_t>(counts, counts + n_outcomes))};
    });
}

int64_t pc_counts_total(const pc_counts* c) { return c == nullptr ? -1 : c->value.total; }
int64_t pc_counts_size(const pc_counts* c) { return c == nullptr ? -1 : c->value.n_outcomes(); }

pc_status pc_counts_values(const pc_counts* c, int64_t* out) {
    return guarded([&] {
        if (c == nullptr || out == nullptr) throw InvalidArgument("null argument");
        std::memcpy(out, c->value.counts.data(), c->value.counts.size() * sizeof(int64_t));
    });
}

pc_status pc_counts_tvd(const pc_counts* c, const pc_pmf* model, double* out) {
    return guarded([&] {
        if (c == nullptr || model == nullptr || out == nullptr) {
            throw InvalidArgument("null argument");
        }
        *out = empirical_tvd(c->value, model->value);
    });
}

void pc_counts_free(pc_counts* c) { delete c; }

pc_status pc_design_create(int n_configs, pc_design** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        if (n_configs < 1) throw InvalidArgument("a design needs at least one configuration");
        auto* d = new pc_design();
        d->entries.resize(static_cast<std::size_t>(n_configs));
        *out = d;
    });
}

pc_status pc_design_set_config(pc_design* d, int index, const double* ratios, int n_ratios,
                               const double* phases, int n_phases, const int* input, int n_modes,
                               const int* permutation, int n_photons, double weight) {
    return guarded([&] {
        if (d == nullptr || ratios == nullptr || input == nullptr || permutation == nullptr) {
            throw InvalidArgument("null argument");
        }
        if (index < 0 || index >= static_cast<int>(d->entries.size())) {
            throw InvalidArgument("configuration index out of range");
        }
        pc_design::Entry entry;
        entry.mesh = MeshParameters(std::vector<double>(ratios, ratios + n_ratios),
                                    std::vector<double>(phases, phases + n_phases));
        entry.input.assign(input, input + n_modes);
        entry.permutation.assign(permutation, permutation + n_photons);
        entry.weight = weight;
        entry.set = true;
        // Validates mesh/input/permutation consistency immediately.
        (void)ExperimentConfig(entry.mesh, OccupationList(entry.input), entry.permutation);
        d->entries[static_cast<std::size_t>(index)] = std::move(entry);
    });
}

int pc_design_n_configs(const pc_design* d) {
    return d == nullptr ? -1 : static_cast<int>(d->entries.size());
}

pc_status pc_design_get_config(const pc_design* d, int index, double* ratios_out,
                               double* phases_out, int* input_out, int* permutation_out,
                               double* weight_out) {
    return guarded([&] {
        if (d == nullptr) throw InvalidArgument("null design");
        if (index < 0 || index >= static_cast<int>(d->entries.size())) {
            throw InvalidArgument("configuration index out of range");
        }
        const auto& entry = d->entries[static_cast<std::size_t>(index)];
        if (!entry.set) throw InvalidArgument("configuration not set");
        if (ratios_out != nullptr) {
            std::memcpy(ratios_out, entry.mesh.splitting_ratios.data(),
                        entry.mesh.splitting_ratios.size() * sizeof(double));
        }
        if (phases_out != nullptr) {
            std::memcpy(phases_out, entry.mesh.phases.data(),
                        entry.mesh.phases.size() * sizeof(double));
        }
        if (input_out != nullptr) {
            std::memcpy(input_out, entry.input.data(), entry.input.size() * sizeof(int));
        }
        if (permutation_out != nullptr) {
            std::memcpy(permutation_out, entry.permutation.data(),
                        entry.permutation.size() * sizeof(int));
        }
        if (weight_out != nullptr) *weight_out = entry.weight;
    });
}

pc_status pc_design_config_unitary(const pc_design* d, int index, pc_unitary** out) {
    return guarded([&] {
        if (d == nullptr || out == nullptr) throw InvalidArgument("null argument");
        const auto design = d->materialize();
        if (index < 0 || index >= design.n_configs()) {
            throw InvalidArgument("configuration index out of range");
        }
        *out = new pc_unitary{config_unitary(design.configs[static_cast<std::size_t>(index)])};
    });
}

pc_status pc_design_config_pmf(const pc_design* d, int index, const double params8[8],
                               pc_pmf** out) {
    return guarded([&] {
        if (d == nullptr || out == nullptr) throw InvalidArgument("null argument");
        if (index < 0 || index >= static_cast<int>(d->entries.size())) {
            throw InvalidArgument("configuration index out of range");
        }
        *out = new pc_pmf{model_pmf(d->config_data(index), params_from8(params8))};
    });
}

void pc_design_free(pc_design* d) { delete d; }

pc_status pc_design_permuted_fig1(double second_splitting_ratio, pc_design** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = design_handle_from(ExperimentDesign::permuted_fig1(second_splitting_ratio));
    });
}

pc_status pc_design_fim(const pc_design* d, const double overlaps4[4], int method, pc_fim** out) {
    return guarded([&] {
        if (d == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = new pc_fim{
            summed_fim(d->materialize(), overlaps_from4(overlaps4), fim_options_for(method))};
    });
}

pc_status pc_design_config_fim(const pc_design* d, int index, const double overlaps4[4],
                               int method, pc_fim** out) {
    return guarded([&] {
        if (d == nullptr || out == nullptr) throw InvalidArgument("null argument");
        const auto design = d->materialize();
        if (index < 0 || index >= design.n_configs()) {
            throw InvalidArgument("configuration index out of range");
        }
        *out = new pc_fim{fim(design.configs[static_cast<std::size_t>(index)],
                              overlaps_from4(overlaps4), fim_options_for(method))};
    });
}

pc_status pc_fim_hom_baseline(const double overlaps4[4], pc_fim** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_fim{hom_baseline_fim(overlaps_from4(overlaps4))};
    });
}

int pc_fim_dim(const pc_fim* f) { return f == nullptr ? -1 : f->value.dim(); }

pc_status pc_fim_entries(const pc_fim* f, double* out) {
    return guarded([&] {
        if (f == nullptr || out == nullptr) throw InvalidArgument("null argument");
        const int dim = f->value.dim();
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) out[i * dim + j] = f->value.entries(i, j);
        }
    });
}

pc_status pc_fim_d_optimality(const pc_fim* f, double* out) {
    return guarded([&] {
        if (f == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = d_optimality(f->value);
    });
}

pc_status pc_fim_inverse_metrics(const pc_fim* f, double* det_inv, double* trace_inv,
                                 double* max_eig_inv) {
    return guarded([&] {
        if (f == nullptr) throw InvalidArgument("null argument");
        const auto metrics = inverse_metrics(f->value);
        if (det_inv != nullptr) *det_inv = metrics.det_inv;
        if (trace_inv != nullptr) *trace_inv = metrics.trace_inv;
        if (max_eig_inv != nullptr) *max_eig_inv = metrics.max_eig_inv;
    });
}

void pc_fim_free(pc_fim* f) { delete f; }

pc_status pc_optimal_second_ratio(double equal_overlap, int grid_points, double* ratio_out) {
    return guarded([&] {
        if (ratio_out == nullptr) throw InvalidArgument("null output");
        *ratio_out = grid_points > 0 ? optimal_second_ratio(equal_overlap, grid_points)
                                     : optimal_second_ratio(equal_overlap);
    });
}

pc_status pc_design_optimize(const double overlaps4[4], int restarts, uint64_t seed,
                             pc_design_result** out) {
    pc_status status = guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_design_result{optimize_design(overlaps_from4(overlaps4), 3, restarts, seed)};
    });
    if (status == PC_OK && out != nullptr && *out != nullptr && !(*out)->value.converged) {
        return fail(PC_ERR_CONVERGENCE,
                    "design optimizer exhausted its budget; best design returned");
    }
    return status;
}

pc_status pc_design_result_design(const pc_design_result* r, pc_design** out) {
    return guarded([&] {
        if (r == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = design_handle_from(r->value.design);
    });
}

double pc_design_result_score(const pc_design_result* r) {
    return r == nullptr ? 0.0 : r->value.score;
}

int pc_design_result_converged(const pc_design_result* r) {
    return r == nullptr ? 0 : (r->value.converged ? 1 : 0);
}

pc_status pc_design_result_fim(const pc_design_result* r, pc_fim** out) {
    return guarded([&] {
        if (r == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = new pc_fim{r->value.fim};
    });
}

int64_t pc_design_result_trace_size(const pc_design_result* r) {
    return r == nullptr ? -1 : static_cast<int64_t>(r->value.optimizer_trace.size());
}

pc_status pc_design_result_trace(const pc_design_result* r, int64_t* evaluations_out,
                                 double* scores_out) {
    return guarded([&] {
        if (r == nullptr || evaluations_out == nullptr || scores_out == nullptr) {
            throw InvalidArgument("null argument");
        }
        for (std::size_t i = 0; i < r->value.optimizer_trace.size(); ++i) {
            evaluations_out[i] = r->value.optimizer_trace[i].first;
            scores_out[i] = r->value.optimizer_trace[i].second;
        }
    });
}

void pc_design_result_free(pc_design_result* r) { delete r; }

pc_status pc_log_likelihood(const pc_design* d, const pc_counts* const* counts, int n_configs,
                            const double params8[8], double* out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output");
        *out = log_likelihood(gather_data(d, counts, n_configs), params_from8(params8));
    });
}

pc_status pc_fit(const pc_design* d, const pc_counts* const* counts, int n_configs,
                 const double init8[8], int restarts, uint64_t seed, pc_fit_result** out) {
    pc_status status = guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        FitOptions options;
        options.restarts = restarts;
        options.seed = seed;
        *out = new pc_fit_result{
            mle_fit(gather_data(d, counts, n_configs), params_from8(init8), options)};
    });
    if (status == PC_OK && out != nullptr && *out != nullptr && !(*out)->value.converged) {
        return fail(PC_ERR_CONVERGENCE, "fit exhausted its budget; best estimate returned");
    }
    return status;
}

pc_status pc_fit_result_estimate(const pc_fit_result* r, double params8_out[8]) {
    return guarded([&] {
        if (r == nullptr || params8_out == nullptr) throw InvalidArgument("null argument");
        const auto a = r->value.estimate.to_array();
        for (int i = 0; i < 8; ++i) params8_out[i] = a[static_cast<std::size_t>(i)];
    });
}

double pc_fit_result_log_likelihood(const pc_fit_result* r) {
    return r == nullptr ? 0.0 : r->value.log_likelihood;
}

int pc_fit_result_converged(const pc_fit_result* r) {
    return r == nullptr ? 0 : (r->value.converged ? 1 : 0);
}

double pc_fit_result_identifiability(const pc_fit_result* r) {
    return r == nullptr ? 0.0 : r->value.identifiability_condition;
}

pc_status pc_fit_result_tvd(const pc_fit_result* r, double* tvd_out, int n_configs) {
    return guarded([&] {
        if (r == nullptr || tvd_out == nullptr) throw InvalidArgument("null argument");
        if (n_configs != static_cast<int>(r->value.tvd_per_config.size())) {
            throw InvalidArgument("tvd buffer size mismatch");
        }
        std::memcpy(tvd_out, r->value.tvd_per_config.data(),
                    r->value.tvd_per_config.size() * sizeof(double));
    });
}

pc_status pc_fit_result_observed_fim(const pc_fit_result* r, pc_fim** out) {
    return guarded([&] {
        if (r == nullptr || out == nullptr) throw InvalidArgument("null argument");
        *out = new pc_fim{r->value.observed_fim};
    });
}

void pc_fit_result_free(pc_fit_result* r) { delete r; }

pc_status pc_observed_fim(const pc_design* d, const pc_counts* const* counts, int n_configs,
                          const double params8[8], pc_fim** out) {
    return guarded([&] {
        if (out == nullptr) throw InvalidArgument("null output handle");
        *out = new pc_fim{observed_fim(gather_data(d, counts, n_configs), params_from8(params8))};
    });
}

pc_status pc_convergence_study(const pc_design* d, const double truth8[8],
                               const int* const* streams, int64_t stream_length,
                               const int64_t* checkpoints, int n_checkpoints, int mode,
                               int refit_restarts, uint64_t seed, double* rows_out) {
    return guarded([&] {
        if (d == nullptr || streams == nullptr || checkpoints == nullptr || rows_out == nullptr) {
            throw InvalidArgument("null argument");
        }
        const auto design = d->materialize();
        std::vector<std::vector<int>> stream_vectors;
        for (std::size_t k = 0; k < design.configs.size(); ++k) {
            if (streams[k] == nullptr) throw InvalidArgument("null stream");
            stream_vectors.emplace_back(streams[k], streams[k] + stream_length);
        }
        FitOptions options;
        options.restarts = refit_restarts;
        options.seed = seed;
        const auto points = convergence_study(
            design, params_from8(truth8), stream_vectors,
            std::vector<std::int64_t>(checkpoints, checkpoints + n_checkpoints),
            mode == 0 ? ConvergenceMode::hold_truth : ConvergenceMode::refit, options);
        for (std::size_t i = 0; i < points.size(); ++i) {
            double* row = rows_out + 10 * i;
            row[0] = static_cast<double>(points[i].n_per_config);
            row[1] = points[i].observed.det_inv;
            row[2] = points[i].observed.trace_inv;
            row[3] = points[i].observed.max_eig_inv;
            row[4] = points[i].hom_reference.det_inv;
            row[5] = points[i].hom_reference.trace_inv;
            row[6] = points[i].hom_reference.max_eig_inv;
            row[7] = points[i].ideal_reference.det_inv;
            row[8] = points[i].ideal_reference.trace_inv;
            row[9] = points[i].ideal_reference.max_eig_inv;
        }
    });
}

}  // extern "C"

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

// End-to-end tests of the installed command-line interface: each case
// spawns the real binary and inspects files, stdout, and exit codes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "photonchar_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const std::string command = std::string(PHOTONCHAR_CLI_PATH) + " " + args + " > " +
                                out_file.string() + " 2> " + (work_dir() / "stderr.txt").string();
    const int raw = std::system(command.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string write_json(const std::string& name, const json& j) {
    const fs::path path = work_dir() / name;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json identity_unitary(int dim) {
    json rows = json::array();
    for (int i = 0; i < dim; ++i) {
        json row = json::array();
        for (int j = 0; j < dim; ++j) {
            row.push_back(json::array({i == j ? 1.0 : 0.0, 0.0}));
        }
        rows.push_back(row);
    }
    return json{{"schema", "unitary/v1"}, {"dim", dim}, {"entries", rows}};
}

json overlaps_json(double x12, double x13, double x23, double phase = 0.0) {
    return json{{"schema", "overlaps/v1"},
                {"x12", x12},
                {"x13", x13},
                {"x23", x23},
                {"triad_phase", phase}};
}

json params_json(double x12, double x13, double x23, double phase, double t1, double t2, double t3,
                 double alpha) {
    return json{{"schema", "params/v1"},
                {"overlaps", {{"x12", x12}, {"x13", x13}, {"x23", x23}, {"triad_phase", phase}}},
                {"mesh",
                 {{"n_modes", 3},
                  {"splitting_ratios", {t1, t2, t3}},
                  {"phases", {alpha}}}}};
}

}  // namespace

TEST_CASE("pmf of the identity is a point mass") {
    const auto unitary = write_json("identity.json", identity_unitary(3));
    const auto overlaps = write_json("ov.json", overlaps_json(0.9, 0.8, 0.7));
    const auto result =
        run_cli("pmf --unitary " + unitary + " --input 1,1,1 --overlaps " + overlaps);
    REQUIRE(result.exit_code == 0);
    const json pmf = json::parse(result.output);
    CHECK(pmf["schema"] == "pmf/v1");
    // [1,1,1] sits at canonical index 4 of the 3-photon 3-mode enumeration.
    CHECK(pmf["outcomes"][4] == json::array({1, 1, 1}));
    CHECK(pmf["probabilities"][4].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("suppressed outcome prints as zero through the mesh path") {
    const json mesh = json{{"schema", "mesh/v1"},
                           {"n_modes", 3},
                           {"splitting_ratios", {0.5, 2.0 / 3.0, 0.0}},
                           {"phases", {0.0}}};
    const auto mesh_path = write_json("fig1_mesh.json", mesh);
    const auto overlaps = write_json("ones.json", overlaps_json(1.0, 1.0, 1.0));
    const auto result =
        run_cli("pmf --mesh " + mesh_path + " --input 0,2,1 --overlaps " + overlaps);
    REQUIRE(result.exit_code == 0);
    const json pmf = json::parse(result.output);
    CHECK(pmf["outcomes"][8] == json::array({0, 1, 2}));
    CHECK(pmf["probabilities"][8].get<double>() <= 1e-12);
}

TEST_CASE("oracle path matches the default path") {
    const auto mesh_path = write_json("mesh_o.json", json{{"schema", "mesh/v1"},
                                                          {"n_modes", 3},
                                                          {"splitting_ratios", {0.4, 0.7, 0.2}},
                                                          {"phases", {0.3}}});
    const auto overlaps = write_json("ov_o.json", overlaps_json(0.9, 0.85, 0.8));
    const auto direct =
        run_cli("pmf --mesh " + mesh_path + " --input 1,1,1 --overlaps " + overlaps);
    const auto oracle =
        run_cli("pmf --mesh " + mesh_path + " --input 1,1,1 --overlaps " + overlaps + " --oracle");
    REQUIRE(direct.exit_code == 0);
    REQUIRE(oracle.exit_code == 0);
    const json a = json::parse(direct.output);
    const json b = json::parse(oracle.output);
    CHECK(a["outcomes"] == b["outcomes"]);
    for (std::size_t i = 0; i < a["probabilities"].size(); ++i) {
        CHECK(std::abs(a["probabilities"][i].get<double>() -
                       b["probabilities"][i].get<double>()) <= 1e-10);
    }
}

TEST_CASE("emitted json round-trips byte for byte") {
    const auto unitary = write_json("rtrip_u.json", identity_unitary(3));
    const auto overlaps = write_json("rtrip_o.json", overlaps_json(0.5, 0.5, 0.5));
    const auto result =
        run_cli("pmf --unitary " + unitary + " --input 1,1,1 --overlaps " + overlaps);
    REQUIRE(result.exit_code == 0);
    const json parsed = json::parse(result.output);
    CHECK(parsed.dump(2) + "\n" == result.output);
}

TEST_CASE("schema violations exit with code 2") {
    const auto wrong = write_json("wrong.json", json{{"schema", "overlaps/v2"}});
    const auto unitary = write_json("id2.json", identity_unitary(3));
    auto result = run_cli("pmf --unitary " + unitary + " --input 1,1,1 --overlaps " + wrong);
    CHECK(result.exit_code == 2);

    result = run_cli("pmf --unitary " + unitary + " --input 1,1 --overlaps " +
                     write_json("ov3.json", overlaps_json(0.9, 0.9, 0.9)));
    CHECK(result.exit_code == 2);

    result = run_cli("design");
    CHECK(result.exit_code == 2);
}

TEST_CASE("physics violations exit with code 3") {
    json bad = identity_unitary(3);
    bad["entries"][0][0] = json::array({0.5, 0.0});  // no longer unitary
    const auto unitary = write_json("bad_u.json", bad);
    const auto overlaps = write_json("ov4.json", overlaps_json(0.9, 0.9, 0.9));
    auto result = run_cli("pmf --unitary " + unitary + " --input 1,1,1 --overlaps " + overlaps);
    CHECK(result.exit_code == 3);

    const auto nonpsd = write_json("nonpsd.json", overlaps_json(0.9, 0.9, 0.1));
    const auto good = write_json("id3.json", identity_unitary(3));
    result = run_cli("pmf --unitary " + good + " --input 1,1,1 --overlaps " + nonpsd);
    CHECK(result.exit_code == 3);
}

TEST_CASE("design emits the canonical protocol design") {
    const auto path = (work_dir() / "fig1_design.json").string();
    const auto result = run_cli("design --fig1-ratio 0.333333 --out " + path);
    REQUIRE(result.exit_code == 0);
    const json design = json::parse(read_file(path));
    CHECK(design["schema"] == "design/v1");
    REQUIRE(design["configs"].size() == 3);
    CHECK(design["configs"][0]["mesh"]["splitting_ratios"][0].get<double>() ==
          doctest::Approx(0.5));
    CHECK(design["configs"][1]["input_permutation"] == json::array({1, 2, 0}));
}

TEST_CASE("design optimization output is deterministic and structured") {
    const auto out_a = (work_dir() / "design_a.json").string();
    const auto out_b = (work_dir() / "design_b.json").string();
    const std::string flags = "design --overlap 0.9 --restarts 2 --seed 3 --out ";
    REQUIRE(run_cli(flags + out_a).exit_code == 0);
    REQUIRE(run_cli(flags + out_b).exit_code == 0);
    CHECK(read_file(out_a) == read_file(out_b));

    const json result = json::parse(read_file(out_a));
    CHECK(result["schema"] == "design_result/v1");
    CHECK(result["converged"] == true);
    CHECK(result["score"].get<double>() > 0.0);
    CHECK(result["summary"]["first_ratio"].get<double>() == doctest::Approx(0.5).epsilon(0.03));
    // The canonical representative reports the protocol-branch ratio.
    const double second = result["summary"]["second_splitting_ratio"].get<double>();
    CHECK(second > 0.30);
    CHECK(second < 0.36);
}

TEST_CASE("curve emission stays inside the protocol band") {
    const auto path = (work_dir() / "curve.csv").string();
    REQUIRE(run_cli("design --curve " + path + " --curve-points 3").exit_code == 0);
    const std::string csv = read_file(path);
    std::stringstream stream(csv);
    std::string line;
    std::getline(stream, line);
    CHECK(line == "overlap,optimal_second_ratio");
    int rows = 0;
    while (std::getline(stream, line)) {
        const auto comma = line.find(',');
        const double ratio = std::stod(line.substr(comma + 1));
        CHECK(ratio >= 1.0 / 3.0 - 0.02);
        CHECK(ratio <= 0.5 + 0.02);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("simulate, fit, and compare round trip") {
    const auto design_path = (work_dir() / "pipeline_design.json").string();
    REQUIRE(run_cli("design --fig1-ratio 0.3333333333333333 --out " + design_path).exit_code == 0);
    const auto truth_path =
        write_json("truth.json", params_json(0.9, 0.85, 0.8, 0.0, 0.5, 2.0 / 3.0, 0.0, 0.0));

    const auto prefix = (work_dir() / "counts").string();
    auto result = run_cli("simulate --design " + design_path + " --truth " + truth_path +
                          " --samples 4000 --seed 9 --out-prefix " + prefix);
    REQUIRE(result.exit_code == 0);
    const json counts0 = json::parse(read_file(prefix + "_config0.json"));
    CHECK(counts0["schema"] == "counts/v1");
    CHECK(counts0["total"].get<int>() == 4000);
    CHECK(counts0["input_permutation"] == json::array({0, 1, 2}));

    // simulate with zero samples gives all-zero counts
    result = run_cli("simulate --design " + design_path + " --truth " + truth_path +
                     " --samples 0 --seed 9 --out-prefix " + prefix + "_zero");
    REQUIRE(result.exit_code == 0);
    const json zero = json::parse(read_file(prefix + "_zero_config0.json"));
    CHECK(zero["total"].get<int>() == 0);

    const auto fit_path = (work_dir() / "fit.json").string();
    result = run_cli("fit --counts " + prefix + "_config0.json " + prefix + "_config1.json " +
                     prefix + "_config2.json --init " + truth_path + " --restarts 2 --seed 5 " +
                     "--out " + fit_path);
    REQUIRE(result.exit_code == 0);
    const json fit = json::parse(read_file(fit_path));
    CHECK(fit["schema"] == "fit_result/v1");
    CHECK(fit["converged"] == true);
    CHECK(fit["estimate"]["overlaps"]["x12"].get<double>() == doctest::Approx(0.9).epsilon(0.08));
    CHECK(fit["tvd_per_config"].size() == 3);
    for (const auto& tvd : fit["tvd_per_config"]) {
        CHECK(tvd.get<double>() < 0.05);
    }

    // Tampered counts: outcomes out of canonical order exit with code 2.
    json tampered = counts0;
    std::swap(tampered["outcomes"][0], tampered["outcomes"][1]);
    const auto tampered_path = write_json("tampered.json", tampered);
    result = run_cli("fit --counts " + tampered_path + " --init " + truth_path);
    CHECK(result.exit_code == 2);

    const auto theta_path = write_json("theta.json", overlaps_json(0.9, 0.9, 0.9));
    const auto table_path = (work_dir() / "table.csv").string();
    result = run_cli("compare --theta " + theta_path + " --designs " + design_path + " --out " +
                     table_path);
    REQUIRE(result.exit_code == 0);
    {
        std::stringstream stream(read_file(table_path));
        std::string header;
        std::getline(stream, header);
        CHECK(header == "design,n_photons,d_optimality,det_inv,trace_inv,max_eig_inv");
        std::string row1, row2;
        std::getline(stream, row1);
        std::getline(stream, row2);
        CHECK(row2.substr(0, 12) == "hom_baseline");
    }

    const auto conv_path = (work_dir() / "conv.csv").string();
    result = run_cli("compare --theta " + theta_path + " --designs " + design_path +
                     " --checkpoints 500,2000 --seed 4 --out " + conv_path);
    REQUIRE(result.exit_code == 0);
    {
        std::stringstream stream(read_file(conv_path));
        std::string header;
        std::getline(stream, header);
        CHECK(header ==
              "n,observed_det_inv,hom_det_inv,ideal_det_inv,observed_trace_inv,hom_trace_inv,"
              "ideal_trace_inv,observed_maxeig_inv,hom_maxeig_inv,ideal_maxeig_inv");
        std::string row;
        int rows = 0;
        while (std::getline(stream, row)) {
            if (!row.empty()) ++rows;
        }
        CHECK(rows == 2);
    }
}

#include "conceptkit_cli.hpp"

#include "conceptkit/activation_store.hpp"
#include "conceptkit/conceptor_file.hpp"
#include "conceptkit/file_format.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace conceptkit;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("conceptkit_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string write(const TempDir& dir, const std::string& name, const std::string& text) {
    const auto p = dir / name;
    io::write_file_atomic(p, text);
    return p;
}

} // namespace

TEST_CASE("synth is deterministic and validates rank") {
    TempDir dir;
    REQUIRE(run({"synth", "--seed", "4", "--out", dir / "a.bundle"}).code == cli::kExitOk);
    REQUIRE(run({"synth", "--seed", "4", "--out", dir / "b.bundle"}).code == cli::kExitOk);
    CHECK(io::read_file(dir / "a.bundle") == io::read_file(dir / "b.bundle"));
    const auto bad = run({"synth", "--d", "4", "--rank", "4", "--out", dir / "c.bundle"});
    CHECK(bad.code == cli::kExitData);
    CHECK_FALSE(bad.err.empty());
    CHECK_FALSE(fs::exists(dir / "c.bundle"));
}

TEST_CASE("suite flag writes one bundle per layer") {
    TempDir dir;
    REQUIRE(run({"synth", "--suite", "12", "--d", "8", "--n", "20", "--out", dir / "suite"}).code == cli::kExitOk);
    for (int l = 0; l < 12; ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "suite/layer_%02d.bundle", l);
        CHECK(load_bundle(dir / name).manifest().layer == l);
    }

    const auto with_probes = run({"sweep", dir / "suite", "--probe-dir", dir / "suite/probe", "--k", "3", "--out",
                                  dir / "report.csv"});
    REQUIRE(with_probes.code == cli::kExitOk);
    const std::string csv = io::read_file(dir / "report.csv");
    CHECK(csv.rfind("alpha,layer,quota,evr,trace,auc\n", 0) == 0);
    CHECK(line_count(csv) == 13);
    const auto summary = nlohmann::json::parse(io::read_file(dir / "report.summary.json"));
    CHECK(summary.size() == 1);
    CHECK(summary[0]["r_quota_auc"].is_number());
    CHECK(fs::exists(dir / "report.gp"));

    REQUIRE(run({"sweep", dir / "suite", "--alpha", "2,5,10,20,50", "--out", dir / "multi.csv"}).code == cli::kExitOk);
    const std::string multi = io::read_file(dir / "multi.csv");
    CHECK(line_count(multi) == 1 + 5 * 12);
    // no probe dir: the auc column stays empty
    std::istringstream rows(multi);
    std::string row;
    std::getline(rows, row);
    while (std::getline(rows, row)) CHECK(row.back() == ',');
}

TEST_CASE("fit, compose and usage errors") {
    TempDir dir;
    REQUIRE(run({"synth", "--seed", "1", "--out", dir / "x.bundle"}).code == 0);
    REQUIRE(run({"fit", dir / "x.bundle", "--alpha", "10", "--out", dir / "x.cpt"}).code == 0);
    CHECK(run({"fit", dir / "x.bundle", "--alpha", "0", "--out", dir / "y.cpt"}).code == cli::kExitUsage);
    CHECK(run({"fit", dir / "x.bundle", "--pole", "both", "--out", dir / "y.cpt"}).code == cli::kExitUsage);
    CHECK(run({"fit", dir / "missing.bundle", "--out", dir / "y.cpt"}).code == cli::kExitData);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);

    const std::string x = dir / "x.cpt";
    REQUIRE(run({"compose", "NOT(NOT(" + x + "))", "--out", dir / "nn.cpt"}).code == 0);
    const auto original = to_matrix_conceptor(load_conceptor(x));
    const auto reloaded = to_matrix_conceptor(load_conceptor(dir / "nn.cpt"));
    CHECK((original.matrix() - reloaded.matrix()).norm() <= 1e-12);

    const auto malformed = run({"compose", "AND(" + x + ",", "--out", dir / "bad.cpt"});
    CHECK(malformed.code == cli::kExitData);
    CHECK(malformed.err.find("offending token") != std::string::npos);

    REQUIRE(run({"synth", "--d", "6", "--out", dir / "small.bundle"}).code == 0);
    REQUIRE(run({"fit", dir / "small.bundle", "--out", dir / "small.cpt"}).code == 0);
    const auto mismatch = run({"compose", "AND(" + x + "," + (dir / "small.cpt") + ")", "--out", dir / "m.cpt"});
    CHECK(mismatch.code == cli::kExitData);
}

TEST_CASE("geometry modes") {
    TempDir dir;
    REQUIRE(run({"synth", "--seed", "7", "--out", dir / "x.bundle"}).code == 0);
    REQUIRE(run({"geometry", dir / "x.bundle", "--mode", "capture", "--k", "1", "--out", dir / "cap.csv"}).code == 0);
    std::istringstream cap(io::read_file(dir / "cap.csv"));
    std::string header, row;
    std::getline(cap, header);
    std::getline(cap, row);
    CHECK(header == "layer,k,capture_bipolar,capture_pos,capture_neg");
    const auto c1 = row.find(',', row.find(',') + 1);
    CHECK(std::stod(row.substr(c1 + 1)) >= 0.95);

    REQUIRE(run({"geometry", dir / "x.bundle", "--mode", "overlap", "--k", "2", "--out", dir / "ov.csv"}).code == 0);
    const std::string ov = io::read_file(dir / "ov.csv");
    CHECK(std::stod(ov.substr(ov.rfind(',') + 1)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run({"geometry", dir / "x.bundle", "--mode", "evr", "--k", "9", "--out", dir / "e.csv"}).code ==
          cli::kExitData);
}

TEST_CASE("plan and steer") {
    TempDir dir;
    REQUIRE(run({"synth", "--seed", "2", "--out", dir / "x.bundle"}).code == 0);
    REQUIRE(run({"fit", dir / "x.bundle", "--out", dir / "x.cpt"}).code == 0);
    REQUIRE(run({"plan", "--conceptor", dir / "x.cpt", "--combination", "interpolate", "--beta", "0", "--out",
                 dir / "zero.plan"})
                .code == 0);
    REQUIRE(run({"steer", dir / "zero.plan", dir / "x.bundle", "--out", dir / "same.bundle"}).code == 0);
    CHECK(io::read_file(dir / "same.bundle") == io::read_file(dir / "x.bundle"));

    REQUIRE(run({"plan", "--conceptor", dir / "x.cpt", "--combination", "replace", "--beta", "2", "--scope", "last",
                 "--out", dir / "last.plan"})
                .code == 0);
    REQUIRE(run({"steer", dir / "last.plan", dir / "x.bundle", "--out", dir / "last.bundle"}).code == 0);
    const auto before = load_bundle(dir / "x.bundle"), after = load_bundle(dir / "last.bundle");
    const auto n = before.rows();
    CHECK(before.matrix().topRows(n - 1) == after.matrix().topRows(n - 1));
    CHECK(before.matrix().row(n - 1) != after.matrix().row(n - 1));

    REQUIRE(run({"synth", "--d", "6", "--out", dir / "small.bundle"}).code == 0);
    CHECK(run({"steer", dir / "last.plan", dir / "small.bundle", "--out", dir / "z.bundle"}).code == cli::kExitData);

    CHECK(run({"plan", "--operator", "diffmean", "--bundle", dir / "x.bundle", "--variant", "unipolar_pos_minus_neg",
               "--beta", "1", "--out", dir / "dm.plan"})
              .code == 0);
    CHECK(run({"plan", "--operator", "addition", "--bundle", dir / "x.bundle", "--combination", "replace", "--out",
               dir / "bad.plan"})
              .code == cli::kExitUsage);
}

TEST_CASE("eval modes") {
    TempDir dir;
    const std::string pairs = write(dir, "pairs.jsonl",
                                    "{\"prompt_id\":\"1\",\"base_score\":0,\"steered_score\":1,\"base_len\":10,\"steered_len\":30}\n"
                                    "{\"prompt_id\":\"2\",\"base_score\":0,\"steered_score\":2,\"base_len\":10,\"steered_len\":15}\n"
                                    "{\"prompt_id\":\"3\",\"base_score\":0.1,\"steered_score\":0.5,\"base_len\":10,\"steered_len\":10}\n"
                                    "{\"prompt_id\":\"4\",\"base_score\":0.4,\"steered_score\":0.4,\"base_len\":10,\"steered_len\":10}\n"
                                    "{\"prompt_id\":\"5\",\"base_score\":0.9,\"steered_score\":0.1,\"base_len\":10,\"steered_len\":10}\n");
    const auto win = run({"eval", pairs, "--mode", "winratio"});
    REQUIRE(win.code == 0);
    CHECK(nlohmann::json::parse(win.out)["win_ratio"].get<double>() == doctest::Approx(0.6).epsilon(1e-12));

    const auto deg = run({"eval", pairs, "--mode", "degeneracy", "--out", dir / "deg.json"});
    REQUIRE(deg.code == 0);
    const auto dj = nlohmann::json::parse(io::read_file(dir / "deg.json"));
    CHECK(dj["length_ratio"].get<double>() == doctest::Approx(1.5));
    CHECK_FALSE(dj["degenerate"].get<bool>());

    const std::string mcq = write(dir, "mcq.jsonl",
                                  "{\"question_id\":\"q\",\"letter_logits\":[0,0,0,0],\"category_of_letter\":"
                                  "{\"A\":\"both\",\"B\":\"concept1_only\",\"C\":\"concept2_only\",\"D\":\"neutral\"}}\n");
    REQUIRE(run({"eval", mcq, "--mode", "mcq", "--out", dir / "tally.csv"}).code == 0);
    std::istringstream tally(io::read_file(dir / "tally.csv"));
    std::string line;
    std::getline(tally, line);
    int rows = 0;
    while (std::getline(tally, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        CHECK(std::stod(line.substr(a + 1, b - a - 1)) == doctest::Approx(0.25).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == 4);

    const std::string empty = write(dir, "empty.jsonl", "\n");
    CHECK(run({"eval", empty, "--mode", "winratio"}).code == cli::kExitData);
    CHECK(run({"eval", empty, "--mode", "mcq"}).code == cli::kExitData);
}

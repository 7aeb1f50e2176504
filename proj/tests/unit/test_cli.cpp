#include "tipping/cli/commands.hpp"
#include "tipping/cli/config.hpp"
#include "tipping/cli/pipeline.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tipping;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path root;
    explicit Sandbox(const std::string& name) : root(fs::temp_directory_path() / ("tipping_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Sandbox() { fs::remove_all(root); }

    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = root / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }
};

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    const std::string s = read(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

int run_cmd(const std::string& command, const fs::path& config, const fs::path& out, std::size_t threads = 1) {
    return run({command, config, out, threads});
}

const char* small_ikeda = R"({
  "system": {"id": "ikeda"},
  "training": {"params": [0.91, 0.94, 0.97], "samples": 3000, "washout": 200},
  "hyper": {"n_nodes": 80, "avg_degree": 5, "spectral_radius": 0.6, "sigma_in": 1.5, "k_b": 2.5,
            "b0": 0.5, "alpha": 0.6, "beta": 1e-7},
  "ensemble": {"members": 3, "seed": 4},
  "crisis": {"b_lo": 0.9, "b_hi": 1.2, "resolution": 0.01, "t_max": 1000, "votes": 3, "max_excluded": 1.0},
  "lifetimes": {"b": 1.1, "n_ics": 3, "t_max": 3},
  "warmup": 200
})";

}  // namespace

TEST_CASE("simulate writes one csv per parameter value") {
    Sandbox box("simulate");
    const auto cfg = box.write("sim.json", R"({"system": {"id": "ikeda"}, "simulate": {"params": [0.94], "samples": 100000}})");
    REQUIRE(run_cmd("simulate", cfg, box.root / "a") == exit_ok);
    const fs::path csv = box.root / "a" / "series_0.94.csv";
    CHECK(line_count(csv) == 100001);
    CHECK(read(csv).rfind("t,x1,x2,param\n", 0) == 0);

    REQUIRE(run_cmd("simulate", cfg, box.root / "b") == exit_ok);
    CHECK(read(csv) == read(box.root / "b" / "series_0.94.csv"));

    const auto manifest = nlohmann::json::parse(read(box.root / "a" / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["tool"] == "tipping-scout");
    CHECK(manifest["version"] == tool_version);
    CHECK(manifest["config"]["simulate"]["samples"] == 100000);
    CHECK(manifest["outputs"][0]["file"] == "series_0.94.csv");
    CHECK(manifest["outputs"][0]["fnv1a"].get<std::string>().size() == 16);
}

TEST_CASE("food chain csv schema") {
    Sandbox box("fc");
    const auto cfg = box.write("fc.json", R"({"system": {"id": "foodchain"}, "simulate": {"params": [0.98], "samples": 20}})");
    REQUIRE(run_cmd("simulate", cfg, box.root / "o") == exit_ok);
    CHECK(read(box.root / "o" / "series_0.98.csv").rfind("t,R,C,P,param\n", 0) == 0);
}

TEST_CASE("config errors exit with the config code") {
    Sandbox box("config");
    CHECK(run_cmd("simulate", box.write("a.json", R"({"system": {"id": "ikeda"}, "hyper": {"spectral_radus": 0.5}})"),
                  box.root / "o") == exit_config);
    CHECK(run_cmd("simulate", box.write("b.json", R"({"system": {"id": "lorenz"}})"), box.root / "o") == exit_config);
    CHECK(run_cmd("simulate", box.write("c.json", R"({"system": {"id": "ikeda"}, "simulate": {"params": [0.9], "samples": "many"}})"),
                  box.root / "o") == exit_config);
    CHECK(run_cmd("simulate", box.write("d.json", "{not json"), box.root / "o") == exit_config);
    CHECK(run_cmd("simulate", box.root / "missing.json", box.root / "o") == exit_config);
    CHECK(run_cmd("launch", box.write("e.json", R"({"simulate": {"params": [0.9]}})"), box.root / "o") == exit_config);
    CHECK_THROWS_AS(parse_config(R"({"top_level_typo": 1})", "x.json"), Error);
}

TEST_CASE("hyperparameter fragments can be included") {
    Sandbox box("fragment");
    box.write("best.json", R"({"hyper": {"n_nodes": 50, "spectral_radius": 0.7, "log_beta": -5}})");
    const auto cfg = parse_config(R"({"hyper": {"include": "best.json", "alpha": 0.3}})", box.root / "x.json");
    CHECK(cfg.hyper.n_nodes == 50);
    CHECK(cfg.hyper.spectral_radius == 0.7);
    CHECK(cfg.hyper.beta == doctest::Approx(1e-5));
    CHECK(cfg.hyper.alpha == 0.3);
    CHECK(cfg.includes.size() == 1);
    CHECK(parse_config(R"({"hyper": "tune"})", "x.json").tune_hyper);
}

TEST_CASE("corrupted external csv is a data error naming file and line") {
    Sandbox box("corrupt");
    std::string text = "t,x1,x2,param\n";
    for (int k = 0; k < 50; ++k) text += std::to_string(k) + ",0.1,0.2,0.9\n";
    text += "50,0.1,garbage,0.9\n";
    box.write("bad.csv", text);
    const auto cfg = box.write("ext.json", R"({"system": {"id": "external-csv", "files": [{"param": 0.9, "path": "bad.csv"}]},
                                            "training": {"samples": 10, "washout": 5}})");
    CHECK(run_cmd("train", cfg, box.root / "o") == exit_data);
    try {
        (void)prepare(load_config(cfg));
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bad.csv:52") != std::string::npos);
    }
}

TEST_CASE("train writes a model and per-session report") {
    Sandbox box("train");
    const auto cfg = box.write("t.json", small_ikeda);
    REQUIRE(run_cmd("train", cfg, box.root / "o") == exit_ok);
    const auto report = nlohmann::json::parse(read(box.root / "o" / "train_report.json"));
    CHECK(report["sessions"].size() == 3);
    for (const auto& s : report["sessions"]) CHECK(s["one_step_rmse"].get<double>() < 1e-1);
    CHECK(report["warnings"].empty());
    const Reservoir model = Reservoir::load(box.root / "o" / "model.bin");
    CHECK(model.trained());
    CHECK(model.size() == 80);

    auto single = nlohmann::json::parse(small_ikeda);
    single["training"]["params"] = {0.94};
    REQUIRE(run_cmd("train", box.write("one.json", single.dump()), box.root / "one") == exit_ok);
    const auto one = nlohmann::json::parse(read(box.root / "one" / "train_report.json"));
    REQUIRE(one["warnings"].size() == 1);
    CHECK(one["warnings"][0].get<std::string>().find("single-parameter corpus") != std::string::npos);
}

TEST_CASE("external csv pipeline matches the built-in simulator") {
    Sandbox box("external");
    box.write("sim.json", R"({"system": {"id": "ikeda"}, "simulate": {"params": [0.91, 0.97], "samples": 4000, "burn_in": 1000}})");
    REQUIRE(run_cmd("simulate", box.root / "sim.json", box.root / "data") == exit_ok);
    const auto cfg = box.write("ext.json", R"({"system": {"id": "external-csv", "files": [
        {"param": 0.91, "path": "data/series_0.91.csv"}, {"param": 0.97, "path": "data/series_0.97.csv"}]},
      "training": {"samples": 2000, "washout": 200},
      "hyper": {"n_nodes": 60}})");
    REQUIRE(run_cmd("train", cfg, box.root / "o") == exit_ok);
    const auto manifest = nlohmann::json::parse(read(box.root / "o" / "manifest.json"));
    CHECK(manifest["inputs"].size() == 2);

    box.write("short.json", R"({"system": {"id": "external-csv", "files": [{"param": 0.91, "path": "data/series_0.91.csv"}]},
      "training": {"samples": 9000}})");
    CHECK(run_cmd("train", box.root / "short.json", box.root / "s") == exit_data);
}

TEST_CASE("crisis artifacts are identical at any width") {
    Sandbox box("crisis");
    const auto cfg = box.write("c.json", small_ikeda);
    REQUIRE(run_cmd("crisis", cfg, box.root / "w1", 1) == exit_ok);
    REQUIRE(run_cmd("crisis", cfg, box.root / "w3", 3) == exit_ok);
    for (const char* f : {"crisis_members.csv", "crisis_summary.json", "manifest.json"})
        CHECK(read(box.root / "w1" / f) == read(box.root / "w3" / f));
    CHECK(read(box.root / "w1" / "crisis_members.csv").rfind("member,seed,b_star\n", 0) == 0);
    CHECK(line_count(box.root / "w1" / "crisis_members.csv") == 4);
    const auto s = nlohmann::json::parse(read(box.root / "w1" / "crisis_summary.json"));
    for (const char* key : {"mean", "std", "sem", "n", "excluded", "flags", "region"}) CHECK(s.contains(key));
}

TEST_CASE("single-member crisis run") {
    Sandbox box("single");
    auto j = nlohmann::json::parse(small_ikeda);
    j["ensemble"]["members"] = 1;
    REQUIRE(run_cmd("crisis", box.write("c.json", j.dump()), box.root / "o") == exit_ok);
    const auto s = nlohmann::json::parse(read(box.root / "o" / "crisis_summary.json"));
    CHECK(s["std"] == 0.0);
    CHECK(s["n"] == 1);
    CHECK(s["flags"][0] == "single member");
}

TEST_CASE("lifetimes with a tiny horizon exit with the censored code") {
    Sandbox box("censored");
    const auto cfg = box.write("l.json", small_ikeda);
    CHECK(run_cmd("lifetimes", cfg, box.root / "o") == exit_censored);
    const auto s = nlohmann::json::parse(read(box.root / "o" / "lifetimes_summary.json"));
    CHECK_FALSE(s["predicted"].contains("tau"));
    CHECK(s["predicted"]["censored"] == 9);
    CHECK(read(box.root / "o" / "lifetimes.csv").rfind("member,ic,lifetime,censored\n", 0) == 0);
    CHECK(line_count(box.root / "o" / "lifetimes.csv") == 10);
}

TEST_CASE("lifetimes with an oracle comparison") {
    Sandbox box("lifetimes");
    auto j = nlohmann::json::parse(small_ikeda);
    j["lifetimes"] = {{"b", 1.1}, {"n_ics", 6}, {"t_max", 5000}, {"oracle_ics", 20}, {"oracle_noise", 0.01}};
    REQUIRE(run_cmd("lifetimes", box.write("l.json", j.dump()), box.root / "o") == exit_ok);
    const auto s = nlohmann::json::parse(read(box.root / "o" / "lifetimes_summary.json"));
    CHECK(s["oracle"]["runs"] == 20);
    CHECK(s["oracle"].contains("tau"));
    CHECK(fs::exists(box.root / "o" / "survival.csv"));
    CHECK(read(box.root / "o" / "survival.csv").rfind("t,survival,alive\n", 0) == 0);
}

TEST_CASE("lifetimes relative to each member's critical point") {
    Sandbox box("offset");
    auto j = nlohmann::json::parse(small_ikeda);
    j["ensemble"]["members"] = 2;
    j["lifetimes"] = {{"offset", 0.05}, {"n_ics", 4}, {"t_max", 5000}, {"oracle_ics", 12}, {"oracle_noise", 0.01}};
    REQUIRE(run_cmd("lifetimes", box.write("l.json", j.dump()), box.root / "o") == exit_ok);
    const auto s = nlohmann::json::parse(read(box.root / "o" / "lifetimes_summary.json"));
    REQUIRE(s["member_b"].size() == 2);
    CHECK_FALSE(s.contains("b"));
    CHECK(s["oracle_b"].get<double>() == doctest::Approx(s["oracle_critical"].get<double>() + 0.05));
    CHECK(s["oracle_critical"].get<double>() == doctest::Approx(1.0027).epsilon(0.02));
    CHECK(s["predicted"]["runs"] == 8);

    j["lifetimes"]["b"] = 1.1;
    CHECK(run_cmd("lifetimes", box.write("both.json", j.dump()), box.root / "x") == exit_config);
    j["lifetimes"].erase("b");
    j["lifetimes"].erase("offset");
    CHECK(run_cmd("lifetimes", box.write("none.json", j.dump()), box.root / "x") == exit_config);
}

TEST_CASE("tune writes a trace and a reusable fragment") {
    Sandbox box("tune");
    auto j = nlohmann::json::parse(small_ikeda);
    j["tune"] = {{"budget", 10}, {"climate_steps", 1000}, {"segments", 4}, {"seeds", 1}, {"lyapunov_steps", 2000}};
    const auto cfg = box.write("t.json", j.dump());
    REQUIRE(run_cmd("tune", cfg, box.root / "o") == exit_ok);
    CHECK(line_count(box.root / "o" / "trace.csv") == 11);
    CHECK(read(box.root / "o" / "trace.csv").rfind("iter,loss,avg_degree,rho,sigma_in,k_b,b0,alpha,log_beta,seed\n", 0) == 0);

    j["tune"]["budget"] = 12;
    j["tune"]["resume"] = "o/trace.csv";
    REQUIRE(run_cmd("tune", box.write("t2.json", j.dump()), box.root / "o2") == exit_ok);
    const std::string first = read(box.root / "o" / "trace.csv");
    const std::string second = read(box.root / "o2" / "trace.csv");
    CHECK(second.compare(0, first.size(), first) == 0);
    CHECK(line_count(box.root / "o2" / "trace.csv") == 13);

    const auto reuse = parse_config(R"({"hyper": {"include": "o/best_hyper.json"}})", box.root / "r.json");
    CHECK(reuse.hyper.n_nodes == 80);
}

TEST_CASE("output directory precedence") {
    Sandbox box("outdir");
    const auto cfg = box.write("s.json", R"({"system": {"id": "ikeda"}, "simulate": {"params": [0.9], "samples": 10}, "output": "from_config"})");
    const ExperimentConfig config = load_config(cfg);
    Invocation inv{"simulate", cfg, std::nullopt, 1};
    CHECK(output_directory(inv, config) == box.root / "from_config");
    ::setenv("TIPPING_SCOUT_OUT", (box.root / "from_env").c_str(), 1);
    CHECK(output_directory(inv, config) == box.root / "from_env");
    CHECK(run(inv) == exit_ok);
    CHECK(fs::exists(box.root / "from_env" / "series_0.9.csv"));
    inv.out = box.root / "from_flag";
    CHECK(output_directory(inv, config) == box.root / "from_flag");
    ::unsetenv("TIPPING_SCOUT_OUT");
}

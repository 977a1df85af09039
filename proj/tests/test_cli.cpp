#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_bin() {
    if (const char* env = std::getenv("UMP_CLI_PATH"); env && *env) return env;
#ifdef UMP_CLI_BIN
    return UMP_CLI_BIN;
#else
    FAIL("no CLI binary configured");
    return "";
#endif
}

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("ump_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    out << text;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& doc) {
    fs::path p = dir / name;
    write_text(p, doc.dump(2));
    return p;
}

int run_cli(const std::string& args) {
    const int status = std::system(("'" + cli_bin() + "' " + args + " >/dev/null 2>&1").c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json load_manifest(const fs::path& out_dir, const std::string& command) {
    return json::parse(slurp(out_dir / ("manifest-" + command + ".json")));
}

json base_config(const std::string& command, const fs::path& out_dir) {
    json cfg;
    cfg["command"] = command;
    cfg["potential"] = {{"kind", "cosine"}, {"t", 0.5}};
    cfg["n_values"] = {8};
    cfg["out_dir"] = out_dir.string();
    return cfg;
}

} // namespace

TEST_CASE("well-formed commands exit zero and record their artifacts") {
    fs::path dir = fresh_dir("ok");
    json cfg = base_config("density", dir / "out");
    fs::path cf = write_config(dir, "density.json", cfg);

    REQUIRE(run_cli(cf.string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "density_n8.csv"));
    json man = load_manifest(dir / "out", "density");
    REQUIRE(man["exit_code"] == 0);
    REQUIRE(man["cache_hit"] == false);
    REQUIRE(man["residuals"].contains("mass_deviation_n8"));
    bool listed = false;
    for (const auto& o : man["outputs"])
        if (o == "density_n8.csv") listed = true;
    REQUIRE(listed);
}

TEST_CASE("configuration problems exit with code 2") {
    fs::path dir = fresh_dir("cfg");

    json bad_cmd = base_config("explode", dir / "o1");
    REQUIRE(run_cli(write_config(dir, "c1.json", bad_cmd).string()) == 2);

    fs::path broken = dir / "c2.json";
    write_text(broken, "{ \"command\": \"density\", ");
    REQUIRE(run_cli(broken.string()) == 2);

    json unknown_key = base_config("density", dir / "o3");
    unknown_key["frobnicate"] = 1;
    REQUIRE(run_cli(write_config(dir, "c3.json", unknown_key).string()) == 2);

    json bad_n = base_config("density", dir / "o4");
    bad_n["n_values"] = json::array();
    REQUIRE(run_cli(write_config(dir, "c4.json", bad_n).string()) == 2);

    REQUIRE(run_cli((dir / "missing.json").string()) == 2);
}

TEST_CASE("precision overflow exits with code 3") {
    fs::path dir = fresh_dir("prec");
    json cfg = base_config("basis", dir / "out");
    cfg["n_values"] = {64};
    cfg["precision"] = "double";
    REQUIRE(run_cli(write_config(dir, "c.json", cfg).string()) == 3);
    json man = load_manifest(dir / "out", "basis");
    REQUIRE(man["exit_code"] == 3);
    REQUIRE(man.contains("error"));
}

TEST_CASE("non-convergent equilibrium runs exit with code 4") {
    fs::path dir = fresh_dir("conv");

    json clamp = base_config("equilibrium", dir / "o1");
    clamp["potential"] = {{"kind", "cosine"}, {"t", 1.5}};
    REQUIRE(run_cli(write_config(dir, "c1.json", clamp).string()) == 4);

    json stall = base_config("equilibrium", dir / "o2");
    stall["potential"] = {{"kind", "cosine"}, {"t", 0.9}};
    stall["max_iter"] = 3;
    REQUIRE(run_cli(write_config(dir, "c2.json", stall).string()) == 4);
}

TEST_CASE("identity-suite failures exit with code 5") {
    fs::path dir = fresh_dir("vid");

    json good = base_config("verify-identities", dir / "o1");
    REQUIRE(run_cli(write_config(dir, "c1.json", good).string()) == 0);
    json man = load_manifest(dir / "o1", "verify-identities");
    REQUIRE(man["suite_pass"] == true);

    json bad = base_config("verify-identities", dir / "o2");
    bad["perturb"] = 1e-6;
    REQUIRE(run_cli(write_config(dir, "c2.json", bad).string()) == 5);
}

TEST_CASE("cached reruns are byte-identical and deterministic") {
    fs::path dir = fresh_dir("cache");
    json cfg = base_config("density", dir / "out");
    fs::path cf = write_config(dir, "c.json", cfg);

    REQUIRE(run_cli(cf.string()) == 0);
    const std::string first_csv = slurp(dir / "out" / "density_n8.csv");
    json man1 = load_manifest(dir / "out", "density");
    REQUIRE(man1["cache_hit"] == false);

    REQUIRE(run_cli(cf.string()) == 0);
    const std::string second_csv = slurp(dir / "out" / "density_n8.csv");
    json man2 = load_manifest(dir / "out", "density");
    REQUIRE(man2["cache_hit"] == true);
    REQUIRE(first_csv == second_csv);

    REQUIRE(run_cli(cf.string()) == 0);
    json man3 = load_manifest(dir / "out", "density");
    for (auto* m : {&man2, &man3}) {
        m->erase("wall_time_ms");
        m->erase("timestamp_utc");
    }
    REQUIRE(man2.dump() == man3.dump());
}

TEST_CASE("corrupted cache entries are rebuilt instead of trusted") {
    fs::path dir = fresh_dir("corrupt");
    json cfg = base_config("density", dir / "out");
    fs::path cf = write_config(dir, "c.json", cfg);
    REQUIRE(run_cli(cf.string()) == 0);

    fs::path entry;
    for (const auto& e : fs::directory_iterator(dir / "out" / "cache"))
        if (e.path().extension() == ".umpb") entry = e.path();
    REQUIRE(!entry.empty());

    std::string bytes = slurp(entry);
    for (std::size_t i = bytes.size() / 2; i < bytes.size() / 2 + 64; ++i)
        bytes[i] = static_cast<char>(0xff); // scribble over part of the payload
    write_text(entry, bytes);

    REQUIRE(run_cli(cf.string()) == 0);
    json man = load_manifest(dir / "out", "density");
    REQUIRE(man["cache_hit"] == false);
}

TEST_CASE("cache directory override is honored") {
    fs::path dir = fresh_dir("cachedir");
    fs::path alt = dir / "alt_cache";
    json cfg = base_config("density", dir / "out");
    fs::path cf = write_config(dir, "c.json", cfg);

    REQUIRE(setenv("UMP_CACHE_DIR", alt.string().c_str(), 1) == 0);
    const int code = run_cli(cf.string());
    unsetenv("UMP_CACHE_DIR");
    REQUIRE(code == 0);

    REQUIRE(fs::exists(alt));
    bool found = false;
    for (const auto& e : fs::directory_iterator(alt))
        if (e.path().extension() == ".umpb") found = true;
    REQUIRE(found);
    REQUIRE(!fs::exists(dir / "out" / "cache"));
}

TEST_CASE("command-line overrides beat the config file") {
    fs::path dir = fresh_dir("override");
    json cfg = base_config("density", dir / "out");
    fs::path cf = write_config(dir, "c.json", cfg);

    REQUIRE(run_cli(cf.string() + " --n 6 --out '" + (dir / "out2").string() + "'") == 0);
    REQUIRE(fs::exists(dir / "out2" / "density_n6.csv"));
    json man = load_manifest(dir / "out2", "density");
    REQUIRE(man["n_values"] == json::array({6}));

    json samp = base_config("sample", dir / "out3");
    samp["n_values"] = {4};
    samp["samples"] = 120;
    samp["bins"] = 8;
    fs::path sf = write_config(dir, "s.json", samp);
    REQUIRE(run_cli(sf.string() + " --seed 42") == 0);
    json sman = load_manifest(dir / "out3", "sample");
    REQUIRE(sman["seed"] == 42);
    REQUIRE(fs::exists(dir / "out3" / "samples.csv"));
    REQUIRE(fs::exists(dir / "out3" / "sample_stats.json"));
}

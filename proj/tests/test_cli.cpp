#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

std::string cli() { return MSIFORGE_CLI_PATH; }

int run(const std::string& args) {
    std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

json run_json(const std::string& args) {
    std::string path = "/tmp/msiforge_cli_test_out.json";
    std::string cmd = cli() + " " + args + " --out " + path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    REQUIRE(WEXITSTATUS(rc) == 0);
    std::ifstream f(path);
    REQUIRE(f.good());
    json j;
    f >> j;
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("classgroup subcommand") {
    auto j = run_json("classgroup --disc -23");
    CHECK(j["schema"] == "msi-forge/1");
    CHECK(j["h"] == 3);
    REQUIRE(j["forms"].size() == 3);
    CHECK(j["forms"][0].dump() == "[1,1,6]");
    CHECK(j["forms"][1].dump() == "[2,1,3]");
    CHECK(j["forms"][2].dump() == "[2,-1,3]");
}

TEST_CASE("homology subcommand") {
    auto j = run_json("homology --level 11 --rank");
    CHECK(j["rank"] == 3);
    auto full = run_json("homology --level 11 --eigen");
    CHECK(full["genus"] == 1);
    CHECK(full["newforms"].size() == 1);
    CHECK(full["newforms"][0]["eigenvalues"]["2"] == -2);
}

TEST_CASE("params subcommand") {
    auto j = run_json("params --check -l 3 -m 1 -d 1 -B 3 -L 20");
    CHECK(j["separated"] == false);
    CHECK(j["search_hard"] == true);
}

TEST_CASE("graph subcommand") {
    auto j = run_json("graph --p 11 --ell 2 --edges");
    CHECK(j["vertices"].size() == 2);
    CHECK(j["adjacency"].size() == 2);
    for (const auto& nb : j["adjacency"]) CHECK(nb.size() == 3);
}

TEST_CASE("periods subcommand") {
    auto j = run_json("periods --level 11 --l 3 --m 6 --matrix");
    CHECK(j["matrix"]["rows"] == 2);
    CHECK(j["matrix"]["cols"] == 3);
    auto pv = run_json("periods --level 11 --l 3 --m 6 --coords 1,0,0");
    CHECK(pv["period"]["entries"].size() == 2);
}

TEST_CASE("msi pipeline round-trips through files") {
    std::string inst = "/tmp/msiforge_inst.json";
    int rc = std::system((cli() + " msi sample --level 11 --l 3 --m 6 --L 4 --seed " +
                          std::string(64, '2') + " --out " + inst + " 2>/dev/null")
                             .c_str());
    REQUIRE(WEXITSTATUS(rc) == 0);
    auto sol = run_json("msi solve --instance " + inst + " --method bf");
    CHECK(sol["found"] == true);
    CHECK(sol["verified"] == true);
    auto sol2 = run_json("msi solve --instance " + inst + " --method mitm");
    CHECK(sol2["found"] == true);
    CHECK(sol2["verified"] == true);
    auto lin = run_json("msi solve --instance " + inst + " --method linear");
    CHECK(lin["solvable"] == true);
}

TEST_CASE("msi collide") {
    auto j = run_json("msi collide --level 11 --l 3 --m 2 --L 4 --seed " + std::string(64, '3'));
    CHECK(j["full_enumeration"] == true);
    CHECK(j["paths_enumerated"] == 121);
    CHECK(j["distinct_classes"] == 35);
}

TEST_CASE("idproto keygen, transcript, verify, and prf") {
    std::string key = "/tmp/msiforge_key.json";
    std::string tr = "/tmp/msiforge_tr.bin";
    REQUIRE(run("idproto keygen --level 11 --l 3 --m 6 --L 6 --seed " + std::string(64, '4') +
                " --out " + key) == 0);
    auto rj = run_json("idproto run --key " + key + " --rounds 10 --seed " + std::string(64, '5'));
    CHECK(rj["rounds"] == 10);
    CHECK(rj["verified"] == 10);

    REQUIRE(run("idproto transcript --key " + key + " --challenge 1 --seed " + std::string(64, '6') +
                " --out-file " + tr) == 0);
    auto vj = run_json("idproto verify --key " + key + " --transcript " + tr);
    CHECK(vj["valid"] == true);

    auto pj = run_json("prf --key " + key + " --input deadbeef");
    CHECK(pj["output"].get<std::string>().size() == 64);
    auto pj2 = run_json("prf --key " + key + " --input deadbeef");
    CHECK(pj == pj2);
}

TEST_CASE("identical seeds reproduce identical artifacts byte for byte") {
    std::string a = "/tmp/msiforge_rep_a.json", b = "/tmp/msiforge_rep_b.json";
    std::string seed = std::string(64, '7');
    REQUIRE(run("msi sample --level 11 --l 3 --m 6 --L 4 --seed " + seed + " --out " + a) == 0);
    REQUIRE(run("msi sample --level 11 --l 3 --m 6 --L 4 --seed " + seed + " --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
}

TEST_CASE("parameter files drive the pipeline") {
    std::string pf = "/tmp/msiforge_params.json";
    {
        std::ofstream f(pf);
        f << R"({"schema":"msi-forge/1","p":101,"disc":-23,"N":11,"l":3,"m":6,"d":2,"L":4,)"
          << R"("B":3,"lambda":16,"seed":")" << std::string(64, '8') << R"("})";
    }
    auto j = run_json("msi sample --params " + pf);
    CHECK(j["params"]["L"] == 4);
    CHECK(j["params"]["l"] == 3);

    // invalid parameter files are a domain error
    std::string bad = "/tmp/msiforge_params_bad.json";
    {
        std::ofstream f(bad);
        f << R"({"schema":"msi-forge/1","p":101,"disc":23,"N":11,"l":3,"m":6,"d":2,"L":4,)"
          << R"("B":3,"lambda":16,"seed":")" << std::string(64, '8') << R"("})";
    }
    CHECK(run("msi sample --params " + bad) == 1);
}

TEST_CASE("pretty output and threads flags") {
    CHECK(run("classgroup --disc -23 --pretty") == 0);
    CHECK(run("params --check -l 3 -m 40 -d 2 -B 3 -L 20 --pretty") == 0);
    auto j = run_json("msi collide --level 11 --l 3 --m 2 --L 4 --threads 2 --seed " +
                      std::string(64, '9'));
    CHECK(j["paths_enumerated"] == 121);
}

TEST_CASE("exit codes") {
    CHECK(run("classgroup --disc -23") == 0);
    CHECK(run("classgroup --disc 23") == 1);   // domain error
    CHECK(run("classgroup") == 2);             // missing required option
    CHECK(run("definitely-not-a-command") == 2);
}

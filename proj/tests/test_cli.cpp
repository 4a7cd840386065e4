#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aolat/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(AOLAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path tmpdir() {
    static int counter = 0;
    fs::path p = fs::temp_directory_path() / ("aolat_cli_test_" + std::to_string(::getpid()) + "_" +
                                              std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("reruns with identical config produce byte-identical outputs") {
    auto d1 = tmpdir(), d2 = tmpdir();
    CHECK(run("dipole-scan --out " + (d1 / "r").string() + " --n 4,8,16") == 0);
    CHECK(run("dipole-scan --out " + (d2 / "r").string() + " --n 4,8,16") == 0);
    for (const char* f : {"dipole_scan.csv", "summary.json", "manifest.json"}) {
        std::string a = aolat::read_file((d1 / "r" / f).string());
        std::string b = aolat::read_file((d2 / "r" / f).string());
        CHECK(a == b);
        CHECK(!a.empty());
    }
    auto m1 = tmpdir(), m2 = tmpdir();
    CHECK(run("mc --out " + (m1 / "r").string() + " --N 3 --beta 4 --sweeps 60 --burnin 20 --seed 5") ==
          0);
    CHECK(run("mc --out " + (m2 / "r").string() + " --N 3 --beta 4 --sweeps 60 --burnin 20 --seed 5") ==
          0);
    CHECK(aolat::read_file((m1 / "r" / "chain.csv").string()) ==
          aolat::read_file((m2 / "r" / "chain.csv").string()));
    // different seed changes the chain
    auto m3 = tmpdir();
    CHECK(run("mc --out " + (m3 / "r").string() + " --N 3 --beta 4 --sweeps 60 --burnin 20 --seed 6") ==
          0);
    CHECK(aolat::read_file((m1 / "r" / "chain.csv").string()) !=
          aolat::read_file((m3 / "r" / "chain.csv").string()));
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run("rs-scan --m ,") == 2);
    CHECK(run("dipole-scan --n 0") == 2);
    CHECK(run("complex-summary --lattice nosuch") == 2);
    CHECK(run("complex-summary --N 1") == 2);
    CHECK(run("nosuchcommand") == 2);
    auto d = tmpdir();
    CHECK(run("mc --out " + (d / "r").string() + " --N 3 --x 9,9,9") == 2);
}

TEST_CASE("manifest lists outputs with checksums that match the files") {
    auto d = tmpdir();
    REQUIRE(run("complex-summary --out " + (d / "r").string() + " --lattice fcc3d --N 2 --bc neumann") ==
            0);
    std::string man = aolat::read_file((d / "r" / "manifest.json").string());
    CHECK(man.find("config_hash") != std::string::npos);
    CHECK(man.find("complex.json") != std::string::npos);
    std::string body = aolat::read_file((d / "r" / "complex.json").string());
    CHECK(man.find(aolat::hex64(aolat::fnv1a64(body))) != std::string::npos);
    CHECK(body.find("\"cohomology\"") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags override") {
    auto d = tmpdir();
    {
        std::ofstream os(d / "cfg.json");
        os << R"({"dipole-scan": {"n": "4,8", "tol": 1e-6}})";
    }
    REQUIRE(run("--config " + (d / "cfg.json").string() + " dipole-scan --out " +
                (d / "a").string()) == 0);
    std::string csv = aolat::read_file((d / "a" / "dipole_scan.csv").string());
    // two data rows from the config file list
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    REQUIRE(run("--config " + (d / "cfg.json").string() + " dipole-scan --out " + (d / "b").string() +
                " --n 4") == 0);
    std::string csv2 = aolat::read_file((d / "b" / "dipole_scan.csv").string());
    CHECK(std::count(csv2.begin(), csv2.end(), '\n') == 2);  // flag overrode the config
}

TEST_CASE("grain demo emits the bound check row and the charge support") {
    auto d = tmpdir();
    REQUIRE(run("grain-demo --out " + (d / "r").string() + " --N 12 --S01 -0.2 --radius 3.2") == 0);
    std::string en = aolat::read_file((d / "r" / "energies.csv").string());
    CHECK(en.find("bound_satisfied,1") != std::string::npos);
    std::string ch = aolat::read_file((d / "r" / "charges.csv").string());
    CHECK(std::count(ch.begin(), ch.end(), '\n') > 1);  // nonempty support
}

TEST_CASE("single-entry dipole scan emits one positive row") {
    auto d = tmpdir();
    REQUIRE(run("dipole-scan --out " + (d / "r").string() + " --n 1") == 0);
    std::string csv = aolat::read_file((d / "r" / "dipole_scan.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    // the data row holds a positive energy
    auto pos = csv.find('\n');
    CHECK(std::stod(csv.substr(pos + 3)) > 0.0);
}

TEST_CASE("grain demo charge support matches the recorded golden run") {
    // frozen from the first verified run: six isolated boundary-adjacent
    // charges for the radius-3.2 grain rotated by S01 = -0.2 on the N = 12 box
    auto d = tmpdir();
    REQUIRE(run("grain-demo --out " + (d / "r").string() + " --N 12 --S01 -0.2 --radius 3.2") == 0);
    std::string ch = aolat::read_file((d / "r" / "charges.csv").string());
    CHECK(aolat::fnv1a64(ch) == 0xd9654f349a30196full);
}

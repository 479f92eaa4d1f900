#include <json.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = CAPAX_CLI_PATH;

fs::path fixture_dir() {
    static fs::path dir = [] {
        std::string tmpl = (fs::temp_directory_path() / "capax_cli_XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        REQUIRE(mkdtemp(buf.data()) != nullptr);
        fs::path d(buf.data());

        std::ofstream(d / "k2.json") << R"({"kind":"matrix","entries":[[2,1],[1,2]]})";
        std::ofstream(d / "newt3.json") << R"({"kind":"newtonian","dim":3})";
        std::ofstream(d / "sphere400.json")
            << R"({"kind":"sphere","center":[0,0,0],"r":1.0,"resolution":400})";
        std::ofstream(d / "sub0.json") << "[0]";
        std::ofstream(d / "sub1.json") << "[1]";
        std::ofstream(d / "mu.csv") << "index,weight\n0,1\n";
        std::ofstream(d / "frostman_violator.json")
            << R"({"kind":"matrix","entries":[[1,1.2],[1.2,2]]})";
        std::ofstream(d / "bad.json") << "{nope";
        std::ofstream(d / "cloud.csv") << "0,0,0,1\n2,0,0,1\n0,2,0,1\n";
        std::ofstream(d / "cloud_shape.json") << R"({"kind":"cloud","path":")"
                                              << (d / "cloud.csv").string() << R"(","dim":3})";
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

nlohmann::json slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

std::string in(const std::string& name) { return (fixture_dir() / name).string(); }

std::string out(const std::string& name) { return (fixture_dir() / name).string(); }

}  // namespace

TEST_CASE("capacity on the 2x2 matrix kernel writes 2/3 and the uniform measure") {
    REQUIRE(run("capacity --kernel " + in("k2.json") + " -o " + out("cap")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "cap" / "result.json");
    REQUIRE(j["capacity"].get<double>() == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(j["robin"].get<double>() == Catch::Approx(1.5).epsilon(1e-12));
    REQUIRE(j["mass"].get<double>() == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(j["potential_min_on_A"].get<double>() == Catch::Approx(1.0).epsilon(1e-9));
    REQUIRE(j["formulation"] == "dual");
    REQUIRE(j["kkt_residual"].get<double>() <= 1e-9);

    std::ifstream w(fixture_dir() / "cap" / "weights.csv");
    std::string header, row0, row1;
    REQUIRE(std::getline(w, header));
    REQUIRE(header == "index,weight");
    REQUIRE(std::getline(w, row0));
    REQUIRE(std::getline(w, row1));
    REQUIRE(std::stod(row0.substr(row0.find(',') + 1)) == Catch::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("all four formulations agree through the CLI") {
    for (const std::string f : {"primal", "dual", "obstacle", "minmass"}) {
        REQUIRE(run("capacity --kernel " + in("k2.json") + " --formulation " + f + " -o " +
                    out("cap_" + f)) == 0);
        nlohmann::json j = slurp(fixture_dir() / ("cap_" + f) / "result.json");
        REQUIRE(j["capacity"].get<double>() == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
        REQUIRE(j["formulation"] == f);
    }
}

TEST_CASE("subset restriction changes the capacity") {
    REQUIRE(run("capacity --kernel " + in("k2.json") + " --subset " + in("sub0.json") + " -o " +
                out("cap_sub")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "cap_sub" / "result.json");
    REQUIRE(j["capacity"].get<double>() == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Newtonian sphere cloud capacity is close to one") {
    REQUIRE(run("capacity --kernel " + in("newt3.json") + " --shape " + in("sphere400.json") +
                " --formulation dual -o " + out("cap_sphere")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "cap_sphere" / "result.json");
    REQUIRE(j["capacity"].get<double>() == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("point-cloud shapes with explicit cell sizes run end to end") {
    std::ofstream(fixture_dir() / "riesz13.json") << R"({"kind":"riesz","alpha":1.0,"dim":3})";
    REQUIRE(run("capacity --kernel " + in("riesz13.json") + " --shape " + in("cloud_shape.json") +
                " -o " + out("cap_cloud")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "cap_cloud" / "result.json");
    REQUIRE(j["capacity"].get<double>() > 0.0);
}

TEST_CASE("balayage writes the hand-case sweep and a passing verification") {
    REQUIRE(run("balayage --kernel " + in("k2.json") + " --measure " + in("mu.csv") +
                " --subset " + in("sub1.json") + " -o " + out("bal")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "bal" / "balayage.json");
    REQUIRE(j["formulations"].size() == 3);
    for (const auto& f : j["formulations"]) {
        REQUIRE(f["mass"].get<double>() == Catch::Approx(0.5).epsilon(1e-9));
        REQUIRE(f["global_dominated"].get<bool>());
    }
    REQUIRE(j["max_formulation_difference"].get<double>() <= 1e-7);
    REQUIRE(j["verification"]["pass"].get<bool>());

    std::ifstream w(fixture_dir() / "bal" / "swept.csv");
    std::string header, row0, row1;
    std::getline(w, header);
    std::getline(w, row0);
    std::getline(w, row1);
    REQUIRE(std::stod(row0.substr(row0.find(',') + 1)) == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(std::stod(row1.substr(row1.find(',') + 1)) == Catch::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("converge emits the staged CSV with hand values") {
    REQUIRE(run("converge --kernel " + in("k2.json") + " --stages 2 -o " + out("con")) == 0);
    std::ifstream csv(fixture_dir() / "con" / "stages.csv");
    std::string header, s0, s1;
    REQUIRE(std::getline(csv, header));
    REQUIRE(header == "stage,capacity,mass,energy,max_potential_violation");
    REQUIRE(std::getline(csv, s0));
    REQUIRE(std::getline(csv, s1));
    REQUIRE(s0.substr(0, 2) == "0,");
    REQUIRE(std::stod(s0.substr(2)) == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(std::stod(s1.substr(2)) == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    nlohmann::json j = slurp(fixture_dir() / "con" / "convergence.json");
    REQUIRE(j["checks"]["pass"].get<bool>());

    REQUIRE(run("converge --kernel " + in("k2.json") + " --subset " + in("sub0.json") +
                " --stages 2 --mode decreasing -o " + out("con_dec")) == 0);
    std::ifstream dec(fixture_dir() / "con_dec" / "stages.csv");
    std::string dh, d0, d1;
    std::getline(dec, dh);
    std::getline(dec, d0);
    std::getline(dec, d1);
    REQUIRE(std::stod(d0.substr(2)) == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(std::stod(d1.substr(2)) == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("verify suites all pass on the 2x2 kernel and report itemized JSON") {
    for (const std::string s : {"equilibrium", "balayage", "convergence", "principles"}) {
        REQUIRE(run("verify --kernel " + in("k2.json") + " --suite " + s + " -o " +
                    out("ver_" + s)) == 0);
        nlohmann::json j = slurp(fixture_dir() / ("ver_" + s) / "verify.json");
        REQUIRE(j["suite"] == s);
        REQUIRE(j["pass"].get<bool>());
        if (s == "principles") {
            REQUIRE(j["frostman"]["pass"].get<bool>());
            REQUIRE(j["domination"]["trials"].get<int>() == 200);
        } else {
            REQUIRE(j["report"]["checks_failed"].get<int>() == 0);
        }
    }
}

TEST_CASE("calibrate reproduces the disc self-energy constant") {
    REQUIRE(run("calibrate --kernel " + in("newt3.json") + " --cell disc --dim 2 --samples 200000"
                " -o " + out("calib")) == 0);
    nlohmann::json j = slurp(fixture_dir() / "calib" / "calibration.json");
    double expected = 32.0 / (3.0 * std::acos(-1.0));
    REQUIRE(j["value"].get<double>() == Catch::Approx(expected).margin(0.06));
    REQUIRE(j["std_error"].get<double>() > 0.0);
    REQUIRE(j["samples"].get<std::uint64_t>() == 200000);
}

TEST_CASE("runs are deterministic: identical bytes on repeat") {
    REQUIRE(run("capacity --kernel " + in("k2.json") + " -o " + out("det_a")) == 0);
    REQUIRE(run("capacity --kernel " + in("k2.json") + " -o " + out("det_b")) == 0);
    std::ifstream a(fixture_dir() / "det_a" / "result.json"), b(fixture_dir() / "det_b" / "result.json");
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    REQUIRE(sa == sb);
    REQUIRE_FALSE(sa.empty());
}

TEST_CASE("input errors exit 1, uncertified min-mass exits 2") {
    REQUIRE(run("capacity --kernel " + in("nope.json") + " -o " + out("err")) == 1);
    REQUIRE(run("capacity --kernel " + in("bad.json") + " -o " + out("err")) == 1);
    REQUIRE(run("capacity --kernel " + in("k2.json") + " --subset " + in("bad.json") + " -o " +
                out("err")) == 1);
    REQUIRE(run("capacity") == 1);
    REQUIRE(run("frobnicate") == 1);
    std::ofstream(fixture_dir() / "sub9.json") << "[9]";
    REQUIRE(run("capacity --kernel " + in("k2.json") + " --subset " + in("sub9.json") + " -o " +
                out("err")) == 1);
    REQUIRE(run("capacity --kernel " + in("frostman_violator.json") +
                " --formulation minmass -o " + out("err")) == 2);
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "commands.hpp"
#include "pfdde/model_io.hpp"
#include "pfdde/wright.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = pfdde::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("pfdde_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

// data rows of a CSV with '#' headers and a column header
std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

std::string body(const std::string& text) {
    std::istringstream is(text);
    std::string line, out;
    while (std::getline(is, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

std::string slurp(const std::string& p) { return pfdde::read_text_file(p); }

}  // namespace

TEST_CASE("spectrum of wright at the hopf point") {
    REQUIRE(cli({"make-wright", "--N", "0", "--Omega1", "0", "--out", path("w0.json")}).code == 0);
    CHECK(fs::exists(path("w0.manifest.json")));
    auto r = cli({"spectrum", "--model", path("w0.json"), "--rect", "-2,1,-10,10"});
    REQUIRE(r.code == 0);
    int hits = 0;
    for (auto& row : rows(r.out))
        if (std::abs(std::stod(row[0])) < 1e-8 && std::abs(std::abs(std::stod(row[1])) - kPi / 2) < 1e-8) ++hits;
    CHECK(hits == 2);
}

TEST_CASE("empty rectangle gives a header-only csv") {
    cli({"make-wright", "--N", "0", "--Omega1", "0", "--out", path("w0.json")});
    auto r = cli({"spectrum", "--model", path("w0.json"), "--rect", "0.5,1,0.5,1"});
    CHECK(r.code == 0);
    CHECK(body(r.out) == "re,im,multiplicity,residual\n");
}

TEST_CASE("fold report") {
    REQUIRE(cli({"make-fold", "--beta1", "1", "--beta2", "0,1,0;1,0,-0.5;-1,0,0.5", "--out", path("fold.json")}).code == 0);
    auto r = cli({"fold", "--model", path("fold.json")});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["b"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cli({"make-fold", "--beta1", "-1", "--out", path("bad.json")}).code == 2);
}

TEST_CASE("hopf report with both variants") {
    cli({"make-wright", "--N", "0", "--Omega1", "0", "--out", path("w0.json")});
    auto paper = cli({"hopf", "--model", path("w0.json"), "--variant", "paper", "--out", path("hopf.json")});
    REQUIRE(paper.code == 0);
    auto doc = json::parse(slurp(path("hopf.json")));
    CHECK(doc["l1"].get<double>() == doctest::Approx(-1.69697).epsilon(1e-5));
    CHECK(doc["variant"] == "paper");
    CHECK(doc["manifest"] == "hopf.manifest.json");
    auto def = cli({"hopf", "--model", path("w0.json"), "--omega", "1.5707963267948966"});
    REQUIRE(def.code == 0);
    CHECK(json::parse(def.out)["l1"].get<double>() == doctest::Approx(-0.21414).epsilon(1e-4));
}

TEST_CASE("strong resonance exits with a diagnostic") {
    const std::string O2 = std::to_string(kPi / 4);
    cli({"make-wright", "--N", "0", "--Omega1", "1", "--Omega2", "0.78539816339744828", "--out", path("w12.json")});
    auto r = cli({"hopf", "--model", path("w12.json"), "--omega", "1.5707963267948966"});
    CHECK(r.code == 3);
    auto err = json::parse(r.err);
    CHECK(err["error"] == "ResonantMode");
    CHECK(!err["modes"].empty());
}

TEST_CASE("l1 sweep over the first branch") {
    const double w = kPi / 2;
    std::ostringstream grid;
    grid.precision(17);
    grid << 1e-4 << ',' << w - 1e-5 << ",40";
    auto r = cli({"l1-sweep", "--N", "0", "--grid", grid.str(), "--variant", "paper", "--out", path("sweep.csv")});
    REQUIRE(r.code == 0);
    auto data = rows(slurp(path("sweep.csv")));
    REQUIRE(data.size() == 40);
    for (auto& row : data) {
        const double pipe = std::stod(row[1]), closed = std::stod(row[2]);
        CHECK(std::isfinite(pipe));
        CHECK(std::abs(pipe - closed) < 1e-8 * std::max(1.0, std::abs(closed)));
    }
    CHECK(std::abs(std::stod(data.back()[1])) > 1e3);
    CHECK(std::abs(std::stod(data.front()[3]) - pfdde::l1_autonomous_paper(0)) < 1e-3);
}

TEST_CASE("sweep output is deterministic") {
    auto a = cli({"l1-sweep", "--N", "1", "--grid", "0.1,3,12", "--out", path("s1.csv")});
    auto b = cli({"l1-sweep", "--N", "1", "--grid", "0.1,3,12", "--out", path("s2.csv"), "--threads", "1"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(body(slurp(path("s1.csv"))) == body(slurp(path("s2.csv"))));
    CHECK(slurp(path("s1.csv")).find("generated") == std::string::npos);
    cli({"l1-sweep", "--N", "1", "--grid", "0.1,3,12", "--out", path("s3.csv"), "--stamp"});
    CHECK(slurp(path("s3.csv")).find("# generated: ") != std::string::npos);
    CHECK(body(slurp(path("s3.csv"))) == body(slurp(path("s1.csv"))));
}

TEST_CASE("simulate forced wright inside the stability region") {
    cli({"make-wright", "--N", "0", "--Omega1", "1", "--Omega2", "1", "--a", "-1", "--out", path("wm1.json")});
    auto r = cli({"simulate", "--model", path("wm1.json"), "--history", "0.5", "--tmax", "400", "--transient", "200",
                  "--out", path("sim.csv")});
    REQUIRE(r.code == 0);
    auto verdict = json::parse(slurp(path("sim.verdict.json")));
    CHECK(verdict["verdict"] == "decayed");
    CHECK(fs::exists(path("sim.strobe.csv")));
    auto manifest = json::parse(slurp(path("sim.manifest.json")));
    CHECK(manifest["outputs"].size() == 3);
}

TEST_CASE("simulate rejects a step that does not divide the delay") {
    cli({"make-wright", "--N", "0", "--Omega1", "0", "--out", path("w0.json")});
    auto r = cli({"simulate", "--model", path("w0.json"), "--dt", "0.3"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"] == "IntegrationError");
}

TEST_CASE("bifdiag rows") {
    auto r = cli({"bifdiag", "--N-max", "2", "--s-max", "4"});
    REQUIRE(r.code == 0);
    std::map<std::string, int> kinds;
    std::set<int> branches;
    for (auto& row : rows(r.out)) {
        kinds[row[4]]++;
        branches.insert(std::stoi(row[0]));
    }
    CHECK(branches == std::set<int>{0, 1, 2});
    CHECK(kinds["hopf"] > 0);
    CHECK(kinds["strong_resonance"] > 0);
    CHECK(kinds["pole"] == 3);
}

TEST_CASE("usage and io errors") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"spectrum"}).code == 2);
    CHECK(cli({"hopf", "--model", path("w0.json"), "--variant", "other"}).code == 2);
    CHECK(cli({"fold", "--model", path("missing.json")}).code == 4);
    CHECK(cli({"spectrum", "--model", path("w0.json"), "--rect", "1,2"}).code == 2);
}

#include <doctest.h>

#include "memlag/cli.hpp"
#include "memlag/netlist.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace memlag;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string net(const char* name) { return std::string(MEMLAG_NETLIST_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "memlag_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

} // namespace

TEST_CASE("parse echoes the canonical netlist") {
    const Result r = run({"parse", net("two_loop.net")});
    CHECK(r.code == cli::ok);
    const Circuit c = parse(r.out);
    CHECK(c.name == "two_loop");
    CHECK(c.elements.size() == 4);
    CHECK(serialize(c) == r.out);
    CHECK(run({"parse", net("two_loop.net")}).out == r.out);
}

TEST_CASE("parse reports a located error") {
    const Result r = run({"parse", net("garbage.net")});
    CHECK(r.code == cli::invalid_input);
    CHECK(r.out.empty());
    CHECK(r.err.find("garbage.net:3:14: error:") != std::string::npos);
}

TEST_CASE("check gives a verdict") {
    const Result a = run({"check", net("meminductor_lc.net")});
    CHECK(a.code == cli::ok);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["verdict"] == "self_adjoint");
    CHECK(j["conditions"].size() == 4);

    const Result b = run({"check", net("rlc.net")});
    CHECK(b.code == cli::ok);
    CHECK(nlohmann::json::parse(b.out)["verdict"] == "not_self_adjoint");
}

TEST_CASE("check is deterministic across runs and job counts") {
    const std::vector<std::string> files{net("meminductor_lc.net"), net("two_loop.net"), net("lc.net"), net("rlc.net"),
                                         net("node_dual.net")};
    std::vector<std::string> one{"check"}, two{"check"};
    one.insert(one.end(), files.begin(), files.end());
    two.insert(two.end(), files.begin(), files.end());
    two.insert(two.end(), {"--jobs", "3"});
    const Result a = run(one);
    const Result b = run(one);
    const Result c = run(two);
    CHECK(a.code == cli::ok);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const auto j = nlohmann::json::parse(a.out);
    REQUIRE(j.is_array());
    CHECK(j.size() == files.size());
}

TEST_CASE("MEMLAG_SEED selects the sample set") {
    const std::vector<std::string> args{"check", net("two_loop.net")};
    ::setenv("MEMLAG_SEED", "7", 1);
    const Result a = run(args);
    const Result b = run(args);
    ::setenv("MEMLAG_SEED", "8", 1);
    const Result c = run(args);
    ::setenv("MEMLAG_SEED", "seven", 1);
    const Result bad = run(args);
    ::unsetenv("MEMLAG_SEED");
    CHECK(a.code == cli::ok);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(bad.code == cli::usage);
}

TEST_CASE("simulate writes the trajectory and a small residual") {
    const fs::path csv = scratch("two_loop.csv");
    const Result r = run({"simulate", net("two_loop.net"), "--t1", "20", "--x0", "0.5,0", "--v0", "0.1,0", "--out",
                          csv.string()});
    REQUIRE(r.code == cli::ok);
    std::istringstream in(slurp(csv));
    std::string units, header;
    std::getline(in, units);
    std::getline(in, header);
    CHECK(units.rfind("# units:", 0) == 0);
    const auto cols = split(header, ',');
    REQUIRE(cols.size() >= 7);
    CHECK(cols[0] == "t");
    CHECK(cols[1] == "sigma1");
    CHECK(cols[2] == "sigma2");
    CHECK(cols[3] == "sigma1_dot");
    CHECK(cols[5] == "sigma1_ddot");
    CHECK(std::find(cols.begin(), cols.end(), "CM.V") != cols.end());
    std::string last, line;
    while (std::getline(in, line)) last = line;
    CHECK(std::stod(split(last, ',').front()) == 20.0);

    const auto pos = r.out.find("ikvl_residual ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 14)) <= 1e-6);

    const Result again = run({"simulate", net("two_loop.net"), "--t1", "20", "--x0", "0.5,0", "--v0", "0.1,0"});
    CHECK(again.out == slurp(csv));
}

TEST_CASE("drive reports the pinch verdict") {
    const Result m = run({"drive", net("two_loop.net"), "--element", "RM", "--t1", "12.566370614359172"});
    REQUIRE(m.code == cli::ok);
    const auto j = nlohmann::json::parse(m.err);
    CHECK(j["element"] == "RM");
    CHECK(j["verdict"] == "pinched");
    CHECK(j["input"] == "I");
    CHECK(j["output"] == "V");

    const Result c = run({"drive", net("lc.net"), "--element", "C1", "--t1", "12.566370614359172"});
    REQUIRE(c.code == cli::ok);
    CHECK(nlohmann::json::parse(c.err)["verdict"] == "not_pinched");

    CHECK(run({"drive", net("lc.net"), "--element", "X9"}).code == cli::invalid_input);
    CHECK(run({"drive", net("two_loop_driven.net"), "--element", "VS"}).code == cli::invalid_input);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == cli::usage);
    CHECK(run({"frobnicate"}).code == cli::usage);
    CHECK(run({"parse"}).code == cli::usage);
    CHECK(run({"parse", net("missing.net")}).code == cli::usage);
    CHECK(run({"simulate", net("lc.net"), "--t1", "-1"}).code == cli::usage);
    CHECK(run({"simulate", net("lc.net"), "--method", "euler"}).code == cli::usage);
    CHECK(run({"simulate", net("lc.net"), "--x0", "1,2"}).code == cli::usage);
    CHECK(run({"simulate", net("lc.net"), "--x0", "abc"}).code == cli::usage);
    CHECK(run({"simulate", net("lc.net"), "--out", "/nonexistent/dir/x.csv"}).code == cli::usage);
    CHECK(run({"check", net("lc.net"), "--region", "1,0"}).code == cli::usage);
    CHECK(run({"drive", net("lc.net"), "--shape", "square"}).code == cli::usage);
    const Result help = run({"--help"});
    CHECK(help.code == cli::ok);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("the installed binary returns the same exit codes") {
    const std::string bin = MEMLAG_CLI_PATH;
    const auto status = [&](const std::string& tail) {
        const int s = std::system((bin + " " + tail + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status("parse " + net("lc.net")) == 0);
    CHECK(status("parse " + net("garbage.net")) == 2);
    CHECK(status("bogus") == 1);
}

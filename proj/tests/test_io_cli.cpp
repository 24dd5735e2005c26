#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"
#include "xvine/error.hpp"
#include "xvine/io.hpp"

using namespace xvine;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("xvine_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kData = XVINE_DATA_DIR;

}  // namespace

TEST_CASE("CSV round trip") {
    TempDir tmp;
    Matrix m(2, 3);
    m.names = {"a", "b", "c"};
    m.data = {0.1, 1.0 / 3.0, 2e-300, -4.5, 1e17, 0.7};
    write_csv(tmp / "m.csv", m);
    Matrix r = read_csv(tmp / "m.csv");
    CHECK(r.names == m.names);
    CHECK(r.data == m.data);

    std::istringstream bad("x,y\n1,2\n3,abc\n");
    try {
        parse_csv(bad);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream ragged("x,y\n1,2\n3\n");
    CHECK_THROWS_AS(parse_csv(ragged), Error);
    CHECK_THROWS_AS(read_csv(tmp / "missing.csv"), Error);
}

TEST_CASE("model and structure JSON") {
    XVineSpec s = oracle::fig2_spec();
    XVineSpec back = model_from_json(parse_json(model_to_json(s).dump()));
    CHECK(back.vine() == s.vine());
    CHECK(back.tails() == s.tails());
    CHECK(back.pairs() == s.pairs());

    XVineSpec file = model_from_json(parse_json(read_text(kData + "/xvine5_mixed.json")));
    CHECK(file.tails() == s.tails());
    CHECK(file.pairs() == s.pairs());

    StructureMatrix m = structure_from_json(parse_json(read_text(kData + "/vine5_structure.json")));
    CHECK(from_structure_matrix(m) == oracle::fig1_vine());
    CHECK(structure_from_json(structure_to_json(m)) == m);

    auto j = model_to_json(s);
    j["edges"][0]["theta"] = -1.0;
    CHECK_THROWS_AS(model_from_json(j), Error);
    j = model_to_json(s);
    j["edges"].push_back(j["edges"][0]);
    CHECK_THROWS_AS(model_from_json(j), Error);
    j = model_to_json(s);
    j["edges"][4]["family"] = "no-such-family";
    CHECK_THROWS_AS(model_from_json(j), Error);
    CHECK_THROWS_AS(parse_json("{\"d\": "), Error);
}

TEST_CASE("cli simulate") {
    TempDir tmp;
    const std::string spec = kData + "/xvine5_mixed.json";
    Run r = cli_run({"simulate", "--spec", spec, "--n", "0"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "Z1,Z2,Z3,Z4,Z5\n");

    r = cli_run({"simulate", "--spec", spec, "--n", "500", "--seed", "3", "--out", tmp / "a.csv"});
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find("acceptance rate") != std::string::npos);
    cli_run({"simulate", "--spec", spec, "--n", "500", "--seed", "3", "--out", tmp / "b.csv", "--threads", "3"});
    CHECK(read_text(tmp / "a.csv") == read_text(tmp / "b.csv"));
    Matrix a = read_csv(tmp / "a.csv");
    CHECK(a.rows == 500);

    r = cli_run({"simulate", "--spec", spec, "--n", "400", "--conditional", "4", "--out", tmp / "c.csv"});
    CHECK(r.code == cli::kOk);
    Matrix c = read_csv(tmp / "c.csv");
    for (std::size_t i = 0; i < c.rows; ++i) REQUIRE(c(i, 3) < 1.0);

    std::ofstream(tmp / "broken.json") << "{\"structure\": 3}";
    CHECK(cli_run({"simulate", "--spec", tmp / "broken.json", "--n", "5"}).code == cli::kBadInput);
    CHECK(cli_run({"simulate", "--spec", tmp / "none.json", "--n", "5"}).code == cli::kIoError);
    CHECK(cli_run({"simulate", "--n", "5"}).code == cli::kBadInput);
}

TEST_CASE("cli fit and chi") {
    TempDir tmp;
    const std::string spec = kData + "/xvine5_mixed.json";
    cli_run({"simulate", "--spec", spec, "--n", "3000", "--seed", "1", "--pareto", "--out", tmp / "y.csv"});
    Run r = cli_run({"fit", "--data", tmp / "y.csv", "--k", "5000"});
    CHECK(r.code == cli::kBadInput);
    CHECK(r.err.find("--k") != std::string::npos);
    CHECK(cli_run({"fit", "--data", tmp / "missing.csv", "--k", "50"}).code == cli::kIoError);
    CHECK(cli_run({"fit", "--data", tmp / "y.csv", "--k", "150", "--trunc", "banana"}).code == cli::kBadInput);

    r = cli_run({"fit", "--data", tmp / "y.csv", "--k", "150", "--trunc", "mbic", "--out", tmp / "fit.json"});
    CHECK(r.code == cli::kOk);
    auto j = parse_json(read_text(tmp / "fit.json"));
    CHECK(j.contains("mbic"));
    CHECK(j["q_star"].get<int>() >= 1);
    CHECK(j["edges"][0].contains("n_eff"));
    CHECK(j["edges"][0].contains("selected_over"));
    // The fitted model is accepted by the simulator unchanged.
    CHECK(cli_run({"simulate", "--spec", tmp / "fit.json", "--n", "10"}).code == cli::kOk);

    r = cli_run({"fit", "--data", tmp / "y.csv", "--k", "150", "--structure", kData + "/vine5_structure.json",
                 "--trunc", "1", "--out", tmp / "fit1.json"});
    CHECK(r.code == cli::kOk);
    auto j1 = parse_json(read_text(tmp / "fit1.json"));
    CHECK(j1["edges"].size() == 4);

    // Comonotone columns.
    std::ofstream(tmp / "co.csv") << "x,y\n1,1\n2,2\n3,3\n4,4\n5,5\n6,6\n7,7\n8,8\n";
    r = cli_run({"chi", "--data", tmp / "co.csv", "--k", "4"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "a,b,chi\n1,2,1\n");

    r = cli_run({"chi", "--spec", spec, "--mc", "20000", "--seed", "2"});
    CHECK(r.code == cli::kOk);
    std::istringstream in(r.out);
    Matrix chi = parse_csv(in);
    CHECK(chi.names == std::vector<std::string>{"a", "b", "chi", "se"});
    CHECK(chi.rows == 10);
    CHECK(chi(0, 0) == 1);
    CHECK(chi(0, 1) == 2);
    CHECK(std::fabs(chi(0, 2) - tail_chi({TailKind::HuslerReiss, 1.5})) < 4 * chi(0, 3));
    CHECK(cli_run({"chi", "--spec", spec, "--data", tmp / "co.csv"}).code == cli::kBadInput);
    r = cli_run({"chi", "--spec", spec, "--mc", "1000", "--triples"});
    std::istringstream tin(r.out);
    CHECK(parse_csv(tin).rows == 10);
}

TEST_CASE("cli structure") {
    TempDir tmp;
    const std::string vine = kData + "/vine5_structure.json";
    Run r = cli_run({"structure", "--convert", vine, "--diag", "4", "--out", tmp / "m4.json"});
    CHECK(r.code == cli::kOk);
    StructureMatrix m4 = structure_from_json(parse_json(read_text(tmp / "m4.json")));
    CHECK(m4.diagonal() == std::vector<int>{4, 5, 2, 3, 1});
    CHECK(m4.at(1, 5) == 2);
    CHECK(m4.at(4, 5) == 5);
    cli_run({"structure", "--convert", tmp / "m4.json", "--diag", "4", "--out", tmp / "m4b.json"});
    CHECK(read_text(tmp / "m4.json") == read_text(tmp / "m4b.json"));

    r = cli_run({"structure", "--convert", vine, "--diag", "2,1,3,4,5"});
    CHECK(r.code == cli::kOk);
    CHECK(structure_from_json(parse_json(r.out)).diagonal() == std::vector<int>{2, 1, 3, 4, 5});
    CHECK(cli_run({"structure", "--convert", vine, "--diag", "1,5,2,3,4"}).code == cli::kBadInput);

    r = cli_run({"structure", "--validate", vine});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("15;234") != std::string::npos);

    std::ofstream(tmp / "bad.json") << R"({"d": 4, "trees": [[[1,2],[2,3],[3,4]], [[0,2],[0,1]]]})";
    r = cli_run({"structure", "--validate", tmp / "bad.json"});
    CHECK(r.code == cli::kBadInput);
    CHECK(r.err.find("12") != std::string::npos);
    CHECK(r.err.find("34") != std::string::npos);
    CHECK(cli_run({"structure", "--validate", vine, "--convert", vine}).code == cli::kBadInput);
    CHECK(cli_run({"bogus"}).code == cli::kBadInput);
}

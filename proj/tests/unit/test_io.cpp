#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "io.hpp"
#include "scenario.hpp"
#include "varsob/error.hpp"
#include "varsob/generators.hpp"

using namespace varsob;
using io::Json;

TEST_CASE("doubles round-trip in shortest form") {
  for (double v : {0.1, 1.0 / 3.0, 2.5707413984346204, 1e-300, 6.02214076e23, -0.0}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::number(std::numeric_limits<double>::infinity()) == Json("inf"));
  CHECK(std::isnan(io::read_number(Json("nan"), "x")));
  CHECK(io::read_number(Json("-inf"), "x") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(io::read_number(Json("seven"), "x"), Error);
}

TEST_CASE("space JSON round trip is byte-identical") {
  for (const auto& sp : {grid1d(8, 0.125), grid2d(3, 2, 0.3), cantor(3), two_zone_glued(3, 1, 2).space,
                         ball_grid_with_atom(2, 0.5).space}) {
    const std::string first = io::dump(io::space_to_json(sp));
    const auto back = io::space_from_json(io::parse(first));
    CHECK(io::dump(io::space_to_json(back)) == first);
    REQUIRE(back.size() == sp.size());
    for (std::size_t i = 0; i < sp.size(); ++i) {
      CHECK(back.weight(i) == sp.weight(i));
      for (std::size_t j = 0; j < sp.size(); ++j) CHECK(back.distance(i, j) == sp.distance(i, j));
    }
  }
}

TEST_CASE("matrix spaces load and validate") {
  const auto sp = io::space_from_json(io::parse(
      R"({"n": 3, "metric": {"type": "matrix", "values": [[0,1,2],[1,0,1],[2,1,0]]}, "weights": [1,1,1]})"));
  CHECK(sp.size() == 3);
  CHECK(sp.distance(0, 2) == 2.0);
  CHECK_THROWS_AS(io::space_from_json(io::parse(
                      R"({"n": 3, "metric": {"type": "matrix", "values": [[0,1,5],[1,0,1],[5,1,0]]}, "weights": [1,1,1]})")),
                  Error);
  CHECK_THROWS_AS(io::space_from_json(io::parse(R"({"n": 2, "metric": {"type": "euclidean", "coords": [[0],[1]]},
                                                   "weights": [1]})")),
                  Error);
  CHECK_THROWS_AS(io::parse("{not json"), Error);
}

TEST_CASE("exponent specs") {
  const auto sp = grid1d(4, 0.25);
  CHECK(io::exponent_from_json(Json(2.0), "p", sp).values() == std::vector<double>(4, 2.0));
  CHECK(io::exponent_from_json(io::parse(R"({"values": [1, 2, 3, 4]})"), "p", sp)[3] == 4.0);
  const auto z = io::exponent_from_json(
      io::parse(R"({"formula": {"type": "two_zone", "inside": 0.5, "outside": 1, "zone": [0]}})"), "Q", sp);
  CHECK(z[0] == 0.5);
  CHECK(z[1] == 1.0);
  CHECK(io::exponent_from_json(Json("inf"), "q", sp, true).has_infinity());
  CHECK_THROWS_AS(io::exponent_from_json(Json("inf"), "p", sp), Error);
  CHECK_THROWS_AS(io::exponent_from_json(io::parse(R"({"values": [1, 2]})"), "p", sp), Error);
}

TEST_CASE("report CSV") {
  VerificationReport a;
  a.theorem = "t1";
  a.scenario = "s,1";
  a.add_hypothesis("h", true);
  a.lhs = 1;
  a.rhs = 2;
  a.constant_used = 3;
  a.conclude();
  VerificationReport b = a;
  b.add_hypothesis("g", false);
  b.conclude();
  const Json arr = Json::array({io::report_to_json(a), io::report_to_json(b)});
  const std::string csv = io::reports_to_csv(arr);
  CHECK(csv.rfind("scenario,theorem,hypotheses_ok,lhs,rhs,constant,pass\n", 0) == 0);
  CHECK(csv.find("\"s,1\",t1,true,1,2,3,true\n") != std::string::npos);
  CHECK(csv.find("\"s,1\",t1,false,1,2,3,na\n") != std::string::npos);
}

namespace {

Json two_point_scenario() {
  return io::parse(R"({
    "id": "lp",
    "space": {"n": 2, "metric": {"type": "euclidean", "coords": [[0], [1]]}, "weights": [1, 1]},
    "exponents": {"s": 1, "p": 1},
    "function": [0, 1]
  })");
}

}  // namespace

TEST_CASE("scenario commands") {
  const auto grad = scenario::run("gradient", two_point_scenario());
  CHECK(io::read_number(grad.output.at("solution").at("objective"), "objective") ==
        doctest::Approx(1.0).epsilon(1e-6));

  // Total mass 2: 2 (2.5 / lambda)^3 = 1.
  Json flat = two_point_scenario();
  flat["function"] = Json{{"family", "constant"}, {"value", -2.5}};
  flat["exponents"]["p"] = 3;
  const auto norm = scenario::run("norm", flat);
  CHECK(io::read_number(norm.output.at("norm").at("value"), "norm") == doctest::Approx(2.5 * std::cbrt(2.0)));

  const Json cx = io::parse(R"({"id": "cx", "harness": {"theorem": "counterexample"}})");
  const auto res = scenario::run("verify", cx);
  CHECK(res.all_pass);
  CHECK(res.output.at(0).at("verdict") == "pass");

  CHECK_THROWS_AS(scenario::run("frobnicate", two_point_scenario()), Error);
  Json broken = two_point_scenario();
  broken["function"] = Json::array({1, 2, 3});
  CHECK_THROWS_AS(scenario::run("norm", broken), Error);
}

TEST_CASE("flags override scenario values") {
  Json sc = two_point_scenario();
  sc["tolerances"] = Json{{"tol", 1e-6}};
  sc["seed"] = 5;
  scenario::RunOptions o;
  const auto a = scenario::run("norm", sc, o);
  CHECK(io::read_number(a.output.at("run").at("tol"), "tol") == 1e-6);
  CHECK(a.output.at("run").at("seed") == 5);
  o.tol = 1e-8;
  o.seed = 9;
  const auto b = scenario::run("norm", sc, o);
  CHECK(io::read_number(b.output.at("run").at("tol"), "tol") == 1e-8);
  CHECK(b.output.at("run").at("seed") == 9);
}

TEST_CASE("batches are deterministic and independent of the worker count") {
  Json batch = {{"scenarios", Json::array()}};
  for (int i = 0; i < 6; ++i) {
    Json sc = two_point_scenario();
    sc["id"] = "rand" + std::to_string(i);
    sc["space"] = Json{{"kind", "grid1d"}, {"n", 5}};
    sc["exponents"] = Json{{"s", 0.5}, {"p", 2}};
    sc["function"] = Json{{"family", "random"}, {"seed", i}};
    batch["scenarios"].push_back(sc);
  }
  scenario::RunOptions one, four;
  four.jobs = 4;
  const std::string a = io::dump(scenario::run("gradient", batch, one).output);
  const std::string b = io::dump(scenario::run("gradient", batch, one).output);
  const std::string c = io::dump(scenario::run("gradient", batch, four).output);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("atomic file writes") {
  const auto dir = std::filesystem::temp_directory_path() / "varsob_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(io::read_file(path), Error);
}

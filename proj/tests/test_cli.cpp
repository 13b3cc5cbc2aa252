#include "doctest.h"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <sstream>

#include "cli.hpp"

using namespace flagmirror;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("q literals") {
  auto q = cli::parse_q("1, 0.5-2i,3i,-i,2.5e-1+1e1i");
  REQUIRE(q.size() == 5);
  CHECK(q[0] == std::complex<double>(1, 0));
  CHECK(q[1] == std::complex<double>(0.5, -2));
  CHECK(q[2] == std::complex<double>(0, 3));
  CHECK(q[3] == std::complex<double>(0, -1));
  CHECK(q[4] == std::complex<double>(0.25, 10));
  CHECK_THROWS_AS(cli::parse_q("1+"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_q("abc"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_q(""), std::invalid_argument);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"crit", "--shape", "1;x"}).code == 2);
  CHECK(call({"crit", "--shape", "1;2", "--q", "1,2"}).code == 2);
  CHECK(call({"superpotential"}).code == 2);
  CHECK(call({"qh-mult", "--u", "213"}).code == 2);
  CHECK(call({"qh-mult", "--u", "2213", "--v", "12"}).code == 2);
  CHECK(call({"verify-identity", "--shape", "2,4;7", "--j", "2", "--i", "4"}).code == 2);
  CHECK(call({"crit", "--shape", "1;2", "--format", "latex"}).code == 2);
  CHECK(call({"--format", "yaml", "crit", "--shape", "1;2"}).code == 2);
  Result r = call({"crit", "--shape", "1;2", "--q", "x"});
  CHECK(r.code == 2);
  CHECK(r.err.find("cannot parse") != std::string::npos);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("superpotential and divisors") {
  Result r = call({"superpotential", "--shape", "1;3"});
  CHECK(r.code == 0);
  CHECK(r.out == "p3/p2 + p2/p1 + q1*p1/p3\n");
  Result j = call({"superpotential", "--shape", "2;4", "--format", "json"});
  CHECK(j.code == 0);
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["schema"] == "flagmirror/superpotential");
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["terms"].size() == 4);
  CHECK(call({"superpotential", "--shape", "1,2;3", "--format", "latex"}).code == 0);

  Result d = call({"divisors", "--shape", "2,4;7"});
  CHECK(d.code == 0);
  CHECK(d.out.find("PASS") != std::string::npos);
  CHECK(d.out.find("D_8 = ") != std::string::npos);
  CHECK(call({"divisors", "--max-n", "5"}).code == 0);
}

TEST_CASE("quantum products") {
  Result r = call({"qh-mult", "--n", "3", "--u", "213", "--v", "213"});
  CHECK(r.code == 0);
  CHECK(r.out == "(q1)*s[123] + s[312]\n");
  Result l = call({"qh-mult", "--n", "3", "--u", "213", "--v", "213", "--format", "latex"});
  CHECK(l.out == "\\sigma_{213} * \\sigma_{213} = (q_{1})\\sigma_{123} + \\sigma_{312}\n");
  // Permutations are padded with fixed points up to n.
  Result padded = call({"qh-mult", "--n", "4", "--u", "21", "--v", "21", "--format", "json"});
  auto doc = nlohmann::json::parse(padded.out);
  CHECK(doc["terms"].size() == 2);
}

TEST_CASE("operator cache round trip") {
  auto dir = std::filesystem::temp_directory_path() / "flagmirror-cli-cache-test";
  std::filesystem::remove_all(dir);
  Result a = call({"--cache-dir", dir.string(), "qh-mult", "--n", "6", "--u", "215346", "--v", "132546"});
  CHECK(a.code == 0);
  CHECK(std::filesystem::exists(dir / "monk-n6.txt"));
  Result b = call({"--cache-dir", dir.string(), "qh-mult", "--n", "6", "--u", "215346", "--v", "132546"});
  CHECK(a.out == b.out);
  std::filesystem::remove_all(dir);
}

TEST_CASE("spectra and critical points") {
  Result s = call({"c1-spectrum", "--shape", "1;2", "--q", "4", "--format", "json"});
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out)["schema"] == "flagmirror/c1-spectrum");

  Result c = call({"crit", "--shape", "2;4", "--format", "json", "--seed", "3"});
  CHECK(c.code == 0);
  auto doc = nlohmann::json::parse(c.out);
  CHECK(doc["count"] == 6);
  // Deterministic given flags and seed.
  CHECK(call({"crit", "--shape", "2;4", "--format", "json", "--seed", "3"}).out == c.out);

  Result m = call({"verify-mirror", "--shape", "1,2;4", "--q", "1,1", "--seed", "42"});
  CHECK(m.code == 0);
  CHECK(m.out.rfind("PASS: 1,2;4, 12 pairs", 0) == 0);
  CHECK(m.out.find("  -3  <->  -3\n") != std::string::npos);
}

TEST_CASE("verification subcommands") {
  Result k = call({"verify-identity", "--shape", "2,4;7", "--j", "1", "--i", "4"});
  CHECK(k.code == 0);
  CHECK(k.out.find("3516247 * 1234567 = s[3516247]") != std::string::npos);
  CHECK(call({"verify-identity", "--max-n", "5", "--format", "json"}).code == 0);
  Result d = call({"verify-detformula", "--max-n", "4", "--format", "json"});
  CHECK(d.code == 0);
  CHECK(nlohmann::json::parse(d.out)["total"] == 3);
}

// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rom2l/cli.hpp"
#include "rom2l/errors.hpp"

using namespace rom2l;
using namespace rom2l::cli;

namespace
{

struct Run
{
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  args.insert(args.begin(), "rom2l");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("dimension parsing")
{
  CHECK(parse_pair("16:25") == bench::Triple{16, 25, 25});
  CHECK(parse_triple("20:25:29") == bench::Triple{20, 25, 29});
  CHECK_THROWS_AS(parse_pair("25:16"), UsageError);
  CHECK_THROWS_AS(parse_pair("16"), UsageError);
  CHECK_THROWS_AS(parse_pair("a:b"), UsageError);
  CHECK_THROWS_AS(parse_pair("16:25:29"), UsageError);
  CHECK_THROWS_AS(parse_triple("20:25"), UsageError);
  CHECK_THROWS_AS(parse_triple("29:25:20"), UsageError);
}

TEST_CASE("usage errors exit with code 2")
{
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"exp1", "--pairs", "25:16", "--h", "0.125", "--q-step", "0.5"}).code == kExitUsage);
  CHECK(run({"offline"}).code == kExitUsage);
  CHECK(run({"exp1", "--pairs", "2:4", "--format", "xml"}).code == kExitUsage);
  CHECK(run({"validate", "--basis", "/nonexistent/basis.json"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("offline, validate and experiments")
{
  const auto dir = std::filesystem::temp_directory_path() / "rom2l_test_cli";
  std::filesystem::create_directories(dir);
  const std::string basis = (dir / "basis.json").string();
  const std::vector<std::string> coarse = {"--h", "0.0625", "--q-step", "0.05"};

  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), coarse.begin(), coarse.end());
    return args;
  };

  const Run off = run(with({"offline", "--out", basis, "--rank-tol", "1e-10"}));
  REQUIRE(off.code == kExitOk);
  CHECK(off.out.find("rank:") != std::string::npos);
  CHECK(std::filesystem::exists(basis));
  CHECK(std::filesystem::exists(basis + ".bin"));

  const Run val = run({"validate", "--basis", basis});
  CHECK(val.out.find("PASS pod orthonormality") != std::string::npos);
  CHECK(val.out.find("PASS nested operators") != std::string::npos);
  const Run wrong = run({"validate", "--basis", basis, "--expect-rank", "999"});
  CHECK(wrong.code == kExitFailures);
  CHECK(wrong.out.find("FAIL pod rank") != std::string::npos);

  const std::string csv = (dir / "exp1.csv").string();
  const Run e1 = run({"exp1", "--basis", basis, "--pairs", "4:8,6:10", "--guess", "avg", "--reps",
                      "1", "--sweep-step", "1.0", "--out", csv});
  CHECK(e1.code == kExitOk);
  std::ifstream in(csv);
  int lines = 0;
  for (std::string line; std::getline(in, line);)
  {
    ++lines;
  }
  CHECK(lines == 3);

  const Run e2 = run({"exp2", "--basis", basis, "--triples", "4:8:10", "--reps", "1",
                      "--sweep-step", "1.0", "--format", "json"});
  CHECK(e2.code == kExitOk);
  const auto j = nlohmann::json::parse(e2.out);
  CHECK(j.at("rows").size() == 3);

  const Run too_big = run({"exp1", "--basis", basis, "--pairs", "4:999", "--reps", "1"});
  CHECK(too_big.code == kExitUsage);

  std::filesystem::remove_all(dir);
}

#include "cli.hpp"

#include "mlwb/matching.hpp"
#include "mlwb/problem.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace mlwb;
using namespace mlwb::testing;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run mlwb_run(std::vector<std::string> args) {
  args.insert(args.begin(), "mlwb");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string &name) { return fixture_path(name).string(); }
std::string cat() { return seed_catalog_path().string(); }

void write_text(const std::filesystem::path &p, const std::string &text) {
  std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(mlwb_run({}).code == 2);
  CHECK(mlwb_run({"frobnicate"}).code == 2);
  CHECK(mlwb_run({"rank"}).code == 2);
  CHECK(mlwb_run({"rank", fx("finance_project.json"), "--top", "0", "--catalog", cat()}).code == 2);
  CHECK(mlwb_run({"rank", fx("finance_project.json"), "--format", "yaml", "--catalog", cat()}).code == 2);
  CHECK(mlwb_run({"--version"}).code == 0);
}

TEST_CASE("catalog-validate") {
  auto ok = mlwb_run({"catalog-validate", cat()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok (27 criteria") != std::string::npos);

  auto machine = json::parse(mlwb_run({"catalog-validate", cat(), "--format", "machine"}).out);
  CHECK(machine["valid"] == true);

  TempDir dir("cli-cat");
  json corrupt = json::parse(std::ifstream(seed_catalog_path()));
  corrupt["families"][0]["values"]["noise_tolerance"] = json::array({"Enormous"});
  write_text(dir.path() / "bad.json", corrupt.dump());
  auto bad = mlwb_run({"catalog-validate", (dir.path() / "bad.json").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("families[0].values.noise_tolerance") != std::string::npos);

  CHECK(mlwb_run({"catalog-validate", (dir.path() / "missing.json").string()}).code == 3);
}

TEST_CASE("profile") {
  auto r = mlwb_run({"profile", fx("customers_100.csv"), "--label", "approved"});
  REQUIRE(r.code == 0);
  auto diff = json_diff(json::parse(r.out), read_fixture_json("customers_100.profile.json"), 1e-9);
  CHECK_MESSAGE(!diff, diff.value_or(""));
  CHECK(mlwb_run({"profile", fx("customers_100.csv"), "--label", "approved"}).out == r.out);

  auto table = mlwb_run({"profile", fx("customers_100.csv"), "--format", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("missing         Medium") != std::string::npos);

  CHECK(mlwb_run({"profile", fx("customers_100.csv"), "--label", "nope"}).code == 1);
  TempDir dir("cli-prof");
  write_text(dir.path() / "empty.csv", "");
  CHECK(mlwb_run({"profile", (dir.path() / "empty.csv").string()}).code == 1);
  CHECK(mlwb_run({"profile", (dir.path() / "absent.csv").string()}).code == 3);
  CHECK(mlwb_run({"profile", fx("customers_100.csv"), "--delimiter", "::"}).code == 2);
}

TEST_CASE("rank") {
  auto r = mlwb_run({"rank", fx("finance_project.json"), "--catalog", cat(), "--format", "machine"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["ranking"][0]["familyId"] == "decision_tree");
  // Byte-stable across runs.
  CHECK(mlwb_run({"rank", fx("finance_project.json"), "--catalog", cat(), "--format", "machine"}).out == r.out);

  auto top = json::parse(
      mlwb_run({"rank", fx("finance_project.json"), "--catalog", cat(), "--format", "machine", "--top", "3"}).out);
  CHECK(top["ranking"].size() == 3);
  auto table = mlwb_run({"rank", fx("finance_project.json"), "--catalog", cat(), "--top", "3"});
  CHECK(std::count(table.out.begin(), table.out.end(), '\n') == 4);
  CHECK(table.out.find("decision_tree") != std::string::npos);

  auto none = mlwb_run({"rank", fx("unscorable_project.json"), "--catalog", cat()});
  CHECK(none.code == 1);
  CHECK_FALSE(none.err.empty());

  CHECK(mlwb_run({"rank", "/nonexistent/project.json", "--catalog", cat()}).code == 3);
  CHECK(mlwb_run({"rank", fx("finance_project.json"), "--catalog", "/nonexistent/c.json"}).code == 3);
  CHECK(mlwb_run({"rank", fx("customers_100.csv"), "--catalog", cat()}).code == 1);
}

TEST_CASE("catalog from the environment") {
  setenv("MLWB_CATALOG", cat().c_str(), 1);
  CHECK(mlwb_run({"rank", fx("finance_project.json")}).code == 0);
  setenv("MLWB_CATALOG", "/nonexistent/c.json", 1);
  CHECK(mlwb_run({"rank", fx("finance_project.json")}).code == 3);
  unsetenv("MLWB_CATALOG");
}

TEST_CASE("explain") {
  auto r = mlwb_run({"explain", fx("finance_project.json"), "--family", "deep_convolutional_network",
                     "--catalog", cat(), "--format", "machine"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  double num = 0, den = 0;
  for (const auto &e : j["entries"]) {
    num += e["weight"].get<double>() * e["satisfaction"].get<double>();
    den += e["weight"].get<double>();
  }
  CHECK(j["solves"].get<double>() == doctest::Approx(num / den).epsilon(1e-6));
  CHECK(j["solves"].get<double>() == doctest::Approx(4.0 / 7.0).epsilon(1e-6));

  auto table = mlwb_run({"explain", fx("finance_project.json"), "--family", "deep_convolutional_network",
                         "--catalog", cat()});
  CHECK(table.out.find("= 0.571429") != std::string::npos);

  // Requirements with care Not do not appear.
  auto fraud = json::parse(mlwb_run({"explain", fx("whatif_project.json"), "--family", "decision_tree",
                                     "--catalog", cat(), "--format", "machine"})
                               .out);
  for (const auto &e : fraud["entries"])
    CHECK(e["requirement"] != "explainability");

  CHECK(mlwb_run({"explain", fx("finance_project.json"), "--family", "ghost", "--catalog", cat()}).code == 1);
  CHECK(mlwb_run({"explain", fx("finance_project.json"), "--catalog", cat()}).code == 2);
}

TEST_CASE("whatif") {
  std::string original = read_fixture("whatif_project.json");
  auto r = mlwb_run({"whatif", fx("whatif_project.json"), "--set", "care.explainability=Must",
                     "--catalog", cat(), "--format", "machine"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["before"]["ranking"][0]["familyId"] == "deep_convolutional_network");
  CHECK(j["after"]["ranking"][0]["familyId"] == "decision_tree");

  // The project file itself is untouched.
  CHECK(read_fixture("whatif_project.json") == original);

  auto noop = json::parse(mlwb_run({"whatif", fx("whatif_project.json"), "--set", "care.accuracy=Must",
                                    "--catalog", cat(), "--format", "machine"})
                              .out);
  CHECK(noop["before"] == noop["after"]);

  auto top = mlwb_run({"whatif", fx("whatif_project.json"), "--set", "care.explainability=Must",
                       "--catalog", cat(), "--top", "2"});
  CHECK(std::count(top.out.begin(), top.out.end(), '\n') == 3);

  CHECK(mlwb_run({"whatif", fx("whatif_project.json"), "--set", "colour.explainability=Must",
                  "--catalog", cat()})
            .code == 2);
  CHECK(mlwb_run({"whatif", fx("whatif_project.json"), "--set", "no-equals", "--catalog", cat()}).code == 2);
  CHECK(mlwb_run({"whatif", fx("whatif_project.json"), "--set", "value.accuracy=1.7", "--catalog", cat()})
            .code == 1);
}

TEST_CASE("pipeline") {
  auto xml = mlwb_run({"pipeline", fx("finance_project.json"), "--family", "linear_regression",
                       "--profile", fx("customers_100.profile.json"), "--format", "workflow-xml",
                       "--catalog", cat()});
  REQUIRE(xml.code == 0);
  CHECK(xml.out == read_fixture("linear_regression_chain.bpmn.xml"));

  auto best = mlwb_run({"pipeline", fx("finance_project.json"), "--catalog", cat(), "--format", "machine"});
  REQUIRE(best.code == 0);
  CHECK(json::parse(best.out)["steps"].size() == 5);

  CHECK(mlwb_run({"pipeline", fx("finance_project.json"), "--family", "ghost", "--catalog", cat()}).code == 1);
  CHECK(mlwb_run({"pipeline", fx("finance_project.json"), "--format", "svg", "--catalog", cat()}).code == 2);
}

TEST_CASE("agreement") {
  auto r = mlwb_run({"agreement", fx("expert_rankings.json"), "--catalog", cat(), "--format", "machine"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["comparisons"].size() == 5);
  auto table = mlwb_run({"agreement", fx("expert_rankings.json"), "--catalog", cat()});
  CHECK(table.out.find("0.8944") != std::string::npos);
  CHECK(mlwb_run({"agreement", fx("customers_100.csv"), "--catalog", cat()}).code == 1);
}

TEST_CASE("serve rejects a bad port") {
  CHECK(mlwb_run({"serve", "--port", "70000"}).code == 2);
}

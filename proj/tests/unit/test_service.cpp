#include "mlwb/service.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace mlwb;
using namespace mlwb::testing;
using nlohmann::json;

namespace {

ServiceConfig config_for(const TempDir &dir) {
  ServiceConfig c;
  c.store_dir = dir.path();
  c.seed_catalog = seed_catalog_path();
  return c;
}

HttpResponse call(Service &s, const std::string &method, const std::string &path,
                  const std::string &body = "", std::map<std::string, std::string> query = {}) {
  return s.handle(HttpRequest{method, path, std::move(query), body});
}

json body_of(const HttpResponse &r) { return json::parse(r.body); }

std::string create(Service &s) {
  auto r = call(s, "POST", "/projects", R"({"description": "test"})");
  REQUIRE(r.status == 201);
  return body_of(r)["id"].get<std::string>();
}

// Requirements of the finance fixture, sent as a full replacement.
json finance_requirements(long long revision) {
  json p = read_fixture_json("finance_project.json");
  return json{{"revision", revision},
              {"domainRequirements", p["domainRequirements"]},
              {"dataProperties", p["dataProperties"]}};
}

} // namespace

TEST_CASE("project creation") {
  TempDir dir("svc-create");
  Service s(config_for(dir));
  auto r = call(s, "POST", "/projects", R"({"description": "credit"})");
  CHECK(r.status == 201);
  CHECK(r.content_type == "application/json");
  auto j = body_of(r);
  CHECK_FALSE(j["id"].get<std::string>().empty());
  CHECK(j["revision"] == 1);

  auto empty = call(s, "POST", "/projects");
  CHECK(empty.status == 201);
  auto id = body_of(empty)["id"].get<std::string>();
  CHECK(body_of(call(s, "GET", "/projects/" + id))["project"]["description"] == "");

  CHECK(call(s, "POST", "/projects", "{nope").status == 400);
  CHECK(call(s, "POST", "/projects", "[1]").status == 400);
  CHECK(call(s, "POST", "/projects", R"({"description": 3})").status == 400);

  auto list = body_of(call(s, "GET", "/projects"))["projects"];
  CHECK(list.size() == 2);
}

TEST_CASE("requirements replace with a revision precondition") {
  TempDir dir("svc-req");
  Service s(config_for(dir));
  std::string id = create(s);
  std::string path = "/projects/" + id + "/requirements";

  auto ok = call(s, "PUT", path, finance_requirements(1).dump());
  REQUIRE(ok.status == 200);
  CHECK(body_of(ok)["revision"] == 2);
  std::string stored = call(s, "GET", "/projects/" + id).body;

  SUBCASE("stale revision leaves state alone") {
    auto stale = call(s, "PUT", path, finance_requirements(1).dump());
    CHECK(stale.status == 409);
    CHECK(body_of(stale)["currentRevision"] == 2);
    CHECK(call(s, "GET", "/projects/" + id).body == stored);
  }
  SUBCASE("out of range value names the field") {
    json bad = finance_requirements(2);
    bad["domainRequirements"][1]["value"] = 1.5;
    auto r = call(s, "PUT", path, bad.dump());
    CHECK(r.status == 422);
    CHECK(body_of(r)["field"] == "domainRequirements.accuracy.value");
    CHECK(call(s, "GET", "/projects/" + id).body == stored);
  }
  SUBCASE("malformed bodies") {
    CHECK(call(s, "PUT", path, R"({"domainRequirements": []})").status == 400);
    CHECK(call(s, "PUT", path, R"({"revision": 2})").status == 400);
    CHECK(call(s, "PUT", path, "").status == 400);
  }
  SUBCASE("unknown project") {
    CHECK(call(s, "PUT", "/projects/ghost/requirements", finance_requirements(1).dump()).status == 404);
  }
}

TEST_CASE("dataset upload") {
  TempDir dir("svc-data");
  ServiceConfig cfg = config_for(dir);
  cfg.max_upload_bytes = 64 * 1024;
  Service s(cfg);
  std::string id = create(s);
  std::string path = "/projects/" + id + "/dataset";

  auto r = call(s, "POST", path, read_fixture("customers_100.csv"), {{"label", "approved"}});
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j["revision"] == 2);
  auto diff = json_diff(j["profile"], read_fixture_json("customers_100.profile.json"), 1e-9);
  CHECK_MESSAGE(!diff, diff.value_or(""));

  // The profile lands in the stored project as measured properties.
  auto stored = body_of(call(s, "GET", "/projects/" + id));
  bool has_missing = false;
  for (const auto &p : stored["project"]["dataProperties"])
    has_missing |= p["type"] == "missing_values" && p["value"] == "Medium";
  CHECK(has_missing);

  CHECK(call(s, "POST", path, "a,b\n1,2\n3\n").status == 422);
  CHECK(call(s, "POST", path, std::string(64 * 1024 + 1, 'x')).status == 413);
  CHECK(call(s, "POST", path, "a,b\n1,2\n", {{"revision", "1"}}).status == 409);
  CHECK(call(s, "POST", path, "a,b\n1,2\n", {{"delimiter", ";;"}}).status == 400);
  CHECK(call(s, "POST", "/projects/ghost/dataset", "a\n1\n").status == 404);
}

TEST_CASE("ranking") {
  TempDir dir("svc-rank");
  Service s(config_for(dir));
  std::string id = create(s);
  REQUIRE(call(s, "PUT", "/projects/" + id + "/requirements", finance_requirements(1).dump()).status == 200);

  auto r = call(s, "GET", "/projects/" + id + "/ranking");
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j["ranking"][0]["familyId"] == "decision_tree");
  CHECK(j["ranking"][0]["solves"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["projectId"] == id);
  CHECK(call(s, "GET", "/projects/" + id + "/ranking").body == r.body);

  auto top = body_of(call(s, "GET", "/projects/" + id + "/ranking", "", {{"top", "3"}}));
  CHECK(top["ranking"].size() == 3);
  CHECK(call(s, "GET", "/projects/" + id + "/ranking", "", {{"top", "0"}}).status == 400);
  CHECK(call(s, "GET", "/projects/" + id + "/ranking", "", {{"top", "x"}}).status == 400);
  CHECK(call(s, "GET", "/projects/ghost/ranking").status == 404);

  json none = read_fixture_json("unscorable_project.json");
  REQUIRE(call(s, "PUT", "/projects/" + id + "/requirements",
               json{{"revision", 2},
                    {"domainRequirements", none["domainRequirements"]},
                    {"dataProperties", none["dataProperties"]}}
                   .dump())
              .status == 200);
  auto unscorable = call(s, "GET", "/projects/" + id + "/ranking");
  CHECK(unscorable.status == 422);
  CHECK_FALSE(body_of(unscorable)["error"].get<std::string>().empty());
}

TEST_CASE("what-if never persists") {
  TempDir dir("svc-whatif");
  Service s(config_for(dir));
  std::string id = create(s);
  json p = read_fixture_json("whatif_project.json");
  REQUIRE(call(s, "PUT", "/projects/" + id + "/requirements",
               json{{"revision", 1},
                    {"domainRequirements", p["domainRequirements"]},
                    {"dataProperties", p["dataProperties"]}}
                   .dump())
              .status == 200);
  std::string before = call(s, "GET", "/projects/" + id).body;
  std::string path = "/projects/" + id + "/whatif";

  auto r = call(s, "POST", path, R"({"overrides": {"care.explainability": "Must"}})");
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j["before"]["ranking"][0]["familyId"] != "decision_tree");
  CHECK(j["after"]["ranking"][0]["familyId"] == "decision_tree");
  CHECK(call(s, "GET", "/projects/" + id).body == before);

  auto listed = call(s, "POST", path, R"({"overrides": [{"key": "care.explainability", "value": "Must"}]})");
  CHECK(body_of(listed)["after"] == j["after"]);

  auto noop = body_of(call(s, "POST", path, R"({"overrides": {}})"));
  CHECK(noop["before"] == noop["after"]);

  CHECK(call(s, "POST", path, R"({"overrides": {"colour.explainability": "Must"}})").status == 400);
  CHECK(call(s, "POST", path, R"({})").status == 400);
  CHECK(call(s, "POST", path, R"({"overrides": 3})").status == 400);
  CHECK(call(s, "POST", path, R"({"overrides": {"care.explainability": "Maybe"}})").status == 422);

  // Two what-ifs at once on one project.
  HttpResponse a, b;
  std::thread t1([&] { a = call(s, "POST", path, R"({"overrides": {"care.explainability": "Must"}})"); });
  std::thread t2([&] { b = call(s, "POST", path, R"({"overrides": {"care.accuracy": "Could"}})"); });
  t1.join();
  t2.join();
  CHECK(a.status == 200);
  CHECK(b.status == 200);
  CHECK(a.body == r.body);
  CHECK(call(s, "GET", "/projects/" + id).body == before);
}

TEST_CASE("pipeline endpoint") {
  TempDir dir("svc-pipe");
  Service s(config_for(dir));
  std::string id = create(s);
  REQUIRE(call(s, "PUT", "/projects/" + id + "/requirements", finance_requirements(1).dump()).status == 200);
  std::string path = "/projects/" + id + "/pipeline";

  auto best = call(s, "GET", path);
  REQUIRE(best.status == 200);
  auto chain = body_of(best);
  bool bound = false;
  for (const auto &step : chain["steps"])
    bound |= step.value("boundFamilyId", "") == "decision_tree";
  CHECK(bound);

  auto xml = call(s, "GET", path, "", {{"family", "linear_regression"}, {"format", "workflow-xml"}});
  CHECK(xml.status == 200);
  CHECK(xml.content_type == "application/xml");
  CHECK(xml.body.find("<bpmn:definitions") != std::string::npos);

  CHECK(call(s, "GET", path, "", {{"format", "yaml"}}).status == 400);
  CHECK(call(s, "GET", path, "", {{"family", "ghost"}}).status == 404);
}

TEST_CASE("catalog endpoints") {
  TempDir dir("svc-cat");
  Service s(config_for(dir));
  auto cat = body_of(call(s, "GET", "/catalog"));
  CHECK(cat["revision"] == 1);
  auto families = body_of(call(s, "GET", "/catalog/families"));
  CHECK(families["families"].size() == seed_catalog().families.size());

  json dt = body_of(call(s, "GET", "/catalog/families/decision_tree"))["family"];
  CHECK(call(s, "GET", "/catalog/families/ghost").status == 404);

  json changed = dt;
  changed["values"]["noise_tolerance"] = json::array({"High"});
  auto put = call(s, "PUT", "/catalog/families/decision_tree", changed.dump(), {{"revision", "1"}});
  REQUIRE(put.status == 200);
  CHECK(body_of(put)["revision"] == 2);
  auto back = body_of(call(s, "GET", "/catalog/families/decision_tree"));
  CHECK(back["family"] == changed);
  CHECK(back["revision"] == 2);

  CHECK(call(s, "PUT", "/catalog/families/decision_tree", changed.dump(), {{"revision", "1"}}).status == 409);

  json bad = dt;
  bad["values"]["noise_tolerance"] = json::array({"Enormous"});
  auto rejected = call(s, "PUT", "/catalog/families/decision_tree", bad.dump());
  CHECK(rejected.status == 422);
  CHECK_FALSE(body_of(rejected)["violations"].empty());
  CHECK(body_of(call(s, "GET", "/catalog"))["revision"] == 2);

  CHECK(call(s, "PUT", "/catalog/families/other", changed.dump()).status == 422);

  json added = dt;
  added["id"] = "pruned_tree";
  CHECK(call(s, "PUT", "/catalog/families/pruned_tree", added.dump()).status == 200);
  CHECK(body_of(call(s, "GET", "/catalog/families"))["families"].size() ==
        seed_catalog().families.size() + 1);
}

TEST_CASE("routing and headers") {
  TempDir dir("svc-route");
  Service s(config_for(dir));
  CHECK(call(s, "GET", "/health").status == 200);
  CHECK(call(s, "GET", "/nowhere").status == 404);
  CHECK(call(s, "DELETE", "/projects").status == 404);
  CHECK(call(s, "GET", "/projects/ghost").status == 404);
  auto opt = call(s, "OPTIONS", "/projects");
  CHECK(opt.status == 204);
  CHECK(opt.headers.at("Access-Control-Allow-Origin") == "*");

  TempDir dir2("svc-nocors");
  ServiceConfig cfg = config_for(dir2);
  cfg.cors_origin.clear();
  Service quiet(cfg);
  CHECK(call(quiet, "GET", "/health").headers.count("Access-Control-Allow-Origin") == 0);
}

TEST_CASE("restart reproduces every GET") {
  TempDir dir("svc-durable");
  std::string id;
  std::map<std::string, std::string> seen;
  const std::vector<std::string> paths_after = {"/ranking", "/pipeline", ""};
  {
    Service s(config_for(dir));
    id = create(s);
    REQUIRE(call(s, "PUT", "/projects/" + id + "/requirements", finance_requirements(1).dump()).status == 200);
    REQUIRE(call(s, "POST", "/projects/" + id + "/dataset", read_fixture("customers_100.csv"),
                 {{"label", "approved"}})
                .status == 200);
    for (const auto &suffix : paths_after)
      seen["/projects/" + id + suffix] = call(s, "GET", "/projects/" + id + suffix).body;
    seen["/catalog"] = call(s, "GET", "/catalog").body;
    seen["/projects"] = call(s, "GET", "/projects").body;
  }
  // The new instance ignores the seed catalog and reads the stored one.
  ServiceConfig cfg = config_for(dir);
  cfg.seed_catalog.reset();
  Service again(cfg);
  for (const auto &[path, body] : seen) {
    CAPTURE(path);
    auto r = call(again, "GET", path);
    CHECK(r.status == 200);
    CHECK(r.body == body);
  }
  CHECK_FALSE(body_of(call(again, "GET", "/projects/" + id + "/ranking"))["ranking"].empty());
  // No temporary files left behind.
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir.path()))
    CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("live HTTP round trip") {
  TempDir dir("svc-live");
  Service s(config_for(dir));
  HttpServer server(s);
  int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/projects", R"({"description": "live"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  std::string id = json::parse(created->body)["id"];

  auto put = client.Put("/projects/" + id + "/requirements", finance_requirements(1).dump(),
                        "application/json");
  REQUIRE(put);
  CHECK(put->status == 200);

  auto ranking = client.Get("/projects/" + id + "/ranking?top=2");
  REQUIRE(ranking);
  CHECK(ranking->status == 200);
  CHECK(ranking->get_header_value("Content-Type").rfind("application/json", 0) == 0);
  auto j = json::parse(ranking->body);
  CHECK(j["ranking"].size() == 2);
  CHECK(ranking->body == s.handle({"GET", "/projects/" + id + "/ranking", {{"top", "2"}}, ""}).body);

  auto missing = client.Get("/projects/ghost/ranking");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  server.stop();
}

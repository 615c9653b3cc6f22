#include "mlwb/catalog.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mlwb;
using mlwb::testing::seed_catalog;
using nlohmann::json;

namespace {

bool has_violation_at(const std::vector<Violation> &vs, const std::string &location_prefix) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation &v) {
    return v.location.rfind(location_prefix, 0) == 0;
  });
}

json seed_json() { return catalog_to_json(seed_catalog()); }

} // namespace

TEST_CASE("standard vocabulary has 27 criteria with the published grades") {
  const auto &cs = standard_criteria();
  REQUIRE(cs.size() == 27);

  // Grade column of the criteria table, in table order.
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"training_type", "A"},
      {"explainability", "A"},
      {"interpretability", "A-B"},
      {"input_order_sensitivity", "A-B"},
      {"accuracy", "B"},
      {"correlated_attributes_tolerance", "B"},
      {"overfitting_resilience", "B"},
      {"imbalance_tolerance", "B"},
      {"hyperparameter_ease", "B"},
      {"training_complexity", "B"},
      {"multiple_classes", "B"},
      {"volume_for_convergence", "B"},
      {"high_dimensionality", "B-C"},
      {"missing_values_tolerance", "B-C"},
      {"incrementality", "C"},
      {"transparency", "C"},
      {"noise_tolerance", "C"},
      {"dependency_reliance", "C"},
      {"complex_data", "C"},
      {"biased_distribution_tolerance", "C"},
      {"decision_complexity", "C"},
      {"memory_requirements", "C"},
      {"parallelism", "C"},
  };
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(expected[i].first);
    CHECK(cs[i].id == expected[i].first);
    CHECK(grade_label(cs[i].grade) == expected[i].second);
  }
  CHECK(find_standard_criterion("attribute_types")->grade == Grade::D);
  CHECK(find_standard_criterion("evolutivity")->grade == Grade::D);
  CHECK(find_standard_criterion("parallelism")->allowed_values ==
        std::vector<std::string>{"None", "Partial", "High"});
  CHECK(find_standard_criterion("noise_tolerance")->allowed_values ==
        std::vector<std::string>{"Low", "Medium", "High"});
}

TEST_CASE("grade labels and weights") {
  for (Grade g : kAllGrades)
    CHECK(parse_grade(grade_label(g)) == g);
  CHECK_FALSE(parse_grade("E").has_value());
  CHECK(grade_weight(Grade::A) == 8);
  CHECK(grade_weight(Grade::AB) == 6);
  CHECK(grade_weight(Grade::B) == 4);
  CHECK(grade_weight(Grade::BC) == 3);
  CHECK(grade_weight(Grade::C) == 2);
  CHECK(grade_weight(Grade::D) == 1);
}

TEST_CASE("accuracy buckets map to representative values") {
  CHECK(accuracy_bucket_value("<=80%") == 0.75);
  CHECK(accuracy_bucket_value("[80%,90%]") == 0.85);
  CHECK(accuracy_bucket_value(">=90%") == 0.95);
  CHECK_FALSE(accuracy_bucket_value("90%").has_value());
}

TEST_CASE("shipped seed catalog validates") {
  const Catalog &c = seed_catalog();
  CHECK(c.criteria.size() == 27);
  CHECK(c.families.size() >= 10);
  CHECK(validate_catalog(c).empty());
  REQUIRE(c.find_family("decision_tree"));
  CHECK(*c.find_family("decision_tree")->find("explainability") ==
        CriterionValueSet{"Explainable"});
}

TEST_CASE("serialize then load is the identity") {
  const Catalog &c = seed_catalog();
  Catalog back = load_catalog(serialize_catalog(c));
  CHECK(back == c);
  CHECK(serialize_catalog(back) == serialize_catalog(c));
}

TEST_CASE("empty catalog is valid") {
  Catalog c = make_empty_catalog();
  CHECK(validate_catalog(c).empty());
  CHECK(load_catalog(serialize_catalog(c)).families.empty());
}

TEST_CASE("corrupt catalogs are rejected with a location") {
  SUBCASE("value outside range") {
    json j = seed_json();
    j["families"][0]["values"]["noise_tolerance"] = json::array({"Very High"});
    try {
      load_catalog(j.dump());
      FAIL("expected CatalogError");
    } catch (const CatalogError &e) {
      CHECK(has_violation_at(e.violations(), "families[0].values.noise_tolerance"));
    }
  }
  SUBCASE("unknown criterion") {
    json j = seed_json();
    j["families"][1]["values"]["telepathy"] = "High";
    try {
      load_catalog(j.dump());
      FAIL("expected CatalogError");
    } catch (const CatalogError &e) {
      CHECK(has_violation_at(e.violations(), "families[1].values.telepathy"));
    }
  }
  SUBCASE("missing required criterion") {
    json j = seed_json();
    j["families"][2]["values"].erase("accuracy");
    try {
      load_catalog(j.dump());
      FAIL("expected CatalogError");
    } catch (const CatalogError &e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].location == "families[2]");
      CHECK(e.violations()[0].message.find("accuracy") != std::string::npos);
    }
  }
  SUBCASE("duplicate family id") {
    json j = seed_json();
    j["families"].push_back(j["families"][0]);
    try {
      load_catalog(j.dump());
      FAIL("expected CatalogError");
    } catch (const CatalogError &e) {
      CHECK(has_violation_at(e.violations(), "families[" +
                                                 std::to_string(j["families"].size() - 1) +
                                                 "].id"));
    }
  }
  SUBCASE("changed grade") {
    json j = seed_json();
    j["criteria"][0]["grade"] = "B";
    try {
      load_catalog(j.dump());
      FAIL("expected CatalogError");
    } catch (const CatalogError &e) {
      CHECK(has_violation_at(e.violations(), "criteria[0].grade"));
    }
  }
  SUBCASE("missing criterion definition") {
    json j = seed_json();
    j["criteria"].erase(j["criteria"].begin() + 5);
    CHECK_THROWS_AS(load_catalog(j.dump()), CatalogError);
  }
  SUBCASE("duplicate value in a set") {
    json j = seed_json();
    j["families"][0]["values"]["training_type"] = json::array({"Supervised", "Supervised"});
    CHECK_THROWS_AS(load_catalog(j.dump()), CatalogError);
  }
  SUBCASE("syntax error") {
    CHECK_THROWS_AS(load_catalog(std::string_view("{\"schemaVersion\": 1,")), CatalogError);
  }
  SUBCASE("wrong schema version") {
    json j = seed_json();
    j["schemaVersion"] = 7;
    CHECK_THROWS_AS(load_catalog(j.dump()), CatalogError);
  }
}

TEST_CASE("validate_family reports every problem") {
  const Catalog &c = seed_catalog();
  AlgorithmFamilyProfile f = *c.find_family("decision_tree");
  CHECK(validate_family(c, f, "f").empty());
  f.values["parallelism"] = {"Full"};
  f.values["evolutivity"] = {};
  auto vs = validate_family(c, f, "f");
  CHECK(vs.size() == 2);
  CHECK(has_violation_at(vs, "f.values.parallelism"));
  CHECK(has_violation_at(vs, "f.values.evolutivity"));
}

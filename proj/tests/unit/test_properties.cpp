#include "mlwb/matching.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mlwb;
using namespace mlwb::testing;

namespace {

constexpr int kCases = 1200;
constexpr double kOracleTol = 1e-12;

struct Instance {
  Catalog catalog;
  MLProblem problem;
};

Instance random_instance(Rng &rng) {
  int n = std::uniform_int_distribution<int>(1, 8)(rng);
  return {random_catalog(rng, n), random_problem(rng)};
}

std::vector<std::string> order_of(const Ranking &r) {
  std::vector<std::string> ids;
  for (const auto &b : r.ranked)
    ids.push_back(b.family_id);
  return ids;
}

} // namespace

TEST_CASE("solves and every satisfaction lie in [0, 1]") {
  Rng rng(101);
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    for (const auto &f : c.families) {
      auto b = solves(f, p, c);
      CHECK(b.solves >= 0.0);
      CHECK(b.solves <= 1.0);
      for (const auto &e : b.entries) {
        CHECK(e.satisfaction >= 0.0);
        CHECK(e.satisfaction <= 1.0);
        CHECK(e.weight > 0.0);
      }
    }
  }
}

TEST_CASE("engine equals the oracle on random instances") {
  Rng rng(202);
  int compared = 0;
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    for (const auto &f : c.families) {
      double engine = solves(f, p, c).solves;
      double expected = oracle::oracle_solves(f, p, c, {});
      CHECK(std::fabs(engine - expected) <= kOracleTol);
      ++compared;
    }
  }
  CHECK(compared >= kCases);
}

TEST_CASE("scaling every grade weight leaves solves unchanged") {
  Rng rng(303);
  EngineConfig base;
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    const auto &f = c.families.front();
    double s = solves(f, p, c, base).solves;
    for (double k : {0.5, 2.0, 10.0})
      CHECK(solves(f, p, c, base.scaled(k)).solves == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("raising one satisfaction never lowers the aggregate") {
  Rng rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    auto b = solves(c.families.front(), p, c);
    double before = aggregate(b.entries);
    auto raised = b.entries;
    auto &e = raised[std::uniform_int_distribution<std::size_t>(0, raised.size() - 1)(rng)];
    e.satisfaction += (1.0 - e.satisfaction) * unit(rng);
    CHECK(aggregate(raised) >= before - 1e-15);
  }
}

TEST_CASE("adding a value to a family criterion never lowers solves") {
  // Multi-valued sets resolve to the most favorable member, so a superset
  // can only help.
  Rng rng(505);
  const auto &criteria = standard_criteria();
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    auto &f = c.families.front();
    double before = solves(f, p, c).solves;
    const auto &crit = criteria[std::uniform_int_distribution<std::size_t>(0, criteria.size() - 1)(rng)];
    auto &values = f.values[crit.id];
    for (const auto &v : crit.allowed_values) {
      if (std::find(values.begin(), values.end(), v) == values.end()) {
        values.push_back(v);
        break;
      }
    }
    CHECK(solves(f, p, c).solves >= before - 1e-15);
  }
}

TEST_CASE("care Not is the same as leaving the requirement out") {
  Rng rng(606);
  int checked = 0;
  for (int i = 0; i < kCases; ++i) {
    auto [c, p] = random_instance(rng);
    if (p.domain_requirements.empty())
      continue;
    auto idx = std::uniform_int_distribution<std::size_t>(0, p.domain_requirements.size() - 1)(rng);
    MLProblem silenced = p;
    silenced.domain_requirements[idx].care = Care::Not;
    MLProblem removed = remove_requirement(p, p.domain_requirements[idx].type);
    const auto &f = c.families.front();
    auto a = solves(f, silenced, c);
    auto b = solves(f, removed, c);
    CHECK(a.solves == b.solves);
    CHECK(a.entries.size() == b.entries.size());
    ++checked;
  }
  CHECK(checked > kCases / 2);
}

TEST_CASE("ranking order does not depend on catalog order") {
  Rng rng(707);
  for (int i = 0; i < kCases / 4; ++i) {
    auto [c, p] = random_instance(rng);
    auto expected = order_of(rank_families(p, c));
    for (int round = 0; round < 3; ++round) {
      Catalog shuffled = c;
      std::shuffle(shuffled.families.begin(), shuffled.families.end(), rng);
      CHECK(order_of(rank_families(p, shuffled)) == expected);
    }
  }
}

TEST_CASE("ranking is sorted with ties by id") {
  Rng rng(808);
  for (int i = 0; i < kCases / 4; ++i) {
    auto [c, p] = random_instance(rng);
    auto r = rank_families(p, c);
    for (std::size_t k = 1; k < r.ranked.size(); ++k) {
      const auto &a = r.ranked[k - 1], &b = r.ranked[k];
      CHECK((a.solves > b.solves || (a.solves == b.solves && a.family_id < b.family_id)));
    }
  }
}

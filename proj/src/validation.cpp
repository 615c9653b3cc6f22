#include "mlwb/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>

namespace mlwb {

using nlohmann::json;

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ValidationError("rankings have different lengths");
  if (x.size() < 2)
    throw ValidationError("rank correlation needs at least two items");
}

// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
      ++j;
    double r = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      out[idx[k]] = r;
    i = j + 1;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>>
positions(const std::vector<std::string> &r1, const std::vector<std::string> &r2) {
  std::set<std::string> s1(r1.begin(), r1.end()), s2(r2.begin(), r2.end());
  if (s1.size() != r1.size() || s2.size() != r2.size())
    throw ValidationError("ranking lists must not repeat items");
  if (s1 != s2)
    throw ValidationError("rankings must cover the same items");
  std::unordered_map<std::string, double> pos2;
  for (std::size_t i = 0; i < r2.size(); ++i)
    pos2[r2[i]] = static_cast<double>(i);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    x.push_back(static_cast<double>(i));
    y.push_back(pos2.at(r1[i]));
  }
  return {x, y};
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

} // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int dx = sign(x[i] - x[j]), dy = sign(y[i] - y[j]);
      if (dx == 0)
        ++ties_x;
      if (dy == 0)
        ++ties_y;
      if (dx != 0 && dy != 0)
        (dx == dy ? concordant : discordant) += 1;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double den = std::sqrt((pairs - static_cast<double>(ties_x)) *
                               (pairs - static_cast<double>(ties_y)));
  if (!(den > 0.0))
    throw ValidationError("tau-b is undefined for a constant ranking");
  return static_cast<double>(concordant - discordant) / den;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (!(sxx > 0.0 && syy > 0.0))
    throw ValidationError("rho is undefined for a constant ranking");
  return sxy / std::sqrt(sxx * syy);
}

double kendall_tau_b(const std::vector<std::string> &r1, const std::vector<std::string> &r2) {
  auto [x, y] = positions(r1, r2);
  return kendall_tau_b(std::span<const double>(x), std::span<const double>(y));
}

double spearman_rho(const std::vector<std::string> &r1, const std::vector<std::string> &r2) {
  auto [x, y] = positions(r1, r2);
  return spearman_rho(std::span<const double>(x), std::span<const double>(y));
}

void check_expert_ranking(const ExpertRanking &r, const Catalog &catalog) {
  std::string who = "ranking of '" + r.rater_id + "' for '" + r.problem_id + "'";
  if (r.ranked_family_ids.empty())
    throw ValidationError(who + " is empty");
  if (r.ranked_family_ids.size() > kMaxExpertListLength)
    throw ValidationError(who + " lists more than " + std::to_string(kMaxExpertListLength) +
                          " families");
  std::set<std::string> seen;
  for (const auto &id : r.ranked_family_ids) {
    if (!seen.insert(id).second)
      throw ValidationError(who + " repeats family '" + id + "'");
    if (catalog.find_family(id) == nullptr)
      throw ValidationError(who + " names unknown family '" + id + "'");
  }
}

ExpertComparison compare_to_expert(const MLProblem &pb, const ExpertRanking &expert,
                                   const Catalog &catalog, const EngineConfig &cfg) {
  check_expert_ranking(expert, catalog);
  Ranking engine = rank_families(pb, catalog, cfg);

  std::unordered_map<std::string, double> solves_of;
  std::vector<std::string> engine_order_all;
  for (const auto &b : engine.ranked) {
    solves_of[b.family_id] = b.solves;
    engine_order_all.push_back(b.family_id);
  }

  ExpertComparison out;
  out.problem_id = expert.problem_id;
  out.rater_id = expert.rater_id;
  for (const auto &id : expert.ranked_family_ids) {
    if (solves_of.count(id))
      out.expert_order.push_back(id);
  }
  if (out.expert_order.size() < 2)
    throw ValidationError("fewer than two of the expert's families were scored for '" +
                          expert.problem_id + "'");
  for (const auto &id : engine_order_all) {
    if (std::find(out.expert_order.begin(), out.expert_order.end(), id) !=
        out.expert_order.end())
      out.engine_order.push_back(id);
  }

  // Expert position vs negated engine score: both "smaller is better".
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.expert_order.size(); ++i) {
    x.push_back(static_cast<double>(i));
    y.push_back(-solves_of.at(out.expert_order[i]));
  }
  out.tau_b = kendall_tau_b(std::span<const double>(x), std::span<const double>(y));
  out.spearman = spearman_rho(std::span<const double>(x), std::span<const double>(y));
  return out;
}

json expert_fixture_to_json(const ExpertFixture &f) {
  json problems = json::array();
  for (const auto &p : f.problems)
    problems.push_back(project_to_json(p));
  json rankings = json::array();
  for (const auto &r : f.rankings) {
    rankings.push_back({{"problemId", r.problem_id},
                        {"raterId", r.rater_id},
                        {"rankedFamilyIds", r.ranked_family_ids}});
  }
  return json{{"schemaVersion", kExpertFixtureSchemaVersion},
              {"problems", problems},
              {"rankings", rankings}};
}

ExpertFixture expert_fixture_from_json(const json &j) {
  ExpertFixture f;
  try {
    if (j.at("schemaVersion").get<int>() != kExpertFixtureSchemaVersion)
      throw ValidationError("unsupported expert fixture schema version");
    for (const auto &p : j.at("problems"))
      f.problems.push_back(project_from_json(p));
    for (const auto &r : j.at("rankings")) {
      f.rankings.push_back({r.at("problemId").get<std::string>(),
                            r.at("raterId").get<std::string>(),
                            r.at("rankedFamilyIds").get<std::vector<std::string>>()});
    }
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed expert fixture: ") + e.what());
  }
  return f;
}

AgreementReport agreement_report(const ExpertFixture &fixture, const Catalog &catalog,
                                 const EngineConfig &cfg) {
  AgreementReport rep;
  std::map<std::string, std::vector<double>> per_problem;
  std::map<std::string, std::vector<const ExpertRanking *>> by_problem;

  for (const auto &r : fixture.rankings) {
    auto it = std::find_if(fixture.problems.begin(), fixture.problems.end(),
                           [&](const MLProblem &p) { return p.id == r.problem_id; });
    if (it == fixture.problems.end()) {
      rep.diagnostics.push_back("rater '" + r.rater_id + "': unknown problem '" +
                                r.problem_id + "'");
      continue;
    }
    by_problem[r.problem_id].push_back(&r);
    try {
      auto c = compare_to_expert(*it, r, catalog, cfg);
      per_problem[r.problem_id].push_back(c.tau_b);
      rep.comparisons.push_back(std::move(c));
    } catch (const std::exception &e) {
      rep.diagnostics.push_back("rater '" + r.rater_id + "' on '" + r.problem_id +
                                "': " + e.what());
    }
  }
  for (const auto &[pid, taus] : per_problem)
    rep.mean_tau_b[pid] = std::accumulate(taus.begin(), taus.end(), 0.0) /
                          static_cast<double>(taus.size());

  for (const auto &[pid, rankings] : by_problem) {
    InterRater ir;
    ir.problem_id = pid;
    for (const auto *r : rankings)
      ir.raters.push_back(r->rater_id);
    ir.tau_b.assign(rankings.size(), std::vector<std::optional<double>>(rankings.size()));
    for (std::size_t a = 0; a < rankings.size(); ++a) {
      for (std::size_t b = 0; b < rankings.size(); ++b) {
        std::vector<std::string> common_a, common_b;
        const auto &la = rankings[a]->ranked_family_ids;
        const auto &lb = rankings[b]->ranked_family_ids;
        for (const auto &id : la) {
          if (std::find(lb.begin(), lb.end(), id) != lb.end())
            common_a.push_back(id);
        }
        for (const auto &id : lb) {
          if (std::find(la.begin(), la.end(), id) != la.end())
            common_b.push_back(id);
        }
        if (common_a.size() >= 2)
          ir.tau_b[a][b] = kendall_tau_b(common_a, common_b);
      }
    }
    rep.inter_rater.push_back(std::move(ir));
  }
  return rep;
}

json agreement_to_json(const AgreementReport &r) {
  json comparisons = json::array();
  for (const auto &c : r.comparisons) {
    comparisons.push_back({{"problemId", c.problem_id},
                           {"raterId", c.rater_id},
                           {"expertOrder", c.expert_order},
                           {"engineOrder", c.engine_order},
                           {"tauB", round6(c.tau_b)},
                           {"spearman", round6(c.spearman)}});
  }
  json means = json::object();
  for (const auto &[pid, m] : r.mean_tau_b)
    means[pid] = round6(m);
  json inter = json::array();
  for (const auto &ir : r.inter_rater) {
    json matrix = json::array();
    for (const auto &row : ir.tau_b) {
      json jr = json::array();
      for (const auto &v : row)
        jr.push_back(v ? json(round6(*v)) : json(nullptr));
      matrix.push_back(std::move(jr));
    }
    inter.push_back({{"problemId", ir.problem_id}, {"raters", ir.raters}, {"tauB", matrix}});
  }
  return json{{"comparisons", comparisons},
              {"meanTauB", means},
              {"interRater", inter},
              {"diagnostics", r.diagnostics}};
}

std::string format_agreement_table(const AgreementReport &r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-16s %5s %8s %8s\n", "problem", "rater", "n",
                "tau-b", "rho");
  out += line;
  for (const auto &c : r.comparisons) {
    std::snprintf(line, sizeof line, "%-24s %-16s %5zu %8.4f %8.4f\n", c.problem_id.c_str(),
                  c.rater_id.c_str(), c.expert_order.size(), c.tau_b, c.spearman);
    out += line;
  }
  for (const auto &[pid, m] : r.mean_tau_b)
    out += "mean tau-b " + pid + ": " + fmt("%.4f", m) + "\n";
  for (const auto &d : r.diagnostics)
    out += "note: " + d + "\n";
  return out;
}

} // namespace mlwb

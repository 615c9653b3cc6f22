#include "cli.hpp"

#include "mlwb/catalog.hpp"
#include "mlwb/matching.hpp"
#include "mlwb/pipeline.hpp"
#include "mlwb/problem.hpp"
#include "mlwb/profiler.hpp"
#include "mlwb/service.hpp"
#include "mlwb/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifndef MLWB_DEFAULT_CATALOG
#define MLWB_DEFAULT_CATALOG "data/catalog.json"
#endif

namespace mlwb::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("cannot read '" + path + "'");
  return ss.str();
}

std::string catalog_path(const std::string &flag) {
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("MLWB_CATALOG"); env != nullptr && *env != '\0')
    return env;
  return MLWB_DEFAULT_CATALOG;
}

Catalog read_catalog(const std::string &flag) {
  return load_catalog(std::string_view(read_file(catalog_path(flag))));
}

MLProblem read_project(const std::string &path) { return deserialize_project(read_file(path)); }

std::string fixed(double v, int places = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width)
    s.append(width - s.size(), ' ');
  return s;
}

void print_ranking_table(std::ostream &out, const Ranking &r, std::optional<std::size_t> top) {
  std::size_t n = top ? std::min(*top, r.ranked.size()) : r.ranked.size();
  out << pad("rank", 6) << pad("family", 32) << "solves\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << pad(std::to_string(i + 1), 6) << pad(r.ranked[i].family_id, 32)
        << fixed(r.ranked[i].solves) << "\n";
  }
}

void print_diagnostics(std::ostream &err, const Ranking &r) {
  for (const auto &d : r.diagnostics)
    err << "warning: " << d.family_id << ": " << d.message << "\n";
}

void print_breakdown_table(std::ostream &out, const SatisfactionBreakdown &b) {
  out << "family " << b.family_id << "\n";
  out << pad("requirement", 20) << pad("satisfaction", 14) << pad("weight", 12)
      << pad("weighted", 12) << "note\n";
  double num = 0.0, den = 0.0;
  for (const auto &e : b.entries) {
    out << pad(e.requirement, 20) << pad(fixed(e.satisfaction), 14) << pad(fixed(e.weight), 12)
        << pad(fixed(e.weight * e.satisfaction), 12) << e.note << "\n";
    if (e.weight > 0.0) {
      num += e.weight * e.satisfaction;
      den += e.weight;
    }
  }
  out << "solves = " << fixed(num) << " / " << fixed(den) << " = " << fixed(b.solves) << "\n";
}

enum class Format { Table, Machine };

std::function<std::string(const std::string &)> format_check() {
  return [](const std::string &v) -> std::string {
    return v == "table" || v == "machine" ? std::string() : "must be table or machine";
  };
}

Format to_format(const std::string &s) { return s == "machine" ? Format::Machine : Format::Table; }

std::pair<std::string, std::string> split_override(const std::string &kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("override '" + kv + "' must be key=value");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Algorithm-family selection workbench", "mlwb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mlwb 0.1.0");

  std::string catalog_flag;
  std::string format = "table";
  std::function<int()> action;

  // catalog-validate
  auto *c_validate = app.add_subcommand("catalog-validate", "Validate a catalog file");
  std::string validate_path;
  c_validate->add_option("path", validate_path, "Catalog file (default: $MLWB_CATALOG)");
  c_validate->add_option("--format", format)->check(format_check());
  c_validate->callback([&] {
    action = [&] {
      std::string path = catalog_path(validate_path);
      std::string text = read_file(path);
      Catalog c;
      try {
        c = load_catalog(std::string_view(text));
      } catch (const CatalogError &e) {
        if (to_format(format) == Format::Machine) {
          json v = json::array();
          for (const auto &x : e.violations())
            v.push_back({{"location", x.location}, {"message", x.message}});
          out << json{{"valid", false}, {"violations", v}}.dump(2) << "\n";
        }
        for (const auto &x : e.violations())
          err << format_violation(x) << "\n";
        return static_cast<int>(kDomainError);
      }
      if (to_format(format) == Format::Machine) {
        out << json{{"valid", true},
                    {"criteria", c.criteria.size()},
                    {"families", c.families.size()}}
                   .dump(2)
            << "\n";
      } else {
        out << path << ": ok (" << c.criteria.size() << " criteria, " << c.families.size()
            << " families)\n";
      }
      return static_cast<int>(kOk);
    };
  });

  // profile
  auto *c_profile = app.add_subcommand("profile", "Profile a delimited data file");
  std::string data_path, delimiter = ",", label;
  std::vector<std::string> null_tokens;
  bool no_header = false;
  std::string profile_format = "machine";
  c_profile->add_option("datafile", data_path, "Data file")->required();
  c_profile->add_option("--delimiter", delimiter, "Field delimiter (or 'tab')");
  c_profile->add_option("--label", label, "Label column");
  c_profile->add_option("--null-token", null_tokens, "Extra null token (repeatable)");
  c_profile->add_flag("--no-header", no_header, "First line is data");
  c_profile->add_option("--format", profile_format)->check(format_check());
  c_profile->callback([&] {
    action = [&] {
      CsvOptions opts;
      std::string d = delimiter == "tab" ? "\t" : delimiter;
      if (d.size() != 1)
        throw UsageError("--delimiter must be a single character");
      opts.delimiter = d[0];
      opts.header = !no_header;
      for (const auto &t : null_tokens)
        opts.null_tokens.push_back(t);
      std::string text = read_file(data_path);
      auto table = ingest(text, opts);
      auto report = profile(table, label.empty() ? std::nullopt : std::optional(label));
      if (to_format(profile_format) == Format::Machine) {
        out << profile_to_json(report).dump(2) << "\n";
      } else {
        out << "rows            " << report.row_count << "\n";
        out << "volume          " << report.volume_bucket.label() << "\n";
        out << "missing         " << report.missing_level.label() << "\n";
        std::string types;
        for (auto k : report.data_types)
          types += (types.empty() ? "" : ", ") + std::string(data_kind_label(k));
        out << "data types      " << types << "\n";
        out << "scales similar  " << (report.scales_similar ? "yes" : "no") << "\n";
        if (report.class_balance_ok)
          out << "class balance   " << (*report.class_balance_ok ? "ok" : "imbalanced") << "\n";
        out << "distribution    " << distribution_label(report.distribution) << "\n";
        out << "correlated      " << (report.correlated_attributes ? "yes" : "no") << "\n";
        out << pad("column", 24) << pad("type", 14) << pad("nulls", 10) << "distinct\n";
        for (const auto &c : report.columns) {
          out << pad(c.name, 24)
              << pad(c.inferred_type ? std::string(data_kind_label(*c.inferred_type)) : "-", 14)
              << pad(fixed(c.null_fraction, 4), 10) << c.distinct_count << "\n";
        }
      }
      for (const auto &d : report.diagnostics)
        err << "note: " << d << "\n";
      return static_cast<int>(kOk);
    };
  });

  // rank
  auto *c_rank = app.add_subcommand("rank", "Rank algorithm families for a project");
  std::string project_path;
  std::size_t top = 0;
  c_rank->add_option("project", project_path, "Project file")->required();
  c_rank->add_option("--catalog", catalog_flag, "Catalog file");
  c_rank->add_option("--top", top, "Show only the first N families")->check(CLI::PositiveNumber);
  c_rank->add_option("--format", format)->check(format_check());
  c_rank->callback([&] {
    action = [&] {
      auto catalog = read_catalog(catalog_flag);
      auto pb = read_project(project_path);
      auto ranking = rank_families(pb, catalog);
      std::optional<std::size_t> limit = top ? std::optional(top) : std::nullopt;
      if (to_format(format) == Format::Machine)
        out << ranking_to_json(ranking, limit).dump(2) << "\n";
      else
        print_ranking_table(out, ranking, limit);
      print_diagnostics(err, ranking);
      return static_cast<int>(kOk);
    };
  });

  // explain
  auto *c_explain = app.add_subcommand("explain", "Per-requirement breakdown for one family");
  std::string family;
  c_explain->add_option("project", project_path, "Project file")->required();
  c_explain->add_option("--family", family, "Family id")->required();
  c_explain->add_option("--catalog", catalog_flag, "Catalog file");
  c_explain->add_option("--format", format)->check(format_check());
  c_explain->callback([&] {
    action = [&] {
      auto catalog = read_catalog(catalog_flag);
      auto pb = read_project(project_path);
      const auto *af = catalog.find_family(family);
      if (af == nullptr) {
        err << "error: unknown family '" << family << "'\n";
        return static_cast<int>(kDomainError);
      }
      auto b = solves(*af, pb, catalog);
      if (to_format(format) == Format::Machine)
        out << breakdown_to_json(b).dump(2) << "\n";
      else
        print_breakdown_table(out, b);
      return static_cast<int>(kOk);
    };
  });

  // whatif
  auto *c_whatif = app.add_subcommand("whatif", "Compare rankings before and after overrides");
  std::vector<std::string> overrides;
  c_whatif->add_option("project", project_path, "Project file")->required();
  c_whatif->add_option("--set", overrides, "Override key=value (repeatable)")->required();
  c_whatif->add_option("--catalog", catalog_flag, "Catalog file");
  c_whatif->add_option("--top", top, "Show only the first N families")->check(CLI::PositiveNumber);
  c_whatif->add_option("--format", format)->check(format_check());
  c_whatif->callback([&] {
    action = [&] {
      auto catalog = read_catalog(catalog_flag);
      auto pb = read_project(project_path);
      MLProblem after = pb;
      for (const auto &kv : overrides) {
        auto [k, v] = split_override(kv);
        try {
          after = apply_override(std::move(after), k, v);
        } catch (const OverrideError &e) {
          throw UsageError(e.what());
        }
      }
      auto before_rank = rank_families(pb, catalog);
      auto after_rank = rank_families(after, catalog);
      std::optional<std::size_t> limit = top ? std::optional(top) : std::nullopt;
      if (to_format(format) == Format::Machine) {
        out << json{{"before", ranking_to_json(before_rank, limit)},
                    {"after", ranking_to_json(after_rank, limit)}}
                   .dump(2)
            << "\n";
      } else {
        std::size_t n = std::max(before_rank.ranked.size(), after_rank.ranked.size());
        if (limit)
          n = std::min(n, *limit);
        out << pad("rank", 6) << pad("before", 32) << pad("solves", 12) << pad("after", 32)
            << "solves\n";
        for (std::size_t i = 0; i < n; ++i) {
          auto cell = [&](const Ranking &r, std::size_t w) {
            return i < r.ranked.size() ? pad(r.ranked[i].family_id, w) : pad("", w);
          };
          auto score = [&](const Ranking &r) {
            return i < r.ranked.size() ? fixed(r.ranked[i].solves) : std::string();
          };
          out << pad(std::to_string(i + 1), 6) << cell(before_rank, 32)
              << pad(score(before_rank), 12) << cell(after_rank, 32) << score(after_rank) << "\n";
        }
      }
      print_diagnostics(err, after_rank);
      return static_cast<int>(kOk);
    };
  });

  // pipeline
  auto *c_pipeline = app.add_subcommand("pipeline", "Processing chain for a family");
  std::string chain_format = "canonical", profile_path;
  c_pipeline->add_option("project", project_path, "Project file")->required();
  c_pipeline->add_option("--family", family, "Family id (default: best ranked)");
  c_pipeline->add_option("--catalog", catalog_flag, "Catalog file");
  c_pipeline->add_option("--profile", profile_path, "Profile report (JSON) of the data");
  c_pipeline->add_option("--format", chain_format)
      ->check([](const std::string &v) -> std::string {
        return v == "machine" || parse_chain_format(v) ? std::string()
                                                       : "must be canonical or workflow-xml";
      });
  c_pipeline->callback([&] {
    action = [&] {
      auto catalog = read_catalog(catalog_flag);
      auto pb = read_project(project_path);
      std::string fid = family;
      if (fid.empty()) {
        auto ranking = rank_families(pb, catalog);
        if (ranking.ranked.empty()) {
          err << "error: no family could be scored\n";
          return static_cast<int>(kDomainError);
        }
        fid = ranking.ranked.front().family_id;
      }
      const auto *af = catalog.find_family(fid);
      if (af == nullptr) {
        err << "error: unknown family '" << fid << "'\n";
        return static_cast<int>(kDomainError);
      }
      std::optional<ProfileReport> report;
      if (!profile_path.empty()) {
        json j = json::parse(read_file(profile_path), nullptr, false);
        if (j.is_discarded()) {
          err << "error: '" << profile_path << "' is not valid JSON\n";
          return static_cast<int>(kDomainError);
        }
        report = profile_from_json(j);
      }
      auto chain = apply_compensations(base_template(pb.id, fid), *af,
                                       conditions_from(&pb, report ? &*report : nullptr));
      auto fmt = chain_format == "machine" ? ChainFormat::Canonical
                                           : *parse_chain_format(chain_format);
      out << export_chain(chain, fmt);
      return static_cast<int>(kOk);
    };
  });

  // agreement
  auto *c_agree = app.add_subcommand("agreement", "Rank correlation against expert rankings");
  std::string fixture_path;
  c_agree->add_option("fixture", fixture_path, "Expert ranking fixture")->required();
  c_agree->add_option("--catalog", catalog_flag, "Catalog file");
  c_agree->add_option("--format", format)->check(format_check());
  c_agree->callback([&] {
    action = [&] {
      auto catalog = read_catalog(catalog_flag);
      json j = json::parse(read_file(fixture_path), nullptr, false);
      if (j.is_discarded()) {
        err << "error: '" << fixture_path << "' is not valid JSON\n";
        return static_cast<int>(kDomainError);
      }
      auto report = agreement_report(expert_fixture_from_json(j), catalog);
      if (to_format(format) == Format::Machine)
        out << agreement_to_json(report).dump(2) << "\n";
      else
        out << format_agreement_table(report);
      return static_cast<int>(kOk);
    };
  });

  // serve
  auto *c_serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1", store_dir;
  int port = 0;
  std::size_t max_upload = 16u << 20;
  std::string cors = "*";
  c_serve->add_option("--host", host, "Listen address");
  c_serve->add_option("--port", port, "Listen port (default: $MLWB_PORT or 8080)");
  c_serve->add_option("--store-dir", store_dir, "Store directory (default: $MLWB_STORE)");
  c_serve->add_option("--catalog", catalog_flag, "Seed catalog for a new store");
  c_serve->add_option("--max-upload", max_upload, "Dataset upload limit in bytes");
  c_serve->add_option("--cors-origin", cors, "Allowed origin; empty disables CORS headers");
  c_serve->callback([&] {
    action = [&] {
      if (store_dir.empty()) {
        const char *env = std::getenv("MLWB_STORE");
        if (env == nullptr || *env == '\0')
          throw UsageError("--store-dir or MLWB_STORE is required");
        store_dir = env;
      }
      if (port == 0) {
        const char *env = std::getenv("MLWB_PORT");
        port = env != nullptr && *env != '\0' ? std::atoi(env) : 8080;
      }
      if (port <= 0 || port > 65535)
        throw UsageError("port must be in 1..65535");
      ServiceConfig cfg;
      cfg.store_dir = store_dir;
      cfg.seed_catalog = catalog_path(catalog_flag);
      cfg.max_upload_bytes = max_upload;
      cfg.cors_origin = cors;
      Service service(cfg);
      HttpServer server(service);
      err << "listening on " << host << ":" << port << "\n";
      server.run(host, port);
      return static_cast<int>(kOk);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kUsageError);
  }

  try {
    return action();
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const CatalogError &e) {
    err << "error: invalid catalog\n";
    for (const auto &v : e.violations())
      err << "  " << format_violation(v) << "\n";
    return kDomainError;
  } catch (const RequirementError &e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
}

} // namespace mlwb::cli

#include "mlwb/service.hpp"

#include "mlwb/pipeline.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>

namespace mlwb {

using nlohmann::json;

namespace {

// Maps straight onto an HTTP status.
struct HttpError : std::runtime_error {
  HttpError(int status, const std::string &what, json detail = json::object())
      : std::runtime_error(what), status(status), detail(std::move(detail)) {}
  int status;
  json detail;
};

HttpResponse json_response(int status, const json &body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump(2) + "\n";
  return r;
}

HttpResponse error_response(int status, const std::string &message, json detail = {}) {
  json body{{"error", message}};
  if (detail.is_object()) {
    for (auto it = detail.begin(); it != detail.end(); ++it)
      body[it.key()] = it.value();
  }
  return json_response(status, body);
}

json parse_body(const std::string &body, bool allow_empty) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) {
    if (allow_empty)
      return json::object();
    throw HttpError(400, "request body is empty");
  }
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded())
    throw HttpError(400, "request body is not valid JSON");
  if (!j.is_object())
    throw HttpError(400, "request body must be a JSON object");
  return j;
}

std::vector<std::string> split_path(const std::string &path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty())
        parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    parts.push_back(std::move(cur));
  return parts;
}

std::optional<std::string> query(const HttpRequest &r, const std::string &key) {
  auto it = r.query.find(key);
  if (it == r.query.end())
    return std::nullopt;
  return it->second;
}

std::optional<long long> query_int(const HttpRequest &r, const std::string &key) {
  auto v = query(r, key);
  if (!v)
    return std::nullopt;
  long long out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw HttpError(400, "query parameter '" + key + "' must be an integer");
  return out;
}

std::optional<std::size_t> top_param(const HttpRequest &r) {
  auto top = query_int(r, "top");
  if (!top)
    return std::nullopt;
  if (*top < 1)
    throw HttpError(400, "query parameter 'top' must be positive");
  return static_cast<std::size_t>(*top);
}

void check_revision(long long current, long long given) {
  if (given != current) {
    throw HttpError(409, "stale revision",
                    json{{"currentRevision", current}, {"givenRevision", given}});
  }
}

std::string override_text(const json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

} // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)), store_(config_.store_dir) {
  config_.engine.validate();
  if (auto stored = store_.load_catalog()) {
    catalog_ = std::move(*stored);
  } else {
    catalog_.catalog = config_.seed_catalog ? load_catalog_file(*config_.seed_catalog)
                                            : make_empty_catalog();
    catalog_.revision = 1;
    store_.save_catalog(catalog_);
  }
}

HttpResponse Service::handle(const HttpRequest &request) {
  HttpResponse resp;
  try {
    resp = route(request);
  } catch (const HttpError &e) {
    resp = error_response(e.status, e.what(), e.detail);
  } catch (const RequirementError &e) {
    resp = error_response(422, e.what(), json{{"field", e.field()}});
  } catch (const ProjectFormatError &e) {
    resp = error_response(400, e.what(), json{{"field", e.location()}});
  } catch (const OverrideError &e) {
    resp = error_response(400, e.what());
  } catch (const ProfileError &e) {
    json d = json::object();
    if (e.row())
      d["row"] = *e.row();
    if (e.column())
      d["column"] = *e.column();
    resp = error_response(422, e.what(), d);
  } catch (const CatalogError &e) {
    json v = json::array();
    for (const auto &x : e.violations())
      v.push_back({{"location", x.location}, {"message", x.message}});
    resp = error_response(422, "catalog validation failed", json{{"violations", v}});
  } catch (const MatchingError &e) {
    resp = error_response(422, e.what());
  } catch (const ChainError &e) {
    resp = error_response(422, e.what());
  } catch (const LinguisticError &e) {
    resp = error_response(422, e.what());
  } catch (const std::exception &e) {
    resp = error_response(500, e.what());
  }
  if (!config_.cors_origin.empty()) {
    resp.headers["Access-Control-Allow-Origin"] = config_.cors_origin;
    resp.headers["Access-Control-Allow-Methods"] = "GET, POST, PUT, OPTIONS";
    resp.headers["Access-Control-Allow-Headers"] = "Content-Type";
  }
  return resp;
}

HttpResponse Service::route(const HttpRequest &r) {
  if (r.method == "OPTIONS") {
    HttpResponse resp;
    resp.status = 204;
    resp.content_type.clear();
    return resp;
  }
  const auto parts = split_path(r.path);
  const std::size_t n = parts.size();
  const auto &m = r.method;

  if (n == 1 && parts[0] == "health" && m == "GET")
    return json_response(200, json{{"status", "ok"}});

  if (n >= 1 && parts[0] == "projects") {
    if (n == 1 && m == "POST")
      return create_project(r);
    if (n == 1 && m == "GET")
      return list_projects();
    if (n == 2 && m == "GET")
      return get_project(parts[1]);
    if (n == 3) {
      const auto &id = parts[1];
      const auto &what = parts[2];
      if (what == "requirements" && m == "PUT")
        return put_requirements(id, r);
      if (what == "dataset" && m == "POST")
        return post_dataset(id, r);
      if (what == "ranking" && m == "GET")
        return get_ranking(id, r);
      if (what == "whatif" && m == "POST")
        return post_whatif(id, r);
      if (what == "pipeline" && m == "GET")
        return get_pipeline(id, r);
    }
  }
  if (n >= 1 && parts[0] == "catalog") {
    if (n == 1 && m == "GET")
      return get_catalog();
    if (n == 2 && parts[1] == "families" && m == "GET")
      return get_families();
    if (n == 3 && parts[1] == "families" && m == "GET")
      return get_family(parts[2]);
    if (n == 3 && parts[1] == "families" && m == "PUT")
      return put_family(parts[2], r);
  }
  throw HttpError(404, "no route for " + m + " " + r.path);
}

StoredProject Service::require_project(const std::string &id) const {
  auto p = store_.load_project(id);
  if (!p)
    throw HttpError(404, "unknown project '" + id + "'");
  return std::move(*p);
}

StoredCatalog Service::catalog_snapshot() const {
  std::shared_lock lock(catalog_mutex_);
  return catalog_;
}

HttpResponse Service::create_project(const HttpRequest &r) {
  json body = parse_body(r.body, true);
  std::string description;
  if (auto it = body.find("description"); it != body.end()) {
    if (!it->is_string())
      throw HttpError(400, "description must be a string");
    description = it->get<std::string>();
  }
  StoredProject s;
  s.problem = new_project(std::move(description));
  s.revision = 1;
  {
    std::lock_guard lock(project_write_mutex_);
    store_.save_project(s);
  }
  json out = stored_project_to_json(s);
  out["id"] = s.problem.id;
  return json_response(201, out);
}

HttpResponse Service::list_projects() {
  json ids = store_.project_ids();
  return json_response(200, json{{"projects", ids}});
}

HttpResponse Service::get_project(const std::string &id) {
  return json_response(200, stored_project_to_json(require_project(id)));
}

HttpResponse Service::put_requirements(const std::string &id, const HttpRequest &r) {
  json body = parse_body(r.body, false);
  auto rev = body.find("revision");
  if (rev == body.end() || !rev->is_number_integer())
    throw HttpError(400, "field 'revision' must be an integer");
  auto reqs = body.find("domainRequirements");
  if (reqs == body.end() || !reqs->is_array())
    throw HttpError(400, "field 'domainRequirements' must be an array");
  auto props = body.find("dataProperties");
  if (props != body.end() && !props->is_array())
    throw HttpError(400, "field 'dataProperties' must be an array");

  std::lock_guard lock(project_write_mutex_);
  StoredProject s = require_project(id);
  check_revision(s.revision, rev->get<long long>());

  json pj = project_to_json(s.problem);
  pj["domainRequirements"] = *reqs;
  if (props != body.end())
    pj["dataProperties"] = *props;
  s.problem = project_from_json(pj);
  s.revision += 1;
  store_.save_project(s);
  return json_response(200, stored_project_to_json(s));
}

HttpResponse Service::post_dataset(const std::string &id, const HttpRequest &r) {
  if (r.body.size() > config_.max_upload_bytes) {
    throw HttpError(413, "dataset exceeds the upload limit of " +
                             std::to_string(config_.max_upload_bytes) + " bytes");
  }
  CsvOptions opts;
  if (auto d = query(r, "delimiter")) {
    std::string delim = *d == "tab" ? "\t" : *d;
    if (delim.size() != 1)
      throw HttpError(400, "delimiter must be a single character");
    opts.delimiter = delim[0];
  }
  if (auto h = query(r, "header"))
    opts.header = *h != "false" && *h != "0";
  if (auto nt = query(r, "null"))
    opts.null_tokens.push_back(*nt);
  std::optional<std::string> label = query(r, "label");

  RawTable table = ingest(r.body, opts);
  ProfileReport report = profile(table, label, config_.engine.profile_thresholds);

  std::lock_guard lock(project_write_mutex_);
  StoredProject s = require_project(id);
  if (auto given = query_int(r, "revision"))
    check_revision(s.revision, *given);
  s.problem = merge_profile(std::move(s.problem), report);
  s.problem.dataset_ref = query(r, "name").value_or("upload.csv");
  s.profile = report;
  s.revision += 1;
  store_.save_project(s);
  json out = profile_to_json(report);
  return json_response(200, json{{"revision", s.revision}, {"profile", out}});
}

HttpResponse Service::get_ranking(const std::string &id, const HttpRequest &r) {
  StoredProject s = require_project(id);
  auto top = top_param(r);
  StoredCatalog cat = catalog_snapshot();
  Ranking ranking;
  try {
    ranking = rank_families(s.problem, cat.catalog, config_.engine);
  } catch (const UnscorableError &e) {
    throw HttpError(422, e.what());
  }
  json out = ranking_to_json(ranking, top);
  out["projectId"] = id;
  out["revision"] = s.revision;
  out["catalogRevision"] = cat.revision;
  return json_response(200, out);
}

HttpResponse Service::post_whatif(const std::string &id, const HttpRequest &r) {
  json body = parse_body(r.body, false);
  StoredProject s = require_project(id);
  auto top = top_param(r);
  MLProblem after = s.problem;

  auto it = body.find("overrides");
  if (it == body.end())
    throw HttpError(400, "field 'overrides' is required");
  if (it->is_object()) {
    for (auto o = it->begin(); o != it->end(); ++o)
      after = apply_override(std::move(after), o.key(), override_text(o.value()));
  } else if (it->is_array()) {
    for (const auto &o : *it) {
      if (!o.is_object() || !o.contains("key") || !o.contains("value") || !o["key"].is_string())
        throw HttpError(400, "each override must be {key, value}");
      after = apply_override(std::move(after), o["key"].get<std::string>(),
                             override_text(o["value"]));
    }
  } else {
    throw HttpError(400, "field 'overrides' must be an object or an array");
  }

  StoredCatalog cat = catalog_snapshot();
  try {
    auto before_rank = rank_families(s.problem, cat.catalog, config_.engine);
    auto after_rank = rank_families(after, cat.catalog, config_.engine);
    return json_response(200, json{{"projectId", id},
                                   {"revision", s.revision},
                                   {"before", ranking_to_json(before_rank, top)},
                                   {"after", ranking_to_json(after_rank, top)},
                                   {"project", project_to_json(after)}});
  } catch (const UnscorableError &e) {
    throw HttpError(422, e.what());
  }
}

HttpResponse Service::get_pipeline(const std::string &id, const HttpRequest &r) {
  StoredProject s = require_project(id);
  StoredCatalog cat = catalog_snapshot();
  auto format = parse_chain_format(query(r, "format").value_or("canonical"));
  if (!format)
    throw HttpError(400, "format must be canonical or workflow-xml");

  std::string family_id;
  if (auto f = query(r, "family")) {
    family_id = *f;
  } else {
    Ranking ranking;
    try {
      ranking = rank_families(s.problem, cat.catalog, config_.engine);
    } catch (const UnscorableError &e) {
      throw HttpError(422, std::string(e.what()) + "; pass family explicitly");
    }
    if (ranking.ranked.empty())
      throw HttpError(422, "no family could be scored");
    family_id = ranking.ranked.front().family_id;
  }
  const auto *family = cat.catalog.find_family(family_id);
  if (family == nullptr)
    throw HttpError(404, "unknown family '" + family_id + "'");

  auto conditions = conditions_from(&s.problem, s.profile ? &*s.profile : nullptr);
  auto chain = apply_compensations(base_template(s.problem.id, family_id), *family, conditions);
  HttpResponse resp;
  resp.body = export_chain(chain, *format);
  resp.content_type =
      *format == ChainFormat::WorkflowXml ? "application/xml" : "application/json";
  return resp;
}

HttpResponse Service::get_catalog() {
  StoredCatalog cat = catalog_snapshot();
  return json_response(200,
                       json{{"revision", cat.revision}, {"catalog", catalog_to_json(cat.catalog)}});
}

HttpResponse Service::get_families() {
  StoredCatalog cat = catalog_snapshot();
  json families = json::array();
  for (const auto &f : cat.catalog.families)
    families.push_back(family_to_json(f));
  return json_response(200, json{{"revision", cat.revision}, {"families", families}});
}

HttpResponse Service::get_family(const std::string &id) {
  StoredCatalog cat = catalog_snapshot();
  const auto *f = cat.catalog.find_family(id);
  if (f == nullptr)
    throw HttpError(404, "unknown family '" + id + "'");
  return json_response(200, json{{"revision", cat.revision}, {"family", family_to_json(*f)}});
}

HttpResponse Service::put_family(const std::string &id, const HttpRequest &r) {
  json body = parse_body(r.body, false);
  if (!body.contains("id"))
    body["id"] = id;
  AlgorithmFamilyProfile family = family_from_json(body, "family");
  if (family.id != id)
    throw HttpError(422, "family id '" + family.id + "' does not match the path");

  std::unique_lock lock(catalog_mutex_);
  if (auto given = query_int(r, "revision"))
    check_revision(catalog_.revision, *given);
  auto violations = validate_family(catalog_.catalog, family, "family");
  if (!violations.empty())
    throw CatalogError(std::move(violations));

  StoredCatalog next = catalog_;
  auto it = std::find_if(next.catalog.families.begin(), next.catalog.families.end(),
                         [&](const AlgorithmFamilyProfile &f) { return f.id == id; });
  if (it != next.catalog.families.end())
    *it = family;
  else
    next.catalog.families.push_back(family);
  auto all = validate_catalog(next.catalog);
  if (!all.empty())
    throw CatalogError(std::move(all));
  next.revision += 1;
  store_.save_catalog(next);
  catalog_ = std::move(next);
  return json_response(200, json{{"revision", catalog_.revision}, {"family", family_to_json(family)}});
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  explicit Impl(Service &s) : service(s) {}
  Service &service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(Service &service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto &[k, v] : req.params)
      r.query.emplace(k, v);
    HttpResponse out = impl_->service.handle(r);
    res.status = out.status;
    for (const auto &[k, v] : out.headers)
      res.set_header(k, v);
    if (!out.content_type.empty())
      res.set_content(out.body, out.content_type);
  };
  auto &s = impl_->server;
  const char *any = R"(/.*)";
  s.Get(any, handler);
  s.Post(any, handler);
  s.Put(any, handler);
  s.Options(any, handler);
  // Oversize uploads are answered by the service itself with its own body.
  s.set_payload_max_length(service.config().max_upload_bytes * 2 + (1u << 20));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string &host, int port) {
  auto &s = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = s.bind_to_any_port(host);
  } else if (!s.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0)
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string &host, int port) {
  if (!impl_->server.listen(host, port))
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (!impl_)
    return;
  impl_->server.stop();
  if (impl_->thread.joinable())
    impl_->thread.join();
}

} // namespace mlwb

#pragma once

// HTTP facade over projects, the catalog, profiling, ranking, what-if
// analysis and pipelines. Service::handle is transport independent; HttpServer
// binds it to cpp-httplib.

#include "mlwb/catalog.hpp"
#include "mlwb/matching.hpp"
#include "mlwb/problem.hpp"
#include "mlwb/profiler.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace mlwb {

struct StoredProject {
  MLProblem problem;
  long long revision = 0;
  std::optional<ProfileReport> profile;
};

nlohmann::json stored_project_to_json(const StoredProject &s);
StoredProject stored_project_from_json(const nlohmann::json &j);

struct StoredCatalog {
  Catalog catalog;
  long long revision = 1;
};

// One JSON file per project under projects/ and one catalog.json. Every
// write goes to a temporary file first and is renamed into place.
class ProjectStore {
public:
  explicit ProjectStore(std::filesystem::path dir);

  const std::filesystem::path &dir() const { return dir_; }

  std::optional<StoredProject> load_project(const std::string &id) const;
  void save_project(const StoredProject &p) const;
  std::vector<std::string> project_ids() const;

  std::optional<StoredCatalog> load_catalog() const;
  void save_catalog(const StoredCatalog &c) const;

private:
  std::filesystem::path project_path(const std::string &id) const;

  std::filesystem::path dir_;
};

// Writes `content` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

struct ServiceConfig {
  std::filesystem::path store_dir;
  // Catalog used when the store has none yet; the standard criteria with no
  // families otherwise.
  std::optional<std::filesystem::path> seed_catalog;
  std::size_t max_upload_bytes = 16u << 20;
  // Access-Control-Allow-Origin value; empty disables the CORS headers.
  std::string cors_origin = "*";
  EngineConfig engine{};
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

class Service {
public:
  // Loads or seeds the catalog; throws CatalogError or std::runtime_error.
  explicit Service(ServiceConfig config);

  HttpResponse handle(const HttpRequest &request);

  const ServiceConfig &config() const { return config_; }

private:
  HttpResponse route(const HttpRequest &request);

  HttpResponse create_project(const HttpRequest &r);
  HttpResponse list_projects();
  HttpResponse get_project(const std::string &id);
  HttpResponse put_requirements(const std::string &id, const HttpRequest &r);
  HttpResponse post_dataset(const std::string &id, const HttpRequest &r);
  HttpResponse get_ranking(const std::string &id, const HttpRequest &r);
  HttpResponse post_whatif(const std::string &id, const HttpRequest &r);
  HttpResponse get_pipeline(const std::string &id, const HttpRequest &r);
  HttpResponse get_catalog();
  HttpResponse get_families();
  HttpResponse get_family(const std::string &id);
  HttpResponse put_family(const std::string &id, const HttpRequest &r);

  StoredProject require_project(const std::string &id) const;
  StoredCatalog catalog_snapshot() const;

  ServiceConfig config_;
  ProjectStore store_;
  mutable std::shared_mutex catalog_mutex_;
  StoredCatalog catalog_;
  std::mutex project_write_mutex_;
};

// Owns an httplib server running Service on a background thread.
class HttpServer {
public:
  explicit HttpServer(Service &service);
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int start(const std::string &host, int port);
  // Blocks in the calling thread until stop() is called from elsewhere.
  void run(const std::string &host, int port);
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace mlwb

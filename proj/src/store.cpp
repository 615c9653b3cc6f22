#include "mlwb/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace mlwb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool safe_id(const std::string &id) {
  if (id.empty() || id.size() > 128)
    return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_';
    if (!ok)
      return false;
  }
  return true;
}

} // namespace

void write_file_atomic(const fs::path &path, const std::string &content) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot replace " + path.string());
  }
}

json stored_project_to_json(const StoredProject &s) {
  json j{{"revision", s.revision}, {"project", project_to_json(s.problem)}};
  j["profile"] = s.profile ? profile_to_json(*s.profile) : json(nullptr);
  return j;
}

StoredProject stored_project_from_json(const json &j) {
  StoredProject s;
  s.revision = j.at("revision").get<long long>();
  s.problem = project_from_json(j.at("project"));
  if (auto it = j.find("profile"); it != j.end() && !it->is_null())
    s.profile = profile_from_json(*it);
  return s;
}

ProjectStore::ProjectStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_ / "projects");
}

fs::path ProjectStore::project_path(const std::string &id) const {
  return dir_ / "projects" / (id + ".json");
}

std::optional<StoredProject> ProjectStore::load_project(const std::string &id) const {
  if (!safe_id(id))
    return std::nullopt;
  auto path = project_path(id);
  if (!fs::exists(path))
    return std::nullopt;
  return stored_project_from_json(json::parse(read_file(path)));
}

void ProjectStore::save_project(const StoredProject &p) const {
  if (!safe_id(p.problem.id))
    throw std::invalid_argument("project id '" + p.problem.id + "' cannot be stored");
  write_file_atomic(project_path(p.problem.id), stored_project_to_json(p).dump(2) + "\n");
}

std::vector<std::string> ProjectStore::project_ids() const {
  std::vector<std::string> ids;
  for (const auto &entry : fs::directory_iterator(dir_ / "projects")) {
    if (entry.path().extension() == ".json")
      ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<StoredCatalog> ProjectStore::load_catalog() const {
  auto path = dir_ / "catalog.json";
  if (!fs::exists(path))
    return std::nullopt;
  json j = json::parse(read_file(path));
  StoredCatalog c;
  c.revision = j.at("revision").get<long long>();
  c.catalog = mlwb::load_catalog(std::string_view(j.at("catalog").dump()));
  return c;
}

void ProjectStore::save_catalog(const StoredCatalog &c) const {
  json j{{"revision", c.revision}, {"catalog", catalog_to_json(c.catalog)}};
  write_file_atomic(dir_ / "catalog.json", j.dump(2) + "\n");
}

} // namespace mlwb

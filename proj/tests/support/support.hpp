#pragma once

#include "mlwb/catalog.hpp"
#include "mlwb/problem.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

namespace mlwb::testing {

std::filesystem::path fixture_path(const std::string &name);
std::string read_fixture(const std::string &name);
nlohmann::json read_fixture_json(const std::string &name);

std::filesystem::path seed_catalog_path();
const Catalog &seed_catalog();

// Path of the first difference between two JSON documents, comparing numbers
// with an absolute tolerance; nullopt when they agree.
std::optional<std::string> json_diff(const nlohmann::json &a, const nlohmann::json &b,
                                     double tolerance);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

using Rng = std::mt19937_64;

// Family with a value set for every standard criterion. Roughly a third of
// the criteria get two or more values.
AlgorithmFamilyProfile random_family(Rng &rng, const std::string &id);
// Catalog of the standard criteria and `families` random families.
Catalog random_catalog(Rng &rng, int families);
// Problem with a random subset of requirements and data properties; always
// carries at least one positively weighted entry.
MLProblem random_problem(Rng &rng);

} // namespace mlwb::testing

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "patentkb/corpus.hpp"
#include "patentkb/synthetic.hpp"

namespace fixtures {

using patentkb::InventorLocation;
using patentkb::PatentRecord;

inline InventorLocation at(double lat, double lon, std::string country = "DE") {
  return InventorLocation{lat, lon, std::move(country), std::nullopt};
}

inline PatentRecord rec(std::string id, std::vector<std::string> cpc,
                        std::vector<std::string> cites = {},
                        std::vector<InventorLocation> locs = {}) {
  PatentRecord r;
  r.family_id = std::move(id);
  r.cpc_codes = std::move(cpc);
  r.cited_family_ids = std::move(cites);
  r.inventor_locations = std::move(locs);
  return r;
}

inline patentkb::Corpus synthetic(std::size_t count, std::uint64_t seed,
                                  patentkb::Office office = patentkb::Office::EP) {
  patentkb::GeneratorConfig config;
  config.count = count;
  config.office = office;
  return patentkb::generate_synthetic(config, seed);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("patentkb_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures

#pragma once

// CSV emission. Every CSV gets a header row and a `<name>.meta.json`
// sidecar with the full parameter provenance. Numbers are written with 17
// significant digits and nothing time-dependent is recorded, so identical
// inputs give byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace netsel::cli {

using Row = std::vector<std::string>;

std::string format_number(double value);
std::string format_number(long value);

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path write_csv(const std::string& name, const Row& header,
                                  const std::vector<Row>& rows,
                                  const nlohmann::json& metadata) const;
  std::filesystem::path write_text(const std::string& name, const std::string& content) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace netsel::cli

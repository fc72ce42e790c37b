#include "netsel/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace netsel::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_number(long value) { return std::to_string(value); }

OutputWriter::OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path OutputWriter::write_csv(const std::string& name, const Row& header,
                                              const std::vector<Row>& rows,
                                              const nlohmann::json& metadata) const {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto write_row = [&out](const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) write_row(row);

  nlohmann::json meta = metadata;
  meta["file"] = name;
  meta["columns"] = header;
  meta["rows"] = rows.size();
  write_text(std::filesystem::path(name).stem().string() + ".meta.json", meta.dump(2) + "\n");
  return path;
}

std::filesystem::path OutputWriter::write_text(const std::string& name,
                                               const std::string& content) const {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  return path;
}

}  // namespace netsel::cli

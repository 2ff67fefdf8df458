#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "drivenloc/columns.hpp"
#include "drivenloc/probability.hpp"
#include "drivenloc/resolvent.hpp"

namespace drivenloc {

using Json = nlohmann::ordered_json;

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Header plus rows, comma separated, LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& add(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

Json to_json(const BoxReport& r);
Json to_json(const BoundComparison& c);
Json to_json(const ChainReport& r);
Json to_json(const TwoScaleReport& r);

/// JSON numbers cannot hold non-finite values; those are written as strings.
Json json_number(double x);

}  // namespace drivenloc

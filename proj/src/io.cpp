#include "drivenloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "drivenloc/errors.hpp"

namespace drivenloc {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw ValidationError("csv: row width does not match the header");
  rows_.push_back(std::move(row));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw ResourceError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw ResourceError("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json to_json(const BoxReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["dim"] = r.dim;
  j["half_width"] = r.half_width;
  j["k0"] = r.k0;
  j["K"] = r.K;
  j["lambda"] = json_number(r.lambda);
  j["mu"] = json_number(r.mu);
  j["good"] = r.good;
  j["strongly_resonant"] = r.strongly_resonant;
  j["intersecting_security_boxes"] = r.intersecting_security_boxes;
  j["measured_rate"] = json_number(r.measured_rate);
  j["threshold"] = json_number(r.threshold);
  j["spectral_distance"] = json_number(r.spectral_distance);
  j["resonant_points"] = r.resonant_points;
  j["offset"] = json_number(r.offset);
  j["truncation_tail"] = json_number(r.truncation_tail);
  j["reason"] = r.reason;
  j["seed"] = r.seed;
  return j;
}

Json to_json(const BoundComparison& c) {
  Json j;
  j["label"] = c.label;
  j["parameter"] = json_number(c.parameter);
  j["successes"] = c.successes;
  j["trials"] = c.trials;
  j["frequency"] = json_number(c.frequency);
  j["ci_lo"] = json_number(c.ci_lo);
  j["ci_hi"] = json_number(c.ci_hi);
  j["bound"] = json_number(c.bound);
  j["direction"] = to_string(c.direction);
  j["verdict"] = c.violated ? "violated" : "consistent";
  j["note"] = c.note;
  return j;
}

Json to_json(const ChainReport& r) {
  Json j;
  j["N"] = r.N;
  j["hypotheses_hold"] = r.hypotheses_hold;
  j["failed"] = r.failed;
  j["rows"] = r.rows.size();
  j["all_hold"] = r.all_hold;
  j["min_log_slack"] = json_number(r.min_log_slack);
  return j;
}

Json to_json(const TwoScaleReport& r) {
  Json j;
  j["small_scale"] = r.small_scale;
  j["large_scale"] = r.large_scale;
  j["mu"] = json_number(r.mu);
  j["hypotheses_hold"] = r.hypotheses_hold;
  j["failed"] = r.failed;
  j["bad_centers"] = r.bad_centers;
  j["kernel_norm"] = json_number(r.kernel_norm);
  j["mu_prime"] = json_number(r.mu_prime);
  j["target"] = json_number(r.target);
  j["good"] = r.good;
  j["huygens_lhs"] = json_number(r.huygens_lhs);
  j["huygens_rhs"] = json_number(r.huygens_rhs);
  j["huygens_holds"] = r.huygens_holds;
  j["dense_rate"] = json_number(r.dense_rate);
  j["l1_kernel_bound"] = json_number(r.l1_kernel_bound);
  return j;
}

}  // namespace drivenloc

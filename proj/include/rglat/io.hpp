#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rglat {

// 17 significant digits: round-trips any double, and identical values always
// produce identical text, which is what the byte-identical rerun contract
// rests on.
std::string format_g17(double v);

std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

// Row-oriented CSV accumulator with pinned formatting.
class Csv {
 public:
  explicit Csv(std::string_view header);
  Csv& cell(std::string_view s);
  Csv& cell(double v);
  Csv& cell(std::int64_t v);
  Csv& end_row();
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
  bool row_open_ = false;
};

// Flat `key = value` configuration text; '#' starts a comment. std::map keeps
// serialization order-independent of insertion order.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv_text(const std::string& text);
KvMap parse_kv_file(const std::filesystem::path& file);
std::string kv_to_text(const KvMap& kv);

double parse_double(const std::string& s);
int parse_int(const std::string& s);
std::uint64_t parse_u64(const std::string& s);
bool parse_bool(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);  // "a,b,c"
std::vector<int> parse_int_list(const std::string& s);
std::pair<int, int> parse_int_range(const std::string& s);  // "12..15", inclusive
std::vector<double> parse_grid(const std::string& s);       // "lo:hi:step"

// Collects output files in memory, then writes them in one pass. Existing
// files are never overwritten unless the overwrite flag is set; conflicts are
// detected before anything touches the disk. metadata.json gets a checksum
// entry for every emitted file.
class RunEmitter {
 public:
  RunEmitter(std::filesystem::path outdir, bool overwrite);

  void add_file(const std::string& name, std::string content);
  nlohmann::json& metadata() { return metadata_; }
  const std::filesystem::path& outdir() const { return outdir_; }

  // Writes all staged files plus metadata.json; returns the file list.
  std::vector<std::string> finalize();

 private:
  std::filesystem::path outdir_;
  bool overwrite_;
  std::vector<std::pair<std::string, std::string>> files_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

}  // namespace rglat

#include "rglat/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rglat {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view s) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

Csv::Csv(std::string_view header) {
  buf_.append(header);
  buf_.push_back('\n');
}

Csv& Csv::cell(std::string_view s) {
  if (row_open_) buf_.push_back(',');
  buf_.append(s);
  row_open_ = true;
  return *this;
}

Csv& Csv::cell(double v) { return cell(format_g17(v)); }

Csv& Csv::cell(std::int64_t v) { return cell(std::to_string(v)); }

Csv& Csv::end_row() {
  buf_.push_back('\n');
  row_open_ = false;
  return *this;
}

namespace {
std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}
}  // namespace

KvMap parse_kv_text(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                 ": empty key");
    kv[key] = value;
  }
  return kv;
}

KvMap parse_kv_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kv_text(ss.str());
}

std::string kv_to_text(const KvMap& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("bad boolean: " + s);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_int(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::pair<int, int> parse_int_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("bad range: " + s);
  const int lo = parse_int(s.substr(0, dots));
  const int hi = parse_int(s.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("bad range: " + s);
  return {lo, hi};
}

std::vector<double> parse_grid(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = s.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw std::invalid_argument("bad grid (want lo:hi:step): " + s);
  const double lo = parse_double(s.substr(0, c1));
  const double hi = parse_double(s.substr(c1 + 1, c2 - c1 - 1));
  const double step = parse_double(s.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid: " + s);
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
  return out;
}

RunEmitter::RunEmitter(std::filesystem::path outdir, bool overwrite)
    : outdir_(std::move(outdir)), overwrite_(overwrite) {}

void RunEmitter::add_file(const std::string& name, std::string content) {
  for (const auto& [n, c] : files_)
    if (n == name) throw std::logic_error("duplicate output file: " + name);
  files_.emplace_back(name, std::move(content));
}

std::vector<std::string> RunEmitter::finalize() {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  for (const auto& [name, content] : files_) names.push_back(name);
  names.push_back("metadata.json");

  if (!overwrite_) {
    std::vector<std::string> conflicts;
    for (const std::string& n : names)
      if (fs::exists(outdir_ / n)) conflicts.push_back((outdir_ / n).string());
    if (!conflicts.empty()) {
      std::string msg = "refusing to overwrite existing files (pass --overwrite):";
      for (const auto& c : conflicts) msg += " " + c;
      throw std::runtime_error(msg);
    }
  }

  fs::create_directories(outdir_);
  nlohmann::json checksums = nlohmann::json::object();
  for (const auto& [name, content] : files_) {
    checksums[name] = {{"fnv1a64", fnv1a64_hex(content)}, {"bytes", content.size()}};
    std::ofstream out(outdir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (outdir_ / name).string());
    out << content;
  }
  metadata_["files"] = checksums;
  std::ofstream meta(outdir_ / "metadata.json", std::ios::binary | std::ios::trunc);
  if (!meta) throw std::runtime_error("cannot write metadata.json");
  meta << metadata_.dump(2) << '\n';
  return names;
}

}  // namespace rglat

#include "treeprof/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "treeprof/error.hpp"

namespace treeprof::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

template <class T>
T parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  return v;
}

// Rows of comma separated fields; a first row that does not start with a
// number is taken as a header and skipped.
std::vector<std::vector<std::string_view>> csv_rows(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  bool first = true;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first) {
      first = false;
      const char c = line.front();
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.')) continue;
    }
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

nlohmann::json degseq_to_json(const DegreeSequence& ds) {
  nlohmann::json counts = nlohmann::json::object();
  for (auto [i, n] : ds.counts()) counts[std::to_string(i)] = n;
  return nlohmann::json{{"counts", counts}};
}

DegreeSequence degseq_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("counts") || !j["counts"].is_object())
    throw Error(ErrorCode::ParseError, "expected {\"counts\": {...}}");
  std::map<Count, Count> counts;
  for (const auto& [key, value] : j["counts"].items()) {
    if (!value.is_number_integer()) throw Error(ErrorCode::ParseError, "count for '" + key + "' is not an integer");
    counts[parse_number<Count>(key)] += value.get<Count>();
  }
  return DegreeSequence::validate(counts);
}

std::string degseq_to_csv(const DegreeSequence& ds) {
  std::string out = "i,N\n";
  for (auto [i, n] : ds.counts()) out += std::to_string(i) + "," + std::to_string(n) + "\n";
  return out;
}

DegreeSequence degseq_from_csv(std::string_view text) {
  std::map<Count, Count> counts;
  for (const auto& row : csv_rows(text)) {
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "degree sequence rows need two columns");
    counts[parse_number<Count>(row[0])] += parse_number<Count>(row[1]);
  }
  return DegreeSequence::validate(counts);
}

DegreeSequence degseq_from_text(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text[start] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    return degseq_from_json(j);
  }
  return degseq_from_csv(text);
}

nlohmann::json tree_to_json(const PlaneTree& t) { return t.dfs_degrees(); }

PlaneTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "tree must be an array of child counts");
  std::vector<Count> d;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, "child counts must be integers");
    d.push_back(v.get<Count>());
  }
  return PlaneTree::from_dfs_degrees(std::move(d));
}

namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= bytes.size()) throw Error(ErrorCode::ParseError, "truncated varint");
    const auto b = bytes[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
  }
  throw Error(ErrorCode::ParseError, "varint too long");
}

}  // namespace

std::vector<std::uint8_t> tree_to_binary(const PlaneTree& t) {
  std::vector<std::uint8_t> out;
  put_varint(out, static_cast<std::uint64_t>(t.size()));
  for (Count d : t.dfs_degrees()) put_varint(out, static_cast<std::uint64_t>(d));
  return out;
}

PlaneTree tree_from_binary(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto n = get_varint(bytes, pos);
  if (n > bytes.size()) throw Error(ErrorCode::ParseError, "length prefix exceeds the data");
  std::vector<Count> d(static_cast<std::size_t>(n));
  for (auto& x : d) x = static_cast<Count>(get_varint(bytes, pos));
  if (pos != bytes.size()) throw Error(ErrorCode::ParseError, "trailing bytes after tree");
  return PlaneTree::from_dfs_degrees(std::move(d));
}

std::string walk_to_csv(std::span<const Count> values) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out += std::to_string(i) + "," + std::to_string(values[i]) + "\n";
  return out;
}

std::string walk_to_csv(std::span<const double> values) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out += std::to_string(i) + "," + format_double(values[i]) + "\n";
  return out;
}

std::vector<double> walk_from_csv(std::string_view text) {
  std::vector<double> values;
  for (const auto& row : csv_rows(text)) {
    if (row.size() == 1) {
      values.push_back(parse_number<double>(row[0]));
      continue;
    }
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "walk rows need index,value");
    if (parse_number<Count>(row[0]) != static_cast<Count>(values.size()))
      throw Error(ErrorCode::ParseError, "walk indices must run 0, 1, 2, ...");
    values.push_back(parse_number<double>(row[1]));
  }
  return values;
}

std::string grid_path_to_csv(const GridPath& path) {
  std::string out = "t,value\n";
  const double m = static_cast<double>(path.resolution());
  for (std::size_t k = 0; k < path.values.size(); ++k)
    out += format_double(static_cast<double>(k) / m) + "," + format_double(path.values[k]) + "\n";
  return out;
}

GridPath grid_path_from_csv(std::string_view text) {
  GridPath g;
  for (const auto& row : csv_rows(text)) {
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "grid rows need t,value");
    g.values.push_back(parse_number<double>(row[1]));
  }
  if (g.values.size() < 2) throw Error(ErrorCode::ParseError, "grid path needs at least two points");
  return g;
}

std::string profile_to_csv(const Profile& p) {
  std::string out = "generation,z,c\n";
  for (std::size_t k = 0; k < p.z.size(); ++k)
    out += std::to_string(k) + "," + std::to_string(p.z[k]) + "," + std::to_string(p.c[k]) + "\n";
  return out;
}

}  // namespace treeprof::io

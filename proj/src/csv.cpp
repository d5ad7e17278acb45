#include "ionstate/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ionstate/errors.hpp"

namespace ionstate {

void CountHistogram::validate() const {
  for (const auto& [n, c] : bins) {
    if (n < 0) throw ValidationError("histogram: negative count bin " + std::to_string(n));
    if (c < 0) throw ValidationError("histogram: negative frequency in bin " + std::to_string(n));
  }
}

namespace csv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("CSV: missing column '" + name + "'");
}

Table read_table(std::istream& in) {
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto cells = split(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                            " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw ValidationError("CSV line " + std::to_string(lineno) + ": not a number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ValidationError("CSV: empty input");
  return t;
}

Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_table(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_histogram(std::ostream& out, const CountHistogram& h) {
  out << "n,count\n";
  for (const auto& [n, c] : h.bins) out << n << ',' << c << '\n';
}

CountHistogram read_histogram(std::istream& in) {
  const auto t = read_table(in);
  const auto cn = t.column("n");
  const auto cc = t.column("count");
  CountHistogram h;
  for (const auto& row : t.rows) {
    const double n = row[cn], c = row[cc];
    if (n != std::floor(n) || c != std::floor(c)) throw ValidationError("histogram CSV: non-integer entry");
    h.add(static_cast<int>(n), static_cast<std::int64_t>(c));
  }
  h.validate();
  return h;
}

CountHistogram read_histogram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_histogram(in);
}

}  // namespace csv
}  // namespace ionstate

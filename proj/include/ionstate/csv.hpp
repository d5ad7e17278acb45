#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ionstate/histogram.hpp"

namespace ionstate::csv {

/// Header line plus numeric rows. Blank lines and lines starting with '#' are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by header name; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
};

Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_histogram(std::ostream& out, const CountHistogram& h);
/// Expects header `n,count`; repeated n values add up.
CountHistogram read_histogram(std::istream& in);
CountHistogram read_histogram_file(const std::string& path);

}  // namespace ionstate::csv

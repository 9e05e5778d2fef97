// Numeric CSV tables: '#'-prefixed metadata lines, one header row, then
// comma-separated values written with 17 significant digits so that
// write -> read -> write is byte-identical.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pileup::csv {

struct Table {
  std::vector<std::string> meta;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Index of a column by name, or -1.
  int column(const std::string& name) const;
};

std::string format_number(double v);

void write(std::ostream& os, const Table& t);
void write_file(const std::string& path, const Table& t);
Table read(std::istream& is);
Table read_file(const std::string& path);

}  // namespace pileup::csv

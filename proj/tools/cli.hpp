#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace bubblewalk::cli {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

/// One rectangular result table. Summary rows reuse the columns and leave
/// unused cells empty.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { automatic, csv, json };

/// Shortest round-trip decimal form, independent of locale.
std::string format_number(double x);

void write_csv(std::ostream& out, const Table& t);
/// One JSON object per row, empty cells omitted.
void write_json_lines(std::ostream& out, const Table& t);

/// Parses "1000", "1e3", "2.5e6" into an integer; rejects fractions.
std::int64_t parse_count(const std::string& text);

/// Runs the command line. Results go to `out` unless --out is given;
/// diagnostics and timing go to `err`. Returns the process exit status:
/// 0 ok, 2 bad arguments, 3 resource guard, 4 level cap, 5 output error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bubblewalk::cli

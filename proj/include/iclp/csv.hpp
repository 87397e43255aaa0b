// Copyright 2026 The ICLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ICLP_CSV_HPP_
#define ICLP_CSV_HPP_

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iclp/error.hpp"
#include "iclp/grid.hpp"

namespace iclp {

// Shortest representation that round-trips, capped at 17 significant digits.
inline std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Numeric table with 1-based source line numbers kept for error messages.
struct NumericTable {
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;
  std::vector<std::string> directives;  // "#!" lines, prefix stripped
};

namespace internal {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double ParseCell(std::string_view cell, int line, int col) {
  cell = Trim(cell);
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  ICLP_REQUIRE(!cell.empty() && res.ec == std::errc() &&
                   res.ptr == cell.data() + cell.size(),
               DataError, "row ", line, ", column ", col,
               ": not a number: '", std::string(cell), "'");
  ICLP_REQUIRE(std::isfinite(v), DataError, "row ", line, ", column ", col,
               ": value is not finite");
  return v;
}

}  // namespace internal

// Parses comma-separated numbers. Blank lines and '#' comments are skipped.
inline NumericTable ParseNumericTable(std::istream& in) {
  NumericTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = internal::Trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (s.size() > 1 && s[1] == '!') {
        table.directives.emplace_back(internal::Trim(s.substr(2)));
      }
      continue;
    }
    std::vector<double> row;
    int col = 1;
    size_t start = 0;
    while (true) {
      size_t comma = s.find(',', start);
      std::string_view cell =
          s.substr(start, comma == std::string_view::npos ? s.npos
                                                           : comma - start);
      row.push_back(internal::ParseCell(cell, line_no, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
      ++col;
    }
    if (!table.rows.empty()) {
      ICLP_REQUIRE(row.size() == table.rows.front().size(), DataError, "row ",
                   line_no, ": expected ", table.rows.front().size(),
                   " columns, found ", row.size());
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

inline NumericTable ReadNumericTable(const std::string& path) {
  std::ifstream in(path);
  ICLP_REQUIRE(in.good(), DataError, "cannot open '", path, "'");
  return ParseNumericTable(in);
}

inline Eigen::MatrixXd ReadMatrix(const std::string& path) {
  NumericTable t = ReadNumericTable(path);
  ICLP_REQUIRE(!t.rows.empty(), DataError, "'", path, "' has no data rows");
  Eigen::MatrixXd m(t.rows.size(), t.rows.front().size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    for (size_t j = 0; j < t.rows[i].size(); ++j) m(i, j) = t.rows[i][j];
  }
  return m;
}

enum class GridRow { kAuto, kPresent, kAbsent };

struct CsvOptions {
  // kAuto treats a strictly increasing first row as grid nodes when more
  // than one row is present.
  GridRow grid_row = GridRow::kAuto;
  // Bounds used when no grid row is present.
  Interval default_bounds{0.0, 1.0};
  // Overrides everything else; required for 2D data without a directive.
  std::optional<GridSpec> grid;
};

namespace internal {

inline GridSpec GridFromNodes(const std::vector<double>& nodes, int line) {
  const int k = static_cast<int>(nodes.size());
  ICLP_REQUIRE(k >= 2, DataError, "row ", line,
               ": grid row needs at least 2 nodes");
  for (int i = 1; i < k; ++i) {
    ICLP_REQUIRE(nodes[i] > nodes[i - 1], DataError, "row ", line,
                 ", column ", i + 1, ": grid nodes are not increasing");
  }
  // Nodes written with few digits are accepted up to 1% of the spacing.
  const double h = (nodes.back() - nodes.front()) / (k - 1);
  for (int i = 1; i < k; ++i) {
    double expected = nodes.front() + i * h;
    ICLP_REQUIRE(std::abs(nodes[i] - expected) <= 1e-2 * h, DataError, "row ",
                 line, ", column ", i + 1, ": grid is not uniformly spaced");
  }
  return GridSpec::Line(k, nodes.front(), nodes.back());
}

inline bool StrictlyIncreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return v.size() >= 2;
}

// "#! grid dim=2 k=50 x=-5:5 y=-5:5"
inline std::optional<GridSpec> GridFromDirectives(
    const std::vector<std::string>& directives) {
  for (const auto& d : directives) {
    std::istringstream is(d);
    std::string word;
    is >> word;
    if (word != "grid") continue;
    int dim = 1, k = 0;
    std::array<Interval, 2> b{};
    while (is >> word) {
      auto eq = word.find('=');
      ICLP_REQUIRE(eq != std::string::npos, DataError,
                   "malformed grid directive '", d, "'");
      std::string key = word.substr(0, eq), val = word.substr(eq + 1);
      if (key == "dim") {
        dim = std::stoi(val);
      } else if (key == "k") {
        k = std::stoi(val);
      } else if (key == "x" || key == "y") {
        auto colon = val.find(':');
        ICLP_REQUIRE(colon != std::string::npos, DataError,
                     "malformed interval in grid directive '", d, "'");
        b[key == "x" ? 0 : 1] = {std::stod(val.substr(0, colon)),
                                 std::stod(val.substr(colon + 1))};
      }
    }
    return GridSpec(dim, k, b);
  }
  return std::nullopt;
}

}  // namespace internal

inline std::vector<FunctionOnGrid> ParseCurves(std::istream& in,
                                               const CsvOptions& opt = {}) {
  NumericTable t = ParseNumericTable(in);
  ICLP_REQUIRE(!t.rows.empty(), DataError, "no data rows");
  std::optional<GridSpec> grid = opt.grid;
  if (!grid) grid = internal::GridFromDirectives(t.directives);
  size_t first = 0;
  if (!grid) {
    bool has_grid_row =
        opt.grid_row == GridRow::kPresent ||
        (opt.grid_row == GridRow::kAuto && t.rows.size() >= 2 &&
         internal::StrictlyIncreasing(t.rows.front()));
    if (has_grid_row) {
      ICLP_REQUIRE(t.rows.size() >= 2, DataError,
                   "grid row present but no curves follow");
      grid = internal::GridFromNodes(t.rows.front(), t.line_numbers.front());
      first = 1;
    } else {
      grid = GridSpec::Line(static_cast<int>(t.rows.front().size()),
                            opt.default_bounds.lo, opt.default_bounds.hi);
    }
  }
  ICLP_REQUIRE(static_cast<int>(t.rows.front().size()) == grid->size(),
               DataError, "row ", t.line_numbers.front(), ": expected ",
               grid->size(), " columns for the grid, found ",
               t.rows.front().size());
  std::vector<FunctionOnGrid> curves;
  curves.reserve(t.rows.size() - first);
  for (size_t r = first; r < t.rows.size(); ++r) {
    curves.emplace_back(*grid, Eigen::Map<const Eigen::VectorXd>(
                                   t.rows[r].data(), t.rows[r].size()));
  }
  return curves;
}

inline std::vector<FunctionOnGrid> load_csv(const std::string& path,
                                            const CsvOptions& opt = {}) {
  std::ifstream in(path);
  ICLP_REQUIRE(in.good(), DataError, "cannot open '", path, "'");
  return ParseCurves(in, opt);
}

inline void WriteCurves(std::ostream& out,
                        const std::vector<FunctionOnGrid>& curves) {
  ICLP_REQUIRE(!curves.empty(), DataError, "nothing to write");
  const GridSpec& g = curves.front().grid();
  auto write_row = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out << ',';
      out << FormatDouble(v(i));
    }
    out << '\n';
  };
  if (g.dim() == 1) {
    Eigen::VectorXd nodes(g.size());
    for (int i = 0; i < g.size(); ++i) nodes(i) = g.axis_node(0, i);
    write_row(nodes);
  } else {
    out << "#! grid dim=2 k=" << g.points_per_axis()
        << " x=" << FormatDouble(g.bounds(0).lo) << ':'
        << FormatDouble(g.bounds(0).hi) << " y=" << FormatDouble(g.bounds(1).lo)
        << ':' << FormatDouble(g.bounds(1).hi) << '\n';
  }
  for (const auto& c : curves) {
    RequireSameGrid(g, c.grid());
    write_row(c.values());
  }
}

inline void save_csv(const std::vector<FunctionOnGrid>& curves,
                     const std::string& path) {
  std::ofstream out(path);
  ICLP_REQUIRE(out.good(), DataError, "cannot write '", path, "'");
  WriteCurves(out, curves);
}

inline void save_csv(const FunctionOnGrid& f, const std::string& path) {
  save_csv(std::vector<FunctionOnGrid>{f}, path);
}

}  // namespace iclp

#endif  // ICLP_CSV_HPP_

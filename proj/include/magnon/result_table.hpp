#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace magnon {

using ojson = nlohmann::ordered_json;

enum class ColumnType { Real, Integer };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

/// Named, typed numeric columns with a metadata block.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column_index(const std::string& name) const;

  /// Throws std::invalid_argument when the width differs from the schema.
  void add_row(std::vector<double> row);

  ojson& meta() { return meta_; }
  const ojson& meta() const { return meta_; }

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  ojson meta_ = ojson::object();
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, integers without exponent.
std::string format_number(double v, ColumnType type = ColumnType::Real);

/// '#'-prefixed metadata lines ("# key: <json value>"), header row, data rows.
/// Fields are quoted per RFC 4180 when they contain ',', '"' or line breaks.
void write_csv(const ResultTable& table, std::ostream& os);
ResultTable read_csv(std::istream& is);

/// {"meta": {...}, "columns": [{"name":..,"type":..}], "rows": [[...]]}
ojson to_json(const ResultTable& table);

enum class PlotKind { None, Heatmap, Curves, TimeSeries };

/// gnuplot script reading `csv_name` (relative to the script's directory).
std::string plot_script(const ResultTable& table, PlotKind kind, const std::string& csv_name,
                        const std::string& title);

struct EmitRequest {
  std::string dir;
  std::string basename;
  std::vector<std::string> formats;
  PlotKind plot = PlotKind::None;
  std::string title;
};

/// Writes <dir>/<basename>.csv / .json (and .gp). Returns written paths.
/// Throws IoError on any failure.
std::vector<std::string> emit_outputs(const ResultTable& table, const EmitRequest& request);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace magnon

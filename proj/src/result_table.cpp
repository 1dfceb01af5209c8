#include "magnon/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace magnon {

namespace {

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("read_csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  throw std::out_of_range("ResultTable: no column '" + name + "'");
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("ResultTable: row width does not match columns");
  rows_.push_back(std::move(row));
}

std::string format_number(double v, ColumnType type) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  if (type == ColumnType::Integer && std::abs(v) < 9.0e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

void write_csv(const ResultTable& table, std::ostream& os) {
  for (const auto& [key, value] : table.meta().items()) os << "# " << key << ": " << value.dump() << '\n';
  const auto& cols = table.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << quote_field(cols[i].name);
  os << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i], cols[i].type);
    os << '\n';
  }
}

ResultTable read_csv(std::istream& is) {
  ojson meta = ojson::object();
  std::string line;
  std::vector<Column> columns;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ", 2);
      if (colon != std::string::npos) meta[line.substr(2, colon - 2)] = ojson::parse(line.substr(colon + 2));
      continue;
    }
    if (!have_header) {
      for (auto& name : split_record(line)) columns.push_back({name, ColumnType::Real});
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_record(line)) row.push_back(parse_field(f));
    rows.push_back(std::move(row));
  }
  ResultTable t(columns);
  t.meta() = meta;
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

ojson to_json(const ResultTable& table) {
  ojson cols = ojson::array();
  for (const auto& c : table.columns()) {
    cols.push_back({{"name", c.name}, {"type", c.type == ColumnType::Integer ? "integer" : "real"}});
  }
  ojson rows = ojson::array();
  for (const auto& r : table.rows()) {
    ojson row = ojson::array();
    for (double v : r) {
      if (std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(std::move(row));
  }
  return {{"meta", table.meta()}, {"columns", cols}, {"rows", rows}};
}

std::string plot_script(const ResultTable& table, PlotKind kind, const std::string& csv_name,
                        const std::string& title) {
  std::ostringstream gp;
  const auto& cols = table.columns();
  std::string script = csv_name;
  if (script.size() > 4 && script.compare(script.size() - 4, 4, ".csv") == 0) script.resize(script.size() - 4);
  gp << "# run from this directory: gnuplot -p " << script << ".gp\n";
  gp << "set datafile separator ','\n";
  gp << "set datafile commentschars '#'\n";
  gp << "set key autotitle columnhead\n";
  gp << "set title '" << title << "'\n";
  switch (kind) {
    case PlotKind::Heatmap:
      // Long format: column 1 = J, column 2 = t, column 3 = concurrence.
      gp << "set xlabel '" << cols.at(0).name << "'\n";
      gp << "set ylabel '" << cols.at(1).name << "'\n";
      gp << "set cblabel '" << cols.at(2).name << "'\n";
      gp << "set view map\n";
      gp << "set dgrid3d " << 200 << "," << 200 << "\n";
      gp << "splot '" << csv_name << "' using 1:2:3 with pm3d notitle\n";
      break;
    case PlotKind::Curves:
      gp << "set xlabel '" << cols.at(0).name << "'\n";
      gp << "set ylabel 'peak concurrence'\n";
      gp << "set logscale x\n";
      gp << "plot ";
      for (std::size_t i = 1; i < cols.size(); ++i) {
        if (cols[i].name.rfind("C_", 0) != 0) continue;
        gp << (i > 1 ? ", \\\n     " : "") << "'" << csv_name << "' using 1:" << i + 1 << " with lines";
      }
      gp << '\n';
      break;
    case PlotKind::TimeSeries:
      gp << "set xlabel '" << cols.at(0).name << "'\n";
      gp << "set ylabel 'concurrence'\n";
      gp << "plot ";
      {
        bool first = true;
        for (std::size_t i = 1; i < cols.size(); ++i) {
          if (cols[i].name.rfind("C_", 0) != 0 || cols[i].name.find("_se") != std::string::npos) continue;
          gp << (first ? "" : ", \\\n     ") << "'" << csv_name << "' using 1:" << i + 1 << " with lines";
          first = false;
        }
      }
      gp << '\n';
      break;
    case PlotKind::None:
      break;
  }
  return gp.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

std::vector<std::string> emit_outputs(const ResultTable& table, const EmitRequest& request) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = request.dir.empty() ? fs::path(".") : fs::path(request.dir);
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  std::vector<std::string> written;
  for (const auto& fmt : request.formats) {
    const fs::path path = dir / (request.basename + "." + fmt);
    std::ostringstream text;
    if (fmt == "csv") {
      write_csv(table, text);
    } else if (fmt == "json") {
      text << to_json(table).dump(1) << '\n';
    } else {
      throw IoError("unknown output format '" + fmt + "'");
    }
    write_text_file(path.string(), text.str());
    written.push_back(path.string());
  }

  if (request.plot != PlotKind::None) {
    const fs::path gp = dir / (request.basename + ".gp");
    write_text_file(gp.string(), plot_script(table, request.plot, request.basename + ".csv", request.title));
    written.push_back(gp.string());
  }
  return written;
}

}  // namespace magnon

#include "conpt/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace conpt {

std::string format_number(double value) {
  if (!std::isfinite(value)) throw std::runtime_error("refusing to write non-finite value");
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void CsvWriter::comment(std::string_view text) {
  text_ += "# ";
  text_ += text;
  text_ += "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (columns_ != 0 && cells.size() != columns_) {
    throw std::runtime_error("csv row width mismatch");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::write_atomic(const std::string& path) const {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << text_;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell) {
  std::size_t used = 0;
  const double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::runtime_error("bad numeric cell: " + cell);
  return v;
}

double size_from_label(const std::string& label) {
  double value = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(label[i]))) {
      std::size_t end = i;
      while (end < label.size() &&
             (std::isdigit(static_cast<unsigned char>(label[end])) || label[end] == '.')) {
        ++end;
      }
      value = std::stod(label.substr(i, end - i));
      found = true;
      i = end;
    }
  }
  return found ? value : 0.0;
}

int find_column(const std::vector<std::string>& header,
                const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end()) return static_cast<int>(it - header.begin());
  }
  return -1;
}

}  // namespace

std::vector<Curve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw std::runtime_error("empty curve csv: " + path);
  const int label_col = find_column(header, {"label"});
  const int x_col = find_column(header, {"x", "w", "p", "c"});
  const int y_col = find_column(header, {"y", "value", "estimate", "mean"});
  const int size_col = find_column(header, {"L", "l", "size"});
  if (label_col < 0 || x_col < 0 || y_col < 0) {
    throw std::runtime_error("curve csv needs label, x and y columns");
  }

  std::map<std::string, Curve> by_label;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::runtime_error("ragged csv row: " + line);
    const std::string& label = cells[static_cast<std::size_t>(label_col)];
    Curve& curve = by_label[label];
    if (curve.label.empty()) {
      curve.label = label;
      curve.size = size_col >= 0 ? parse_cell(cells[static_cast<std::size_t>(size_col)])
                                 : size_from_label(label);
    }
    curve.xs.push_back(parse_cell(cells[static_cast<std::size_t>(x_col)]));
    curve.ys.push_back(parse_cell(cells[static_cast<std::size_t>(y_col)]));
  }

  std::vector<Curve> out;
  for (auto& [label, curve] : by_label) {
    std::vector<std::size_t> idx(curve.xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return curve.xs[a] < curve.xs[b]; });
    Curve sorted;
    sorted.label = curve.label;
    sorted.size = curve.size;
    for (std::size_t i : idx) {
      sorted.xs.push_back(curve.xs[i]);
      sorted.ys.push_back(curve.ys[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace conpt

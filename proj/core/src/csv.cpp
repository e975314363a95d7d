#include "uu/csv.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "uu/error.hpp"

namespace uu {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t line) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    throw ParseError(line, "non-numeric cell '" + std::string(cell) + "'");
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void write_rows(const std::filesystem::path& path, const Matrix& x, const LabelVector* labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  std::string line;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    if (k > 0) line += ',';
    line += 'f' + std::to_string(k + 1);
  }
  if (labels != nullptr) line += ",label";
  out << line << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    line.clear();
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      if (k > 0) line += ',';
      append_number(line, x(i, k));
    }
    if (labels != nullptr) line += (*labels)[i] == 1 ? ",1" : ",-1";
    out << line << '\n';
  }
  if (!out) throw Error(ErrorKind::config, "failed writing '" + path.string() + "'");
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty file, expected header f1,...,fd[,label]");
  const auto header = split(line);
  std::size_t d = 0;
  bool has_label = false;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "f" + std::to_string(k + 1)) {
      if (has_label) throw ParseError(1, "label must be the last column");
      ++d;
    } else if (header[k] == "label" && k + 1 == header.size()) {
      has_label = true;
    } else {
      throw ParseError(1, "bad header cell '" + std::string(header[k]) +
                              "', expected f1,...,fd[,label]");
    }
  }
  if (d == 0) throw ParseError(1, "header declares no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                    std::to_string(cells.size()));
    for (std::size_t k = 0; k < d; ++k) values.push_back(parse_number(cells[k], line_no));
    if (has_label) {
      const double y = parse_number(cells[d], line_no);
      if (y != 1.0 && y != -1.0)
        throw ParseError(line_no, "label must be +1 or -1, found '" + std::string(cells[d]) + "'");
      labels.push_back(static_cast<int>(y));
    }
    ++rows;
  }

  CsvTable table;
  table.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  if (has_label)
    table.labels = Eigen::Map<const LabelVector>(labels.data(), static_cast<Eigen::Index>(rows));
  return table;
}

LabeledSet load_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  if (!t.labels) throw ParseError(1, "labeled data needs a 'label' column");
  return LabeledSet(std::move(t.features), std::move(*t.labels));
}

UnlabeledSet load_unlabeled_csv(const std::filesystem::path& path, double declared_prior) {
  CsvTable t = read_csv(path);
  return UnlabeledSet(std::move(t.features), declared_prior);
}

void save_csv(const std::filesystem::path& path, const LabeledSet& set) {
  write_rows(path, set.features, &set.labels);
}

void save_csv(const std::filesystem::path& path, const UnlabeledSet& set) {
  write_rows(path, set.features, nullptr);
}

}  // namespace uu

#include "tvcs/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "tvcs/util.hpp"

namespace tvcs {

namespace {

constexpr const char* kLogHeader = "iter,rel_err,q_dist,tv,residual,seconds";

std::string fmt_g17(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

std::string format_row(const LogRow& r) {
  std::string s = std::to_string(r.iter);
  for (double x : {r.rel_err, r.q_dist, r.tv, r.residual, r.seconds}) {
    s += ',';
    s += fmt_g17(x);
  }
  return s;
}

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(const std::string& s, const std::string& path) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c) throw io_error("csv: malformed number '" + s + "' in " + path);
  return v;
}

}  // namespace

LogCsvWriter::LogCsvWriter(const std::string& path) : out_(path, std::ios::trunc), path_(path) {
  if (!out_) throw io_error("csv: cannot open for writing: " + path);
  out_ << kLogHeader << '\n';
  out_.flush();
  if (!out_) throw io_error("csv: write failed: " + path);
}

void LogCsvWriter::append(const LogRow& row) {
  out_ << format_row(row) << '\n';
  out_.flush();
  if (!out_) throw io_error("csv: write failed: " + path_);
}

void write_log_csv(const std::string& path, const ConvergenceLog& log) {
  LogCsvWriter w(path);
  for (const auto& r : log.rows) w.append(r);
}

ConvergenceLog read_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("csv: cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader)
    throw io_error("csv: unexpected log header in " + path);
  ConvergenceLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_comma(line);
    if (cells.size() != 6) throw io_error("csv: malformed log row in " + path);
    LogRow r;
    r.iter = std::strtoll(cells[0].c_str(), nullptr, 10);
    r.rel_err = parse_number(cells[1], path);
    r.q_dist = parse_number(cells[2], path);
    r.tv = parse_number(cells[3], path);
    r.residual = parse_number(cells[4], path);
    r.seconds = parse_number(cells[5], path);
    log.rows.push_back(r);
  }
  return log;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("csv: cannot open for writing: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("csv: row width does not match column count");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt_g17(row[i]);
    out << '\n';
  }
  out.flush();
  if (!out) throw io_error("csv: write failed: " + path);
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("csv: cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("csv: empty file: " + path);
  auto columns = split_comma(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_comma(line);
    if (cells.size() != columns.size()) throw io_error("csv: ragged row in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, path));
    rows.push_back(std::move(row));
  }
  return {columns, rows};
}

}  // namespace tvcs

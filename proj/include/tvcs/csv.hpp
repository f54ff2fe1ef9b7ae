#pragma once
// CSV persistence for convergence logs and generic numeric tables.  Doubles
// round-trip exactly (%.17g); missing values are written as nan.

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "tvcs/solvers.hpp"

namespace tvcs {

// Streams rows as they arrive and flushes each one, so an interrupted run
// leaves a parseable prefix.
class LogCsvWriter {
 public:
  explicit LogCsvWriter(const std::string& path);
  void append(const LogRow& row);

 private:
  std::ofstream out_;
  std::string path_;
};

void write_log_csv(const std::string& path, const ConvergenceLog& log);
ConvergenceLog read_log_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_csv(
    const std::string& path);

}  // namespace tvcs

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gdpa/metrics.hpp"

namespace gdpa::harness {

inline constexpr std::string_view kTraceHeader =
    "r,alpha,beta,gamma,f,F_beta,stationarity_sq,feasibility,slackness,lambda_norm";

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string format_trace(const std::vector<IterationRecord>& trace);
/// Throws std::invalid_argument naming the offending line on a bad header or row.
std::vector<IterationRecord> parse_trace(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& path, const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> read_trace(const std::filesystem::path& path);

/// Rows "r,x_0..x_{d-1},lambda_0..lambda_{m-1}" for every kept iterate.
void write_iterates(const std::filesystem::path& path, const std::vector<Vector>& xs,
                    const std::vector<Vector>& lambdas);
struct IterateTable {
  std::size_t dim = 0;
  std::size_t num_constraints = 0;
  std::vector<Vector> xs;
  std::vector<Vector> lambdas;
};
IterateTable read_iterates(const std::filesystem::path& path);

}  // namespace gdpa::harness

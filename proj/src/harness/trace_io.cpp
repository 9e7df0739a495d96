#include "gdpa/harness/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gdpa::harness {

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse \"" + std::string{field} +
                                "\"");
  }
  return value;
}

// Yields lines without their terminator; a trailing empty line is dropped.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::logic_error("format_double: buffer too small");
  return std::string(buf.data(), ptr);
}

std::string format_trace(const std::vector<IterationRecord>& trace) {
  std::string out{kTraceHeader};
  out += '\n';
  for (const IterationRecord& rec : trace) {
    out += std::to_string(rec.r);
    for (double v : {rec.alpha, rec.beta, rec.gamma, rec.f_value, rec.F_beta_value, rec.stationarity_sq,
                     rec.feasibility, rec.slackness, rec.lambda_norm}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<IterationRecord> parse_trace(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kTraceHeader) {
    throw std::invalid_argument("line 1: expected header \"" + std::string{kTraceHeader} + "\"");
  }
  std::vector<IterationRecord> trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = split_line(lines[i]);
    if (fields.size() != 10) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 10 fields, got " +
                                  std::to_string(fields.size()));
    }
    IterationRecord rec;
    rec.r = parse_number<std::size_t>(fields[0], line_no);
    double* dst[] = {&rec.alpha,           &rec.beta,        &rec.gamma,     &rec.f_value,
                     &rec.F_beta_value,    &rec.stationarity_sq, &rec.feasibility, &rec.slackness,
                     &rec.lambda_norm};
    for (std::size_t k = 0; k < 9; ++k) *dst[k] = parse_number<double>(fields[k + 1], line_no);
    trace.push_back(rec);
  }
  return trace;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out{path, std::ios::binary | std::ios::trunc};
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trace(const std::filesystem::path& path, const std::vector<IterationRecord>& trace) {
  write_text_file(path, format_trace(trace));
}

std::vector<IterationRecord> read_trace(const std::filesystem::path& path) {
  try {
    return parse_trace(read_text_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_iterates(const std::filesystem::path& path, const std::vector<Vector>& xs,
                    const std::vector<Vector>& lambdas) {
  if (xs.size() != lambdas.size()) throw std::invalid_argument("write_iterates: history lengths differ");
  const std::size_t d = xs.empty() ? 0 : xs.front().size();
  const std::size_t m = lambdas.empty() ? 0 : lambdas.front().size();
  std::string out = "r";
  for (std::size_t i = 0; i < d; ++i) out += ",x" + std::to_string(i);
  for (std::size_t i = 0; i < m; ++i) out += ",lambda" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out += std::to_string(k + 1);
    for (double v : xs[k]) out += ',' + format_double(v);
    for (double v : lambdas[k]) out += ',' + format_double(v);
    out += '\n';
  }
  write_text_file(path, out);
}

IterateTable read_iterates(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument(path.string() + ": empty iterate file");
  IterateTable table;
  const auto header = split_line(lines.front());
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k].substr(0, 1) == "x") {
      ++table.dim;
    } else {
      ++table.num_constraints;
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_line(lines[i]);
    if (fields.size() != header.size()) {
      throw std::invalid_argument(path.string() + ": line " + std::to_string(i + 1) + " is ragged");
    }
    Vector x(table.dim);
    Vector lambda(table.num_constraints);
    for (std::size_t k = 0; k < table.dim; ++k) x[k] = parse_number<double>(fields[1 + k], i + 1);
    for (std::size_t k = 0; k < table.num_constraints; ++k) {
      lambda[k] = parse_number<double>(fields[1 + table.dim + k], i + 1);
    }
    table.xs.push_back(std::move(x));
    table.lambdas.push_back(std::move(lambda));
  }
  return table;
}

}  // namespace gdpa::harness

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gdpa/problems.hpp"

namespace gdpa::problems {

void MnpcDataset::validate() const {
  if (num_classes < 2) throw std::invalid_argument("dataset: need at least two classes");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].features.size() != feature_dim) {
      throw std::invalid_argument("dataset: sample " + std::to_string(k) + " has " +
                                  std::to_string(samples[k].features.size()) + " features, expected " +
                                  std::to_string(feature_dim));
    }
    if (samples[k].label >= num_classes) {
      throw std::invalid_argument("dataset: sample " + std::to_string(k) + " has label out of range");
    }
  }
}

std::vector<std::size_t> MnpcDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const Sample& s : samples) {
    if (s.label < num_classes) ++counts[s.label];
  }
  return counts;
}

MnpcDataset generate_synthetic_mnpc(std::uint64_t seed, std::size_t num_classes, std::size_t d_in,
                                    std::size_t per_class, double noise_std) {
  if (num_classes == 0 || d_in == 0 || per_class == 0) {
    throw std::invalid_argument("synthetic dataset: sizes must be positive");
  }
  if (!(noise_std >= 0.0)) throw std::invalid_argument("synthetic dataset: noise_std must be >= 0");
  std::mt19937_64 rng{seed};
  std::normal_distribution<double> normal{0.0, 1.0};

  std::vector<Vector> means(num_classes, Vector(d_in));
  for (Vector& mean : means) {
    double len = 0.0;
    while (len < 1e-8) {
      for (double& v : mean) v = normal(rng);
      len = norm2(mean);
    }
    for (double& v : mean) v *= 2.0 / len;
  }

  MnpcDataset out;
  out.num_classes = num_classes;
  out.feature_dim = d_in;
  std::ostringstream src;
  src << "synthetic-gaussian(seed=" << seed << ", noise_std=" << noise_std << ")";
  out.source = src.str();
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t k = 0; k < per_class; ++k) {
      Sample s{means[c], c};
      if (noise_std > 0.0) {
        for (double& v : s.features) v += noise_std * normal(rng);
      }
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::invalid_argument parse_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  return std::invalid_argument(path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

MnpcDataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file " + path.string());

  MnpcDataset out;
  out.source = "csv(" + path.string() + ")";
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_dim = false;
  std::size_t max_label = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    if (!have_header) {
      have_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (row.back() == ',') fields.emplace_back();
    if (fields.size() < 2) throw parse_error(path, line_no, "expected a class id and at least one feature");

    Sample s;
    const std::string& id = fields[0];
    auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), s.label);
    if (ec != std::errc{} || ptr != id.data() + id.size()) {
      throw parse_error(path, line_no, "invalid class id '" + id + "'");
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const std::string& f = fields[k];
      double v = 0.0;
      auto [p, e] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (e != std::errc{} || p != f.data() + f.size() || !std::isfinite(v)) {
        throw parse_error(path, line_no, "invalid feature value '" + f + "' in column " + std::to_string(k + 1));
      }
      s.features.push_back(v);
    }
    if (!have_dim) {
      out.feature_dim = s.features.size();
      have_dim = true;
    } else if (s.features.size() != out.feature_dim) {
      throw parse_error(path, line_no,
                        "ragged row: expected " + std::to_string(out.feature_dim) + " features, found " +
                            std::to_string(s.features.size()));
    }
    max_label = std::max(max_label, s.label);
    out.samples.push_back(std::move(s));
  }
  if (!have_header) throw std::invalid_argument(path.string() + ": empty file (no header line)");
  if (out.samples.empty()) throw std::invalid_argument(path.string() + ": empty dataset (header only)");
  out.num_classes = max_label + 1;
  return out;
}

}  // namespace gdpa::problems

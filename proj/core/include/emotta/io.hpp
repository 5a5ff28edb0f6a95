#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emotta/types.hpp"

namespace emotta::io {

/// Binary embedding file layout: 8-byte magic "EMOTTA01", 32-bit unsigned
/// little-endian dim, 64-bit unsigned little-endian count, then count*dim
/// IEEE-754 binary32 little-endian values, row-major. Files with a .csv
/// extension use a plain-text fallback instead (one vector per line).
inline constexpr char kEmbeddingMagic[8] = {'E', 'M', 'O', 'T', 'T', 'A', '0', '1'};

void write_embeddings(const std::filesystem::path& path, const std::vector<Embedding>& vectors);
std::vector<Embedding> read_embeddings(const std::filesystem::path& path);

/// One base-10 integer per line; blank lines and '#' comments ignored.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// Flat key = value text config; unspecified keys keep the defaults.
HyperParams read_config(const std::filesystem::path& path);
HyperParams parse_config_text(const std::string& text);

/// The full effective configuration as key/value pairs, for report echoes.
std::vector<std::pair<std::string, std::string>> config_echo(const HyperParams& hyper);

/// One experiment's results.
struct Report {
    std::string name;
    double accuracy = 0.0;
    Vector per_class_accuracy;     // K, NaN-free; -1 marks classes absent from labels
    Matrix confusion;              // K x K, rows = true class, cols = predicted
    std::optional<double> mu_error;  // mean over classes of ||mu_hat - true_mean||
    std::vector<std::pair<std::string, std::string>> config;
};

void write_report(const std::filesystem::path& path, const std::vector<Report>& reports);
std::string format_report(const Report& report);

/// Binary64 snapshot of the full adapter state; round-trips exactly.
void write_state(const std::filesystem::path& path, const AdapterState& state);
AdapterState read_state(const std::filesystem::path& path);

}  // namespace emotta::io

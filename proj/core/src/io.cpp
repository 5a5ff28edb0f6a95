#include "emotta/io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace emotta::io {

namespace {

constexpr char kStateMagic[8] = {'E', 'M', 'O', 'T', 'T', 'A', 'S', '1'};

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("truncated file while reading ") + what);
    return value;
}

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

void write_embeddings_csv(const std::filesystem::path& path,
                          const std::vector<Embedding>& vectors) {
    auto out = open_out(path, false);
    out.precision(17);
    for (const auto& v : vectors) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (i > 0) out << ',';
            out << v[i];
        }
        out << '\n';
    }
}

std::vector<Embedding> read_embeddings_csv(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::vector<Embedding> vectors;
    std::string line;
    std::size_t line_no = 0;
    Eigen::Index dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError("non-numeric value '" + cell + "' at line " +
                              std::to_string(line_no) + " of " + path.string());
            }
        }
        if (dim < 0) dim = static_cast<Eigen::Index>(row.size());
        if (static_cast<Eigen::Index>(row.size()) != dim) {
            throw IoError("inconsistent dimension at line " + std::to_string(line_no) +
                          ": expected " + std::to_string(dim) + ", got " +
                          std::to_string(row.size()));
        }
        vectors.push_back(Eigen::Map<Vector>(row.data(), dim));
    }
    return vectors;
}

}  // namespace

void write_embeddings(const std::filesystem::path& path, const std::vector<Embedding>& vectors) {
    if (is_csv(path)) {
        write_embeddings_csv(path, vectors);
        return;
    }
    const std::uint32_t dim =
        vectors.empty() ? 1u : static_cast<std::uint32_t>(vectors[0].size());
    for (const auto& v : vectors) {
        if (static_cast<std::uint32_t>(v.size()) != dim) {
            throw DimensionMismatchError(dim, v.size());
        }
    }
    auto out = open_out(path, true);
    out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
    write_pod(out, dim);
    write_pod(out, static_cast<std::uint64_t>(vectors.size()));
    for (const auto& v : vectors) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            write_pod(out, static_cast<float>(v[i]));
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Embedding> read_embeddings(const std::filesystem::path& path) {
    if (is_csv(path)) return read_embeddings_csv(path);

    auto in = open_in(path, true);
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0) {
        throw IoError("bad magic in " + path.string() + " (not an embedding file)");
    }
    const auto dim = read_pod<std::uint32_t>(in, "dim");
    const auto count = read_pod<std::uint64_t>(in, "count");
    if (dim < 1) throw IoError("invalid dim 0 in " + path.string());

    // Validate count against the actual payload size before allocating.
    const std::uint64_t header_bytes = 8 + 4 + 8;
    const auto file_size = static_cast<std::uint64_t>(std::filesystem::file_size(path));
    if (file_size < header_bytes) {
        throw IoError("truncated header in " + path.string());
    }
    const std::uint64_t payload = file_size - header_bytes;
    const std::uint64_t expected = count * static_cast<std::uint64_t>(dim) * 4u;
    if (count != 0 && (expected / (static_cast<std::uint64_t>(dim) * 4u)) != count) {
        throw IoError("embedding count overflows in " + path.string());
    }
    if (payload < expected) {
        const std::uint64_t rows_present = payload / (static_cast<std::uint64_t>(dim) * 4u);
        throw IoError("truncated payload in " + path.string() + ": header claims " +
                      std::to_string(count) + " rows, " + std::to_string(rows_present) +
                      " present (" + std::to_string(expected) + " bytes expected, " +
                      std::to_string(payload) + " found)");
    }

    std::vector<Embedding> vectors;
    vectors.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) {
        Embedding v(dim);
        for (std::uint32_t i = 0; i < dim; ++i) {
            v[i] = static_cast<double>(read_pod<float>(in, "payload"));
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim whitespace.
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(begin, end - begin + 1);
        if (token[0] == '#') continue;
        try {
            std::size_t pos = 0;
            const int value = std::stoi(token, &pos);
            if (pos != token.size()) throw std::invalid_argument(token);
            labels.push_back(value);
        } catch (const std::exception&) {
            throw IoError("non-integer label '" + token + "' at line " +
                          std::to_string(line_no) + " of " + path.string());
        }
    }
    return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    auto out = open_out(path, false);
    for (int label : labels) out << label << '\n';
}

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "off" || value == "no") return false;
    throw ConfigError("unparseable boolean for key '" + key + "': " + value);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("unparseable value for key '" + key + "': " + value);
    }
}

}  // namespace

HyperParams parse_config_text(const std::string& text) {
    HyperParams hyper;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value', got: " + line);
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "alpha") {
            hyper.alpha = parse_double(key, value);
        } else if (key == "beta") {
            hyper.beta = parse_double(key, value);
        } else if (key == "epsilon") {
            hyper.epsilon = parse_double(key, value);
        } else if (key == "mean_update") {
            hyper.mean_update = parse_bool(key, value);
        } else if (key == "cov_update") {
            hyper.cov_update = parse_bool(key, value);
        } else if (key == "alm_prior_weighting") {
            hyper.alm_prior_weighting = parse_bool(key, value);
        } else if (key == "use_prior_in_prediction") {
            hyper.use_prior_in_prediction = parse_bool(key, value);
        } else if (key == "covariance_rule") {
            if (value == "literal") {
                hyper.covariance_rule = CovarianceRule::kLiteral;
            } else if (value == "convex") {
                hyper.covariance_rule = CovarianceRule::kConvex;
            } else {
                throw ConfigError("unknown covariance_rule value: " + value);
            }
        } else if (key == "refactor_period") {
            const double v = parse_double(key, value);
            if (v < 1) throw ConfigError("refactor_period must be >= 1");
            hyper.refactor_period = static_cast<std::uint64_t>(v);
        } else if (key == "normalize_embeddings") {
            hyper.normalize_embeddings = parse_bool(key, value);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    hyper.validate();
    return hyper;
}

HyperParams read_config(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::vector<std::pair<std::string, std::string>> config_echo(const HyperParams& hyper) {
    auto fmt = [](double v) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v;
        return ss.str();
    };
    return {
        {"alpha", fmt(hyper.alpha)},
        {"beta", fmt(hyper.beta)},
        {"epsilon", fmt(hyper.epsilon)},
        {"mean_update", hyper.mean_update ? "true" : "false"},
        {"cov_update", hyper.cov_update ? "true" : "false"},
        {"alm_prior_weighting", hyper.alm_prior_weighting ? "true" : "false"},
        {"use_prior_in_prediction", hyper.use_prior_in_prediction ? "true" : "false"},
        {"covariance_rule",
         hyper.covariance_rule == CovarianceRule::kLiteral ? "literal" : "convex"},
        {"refactor_period", std::to_string(hyper.refactor_period)},
        {"normalize_embeddings", hyper.normalize_embeddings ? "true" : "false"},
    };
}

std::string format_report(const Report& report) {
    std::ostringstream out;
    out.precision(12);
    out << "[experiment]\n";
    out << "name = " << report.name << '\n';
    out << "accuracy = " << report.accuracy << '\n';
    out << "per_class_accuracy =";
    for (Eigen::Index y = 0; y < report.per_class_accuracy.size(); ++y) {
        out << ' ' << report.per_class_accuracy[y];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
        out << "confusion_row_" << r << " =";
        for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
            out << ' ' << report.confusion(r, c);
        }
        out << '\n';
    }
    if (report.mu_error.has_value()) {
        out << "mu_error = " << *report.mu_error << '\n';
    }
    for (const auto& [key, value] : report.config) {
        out << "config." << key << " = " << value << '\n';
    }
    return out.str();
}

void write_report(const std::filesystem::path& path, const std::vector<Report>& reports) {
    auto out = open_out(path, false);
    for (const auto& report : reports) {
        out << format_report(report) << '\n';
    }
}

void write_state(const std::filesystem::path& path, const AdapterState& state) {
    auto out = open_out(path, true);
    out.write(kStateMagic, sizeof(kStateMagic));
    write_pod(out, static_cast<std::uint32_t>(state.dim()));
    write_pod(out, static_cast<std::uint32_t>(state.num_classes()));
    auto write_matrix = [&](const Matrix& m) {
        out.write(reinterpret_cast<const char*>(m.data()),
                  static_cast<std::streamsize>(sizeof(double) * m.size()));
    };
    write_matrix(state.mu);
    write_matrix(state.sigma);
    write_matrix(state.precision);
    write_matrix(state.pi);
    write_matrix(state.n_eff);
    write_pod(out, state.n_total);
    write_pod(out, static_cast<std::uint64_t>(state.samples_seen));
    write_pod(out, state.epsilon);
    write_pod(out, state.last_refactor_drift);
    if (!out) throw IoError("write failed: " + path.string());
}

AdapterState read_state(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kStateMagic, sizeof(magic)) != 0) {
        throw IoError("bad magic in " + path.string() + " (not a state file)");
    }
    const auto d = read_pod<std::uint32_t>(in, "dim");
    const auto k = read_pod<std::uint32_t>(in, "num_classes");
    if (d < 1 || k < 2) throw IoError("invalid state dimensions in " + path.string());
    // magic (8) + dims (4 + 4) + matrices + four trailing binary64 scalars (32)
    const std::uint64_t need = 8 + 4 + 4 + static_cast<std::uint64_t>(d) * k * 8 +
                               2ull * d * d * 8 + 2ull * k * 8 + 4ull * 8;
    if (std::filesystem::file_size(path) < need) {
        throw IoError("truncated state file: " + path.string());
    }

    AdapterState state;
    auto read_matrix = [&](Matrix& m, Eigen::Index rows, Eigen::Index cols) {
        m.resize(rows, cols);
        in.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(sizeof(double) * m.size()));
        if (!in) throw IoError("truncated state file: " + path.string());
    };
    read_matrix(state.mu, d, k);
    read_matrix(state.sigma, d, d);
    read_matrix(state.precision, d, d);
    Matrix tmp;
    read_matrix(tmp, k, 1);
    state.pi = tmp.col(0);
    read_matrix(tmp, k, 1);
    state.n_eff = tmp.col(0);
    state.n_total = read_pod<double>(in, "n_total");
    state.samples_seen = read_pod<std::uint64_t>(in, "samples_seen");
    state.epsilon = read_pod<double>(in, "epsilon");
    state.last_refactor_drift = read_pod<double>(in, "last_refactor_drift");
    return state;
}

}  // namespace emotta::io

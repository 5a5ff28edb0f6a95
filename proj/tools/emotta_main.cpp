// Command-line harness: synthetic stream generation, adaptation runs,
// ablation grids, and the view-ensemble baseline.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "emotta/adapter.hpp"
#include "emotta/io.hpp"
#include "emotta/synth.hpp"
#include "emotta/types.hpp"
#include "emotta/zeroshot.hpp"

namespace fs = std::filesystem;
using namespace emotta;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct LoadedData {
    PrototypeSet prototypes;
    std::vector<Embedding> stream;
    std::vector<int> labels;  // empty when not given
};

LoadedData load_inputs(const std::string& proto_path, const std::string& stream_path,
                       const std::string& labels_path, bool normalize) {
    LoadedData data;
    auto protos = io::read_embeddings(proto_path);
    if (protos.size() < 2) {
        throw InvalidPrototypeSetError("prototype file must hold K >= 2 vectors");
    }
    data.prototypes.prototypes.resize(protos[0].size(), protos.size());
    for (std::size_t y = 0; y < protos.size(); ++y) {
        if (protos[y].size() != data.prototypes.prototypes.rows()) {
            throw DimensionMismatchError(data.prototypes.prototypes.rows(), protos[y].size());
        }
        data.prototypes.prototypes.col(y) = protos[y];
        data.prototypes.class_names.push_back("class_" + std::to_string(y));
    }
    data.stream = io::read_embeddings(stream_path);
    if (data.stream.empty()) throw IoError("stream file is empty: " + stream_path);
    for (const auto& x : data.stream) {
        validate_dimensions(data.prototypes, x);
    }
    if (normalize) {
        data.prototypes.normalize();
        for (auto& x : data.stream) x = l2_normalized(x);
    }
    if (!labels_path.empty()) {
        data.labels = io::read_labels(labels_path);
        if (data.labels.size() != data.stream.size()) {
            throw IoError("label count (" + std::to_string(data.labels.size()) +
                          ") does not match stream length (" +
                          std::to_string(data.stream.size()) + ")");
        }
    }
    return data;
}

io::Report evaluate(const std::string& name, const std::vector<int>& predictions,
                    const std::vector<int>& labels, Eigen::Index k) {
    io::Report report;
    report.name = name;
    report.confusion = Matrix::Zero(k, k);
    report.per_class_accuracy = Vector::Constant(k, -1.0);
    if (labels.empty()) return report;

    Eigen::VectorXi totals = Eigen::VectorXi::Zero(k);
    Eigen::VectorXi hits = Eigen::VectorXi::Zero(k);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < predictions.size(); ++t) {
        const int truth = labels[t];
        const int pred = predictions[t];
        if (truth < 0 || truth >= k) throw IoError("label out of range: " + std::to_string(truth));
        report.confusion(truth, pred) += 1.0;
        totals[truth] += 1;
        if (pred == truth) {
            hits[truth] += 1;
            ++correct;
        }
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
    for (Eigen::Index y = 0; y < k; ++y) {
        if (totals[y] > 0) {
            report.per_class_accuracy[y] =
                static_cast<double>(hits[y]) / static_cast<double>(totals[y]);
        }
    }
    return report;
}

void print_report(const io::Report& report) {
    std::printf("%-24s accuracy %.4f\n", report.name.c_str(), report.accuracy);
    if (report.mu_error.has_value()) {
        std::printf("%-24s mu_error %.6f\n", report.name.c_str(), *report.mu_error);
    }
}

Matrix read_truth_means(const std::string& path, Eigen::Index d, Eigen::Index k) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth manifest: " + path);
    Matrix means = Matrix::Zero(d, k);
    std::vector<bool> seen(k, false);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find("true_mean_");
        if (pos != 0) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const int y = std::stoi(line.substr(10, eq - 10));
        if (y < 0 || y >= k) throw IoError("truth manifest class out of range");
        std::stringstream ss(line.substr(eq + 1));
        std::string cell;
        Eigen::Index i = 0;
        while (std::getline(ss, cell, ',') && i < d) {
            means(i++, y) = std::stod(cell);
        }
        if (i != d) throw IoError("truth manifest mean has wrong dimension");
        seen[y] = true;
    }
    for (Eigen::Index y = 0; y < k; ++y) {
        if (!seen[y]) throw IoError("truth manifest missing class " + std::to_string(y));
    }
    return means;
}

double mean_mu_error(const Matrix& mu, const Matrix& truth) {
    // Compare directions: estimated means are convex blends of unit vectors and
    // shrink in magnitude, so a raw distance would never approach zero even for
    // a perfectly recovered direction.
    double total = 0.0;
    for (Eigen::Index y = 0; y < mu.cols(); ++y) {
        total += (l2_normalized(mu.col(y)) - truth.col(y)).norm();
    }
    return total / static_cast<double>(mu.cols());
}

void write_trace_file(const std::string& path, const std::vector<adapter::StepTrace>& traces) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open trace file for writing: " + path);
    out.precision(12);
    out << "# index\tpredicted\tentropy\tweight\tn_total_after\tmu_drift...\n";
    for (const auto& trace : traces) {
        out << trace.sample_index << '\t' << trace.outcome.predicted_class << '\t'
            << trace.outcome.entropy << '\t' << trace.outcome.weight << '\t'
            << trace.n_total_after;
        for (Eigen::Index y = 0; y < trace.mu_drift.size(); ++y) {
            out << '\t' << trace.mu_drift[y];
        }
        out << '\n';
    }
}

struct RunArgs {
    std::string prototypes;
    std::string stream;
    std::string labels;
    std::string config;
    std::string truth;
    std::string trace;
    std::string report;
};

HyperParams load_hyper(const std::string& config_path) {
    return config_path.empty() ? HyperParams{} : io::read_config(config_path);
}

io::Report run_variant(const std::string& name, const LoadedData& data,
                       const HyperParams& hyper, const Matrix* truth_means,
                       std::vector<adapter::StepTrace>* traces_out = nullptr) {
    AdapterState state = adapter::init(data.prototypes, hyper);
    auto traces = adapter::run_stream(state, data.stream, data.prototypes, hyper);
    std::vector<int> predictions;
    predictions.reserve(traces.size());
    for (const auto& trace : traces) predictions.push_back(trace.outcome.predicted_class);

    io::Report report = evaluate(name, predictions, data.labels,
                                 data.prototypes.num_classes());
    if (truth_means != nullptr) {
        report.mu_error = mean_mu_error(state.mu, *truth_means);
    }
    report.config = io::config_echo(hyper);
    if (traces_out != nullptr) *traces_out = std::move(traces);
    return report;
}

int cmd_gen(const synth::ShiftSpec& spec, const std::string& out_dir) {
    auto data = synth::generate(spec);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::vector<Embedding> protos;
    for (Eigen::Index y = 0; y < data.prototypes.num_classes(); ++y) {
        protos.push_back(data.prototypes.prototypes.col(y));
    }
    io::write_embeddings(dir / "prototypes.emb", protos);
    io::write_embeddings(dir / "stream.emb", data.stream);
    io::write_labels(dir / "labels.txt", data.labels);

    std::ofstream truth(dir / "truth.txt");
    if (!truth) throw IoError("cannot write truth manifest");
    truth.precision(17);
    truth << "# synthetic stream truth manifest\n";
    truth << "classes = " << spec.num_classes << '\n';
    truth << "dim = " << spec.dim << '\n';
    truth << "count = " << spec.samples_per_stream << '\n';
    truth << "shift = " << spec.shift_magnitude << '\n';
    truth << "noise = " << spec.within_class_sigma << '\n';
    truth << "seed = " << spec.seed << '\n';
    for (Eigen::Index y = 0; y < data.true_means.cols(); ++y) {
        truth << "true_mean_" << y << " =";
        for (Eigen::Index i = 0; i < data.true_means.rows(); ++i) {
            truth << (i == 0 ? " " : ",") << data.true_means(i, y);
        }
        truth << '\n';
    }
    std::printf("wrote prototypes.emb stream.emb labels.txt truth.txt to %s\n",
                out_dir.c_str());
    return kExitOk;
}

int cmd_run(const RunArgs& args) {
    const HyperParams hyper = load_hyper(args.config);
    const LoadedData data = load_inputs(args.prototypes, args.stream, args.labels,
                                        hyper.normalize_embeddings);
    Matrix truth_means;
    const bool have_truth = !args.truth.empty();
    if (have_truth) {
        truth_means = read_truth_means(args.truth, data.prototypes.dim(),
                                       data.prototypes.num_classes());
    }

    std::vector<adapter::StepTrace> traces;
    io::Report report = run_variant("emo-tta", data, hyper,
                                    have_truth ? &truth_means : nullptr, &traces);
    if (!args.trace.empty()) write_trace_file(args.trace, traces);

    if (!data.labels.empty()) {
        print_report(report);
        std::printf("per-class:");
        for (Eigen::Index y = 0; y < report.per_class_accuracy.size(); ++y) {
            std::printf(" %.4f", report.per_class_accuracy[y]);
        }
        std::printf("\n");
    } else {
        std::printf("processed %zu samples (no labels given)\n", data.stream.size());
    }
    if (!args.report.empty()) io::write_report(args.report, {report});
    return kExitOk;
}

int cmd_ablate(const RunArgs& args) {
    const HyperParams base = load_hyper(args.config);
    const LoadedData data = load_inputs(args.prototypes, args.stream, args.labels,
                                        base.normalize_embeddings);
    Matrix truth_means;
    const bool have_truth = !args.truth.empty();
    if (have_truth) {
        truth_means = read_truth_means(args.truth, data.prototypes.dim(),
                                       data.prototypes.num_classes());
    }
    const Matrix* truth = have_truth ? &truth_means : nullptr;

    HyperParams no_mean = base;
    no_mean.mean_update = false;
    HyperParams no_cov = base;
    no_cov.cov_update = false;
    HyperParams no_alm = base;
    no_alm.alm_prior_weighting = false;
    no_alm.use_prior_in_prediction = false;
    HyperParams zero_shot = base;
    zero_shot.mean_update = false;
    zero_shot.cov_update = false;
    zero_shot.alm_prior_weighting = false;
    zero_shot.alpha = 0.0;

    std::vector<io::Report> reports;
    reports.push_back(run_variant("full", data, base, truth));
    reports.push_back(run_variant("no_mean_update", data, no_mean, truth));
    reports.push_back(run_variant("no_cov_update", data, no_cov, truth));
    reports.push_back(run_variant("no_alm_priors", data, no_alm, truth));
    reports.push_back(run_variant("zero_shot", data, zero_shot, truth));

    std::printf("%-18s %10s %10s\n", "variant", "accuracy", "mu_error");
    for (const auto& report : reports) {
        if (report.mu_error.has_value()) {
            std::printf("%-18s %10.4f %10.6f\n", report.name.c_str(), report.accuracy,
                        *report.mu_error);
        } else {
            std::printf("%-18s %10.4f %10s\n", report.name.c_str(), report.accuracy, "-");
        }
    }
    if (!args.report.empty()) io::write_report(args.report, reports);
    return kExitOk;
}

int cmd_baseline(const RunArgs& args, const zeroshot::ViewEnsembleConfig& config,
                 std::uint64_t seed) {
    const HyperParams hyper = load_hyper(args.config);
    const LoadedData data = load_inputs(args.prototypes, args.stream, args.labels,
                                        hyper.normalize_embeddings);
    std::vector<int> predictions;
    predictions.reserve(data.stream.size());
    for (std::size_t t = 0; t < data.stream.size(); ++t) {
        auto views = zeroshot::make_views(data.stream[t], config, seed + t);
        std::vector<Vector> view_probs;
        view_probs.reserve(views.size());
        for (const auto& view : views) {
            view_probs.push_back(
                zeroshot::softmax_probs(zeroshot::cosine_logits(view, data.prototypes)));
        }
        Vector ensembled = zeroshot::view_ensemble(view_probs, config);
        predictions.push_back(argmax_index(ensembled));
    }
    io::Report report = evaluate("view_ensemble", predictions, data.labels,
                                 data.prototypes.num_classes());
    report.config = io::config_echo(hyper);
    report.config.emplace_back("views", std::to_string(config.num_views));
    report.config.emplace_back("keep", std::to_string(config.keep_fraction));
    report.config.emplace_back("view_noise", std::to_string(config.view_noise_sigma));
    report.config.emplace_back("seed", std::to_string(seed));
    print_report(report);
    if (!args.report.empty()) io::write_report(args.report, {report});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emotta: streaming test-time adaptation over embedding streams"};
    app.require_subcommand(1);

    // gen
    synth::ShiftSpec spec;
    std::string out_dir;
    std::string prior_csv;
    auto* gen = app.add_subcommand("gen", "generate a synthetic domain-shift stream");
    gen->add_option("--classes", spec.num_classes, "number of classes K")->required();
    gen->add_option("--dim", spec.dim, "embedding dimension d")->required();
    gen->add_option("--count", spec.samples_per_stream, "stream length")->required();
    gen->add_option("--shift", spec.shift_magnitude, "||delta|| shift magnitude")->required();
    gen->add_option("--noise", spec.within_class_sigma, "within-class sigma")->required();
    gen->add_option("--prior", prior_csv, "comma-separated class prior (default uniform)");
    gen->add_option("--seed", spec.seed, "RNG seed")->required();
    gen->add_option("--out", out_dir, "output directory")->required();

    // run / ablate / baseline share most flags
    RunArgs run_args;
    auto add_common = [&](CLI::App* cmd, bool labels_required) {
        cmd->add_option("--prototypes", run_args.prototypes, "prototype embedding file")
            ->required();
        cmd->add_option("--stream", run_args.stream, "stream embedding file")->required();
        auto* labels = cmd->add_option("--labels", run_args.labels, "label file");
        if (labels_required) labels->required();
        cmd->add_option("--config", run_args.config, "hyperparameter config file");
        cmd->add_option("--truth", run_args.truth, "truth manifest (enables mu_error)");
        cmd->add_option("--report", run_args.report, "structured report output file");
    };

    auto* run = app.add_subcommand("run", "run the adaptation engine over a stream");
    add_common(run, false);
    run->add_option("--trace", run_args.trace, "per-step trace output file");

    auto* ablate = app.add_subcommand("ablate", "run the five-variant ablation grid");
    add_common(ablate, true);

    zeroshot::ViewEnsembleConfig view_config;
    std::uint64_t baseline_seed = 0;
    auto* baseline = app.add_subcommand("baseline", "entropy-filtered view-ensemble baseline");
    add_common(baseline, false);
    baseline->add_option("--views", view_config.num_views, "number of views M")->required();
    baseline->add_option("--keep", view_config.keep_fraction, "kept fraction rho")->required();
    baseline->add_option("--view-noise", view_config.view_noise_sigma, "view noise sigma")
        ->required();
    baseline->add_option("--seed", baseline_seed, "RNG seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            if (!prior_csv.empty()) {
                std::vector<double> prior;
                std::stringstream ss(prior_csv);
                std::string cell;
                while (std::getline(ss, cell, ',')) prior.push_back(std::stod(cell));
                spec.class_prior =
                    Eigen::Map<Vector>(prior.data(), static_cast<Eigen::Index>(prior.size()));
            }
            spec.validate();
            return cmd_gen(spec, out_dir);
        }
        if (run->parsed()) return cmd_run(run_args);
        if (ablate->parsed()) return cmd_ablate(run_args);
        if (baseline->parsed()) return cmd_baseline(run_args, view_config, baseline_seed);
    } catch (const InvalidArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidPrototypeSetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

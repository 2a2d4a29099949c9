#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttrz/container.hpp"
#include "ttrz/dataset.hpp"
#include "ttrz/nn.hpp"
#include "ttrz/retraction.hpp"
#include "ttrz/rgd.hpp"
#include "ttrz/run_config.hpp"
#include "ttrz/trace_io.hpp"
#include "ttrz/version.hpp"

using namespace ttrz;

namespace {

// Exit codes: 0 success, 2 usage, 3 I/O, 4 numerical failure, 5 a requested
// theory check found a violated inequality.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kNumerical = 4;
constexpr int kCheckFailed = 5;

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        // Config, shape, label, index problems are all usage errors here.
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
}

RankProfile ranks_from_flag(const std::string& flag) {
    return RankProfile(parse_size_list(flag));
}

std::string ranks_to_string(const RankProfile& ranks) {
    std::string out;
    for (std::size_t k = 0; k < ranks.ranks().size(); ++k) {
        if (k) out.push_back(',');
        out += std::to_string(ranks.rank(k));
    }
    return out;
}

std::string dims_to_string(const std::vector<std::size_t>& dims, char sep = ',') {
    std::string out;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k) out.push_back(sep);
        out += std::to_string(dims[k]);
    }
    return out;
}

struct ManifestInfo {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    nlohmann::json config;
    double wall_seconds = 0.0;
};

void write_manifest(const ManifestInfo& info) {
    nlohmann::json m;
    m["command"] = info.command;
    m["config"] = info.config;
    m["inputs"] = info.inputs;
    m["outputs"] = info.outputs;
    m["library_version"] = kVersion;
    m["wall_clock_seconds"] = info.wall_seconds;
    const std::string path = info.outputs.front() + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << m.dump(2) << "\n";
}

class WallClock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double dense_rel_error(const Matrix& reference, const TTMatrix& m) {
    const Matrix full = tt_matrix_full(m);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = full.data[i] - reference.data[i];
        num += d * d;
        den += reference.data[i] * reference.data[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double dense_rel_error(const DenseTensor& reference, const TTVector& w) {
    const DenseTensor full = tt_full(w);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = full[i] - reference[i];
        num += d * d;
        den += reference[i] * reference[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void print_retract_report(const RetractReport& report, const char* label) {
    std::printf("mode: %s\n", label);
    std::printf("ranks: %s -> %s\n", ranks_to_string(report.input_ranks).c_str(),
                ranks_to_string(report.output_ranks).c_str());
    std::printf("core  discarded_energy\n");
    for (std::size_t k = 0; k < report.per_core_discarded_energy.size(); ++k)
        std::printf("%4zu  %.6e\n", k, report.per_core_discarded_energy[k]);
    std::printf("total relative error estimate: %.6e\n", report.total_relative_error_estimate);
}

TrainConfig train_config_from(const KeyValueConfig& file_cfg, const CLI::App* cmd) {
    KeyValueConfig merged = file_cfg;
    const auto override_if = [&](const std::string& flag, const char* key) {
        if (cmd->count(flag) > 0) merged.set(key, cmd->get_option(flag)->as<std::string>());
    };
    override_if("--lr", "lr");
    override_if("--epochs", "epochs");
    override_if("--batch", "batch");
    override_if("--seed", "seed");
    override_if("--optimizer", "optimizer");
    return train_config_from_config(merged);
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
    std::string input, output;
    std::string in_factors, out_factors, ranks;
    std::size_t max_rank = 0;
};

int cmd_decompose(const DecomposeArgs& args) {
    WallClock clock;
    const Payload payload = read_container(args.input);
    const auto* dense = std::get_if<DenseTensor>(&payload);
    if (!dense) throw ConfigError("decompose expects a dense container");

    const bool matrix_mode = !args.in_factors.empty() || !args.out_factors.empty();
    if (args.ranks.empty() && args.max_rank == 0)
        throw ConfigError("decompose needs --ranks or --max-rank");

    Payload result;
    const std::size_t params_before = dense->size();
    std::size_t params_after = 0;
    double recon_error = 0.0;

    if (matrix_mode) {
        if (args.in_factors.empty() || args.out_factors.empty())
            throw ConfigError("decompose needs both --in-factors and --out-factors");
        if (dense->shape().order() != 2)
            throw ConfigError("matrix decomposition expects a 2-mode dense container");
        const ModeFactorization in_f(parse_size_list(args.in_factors));
        const ModeFactorization out_f(parse_size_list(args.out_factors));
        const Matrix w(dense->shape().dim(0), dense->shape().dim(1), dense->data());

        const RankProfile cap = args.ranks.empty()
                                    ? RankProfile::uniform(in_f.order(), args.max_rank)
                                    : ranks_from_flag(args.ranks);
        TTMatrix m = tt_matrix_from_dense(w, in_f, out_f, cap);
        params_after = param_count(m);
        recon_error = dense_rel_error(w, m);
        std::printf("kind: tt_matrix\n");
        std::printf("modes: %s -> %s\n", dims_to_string(m.in_shape().dims(), 'x').c_str(),
                    dims_to_string(m.out_shape().dims(), 'x').c_str());
        std::printf("ranks: %s\n", ranks_to_string(m.rank_profile()).c_str());
        result = std::move(m);
    } else {
        const RankProfile cap = args.ranks.empty()
                                    ? RankProfile::uniform(dense->shape().order(), args.max_rank)
                                    : ranks_from_flag(args.ranks);
        TTVector w = tt_svd(*dense, cap);
        params_after = param_count(w);
        recon_error = dense_rel_error(*dense, w);
        std::printf("kind: tt_vector\n");
        std::printf("modes: %s\n", dims_to_string(w.shape().dims(), 'x').c_str());
        std::printf("ranks: %s\n", ranks_to_string(w.rank_profile()).c_str());
        result = std::move(w);
    }

    std::printf("params before: %zu\n", params_before);
    std::printf("params after: %zu\n", params_after);
    std::printf("compression ratio: %.1fx\n",
                static_cast<double>(params_before) / static_cast<double>(params_after));
    std::printf("reconstruction error: %.3e (relative)\n", recon_error);

    write_container(args.output, result);
    ManifestInfo info;
    info.command = "decompose";
    info.inputs = {args.input};
    info.outputs = {args.output};
    info.config = {{"in_factors", args.in_factors},
                   {"out_factors", args.out_factors},
                   {"ranks", args.ranks},
                   {"max_rank", args.max_rank}};
    info.wall_seconds = clock.seconds();
    write_manifest(info);
    return kOk;
}

// -------------------------------------------------------------------- round

struct RoundArgs {
    std::string input, output;
    std::string ranks;
    std::size_t max_rank = 0;
    std::string mode = "orthogonal";
};

template <typename TT>
std::pair<TT, RetractReport> round_one(const TT& tt, const RoundArgs& args, bool literal) {
    if (literal) {
        if (args.max_rank == 0)
            throw ConfigError("literal rounding takes a single --max-rank");
        return retract_literal(tt, args.max_rank);
    }
    if (!args.ranks.empty()) return retract_orthogonal(tt, ranks_from_flag(args.ranks));
    return retract_orthogonal(tt, args.max_rank);
}

template <typename TT>
void round_payload(const TT& tt, const RoundArgs& args) {
    if (args.ranks.empty() && args.max_rank == 0)
        throw ConfigError("round needs --ranks or --max-rank");
    if (!args.ranks.empty() && ranks_from_flag(args.ranks).order() != tt.order())
        throw ConfigError("--ranks must list K+1 values for a K-core tensor");

    if (args.mode == "literal" || args.mode == "both") {
        auto [lit, report] = round_one(tt, args, true);
        print_retract_report(report, "literal");
        const std::string path = args.mode == "both" ? args.output + ".literal" : args.output;
        write_container(path, Payload(lit));
        if (args.mode == "literal") return;
    }
    auto [ortho, report] = round_one(tt, args, false);
    print_retract_report(report, "orthogonal");
    write_container(args.output, Payload(ortho));
}

int cmd_round(const RoundArgs& args) {
    WallClock clock;
    if (args.mode != "literal" && args.mode != "orthogonal" && args.mode != "both")
        throw ConfigError("--mode must be literal, orthogonal, or both");
    const Payload payload = read_container(args.input);

    if (const auto* ttv = std::get_if<TTVector>(&payload))
        round_payload(*ttv, args);
    else if (const auto* ttm = std::get_if<TTMatrix>(&payload))
        round_payload(*ttm, args);
    else
        throw ConfigError("round expects a tt_vector or tt_matrix container");

    ManifestInfo info;
    info.command = "round";
    info.inputs = {args.input};
    info.outputs = {args.output};
    if (args.mode == "both") info.outputs.push_back(args.output + ".literal");
    info.config = {{"ranks", args.ranks}, {"max_rank", args.max_rank}, {"mode", args.mode}};
    info.wall_seconds = clock.seconds();
    write_manifest(info);
    return kOk;
}

// ----------------------------------------------------------------- compress

struct CompressArgs {
    std::string input, output, trace_path;
    std::string target_ranks;
    double eta = 1.0;
    std::size_t steps = 20;
    double stop_tol = -1.0;
    bool check_bounds = false;
};

void print_bound_line(const char* name, bool ok, double slack) {
    std::printf("%s: %s (slack %.3e)\n", name, ok ? "PASS" : "FAIL", slack);
}

int cmd_compress(const CompressArgs& args) {
    WallClock clock;
    const Payload payload = read_container(args.input);

    RgdConfig cfg;
    cfg.eta = args.eta;
    cfg.max_steps = args.steps;
    cfg.stop_tol = args.stop_tol;
    cfg.target_ranks = ranks_from_flag(args.target_ranks);

    Payload result;
    ConvergenceTrace trace;
    if (const auto* ttv = std::get_if<TTVector>(&payload)) {
        auto [compressed, t] = rgd_compress(*ttv, cfg);
        result = std::move(compressed);
        trace = std::move(t);
    } else if (const auto* ttm = std::get_if<TTMatrix>(&payload)) {
        auto [compressed, t] = rgd_compress(*ttm, cfg);
        result = std::move(compressed);
        trace = std::move(t);
    } else {
        throw ConfigError("compress expects a tt_vector or tt_matrix container");
    }

    const std::string trace_path =
        args.trace_path.empty() ? args.output + ".trace" : args.trace_path;
    write_records(trace_path, records_from_trace(trace));
    write_container(args.output, result);

    std::printf("steps: %zu\n", trace.size());
    std::printf("initial loss: %s\n", format_double(trace.entries.front().loss).c_str());
    std::printf("final loss: %s\n", format_double(trace.entries.back().loss).c_str());
    std::printf("ranks: %s\n", ranks_to_string(trace.entries.back().ranks).c_str());

    int code = kOk;
    if (args.check_bounds) {
        double best = trace.entries.front().loss;
        for (const TraceEntry& e : trace.entries) best = std::min(best, e.loss);
        // H = 1 exactly for the quadratic distance loss; the domination
        // check uses tau = 1/2 against the unconstrained optimum at 0.
        BoundReport descent = check_descent_bounds(trace, 1.0, args.eta, best);
        BoundReport dominated = check_gradient_dominated(trace, 0.5, 0.0, 1.0, args.eta);
        print_bound_line("max-grad bound", descent.max_grad_bound_ok, descent.max_grad_slack);
        print_bound_line("min-grad bound", descent.min_grad_bound_ok, descent.min_grad_slack);
        print_bound_line("gradient domination (squared)", dominated.dominated_ok,
                         dominated.dominated_slack);
        std::printf("gradient domination (unsquared reading): %s (slack %.3e)\n",
                    dominated.dominated_unsquared_ok ? "holds" : "does not hold",
                    dominated.dominated_unsquared_slack);
        if (!descent.max_grad_bound_ok || !descent.min_grad_bound_ok ||
            !dominated.dominated_ok)
            code = kCheckFailed;
    }

    ManifestInfo info;
    info.command = "compress";
    info.inputs = {args.input};
    info.outputs = {args.output, trace_path};
    info.config = {{"target_ranks", args.target_ranks},
                   {"eta", args.eta},
                   {"steps", args.steps},
                   {"stop_tol", args.stop_tol},
                   {"check_bounds", args.check_bounds}};
    info.wall_seconds = clock.seconds();
    write_manifest(info);
    return code;
}

// -------------------------------------------------------------------- train

struct TrainArgs {
    std::string dataset, output, config_path, val_path, trace_path;
};

int cmd_train(const TrainArgs& args, const CLI::App* cmd) {
    WallClock clock;
    const KeyValueConfig file_cfg = KeyValueConfig::parse_file(args.config_path);
    const NetworkSpec spec = network_spec_from_config(file_cfg);
    const TrainConfig cfg = train_config_from(file_cfg, cmd);

    const Dataset train_set = load_csv(args.dataset);
    Dataset val_set;
    if (!args.val_path.empty()) val_set = load_csv(args.val_path);

    Network net = build_network(spec, cfg.seed);
    TrainResult result = train(net, train_set, args.val_path.empty() ? nullptr : &val_set, cfg);

    const std::string trace_path =
        args.trace_path.empty() ? args.output + ".trace" : args.trace_path;
    write_records(trace_path, records_from_epochs(result.trace));
    write_container(args.output, Payload(result.net));

    const EpochStats& last = result.trace.back();
    std::printf("epochs: %zu\n", result.trace.size());
    std::printf("params: %zu\n", result.net.param_count());
    std::printf("final train loss: %s\n", format_double(last.train_loss).c_str());
    if (last.train_accuracy >= 0.0)
        std::printf("final train accuracy: %s\n", format_double(last.train_accuracy).c_str());
    if (last.val_loss >= 0.0)
        std::printf("final val loss: %s\n", format_double(last.val_loss).c_str());
    if (last.val_accuracy >= 0.0)
        std::printf("final val accuracy: %s\n", format_double(last.val_accuracy).c_str());

    ManifestInfo info;
    info.command = "train";
    info.inputs = {args.dataset, args.config_path};
    if (!args.val_path.empty()) info.inputs.push_back(args.val_path);
    info.outputs = {args.output, trace_path};
    info.config = nlohmann::json(file_cfg.values());
    info.config["effective_seed"] = cfg.seed;
    info.config["effective_lr"] = cfg.learning_rate;
    info.config["effective_epochs"] = cfg.epochs;
    info.wall_seconds = clock.seconds();
    write_manifest(info);
    return kOk;
}

// ----------------------------------------------------------------- build-lr

struct BuildLrArgs {
    std::string model, dataset, output, config_path, val_path, target_ranks;
    double eta = 1.0;
    std::size_t steps = 20;
};

int cmd_build_lr(const BuildLrArgs& args, const CLI::App* cmd) {
    WallClock clock;
    const Payload payload = read_container(args.model);
    const auto* net = std::get_if<Network>(&payload);
    if (!net) throw ConfigError("build-lr expects a network container");

    const KeyValueConfig file_cfg = KeyValueConfig::parse_file(args.config_path);
    const TrainConfig ft_cfg = train_config_from(file_cfg, cmd);

    RgdConfig rgd_cfg;
    rgd_cfg.eta = args.eta;
    rgd_cfg.max_steps = args.steps;
    const RankProfile target = ranks_from_flag(args.target_ranks);

    const Dataset train_set = load_csv(args.dataset);
    Dataset val_set;
    if (!args.val_path.empty()) val_set = load_csv(args.val_path);

    auto [lr_net, report] = build_lr_network(*net, target, rgd_cfg, ft_cfg, train_set,
                                             args.val_path.empty() ? nullptr : &val_set);

    write_container(args.output, Payload(lr_net));
    ManifestInfo info;
    info.command = "build-lr";
    info.inputs = {args.model, args.dataset, args.config_path};
    if (!args.val_path.empty()) info.inputs.push_back(args.val_path);
    info.outputs = {args.output};

    std::printf("params: %zu -> %zu\n", report.params_before, report.params_after);
    for (const LayerCompressionReport& layer : report.layers) {
        const std::string trace_path =
            args.output + ".layer" + std::to_string(layer.layer_index) + ".trace";
        write_records(trace_path, records_from_trace(layer.trace));
        info.outputs.push_back(trace_path);
        std::printf("layer %zu: ranks %s -> %s, params %zu -> %zu, rgd steps %zu\n",
                    layer.layer_index, ranks_to_string(layer.ranks_before).c_str(),
                    ranks_to_string(layer.ranks_after).c_str(), layer.params_before,
                    layer.params_after, layer.trace.size());
    }
    const std::string ft_trace_path = args.output + ".finetune.trace";
    write_records(ft_trace_path, records_from_epochs(report.fine_tune_trace));
    info.outputs.push_back(ft_trace_path);

    const auto print_metric = [](const char* label, const EvalResult& m) {
        if (m.accuracy >= 0.0)
            std::printf("%s: loss %s accuracy %s\n", label, format_double(m.loss).c_str(),
                        format_double(m.accuracy).c_str());
        else
            std::printf("%s: loss %s\n", label, format_double(m.loss).c_str());
    };
    print_metric("metric input", report.metric_input);
    print_metric("metric truncated", report.metric_truncated);
    print_metric("metric fine-tuned", report.metric_fine_tuned);

    info.config = nlohmann::json(file_cfg.values());
    info.config["target_ranks"] = args.target_ranks;
    info.config["eta"] = args.eta;
    info.config["steps"] = args.steps;
    info.wall_seconds = clock.seconds();
    write_manifest(info);
    return kOk;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string model, dataset;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const Payload payload = read_container(args.model);
    const auto* net = std::get_if<Network>(&payload);
    if (!net) throw ConfigError("evaluate expects a network container");
    const Dataset data = load_csv(args.dataset);
    const EvalResult result = evaluate(*net, data);
    std::printf("loss: %s\n", format_double(result.loss).c_str());
    if (result.accuracy >= 0.0)
        std::printf("accuracy: %s\n", format_double(result.accuracy).c_str());
    return kOk;
}

// --------------------------------------------------------------------- info

int cmd_info(const std::string& path) {
    const Payload payload = read_container(path);
    std::printf("kind: %s\n", payload_kind_name(payload));

    if (const auto* dense = std::get_if<DenseTensor>(&payload)) {
        std::printf("shape: %s\n", dims_to_string(dense->shape().dims(), 'x').c_str());
        std::printf("elements: %zu\n", dense->size());
    } else if (const auto* ttv = std::get_if<TTVector>(&payload)) {
        std::printf("modes: %s\n", dims_to_string(ttv->shape().dims(), 'x').c_str());
        std::printf("ranks: %s\n", ranks_to_string(ttv->rank_profile()).c_str());
    } else if (const auto* ttm = std::get_if<TTMatrix>(&payload)) {
        std::printf("modes: %s -> %s\n", dims_to_string(ttm->in_shape().dims(), 'x').c_str(),
                    dims_to_string(ttm->out_shape().dims(), 'x').c_str());
        std::printf("ranks: %s\n", ranks_to_string(ttm->rank_profile()).c_str());
    } else {
        const Network& net = std::get<Network>(payload);
        std::printf("loss: %s\n", net.loss_kind == LossKind::mae ? "mae" : "cross_entropy");
        std::printf("layers: %zu\n", net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            if (const auto* d = std::get_if<DenseLayer>(&net.layers[l])) {
                std::printf("  layer %zu: dense %zu -> %zu\n", l, d->in_dim(), d->out_dim());
            } else {
                const auto& t = std::get<TTLayer>(net.layers[l]);
                std::printf("  layer %zu: tt %zu -> %zu ranks %s\n", l, t.in_dim(), t.out_dim(),
                            ranks_to_string(t.weight.rank_profile()).c_str());
            }
        }
    }
    std::printf("params: %zu\n", payload_param_count(payload));
    std::printf("file size: %ju bytes\n",
                static_cast<std::uintmax_t>(std::filesystem::file_size(path)));
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ttrz - tensor-train compression toolkit"};
    app.require_subcommand(1);
    int code = kOk;

    DecomposeArgs dec;
    CLI::App* decompose =
        app.add_subcommand("decompose", "Decompose a dense container into TT format");
    decompose->add_option("input", dec.input, "dense input container")->required();
    decompose->add_option("output", dec.output, "TT output container")->required();
    decompose->add_option("--in-factors", dec.in_factors,
                          "input mode factorization, e.g. 8,4,8,8");
    decompose->add_option("--out-factors", dec.out_factors, "output mode factorization");
    decompose->add_option("--ranks", dec.ranks, "full rank profile, e.g. 1,12,12,12,1");
    decompose->add_option("--max-rank", dec.max_rank, "uniform rank cap");
    decompose->callback([&] { code = run_guarded([&] { return cmd_decompose(dec); }); });

    RoundArgs rnd;
    CLI::App* round = app.add_subcommand("round", "Reduce the ranks of a TT container");
    round->add_option("input", rnd.input)->required();
    round->add_option("output", rnd.output)->required();
    round->add_option("--ranks", rnd.ranks, "target rank profile");
    round->add_option("--max-rank", rnd.max_rank, "uniform rank cap");
    round->add_option("--mode", rnd.mode, "literal | orthogonal | both (default orthogonal)");
    round->callback([&] { code = run_guarded([&] { return cmd_round(rnd); }); });

    CompressArgs cmp;
    CLI::App* compress = app.add_subcommand(
        "compress", "Iterative rank reduction by gradient descent with retraction");
    compress->add_option("input", cmp.input)->required();
    compress->add_option("output", cmp.output)->required();
    compress->add_option("--target-ranks", cmp.target_ranks)->required();
    compress->add_option("--eta", cmp.eta, "learning rate, must lie in (0, 2)");
    compress->add_option("--steps", cmp.steps, "step budget");
    compress->add_option("--stop-tol", cmp.stop_tol, "gradient-norm-squared stop tolerance");
    compress->add_option("--trace", cmp.trace_path, "trace file (default <output>.trace)");
    compress->add_flag("--check-bounds", cmp.check_bounds,
                       "verify the descent and domination bounds on the trace");
    compress->callback([&] { code = run_guarded([&] { return cmd_compress(cmp); }); });

    TrainArgs trn;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a network from a config file");
    train_cmd->add_option("dataset", trn.dataset, "training CSV")->required();
    train_cmd->add_option("output", trn.output, "model container output")->required();
    train_cmd->add_option("--config", trn.config_path, "key = value config file")->required();
    train_cmd->add_option("--val", trn.val_path, "validation CSV");
    train_cmd->add_option("--trace", trn.trace_path, "trace file (default <output>.trace)");
    train_cmd->add_option("--lr", "override config lr");
    train_cmd->add_option("--epochs", "override config epochs");
    train_cmd->add_option("--batch", "override config batch");
    train_cmd->add_option("--seed", "override config seed");
    train_cmd->add_option("--optimizer", "override config optimizer");
    train_cmd->callback([&] { code = run_guarded([&] { return cmd_train(trn, train_cmd); }); });

    BuildLrArgs blr;
    CLI::App* build_lr = app.add_subcommand(
        "build-lr", "Reduce every TT layer of a trained network, then fine-tune");
    build_lr->add_option("model", blr.model, "trained network container")->required();
    build_lr->add_option("dataset", blr.dataset, "fine-tuning CSV")->required();
    build_lr->add_option("output", blr.output, "reduced model output")->required();
    build_lr->add_option("--target-ranks", blr.target_ranks)->required();
    build_lr->add_option("--config", blr.config_path, "fine-tune config file")->required();
    build_lr->add_option("--val", blr.val_path, "validation CSV");
    build_lr->add_option("--eta", blr.eta, "descent learning rate");
    build_lr->add_option("--steps", blr.steps, "descent step budget");
    build_lr->add_option("--lr", "override config lr");
    build_lr->add_option("--epochs", "override config epochs");
    build_lr->add_option("--batch", "override config batch");
    build_lr->add_option("--seed", "override config seed");
    build_lr->add_option("--optimizer", "override config optimizer");
    build_lr->callback(
        [&] { code = run_guarded([&] { return cmd_build_lr(blr, build_lr); }); });

    EvaluateArgs ev;
    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "Evaluate a model on a CSV dataset (read-only)");
    evaluate_cmd->add_option("model", ev.model)->required();
    evaluate_cmd->add_option("dataset", ev.dataset)->required();
    evaluate_cmd->callback([&] { code = run_guarded([&] { return cmd_evaluate(ev); }); });

    std::string info_path;
    CLI::App* info_cmd = app.add_subcommand("info", "Describe a container (read-only)");
    info_cmd->add_option("container", info_path)->required();
    info_cmd->callback([&] { code = run_guarded([&] { return cmd_info(info_path); }); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    return code;
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ttrz/dataset.hpp"
#include "ttrz/rgd.hpp"
#include "ttrz/tt_matrix.hpp"

namespace ttrz {

enum class Activation { relu, identity, softmax_at_loss };
enum class LossKind { mae, cross_entropy };
enum class OptimizerKind { sgd, adam };

struct DenseLayer {
    Matrix weight; // out_dim x in_dim
    std::vector<double> bias;
    Activation activation = Activation::relu;

    std::size_t in_dim() const { return weight.cols; }
    std::size_t out_dim() const { return weight.rows; }
};

struct TTLayer {
    TTMatrix weight;
    std::vector<double> bias;
    Activation activation = Activation::relu;

    std::size_t in_dim() const { return weight.in_dim(); }
    std::size_t out_dim() const { return weight.out_dim(); }
};

using Layer = std::variant<DenseLayer, TTLayer>;

std::size_t layer_in_dim(const Layer& l);
std::size_t layer_out_dim(const Layer& l);
std::size_t layer_param_count(const Layer& l);

/// Feed-forward stack of dense and TT layers with a single loss kind.
/// softmax_at_loss heads emit logits from forward passes; the softmax is
/// applied inside the cross-entropy loss (and by predict_probabilities).
struct Network {
    std::vector<Layer> layers;
    LossKind loss_kind = LossKind::mae;

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    std::size_t param_count() const;
    void validate() const; // adjacent dims chain, bias lengths, loss/head agreement
};

/// activation(weight * x + bias) with the TT matrix-vector product.
std::vector<double> tt_layer_forward(const TTLayer& layer, const std::vector<double>& x);

/// Convert a dense layer to a TT layer under the given factorizations and
/// rank cap; the bias and activation carry over unchanged.
TTLayer dense_to_tt_layer(const DenseLayer& l, const ModeFactorization& in_f,
                          const ModeFactorization& out_f, const RankProfile& cap);

std::vector<double> network_forward(const Network& net, const std::vector<double>& x);

/// Like network_forward but applies the softmax when the head activation
/// is softmax_at_loss, so classification outputs are probabilities.
std::vector<double> predict_probabilities(const Network& net, const std::vector<double>& x);

/// Gradient of every trainable parameter of one layer; weight holds one
/// flat block for a dense layer and one block per core for a TT layer.
struct LayerGrad {
    std::vector<std::vector<double>> weight;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGrad> layers;
};

/// Mean loss over the selected samples plus exact gradients for every
/// dense weight, TT core, and bias. MAE uses the subgradient convention
/// sign(0) = 0.
std::pair<double, Gradients> loss_and_gradients(const Network& net, const Dataset& data,
                                                const std::vector<std::size_t>& sample_indices);
std::pair<double, Gradients> loss_and_gradients(const Network& net, const Dataset& data);

/// Loss (and accuracy for classification) over a whole dataset without
/// touching the model.
struct EvalResult {
    double loss = 0.0;
    double accuracy = -1.0; // -1 for regression
};
EvalResult evaluate(const Network& net, const Dataset& data);

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::sgd;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    bool only_tt_cores = false; ///< freeze dense layers and all biases
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = -1.0;
    double train_accuracy = -1.0;
    double val_accuracy = -1.0;
};

struct TrainResult {
    Network net;
    std::vector<EpochStats> trace;
};

/// Mini-batch training, deterministic under the seed. Metrics per epoch
/// are full passes over the data after that epoch's updates.
TrainResult train(const Network& net, const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& cfg);

struct LayerCompressionReport {
    std::size_t layer_index = 0;
    ConvergenceTrace trace;
    RankProfile ranks_before;
    RankProfile ranks_after;
    std::size_t params_before = 0;
    std::size_t params_after = 0;
};

struct BuildLrReport {
    std::vector<LayerCompressionReport> layers;
    std::size_t params_before = 0; // whole network
    std::size_t params_after = 0;
    EvalResult metric_input;       // trained input network
    EvalResult metric_truncated;   // after rank reduction, before fine-tuning
    EvalResult metric_fine_tuned;  // after fine-tuning
    std::vector<EpochStats> fine_tune_trace;
};

/// Reduce every TT layer of a trained network to the target ranks with the
/// descent loop, then fine-tune the whole network.
std::pair<Network, BuildLrReport> build_lr_network(const Network& net,
                                                   const RankProfile& target_ranks,
                                                   RgdConfig rgd_cfg,
                                                   const TrainConfig& fine_tune_cfg,
                                                   const Dataset& train_set,
                                                   const Dataset* val_set);

/// Architecture description used for seeded initialization.
struct LayerSpec {
    bool is_tt = false;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    ModeFactorization in_f;  // TT layers only
    ModeFactorization out_f;
    RankProfile ranks;
    Activation activation = Activation::relu;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;
    LossKind loss_kind = LossKind::mae;
};

/// Seeded random initialization: every weight block (dense matrix or TT
/// core) is uniform in +-sqrt(6 / (fan_in + fan_out)) for the block's own
/// fan sizes; biases start at zero.
Network build_network(const NetworkSpec& spec, std::uint64_t seed);

struct CompareInitConfig {
    TrainConfig pretrain;
    TrainConfig fine_tune;
    RgdConfig rgd;
};

struct CompareInitReport {
    TrainResult random_init;             // small ranks from scratch
    TrainResult lr_init;                 // fine-tuned reduced network
    BuildLrReport lr_pipeline;
    std::size_t params_random = 0;
    std::size_t params_lr = 0;
    EvalResult final_random;
    EvalResult final_lr;
};

/// Train the large-rank architecture, derive the reduced network from it,
/// and train a same-seed random-init network at the small ranks with an
/// identical schedule; both arms run pretrain followed by fine-tune
/// budgets so the comparison is budget-matched.
CompareInitReport compare_init(const NetworkSpec& large_spec, const RankProfile& small_ranks,
                               const Dataset& train_set, const Dataset* val_set,
                               const CompareInitConfig& cfg);

} // namespace ttrz

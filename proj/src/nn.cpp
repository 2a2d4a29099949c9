#include "ttrz/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eigen_util.hpp"
#include "ttrz/rng.hpp"

namespace ttrz {

using detail::CMapRow;
using detail::RowMat;

std::size_t layer_in_dim(const Layer& l) {
    return std::visit([](const auto& x) { return x.in_dim(); }, l);
}

std::size_t layer_out_dim(const Layer& l) {
    return std::visit([](const auto& x) { return x.out_dim(); }, l);
}

std::size_t layer_param_count(const Layer& l) {
    if (const auto* d = std::get_if<DenseLayer>(&l))
        return d->weight.size() + d->bias.size();
    const auto& t = std::get<TTLayer>(l);
    return param_count(t.weight) + t.bias.size();
}

std::size_t Network::in_dim() const { return layer_in_dim(layers.front()); }
std::size_t Network::out_dim() const { return layer_out_dim(layers.back()); }

std::size_t Network::param_count() const {
    std::size_t total = 0;
    for (const Layer& l : layers) total += layer_param_count(l);
    return total;
}

void Network::validate() const {
    if (layers.empty()) throw ConfigError("network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::size_t out = layer_out_dim(layers[l]);
        const auto& bias = std::visit([](const auto& x) -> const std::vector<double>& {
            return x.bias;
        }, layers[l]);
        if (bias.size() != out) throw ShapeMismatch("bias length mismatch in layer " +
                                                    std::to_string(l));
        if (l + 1 < layers.size() && out != layer_in_dim(layers[l + 1]))
            throw ShapeMismatch("layer dims do not chain at layer " + std::to_string(l));
        const Activation act =
            std::visit([](const auto& x) { return x.activation; }, layers[l]);
        if (act == Activation::softmax_at_loss && l + 1 != layers.size())
            throw ConfigError("softmax_at_loss is only valid on the last layer");
    }
    const Activation head = std::visit([](const auto& x) { return x.activation; }, layers.back());
    if (loss_kind == LossKind::cross_entropy && head != Activation::softmax_at_loss)
        throw ConfigError("cross-entropy networks need a softmax_at_loss head");
    if (loss_kind == LossKind::mae && head == Activation::softmax_at_loss)
        throw ConfigError("mae networks cannot use a softmax_at_loss head");
}

namespace {

void apply_activation(Activation act, std::vector<double>& v) {
    if (act == Activation::relu)
        for (double& x : v) x = x > 0.0 ? x : 0.0;
    // identity and softmax_at_loss both emit the pre-activation here.
}

std::vector<double> softmax(const std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - m);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

std::vector<double> dense_apply(const DenseLayer& l, const std::vector<double>& x) {
    std::vector<double> z = l.bias;
    CMapRow w(l.weight.data.data(), l.weight.rows, l.weight.cols);
    Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())).noalias() +=
        w * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return z;
}

struct LayerCache {
    std::vector<double> input;
    std::vector<double> z; // pre-activation
    TtMatvecTrace tt_trace;
};

std::vector<double> forward_layer(const Layer& layer, const std::vector<double>& x,
                                  LayerCache* cache) {
    std::vector<double> z;
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
        if (x.size() != d->in_dim()) throw ShapeMismatch("layer input length mismatch");
        z = dense_apply(*d, x);
    } else {
        const auto& t = std::get<TTLayer>(layer);
        z = tt_matvec(t.weight, x, cache ? &cache->tt_trace : nullptr);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += t.bias[i];
    }
    if (cache) {
        cache->input = x;
        cache->z = z;
    }
    apply_activation(std::visit([](const auto& l) { return l.activation; }, layer), z);
    return z;
}

} // namespace

std::vector<double> tt_layer_forward(const TTLayer& layer, const std::vector<double>& x) {
    std::vector<double> z = tt_matvec(layer.weight, x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
    apply_activation(layer.activation, z);
    return z;
}

TTLayer dense_to_tt_layer(const DenseLayer& l, const ModeFactorization& in_f,
                          const ModeFactorization& out_f, const RankProfile& cap) {
    TTLayer out;
    out.weight = tt_matrix_from_dense(l.weight, in_f, out_f, cap);
    out.bias = l.bias;
    out.activation = l.activation;
    return out;
}

std::vector<double> network_forward(const Network& net, const std::vector<double>& x) {
    std::vector<double> v = x;
    for (const Layer& layer : net.layers) v = forward_layer(layer, v, nullptr);
    return v;
}

std::vector<double> predict_probabilities(const Network& net, const std::vector<double>& x) {
    std::vector<double> v = network_forward(net, x);
    const Activation head =
        std::visit([](const auto& l) { return l.activation; }, net.layers.back());
    if (head == Activation::softmax_at_loss) return softmax(v);
    return v;
}

namespace {

Gradients zero_gradients(const Network& net) {
    Gradients g;
    g.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (const auto* d = std::get_if<DenseLayer>(&net.layers[l])) {
            g.layers[l].weight.assign(1, std::vector<double>(d->weight.size(), 0.0));
            g.layers[l].bias.assign(d->bias.size(), 0.0);
        } else {
            const auto& t = std::get<TTLayer>(net.layers[l]);
            g.layers[l].weight.resize(t.weight.order());
            for (std::size_t k = 0; k < t.weight.order(); ++k)
                g.layers[l].weight[k].assign(t.weight.core(k).size(), 0.0);
            g.layers[l].bias.assign(t.bias.size(), 0.0);
        }
    }
    return g;
}

void check_batch(const Network& net, const Dataset& data,
                 const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw ConfigError("empty batch");
    if (data.classification() != (net.loss_kind == LossKind::cross_entropy))
        throw LabelMismatch("dataset labels do not match the network loss kind");
    for (std::size_t s : idx) {
        if (s >= data.size()) throw IndexOutOfRange("sample index out of range");
        if (data.inputs[s].size() != net.in_dim())
            throw ShapeMismatch("sample input dim mismatch");
        if (data.classification()) {
            if (data.labels[s] >= net.out_dim())
                throw LabelMismatch("label exceeds network output dim");
        } else if (data.targets[s].size() != net.out_dim()) {
            throw ShapeMismatch("sample target dim mismatch");
        }
    }
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

std::pair<double, Gradients> loss_and_gradients(const Network& net, const Dataset& data,
                                                const std::vector<std::size_t>& sample_indices) {
    net.validate();
    check_batch(net, data, sample_indices);

    const std::size_t batch = sample_indices.size();
    const double inv_batch = 1.0 / static_cast<double>(batch);
    Gradients grads = zero_gradients(net);
    double loss = 0.0;

    std::vector<LayerCache> caches(net.layers.size());
    for (std::size_t s : sample_indices) {
        std::vector<double> v = data.inputs[s];
        for (std::size_t l = 0; l < net.layers.size(); ++l)
            v = forward_layer(net.layers[l], v, &caches[l]);

        // Gradient with respect to the head pre-activation.
        std::vector<double> gz(net.out_dim());
        if (net.loss_kind == LossKind::cross_entropy) {
            const std::vector<double> p = softmax(caches.back().z);
            const std::size_t label = data.labels[s];
            loss += -std::log(std::max(p[label], 1e-300)) * inv_batch;
            for (std::size_t i = 0; i < p.size(); ++i)
                gz[i] = (p[i] - (i == label ? 1.0 : 0.0)) * inv_batch;
        } else {
            const std::vector<double>& y = data.targets[s];
            const double inv_entries = inv_batch / static_cast<double>(y.size());
            double sample_loss = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                sample_loss += std::abs(v[i] - y[i]);
                gz[i] = sign0(v[i] - y[i]) * inv_entries;
            }
            loss += sample_loss * inv_batch / static_cast<double>(y.size());
            const Activation head = std::visit(
                [](const auto& l) { return l.activation; }, net.layers.back());
            if (head == Activation::relu)
                for (std::size_t i = 0; i < gz.size(); ++i)
                    if (caches.back().z[i] <= 0.0) gz[i] = 0.0;
        }

        for (std::size_t l = net.layers.size(); l-- > 0;) {
            const LayerCache& cache = caches[l];
            LayerGrad& lg = grads.layers[l];
            std::vector<double> gx;

            if (const auto* d = std::get_if<DenseLayer>(&net.layers[l])) {
                for (std::size_t i = 0; i < gz.size(); ++i) lg.bias[i] += gz[i];
                std::vector<double>& wg = lg.weight[0];
                for (std::size_t i = 0; i < d->weight.rows; ++i) {
                    const double gi = gz[i];
                    if (gi == 0.0) continue;
                    for (std::size_t j = 0; j < d->weight.cols; ++j)
                        wg[i * d->weight.cols + j] += gi * cache.input[j];
                }
                gx.assign(d->weight.cols, 0.0);
                CMapRow w(d->weight.data.data(), d->weight.rows, d->weight.cols);
                Eigen::Map<Eigen::VectorXd>(gx.data(), static_cast<Eigen::Index>(gx.size()))
                    .noalias() = w.transpose() *
                                 Eigen::Map<const Eigen::VectorXd>(
                                     gz.data(), static_cast<Eigen::Index>(gz.size()));
            } else {
                const auto& t = std::get<TTLayer>(net.layers[l]);
                for (std::size_t i = 0; i < gz.size(); ++i) lg.bias[i] += gz[i];
                TtMatvecBackward back = tt_matvec_backward(t.weight, cache.tt_trace, gz);
                for (std::size_t k = 0; k < back.grad_cores.size(); ++k)
                    for (std::size_t i = 0; i < back.grad_cores[k].size(); ++i)
                        lg.weight[k][i] += back.grad_cores[k][i];
                gx = std::move(back.grad_x);
            }

            if (l > 0) {
                const Activation act = std::visit(
                    [](const auto& x) { return x.activation; }, net.layers[l - 1]);
                if (act == Activation::relu)
                    for (std::size_t i = 0; i < gx.size(); ++i)
                        if (caches[l - 1].z[i] <= 0.0) gx[i] = 0.0;
                gz = std::move(gx);
            }
        }
    }
    return {loss, std::move(grads)};
}

std::pair<double, Gradients> loss_and_gradients(const Network& net, const Dataset& data) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    return loss_and_gradients(net, data, idx);
}

EvalResult evaluate(const Network& net, const Dataset& data) {
    net.validate();
    if (data.size() == 0) throw ConfigError("evaluate: empty dataset");
    if (data.classification() != (net.loss_kind == LossKind::cross_entropy))
        throw LabelMismatch("dataset labels do not match the network loss kind");

    EvalResult result;
    const double inv = 1.0 / static_cast<double>(data.size());
    std::size_t correct = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const std::vector<double> out = network_forward(net, data.inputs[s]);
        if (net.loss_kind == LossKind::cross_entropy) {
            const std::vector<double> p = softmax(out);
            result.loss += -std::log(std::max(p[data.labels[s]], 1e-300)) * inv;
            const std::size_t pred =
                std::max_element(out.begin(), out.end()) - out.begin();
            if (pred == data.labels[s]) ++correct;
        } else {
            double sample = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i)
                sample += std::abs(out[i] - data.targets[s][i]);
            result.loss += sample * inv / static_cast<double>(out.size());
        }
    }
    if (net.loss_kind == LossKind::cross_entropy)
        result.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

namespace {

// Flat views over every trainable block of the network, in a fixed order.
struct ParamBlock {
    double* data = nullptr;
    std::size_t size = 0;
    const double* grad = nullptr;
    bool is_tt_core = false;
    bool is_bias = false;
};

std::vector<ParamBlock> parameter_blocks(Network& net, const Gradients& grads) {
    std::vector<ParamBlock> blocks;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerGrad& lg = grads.layers[l];
        if (auto* d = std::get_if<DenseLayer>(&net.layers[l])) {
            blocks.push_back({d->weight.data.data(), d->weight.size(), lg.weight[0].data(),
                              false, false});
            blocks.push_back({d->bias.data(), d->bias.size(), lg.bias.data(), false, true});
        } else {
            auto& t = std::get<TTLayer>(net.layers[l]);
            for (std::size_t k = 0; k < t.weight.order(); ++k)
                blocks.push_back({t.weight.core(k).data.data(), t.weight.core(k).size(),
                                  lg.weight[k].data(), true, false});
            blocks.push_back({t.bias.data(), t.bias.size(), lg.bias.data(), false, true});
        }
    }
    return blocks;
}

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t t = 0;
};

} // namespace

TrainResult train(const Network& net, const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& cfg) {
    net.validate();
    if (cfg.learning_rate < 0.0) throw ConfigError("train: negative learning rate");
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (train_set.size() == 0) throw ConfigError("train: empty dataset");

    TrainResult result;
    result.net = net;
    std::mt19937_64 gen(cfg.seed);

    AdamState adam;
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order, gen);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const std::vector<std::size_t> batch(order.begin() + start, order.begin() + end);
            auto [loss, grads] = loss_and_gradients(result.net, train_set, batch);
            (void)loss;

            std::vector<ParamBlock> blocks = parameter_blocks(result.net, grads);
            if (cfg.optimizer == OptimizerKind::adam && adam.m.empty()) {
                adam.m.resize(blocks.size());
                adam.v.resize(blocks.size());
                for (std::size_t b = 0; b < blocks.size(); ++b) {
                    adam.m[b].assign(blocks[b].size, 0.0);
                    adam.v[b].assign(blocks[b].size, 0.0);
                }
            }
            if (cfg.optimizer == OptimizerKind::adam) ++adam.t;

            for (std::size_t b = 0; b < blocks.size(); ++b) {
                ParamBlock& blk = blocks[b];
                if (cfg.only_tt_cores && !blk.is_tt_core) continue;
                if (cfg.optimizer == OptimizerKind::sgd) {
                    for (std::size_t i = 0; i < blk.size; ++i)
                        blk.data[i] -= cfg.learning_rate * blk.grad[i];
                } else {
                    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.t));
                    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.t));
                    for (std::size_t i = 0; i < blk.size; ++i) {
                        double& m = adam.m[b][i];
                        double& v = adam.v[b][i];
                        m = kBeta1 * m + (1.0 - kBeta1) * blk.grad[i];
                        v = kBeta2 * v + (1.0 - kBeta2) * blk.grad[i] * blk.grad[i];
                        blk.data[i] -=
                            cfg.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + kEps);
                    }
                }
            }
        }

        EpochStats stats;
        stats.epoch = epoch + 1;
        const EvalResult tr = evaluate(result.net, train_set);
        stats.train_loss = tr.loss;
        stats.train_accuracy = tr.accuracy;
        if (val_set) {
            const EvalResult va = evaluate(result.net, *val_set);
            stats.val_loss = va.loss;
            stats.val_accuracy = va.accuracy;
        }
        result.trace.push_back(stats);
    }
    return result;
}

std::pair<Network, BuildLrReport> build_lr_network(const Network& net,
                                                   const RankProfile& target_ranks,
                                                   RgdConfig rgd_cfg,
                                                   const TrainConfig& fine_tune_cfg,
                                                   const Dataset& train_set,
                                                   const Dataset* val_set) {
    net.validate();
    const Dataset& metric_set = val_set ? *val_set : train_set;

    BuildLrReport report;
    report.params_before = net.param_count();
    report.metric_input = evaluate(net, metric_set);

    Network reduced = net;
    rgd_cfg.target_ranks = target_ranks;
    for (std::size_t l = 0; l < reduced.layers.size(); ++l) {
        auto* t = std::get_if<TTLayer>(&reduced.layers[l]);
        if (!t) continue;
        LayerCompressionReport layer_report;
        layer_report.layer_index = l;
        layer_report.ranks_before = t->weight.rank_profile();
        layer_report.params_before = param_count(t->weight);
        auto [compressed, trace] = rgd_compress(t->weight, rgd_cfg);
        t->weight = std::move(compressed);
        layer_report.trace = std::move(trace);
        layer_report.ranks_after = t->weight.rank_profile();
        layer_report.params_after = param_count(t->weight);
        report.layers.push_back(std::move(layer_report));
    }

    report.params_after = reduced.param_count();
    report.metric_truncated = evaluate(reduced, metric_set);

    TrainResult tuned = train(reduced, train_set, val_set, fine_tune_cfg);
    report.fine_tune_trace = tuned.trace;
    report.metric_fine_tuned = evaluate(tuned.net, metric_set);
    return {std::move(tuned.net), std::move(report)};
}

Network build_network(const NetworkSpec& spec, std::uint64_t seed) {
    if (spec.layers.empty()) throw ConfigError("network spec has no layers");
    std::mt19937_64 gen(seed);
    Network net;
    net.loss_kind = spec.loss_kind;
    for (const LayerSpec& ls : spec.layers) {
        if (!ls.is_tt) {
            DenseLayer d;
            d.weight = Matrix(ls.out_dim, ls.in_dim);
            const double bound =
                std::sqrt(6.0 / static_cast<double>(ls.in_dim + ls.out_dim));
            for (double& x : d.weight.data) x = uniform_in(gen, -bound, bound);
            d.bias.assign(ls.out_dim, 0.0);
            d.activation = ls.activation;
            net.layers.emplace_back(std::move(d));
        } else {
            if (ls.in_f.product() != ls.in_dim || ls.out_f.product() != ls.out_dim)
                throw ConfigError("layer factorizations do not match its dims");
            std::vector<TTCore4> cores;
            for (std::size_t k = 0; k < ls.in_f.order(); ++k) {
                TTCore4 core(ls.out_f.factor(k), ls.in_f.factor(k), ls.ranks.rank(k),
                             ls.ranks.rank(k + 1));
                const double fan_in = static_cast<double>(core.in_mode * core.left_rank);
                const double fan_out = static_cast<double>(core.out_mode * core.right_rank);
                const double bound = std::sqrt(6.0 / (fan_in + fan_out));
                for (double& x : core.data) x = uniform_in(gen, -bound, bound);
                cores.push_back(std::move(core));
            }
            TTLayer t;
            t.weight = TTMatrix(std::move(cores));
            t.bias.assign(ls.out_dim, 0.0);
            t.activation = ls.activation;
            net.layers.emplace_back(std::move(t));
        }
    }
    net.validate();
    return net;
}

CompareInitReport compare_init(const NetworkSpec& large_spec, const RankProfile& small_ranks,
                               const Dataset& train_set, const Dataset* val_set,
                               const CompareInitConfig& cfg) {
    const Dataset& metric_set = val_set ? *val_set : train_set;
    CompareInitReport report;

    // Reduced-rank arm: pretrain the large architecture, compress, fine-tune.
    Network large_net = build_network(large_spec, cfg.pretrain.seed);
    TrainResult pretrained = train(large_net, train_set, val_set, cfg.pretrain);
    auto [lr_net, lr_report] =
        build_lr_network(pretrained.net, small_ranks, cfg.rgd, cfg.fine_tune, train_set, val_set);
    report.lr_pipeline = std::move(lr_report);
    report.lr_init.net = std::move(lr_net);
    report.lr_init.trace = report.lr_pipeline.fine_tune_trace;

    // Random-init arm at the small ranks, same seed and the same two-phase
    // budget so the comparison is budget-matched.
    NetworkSpec small_spec = large_spec;
    for (LayerSpec& ls : small_spec.layers)
        if (ls.is_tt) ls.ranks = small_ranks;
    Network small_net = build_network(small_spec, cfg.pretrain.seed);
    TrainResult rand_pre = train(small_net, train_set, val_set, cfg.pretrain);
    report.random_init = train(rand_pre.net, train_set, val_set, cfg.fine_tune);

    report.params_random = report.random_init.net.param_count();
    report.params_lr = report.lr_init.net.param_count();
    report.final_random = evaluate(report.random_init.net, metric_set);
    report.final_lr = evaluate(report.lr_init.net, metric_set);
    return report;
}

} // namespace ttrz

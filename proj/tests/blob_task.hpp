#pragma once

#include "ttrz/dataset.hpp"
#include "ttrz/nn.hpp"

// The committed desk-scale classification experiment shared by the module
// tests, the acceptance suite, and the checked-in CSV files: 4 twin-mode
// Gaussian blob classes in 16 dimensions feeding a TT stack
// 16 -> 256 -> 16 -> 4 with a dense softmax head.
namespace ttest {

inline ttrz::NetworkSpec blob_tt_spec(const ttrz::RankProfile& ranks) {
    using namespace ttrz;
    NetworkSpec spec;
    spec.loss_kind = LossKind::cross_entropy;

    LayerSpec l1;
    l1.is_tt = true;
    l1.in_dim = 16;
    l1.out_dim = 256;
    l1.in_f = ModeFactorization({2, 2, 2, 2});
    l1.out_f = ModeFactorization({4, 4, 4, 4});
    l1.ranks = ranks;
    l1.activation = Activation::relu;

    LayerSpec l2;
    l2.is_tt = true;
    l2.in_dim = 256;
    l2.out_dim = 16;
    l2.in_f = ModeFactorization({4, 4, 4, 4});
    l2.out_f = ModeFactorization({2, 2, 2, 2});
    l2.ranks = ranks;
    l2.activation = Activation::relu;

    LayerSpec head;
    head.is_tt = false;
    head.in_dim = 16;
    head.out_dim = 4;
    head.activation = Activation::softmax_at_loss;

    spec.layers = {l1, l2, head};
    return spec;
}

inline const ttrz::RankProfile& blob_large_ranks() {
    static const ttrz::RankProfile ranks({1, 12, 12, 12, 1});
    return ranks;
}

inline const ttrz::RankProfile& blob_small_ranks() {
    static const ttrz::RankProfile ranks({1, 3, 4, 3, 1});
    return ranks;
}

inline ttrz::Dataset blob_train_set() { return ttrz::make_blobs(100, 16, 4, 0.10, 42); }
inline ttrz::Dataset blob_val_set() { return ttrz::make_blobs(300, 16, 4, 0.10, 43); }

inline ttrz::TrainConfig blob_pretrain_config(std::uint64_t seed) {
    ttrz::TrainConfig cfg;
    cfg.optimizer = ttrz::OptimizerKind::adam;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 32;
    cfg.epochs = 60;
    cfg.seed = seed;
    return cfg;
}

inline ttrz::TrainConfig blob_finetune_config(std::uint64_t seed) {
    ttrz::TrainConfig cfg = blob_pretrain_config(seed);
    cfg.epochs = 40;
    return cfg;
}

inline ttrz::RgdConfig blob_rgd_config() {
    ttrz::RgdConfig cfg;
    cfg.eta = 1.0;
    cfg.max_steps = 20;
    cfg.target_ranks = blob_small_ranks();
    return cfg;
}

// Truncation-recovery ratio with a half-point guard so a drop within
// evaluation noise counts as recovered.
inline bool recovered_90_percent(double acc_input, double acc_truncated, double acc_tuned) {
    const double drop = acc_input - acc_truncated;
    if (drop <= 0.005) return acc_tuned >= acc_input - 0.005;
    return acc_tuned - acc_truncated >= 0.9 * drop - 0.005;
}

} // namespace ttest

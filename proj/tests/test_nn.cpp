#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "blob_task.hpp"
#include "gradient_check.hpp"
#include "test_util.hpp"
#include "ttrz/dataset.hpp"
#include "ttrz/nn.hpp"

using namespace ttrz;

namespace {

TTLayer random_tt_layer(std::uint64_t seed, Activation act = Activation::relu) {
    TTLayer layer;
    layer.weight = random_tt_matrix(ModeFactorization({2, 3}), ModeFactorization({3, 2}),
                                    RankProfile({1, 2, 1}), seed);
    std::mt19937_64 gen(seed + 1);
    layer.bias.resize(layer.weight.out_dim());
    for (double& b : layer.bias) b = standard_normal(gen);
    layer.activation = act;
    return layer;
}

DenseLayer densified(const TTLayer& t) {
    DenseLayer d;
    d.weight = tt_matrix_full(t.weight);
    d.bias = t.bias;
    d.activation = t.activation;
    return d;
}

std::vector<double> dense_layer_forward(const DenseLayer& d, const std::vector<double>& x) {
    std::vector<double> z = d.bias;
    for (std::size_t i = 0; i < d.weight.rows; ++i)
        for (std::size_t j = 0; j < d.weight.cols; ++j) z[i] += d.weight(i, j) * x[j];
    if (d.activation == Activation::relu)
        for (double& v : z) v = v > 0.0 ? v : 0.0;
    return z;
}

} // namespace

TEST_CASE("tt_layer_forward: identity weight, zero input, dense oracle") {
    Matrix eye(4, 4);
    for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
    TTLayer ident;
    ident.weight = tt_matrix_from_dense(eye, ModeFactorization({2, 2}),
                                        ModeFactorization({2, 2}), 4);
    ident.bias.assign(4, 0.0);
    ident.activation = Activation::relu;

    const std::vector<double> x = {0.5, 1.0, 0.25, 2.0};
    CHECK(ttest::diff_norm(tt_layer_forward(ident, x), x) <= 1e-10 * ttest::vec_norm(x));

    TTLayer layer = random_tt_layer(81);
    const std::vector<double> zero_in(layer.in_dim(), 0.0);
    std::vector<double> expect = layer.bias;
    for (double& v : expect) v = v > 0.0 ? v : 0.0;
    CHECK(tt_layer_forward(layer, zero_in) == expect);

    const DenseLayer twin = densified(layer);
    std::mt19937_64 gen(82);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> in(layer.in_dim());
        for (double& v : in) v = standard_normal(gen);
        const std::vector<double> a = tt_layer_forward(layer, in);
        const std::vector<double> b = dense_layer_forward(twin, in);
        CHECK(ttest::diff_norm(a, b) <= 1e-10 * (1.0 + ttest::vec_norm(b)));
    }
}

TEST_CASE("dense_to_tt_layer: exact at full cap, bias and activation preserved") {
    std::mt19937_64 gen(83);
    DenseLayer d;
    d.weight = Matrix(16, 16);
    for (double& v : d.weight.data) v = standard_normal(gen);
    d.bias.resize(16);
    for (double& v : d.bias) v = standard_normal(gen);
    d.activation = Activation::relu;

    TTLayer t = dense_to_tt_layer(d, ModeFactorization({4, 4}), ModeFactorization({4, 4}),
                                  RankProfile({1, 16, 1}));
    CHECK(t.bias == d.bias);
    CHECK(t.activation == d.activation);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(16);
        for (double& v : x) v = standard_normal(gen);
        CHECK(ttest::diff_norm(tt_layer_forward(t, x), dense_layer_forward(d, x)) <=
              1e-10 * (1.0 + ttest::vec_norm(x)));
    }
}

TEST_CASE("dense_to_tt_layer: rank-1 separable weight is exact at cap 1") {
    std::mt19937_64 gen(84);
    std::vector<double> a(4), b(4), c(4), e(4);
    for (double& v : a) v = standard_normal(gen);
    for (double& v : b) v = standard_normal(gen);
    for (double& v : c) v = standard_normal(gen);
    for (double& v : e) v = standard_normal(gen);
    DenseLayer d;
    d.weight = Matrix(16, 16);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t i = 0; i < 16; ++i)
            d.weight(j, i) = a[j / 4] * b[j % 4] * c[i / 4] * e[i % 4];
    d.bias.assign(16, 0.0);
    d.activation = Activation::identity;

    TTLayer t = dense_to_tt_layer(d, ModeFactorization({4, 4}), ModeFactorization({4, 4}),
                                  RankProfile({1, 1, 1}));
    CHECK(ttest::rel_err(tt_matrix_full(t.weight).data, d.weight.data) <= 1e-10);
}

TEST_CASE("dense_to_tt_layer: parameter counts for the 2048-unit geometry") {
    DenseLayer d;
    d.weight = Matrix(2048, 2048);
    std::mt19937_64 gen(85);
    for (double& v : d.weight.data) v = standard_normal(gen);
    d.bias.assign(2048, 0.0);
    d.activation = Activation::relu;
    CHECK(d.weight.size() == 4194304);

    const ModeFactorization f({8, 4, 8, 8});
    TTLayer t = dense_to_tt_layer(d, f, f, RankProfile({1, 12, 12, 12, 1}));
    CHECK(param_count(t.weight) == 13056);
    CHECK(double(d.weight.size()) / double(param_count(t.weight)) ==
          doctest::Approx(321.3).epsilon(1e-3));
}

TEST_CASE("network_forward: identity head, densified twin, probability head") {
    // Single identity dense layer passes the input through.
    DenseLayer ident;
    ident.weight = Matrix(4, 4);
    for (std::size_t i = 0; i < 4; ++i) ident.weight(i, i) = 1.0;
    ident.bias.assign(4, 0.0);
    ident.activation = Activation::identity;
    Network pass;
    pass.layers.emplace_back(ident);
    pass.loss_kind = LossKind::mae;
    const std::vector<double> x = {1.0, -2.0, 3.0, 0.5};
    CHECK(network_forward(pass, x) == x);

    // Two TT layers against the densified twin network.
    Network ttnet;
    ttnet.loss_kind = LossKind::mae;
    TTLayer l1 = random_tt_layer(86);
    TTLayer l2 = random_tt_layer(87, Activation::identity);
    ttnet.layers.emplace_back(l1);
    ttnet.layers.emplace_back(l2);

    Network densenet;
    densenet.loss_kind = LossKind::mae;
    densenet.layers.emplace_back(densified(l1));
    densenet.layers.emplace_back(densified(l2));

    std::mt19937_64 gen(88);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> in(6);
        for (double& v : in) v = standard_normal(gen);
        const std::vector<double> a = network_forward(ttnet, in);
        const std::vector<double> b = network_forward(densenet, in);
        CHECK(ttest::diff_norm(a, b) <= 1e-9 * (1.0 + ttest::vec_norm(b)));
    }

    // Softmax-at-loss heads expose probabilities on request.
    Network cls = build_network(ttest::blob_tt_spec(RankProfile({1, 2, 2, 2, 1})), 3);
    std::vector<double> in(16);
    for (double& v : in) v = standard_normal(gen);
    const std::vector<double> probs = predict_probabilities(cls, in);
    double sum = 0.0;
    for (double p : probs) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("loss_and_gradients: perfect regression fit has zero loss and head gradient") {
    Network net;
    net.loss_kind = LossKind::mae;
    DenseLayer d;
    d.weight = Matrix(2, 3);
    d.weight(0, 0) = 1.0;
    d.weight(1, 2) = -2.0;
    d.bias = {0.5, -0.25};
    d.activation = Activation::identity;
    net.layers.emplace_back(d);

    Dataset data;
    std::mt19937_64 gen(89);
    for (int s = 0; s < 5; ++s) {
        std::vector<double> x(3);
        for (double& v : x) v = standard_normal(gen);
        data.inputs.push_back(x);
        data.targets.push_back(network_forward(net, x));
    }

    auto [loss, grads] = loss_and_gradients(net, data);
    CHECK(loss == 0.0);
    for (double g : grads.layers[0].weight[0]) CHECK(g == 0.0);
    for (double g : grads.layers[0].bias) CHECK(g == 0.0);
}

TEST_CASE("loss_and_gradients: uniform logits give ln(C) cross-entropy") {
    Network net;
    net.loss_kind = LossKind::cross_entropy;
    DenseLayer d;
    d.weight = Matrix(4, 3); // all zeros
    d.bias.assign(4, 0.0);
    d.activation = Activation::softmax_at_loss;
    net.layers.emplace_back(d);

    Dataset data;
    data.inputs.push_back({1.0, 2.0, 3.0});
    data.labels.push_back(2);
    auto [loss, grads] = loss_and_gradients(net, data);
    CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-14));
}

namespace {

void check_all_gradients(const Network& net, const Dataset& data) {
    const ttest::GradientCheckResult result = ttest::check_all_gradients_fd(net, data);
    CHECK(result.failed == 0);
    CHECK(result.worst_rel <= 1e-5);
}

NetworkSpec two_tt_layer_spec(LossKind loss) {
    NetworkSpec spec;
    spec.loss_kind = loss;
    LayerSpec l1;
    l1.is_tt = true;
    l1.in_dim = 8;
    l1.out_dim = 27;
    l1.in_f = ModeFactorization({2, 2, 2});
    l1.out_f = ModeFactorization({3, 3, 3});
    l1.ranks = RankProfile({1, 2, 2, 1});
    l1.activation = Activation::relu;
    LayerSpec l2;
    l2.is_tt = true;
    l2.in_dim = 27;
    l2.out_dim = 8;
    l2.in_f = ModeFactorization({3, 3, 3});
    l2.out_f = ModeFactorization({2, 2, 2});
    l2.ranks = RankProfile({1, 2, 2, 1});
    l2.activation = loss == LossKind::cross_entropy ? Activation::softmax_at_loss
                                                    : Activation::identity;
    spec.layers = {l1, l2};
    return spec;
}

} // namespace

TEST_CASE("every gradient passes central finite differences (cross-entropy)") {
    Network net = build_network(two_tt_layer_spec(LossKind::cross_entropy), 90);
    Dataset data;
    std::mt19937_64 gen(91);
    for (int s = 0; s < 8; ++s) {
        std::vector<double> x(8);
        for (double& v : x) v = standard_normal(gen);
        data.inputs.push_back(x);
        data.labels.push_back(uniform_index(gen, 8));
    }
    check_all_gradients(net, data);
}

TEST_CASE("every gradient passes central finite differences (mae)") {
    Network net = build_network(two_tt_layer_spec(LossKind::mae), 92);
    Dataset data;
    std::mt19937_64 gen(93);
    for (int s = 0; s < 8; ++s) {
        std::vector<double> x(8), y(8);
        for (double& v : x) v = standard_normal(gen);
        for (double& v : y) v = standard_normal(gen);
        data.inputs.push_back(x);
        data.targets.push_back(y);
    }
    check_all_gradients(net, data);
}

namespace {

bool networks_identical(const Network& a, const Network& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (const auto* da = std::get_if<DenseLayer>(&a.layers[l])) {
            const auto* db = std::get_if<DenseLayer>(&b.layers[l]);
            if (!db || da->weight.data != db->weight.data || da->bias != db->bias) return false;
        } else {
            const auto& ta = std::get<TTLayer>(a.layers[l]);
            const auto* tb = std::get_if<TTLayer>(&b.layers[l]);
            if (!tb || ta.bias != tb->bias) return false;
            for (std::size_t k = 0; k < ta.weight.order(); ++k)
                if (ta.weight.core(k).data != tb->weight.core(k).data) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("train: zero learning rate leaves every parameter bit-identical") {
    Dataset data = make_blobs(10, 8, 4, 0.3, 94);
    NetworkSpec spec = two_tt_layer_spec(LossKind::cross_entropy);
    Network net = build_network(spec, 95);

    for (auto opt : {OptimizerKind::sgd, OptimizerKind::adam}) {
        TrainConfig cfg;
        cfg.optimizer = opt;
        cfg.learning_rate = 0.0;
        cfg.batch_size = 8;
        cfg.epochs = 3;
        cfg.seed = 96;
        TrainResult res = train(net, data, nullptr, cfg);
        CHECK(networks_identical(res.net, net));
    }
}

TEST_CASE("train: mae loss strictly decreases on a linear regression toy") {
    // Noiseless linear target, full-batch subgradient descent.
    std::mt19937_64 gen(97);
    Matrix truth(3, 5);
    for (double& v : truth.data) v = standard_normal(gen);
    Dataset data;
    for (int s = 0; s < 40; ++s) {
        std::vector<double> x(5);
        for (double& v : x) v = standard_normal(gen);
        std::vector<double> y(3, 0.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 5; ++j) y[i] += truth(i, j) * x[j];
        data.inputs.push_back(std::move(x));
        data.targets.push_back(std::move(y));
    }

    NetworkSpec spec;
    spec.loss_kind = LossKind::mae;
    LayerSpec lin;
    lin.is_tt = false;
    lin.in_dim = 5;
    lin.out_dim = 3;
    lin.activation = Activation::identity;
    spec.layers = {lin};

    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.learning_rate = 0.02;
    cfg.batch_size = data.size();
    cfg.epochs = 50;
    cfg.seed = 98;
    TrainResult res = train(build_network(spec, 99), data, nullptr, cfg);
    for (std::size_t e = 0; e + 1 < res.trace.size(); ++e)
        CHECK(res.trace[e + 1].train_loss < res.trace[e].train_loss);
}

TEST_CASE("train: blob task reaches 95% train accuracy for all three seeds") {
    Dataset train_set = ttest::blob_train_set();
    for (std::uint64_t seed : {1, 2, 3}) {
        TrainConfig cfg = ttest::blob_pretrain_config(seed);
        cfg.epochs = 40;
        Network net = build_network(ttest::blob_tt_spec(ttest::blob_large_ranks()), seed);
        TrainResult res = train(net, train_set, nullptr, cfg);
        CHECK(res.trace.back().train_accuracy >= 0.95);
    }
}

TEST_CASE("train: identical seeds give bit-identical traces") {
    Dataset data = make_blobs(15, 8, 4, 0.3, 100);
    NetworkSpec spec = two_tt_layer_spec(LossKind::cross_entropy);
    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::adam;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 16;
    cfg.epochs = 5;
    cfg.seed = 101;

    TrainResult a = train(build_network(spec, 102), data, nullptr, cfg);
    TrainResult b = train(build_network(spec, 102), data, nullptr, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t e = 0; e < a.trace.size(); ++e) {
        CHECK(a.trace[e].train_loss == b.trace[e].train_loss);
        CHECK(a.trace[e].train_accuracy == b.trace[e].train_accuracy);
    }
    CHECK(networks_identical(a.net, b.net));
}

TEST_CASE("train: final trace entry equals a fresh evaluation of the final model") {
    Dataset data = make_blobs(15, 8, 4, 0.3, 103);
    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 8;
    cfg.epochs = 4;
    cfg.seed = 104;
    TrainResult res = train(build_network(two_tt_layer_spec(LossKind::cross_entropy), 105),
                            data, nullptr, cfg);
    const EvalResult ev = evaluate(res.net, data);
    CHECK(ev.loss == res.trace.back().train_loss);
    CHECK(ev.accuracy == res.trace.back().train_accuracy);
}

TEST_CASE("train: only_tt_cores freezes dense weights and biases") {
    Dataset data = make_blobs(10, 16, 4, 0.3, 106);
    Network net = build_network(ttest::blob_tt_spec(RankProfile({1, 2, 2, 2, 1})), 107);
    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 16;
    cfg.epochs = 2;
    cfg.seed = 108;
    cfg.only_tt_cores = true;
    TrainResult res = train(net, data, nullptr, cfg);

    const auto& head_in = std::get<DenseLayer>(net.layers[2]);
    const auto& head_out = std::get<DenseLayer>(res.net.layers[2]);
    CHECK(head_in.weight.data == head_out.weight.data);
    CHECK(head_in.bias == head_out.bias);
    CHECK(std::get<TTLayer>(net.layers[0]).bias == std::get<TTLayer>(res.net.layers[0]).bias);
    CHECK(std::get<TTLayer>(net.layers[0]).weight.core(0).data !=
          std::get<TTLayer>(res.net.layers[0]).weight.core(0).data);
}

TEST_CASE("build_lr_network: dominating target is a bit-exact no-op before fine-tuning") {
    Dataset data = make_blobs(10, 16, 4, 0.3, 109);
    Network net = build_network(ttest::blob_tt_spec(ttest::blob_small_ranks()), 110);

    RgdConfig rgd = ttest::blob_rgd_config();
    TrainConfig ft;
    ft.optimizer = OptimizerKind::sgd;
    ft.learning_rate = 0.0;
    ft.batch_size = 16;
    ft.epochs = 1;
    ft.seed = 111;

    auto [lr_net, report] = build_lr_network(net, ttest::blob_small_ranks(), rgd, ft, data,
                                             nullptr);
    CHECK(networks_identical(lr_net, net));
    CHECK(report.metric_truncated.loss == report.metric_input.loss);
    CHECK(report.params_before == report.params_after);
    for (const LayerCompressionReport& lr : report.layers) CHECK(lr.trace.size() == 1);
}

TEST_CASE("build_lr_network: layer parameter counts drop as specified") {
    // The 2048-unit layer geometry: ranks {1,12,12,12,1} -> {1,3,4,3,1}
    // shrinks each layer from 13056 to 1344 stored weights.
    TTMatrix large = random_tt_matrix(ModeFactorization({8, 4, 8, 8}),
                                      ModeFactorization({8, 4, 8, 8}),
                                      RankProfile({1, 12, 12, 12, 1}), 112);
    RgdConfig rgd = ttest::blob_rgd_config();
    rgd.max_steps = 10;
    rgd.stop_tol = 0.0;
    auto [compressed, trace] = rgd_compress(large, rgd);
    CHECK(param_count(large) == 13056);
    CHECK(param_count(compressed) == 1344);
    CHECK(double(param_count(large)) / double(param_count(compressed)) ==
          doctest::Approx(9.714).epsilon(1e-3));
    for (std::size_t t = 0; t + 1 < trace.size(); ++t)
        CHECK(trace.entries[t + 1].loss <=
              trace.entries[t].loss + 1e-12 * (1.0 + trace.entries[t].loss));
}

TEST_CASE("build_lr_network: fine-tuning recovers the truncation drop on the blob task") {
    Dataset train_set = ttest::blob_train_set();
    Dataset val_set = ttest::blob_val_set();
    for (std::uint64_t seed : {1, 2, 3}) {
        Network net = build_network(ttest::blob_tt_spec(ttest::blob_large_ranks()), seed);
        TrainResult pre = train(net, train_set, &val_set, ttest::blob_pretrain_config(seed));
        auto [lr_net, report] =
            build_lr_network(pre.net, ttest::blob_small_ranks(), ttest::blob_rgd_config(),
                             ttest::blob_finetune_config(seed + 100), train_set, &val_set);
        CHECK(ttest::recovered_90_percent(report.metric_input.accuracy,
                                          report.metric_truncated.accuracy,
                                          report.metric_fine_tuned.accuracy));
        CHECK(report.params_after < report.params_before);
    }
}

TEST_CASE("compare_init: equal ranks collapse both arms to the same computation") {
    Dataset train_set = make_blobs(20, 16, 4, 0.15, 113);
    CompareInitConfig cfg;
    cfg.pretrain = ttest::blob_pretrain_config(5);
    cfg.pretrain.epochs = 3;
    cfg.fine_tune = ttest::blob_finetune_config(6);
    cfg.fine_tune.epochs = 2;
    cfg.rgd = ttest::blob_rgd_config();

    NetworkSpec spec = ttest::blob_tt_spec(ttest::blob_small_ranks());
    CompareInitReport rep =
        compare_init(spec, ttest::blob_small_ranks(), train_set, nullptr, cfg);
    CHECK(networks_identical(rep.random_init.net, rep.lr_init.net));
    CHECK(rep.final_random.loss == rep.final_lr.loss);
    CHECK(rep.params_random == rep.params_lr);
}

TEST_CASE("compare_init: reproducible bit-exactly under a fixed seed") {
    Dataset train_set = make_blobs(20, 16, 4, 0.15, 114);
    CompareInitConfig cfg;
    cfg.pretrain = ttest::blob_pretrain_config(7);
    cfg.pretrain.epochs = 3;
    cfg.fine_tune = ttest::blob_finetune_config(8);
    cfg.fine_tune.epochs = 2;
    cfg.rgd = ttest::blob_rgd_config();

    NetworkSpec spec = ttest::blob_tt_spec(RankProfile({1, 6, 6, 6, 1}));
    CompareInitReport a =
        compare_init(spec, ttest::blob_small_ranks(), train_set, nullptr, cfg);
    CompareInitReport b =
        compare_init(spec, ttest::blob_small_ranks(), train_set, nullptr, cfg);
    CHECK(a.final_random.loss == b.final_random.loss);
    CHECK(a.final_lr.loss == b.final_lr.loss);
    CHECK(networks_identical(a.lr_init.net, b.lr_init.net));
}

TEST_CASE("capacity grows with rank: mean final training loss is non-increasing") {
    Dataset train_set = make_blobs(50, 16, 4, 0.10, 115);
    double prev_mean = std::numeric_limits<double>::infinity();
    for (std::size_t r : {1, 2, 3, 4}) {
        std::vector<std::size_t> ranks(5, r);
        ranks.front() = ranks.back() = 1;
        double mean = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            TrainConfig cfg = ttest::blob_pretrain_config(seed);
            cfg.epochs = 25;
            Network net = build_network(ttest::blob_tt_spec(RankProfile(ranks)), seed);
            mean += train(net, train_set, nullptr, cfg).trace.back().train_loss;
        }
        mean /= 5.0;
        CHECK(mean <= prev_mean * 1.01);
        prev_mean = mean;
    }
}

TEST_CASE("dataset: csv round trip, blob determinism, split") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ttrz_dataset_test";
    fs::create_directories(dir);

    Dataset blobs = make_blobs(12, 6, 3, 0.4, 116);
    CHECK(blobs.size() == 36);
    CHECK(blobs.classification());
    CHECK(blobs.class_count() == 3);

    Dataset again = make_blobs(12, 6, 3, 0.4, 116);
    CHECK(blobs.inputs == again.inputs);
    CHECK(blobs.labels == again.labels);

    const std::string cls_path = (dir / "cls.csv").string();
    save_csv(cls_path, blobs);
    Dataset loaded = load_csv(cls_path);
    CHECK(loaded.labels == blobs.labels);
    REQUIRE(loaded.size() == blobs.size());
    for (std::size_t s = 0; s < blobs.size(); ++s)
        CHECK(loaded.inputs[s] == blobs.inputs[s]);

    Dataset reg;
    reg.inputs = {{1.0, 2.0}, {3.0, 4.0}};
    reg.targets = {{0.5}, {-0.25}};
    const std::string reg_path = (dir / "reg.csv").string();
    save_csv(reg_path, reg);
    Dataset reg_loaded = load_csv(reg_path);
    CHECK(reg_loaded.targets == reg.targets);
    CHECK_FALSE(reg_loaded.classification());

    auto [train_part, held_part] = split_dataset(blobs, 0.75, 117);
    CHECK(train_part.size() == 27);
    CHECK(held_part.size() == 9);
    auto [train_part2, held_part2] = split_dataset(blobs, 0.75, 117);
    CHECK(train_part.inputs == train_part2.inputs);

    CHECK_THROWS_AS(load_csv((dir / "missing.csv").string()), IoError);
}

TEST_CASE("network validation rejects inconsistent stacks") {
    Network net;
    net.loss_kind = LossKind::cross_entropy;
    DenseLayer d;
    d.weight = Matrix(4, 3);
    d.bias.assign(4, 0.0);
    d.activation = Activation::relu; // cross-entropy head must be softmax_at_loss
    net.layers.emplace_back(d);
    CHECK_THROWS_AS(net.validate(), ConfigError);

    Dataset reg;
    reg.inputs = {{1.0, 2.0, 3.0}};
    reg.targets = {{1.0, 0.0, 0.0, 0.0}};
    Network ok;
    ok.loss_kind = LossKind::mae;
    d.activation = Activation::identity;
    ok.layers.emplace_back(d);
    CHECK_THROWS_AS(evaluate(ok, Dataset{}), ConfigError);

    Dataset labeled;
    labeled.inputs = {{1.0, 2.0, 3.0}};
    labeled.labels = {0};
    CHECK_THROWS_AS(loss_and_gradients(ok, labeled), LabelMismatch);
}

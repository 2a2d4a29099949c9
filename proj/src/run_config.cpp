#include "ttrz/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ttrz/errors.hpp"

namespace ttrz {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
    KeyValueConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(line_no));
        cfg.values_[key] = value;
    }
    return cfg;
}

const std::string& KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<std::size_t> parse_size_list(const std::string& text, char sep) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        char* end = nullptr;
        const unsigned long long v = std::strtoull(item.c_str(), &end, 10);
        if (item.empty() || end == item.c_str() || *end != '\0')
            throw ConfigError("expected a positive integer, got '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

NetworkSpec network_spec_from_config(const KeyValueConfig& cfg) {
    NetworkSpec spec;

    const std::string loss = cfg.get_or("loss", "mae");
    if (loss == "mae")
        spec.loss_kind = LossKind::mae;
    else if (loss == "cross_entropy")
        spec.loss_kind = LossKind::cross_entropy;
    else
        throw ConfigError("config: loss must be mae or cross_entropy");

    const std::vector<std::size_t> widths = parse_size_list(cfg.get("layers"));
    if (widths.size() < 2) throw ConfigError("config: layers needs at least two widths");

    std::vector<std::string> factor_specs;
    {
        std::stringstream ss(cfg.get("factors"));
        std::string item;
        while (std::getline(ss, item, ',')) factor_specs.push_back(trim(item));
    }
    if (factor_specs.size() != widths.size() - 1)
        throw ConfigError("config: factors must list one entry per layer");

    const bool any_tt =
        std::any_of(factor_specs.begin(), factor_specs.end(),
                    [](const std::string& s) { return s != "dense"; });
    RankProfile ranks;
    if (any_tt) ranks = RankProfile(parse_size_list(cfg.get("ranks")));

    for (std::size_t g = 0; g < factor_specs.size(); ++g) {
        LayerSpec ls;
        ls.in_dim = widths[g];
        ls.out_dim = widths[g + 1];
        const bool last = (g + 1 == factor_specs.size());
        ls.activation = last ? (spec.loss_kind == LossKind::cross_entropy
                                    ? Activation::softmax_at_loss
                                    : Activation::identity)
                             : Activation::relu;
        if (factor_specs[g] == "dense") {
            ls.is_tt = false;
        } else {
            const std::size_t dash = factor_specs[g].find('-');
            if (dash == std::string::npos)
                throw ConfigError("config: TT factors must look like 2.2.2.2-4.4.4.4");
            ls.is_tt = true;
            ls.in_f = ModeFactorization(parse_size_list(factor_specs[g].substr(0, dash), '.'));
            ls.out_f = ModeFactorization(parse_size_list(factor_specs[g].substr(dash + 1), '.'));
            if (ls.in_f.product() != ls.in_dim || ls.out_f.product() != ls.out_dim)
                throw ConfigError("config: factor products do not match layer widths");
            if (ranks.order() != ls.in_f.order())
                throw ConfigError("config: ranks length must be K+1 for K factors");
            ls.ranks = ranks;
        }
        spec.layers.push_back(std::move(ls));
    }
    return spec;
}

TrainConfig train_config_from_config(const KeyValueConfig& cfg) {
    TrainConfig tc;
    const std::string opt = cfg.get_or("optimizer", "sgd");
    if (opt == "sgd")
        tc.optimizer = OptimizerKind::sgd;
    else if (opt == "adam")
        tc.optimizer = OptimizerKind::adam;
    else
        throw ConfigError("config: optimizer must be sgd or adam");

    const auto parse_num = [&](const std::string& key, double fallback) {
        const std::string v = cfg.get_or(key, "");
        if (v.empty()) return fallback;
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError("config: bad number for '" + key + "'");
        return x;
    };

    tc.learning_rate = parse_num("lr", 0.01);
    tc.epochs = static_cast<std::size_t>(parse_num("epochs", 10));
    tc.batch_size = static_cast<std::size_t>(parse_num("batch", 32));
    tc.seed = static_cast<std::uint64_t>(parse_num("seed", 1));
    if (tc.learning_rate < 0.0) throw ConfigError("config: lr must be >= 0");
    if (tc.epochs < 1 || tc.batch_size < 1)
        throw ConfigError("config: epochs and batch must be >= 1");
    return tc;
}

} // namespace ttrz

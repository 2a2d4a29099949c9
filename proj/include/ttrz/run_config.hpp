#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ttrz/nn.hpp"

namespace ttrz {

/// key = value configuration file: one pair per line, '#' starts a
/// comment, whitespace around keys and values is ignored.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

std::vector<std::size_t> parse_size_list(const std::string& text, char sep = ',');

/// Network architecture from config keys:
///   layers    = 16,256,16,4            (widths, input first)
///   factors   = 2.2.2.2-4.4.4.4,4.4.4.4-2.2.2.2,dense
///   ranks     = 1,12,12,12,1           (applied to every TT layer)
///   loss      = mae | cross_entropy
/// Hidden layers use ReLU; the head is identity for mae and
/// softmax-at-loss for cross_entropy.
NetworkSpec network_spec_from_config(const KeyValueConfig& cfg);

TrainConfig train_config_from_config(const KeyValueConfig& cfg);

} // namespace ttrz

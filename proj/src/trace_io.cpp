#include "ttrz/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ttrz/errors.hpp"

namespace ttrz {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("trace: bad number '" + s + "'");
    return v;
}

std::string ranks_to_string(const RankProfile& ranks) {
    std::string out;
    for (std::size_t k = 0; k < ranks.ranks().size(); ++k) {
        if (k) out.push_back(',');
        out += std::to_string(ranks.rank(k));
    }
    return out;
}

RankProfile ranks_from_string(const std::string& s) {
    std::vector<std::size_t> ranks;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        ranks.push_back(static_cast<std::size_t>(std::strtoull(item.c_str(), nullptr, 10)));
    return RankProfile(std::move(ranks));
}

const std::string* find_key(const TraceRecord& rec, const std::string& key) {
    for (const auto& [k, v] : rec)
        if (k == key) return &v;
    return nullptr;
}

} // namespace

void write_records(const std::string& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace file: " + path);
    for (const TraceRecord& rec : records) {
        for (std::size_t i = 0; i < rec.size(); ++i)
            out << (i ? " " : "") << rec[i].first << "=" << rec[i].second;
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<TraceRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path);
    std::vector<TraceRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TraceRecord rec;
        std::stringstream ss(line);
        std::string token;
        while (ss >> token) {
            const std::size_t eq = token.find('=');
            if (eq == std::string::npos) throw IoError("trace: malformed token '" + token + "'");
            rec.emplace_back(token.substr(0, eq), token.substr(eq + 1));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TraceRecord> records_from_trace(const ConvergenceTrace& trace) {
    std::vector<TraceRecord> records;
    records.reserve(trace.size());
    for (const TraceEntry& e : trace.entries) {
        TraceRecord rec;
        rec.emplace_back("step", std::to_string(e.step));
        rec.emplace_back("loss", format_double(e.loss));
        rec.emplace_back("grad_norm_sq", format_double(e.grad_norm_sq));
        rec.emplace_back("ranks", ranks_to_string(e.ranks));
        records.push_back(std::move(rec));
    }
    return records;
}

ConvergenceTrace trace_from_records(const std::vector<TraceRecord>& records) {
    ConvergenceTrace trace;
    for (const TraceRecord& rec : records) {
        const std::string* step = find_key(rec, "step");
        const std::string* loss = find_key(rec, "loss");
        const std::string* grad = find_key(rec, "grad_norm_sq");
        const std::string* ranks = find_key(rec, "ranks");
        if (!step || !loss || !grad || !ranks) throw IoError("trace: missing key in record");
        TraceEntry e;
        e.step = static_cast<std::size_t>(std::strtoull(step->c_str(), nullptr, 10));
        e.loss = parse_double(*loss);
        e.grad_norm_sq = parse_double(*grad);
        e.ranks = ranks_from_string(*ranks);
        trace.entries.push_back(std::move(e));
    }
    return trace;
}

std::vector<TraceRecord> records_from_epochs(const std::vector<EpochStats>& epochs) {
    std::vector<TraceRecord> records;
    records.reserve(epochs.size());
    for (const EpochStats& e : epochs) {
        TraceRecord rec;
        rec.emplace_back("epoch", std::to_string(e.epoch));
        rec.emplace_back("train_loss", format_double(e.train_loss));
        if (e.val_loss >= 0.0) rec.emplace_back("val_loss", format_double(e.val_loss));
        if (e.train_accuracy >= 0.0)
            rec.emplace_back("train_acc", format_double(e.train_accuracy));
        if (e.val_accuracy >= 0.0) rec.emplace_back("val_acc", format_double(e.val_accuracy));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<EpochStats> epochs_from_records(const std::vector<TraceRecord>& records) {
    std::vector<EpochStats> epochs;
    for (const TraceRecord& rec : records) {
        EpochStats e;
        if (const std::string* v = find_key(rec, "epoch"))
            e.epoch = static_cast<std::size_t>(std::strtoull(v->c_str(), nullptr, 10));
        if (const std::string* v = find_key(rec, "train_loss")) e.train_loss = parse_double(*v);
        if (const std::string* v = find_key(rec, "val_loss")) e.val_loss = parse_double(*v);
        if (const std::string* v = find_key(rec, "train_acc"))
            e.train_accuracy = parse_double(*v);
        if (const std::string* v = find_key(rec, "val_acc")) e.val_accuracy = parse_double(*v);
        epochs.push_back(e);
    }
    return epochs;
}

} // namespace ttrz

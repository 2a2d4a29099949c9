#include "ttrz/container.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

namespace ttrz {

namespace {

using nlohmann::json;

constexpr char kMagic[5] = {'T', 'T', 'R', 'Z', '1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) {
    put_u64(out, std::bit_cast<std::uint64_t>(x));
}

std::uint64_t get_u64(const std::string& buf, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

double get_f64(const std::string& buf, std::size_t off) {
    return std::bit_cast<double>(get_u64(buf, off));
}

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::softmax_at_loss: return "softmax_at_loss";
    }
    return "relu";
}

Activation activation_from(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "identity") return Activation::identity;
    if (s == "softmax_at_loss") return Activation::softmax_at_loss;
    throw IoError("corrupt container: unknown activation '" + s + "'");
}

json ranks_json(const RankProfile& ranks) { return json(ranks.ranks()); }

RankProfile ranks_from_json(const json& j) {
    return RankProfile(j.get<std::vector<std::size_t>>());
}

// Metadata plus the ordered list of raw float segments.
struct Encoded {
    json meta;
    std::vector<const std::vector<double>*> segments;
};

Encoded encode_tt_vector_into(const TTVector& w, json& meta) {
    Encoded enc;
    meta["modes"] = w.shape().dims();
    meta["ranks"] = ranks_json(w.rank_profile());
    for (const TTCore3& c : w.cores()) enc.segments.push_back(&c.data);
    return enc;
}

Encoded encode(const Payload& payload) {
    Encoded enc;
    if (const auto* dense = std::get_if<DenseTensor>(&payload)) {
        enc.meta["kind"] = "dense";
        enc.meta["shape"] = dense->shape().dims();
        enc.segments.push_back(&dense->data());
    } else if (const auto* ttv = std::get_if<TTVector>(&payload)) {
        enc.meta["kind"] = "tt_vector";
        Encoded inner = encode_tt_vector_into(*ttv, enc.meta);
        enc.segments = std::move(inner.segments);
    } else if (const auto* ttm = std::get_if<TTMatrix>(&payload)) {
        enc.meta["kind"] = "tt_matrix";
        enc.meta["out_modes"] = ttm->out_shape().dims();
        enc.meta["in_modes"] = ttm->in_shape().dims();
        enc.meta["ranks"] = ranks_json(ttm->rank_profile());
        for (const TTCore4& c : ttm->cores()) enc.segments.push_back(&c.data);
    } else {
        const auto& net = std::get<Network>(payload);
        enc.meta["kind"] = "network";
        enc.meta["loss"] = net.loss_kind == LossKind::mae ? "mae" : "cross_entropy";
        json layers = json::array();
        for (const Layer& layer : net.layers) {
            json jl;
            if (const auto* d = std::get_if<DenseLayer>(&layer)) {
                jl["type"] = "dense";
                jl["rows"] = d->weight.rows;
                jl["cols"] = d->weight.cols;
                jl["activation"] = activation_name(d->activation);
                enc.segments.push_back(&d->weight.data);
                enc.segments.push_back(&d->bias);
            } else {
                const auto& t = std::get<TTLayer>(layer);
                jl["type"] = "tt";
                jl["out_modes"] = t.weight.out_shape().dims();
                jl["in_modes"] = t.weight.in_shape().dims();
                jl["ranks"] = ranks_json(t.weight.rank_profile());
                jl["activation"] = activation_name(t.activation);
                for (const TTCore4& c : t.weight.cores()) enc.segments.push_back(&c.data);
                enc.segments.push_back(&t.bias);
            }
            layers.push_back(std::move(jl));
        }
        enc.meta["layers"] = std::move(layers);
    }
    return enc;
}

// Sequential reader over the payload bytes.
struct SegmentReader {
    const std::string& buf;
    std::size_t off;

    std::vector<double> take(std::size_t count) {
        if (off + 8 * count > buf.size()) throw IoError("corrupt container: truncated payload");
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = get_f64(buf, off + 8 * i);
        off += 8 * count;
        return out;
    }
};

TTVector decode_tt_vector(const json& meta, SegmentReader& reader) {
    const auto modes = meta.at("modes").get<std::vector<std::size_t>>();
    const RankProfile ranks = ranks_from_json(meta.at("ranks"));
    if (ranks.order() != modes.size()) throw IoError("corrupt container: rank/mode mismatch");
    std::vector<TTCore3> cores;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        TTCore3 c(modes[k], ranks.rank(k), ranks.rank(k + 1));
        c.data = reader.take(c.size());
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

TTMatrix decode_tt_matrix(const json& meta, SegmentReader& reader) {
    const auto out_modes = meta.at("out_modes").get<std::vector<std::size_t>>();
    const auto in_modes = meta.at("in_modes").get<std::vector<std::size_t>>();
    const RankProfile ranks = ranks_from_json(meta.at("ranks"));
    if (out_modes.size() != in_modes.size() || ranks.order() != in_modes.size())
        throw IoError("corrupt container: operator metadata mismatch");
    std::vector<TTCore4> cores;
    for (std::size_t k = 0; k < in_modes.size(); ++k) {
        TTCore4 c(out_modes[k], in_modes[k], ranks.rank(k), ranks.rank(k + 1));
        c.data = reader.take(c.size());
        cores.push_back(std::move(c));
    }
    return TTMatrix(std::move(cores));
}

Payload decode(const json& meta, SegmentReader& reader) {
    const std::string kind = meta.at("kind").get<std::string>();
    if (kind == "dense") {
        const Shape shape(meta.at("shape").get<std::vector<std::size_t>>());
        std::vector<double> data = reader.take(shape.element_count());
        return DenseTensor(shape, std::move(data));
    }
    if (kind == "tt_vector") return decode_tt_vector(meta, reader);
    if (kind == "tt_matrix") return decode_tt_matrix(meta, reader);
    if (kind == "network") {
        Network net;
        const std::string loss = meta.at("loss").get<std::string>();
        if (loss == "mae")
            net.loss_kind = LossKind::mae;
        else if (loss == "cross_entropy")
            net.loss_kind = LossKind::cross_entropy;
        else
            throw IoError("corrupt container: unknown loss kind");
        for (const json& jl : meta.at("layers")) {
            const std::string type = jl.at("type").get<std::string>();
            if (type == "dense") {
                DenseLayer d;
                d.weight = Matrix(jl.at("rows").get<std::size_t>(),
                                  jl.at("cols").get<std::size_t>());
                d.weight.data = reader.take(d.weight.size());
                d.bias = reader.take(d.weight.rows);
                d.activation = activation_from(jl.at("activation").get<std::string>());
                net.layers.emplace_back(std::move(d));
            } else if (type == "tt") {
                TTLayer t;
                t.weight = decode_tt_matrix(jl, reader);
                t.bias = reader.take(t.weight.out_dim());
                t.activation = activation_from(jl.at("activation").get<std::string>());
                net.layers.emplace_back(std::move(t));
            } else {
                throw IoError("corrupt container: unknown layer type");
            }
        }
        net.validate();
        return net;
    }
    throw IoError("corrupt container: unknown payload kind '" + kind + "'");
}

} // namespace

void write_container(const std::string& path, const Payload& payload) {
    const Encoded enc = encode(payload);
    const std::string meta = enc.meta.dump();

    std::string bytes;
    bytes.append(kMagic, sizeof kMagic);
    put_u64(bytes, meta.size());
    bytes.append(meta);
    for (const std::vector<double>* seg : enc.segments)
        for (double x : *seg) put_f64(bytes, x);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write container: " + path);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move container into place: " + path);
    }
}

Payload read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open container: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof kMagic + 8 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
        throw IoError("corrupt container: bad magic in " + path);
    const std::uint64_t meta_len = get_u64(buf, sizeof kMagic);
    const std::size_t meta_off = sizeof kMagic + 8;
    if (meta_off + meta_len > buf.size())
        throw IoError("corrupt container: truncated metadata in " + path);

    json meta;
    try {
        meta = json::parse(buf.substr(meta_off, meta_len));
    } catch (const json::exception& e) {
        throw IoError("corrupt container: bad metadata in " + path + ": " + e.what());
    }

    SegmentReader reader{buf, meta_off + static_cast<std::size_t>(meta_len)};
    Payload payload = [&] {
        try {
            return decode(meta, reader);
        } catch (const json::exception& e) {
            throw IoError("corrupt container: " + std::string(e.what()));
        }
    }();
    if (reader.off != buf.size())
        throw IoError("corrupt container: trailing bytes in " + path);
    return payload;
}

const char* payload_kind_name(const Payload& payload) {
    if (std::holds_alternative<DenseTensor>(payload)) return "dense";
    if (std::holds_alternative<TTVector>(payload)) return "tt_vector";
    if (std::holds_alternative<TTMatrix>(payload)) return "tt_matrix";
    return "network";
}

std::size_t payload_param_count(const Payload& payload) {
    if (const auto* dense = std::get_if<DenseTensor>(&payload)) return dense->size();
    if (const auto* ttv = std::get_if<TTVector>(&payload)) return param_count(*ttv);
    if (const auto* ttm = std::get_if<TTMatrix>(&payload)) return param_count(*ttm);
    return std::get<Network>(payload).param_count();
}

} // namespace ttrz

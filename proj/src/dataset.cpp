#include "ttrz/dataset.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ttrz/errors.hpp"
#include "ttrz/rng.hpp"

namespace ttrz {

std::size_t Dataset::target_dim() const { return targets.empty() ? 0 : targets.front().size(); }

std::size_t Dataset::class_count() const {
    std::size_t n = 0;
    for (std::size_t l : labels) n = std::max(n, l + 1);
    return n;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw IoError("csv: bad numeric value '" + s + "' " + where);
    return v;
}

} // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: missing header in " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split(line, ',');
    std::size_t x_count = 0;
    std::size_t y_count = 0;
    bool has_label = false;
    for (const std::string& raw : header) {
        const std::string name = trim(raw);
        if (name.rfind('x', 0) == 0) {
            if (y_count > 0 || has_label) throw IoError("csv: feature column after targets");
            ++x_count;
        } else if (name.rfind('y', 0) == 0) {
            ++y_count;
        } else if (name == "label") {
            has_label = true;
        } else {
            throw IoError("csv: unrecognized column '" + name + "'");
        }
    }
    if (x_count == 0) throw IoError("csv: no feature columns");
    if (has_label == (y_count > 0))
        throw IoError("csv: need either y* columns or a label column");

    Dataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != header.size())
            throw IoError("csv: wrong column count at line " + std::to_string(line_no));

        const std::string where = "at line " + std::to_string(line_no);
        std::vector<double> x(x_count);
        for (std::size_t i = 0; i < x_count; ++i) x[i] = parse_double(trim(cells[i]), where);
        data.inputs.push_back(std::move(x));

        if (has_label) {
            const std::string cell = trim(cells[x_count]);
            char* end = nullptr;
            const long long v = std::strtoll(cell.c_str(), &end, 10);
            if (end == cell.c_str() || *end != '\0' || v < 0)
                throw IoError("csv: bad label '" + cell + "' " + where);
            data.labels.push_back(static_cast<std::size_t>(v));
        } else {
            std::vector<double> y(y_count);
            for (std::size_t i = 0; i < y_count; ++i)
                y[i] = parse_double(trim(cells[x_count + i]), where);
            data.targets.push_back(std::move(y));
        }
    }
    if (data.inputs.empty()) throw IoError("csv: no data rows in " + path);
    return data;
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file: " + path);

    for (std::size_t i = 0; i < data.input_dim(); ++i) out << (i ? "," : "") << "x" << i;
    if (data.classification()) {
        out << ",label\n";
    } else {
        for (std::size_t i = 0; i < data.target_dim(); ++i) out << ",y" << i;
        out << "\n";
    }

    char buf[32];
    for (std::size_t s = 0; s < data.size(); ++s) {
        for (std::size_t i = 0; i < data.inputs[s].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.inputs[s][i]);
            out << (i ? "," : "") << buf;
        }
        if (data.classification()) {
            out << "," << data.labels[s] << "\n";
        } else {
            for (double v : data.targets[s]) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "," << buf;
            }
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

Dataset make_blobs(std::size_t per_class, std::size_t dim, std::size_t classes,
                   double spread, std::uint64_t seed) {
    if (per_class == 0 || dim == 0 || classes == 0)
        throw ConfigError("make_blobs: sizes must be >= 1");
    if (classes > dim)
        throw ConfigError("make_blobs: needs classes <= dim");

    std::mt19937_64 gen(seed);
    Dataset data;
    // Class c is a pair of opposite blobs at +e_c and -e_c, so the classes
    // are not linearly separable and the hidden layers have work to do.
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t s = 0; s < per_class; ++s) {
            std::vector<double> x(dim, 0.0);
            x[c] = (s % 2 == 0) ? 1.0 : -1.0;
            for (std::size_t d = 0; d < dim; ++d) x[d] += spread * standard_normal(gen);
            data.inputs.push_back(std::move(x));
            data.labels.push_back(c);
        }
    }

    // Mix classes so mini-batches and splits are balanced.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, gen);
    Dataset mixed;
    for (std::size_t i : order) {
        mixed.inputs.push_back(std::move(data.inputs[i]));
        mixed.labels.push_back(data.labels[i]);
    }
    return mixed;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw ConfigError("split_dataset: fraction must lie in (0, 1)");
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, gen);

    const std::size_t n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(train_fraction * static_cast<double>(data.size())));

    Dataset train, held;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Dataset& dst = i < n_train ? train : held;
        dst.inputs.push_back(data.inputs[order[i]]);
        if (data.classification())
            dst.labels.push_back(data.labels[order[i]]);
        else
            dst.targets.push_back(data.targets[order[i]]);
    }
    return {std::move(train), std::move(held)};
}

} // namespace ttrz

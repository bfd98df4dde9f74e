#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "s2sl/errors.hpp"
#include "s2sl/matrix.hpp"
#include "s2sl/rng.hpp"

namespace s2sl {

/// Feature matrix plus integer class labels. Label ids index class_names.
struct Dataset {
    Matrix features;                       // N x d
    std::vector<std::size_t> labels;       // length N
    std::vector<std::string> class_names;  // label id -> name
    std::string name;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }
    std::size_t num_classes() const { return class_names.size(); }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(num_classes(), 0);
        for (std::size_t l : labels) counts[l]++;
        return counts;
    }
};

/// Rows picked from `source` in the order given by `rows`.
inline Dataset subset(const Dataset& source, std::span<const std::size_t> rows) {
    Dataset out;
    out.features = Matrix(rows.size(), source.dim());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = source.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(source.labels[rows[i]]);
    }
    out.class_names = source.class_names;
    out.name = source.name;
    return out;
}

struct CsvSchema {
    std::size_t dim = 0;  // 0 = infer from the first data row
    bool header = false;  // skip one leading line
};

/// CSV rows are d comma-separated reals followed by one label token. Labels
/// are registered in order of first appearance. LF and CRLF both accepted.
inline Dataset load_csv(std::istream& in, const std::string& display_name,
                        CsvSchema schema = {}) {
    Dataset ds;
    ds.name = display_name;
    std::string line;
    std::size_t line_no = 0;
    if (schema.header) {
        std::getline(in, line);
        ++line_no;
    }
    std::size_t dim = schema.dim;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2)
            throw DataError(display_name + ":" + std::to_string(line_no) +
                            ": expected features followed by a label");
        if (dim == 0) dim = fields.size() - 1;
        if (fields.size() != dim + 1)
            throw DataError(display_name + ":" + std::to_string(line_no) + ": has " +
                            std::to_string(fields.size() - 1) + " features, expected " +
                            std::to_string(dim));
        std::vector<double> feats(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            const std::string& tok = fields[j];
            std::size_t consumed = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            if (consumed != tok.size() || tok.empty())
                throw DataError(display_name + ":" + std::to_string(line_no) + ": column " +
                                std::to_string(j + 1) + ": '" + tok + "' is not numeric");
            feats[j] = v;
        }
        const std::string& label = fields.back();
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), label);
        std::size_t id;
        if (it == ds.class_names.end()) {
            id = ds.class_names.size();
            ds.class_names.push_back(label);  // auto-register unknown labels
        } else {
            id = static_cast<std::size_t>(it - ds.class_names.begin());
        }
        ds.labels.push_back(id);
        rows.push_back(std::move(feats));
    }
    if (rows.empty()) throw DataError(display_name + ": no rows");
    ds.features = Matrix(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), ds.features.row(i).begin());
    return ds;
}

inline Dataset load_csv(const std::string& path, CsvSchema schema = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("load_csv: cannot open " + path);
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    return load_csv(in, stem, schema);
}

inline void save_csv(const Dataset& ds, std::ostream& out) {
    char buf[32];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto row = ds.features.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        out << ds.class_names[ds.labels[i]] << '\n';
    }
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("save_csv: cannot open " + path);
    save_csv(ds, out);
    if (!out) throw DataError("save_csv: write failed for " + path);
}

/// Per-feature z-score statistics, fitted on training rows only.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;  // floored at 1e-8
};

inline Normalizer fit_normalizer(const Dataset& train) {
    if (train.size() == 0) throw DataError("fit_normalizer: empty dataset");
    const std::size_t n = train.size(), d = train.dim();
    Normalizer nz;
    nz.mean.assign(d, 0.0);
    nz.stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) nz.mean[j] += row[j];
    }
    for (double& m : nz.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = row[j] - nz.mean[j];
            nz.stddev[j] += delta * delta;
        }
    }
    for (double& s : nz.stddev) s = std::max(std::sqrt(s / static_cast<double>(n)), 1e-8);
    return nz;
}

inline Dataset apply_normalizer(const Normalizer& nz, const Dataset& ds) {
    if (nz.mean.size() != ds.dim())
        throw ShapeError("apply_normalizer: normalizer has " +
                         std::to_string(nz.mean.size()) + " features, dataset has " +
                         std::to_string(ds.dim()));
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto row = out.features.row(i);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = (row[j] - nz.mean[j]) / nz.stddev[j];
    }
    return out;
}

/// Two spherical gaussian clouds: class 0 at -(separation/2) on every axis,
/// class 1 at +(separation/2), unit variance. Rows are class 0 then class 1.
inline Dataset gen_gaussian_two_class(std::size_t d, std::size_t n1, std::size_t n2,
                                      double separation, RngStream& rng) {
    if (d < 1 || n1 < 1 || n2 < 1)
        throw ConfigError("gen_gaussian_two_class: counts and dimension must be >= 1");
    if (separation < 0.0)
        throw ConfigError("gen_gaussian_two_class: separation must be >= 0");
    Dataset ds;
    ds.name = "gauss-d" + std::to_string(d) + "-" + std::to_string(n1) + "v" +
              std::to_string(n2);
    ds.class_names = {"c1", "c2"};
    ds.features = Matrix(n1 + n2, d);
    ds.labels.reserve(n1 + n2);
    const double offset = separation / 2.0;
    for (std::size_t i = 0; i < n1 + n2; ++i) {
        const bool second = i >= n1;
        auto row = ds.features.row(i);
        for (double& v : row) v = rng.next_gaussian(second ? offset : -offset, 1.0);
        ds.labels.push_back(second ? 1 : 0);
    }
    return ds;
}

}  // namespace s2sl

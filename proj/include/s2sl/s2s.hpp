#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "s2sl/dataset.hpp"
#include "s2sl/errors.hpp"
#include "s2sl/matrix.hpp"
#include "s2sl/nnet.hpp"
#include "s2sl/rng.hpp"

namespace s2sl {

/// Maps class ids to K-wide one-hot blocks and back.
///
/// Class c gets the block with the hot bit at position K-1-c, so for two
/// classes encode(0) = [0,1] and encode(1) = [1,0], and the four paired
/// targets come out as [0,1,0,1], [0,1,1,0], [1,0,0,1], [1,0,1,0] for
/// (c0,c0), (c0,c1), (c1,c0), (c1,c1) respectively.
class LabelCodec {
public:
    explicit LabelCodec(std::size_t num_classes) : num_classes_(num_classes) {
        if (num_classes < 2) throw ConfigError("LabelCodec: need at least 2 classes");
    }

    std::size_t num_classes() const { return num_classes_; }

    std::size_t hot_index(std::size_t c) const {
        check_class(c);
        return num_classes_ - 1 - c;
    }

    std::vector<double> encode(std::size_t c) const {
        std::vector<double> block(num_classes_, 0.0);
        block[hot_index(c)] = 1.0;
        return block;
    }

    /// Class of the largest entry in a K-wide block (first maximum on ties).
    std::size_t decode(std::span<const double> block) const {
        if (block.size() != num_classes_)
            throw ShapeError("LabelCodec::decode: block has " +
                             std::to_string(block.size()) + " entries, expected " +
                             std::to_string(num_classes_));
        std::size_t best = 0;
        for (std::size_t i = 1; i < block.size(); ++i)
            if (block[i] > block[best]) best = i;
        return num_classes_ - 1 - best;
    }

private:
    void check_class(std::size_t c) const {
        if (c >= num_classes_)
            throw ConfigError("LabelCodec: unknown class id " + std::to_string(c) +
                              ", have " + std::to_string(num_classes_) + " classes");
    }

    std::size_t num_classes_;
};

/// Target for one sample pair: [encode(ci), encode(ck)], 2K wide.
inline std::vector<double> encode_label_pair(const LabelCodec& codec, std::size_t ci,
                                             std::size_t ck) {
    std::vector<double> target = codec.encode(ci);
    const std::vector<double> second = codec.encode(ck);
    target.insert(target.end(), second.begin(), second.end());
    return target;
}

struct PairProvenance {
    std::size_t first_row;
    std::size_t second_row;
    std::size_t first_class;
    std::size_t second_class;
};

/// Paired training set: M x 2d inputs, M x 2K multi-hot targets.
struct PairedSet {
    Matrix inputs;
    Matrix targets;
    std::vector<PairProvenance> provenance;
};

/// Full Cartesian square of the training samples, self-pairs included, so a
/// dataset of N1 + N2 samples yields (N1 + N2)^2 pairs. Row order is outer
/// index major: pair (j, l) lands at row j*N + l.
inline PairedSet build_train_pairs(const Dataset& dataset, const LabelCodec& codec,
                                   std::size_t max_pairs = 1'000'000) {
    const std::size_t n = dataset.size();
    if (n == 0) throw DataError("build_train_pairs: empty dataset");
    for (std::size_t l : dataset.labels)
        if (l >= codec.num_classes())
            throw ConfigError("build_train_pairs: label id " + std::to_string(l) +
                              " outside codec range");
    if (n * n > max_pairs)
        throw ConfigError("build_train_pairs: " + std::to_string(n) + "^2 = " +
                          std::to_string(n * n) + " pairs exceeds cap of " +
                          std::to_string(max_pairs));
    const std::size_t d = dataset.dim();
    const std::size_t k = codec.num_classes();

    PairedSet out;
    out.inputs = Matrix(n * n, 2 * d);
    out.targets = Matrix(n * n, 2 * k);
    out.provenance.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        auto xj = dataset.features.row(j);
        for (std::size_t l = 0; l < n; ++l) {
            const std::size_t row = j * n + l;
            auto xl = dataset.features.row(l);
            auto in = out.inputs.row(row);
            std::copy(xj.begin(), xj.end(), in.begin());
            std::copy(xl.begin(), xl.end(), in.begin() + d);
            auto tgt = out.targets.row(row);
            tgt[codec.hot_index(dataset.labels[j])] = 1.0;
            tgt[k + codec.hot_index(dataset.labels[l])] = 1.0;
            out.provenance.push_back(
                {j, l, dataset.labels[j], dataset.labels[l]});
        }
    }
    return out;
}

enum class ReferencePolicy { stratified_random, all_train, custom };

/// Labeled samples each test vector is paired against. Rows always come from
/// the training portion of the current fold.
struct ReferenceSet {
    Matrix features;  // R x d
    std::vector<std::size_t> labels;
    ReferencePolicy policy = ReferencePolicy::stratified_random;
    std::vector<std::size_t> source_rows;  // indices into the training set
};

/// stratified_random draws ceil(R/K) or floor(R/K) per class (extras go to
/// the lowest class ids) uniformly without replacement; all_train returns
/// every training sample in order.
inline ReferenceSet select_references(const Dataset& train, ReferencePolicy policy,
                                      std::size_t r, RngStream& rng) {
    if (train.size() == 0) throw DataError("select_references: empty training set");
    ReferenceSet refs;
    refs.policy = policy;

    if (policy == ReferencePolicy::all_train) {
        refs.source_rows.resize(train.size());
        std::iota(refs.source_rows.begin(), refs.source_rows.end(), 0);
    } else if (policy == ReferencePolicy::stratified_random) {
        const std::size_t k = train.num_classes();
        if (r < k)
            throw ConfigError("select_references: R = " + std::to_string(r) +
                              " below class count " + std::to_string(k));
        if (r > train.size())
            throw ConfigError("select_references: R = " + std::to_string(r) +
                              " exceeds training size " + std::to_string(train.size()));
        std::vector<std::vector<std::size_t>> by_class(k);
        for (std::size_t i = 0; i < train.size(); ++i)
            by_class[train.labels[i]].push_back(i);
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t want = r / k + (c < r % k ? 1 : 0);
            if (want > by_class[c].size())
                throw ConfigError("select_references: class " + std::to_string(c) +
                                  " has " + std::to_string(by_class[c].size()) +
                                  " samples, need " + std::to_string(want));
            seeded_shuffle(rng, by_class[c]);
            refs.source_rows.insert(refs.source_rows.end(), by_class[c].begin(),
                                    by_class[c].begin() + want);
        }
    } else {
        throw ConfigError("select_references: custom policy takes a caller-built set");
    }

    refs.features = Matrix(refs.source_rows.size(), train.dim());
    refs.labels.reserve(refs.source_rows.size());
    for (std::size_t i = 0; i < refs.source_rows.size(); ++i) {
        auto src = train.features.row(refs.source_rows[i]);
        std::copy(src.begin(), src.end(), refs.features.row(i).begin());
        refs.labels.push_back(train.labels[refs.source_rows[i]]);
    }
    return refs;
}

/// R instances of one test sample: row j is [test_x, refs[j]], the test
/// sample always occupying the first d columns.
inline Matrix make_test_instances(std::span<const double> test_x,
                                  const ReferenceSet& refs) {
    const std::size_t d = refs.features.cols();
    if (test_x.size() != d)
        throw ShapeError("make_test_instances: test sample has " +
                         std::to_string(test_x.size()) + " features, references have " +
                         std::to_string(d));
    Matrix out(refs.features.rows(), 2 * d);
    for (std::size_t j = 0; j < refs.features.rows(); ++j) {
        auto row = out.row(j);
        std::copy(test_x.begin(), test_x.end(), row.begin());
        auto ref = refs.features.row(j);
        std::copy(ref.begin(), ref.end(), row.begin() + d);
    }
    return out;
}

struct VoteTally {
    std::vector<std::size_t> votes;       // per class, summing to R
    std::vector<double> confidence;       // per class, summed test-block scores
    std::size_t winner = 0;
};

/// Majority vote over the R paired instances of a test sample.
///
/// Each instance casts one hard vote for the class decoded from the first K
/// output units (the test-sample block). The winner is the class with the
/// most votes; vote ties go to the class with the larger summed test-block
/// confidence, and any remaining tie to the lowest class id.
inline VoteTally vote_decide(const Network& net, std::span<const double> test_x,
                             const ReferenceSet& refs, const LabelCodec& codec) {
    const std::size_t k = codec.num_classes();
    if (net.config.output_dim != 2 * k)
        throw ShapeError("vote_decide: net outputs " +
                         std::to_string(net.config.output_dim) + " units, codec needs " +
                         std::to_string(2 * k));
    const Matrix instances = make_test_instances(test_x, refs);
    if (net.config.input_dim != instances.cols())
        throw ShapeError("vote_decide: net takes " + std::to_string(net.config.input_dim) +
                         " inputs, instances are " + instances.shape_str());
    const Matrix outputs = forward_batch(net, instances);

    VoteTally tally;
    tally.votes.assign(k, 0);
    tally.confidence.assign(k, 0.0);
    for (std::size_t j = 0; j < outputs.rows(); ++j) {
        const auto test_block = outputs.row(j).subspan(0, k);
        tally.votes[codec.decode(test_block)]++;
        for (std::size_t c = 0; c < k; ++c)
            tally.confidence[c] += test_block[codec.hot_index(c)];
    }
    tally.winner = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (tally.votes[c] > tally.votes[tally.winner] ||
            (tally.votes[c] == tally.votes[tally.winner] &&
             tally.confidence[c] > tally.confidence[tally.winner]))
            tally.winner = c;
    }
    return tally;
}

}  // namespace s2sl

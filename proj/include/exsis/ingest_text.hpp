#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exsis/model_core.hpp"

namespace exsis {

struct Corpus {
    struct Doc {
        std::string id;
        std::vector<std::string> tokens;
        int label = 0;  // 0 negative, 1 positive
    };
    std::vector<Doc> docs;
};

// Lowercase, split on non-alphanumeric, drop tokens shorter than 2.
std::vector<std::string> tokenize(std::string_view text);

// Directory layout: labels.csv with header doc_id,label plus one
// <doc_id>.txt per labeled document.
Corpus load_corpus(const std::filesystem::path& dir);

struct TfidfOptions {
    Index min_df = 5;
    bool smooth = false;  // ln(N/(1+df)) + 1 instead of ln(N/df)
};

struct TfidfMatrix {
    Matrix features;  // docs x terms, raw tf * idf
    std::vector<std::string> vocabulary;             // column -> token
    std::unordered_map<std::string, Index> term_index;  // token -> column
    std::vector<Index> zero_rows;  // documents with no surviving vocabulary
};

// Raw count tf times ln(N/df). Terms below min_df are dropped, as are
// zero-idf terms (present in every document). Vocabulary columns are
// assigned in lexicographic token order, so the layout is deterministic.
TfidfMatrix build_tfidf(const Corpus& corpus, const TfidfOptions& options = {});

struct BinSplit {
    std::vector<Index> train;  // indices into corpus.docs
    std::vector<Index> test;
};

// Disjoint bins with per-bin train/test splits; class balance is preserved
// within +-2%. Deterministic per seed.
std::vector<BinSplit> split_bins(const Corpus& corpus, Index bins, Index train_per_bin,
                                 Index test_per_bin, std::uint64_t seed);

}  // namespace exsis

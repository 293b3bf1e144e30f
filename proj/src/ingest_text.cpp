#include "exsis/ingest_text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "exsis/rng.hpp"

namespace exsis {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            if (current.size() >= 2) tokens.push_back(current);
            current.clear();
        }
    }
    if (current.size() >= 2) tokens.push_back(current);
    return tokens;
}

Corpus load_corpus(const std::filesystem::path& dir) {
    const auto labels_path = dir / "labels.csv";
    std::ifstream labels(labels_path);
    if (!labels) throw io_error("cannot open " + labels_path.string());

    Corpus corpus;
    std::string line;
    bool first = true;
    while (std::getline(labels, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {  // header: doc_id,label
            first = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("bad row in " + labels_path.string());
        Corpus::Doc doc;
        doc.id = line.substr(0, comma);
        const std::string label = line.substr(comma + 1);
        if (label != "0" && label != "1")
            throw io_error("label must be 0 or 1 for doc " + doc.id);
        doc.label = label == "1" ? 1 : 0;

        const auto text_path = dir / (doc.id + ".txt");
        std::ifstream text(text_path);
        if (!text) throw io_error("missing document " + text_path.string());
        std::stringstream buffer;
        buffer << text.rdbuf();
        doc.tokens = tokenize(buffer.str());
        corpus.docs.push_back(std::move(doc));
    }
    if (corpus.docs.empty()) throw io_error("empty corpus in " + dir.string());
    return corpus;
}

TfidfMatrix build_tfidf(const Corpus& corpus, const TfidfOptions& options) {
    if (corpus.docs.empty()) throw std::invalid_argument("build_tfidf: empty corpus");
    const auto num_docs = static_cast<double>(corpus.docs.size());

    // Document frequencies; std::map keeps tokens lexicographically sorted,
    // which fixes the column order.
    std::map<std::string, Index> df;
    for (const auto& doc : corpus.docs) {
        std::vector<std::string> unique(doc.tokens);
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (auto& t : unique) ++df[t];
    }

    TfidfMatrix out;
    std::vector<double> idf;
    for (const auto& [token, count] : df) {
        if (count < options.min_df) continue;
        const double value = options.smooth
                                 ? std::log(num_docs / (1.0 + static_cast<double>(count))) + 1.0
                                 : std::log(num_docs / static_cast<double>(count));
        if (value == 0.0) continue;  // term in every document: a zero column
        out.term_index.emplace(token, static_cast<Index>(out.vocabulary.size()));
        out.vocabulary.push_back(token);
        idf.push_back(value);
    }
    if (out.vocabulary.empty()) throw std::invalid_argument("build_tfidf: empty vocabulary");

    out.features = Matrix::Zero(static_cast<Index>(corpus.docs.size()),
                                static_cast<Index>(out.vocabulary.size()));
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
        bool any = false;
        std::unordered_map<Index, double> counts;
        for (const auto& token : corpus.docs[d].tokens) {
            auto it = out.term_index.find(token);
            if (it == out.term_index.end()) continue;
            counts[it->second] += 1.0;
            any = true;
        }
        for (const auto& [col, tf] : counts)
            out.features(static_cast<Index>(d), col) = tf * idf[static_cast<std::size_t>(col)];
        if (!any) out.zero_rows.push_back(static_cast<Index>(d));
    }
    return out;
}

std::vector<BinSplit> split_bins(const Corpus& corpus, Index bins, Index train_per_bin,
                                 Index test_per_bin, std::uint64_t seed) {
    if (bins < 1 || train_per_bin < 1 || test_per_bin < 0)
        throw std::invalid_argument("split_bins: bad bin geometry");
    const Index per_bin = train_per_bin + test_per_bin;
    if (static_cast<Index>(corpus.docs.size()) < bins * per_bin)
        throw std::invalid_argument("split_bins: corpus too small for requested split");

    // Shuffle within each class, then deal class-alternating blocks so every
    // bin, train set and test set keeps the corpus class ratio within +-2%.
    std::vector<Index> by_class[2];
    for (std::size_t i = 0; i < corpus.docs.size(); ++i)
        by_class[corpus.docs[i].label].push_back(static_cast<Index>(i));
    Rng rng(seed);
    for (auto& cls : by_class) {
        for (std::size_t i = cls.size(); i > 1; --i)
            std::swap(cls[i - 1], cls[rng.below(i)]);
    }

    const double positive_share =
        static_cast<double>(by_class[1].size()) / static_cast<double>(corpus.docs.size());
    std::size_t cursor[2] = {0, 0};
    auto take = [&](Index count, std::vector<Index>& out) {
        const Index positives =
            static_cast<Index>(std::llround(positive_share * static_cast<double>(count)));
        for (Index i = 0; i < count; ++i) {
            const int cls = i < positives ? 1 : 0;
            const int use = cursor[cls] < by_class[cls].size() ? cls : 1 - cls;
            out.push_back(by_class[use][cursor[use]++]);
        }
    };

    std::vector<BinSplit> splits(static_cast<std::size_t>(bins));
    for (auto& split : splits) {
        take(train_per_bin, split.train);
        take(test_per_bin, split.test);
        std::sort(split.train.begin(), split.train.end());
        std::sort(split.test.begin(), split.test.end());
    }
    return splits;
}

}  // namespace exsis

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crokage/corpus.hpp"

namespace crokage {

struct Bm25Params {
    double k = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc = 0;  // dense document index
    std::uint32_t tf = 0;

    template <class Archive>
    void serialize(Archive& ar) {
        ar(doc, tf);
    }
};

struct SearchHit {
    AnswerId answer_id = 0;
    double score = 0.0;

    bool operator==(const SearchHit&) const = default;
};

/// Tokens of one lexical document, keyed by answer id.
struct IndexedDoc {
    AnswerId answer_id = 0;
    std::vector<std::string> tokens;
};

/// Okapi BM25 over answer documents, scored exactly as
///   sum_i idf(q_i) * f(q_i,A)(k+1) / (f(q_i,A) + k(1 - b + b|A|/avgdl))
/// with idf(q) = ln((N - n(q) + 0.5) / (n(q) + 0.5)). Negative idf values are kept.
class Bm25Index {
public:
    Bm25Index() = default;

    static Bm25Index build(std::vector<IndexedDoc> docs, Bm25Params params = {});

    double idf(std::string_view term) const;
    double score(std::span<const std::string> query, AnswerId answer_id) const;
    /// Documents containing at least one query term, ordered by (-score, answer_id).
    std::vector<SearchHit> search(std::span<const std::string> query, std::size_t limit) const;

    std::size_t doc_count() const { return answer_ids_.size(); }
    double avgdl() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }
    std::size_t doc_frequency(std::string_view term) const;
    std::span<const Posting> postings(std::string_view term) const;
    std::uint32_t doc_length(AnswerId answer_id) const;
    AnswerId answer_id(std::uint32_t doc) const { return answer_ids_[doc]; }
    std::optional<std::uint32_t> doc_index(AnswerId answer_id) const;

    template <class Archive>
    void save(Archive& ar) const {
        ar(params_.k, params_.b, avgdl_, answer_ids_, doc_len_, terms_, postings_);
    }
    template <class Archive>
    void load(Archive& ar) {
        ar(params_.k, params_.b, avgdl_, answer_ids_, doc_len_, terms_, postings_);
        rebuild_lookup();
    }

private:
    void rebuild_lookup();
    const std::vector<Posting>* find(std::string_view term) const;
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const;

    Bm25Params params_;
    double avgdl_ = 0.0;
    std::vector<AnswerId> answer_ids_;  // ascending
    std::vector<std::uint32_t> doc_len_;
    std::vector<std::string> terms_;  // sorted
    std::vector<std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

Bm25Index build_bm25_index(const std::vector<ThreadDoc>& docs, Bm25Params params = {});

/// Document frequencies and log10(N/df) weights over the whole vocabulary.
class IdfMap {
public:
    IdfMap() = default;

    static IdfMap build(std::span<const std::vector<std::string>> docs);

    /// log10(N/df); unseen terms are treated as df = 1.
    double idf(const std::string& term) const;
    std::size_t doc_count() const { return n_docs_; }
    std::size_t df(const std::string& term) const;
    std::size_t vocabulary_size() const { return df_.size(); }

    template <class Archive>
    void save(Archive& ar) const {
        std::map<std::string, std::uint64_t> sorted(df_.begin(), df_.end());
        std::vector<std::string> terms;
        std::vector<std::uint64_t> counts;
        for (const auto& [t, c] : sorted) {
            terms.push_back(t);
            counts.push_back(c);
        }
        ar(static_cast<std::uint64_t>(n_docs_), terms, counts);
    }
    template <class Archive>
    void load(Archive& ar) {
        std::uint64_t n = 0;
        std::vector<std::string> terms;
        std::vector<std::uint64_t> counts;
        ar(n, terms, counts);
        n_docs_ = n;
        df_.clear();
        idf_.clear();
        for (std::size_t i = 0; i < terms.size(); ++i) insert(terms[i], counts[i]);
    }

private:
    void insert(const std::string& term, std::uint64_t df);

    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::uint64_t> df_;
    std::unordered_map<std::string, double> idf_;
};

IdfMap build_idf_map(const std::vector<ThreadDoc>& docs);

/// API class name -> answers whose code uses it; rare classes dropped.
class ApiIndex {
public:
    ApiIndex() = default;

    static ApiIndex build(const std::vector<ThreadDoc>& docs, std::size_t min_class_freq = 5);

    bool contains(const std::string& cls) const { return classes_.count(cls) > 0; }
    const std::vector<AnswerId>* answers(const std::string& cls) const;
    const std::map<std::string, std::vector<AnswerId>>& classes() const { return classes_; }
    std::size_t min_class_freq() const { return min_class_freq_; }

    template <class Archive>
    void serialize(Archive& ar) {
        std::uint64_t m = min_class_freq_;
        ar(m, classes_);
        min_class_freq_ = m;
    }

private:
    std::size_t min_class_freq_ = 5;
    std::map<std::string, std::vector<AnswerId>> classes_;
};

inline ApiIndex build_api_index(const std::vector<ThreadDoc>& docs, std::size_t min_class_freq = 5) {
    return ApiIndex::build(docs, min_class_freq);
}

/// Classes of all code blocks of one answer, first-occurrence order.
std::vector<std::string> answer_api_classes(const ThreadDoc& doc);

/// The build artifacts shared by every query, tied to one corpus by hash.
struct IndexBundle {
    std::uint64_t corpus_hash = 0;
    Bm25Index bm25;
    IdfMap idf;
    ApiIndex api;

    static IndexBundle build(const Corpus& corpus, Bm25Params params = {}, std::size_t min_class_freq = 5);
    void save(const std::filesystem::path& path) const;
    static IndexBundle load(const std::filesystem::path& path);
};

}  // namespace crokage

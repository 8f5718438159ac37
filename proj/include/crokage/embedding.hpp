#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crokage/diagnostics.hpp"
#include "crokage/indices.hpp"

namespace crokage {

/// Word vectors loaded from the plain text format ("count dim" header, then
/// "word v1 ... v_dim" per line). An optional character n-gram table gives
/// out-of-vocabulary words the mean of their n-gram vectors, n in [2, 5].
class EmbeddingStore {
public:
    static constexpr std::size_t kMinNgram = 2;
    static constexpr std::size_t kMaxNgram = 5;

    EmbeddingStore() = default;

    static EmbeddingStore load(std::istream& in, Diagnostics* diag = nullptr);
    static EmbeddingStore load(const std::filesystem::path& path, Diagnostics* diag = nullptr);

    /// N-gram vectors keyed by n-gram of "<word>", same file format and dim.
    void attach_subwords(EmbeddingStore ngrams);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    /// Stored words in row order.
    const std::vector<std::string>& words() const { return words_; }
    bool has_subwords() const { return subwords_ != nullptr; }

    /// Row of an in-vocabulary word.
    std::optional<std::size_t> row(const std::string& word) const;
    std::span<const float> vector(std::size_t row) const { return {data_.data() + row * dim_, dim_}; }
    std::span<const float> unit(std::size_t row) const { return {unit_.data() + row * dim_, dim_}; }
    bool nonzero(std::size_t row) const { return norm_[row] > 0.0; }

    /// Vector of any word: stored, or the subword mean, or nothing.
    std::optional<std::vector<float>> lookup(const std::string& word) const;

    void add(const std::string& word, std::span<const float> values);

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> words_;
    std::vector<float> data_;
    std::vector<float> unit_;
    std::vector<double> norm_;
    std::shared_ptr<const EmbeddingStore> subwords_;
};

/// Character n-grams of "<word>" for n in [min_n, max_n].
std::vector<std::string> char_ngrams(const std::string& word, std::size_t min_n = 2, std::size_t max_n = 5);

/// Cosine similarity; 0 when either vector is zero.
double cosine(std::span<const float> u, std::span<const float> v);

/// A set of preprocessed tokens.
class BagOfWords {
public:
    BagOfWords() = default;
    explicit BagOfWords(std::span<const std::string> tokens);

    const std::vector<std::string>& words() const { return words_; }
    bool empty() const { return words_.empty(); }

private:
    std::vector<std::string> words_;  // sorted, unique
};

/// A bag resolved against a store: unit vectors and idf weights of the
/// embeddable words. Unembeddable words are dropped.
class ResolvedBag {
public:
    struct Entry {
        const float* unit = nullptr;
        std::ptrdiff_t row = -1;  // store row, -1 when synthesized from subwords
        std::string word;
        double idf = 0.0;
        bool nonzero = false;
    };

    ResolvedBag() = default;
    ResolvedBag(const BagOfWords& bag, const EmbeddingStore& store, const IdfMap& idf);
    ResolvedBag(const ResolvedBag&) = delete;
    ResolvedBag& operator=(const ResolvedBag&) = delete;
    ResolvedBag(ResolvedBag&&) = default;
    ResolvedBag& operator=(ResolvedBag&&) = default;

    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t dim() const { return dim_; }

private:
    std::size_t dim_ = 0;
    std::vector<Entry> entries_;
    std::vector<float> owned_;  // unit vectors of subword-synthesized words
};

/// Both directions of the asymmetric relevance, sharing one similarity matrix.
struct AsymPair {
    double a_to_q = 0.0;
    double q_to_a = 0.0;
};

AsymPair asym_pair(const ResolvedBag& a, const ResolvedBag& q);

/// sum_{w in A} sim(w,Q) idf(w) / sum_{w in A} idf(w), sim(w,Q) = max cosine over Q.
double asym_relevance(const BagOfWords& a, const BagOfWords& q, const EmbeddingStore& store, const IdfMap& idf,
                      Diagnostics* diag = nullptr);

/// Harmonic mean of the two asymmetric relevances; 0 when both are 0.
double harmonic_mean(double x, double y);

double sem_score(const BagOfWords& a, const BagOfWords& q, const EmbeddingStore& store, const IdfMap& idf);
double sem_score(const ResolvedBag& a, const ResolvedBag& q);

}  // namespace crokage

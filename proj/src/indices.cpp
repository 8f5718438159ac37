#include "crokage/indices.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <cereal/types/map.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>

#include "crokage/artifact.hpp"
#include "crokage/code_elements.hpp"
#include "crokage/errors.hpp"

namespace crokage {
namespace {

constexpr std::string_view kIndicesMagic = "CRKI";
constexpr std::uint32_t kIndicesVersion = 1;

bool ranks_before(const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.answer_id < b.answer_id;
}

}  // namespace

Bm25Index Bm25Index::build(std::vector<IndexedDoc> docs, Bm25Params params) {
    if (docs.empty()) throw ValidationError("empty corpus");
    if (!(params.k > 0.0)) throw ValidationError("BM25 k must be positive");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw ValidationError("BM25 b must lie in [0, 1]");
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.answer_id < b.answer_id; });

    Bm25Index index;
    index.params_ = params;
    std::unordered_map<std::string, std::vector<Posting>> postings;
    double total = 0.0;
    for (std::uint32_t d = 0; d < docs.size(); ++d) {
        if (d > 0 && docs[d].answer_id == docs[d - 1].answer_id) {
            throw ValidationError("duplicate document id " + std::to_string(docs[d].answer_id));
        }
        index.answer_ids_.push_back(docs[d].answer_id);
        index.doc_len_.push_back(static_cast<std::uint32_t>(docs[d].tokens.size()));
        total += static_cast<double>(docs[d].tokens.size());
        std::unordered_map<std::string_view, std::uint32_t> tf;
        for (const auto& t : docs[d].tokens) ++tf[t];
        for (const auto& [term, f] : tf) postings[std::string(term)].push_back({d, f});
    }
    index.avgdl_ = total / static_cast<double>(docs.size());

    index.terms_.reserve(postings.size());
    for (const auto& [term, _] : postings) index.terms_.push_back(term);
    std::sort(index.terms_.begin(), index.terms_.end());
    index.postings_.reserve(index.terms_.size());
    for (const auto& term : index.terms_) {
        auto& list = postings[term];
        std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
        index.postings_.push_back(std::move(list));
    }
    index.rebuild_lookup();
    return index;
}

void Bm25Index::rebuild_lookup() {
    lookup_.clear();
    lookup_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) lookup_.emplace(terms_[i], i);
}

const std::vector<Posting>* Bm25Index::find(std::string_view term) const {
    auto it = lookup_.find(std::string(term));
    return it == lookup_.end() ? nullptr : &postings_[it->second];
}

std::size_t Bm25Index::doc_frequency(std::string_view term) const {
    const auto* p = find(term);
    return p ? p->size() : 0;
}

std::span<const Posting> Bm25Index::postings(std::string_view term) const {
    const auto* p = find(term);
    return p ? std::span<const Posting>(*p) : std::span<const Posting>();
}

double Bm25Index::idf(std::string_view term) const {
    const double n = static_cast<double>(doc_frequency(term));
    const double total = static_cast<double>(doc_count());
    return std::log((total - n + 0.5) / (n + 0.5));
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const {
    const double f = tf;
    const double norm = 1.0 - params_.b + params_.b * (static_cast<double>(doc_len) / avgdl_);
    return idf * (f * (params_.k + 1.0)) / (f + params_.k * norm);
}

std::optional<std::uint32_t> Bm25Index::doc_index(AnswerId answer_id) const {
    auto it = std::lower_bound(answer_ids_.begin(), answer_ids_.end(), answer_id);
    if (it == answer_ids_.end() || *it != answer_id) return std::nullopt;
    return static_cast<std::uint32_t>(it - answer_ids_.begin());
}

std::uint32_t Bm25Index::doc_length(AnswerId answer_id) const {
    auto d = doc_index(answer_id);
    if (!d) throw ValidationError("unknown document id " + std::to_string(answer_id));
    return doc_len_[*d];
}

double Bm25Index::score(std::span<const std::string> query, AnswerId answer_id) const {
    auto d = doc_index(answer_id);
    if (!d) throw ValidationError("unknown document id " + std::to_string(answer_id));
    double total = 0.0;
    for (const auto& q : query) {
        const auto* list = find(q);
        if (!list) continue;
        auto it = std::lower_bound(list->begin(), list->end(), *d,
                                   [](const Posting& p, std::uint32_t doc) { return p.doc < doc; });
        if (it == list->end() || it->doc != *d) continue;
        total += term_weight(idf(q), it->tf, doc_len_[*d]);
    }
    return total;
}

std::vector<SearchHit> Bm25Index::search(std::span<const std::string> query, std::size_t limit) const {
    if (limit == 0) throw ValidationError("search limit must be at least 1");
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<char> touched(doc_count(), 0);
    std::vector<std::uint32_t> hits;
    for (const auto& q : query) {
        const auto* list = find(q);
        if (!list) continue;
        const double w = idf(q);
        for (const auto& p : *list) {
            if (!touched[p.doc]) {
                touched[p.doc] = 1;
                hits.push_back(p.doc);
            }
            acc[p.doc] += term_weight(w, p.tf, doc_len_[p.doc]);
        }
    }
    std::vector<SearchHit> out;
    out.reserve(hits.size());
    for (auto d : hits) out.push_back({answer_ids_[d], acc[d]});
    const auto keep = std::min(limit, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), ranks_before);
    out.resize(keep);
    return out;
}

Bm25Index build_bm25_index(const std::vector<ThreadDoc>& docs, Bm25Params params) {
    std::vector<IndexedDoc> indexed;
    indexed.reserve(docs.size());
    for (const auto& d : docs) indexed.push_back({d.answer_id, d.index_tokens()});
    return Bm25Index::build(std::move(indexed), params);
}

IdfMap IdfMap::build(std::span<const std::vector<std::string>> docs) {
    if (docs.empty()) throw ValidationError("empty corpus");
    IdfMap map;
    map.n_docs_ = docs.size();
    std::unordered_map<std::string, std::uint64_t> df;
    for (const auto& doc : docs) {
        std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
        for (auto t : seen) ++df[std::string(t)];
    }
    for (const auto& [term, count] : df) map.insert(term, count);
    return map;
}

void IdfMap::insert(const std::string& term, std::uint64_t df) {
    df_[term] = df;
    idf_[term] = std::log10(static_cast<double>(n_docs_) / static_cast<double>(df));
}

double IdfMap::idf(const std::string& term) const {
    auto it = idf_.find(term);
    if (it != idf_.end()) return it->second;
    return std::log10(static_cast<double>(n_docs_));
}

std::size_t IdfMap::df(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

IdfMap build_idf_map(const std::vector<ThreadDoc>& docs) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(docs.size());
    for (const auto& d : docs) tokens.push_back(d.index_tokens());
    return IdfMap::build(tokens);
}

std::vector<std::string> answer_api_classes(const ThreadDoc& doc) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& block : doc.code_blocks) {
        for (auto& c : extract_api_classes(block)) {
            if (seen.insert(c).second) out.push_back(std::move(c));
        }
    }
    return out;
}

ApiIndex ApiIndex::build(const std::vector<ThreadDoc>& docs, std::size_t min_class_freq) {
    if (docs.empty()) throw ValidationError("empty corpus");
    if (min_class_freq == 0) throw ValidationError("min class frequency must be at least 1");
    std::map<std::string, std::vector<AnswerId>> all;
    for (const auto& d : docs) {
        for (auto& c : answer_api_classes(d)) all[std::move(c)].push_back(d.answer_id);
    }
    ApiIndex index;
    index.min_class_freq_ = min_class_freq;
    for (auto& [cls, ids] : all) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.size() >= min_class_freq) index.classes_.emplace(cls, std::move(ids));
    }
    return index;
}

const std::vector<AnswerId>* ApiIndex::answers(const std::string& cls) const {
    auto it = classes_.find(cls);
    return it == classes_.end() ? nullptr : &it->second;
}

IndexBundle IndexBundle::build(const Corpus& corpus, Bm25Params params, std::size_t min_class_freq) {
    IndexBundle bundle;
    bundle.corpus_hash = corpus.content_hash();
    bundle.bm25 = build_bm25_index(corpus.docs(), params);
    bundle.idf = build_idf_map(corpus.docs());
    bundle.api = ApiIndex::build(corpus.docs(), min_class_freq);
    return bundle;
}

void IndexBundle::save(const std::filesystem::path& path) const {
    auto payload = artifact::encode_payload([&](auto& ar) { ar(corpus_hash, bm25, idf, api); });
    artifact::write_file(path, kIndicesMagic, kIndicesVersion, payload);
}

IndexBundle IndexBundle::load(const std::filesystem::path& path) {
    auto env = artifact::read_file(path, kIndicesMagic, kIndicesVersion);
    IndexBundle bundle;
    artifact::decode_payload(env.payload, [&](auto& ar) { ar(bundle.corpus_hash, bundle.bm25, bundle.idf, bundle.api); });
    return bundle;
}

}  // namespace crokage

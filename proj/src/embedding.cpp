#include "crokage/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "crokage/errors.hpp"

namespace crokage {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        auto start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool parse_float(std::string_view s, float& v) {
    // from_chars for floating point is available in libstdc++ 11.
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

double dot(const float* a, const float* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

void normalize_into(std::span<const float> v, float* out, double& norm) {
    norm = std::sqrt(dot(v.data(), v.data(), v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = norm > 0.0 ? static_cast<float>(v[i] / norm) : 0.0f;
}

}  // namespace

EmbeddingStore EmbeddingStore::load(std::istream& in, Diagnostics* diag) {
    EmbeddingStore store;
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> declared_count;
    std::size_t rows = 0;
    std::vector<float> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (line_no == 1 && fields.size() == 2) {
            std::size_t count = 0, dim = 0;
            if (parse_size(fields[0], count) && parse_size(fields[1], dim)) {
                if (dim == 0) throw ValidationError("vector file header declares dimension 0");
                declared_count = count;
                store.dim_ = dim;
                continue;
            }
        }
        if (store.dim_ == 0) store.dim_ = fields.size() - 1;
        if (store.dim_ == 0 || fields.size() - 1 != store.dim_) {
            throw ValidationError("vector dimension mismatch at line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(store.dim_) + " values, found " +
                                  std::to_string(fields.size() - 1));
        }
        values.resize(store.dim_);
        for (std::size_t i = 0; i < store.dim_; ++i) {
            if (!parse_float(fields[i + 1], values[i])) {
                throw ValidationError("invalid number at line " + std::to_string(line_no) + ": " +
                                      std::string(fields[i + 1]));
            }
        }
        std::string word(fields[0]);
        if (store.index_.count(word) && diag) diag->record("duplicate_vector", word + " (last occurrence kept)");
        store.add(word, values);
        ++rows;
    }
    if (declared_count && *declared_count != rows) {
        throw ValidationError("vector file declares " + std::to_string(*declared_count) + " words but contains " +
                              std::to_string(rows));
    }
    return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path, Diagnostics* diag) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("missing vector file: " + path.string());
    return load(in, diag);
}

void EmbeddingStore::add(const std::string& word, std::span<const float> values) {
    if (dim_ == 0) dim_ = values.size();
    if (values.size() != dim_) throw ValidationError("vector for '" + word + "' has wrong dimension");
    std::size_t r;
    if (auto it = index_.find(word); it != index_.end()) {
        r = it->second;
    } else {
        r = words_.size();
        index_.emplace(word, r);
        words_.push_back(word);
        data_.resize(data_.size() + dim_);
        unit_.resize(unit_.size() + dim_);
        norm_.push_back(0.0);
    }
    std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    normalize_into(values, unit_.data() + r * dim_, norm_[r]);
}

void EmbeddingStore::attach_subwords(EmbeddingStore ngrams) {
    if (ngrams.size() > 0 && size() > 0 && ngrams.dim() != dim_) {
        throw ValidationError("subword vectors have dimension " + std::to_string(ngrams.dim()) + ", words have " +
                              std::to_string(dim_));
    }
    if (dim_ == 0) dim_ = ngrams.dim();
    subwords_ = std::make_shared<const EmbeddingStore>(std::move(ngrams));
}

std::optional<std::size_t> EmbeddingStore::row(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::vector<float>> EmbeddingStore::lookup(const std::string& word) const {
    if (auto r = row(word)) {
        auto v = vector(*r);
        return std::vector<float>(v.begin(), v.end());
    }
    if (!subwords_) return std::nullopt;
    std::vector<double> sum(dim_, 0.0);
    std::size_t found = 0;
    for (const auto& g : char_ngrams(word, kMinNgram, kMaxNgram)) {
        if (auto r = subwords_->row(g)) {
            auto v = subwords_->vector(*r);
            for (std::size_t i = 0; i < dim_; ++i) sum[i] += v[i];
            ++found;
        }
    }
    if (found == 0) return std::nullopt;
    std::vector<float> mean(dim_);
    for (std::size_t i = 0; i < dim_; ++i) mean[i] = static_cast<float>(sum[i] / static_cast<double>(found));
    return mean;
}

std::vector<std::string> char_ngrams(const std::string& word, std::size_t min_n, std::size_t max_n) {
    const std::string padded = "<" + word + ">";
    std::vector<std::string> out;
    for (std::size_t n = min_n; n <= max_n; ++n) {
        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
            out.push_back(padded.substr(i, n));
        }
    }
    return out;
}

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) throw ValidationError("cosine of vectors with different dimensions");
    const double uu = dot(u.data(), u.data(), u.size());
    const double vv = dot(v.data(), v.data(), v.size());
    if (uu == 0.0 || vv == 0.0) return 0.0;
    const double c = dot(u.data(), v.data(), u.size()) / (std::sqrt(uu) * std::sqrt(vv));
    return std::clamp(c, -1.0, 1.0);
}

BagOfWords::BagOfWords(std::span<const std::string> tokens) : words_(tokens.begin(), tokens.end()) {
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

ResolvedBag::ResolvedBag(const BagOfWords& bag, const EmbeddingStore& store, const IdfMap& idf) : dim_(store.dim()) {
    std::vector<std::pair<std::size_t, std::size_t>> synthesized;  // entry index, owned offset
    for (const auto& w : bag.words()) {
        Entry e;
        e.word = w;
        e.idf = idf.idf(w);
        if (auto r = store.row(w)) {
            e.row = static_cast<std::ptrdiff_t>(*r);
            e.unit = store.unit(*r).data();
            e.nonzero = store.nonzero(*r);
        } else if (auto v = store.lookup(w)) {
            double norm = 0.0;
            auto offset = owned_.size();
            owned_.resize(offset + dim_);
            normalize_into(*v, owned_.data() + offset, norm);
            e.nonzero = norm > 0.0;
            synthesized.emplace_back(entries_.size(), offset);
        } else {
            continue;
        }
        entries_.push_back(std::move(e));
    }
    for (auto [entry, offset] : synthesized) entries_[entry].unit = owned_.data() + offset;
}

AsymPair asym_pair(const ResolvedBag& a, const ResolvedBag& q) {
    AsymPair out;
    if (a.empty() || q.empty()) return out;
    const std::size_t dim = a.dim();
    const auto& ae = a.entries();
    const auto& qe = q.entries();
    std::vector<double> best_q(qe.size(), -std::numeric_limits<double>::infinity());
    double num_a = 0.0, den_a = 0.0;
    for (const auto& x : ae) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < qe.size(); ++j) {
            const auto& y = qe[j];
            double sim;
            if (!x.nonzero || !y.nonzero) {
                sim = 0.0;
            } else if ((x.row >= 0 && x.row == y.row) || (x.row < 0 && y.row < 0 && x.word == y.word)) {
                sim = 1.0;  // identical word
            } else {
                sim = std::clamp(dot(x.unit, y.unit, dim), -1.0, 1.0);
            }
            best = std::max(best, sim);
            best_q[j] = std::max(best_q[j], sim);
        }
        num_a += best * x.idf;
        den_a += x.idf;
    }
    double num_q = 0.0, den_q = 0.0;
    for (std::size_t j = 0; j < qe.size(); ++j) {
        num_q += best_q[j] * qe[j].idf;
        den_q += qe[j].idf;
    }
    out.a_to_q = den_a > 0.0 ? num_a / den_a : 0.0;
    out.q_to_a = den_q > 0.0 ? num_q / den_q : 0.0;
    return out;
}

double asym_relevance(const BagOfWords& a, const BagOfWords& q, const EmbeddingStore& store, const IdfMap& idf,
                      Diagnostics* diag) {
    ResolvedBag ra(a, store, idf);
    ResolvedBag rq(q, store, idf);
    if (ra.empty() && diag) diag->record("empty_bag", "no embeddable word on the scored side");
    if (rq.empty() && diag) diag->record("unembeddable_query", "no embeddable word on the compared side");
    return asym_pair(ra, rq).a_to_q;
}

double harmonic_mean(double x, double y) {
    const double sum = x + y;
    if (sum == 0.0) return 0.0;
    return 2.0 * x * y / sum;
}

double sem_score(const ResolvedBag& a, const ResolvedBag& q) {
    auto p = asym_pair(a, q);
    return harmonic_mean(p.a_to_q, p.q_to_a);
}

double sem_score(const BagOfWords& a, const BagOfWords& q, const EmbeddingStore& store, const IdfMap& idf) {
    ResolvedBag ra(a, store, idf);
    ResolvedBag rq(q, store, idf);
    return sem_score(ra, rq);
}

}  // namespace crokage

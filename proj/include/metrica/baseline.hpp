#pragma once

// Positional stress baseline: averaged word and character n-gram embeddings
// feeding eleven independent logistic heads, one per metrical position.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metrica/corpus.hpp"
#include "metrica/error.hpp"
#include "metrica/pattern.hpp"
#include "metrica/phonology.hpp"
#include "metrica/utf8.hpp"

namespace metrica {

inline constexpr std::size_t stress_heads = hendecasyllable_length;

struct TrainConfig {
    int ngram_min = 3;
    int ngram_max = 6;
    int embedding_dim = 100;
    int epochs = 10;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
    int patience = 5;
    std::size_t bucket_count = 20000;

    void validate() const
    {
        if (epochs < 1)
            throw Error(ErrorCode::InvalidArgument, "epochs must be at least 1");
        if (ngram_min < 1 || ngram_min > ngram_max)
            throw Error(ErrorCode::InvalidArgument, "need 1 <= ngram_min <= ngram_max");
        if (embedding_dim < 1)
            throw Error(ErrorCode::InvalidArgument, "embedding_dim must be positive");
        if (!(learning_rate > 0.0))
            throw Error(ErrorCode::InvalidArgument, "learning_rate must be positive");
        if (patience < 1)
            throw Error(ErrorCode::InvalidArgument, "patience must be at least 1");
    }
};

/// Dense ids for word unigrams and boundary-marked character n-grams seen in
/// training; anything else hashes into `bucket_count` extra rows.
class FeatureVocab {
public:
    using Id = std::uint32_t;

    FeatureVocab() = default;
    FeatureVocab(int ngram_min, int ngram_max, std::size_t bucket_count)
        : ngram_min_(ngram_min)
        , ngram_max_(ngram_max)
        , bucket_count_(bucket_count)
    {
    }

    static FeatureVocab build(const std::vector<std::string>& lines, int ngram_min, int ngram_max, std::size_t bucket_count)
    {
        FeatureVocab vocab(ngram_min, ngram_max, bucket_count);
        for (const auto& line : lines)
            vocab.for_each_key(line, [&](const std::string& key) { vocab.intern(key); });
        return vocab;
    }

    /// Feature ids of a line, one per unigram or n-gram occurrence.
    std::vector<Id> featurize(std::string_view line) const
    {
        std::vector<Id> ids;
        for_each_key(line, [&](const std::string& key) {
            if (auto it = index_.find(key); it != index_.end())
                ids.push_back(it->second);
            else if (bucket_count_ > 0)
                ids.push_back(static_cast<Id>(entries_.size() + fnv1a(key) % bucket_count_));
        });
        return ids;
    }

    std::optional<Id> word_id(std::string_view word) const { return lookup(word_key(word)); }
    std::optional<Id> ngram_id(std::string_view gram) const { return lookup(ngram_key(gram)); }

    std::size_t known_size() const noexcept { return entries_.size(); }
    std::size_t size() const noexcept { return entries_.size() + bucket_count_; }
    std::size_t bucket_count() const noexcept { return bucket_count_; }
    int ngram_min() const noexcept { return ngram_min_; }
    int ngram_max() const noexcept { return ngram_max_; }
    const std::vector<std::string>& entries() const noexcept { return entries_; }

    /// Rebuilds a vocabulary from its serialized entry table.
    static FeatureVocab from_entries(int ngram_min, int ngram_max, std::size_t bucket_count, std::vector<std::string> entries)
    {
        FeatureVocab vocab(ngram_min, ngram_max, bucket_count);
        for (auto& e : entries)
            if (!vocab.intern(e))
                throw Error(ErrorCode::CorruptModelFile, "duplicate vocabulary entry");
        return vocab;
    }

    static std::uint32_t fnv1a(std::string_view s) noexcept
    {
        std::uint32_t h = 2166136261u;
        for (unsigned char c : s) {
            h ^= c;
            h *= 16777619u;
        }
        return h;
    }

private:
    static std::string word_key(std::string_view w) { return "w\t" + std::string(w); }
    static std::string ngram_key(std::string_view g) { return "c\t" + std::string(g); }

    std::optional<Id> lookup(const std::string& key) const
    {
        if (auto it = index_.find(key); it != index_.end())
            return it->second;
        return std::nullopt;
    }

    bool intern(const std::string& key)
    {
        auto [it, inserted] = index_.emplace(key, static_cast<Id>(entries_.size()));
        if (inserted)
            entries_.push_back(key);
        return inserted;
    }

    template <typename Fn>
    void for_each_key(std::string_view line, Fn&& fn) const
    {
        const std::string cleaned = clean_line(line);
        std::size_t start = 0;
        while (start < cleaned.size()) {
            std::size_t end = cleaned.find(' ', start);
            if (end == std::string::npos)
                end = cleaned.size();
            std::string_view word(cleaned.data() + start, end - start);
            fn(word_key(word));
            std::u32string marked = U"<" + utf8::decode(word) + U">";
            for (int n = ngram_min_; n <= ngram_max_; ++n) {
                const auto len = static_cast<std::size_t>(n);
                for (std::size_t i = 0; i + len <= marked.size(); ++i)
                    fn(ngram_key(utf8::encode(std::u32string_view(marked).substr(i, len))));
            }
            start = end + 1;
        }
    }

    int ngram_min_ = 3;
    int ngram_max_ = 6;
    std::size_t bucket_count_ = 0;
    std::vector<std::string> entries_;
    std::unordered_map<std::string, Id> index_;
};

struct TrainMeta {
    int epochs_run = 0;
    int best_epoch = 0;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;       // mean summed BCE over the training set after the epoch
    double eval_accuracy = -1.0;   // percent, negative when no eval set
};

template <typename Real>
struct StressGradients {
    std::unordered_map<FeatureVocab::Id, std::vector<Real>> embeddings;
    std::vector<Real> heads; // stress_heads x dim
    std::array<Real, stress_heads> bias{};
};

template <typename Real>
class BasicPositionalStressModel {
public:
    using Id = FeatureVocab::Id;

    BasicPositionalStressModel() = default;
    BasicPositionalStressModel(FeatureVocab vocab, int dim)
        : vocab_(std::move(vocab))
        , dim_(dim)
        , embeddings_(vocab_.size() * static_cast<std::size_t>(dim), Real(0))
        , heads_(stress_heads * static_cast<std::size_t>(dim), Real(0))
    {
    }

    const FeatureVocab& vocab() const noexcept { return vocab_; }
    int dim() const noexcept { return dim_; }
    std::vector<Real>& embeddings() noexcept { return embeddings_; }
    const std::vector<Real>& embeddings() const noexcept { return embeddings_; }
    std::vector<Real>& heads() noexcept { return heads_; }
    const std::vector<Real>& heads() const noexcept { return heads_; }
    std::array<Real, stress_heads>& bias() noexcept { return bias_; }
    const std::array<Real, stress_heads>& bias() const noexcept { return bias_; }
    TrainMeta& meta() noexcept { return meta_; }
    const TrainMeta& meta() const noexcept { return meta_; }

    std::vector<Real> hidden(const std::vector<Id>& ids) const
    {
        const auto d = static_cast<std::size_t>(dim_);
        std::vector<Real> h(d, Real(0));
        if (ids.empty())
            return h;
        for (Id id : ids) {
            const Real* row = &embeddings_[static_cast<std::size_t>(id) * d];
            for (std::size_t j = 0; j < d; ++j)
                h[j] += row[j];
        }
        const Real inv = Real(1) / static_cast<Real>(ids.size());
        for (auto& x : h)
            x *= inv;
        return h;
    }

    std::array<Real, stress_heads> scores(const std::vector<Id>& ids) const
    {
        return scores_from_hidden(hidden(ids));
    }

    /// '+' where the head's probability is at least one half; when no head
    /// fires, the highest-scoring head is forced on.
    MetricalPattern predict_ids(const std::vector<Id>& ids) const
    {
        const auto s = scores(ids);
        std::string symbols(stress_heads, '-');
        bool any = false;
        for (std::size_t k = 0; k < stress_heads; ++k) {
            if (s[k] >= Real(0)) {
                symbols[k] = '+';
                any = true;
            }
        }
        if (!any)
            symbols[static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin())] = '+';
        return MetricalPattern(std::move(symbols));
    }

    MetricalPattern predict(std::string_view line) const { return predict_ids(vocab_.featurize(line)); }

    /// Summed binary cross-entropy over the eleven heads.
    Real loss(const std::vector<Id>& ids, const MetricalPattern& gold) const
    {
        const auto s = scores(ids);
        Real total = 0;
        for (std::size_t k = 0; k < stress_heads; ++k) {
            const Real y = gold[k] == '+' ? Real(1) : Real(0);
            // log(1 + e^s) - y*s, computed stably
            const Real softplus = s[k] > 0 ? s[k] + std::log1p(std::exp(-s[k])) : std::log1p(std::exp(s[k]));
            total += softplus - y * s[k];
        }
        return total;
    }

    StressGradients<Real> gradient(const std::vector<Id>& ids, const MetricalPattern& gold) const
    {
        const auto d = static_cast<std::size_t>(dim_);
        const auto h = hidden(ids);
        const auto s = scores_from_hidden(h);
        StressGradients<Real> g;
        g.heads.assign(stress_heads * d, Real(0));
        std::vector<Real> dh(d, Real(0));
        for (std::size_t k = 0; k < stress_heads; ++k) {
            const Real y = gold[k] == '+' ? Real(1) : Real(0);
            const Real err = sigmoid(s[k]) - y;
            g.bias[k] = err;
            for (std::size_t j = 0; j < d; ++j) {
                g.heads[k * d + j] = err * h[j];
                dh[j] += err * heads_[k * d + j];
            }
        }
        if (!ids.empty()) {
            const Real inv = Real(1) / static_cast<Real>(ids.size());
            for (Id id : ids) {
                auto& row = g.embeddings[id];
                row.resize(d, Real(0));
                for (std::size_t j = 0; j < d; ++j)
                    row[j] += dh[j] * inv;
            }
        }
        return g;
    }

    /// One stochastic gradient step on a single example; returns its loss
    /// before the update.
    Real sgd_step(const std::vector<Id>& ids, const MetricalPattern& gold, Real lr)
    {
        const Real before = loss(ids, gold);
        const auto g = gradient(ids, gold);
        const auto d = static_cast<std::size_t>(dim_);
        for (std::size_t i = 0; i < heads_.size(); ++i)
            heads_[i] -= lr * g.heads[i];
        for (std::size_t k = 0; k < stress_heads; ++k)
            bias_[k] -= lr * g.bias[k];
        for (const auto& [id, row] : g.embeddings) {
            Real* dst = &embeddings_[static_cast<std::size_t>(id) * d];
            for (std::size_t j = 0; j < d; ++j)
                dst[j] -= lr * row[j];
        }
        return before;
    }

    bool finite() const
    {
        auto ok = [](Real x) { return std::isfinite(x); };
        return std::all_of(embeddings_.begin(), embeddings_.end(), ok) && std::all_of(heads_.begin(), heads_.end(), ok)
            && std::all_of(bias_.begin(), bias_.end(), ok);
    }

private:
    static Real sigmoid(Real x) { return Real(1) / (Real(1) + std::exp(-x)); }

    std::array<Real, stress_heads> scores_from_hidden(const std::vector<Real>& h) const
    {
        const auto d = static_cast<std::size_t>(dim_);
        std::array<Real, stress_heads> s{};
        for (std::size_t k = 0; k < stress_heads; ++k) {
            Real acc = bias_[k];
            for (std::size_t j = 0; j < d; ++j)
                acc += heads_[k * d + j] * h[j];
            s[k] = acc;
        }
        return s;
    }

    FeatureVocab vocab_;
    int dim_ = 0;
    std::vector<Real> embeddings_;
    std::vector<Real> heads_;
    std::array<Real, stress_heads> bias_{};
    TrainMeta meta_;
};

using PositionalStressModel = BasicPositionalStressModel<float>;

struct LabeledLine {
    std::string text;
    MetricalPattern gold;
};

inline std::vector<LabeledLine> labeled(const std::vector<CorpusLine>& lines)
{
    std::vector<LabeledLine> out;
    out.reserve(lines.size());
    for (const auto& l : lines)
        out.push_back({l.text, l.gold});
    return out;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Real>
double exact_match_percent(const BasicPositionalStressModel<Real>& model, const std::vector<std::vector<FeatureVocab::Id>>& features,
    const std::vector<LabeledLine>& lines)
{
    std::size_t hits = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
        hits += model.predict_ids(features[i]) == lines[i].gold;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(lines.size());
}

} // namespace detail

/// Trains by per-example SGD on summed binary cross-entropy. With a non-empty
/// eval set, training stops after `patience` epochs without an exact-match
/// improvement and the best epoch's weights are returned.
template <typename Real = float>
BasicPositionalStressModel<Real> train_model(const std::vector<LabeledLine>& train_set, const std::vector<LabeledLine>& eval_set,
    const TrainConfig& config, const std::function<void(const EpochStats&)>& on_epoch = {})
{
    config.validate();
    if (train_set.empty())
        throw Error(ErrorCode::EmptyTrainingSet, "no training lines");
    for (const auto* set : {&train_set, &eval_set})
        for (const auto& l : *set)
            if (l.gold.size() != stress_heads)
                throw Error(ErrorCode::LengthMismatch, "training pattern '" + l.gold.str() + "' is not 11 positions");

    std::vector<std::string> texts;
    texts.reserve(train_set.size());
    for (const auto& l : train_set)
        texts.push_back(l.text);
    FeatureVocab vocab = FeatureVocab::build(texts, config.ngram_min, config.ngram_max, config.bucket_count);

    std::mt19937_64 rng(config.seed);
    BasicPositionalStressModel<Real> model(std::move(vocab), config.embedding_dim);
    const double scale = 1.0 / config.embedding_dim;
    for (auto& w : model.embeddings())
        w = static_cast<Real>((2.0 * detail::unit_uniform(rng) - 1.0) * scale);

    std::vector<std::vector<FeatureVocab::Id>> train_features, eval_features;
    for (const auto& l : train_set)
        train_features.push_back(model.vocab().featurize(l.text));
    for (const auto& l : eval_set)
        eval_features.push_back(model.vocab().featurize(l.text));

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    const Real lr = static_cast<Real>(config.learning_rate);
    double best_accuracy = -1.0;
    int stale = 0;
    auto best = model;
    best.meta() = {0, 0, config.learning_rate, config.seed};
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        detail::shuffle(order, rng);
        for (std::size_t i : order)
            model.sgd_step(train_features[i], train_set[i].gold, lr);
        double loss_sum = 0.0;
        for (std::size_t i = 0; i < train_set.size(); ++i)
            loss_sum += static_cast<double>(model.loss(train_features[i], train_set[i].gold));
        EpochStats stats{epoch, loss_sum / static_cast<double>(train_set.size()), -1.0};
        model.meta() = {epoch, epoch, config.learning_rate, config.seed};
        if (eval_set.empty()) {
            best = model;
        } else {
            stats.eval_accuracy = detail::exact_match_percent(model, eval_features, eval_set);
            if (stats.eval_accuracy > best_accuracy) {
                best_accuracy = stats.eval_accuracy;
                stale = 0;
                best = model;
            } else {
                ++stale;
                best.meta().epochs_run = epoch;
            }
        }
        if (on_epoch)
            on_epoch(stats);
        if (!eval_set.empty() && stale >= config.patience)
            break;
    }
    return best;
}

inline PositionalStressModel train(const std::vector<LabeledLine>& train_set, const std::vector<LabeledLine>& eval_set,
    const TrainConfig& config, const std::function<void(const EpochStats&)>& on_epoch = {})
{
    return train_model<float>(train_set, eval_set, config, on_epoch);
}

// Model file layout, all integers little-endian:
//   "MTRCPSM\0"  u32 version  u32 real_bytes
//   i32 ngram_min  i32 ngram_max  u64 bucket_count  u32 dim
//   u64 entry_count, then per entry: u32 byte_length + bytes
//   u32 epochs_run  u32 best_epoch  f64 learning_rate  u64 seed
//   embeddings[(entries + buckets) * dim]  heads[11 * dim]  bias[11]
//   u32 fnv1a checksum of everything above
namespace detail {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline constexpr char model_magic[8] = {'M', 'T', 'R', 'C', 'P', 'S', 'M', '\0'};
inline constexpr std::uint32_t model_version = 1;

class ByteWriter {
public:
    template <typename T>
    void put(const T& v)
    {
        const auto* p = reinterpret_cast<const char*>(&v);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }
    void put_bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const char*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    std::string& bytes() noexcept { return bytes_; }

private:
    std::string bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data)
        : data_(data)
    {
    }
    template <typename T>
    T get()
    {
        T v;
        get_bytes(&v, sizeof(T));
        return v;
    }
    void get_bytes(void* out, std::size_t n)
    {
        if (n > data_.size() - pos_)
            throw Error(ErrorCode::CorruptModelFile, "model file is truncated");
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <typename Real>
std::string serialize_model(const BasicPositionalStressModel<Real>& model)
{
    detail::ByteWriter w;
    w.put_bytes(detail::model_magic, sizeof detail::model_magic);
    w.put(detail::model_version);
    w.put(static_cast<std::uint32_t>(sizeof(Real)));
    const auto& vocab = model.vocab();
    w.put(static_cast<std::int32_t>(vocab.ngram_min()));
    w.put(static_cast<std::int32_t>(vocab.ngram_max()));
    w.put(static_cast<std::uint64_t>(vocab.bucket_count()));
    w.put(static_cast<std::uint32_t>(model.dim()));
    w.put(static_cast<std::uint64_t>(vocab.entries().size()));
    for (const auto& e : vocab.entries()) {
        w.put(static_cast<std::uint32_t>(e.size()));
        w.put_bytes(e.data(), e.size());
    }
    w.put(static_cast<std::uint32_t>(model.meta().epochs_run));
    w.put(static_cast<std::uint32_t>(model.meta().best_epoch));
    w.put(model.meta().learning_rate);
    w.put(model.meta().seed);
    w.put_bytes(model.embeddings().data(), model.embeddings().size() * sizeof(Real));
    w.put_bytes(model.heads().data(), model.heads().size() * sizeof(Real));
    w.put_bytes(model.bias().data(), model.bias().size() * sizeof(Real));
    const std::uint32_t checksum = FeatureVocab::fnv1a(w.bytes());
    w.put(checksum);
    return std::move(w.bytes());
}

template <typename Real>
BasicPositionalStressModel<Real> deserialize_model(std::string_view data)
{
    if (data.size() < sizeof detail::model_magic + sizeof(std::uint32_t))
        throw Error(ErrorCode::CorruptModelFile, "model file is truncated");
    const std::string_view payload = data.substr(0, data.size() - sizeof(std::uint32_t));
    std::uint32_t stored;
    std::memcpy(&stored, data.data() + payload.size(), sizeof stored);

    detail::ByteReader r(payload);
    char magic[8];
    r.get_bytes(magic, sizeof magic);
    if (std::memcmp(magic, detail::model_magic, sizeof magic) != 0)
        throw Error(ErrorCode::CorruptModelFile, "not a positional stress model file");
    if (r.get<std::uint32_t>() != detail::model_version)
        throw Error(ErrorCode::CorruptModelFile, "unsupported model file version");
    if (FeatureVocab::fnv1a(payload) != stored)
        throw Error(ErrorCode::CorruptModelFile, "checksum mismatch (truncated or damaged file)");
    if (r.get<std::uint32_t>() != sizeof(Real))
        throw Error(ErrorCode::CorruptModelFile, "model was saved with a different floating-point width");
    const int ngram_min = r.get<std::int32_t>();
    const int ngram_max = r.get<std::int32_t>();
    const auto buckets = r.get<std::uint64_t>();
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    if (dim == 0 || ngram_min < 1 || ngram_min > ngram_max || count > r.remaining())
        throw Error(ErrorCode::CorruptModelFile, "implausible model header");
    std::vector<std::string> entries;
    entries.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = r.get<std::uint32_t>();
        if (len > r.remaining())
            throw Error(ErrorCode::CorruptModelFile, "model file is truncated");
        std::string e(len, '\0');
        r.get_bytes(e.data(), len);
        entries.push_back(std::move(e));
    }
    BasicPositionalStressModel<Real> model(
        FeatureVocab::from_entries(ngram_min, ngram_max, static_cast<std::size_t>(buckets), std::move(entries)), static_cast<int>(dim));
    model.meta().epochs_run = static_cast<int>(r.get<std::uint32_t>());
    model.meta().best_epoch = static_cast<int>(r.get<std::uint32_t>());
    model.meta().learning_rate = r.get<double>();
    model.meta().seed = r.get<std::uint64_t>();
    const std::size_t expected = (model.embeddings().size() + model.heads().size() + model.bias().size()) * sizeof(Real);
    if (r.remaining() != expected)
        throw Error(ErrorCode::CorruptModelFile, "weight block has the wrong size");
    r.get_bytes(model.embeddings().data(), model.embeddings().size() * sizeof(Real));
    r.get_bytes(model.heads().data(), model.heads().size() * sizeof(Real));
    r.get_bytes(model.bias().data(), model.bias().size() * sizeof(Real));
    if (!model.finite())
        throw Error(ErrorCode::CorruptModelFile, "non-finite weights");
    return model;
}

template <typename Real>
void save_model(const BasicPositionalStressModel<Real>& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write model '" + path.string() + "'");
    const std::string bytes = serialize_model(model);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::Io, "failed writing model '" + path.string() + "'");
}

template <typename Real = float>
BasicPositionalStressModel<Real> load_model(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw Error(ErrorCode::Io, "model file '" + path.string() + "' does not exist");
    return deserialize_model<Real>(read_file(path));
}

} // namespace metrica

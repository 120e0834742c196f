#include "codepurify/ngram_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "codepurify/error.hpp"

namespace codepurify {

namespace loss {

Ticks to_ticks(double nats) { return std::llround(nats * kTicksPerNat); }

double to_nats(Ticks ticks) { return static_cast<double>(ticks) / kTicksPerNat; }

double entropy_value(Ticks total, std::size_t length, EntropyMode mode) {
  const double nats = to_nats(total);
  if (mode == EntropyMode::Total || length == 0) return nats;
  return nats / static_cast<double>(length);
}

}  // namespace loss

std::string_view to_string(EntropyMode mode) { return mode == EntropyMode::PerToken ? "per-token" : "total"; }

EntropyMode parse_entropy_mode(std::string_view name) {
  if (name == "per-token") return EntropyMode::PerToken;
  if (name == "total") return EntropyMode::Total;
  throw ConfigError("unknown entropy mode: " + std::string(name) + " (expected per-token|total)");
}

namespace {

constexpr std::string_view kMagic = "CPNGRAM1";
constexpr std::uint32_t kFormatMajor = 1;
constexpr std::uint32_t kFormatMinor = 0;
constexpr std::string_view kTrailer = "END.";

constexpr std::string_view kUnknownText = "<unk>";
constexpr std::string_view kStartText = "<s>";
constexpr std::string_view kEndText = "</s>";

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    out_.append(raw, sizeof(T));
  }
  void bytes(std::string_view s) { out_.append(s); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    char raw[sizeof(T)];
    std::memcpy(raw, in_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ModelError("model file truncated at byte " + std::to_string(pos_));
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t NGramModel::KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.size;
  for (std::uint8_t i = 0; i < key.size; ++i) {
    h ^= key.ids[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

NGramModel::Key NGramModel::make_key(std::span<const TokenId> ids) {
  Key key;
  key.size = static_cast<std::uint8_t>(ids.size());
  std::copy(ids.begin(), ids.end(), key.ids.begin());
  return key;
}

void NGramModel::check_options(const TrainOptions& options) {
  if (options.order < 1 || options.order > kMaxOrder) {
    throw ConfigError("n-gram order must be in [1, " + std::to_string(kMaxOrder) +
                      "], got " + std::to_string(options.order));
  }
  if (!(options.discount > 0.0 && options.discount < 1.0)) {
    std::ostringstream os;
    os << "discount must be in (0, 1), got " << options.discount;
    throw ConfigError(os.str());
  }
}

void NGramModel::assign_vocabulary(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  words_ = std::move(words);
  ids_.clear();
  ids_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], static_cast<TokenId>(kFirstWordId + i));
}

NGramModel NGramModel::train(const Dataset& clean, const TrainOptions& options) {
  check_options(options);
  if (clean.empty()) throw DatasetError("cannot train a language model on an empty corpus");
  const Tokenizer tokenizer = Tokenizer::fit(clean, options.tokenizer_mode);
  std::vector<std::vector<std::string>> sequences;
  sequences.reserve(clean.size());
  for (const auto& sample : clean.samples) sequences.push_back(tokenizer.tokenize(sample.code).texts());
  return train(sequences, options);
}

NGramModel NGramModel::train(const std::vector<std::vector<std::string>>& sequences, const TrainOptions& options) {
  check_options(options);
  if (sequences.empty()) throw DatasetError("cannot train a language model on an empty corpus");

  NGramModel model;
  model.order_ = options.order;
  model.discount_ = options.discount;
  model.tokenizer_mode_ = options.tokenizer_mode;

  std::vector<std::string> words;
  for (const auto& seq : sequences) words.insert(words.end(), seq.begin(), seq.end());
  model.assign_vocabulary(std::move(words));

  for (const auto& seq : sequences) {
    const auto ids = model.encode(seq);
    model.add_sequence(ids);
    model.total_tokens_ += ids.size();
  }
  model.rebuild_contexts();
  return model;
}

void NGramModel::add_sequence(std::span<const TokenId> ids) {
  const auto padded = pad(ids);
  const std::size_t first = static_cast<std::size_t>(order_ - 1);
  for (std::size_t j = first; j < padded.size(); ++j) {
    for (int k = 1; k <= order_; ++k) {
      const std::span<const TokenId> gram(padded.data() + j + 1 - k, static_cast<std::size_t>(k));
      ++grams_[make_key(gram)];
    }
  }
}

void NGramModel::rebuild_contexts() {
  contexts_.clear();
  contexts_.reserve(grams_.size());
  for (const auto& [gram, c] : grams_) {
    Key context = gram;
    context.size = static_cast<std::uint8_t>(gram.size - 1);
    std::fill(context.ids.begin() + context.size, context.ids.end(), 0);
    auto& stats = contexts_[context];
    stats.total += c;
    stats.distinct += 1;
  }
}

std::vector<TokenId> NGramModel::predictable_ids() const {
  std::vector<TokenId> ids{kUnknownId, kEndId};
  for (std::size_t i = 0; i < words_.size(); ++i) ids.push_back(static_cast<TokenId>(kFirstWordId + i));
  return ids;
}

Tokenizer NGramModel::make_tokenizer() const { return Tokenizer(tokenizer_mode_, words_); }

TokenId NGramModel::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnknownId : it->second;
}

std::string_view NGramModel::text_of(TokenId id) const {
  switch (id) {
    case kUnknownId: return kUnknownText;
    case kStartId: return kStartText;
    case kEndId: return kEndText;
    default: break;
  }
  const std::size_t index = id - kFirstWordId;
  return index < words_.size() ? std::string_view(words_[index]) : kUnknownText;
}

std::vector<TokenId> NGramModel::encode(const TokenSequence& sequence) const {
  std::vector<TokenId> ids;
  ids.reserve(sequence.size());
  for (const auto& t : sequence.tokens) ids.push_back(id_of(t.text));
  return ids;
}

std::vector<TokenId> NGramModel::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id_of(t));
  return ids;
}

double NGramModel::prob(std::span<const TokenId> context, TokenId next) const {
  const std::size_t window = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  context = context.last(window);

  // Denominator counts the predictable symbols: vocabulary + end + unknown.
  double p = 1.0 / static_cast<double>(words_.size() + 2);
  Key gram;
  for (std::size_t h = 0; h <= window; ++h) {
    const auto history = context.last(h);
    const auto stats = contexts_.find(make_key(history));
    if (stats == contexts_.end()) break;

    std::copy(history.begin(), history.end(), gram.ids.begin());
    gram.ids[h] = next;
    gram.size = static_cast<std::uint8_t>(h + 1);
    const auto hit = grams_.find(gram);
    const double c = hit == grams_.end() ? 0.0 : static_cast<double>(hit->second);
    const double total = static_cast<double>(stats->second.total);
    p = std::max(c - discount_, 0.0) / total + discount_ * stats->second.distinct / total * p;
  }
  return p;
}

double NGramModel::prob(const std::vector<std::string>& context, std::string_view next) const {
  const auto ids = encode(context);
  return prob(ids, id_of(next));
}

double NGramModel::relative_frequency(const std::vector<std::string>& context, std::string_view next) const {
  auto ids = encode(context);
  const auto stats = contexts_.find(make_key(ids));
  if (stats == contexts_.end()) return 0.0;
  ids.push_back(id_of(next));
  const auto hit = grams_.find(make_key(ids));
  const double c = hit == grams_.end() ? 0.0 : static_cast<double>(hit->second);
  return c / static_cast<double>(stats->second.total);
}

std::uint64_t NGramModel::count(const std::vector<std::string>& ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<std::size_t>(order_)) return 0;
  std::vector<TokenId> ids;
  for (const auto& t : ngram) {
    if (t == kStartText) {
      ids.push_back(kStartId);
    } else if (t == kEndText) {
      ids.push_back(kEndId);
    } else {
      ids.push_back(id_of(t));
    }
  }
  const auto hit = grams_.find(make_key(ids));
  return hit == grams_.end() ? 0 : hit->second;
}

loss::Ticks NGramModel::loss_ticks(std::span<const TokenId> context, TokenId next) const {
  return loss::to_ticks(-std::log(prob(context, next)));
}

std::vector<TokenId> NGramModel::pad(std::span<const TokenId> ids) const {
  std::vector<TokenId> padded(static_cast<std::size_t>(order_ - 1), kStartId);
  padded.insert(padded.end(), ids.begin(), ids.end());
  padded.push_back(kEndId);
  return padded;
}

loss::Ticks NGramModel::loss_at(std::span<const TokenId> padded, std::size_t position) const {
  const std::size_t history = static_cast<std::size_t>(order_ - 1);
  return loss_ticks(padded.subspan(position - history, history), padded[position]);
}

EntropyScore NGramModel::cross_entropy(std::span<const TokenId> ids, EntropyMode mode) const {
  if (ids.empty()) throw ModelError("cannot score an empty token sequence");
  const auto padded = pad(ids);
  loss::Ticks total = 0;
  for (std::size_t j = static_cast<std::size_t>(order_ - 1); j < padded.size(); ++j) total += loss_at(padded, j);
  EntropyScore score;
  score.token_count = ids.size() + 1;
  score.total_ticks = total;
  score.value = loss::entropy_value(total, score.token_count, mode);
  return score;
}

EntropyScore NGramModel::cross_entropy(const TokenSequence& sequence, EntropyMode mode) const {
  return cross_entropy(encode(sequence), mode);
}

// Layout (little-endian):
//   magic "CPNGRAM1" | u32 major | u32 minor | u32 order | f64 discount
//   u8 tokenizer mode | u64 total tokens | u64 vocabulary size
//   vocabulary: { u32 length, bytes } sorted, ids follow from kFirstWordId
//   u64 gram count | grams: { u8 length, u32 ids[length], u32 count } sorted
//   "END." | u64 FNV-1a of every preceding byte
std::string NGramModel::serialize() const {
  Writer w;
  w.bytes(kMagic);
  w.put<std::uint32_t>(kFormatMajor);
  w.put<std::uint32_t>(kFormatMinor);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(order_));
  w.put<double>(discount_);
  w.put<std::uint8_t>(tokenizer_mode_ == TokenizerMode::Fine ? 0 : 1);
  w.put<std::uint64_t>(total_tokens_);
  w.put<std::uint64_t>(words_.size());
  for (const auto& word : words_) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(word.size()));
    w.bytes(word);
  }

  std::vector<std::pair<Key, std::uint32_t>> sorted(grams_.begin(), grams_.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.first.size != b.first.size) return a.first.size < b.first.size;
    return std::lexicographical_compare(a.first.ids.begin(), a.first.ids.begin() + a.first.size,
                                        b.first.ids.begin(), b.first.ids.begin() + b.first.size);
  });
  w.put<std::uint64_t>(sorted.size());
  for (const auto& [key, c] : sorted) {
    w.put<std::uint8_t>(key.size);
    for (std::uint8_t i = 0; i < key.size; ++i) w.put<std::uint32_t>(key.ids[i]);
    w.put<std::uint32_t>(c);
  }
  w.bytes(kTrailer);
  const std::uint64_t checksum = fnv1a(w.str());
  w.put<std::uint64_t>(checksum);
  return std::move(w.str());
}

NGramModel NGramModel::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw ModelError("not a codepurify n-gram model (bad magic)");
  }
  const auto major = r.get<std::uint32_t>();
  const auto minor = r.get<std::uint32_t>();
  if (major != kFormatMajor) {
    throw ModelError("unsupported model format version " + std::to_string(major) + "." + std::to_string(minor) +
                     " (expected major " + std::to_string(kFormatMajor) + ")");
  }

  NGramModel model;
  model.order_ = static_cast<int>(r.get<std::uint32_t>());
  model.discount_ = r.get<double>();
  const auto mode = r.get<std::uint8_t>();
  if (mode > 1) throw ModelError("model file has invalid tokenizer mode " + std::to_string(mode));
  model.tokenizer_mode_ = mode == 0 ? TokenizerMode::Fine : TokenizerMode::Coarse;
  try {
    check_options(TrainOptions{model.order_, model.discount_, model.tokenizer_mode_});
  } catch (const ConfigError& e) {
    throw ModelError(std::string("model file header is invalid: ") + e.what());
  }
  model.total_tokens_ = r.get<std::uint64_t>();

  const auto vocab_size = r.get<std::uint64_t>();
  if (vocab_size > r.remaining()) throw ModelError("model file truncated in vocabulary table");
  std::vector<std::string> words;
  words.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const auto len = r.get<std::uint32_t>();
    words.emplace_back(r.bytes(len));
  }
  if (!std::is_sorted(words.begin(), words.end()) ||
      std::adjacent_find(words.begin(), words.end()) != words.end()) {
    throw ModelError("model file vocabulary is not strictly sorted");
  }
  model.assign_vocabulary(std::move(words));

  const auto gram_count = r.get<std::uint64_t>();
  if (gram_count > r.remaining()) throw ModelError("model file truncated in n-gram table");
  const TokenId max_id = static_cast<TokenId>(kFirstWordId + model.words_.size());
  model.grams_.reserve(gram_count);
  for (std::uint64_t i = 0; i < gram_count; ++i) {
    Key key;
    key.size = r.get<std::uint8_t>();
    if (key.size == 0 || key.size > model.order_) throw ModelError("model file has an n-gram of invalid length");
    for (std::uint8_t j = 0; j < key.size; ++j) {
      key.ids[j] = r.get<TokenId>();
      if (key.ids[j] >= max_id) throw ModelError("model file references an unknown token id");
    }
    const auto c = r.get<std::uint32_t>();
    if (c == 0) throw ModelError("model file has a zero count");
    if (!model.grams_.emplace(key, c).second) throw ModelError("model file has a duplicate n-gram");
  }

  const std::size_t body_end = r.position();
  if (r.remaining() < kTrailer.size() || r.bytes(kTrailer.size()) != kTrailer) {
    throw ModelError("model file truncated or corrupted (missing trailer)");
  }
  const std::uint64_t expected = fnv1a(bytes.substr(0, body_end + kTrailer.size()));
  if (r.get<std::uint64_t>() != expected) throw ModelError("model file checksum mismatch");
  if (r.remaining() != 0) throw ModelError("model file has trailing bytes");

  model.rebuild_contexts();
  return model;
}

void NGramModel::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write model file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw ModelError("I/O failure writing model file: " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return deserialize(buffer.str());
  } catch (const ModelError& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

bool operator==(const NGramModel& a, const NGramModel& b) {
  return a.order_ == b.order_ && a.discount_ == b.discount_ && a.tokenizer_mode_ == b.tokenizer_mode_ &&
         a.total_tokens_ == b.total_tokens_ && a.words_ == b.words_ && a.grams_ == b.grams_;
}

}  // namespace codepurify

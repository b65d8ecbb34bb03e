// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/bb_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "synthkit/errors.hpp"
#include "synthkit/parallel.hpp"
#include "synthkit/smiles.hpp"
#include "synthkit/tokenizer.hpp"

namespace synthkit {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'I', 'X'};

std::vector<std::string> all_ngrams(std::string_view text) {
  const std::vector<std::string> tokens = tokenize_smiles(text);
  std::vector<std::string> grams;
  for (std::size_t n = kMinNgram; n <= kMaxNgram; ++n) {
    std::vector<std::string> g = token_ngrams(tokens, n);
    grams.insert(grams.end(), std::make_move_iterator(g.begin()), std::make_move_iterator(g.end()));
  }
  return grams;
}

void sort_ranked(std::vector<ScoredDoc> &docs, std::size_t k) {
  std::sort(docs.begin(), docs.end(), [](const ScoredDoc &a, const ScoredDoc &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
  if (docs.size() > k) docs.resize(k);
}

std::vector<int> doc_ids(const std::vector<ScoredDoc> &docs) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (const ScoredDoc &d : docs) out.push_back(d.doc);
  return out;
}

class Writer {
 public:
  void bytes(const void *data, std::size_t n) { out_.append(static_cast<const char *>(data), n); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::string_view bytes(std::size_t n) {
    if (in_.size() - pos_ < n) throw IoError("index file is truncated");
    std::string_view out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t uint(int width) {
    const std::string_view b = bytes(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{static_cast<unsigned char>(b[static_cast<std::size_t>(i)])} << (8 * i);
    return v;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() { return std::string(bytes(u32())); }
  /// Element count that cannot exceed the remaining bytes at `min_size` each.
  std::uint32_t count(std::size_t min_size) {
    const std::uint32_t n = u32();
    if (static_cast<std::uint64_t>(n) * min_size > in_.size() - pos_) throw IoError("index file is truncated");
    return n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

int NgramVocab::id(std::string_view ngram) const {
  auto it = lookup_.find(std::string(ngram));
  return it == lookup_.end() ? -1 : it->second;
}

void NgramVocab::rebuild_lookup() {
  lookup_.clear();
  for (std::size_t i = 0; i < ngrams.size(); ++i) lookup_.emplace(ngrams[i], static_cast<int>(i));
}

std::map<int, int> vocab_counts(const NgramVocab &vocab, std::string_view text) {
  std::map<int, int> counts;
  for (const std::string &g : all_ngrams(text)) {
    const int id = vocab.id(g);
    if (id >= 0) ++counts[id];
  }
  return counts;
}

SlotIndex SlotIndex::build(const BuildingBlockLibrary &library, const ReactionTemplate &tpl, std::size_t slot) {
  SlotIndex index;
  index.template_id_ = tpl.id;
  index.template_smarts_ = tpl.smarts_text;
  index.slot_ = slot;
  index.members_ = compatible_bbs(library, tpl, slot);
  if (index.members_.empty())
    throw EmptySlot("no building block matches slot " + std::to_string(slot) + " of template " + tpl.id);

  const std::size_t n = index.members_.size();
  std::map<std::string, long> totals;
  std::vector<std::vector<std::string>> doc_grams(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LibraryEntry &e = library[static_cast<std::size_t>(index.members_[i])];
    index.member_smiles_.push_back(e.canonical);
    index.fingerprints_.push_back(e.fingerprint);
    doc_grams[i] = all_ngrams(e.canonical);
    for (const std::string &g : doc_grams[i]) ++totals[g];
  }

  std::vector<std::pair<std::string, long>> ranked(totals.begin(), totals.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (ranked.size() > kNgramCap) ranked.resize(kNgramCap);

  NgramVocab &vocab = index.vocab_;
  vocab.doc_count = static_cast<std::uint32_t>(n);
  for (const auto &[g, count] : ranked) vocab.ngrams.push_back(g);
  vocab.rebuild_lookup();

  std::vector<std::map<int, int>> tf(n);
  std::vector<int> df(vocab.ngrams.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::string &g : doc_grams[i]) {
      const int id = vocab.id(g);
      if (id >= 0) ++tf[i][id];
    }
    for (const auto &[id, count] : tf[i]) ++df[static_cast<std::size_t>(id)];
  }
  for (std::size_t v = 0; v < vocab.ngrams.size(); ++v)
    vocab.idf.push_back(std::log((1.0 + static_cast<double>(n)) / (1.0 + df[v])) + 1.0);

  index.postings_.assign(vocab.ngrams.size(), {});
  index.doc_norms_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (const auto &[id, count] : tf[i]) {
      const double w = count * vocab.idf[static_cast<std::size_t>(id)];
      sq += w * w;
    }
    const double norm = std::sqrt(sq);
    index.doc_norms_[i] = norm;
    if (norm == 0.0) continue;
    for (const auto &[id, count] : tf[i])
      index.postings_[static_cast<std::size_t>(id)].push_back(
          {static_cast<std::uint32_t>(i), count * vocab.idf[static_cast<std::size_t>(id)] / norm});
  }
  return index;
}

std::vector<std::pair<int, double>> SlotIndex::query_vector(std::string_view query) const {
  std::vector<std::pair<int, double>> q;
  double sq = 0.0;
  for (const auto &[id, count] : vocab_counts(vocab_, query)) {
    const double w = count * vocab_.idf[static_cast<std::size_t>(id)];
    q.emplace_back(id, w);
    sq += w * w;
  }
  if (sq == 0.0) return {};
  const double norm = std::sqrt(sq);
  for (auto &entry : q) entry.second /= norm;
  return q;
}

std::vector<ScoredDoc> SlotIndex::query_tfidf_scored(std::string_view query, std::size_t k) const {
  const auto q = query_vector(query);
  if (q.empty() || k == 0) return {};
  std::vector<double> acc(members_.size(), 0.0);
  for (const auto &[id, qw] : q)
    for (const Posting &p : postings_[static_cast<std::size_t>(id)]) acc[p.member] += qw * p.weight;
  std::vector<ScoredDoc> out;
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (acc[i] > 0.0) out.push_back({members_[i], acc[i]});
  sort_ranked(out, k);
  return out;
}

std::vector<ScoredDoc> SlotIndex::query_fp_scored(const Molecule &query, std::size_t k) const {
  if (k == 0) return {};
  const Fingerprint fp = morgan_fingerprint(query, kMorganRadius, kBuildingBlockFpBits);
  std::vector<ScoredDoc> out;
  out.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) out.push_back({members_[i], tanimoto(fp, fingerprints_[i])});
  sort_ranked(out, k);
  return out;
}

std::vector<int> SlotIndex::query_tfidf(std::string_view query, std::size_t k) const {
  return doc_ids(query_tfidf_scored(query, k));
}

std::vector<int> SlotIndex::query_fp(const Molecule &query, std::size_t k) const {
  return doc_ids(query_fp_scored(query, k));
}

std::vector<int> SlotIndex::combined_query(std::string_view query, std::size_t k) const {
  const std::optional<Molecule> mol = try_parse_smiles(query);
  if (!mol) return query_tfidf(query, k);
  std::vector<int> out = query_fp(*mol, k);
  for (const int doc : query_tfidf(canonical_smiles(*mol), k))
    if (std::find(out.begin(), out.end(), doc) == out.end()) out.push_back(doc);
  return out;
}

std::string SlotIndex::serialize() const {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u16(kIndexFormatVersion);
  w.str(template_id_);
  w.str(template_smarts_);
  w.u32(static_cast<std::uint32_t>(slot_));
  w.u32(static_cast<std::uint32_t>(members_.size()));
  for (std::size_t i = 0; i < members_.size(); ++i) {
    w.u32(static_cast<std::uint32_t>(members_[i]));
    w.str(member_smiles_[i]);
    w.f64(doc_norms_[i]);
    const Fingerprint &fp = fingerprints_[i];
    w.u32(static_cast<std::uint32_t>(fp.nbits()));
    w.u32(static_cast<std::uint32_t>(fp.radius()));
    for (const std::uint64_t word : fp.words()) w.u64(word);
  }
  w.u32(vocab_.doc_count);
  w.u32(static_cast<std::uint32_t>(vocab_.ngrams.size()));
  for (std::size_t v = 0; v < vocab_.ngrams.size(); ++v) {
    w.str(vocab_.ngrams[v]);
    w.f64(vocab_.idf[v]);
    w.u32(static_cast<std::uint32_t>(postings_[v].size()));
    for (const Posting &p : postings_[v]) {
      w.u32(p.member);
      w.f64(p.weight);
    }
  }
  return w.take();
}

SlotIndex SlotIndex::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) throw IoError("not an index file");
  const std::uint16_t version = r.u16();
  if (version != kIndexFormatVersion)
    throw VersionMismatch("index format version " + std::to_string(version) + ", expected " +
                          std::to_string(kIndexFormatVersion));
  SlotIndex index;
  index.template_id_ = r.str();
  index.template_smarts_ = r.str();
  index.slot_ = r.u32();
  const std::uint32_t n = r.count(28);
  for (std::uint32_t i = 0; i < n; ++i) {
    index.members_.push_back(static_cast<int>(r.u32()));
    index.member_smiles_.push_back(r.str());
    index.doc_norms_.push_back(r.f64());
    const std::uint32_t nbits = r.u32();
    const std::uint32_t radius = r.u32();
    if (nbits == 0 || nbits > 65536) throw IoError("index file has a bad fingerprint width");
    Fingerprint fp(static_cast<int>(nbits), static_cast<int>(radius));
    for (std::uint64_t &word : fp.words()) word = r.u64();
    index.fingerprints_.push_back(std::move(fp));
  }
  index.vocab_.doc_count = r.u32();
  const std::uint32_t nv = r.count(16);
  index.postings_.resize(nv);
  for (std::uint32_t v = 0; v < nv; ++v) {
    index.vocab_.ngrams.push_back(r.str());
    index.vocab_.idf.push_back(r.f64());
    const std::uint32_t np = r.count(12);
    for (std::uint32_t j = 0; j < np; ++j) {
      Posting p{r.u32(), r.f64()};
      if (p.member >= n) throw IoError("index posting references a missing member");
      index.postings_[v].push_back(p);
    }
  }
  if (!r.done()) throw IoError("index file has trailing bytes");
  index.vocab_.rebuild_lookup();
  return index;
}

void SlotIndex::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write index file " + path.string());
  const std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing index file " + path.string());
}

SlotIndex SlotIndex::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

IndexCatalog IndexCatalog::build(const BuildingBlockLibrary &library, const TemplateSet &templates, int jobs) {
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t t = 0; t < templates.size(); ++t)
    for (std::size_t s = 0; s < templates[t].num_slots(); ++s) work.emplace_back(t, s);
  std::vector<std::optional<SlotIndex>> built(work.size());
  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    try {
      built[i] = SlotIndex::build(library, templates[work[i].first], work[i].second);
    } catch (const EmptySlot &e) {
      errors[i] = e.what();
    }
  });
  IndexCatalog catalog;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (built[i]) {
      catalog.add(std::move(*built[i]));
    } else {
      catalog.diagnostics_.push_back(errors[i]);
    }
  }
  return catalog;
}

void IndexCatalog::add(SlotIndex index) {
  lookup_[{index.template_id(), index.slot()}] = indexes_.size();
  indexes_.push_back(std::move(index));
}

const SlotIndex *IndexCatalog::find(std::string_view template_id, std::size_t slot) const {
  auto it = lookup_.find({std::string(template_id), slot});
  return it == lookup_.end() ? nullptr : &indexes_[it->second];
}

std::string IndexCatalog::file_name(std::string_view template_id, std::size_t slot) {
  return std::string(template_id) + ".slot" + std::to_string(slot) + ".skx";
}

void IndexCatalog::save_dir(const std::filesystem::path &dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create index directory " + dir.string() + ": " + ec.message());
  for (const SlotIndex &index : indexes_) index.save(dir / file_name(index.template_id(), index.slot()));
}

IndexCatalog IndexCatalog::load_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.path().extension() == ".skx") files.push_back(entry.path());
  if (ec) throw IoError("cannot read index directory " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  IndexCatalog catalog;
  for (const auto &f : files) catalog.add(SlotIndex::load(f));
  return catalog;
}

}  // namespace synthkit

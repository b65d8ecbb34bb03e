// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthkit/fingerprint.hpp"
#include "synthkit/library.hpp"
#include "synthkit/reaction.hpp"

namespace synthkit {

/// Maximum vocabulary size of a slot index.
inline constexpr std::size_t kNgramCap = 1024;
/// Token n-gram lengths used by the vocabulary.
inline constexpr std::size_t kMinNgram = 2;
inline constexpr std::size_t kMaxNgram = 3;
/// Index file format version.
inline constexpr std::uint16_t kIndexFormatVersion = 1;

struct NgramVocab {
  std::vector<std::string> ngrams;  // tokens joined by ' '
  std::vector<double> idf;          // ln((1 + N) / (1 + df)) + 1
  std::uint32_t doc_count = 0;

  /// Vocabulary id of an n-gram, or -1.
  int id(std::string_view ngram) const;

  void rebuild_lookup();

 private:
  std::unordered_map<std::string, int> lookup_;
};

struct ScoredDoc {
  int doc = 0;  // library entry index
  double score = 0.0;

  friend bool operator==(const ScoredDoc &, const ScoredDoc &) = default;
};

/// Retrieval structure for one (template, reactant slot): TF-IDF over token
/// bigrams/trigrams of canonical SMILES plus 256-bit Morgan fingerprints.
class SlotIndex {
 public:
  struct Posting {
    std::uint32_t member = 0;  // position in members()
    double weight = 0.0;       // L2-normalized tf-idf weight
  };

  /// Throws EmptySlot if no library entry matches the slot.
  static SlotIndex build(const BuildingBlockLibrary &library, const ReactionTemplate &tpl, std::size_t slot);

  const std::string &template_id() const noexcept { return template_id_; }
  const std::string &template_smarts() const noexcept { return template_smarts_; }
  std::size_t slot() const noexcept { return slot_; }
  /// Library entry indexes of the compatible building blocks, ascending.
  const std::vector<int> &members() const noexcept { return members_; }
  const std::vector<std::string> &member_smiles() const noexcept { return member_smiles_; }
  const NgramVocab &vocab() const noexcept { return vocab_; }
  const std::vector<std::vector<Posting>> &postings() const noexcept { return postings_; }
  const std::vector<double> &doc_norms() const noexcept { return doc_norms_; }
  const std::vector<Fingerprint> &fingerprints() const noexcept { return fingerprints_; }

  /// Cosine ranking of members against the query text; only positive scores,
  /// ties by doc id; at most k results.
  std::vector<ScoredDoc> query_tfidf_scored(std::string_view query, std::size_t k) const;
  /// Tanimoto ranking of all members; ties by doc id; at most k results.
  std::vector<ScoredDoc> query_fp_scored(const Molecule &query, std::size_t k) const;

  std::vector<int> query_tfidf(std::string_view query, std::size_t k) const;
  std::vector<int> query_fp(const Molecule &query, std::size_t k) const;
  /// Fingerprint hits then tf-idf hits, deduplicated. A query that parses is
  /// canonicalized before the tf-idf search. A query that does not parse
  /// falls back to tf-idf only on the raw text.
  std::vector<int> combined_query(std::string_view query, std::size_t k) const;

  /// Query-side weights (vocab id, normalized weight) in vocab-id order.
  std::vector<std::pair<int, double>> query_vector(std::string_view query) const;

  void save(const std::filesystem::path &path) const;
  std::string serialize() const;
  /// Throws IoError on short or malformed input, VersionMismatch on a
  /// different format version.
  static SlotIndex load(const std::filesystem::path &path);
  static SlotIndex deserialize(std::string_view bytes);

 private:
  std::string template_id_;
  std::string template_smarts_;
  std::size_t slot_ = 0;
  std::vector<int> members_;
  std::vector<std::string> member_smiles_;
  NgramVocab vocab_;
  std::vector<std::vector<Posting>> postings_;  // per vocab id, ascending member
  std::vector<double> doc_norms_;
  std::vector<Fingerprint> fingerprints_;
};

/// Counts of vocabulary n-grams in text, keyed by vocab id.
std::map<int, int> vocab_counts(const NgramVocab &vocab, std::string_view text);

/// Indexes for every (template, slot) that has compatible building blocks.
class IndexCatalog {
 public:
  /// Builds all slot indexes on up to `jobs` threads. Empty slots are
  /// skipped and reported in diagnostics().
  static IndexCatalog build(const BuildingBlockLibrary &library, const TemplateSet &templates, int jobs = 1);

  /// Index for the template id and slot, or nullptr.
  const SlotIndex *find(std::string_view template_id, std::size_t slot) const;
  const std::vector<SlotIndex> &indexes() const noexcept { return indexes_; }
  const std::vector<std::string> &diagnostics() const noexcept { return diagnostics_; }

  void add(SlotIndex index);

  /// File name used for a slot index inside an index directory.
  static std::string file_name(std::string_view template_id, std::size_t slot);
  void save_dir(const std::filesystem::path &dir) const;
  static IndexCatalog load_dir(const std::filesystem::path &dir);

 private:
  std::vector<SlotIndex> indexes_;
  std::map<std::pair<std::string, std::size_t>, std::size_t> lookup_;
  std::vector<std::string> diagnostics_;
};

}  // namespace synthkit

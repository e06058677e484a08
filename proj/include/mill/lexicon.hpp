#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mill/extraction.hpp"
#include "mill/types.hpp"

namespace mill {

class Lexicon {
 public:
  using Distribution = std::map<Type, std::size_t>;

  void add(const std::string& word, const Type& type, std::size_t count = 1);
  void merge(const Lexicon& other);

  const std::map<std::string, Distribution>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  // Corpus frequency of each type.
  Distribution type_frequencies() const;
  std::map<Type, double> probabilities(const std::string& word) const;

  // Lines of "word<TAB>infix type<TAB>count", ordered by word then printed type.
  std::string to_tsv() const;

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

 private:
  std::map<std::string, Distribution> entries_;
};

Lexicon aggregate(const std::vector<Sequence>& samples);
// Chunked aggregation over `threads` workers, merged in chunk order.
Lexicon aggregate_parallel(const std::vector<Sequence>& samples, unsigned threads);

struct AmbiguityHistogram {
  // Words with 1, 2-10, 11-100 and more than 100 unique types.
  std::array<std::size_t, 4> bins{};
  double mean = 0.0;
  friend bool operator==(const AmbiguityHistogram&, const AmbiguityHistogram&) = default;
};

inline constexpr std::array<const char*, 4> kAmbiguityBinNames{"1", "2-10", "11-100", ">100"};

AmbiguityHistogram ambiguity_histogram(const Lexicon& l);

struct SparsityPoint {
  std::size_t threshold = 0;
  double type_fraction = 0.0;      // types with frequency below the threshold
  double sentence_fraction = 0.0;  // samples containing at least one such type
  friend bool operator==(const SparsityPoint&, const SparsityPoint&) = default;
};

const std::vector<std::size_t>& default_sparsity_thresholds();

std::vector<SparsityPoint> sparsity_curve(const Lexicon& l, const std::vector<Sequence>& samples,
                                          const std::vector<std::size_t>& thresholds =
                                              default_sparsity_thresholds());

std::string stats_to_json(const Lexicon& l, const std::vector<Sequence>& samples,
                          const std::vector<std::size_t>& thresholds = default_sparsity_thresholds());

}  // namespace mill

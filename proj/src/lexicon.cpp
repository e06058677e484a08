#include "mill/lexicon.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mill {

void Lexicon::add(const std::string& word, const Type& type, std::size_t count) {
  if (count == 0) return;
  entries_[word][type] += count;
}

void Lexicon::merge(const Lexicon& other) {
  for (const auto& [word, dist] : other.entries_)
    for (const auto& [type, count] : dist) add(word, type, count);
}

Lexicon::Distribution Lexicon::type_frequencies() const {
  Distribution out;
  for (const auto& [word, dist] : entries_)
    for (const auto& [type, count] : dist) out[type] += count;
  return out;
}

std::map<Type, double> Lexicon::probabilities(const std::string& word) const {
  std::map<Type, double> out;
  auto it = entries_.find(word);
  if (it == entries_.end()) return out;
  std::size_t total = 0;
  for (const auto& [type, count] : it->second) total += count;
  for (const auto& [type, count] : it->second) out[type] = static_cast<double>(count) / total;
  return out;
}

std::string Lexicon::to_tsv() const {
  std::ostringstream os;
  for (const auto& [word, dist] : entries_) {
    std::vector<std::pair<std::string, std::size_t>> rows;
    for (const auto& [type, count] : dist) rows.emplace_back(print_type(type, Notation::infix), count);
    std::sort(rows.begin(), rows.end());
    for (const auto& [printed, count] : rows) os << word << '\t' << printed << '\t' << count << '\n';
  }
  return os.str();
}

Lexicon aggregate(const std::vector<Sequence>& samples) {
  Lexicon l;
  for (const auto& s : samples)
    for (std::size_t i = 0; i < s.words.size() && i < s.types.size(); ++i) l.add(s.words[i], s.types[i]);
  return l;
}

Lexicon aggregate_parallel(const std::vector<Sequence>& samples, unsigned threads) {
  threads = std::max(1u, threads);
  std::size_t chunk = (samples.size() + threads - 1) / threads;
  std::vector<Lexicon> parts(threads);
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t begin = std::min(samples.size(), t * chunk);
    std::size_t end = std::min(samples.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      parts[t] = aggregate(std::vector<Sequence>(samples.begin() + begin, samples.begin() + end));
    });
  }
  for (auto& w : workers) w.join();
  Lexicon out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

AmbiguityHistogram ambiguity_histogram(const Lexicon& l) {
  AmbiguityHistogram h;
  std::size_t total = 0;
  for (const auto& [word, dist] : l.entries()) {
    std::size_t n = dist.size();
    total += n;
    std::size_t bin = n == 1 ? 0 : n <= 10 ? 1 : n <= 100 ? 2 : 3;
    ++h.bins[bin];
  }
  if (!l.empty()) h.mean = static_cast<double>(total) / l.entries().size();
  return h;
}

const std::vector<std::size_t>& default_sparsity_thresholds() {
  static const std::vector<std::size_t> thresholds{1, 2, 3, 5, 10, 20, 50, 100, 1000};
  return thresholds;
}

std::vector<SparsityPoint> sparsity_curve(const Lexicon& l, const std::vector<Sequence>& samples,
                                          const std::vector<std::size_t>& thresholds) {
  auto freq = l.type_frequencies();
  std::vector<SparsityPoint> out;
  for (std::size_t k : thresholds) {
    SparsityPoint p{k, 0.0, 0.0};
    std::set<Type> rare;
    for (const auto& [type, count] : freq)
      if (count < k) rare.insert(type);
    if (!freq.empty()) p.type_fraction = static_cast<double>(rare.size()) / freq.size();
    if (!samples.empty()) {
      std::size_t hit = 0;
      for (const auto& s : samples)
        if (std::any_of(s.types.begin(), s.types.end(), [&](const Type& t) { return rare.count(t) > 0; })) ++hit;
      p.sentence_fraction = static_cast<double>(hit) / samples.size();
    }
    out.push_back(p);
  }
  return out;
}

std::string stats_to_json(const Lexicon& l, const std::vector<Sequence>& samples,
                          const std::vector<std::size_t>& thresholds) {
  using json = nlohmann::ordered_json;
  auto h = ambiguity_histogram(l);
  json bins = json::object();
  for (std::size_t i = 0; i < h.bins.size(); ++i) bins[kAmbiguityBinNames[i]] = h.bins[i];
  json curve = json::array();
  for (const auto& p : sparsity_curve(l, samples, thresholds))
    curve.push_back({{"threshold", p.threshold}, {"types", p.type_fraction}, {"sentences", p.sentence_fraction}});
  json out{{"samples", samples.size()},
           {"words", l.entries().size()},
           {"types", l.type_frequencies().size()},
           {"ambiguity", {{"bins", bins}, {"mean", h.mean}}},
           {"sparsity", curve}};
  return out.dump(2) + "\n";
}

}  // namespace mill

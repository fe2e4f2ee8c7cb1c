#include "parafrac/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parafrac/rng.hpp"

namespace parafrac {

BernoulliWeights::BernoulliWeights(std::vector<double> weights) : p(std::move(weights)) {
  if (p.size() < 2) throw std::invalid_argument("need at least two weights");
  double sum = 0.0;
  for (double w : p) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
  }
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Symbol s : w) {
    h ^= s;
    h *= 1099511628211ULL;
  }
  return h;
}

SymbolicMeasure SymbolicMeasure::bernoulli(BernoulliWeights w,
                                           std::optional<double> declared_c) {
  SymbolicMeasure m;
  m.kind_ = Kind::bernoulli;
  m.arity_ = w.size();
  m.weights_ = std::move(w.p);
  m.declared_c_ = declared_c;
  return m;
}

SymbolicMeasure SymbolicMeasure::table(std::size_t alphabet_size,
                                       const std::vector<std::pair<Word, double>>& rows,
                                       std::optional<double> declared_c) {
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  SymbolicMeasure m;
  m.kind_ = Kind::table;
  m.arity_ = alphabet_size;
  m.declared_c_ = declared_c;

  int depth = 0;
  for (const auto& [w, mass] : rows) {
    if (w.empty()) throw std::invalid_argument("table rows must be nonempty words");
    if (!(mass > 0.0)) throw std::invalid_argument("table masses must be positive");
    for (Symbol s : w) {
      if (s >= alphabet_size) throw std::invalid_argument("table word symbol out of range");
    }
    if (!m.table_.emplace(w, mass).second) {
      throw std::invalid_argument("duplicate table row for word " + word_to_string(w));
    }
    depth = std::max<int>(depth, static_cast<int>(w.size()));
  }
  m.table_depth_ = depth;

  // Every level 1..D must be complete and consistent: the one-symbol
  // extensions of each word carry exactly its mass.
  std::size_t expected = 0, level_count = alphabet_size;
  for (int d = 1; d <= depth; ++d) {
    expected += level_count;
    level_count *= alphabet_size;
  }
  if (m.table_.size() != expected) {
    throw std::invalid_argument("table must cover every word of length 1..D");
  }
  auto level_mass = [&](const Word& w) {
    auto it = m.table_.find(w);
    if (it == m.table_.end()) throw std::invalid_argument("missing table row");
    return it->second;
  };
  double root_sum = 0.0;
  for (std::size_t s = 0; s < alphabet_size; ++s) root_sum += level_mass(Word{static_cast<Symbol>(s)});
  if (std::abs(root_sum - 1.0) > 1e-10) {
    throw std::invalid_argument("level-1 table masses must sum to 1");
  }
  for (const auto& [w, mass] : m.table_) {
    if (static_cast<int>(w.size()) == depth) continue;
    double children = 0.0;
    for (std::size_t s = 0; s < alphabet_size; ++s) {
      Word c = w;
      c.push_back(static_cast<Symbol>(s));
      children += level_mass(c);
    }
    if (std::abs(children - mass) > 1e-10) {
      throw std::invalid_argument("table inconsistent at word " + word_to_string(w));
    }
  }

  // Depth-1 Bernoulli fit powers the multiplicative extension.
  m.weights_.resize(alphabet_size);
  for (std::size_t s = 0; s < alphabet_size; ++s) {
    m.weights_[s] = level_mass(Word{static_cast<Symbol>(s)});
  }
  return m;
}

double SymbolicMeasure::mass(const Word& w) const {
  if (w.empty()) return 1.0;
  if (kind_ == Kind::bernoulli) {
    double m = 1.0;
    for (Symbol s : w) {
      if (s >= arity_) throw std::invalid_argument("symbol out of range");
      m *= weights_[s];
    }
    return m;
  }
  if (static_cast<int>(w.size()) <= table_depth_) {
    auto it = table_.find(w);
    if (it == table_.end()) throw std::invalid_argument("word missing from table");
    return it->second;
  }
  // mass(w v) := mass(w) * bernoulli_fit(v) past the tabulated depth.
  Word head(w.begin(), w.begin() + table_depth_);
  double m = table_.at(head);
  for (std::size_t i = table_depth_; i < w.size(); ++i) {
    if (w[i] >= arity_) throw std::invalid_argument("symbol out of range");
    m *= weights_[w[i]];
  }
  return m;
}

QuasiBernoulliAudit quasi_bernoulli_audit(const SymbolicMeasure& measure,
                                          const std::vector<Word>& vocabulary,
                                          std::size_t sample_pairs,
                                          std::uint64_t seed) {
  if (vocabulary.empty()) throw std::invalid_argument("audit needs a vocabulary");
  QuasiBernoulliAudit audit;
  CounterRng rng(seed, 0x71a5);
  double worst_dev = 1.0;
  for (std::size_t t = 0; t < sample_pairs; ++t) {
    const Word& i = vocabulary[rng.below(vocabulary.size())];
    const Word& j = vocabulary[rng.below(vocabulary.size())];
    const double ratio = measure.mass(concat(i, j)) / (measure.mass(i) * measure.mass(j));
    audit.max_ratio = std::max(audit.max_ratio, ratio);
    audit.min_ratio = std::min(audit.min_ratio, ratio);
    const double dev = std::max(ratio, 1.0 / ratio);
    if (dev > worst_dev) {
      worst_dev = dev;
      audit.worst_pair_i = i;
      audit.worst_pair_j = j;
    }
  }
  audit.pairs_sampled = sample_pairs;
  if (measure.declared_c()) {
    const double c = *measure.declared_c();
    audit.passes_declared_c = audit.max_ratio <= c && audit.min_ratio >= 1.0 / c;
  }
  return audit;
}

}  // namespace parafrac

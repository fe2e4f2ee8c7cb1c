#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "parafrac/words.hpp"

namespace parafrac {

struct BernoulliWeights {
  std::vector<double> p;

  explicit BernoulliWeights(std::vector<double> weights);
  std::size_t size() const { return p.size(); }
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

/// Measure on the word space given by cylinder masses: Bernoulli, or an
/// explicit table complete for all words up to some depth D with
/// multiplicative (depth-1 Bernoulli fit) extension beyond D.
class SymbolicMeasure {
 public:
  static SymbolicMeasure bernoulli(BernoulliWeights w,
                                   std::optional<double> declared_c = {});
  /// rows: (word, mass) covering every word of length 1..D; consistency
  /// sum_j mass(w j) = mass(w) is enforced to 1e-10.
  static SymbolicMeasure table(std::size_t alphabet_size,
                               const std::vector<std::pair<Word, double>>& rows,
                               std::optional<double> declared_c = {});

  enum class Kind { bernoulli, table };
  Kind kind() const { return kind_; }
  std::size_t arity() const { return arity_; }
  std::optional<double> declared_c() const { return declared_c_; }
  int table_depth() const { return table_depth_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Cylinder mass P([w]). Table kind extends multiplicatively past its
  /// tabulated depth using the fitted depth-1 weights.
  double mass(const Word& w) const;

  /// True when evaluating a word of this length needs the extension rule.
  bool needs_extension(std::size_t word_length) const {
    return kind_ == Kind::table && word_length > static_cast<std::size_t>(table_depth_);
  }

 private:
  SymbolicMeasure() = default;

  Kind kind_ = Kind::bernoulli;
  std::size_t arity_ = 0;
  std::vector<double> weights_;  // Bernoulli weights, or depth-1 fit for tables
  std::unordered_map<Word, double, WordHash> table_;
  int table_depth_ = 0;
  std::optional<double> declared_c_;
};

/// Result of auditing the quasi-Bernoulli ratios P([ij]) / (P([i]) P([j]))
/// over sampled pairs from a vocabulary of words.
struct QuasiBernoulliAudit {
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  Word worst_pair_i, worst_pair_j;  // pair attaining the worst deviation
  std::size_t pairs_sampled = 0;
  bool passes_declared_c = true;  // vacuously true without a declared c
};

QuasiBernoulliAudit quasi_bernoulli_audit(const SymbolicMeasure& measure,
                                          const std::vector<Word>& vocabulary,
                                          std::size_t sample_pairs,
                                          std::uint64_t seed);

}  // namespace parafrac

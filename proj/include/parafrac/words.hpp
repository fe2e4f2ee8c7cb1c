#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace parafrac {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Thrown when an enumeration would exceed the configured word budget.
class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s);
Word concat(const Word& a, const Word& b);
bool is_prefix(const Word& prefix, const Word& w);

/// All alphabet_size^n words of length n, lexicographic.
std::vector<Word> enumerate_words(std::size_t alphabet_size, int n,
                                  std::size_t budget = 20'000'000);

/// Words (non-i0)^m i0 of total length <= N: the uniformly contracting
/// subsystem induced by the hyperbolic index i0.
struct InducedAlphabet {
  Symbol i0 = 0;
  int cutoff = 0;
  std::vector<Word> entries;
};

InducedAlphabet induced_alphabet(std::size_t alphabet_size, Symbol i0, int N,
                                 std::size_t budget = 20'000'000);

/// Expected |I_N| = sum_{m=0}^{N-1} (k-1)^m, saturating at `budget`+1.
std::size_t induced_alphabet_count(std::size_t alphabet_size, int N,
                                   std::size_t budget);

struct StopEntry {
  Word word;           // over the underlying alphabet
  double mass = 0.0;
  double stop_length = 0.0;  // interval length (Cantor) / shorter side (carpet)
};

struct StoppingSet {
  std::vector<StopEntry> entries;
  double truncated_mass = 0.0;  // mass of words that hit the depth cap
  double delta = 0.0;
  bool truncation_warning = false;  // truncated_mass > 0.01
  int max_depth_seen = 0;           // in tree levels (blocks for induced mode)
};

/// Geometry/measure callbacks that drive the stopping-tree expansion.
/// `blocks` lists the child words appended per expansion step: the symbols
/// themselves in full-alphabet mode, induced entries in induced mode.
struct StoppingProblem {
  std::vector<Word> blocks;
  std::function<double(const Word&)> stop_length;
  std::function<double(const Word&)> mass;
};

/// Depth-first expansion: a word enters the set when its stopping length
/// first drops to <= delta; words reaching depth_cap contribute to
/// truncated_mass. Entries are pairwise prefix-incomparable by construction.
StoppingSet delta_stopping(const StoppingProblem& problem, double delta,
                           int depth_cap, std::size_t budget = 20'000'000);

}  // namespace parafrac

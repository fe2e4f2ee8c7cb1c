#include "parafrac/words.hpp"

#include <algorithm>
#include <cmath>

namespace parafrac {

namespace {

// Symbols print as 0-9 then a-z; enough for any sane alphabet.
char symbol_char(Symbol s) {
  if (s < 10) return static_cast<char>('0' + s);
  if (s < 36) return static_cast<char>('a' + (s - 10));
  throw std::invalid_argument("symbol id too large to print");
}

Symbol char_symbol(char c) {
  if (c >= '0' && c <= '9') return static_cast<Symbol>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<Symbol>(c - 'a' + 10);
  throw std::invalid_argument(std::string("bad symbol character '") + c + "'");
}

}  // namespace

std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol c : w) s.push_back(symbol_char(c));
  return s;
}

Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) w.push_back(char_symbol(c));
  return w;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

bool is_prefix(const Word& prefix, const Word& w) {
  if (prefix.size() > w.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), w.begin());
}

std::vector<Word> enumerate_words(std::size_t alphabet_size, int n,
                                  std::size_t budget) {
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  if (n < 0) throw std::invalid_argument("word length must be >= 0");

  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (count > budget / alphabet_size) {
      throw capacity_error("enumerate_words: " + std::to_string(alphabet_size) +
                           "^" + std::to_string(n) + " exceeds budget " +
                           std::to_string(budget));
    }
    count *= alphabet_size;
  }

  std::vector<Word> out;
  out.reserve(count);
  Word w(static_cast<std::size_t>(n), 0);
  for (std::size_t idx = 0;; ++idx) {
    out.push_back(w);
    // odometer increment, most significant digit first
    int pos = n - 1;
    while (pos >= 0) {
      if (++w[pos] < alphabet_size) break;
      w[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

std::size_t induced_alphabet_count(std::size_t alphabet_size, int N,
                                   std::size_t budget) {
  const std::size_t k1 = alphabet_size - 1;
  std::size_t total = 0;
  std::size_t level = 1;  // (k-1)^m
  for (int m = 0; m < N; ++m) {
    if (level > budget - total) return budget + 1;  // saturates
    total += level;
    if (m + 1 < N) {
      if (level > budget / k1) return budget + 1;
      level *= k1;
    }
  }
  return total;
}

InducedAlphabet induced_alphabet(std::size_t alphabet_size, Symbol i0, int N,
                                 std::size_t budget) {
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  if (N < 1) throw std::invalid_argument("induced cutoff N must be >= 1");
  if (i0 >= alphabet_size) throw std::invalid_argument("i0 outside alphabet");
  if (induced_alphabet_count(alphabet_size, N, budget) > budget) {
    throw capacity_error("induced_alphabet: |I_N| exceeds budget");
  }

  InducedAlphabet out;
  out.i0 = i0;
  out.cutoff = N;
  // Entries ordered by length, then lexicographically within a length.
  std::vector<Word> prefixes{Word{}};
  for (int m = 0; m < N; ++m) {
    for (const Word& j : prefixes) {
      Word entry = j;
      entry.push_back(i0);
      out.entries.push_back(std::move(entry));
    }
    if (m + 1 < N) {
      std::vector<Word> next;
      next.reserve(prefixes.size() * (alphabet_size - 1));
      for (const Word& j : prefixes) {
        for (std::size_t s = 0; s < alphabet_size; ++s) {
          if (s == i0) continue;
          Word e = j;
          e.push_back(static_cast<Symbol>(s));
          next.push_back(std::move(e));
        }
      }
      prefixes = std::move(next);
    }
  }
  return out;
}

namespace {

void expand(const StoppingProblem& p, const Word& w, double mass, int depth,
            double delta, int depth_cap, std::size_t budget, StoppingSet& out,
            std::size_t& visited) {
  double children_mass = 0.0;
  for (const Word& block : p.blocks) {
    if (++visited > budget) {
      throw capacity_error("delta_stopping: tree exceeds budget");
    }
    Word child = concat(w, block);
    const double child_mass = p.mass(child);
    children_mass += std::max(child_mass, 0.0);
    if (child_mass <= 0.0) continue;  // zero-mass subtrees never matter
    const double len = p.stop_length(child);
    out.max_depth_seen = std::max(out.max_depth_seen, depth + 1);
    // relative slack so exact-boundary lengths (3-adic widths at 3-adic
    // delta) stop at the intended level despite rounding
    if (len <= delta * (1.0 + 1e-12)) {
      out.entries.push_back({std::move(child), child_mass, len});
    } else if (depth + 1 >= depth_cap) {
      out.truncated_mass += child_mass;
    } else {
      expand(p, child, child_mass, depth + 1, delta, depth_cap, budget, out,
             visited);
    }
  }
  // A truncated induced alphabet does not partition the cylinder: prefixes
  // that never reach the hyperbolic symbol within N steps carry mass no
  // entry can claim. Book it with the truncation losses.
  const double leak = mass - children_mass;
  if (leak > 1e-14 * std::max(mass, 1e-300)) out.truncated_mass += leak;
}

}  // namespace

StoppingSet delta_stopping(const StoppingProblem& problem, double delta,
                           int depth_cap, std::size_t budget) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta_stopping: delta must lie in (0,1)");
  }
  if (depth_cap < 1) throw std::invalid_argument("delta_stopping: depth_cap < 1");
  if (problem.blocks.empty()) {
    throw std::invalid_argument("delta_stopping: no expansion blocks");
  }

  StoppingSet out;
  out.delta = delta;
  std::size_t visited = 0;
  expand(problem, Word{}, 1.0, 0, delta, depth_cap, budget, out, visited);
  out.truncation_warning = out.truncated_mass > 0.01;
  return out;
}

}  // namespace parafrac

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parafrac/maps.hpp"
#include "parafrac/measure.hpp"
#include "parafrac/words.hpp"

namespace parafrac {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Which alphabet a pressure / stopping computation runs over.
struct AlphabetSpec {
  enum class Mode { full, induced };
  Mode mode = Mode::full;
  int N = 30;  // induced truncation depth

  static AlphabetSpec full() { return {Mode::full, 0}; }
  static AlphabetSpec induced(int n) { return {Mode::induced, n}; }
  bool is_induced() const { return mode == Mode::induced; }
};

class CantorSystem {
 public:
  explicit CantorSystem(std::vector<ContractionMap> maps);

  std::size_t size() const { return maps_.size(); }
  const ContractionMap& map(Symbol s) const { return maps_.at(s); }
  const std::vector<ContractionMap>& maps() const { return maps_; }
  double holder_exponent() const { return alpha_h_; }

 private:
  std::vector<ContractionMap> maps_;
  double alpha_h_;
};

struct CarpetComponent {
  ContractionMap f;  // x coordinate
  ContractionMap g;  // y coordinate
  int col = 0;
  int row = 0;
};

class CarpetSystem {
 public:
  explicit CarpetSystem(std::vector<CarpetComponent> components);

  std::size_t size() const { return comps_.size(); }
  const CarpetComponent& comp(Symbol s) const { return comps_.at(s); }
  const std::vector<CarpetComponent>& components() const { return comps_; }
  double holder_f() const { return alpha_f_; }
  double holder_g() const { return alpha_g_; }

 private:
  std::vector<CarpetComponent> comps_;
  double alpha_f_, alpha_g_;
};

// ---------------------------------------------------------------------------
// Validation

struct AxiomCheck {
  std::string axiom;
  bool pass = true;
  std::string message;
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

ValidationReport validate(const CantorSystem& sys);
ValidationReport validate(const CarpetSystem& sys);

// ---------------------------------------------------------------------------
// Word geometry

enum class Axis { x, y };

struct CylinderGeom {
  Word word;
  Interval x_interval;
  std::optional<Interval> y_interval;  // absent for Cantor systems
  // Singular value brackets: o = sampled sup, u = sampled inf;
  // 1 = larger coordinate derivative, 2 = smaller.
  double o1 = 1.0, o2 = 1.0, u1 = 0.0, u2 = 0.0;
  Axis longer_axis = Axis::x;  // by image side length, ties to x

  double longer_side() const;
  double shorter_side() const;
};

std::vector<const ContractionMap*> word_maps(const CantorSystem& sys, const Word& w);
std::vector<const ContractionMap*> word_fmaps(const CarpetSystem& sys, const Word& w);
std::vector<const ContractionMap*> word_gmaps(const CarpetSystem& sys, const Word& w);

/// Image of [0,1] under the composed (monotone) word map, via endpoints.
Interval image_interval(std::span<const ContractionMap* const> maps);

CylinderGeom cylinder_geometry(const CantorSystem& sys, const Word& w,
                               DerivRangeOptions opt = {});
CylinderGeom cylinder_geometry(const CarpetSystem& sys, const Word& w,
                               DerivRangeOptions opt = {});

// ---------------------------------------------------------------------------
// Hyperbolic index and the induced subsystem

/// Shortest word (ties lexicographic) whose sup-derivative is <= 1 - 1e-6 in
/// every coordinate; searches lengths 1..4.
Word find_hyperbolic_index(const CantorSystem& sys);
Word find_hyperbolic_index(const CarpetSystem& sys);

/// The induced alphabet for pressure/stopping work. Requires the hyperbolic
/// index to be a single symbol.
template <class System>
InducedAlphabet induced_entries(const System& sys, int N, std::size_t budget);

// ---------------------------------------------------------------------------
// Summability of the induced subsystem (condition for bounded distortion)

struct SummabilityReport {
  double exponent = 1.0;
  std::vector<int> cutoffs;          // N values 4, 8, 16, ...
  std::vector<double> partial_sums;  // sum over I_N of |h_e([0,1])|^exponent
  double last_window_ratio = 0.0;    // increment ratio between the last windows
  bool flagged_slow = false;         // ratio >= 0.95: slow or divergent tail
};

SummabilityReport check_summability(const CantorSystem& sys, const Word& i0,
                                    int N, double exponent,
                                    std::size_t budget = 1 << 20);

// ---------------------------------------------------------------------------
// Stopping problems and axis projections

StoppingProblem stopping_problem(const CantorSystem& sys,
                                 const SymbolicMeasure& measure,
                                 AlphabetSpec mode, std::size_t budget = 1 << 20);
StoppingProblem stopping_problem(const CarpetSystem& sys,
                                 const SymbolicMeasure& measure,
                                 AlphabetSpec mode, std::size_t budget = 1 << 20);

struct ProjectedMeasure {
  std::vector<int> merged_ids;        // distinct grid ids, ascending
  std::vector<double> merged_weights;
  std::vector<int> symbol_to_merged;  // carpet symbol -> merged index
  CantorSystem system;                // one representative 1D map per id
  SymbolicMeasure measure;            // Bernoulli on the merged alphabet
};

/// Axis projection of a Bernoulli measure on a carpet; the grid structure
/// makes the result Bernoulli on the merged column/row alphabet.
ProjectedMeasure project(const CarpetSystem& sys, const SymbolicMeasure& measure,
                         Axis axis);

}  // namespace parafrac

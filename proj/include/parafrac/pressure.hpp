#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "parafrac/measure.hpp"
#include "parafrac/system.hpp"
#include "parafrac/words.hpp"

namespace parafrac {

/// Which per-word size enters the pressure sums. The limit pressure is the
/// same for either choice (tempered distortion); at finite level the
/// interval-length gauge is exact for the packing bounds and much cheaper,
/// while deriv_sup matches the sup-norm definition literally.
enum class Gauge { deriv_sup, interval_length };

struct PressureSample {
  double s = 0.0;
  double q = 0.0;
  int level = 1;
  AlphabetSpec mode;
  Gauge gauge = Gauge::deriv_sup;
  double value = 0.0;  // (sum Phi)^{1/level}
};

/// Per-word data for one level of one system, cached so that root finding
/// re-evaluates only exp/log work.
struct LevelTable {
  int level = 1;
  bool carpet = false;
  AlphabetSpec mode;
  Gauge gauge = Gauge::deriv_sup;
  std::vector<double> log_mass;
  std::vector<double> log_a1;             // Cantor: the only size
  std::vector<double> log_a2;             // carpet shorter coordinate
  std::vector<std::uint8_t> longer_is_y;  // carpet: t(i,q) selector
};

LevelTable tabulate_level(const CantorSystem& sys, const SymbolicMeasure& measure,
                          int level, AlphabetSpec mode, Gauge gauge,
                          std::size_t budget = 20'000'000);
LevelTable tabulate_level(const CarpetSystem& sys, const SymbolicMeasure& measure,
                          int level, AlphabetSpec mode, Gauge gauge,
                          std::size_t budget = 20'000'000);

/// sum over the table of P([i])^q a1^{t(i,q)} a2^{s-t(i,q)}; t_f/t_g ignored
/// for Cantor tables.
double level_sum(const LevelTable& table, double s, double q, double t_f = 0.0,
                 double t_g = 0.0);

/// Singular value function Phi^{s,q} of one cylinder; alpha1/alpha2 are the
/// derivative brackets (deriv_sup) or the rectangle sides (interval_length),
/// t chosen by the longer axis.
double phi_singular(const CylinderGeom& geom, double mass, double s, double q,
                    double t_f, double t_g, Gauge gauge = Gauge::deriv_sup);

PressureSample level_pressure(const CantorSystem& sys, const SymbolicMeasure& measure,
                              double s, double q, int level,
                              AlphabetSpec mode = AlphabetSpec::full(),
                              Gauge gauge = Gauge::deriv_sup,
                              std::size_t budget = 20'000'000);
PressureSample level_pressure(const CarpetSystem& sys, const SymbolicMeasure& measure,
                              double s, double q, int level, double t_f, double t_g,
                              AlphabetSpec mode = AlphabetSpec::full(),
                              Gauge gauge = Gauge::deriv_sup,
                              std::size_t budget = 20'000'000);

// ---------------------------------------------------------------------------
// Roots

struct RootOptions {
  double tol = 1e-9;
  double bracket_lo = 0.0;
  double bracket_hi = 2.0;
  int max_doublings = 60;
};

/// Minimal real s with sum Phi^{s,q} <= 1, by bisection with doubling
/// bracket expansion. Throws if no bracket is found (e.g. full-alphabet
/// pressure of a purely parabolic family at q = 0).
double root_from_table(const LevelTable& table, double q, double t_f, double t_g,
                       const RootOptions& opt = {});

/// Largest level with arity^level within budget.
int default_level(std::size_t arity, std::size_t budget);

/// Largest induced truncation N <= requested whose entry count fits the
/// budget; |I_N| grows like (arity-1)^N, so big alphabets truncate early.
int adapted_induced_N(std::size_t arity, int requested, std::size_t entry_budget);

double gamma_root(const CantorSystem& sys, const SymbolicMeasure& measure, double q,
                  int level, AlphabetSpec mode = AlphabetSpec::full(),
                  Gauge gauge = Gauge::interval_length, const RootOptions& opt = {},
                  std::size_t budget = 20'000'000);

/// Projection L^q exponents t_f, t_g for a carpet, via induced-mode roots of
/// the axis projections (entry count adapted to stay within budget).
struct ProjectionExponents {
  double t_f = 0.0;
  double t_g = 0.0;
  int induced_N_f = 0;
  int induced_N_g = 0;
};

/// Caches the (q-independent) projection tables so a whole q grid reuses one
/// tabulation per axis.
class ProjectionSolver {
 public:
  ProjectionSolver(const CarpetSystem& sys, const SymbolicMeasure& measure,
                   double tol = 1e-10, std::size_t entry_budget = 4096,
                   std::size_t word_budget = 200'000);
  ProjectionExponents at(double q) const;

 private:
  LevelTable table_x_, table_y_;
  int induced_N_f_ = 0, induced_N_g_ = 0;
  RootOptions opt_;
};

ProjectionExponents projection_exponents(const CarpetSystem& sys,
                                         const SymbolicMeasure& measure, double q,
                                         double tol = 1e-10,
                                         std::size_t entry_budget = 4096,
                                         std::size_t word_budget = 200'000);

struct CarpetRoot {
  double beta = 0.0;
  ProjectionExponents exponents;
  int level = 1;
};
CarpetRoot beta_root(const CarpetSystem& sys, const SymbolicMeasure& measure, double q,
                     int level, AlphabetSpec mode = AlphabetSpec::full(),
                     Gauge gauge = Gauge::interval_length, const RootOptions& opt = {},
                     std::size_t budget = 20'000'000);

// ---------------------------------------------------------------------------
// Zeta partial sums

struct ZetaPartial {
  std::vector<double> level_terms;   // term at level n = sum over I^n
  std::vector<double> partial_sums;  // cumulative
  double mean_tail_ratio = 0.0;      // over the last <= 5 term ratios
  bool divergent = false;            // tail fails to decay geometrically
};

ZetaPartial zeta_partial(const CantorSystem& sys, const SymbolicMeasure& measure,
                         double s, double q, int n_max,
                         AlphabetSpec mode = AlphabetSpec::full(),
                         Gauge gauge = Gauge::interval_length,
                         std::size_t budget = 20'000'000);
ZetaPartial zeta_partial(const CarpetSystem& sys, const SymbolicMeasure& measure,
                         double s, double q, int n_max, double t_f, double t_g,
                         AlphabetSpec mode = AlphabetSpec::full(),
                         Gauge gauge = Gauge::interval_length,
                         std::size_t budget = 20'000'000);

// ---------------------------------------------------------------------------
// Lemma-style reports

struct PressureBoundRow {
  double q = 0.0;
  double s = 1.0;
  int level = 1;
  double value = 0.0;
  bool pass = false;
};
struct PressureBoundReport {
  std::vector<PressureBoundRow> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

/// P(1,q) <= 1 (Cantor) / P(2,q) <= 1 (carpet) at the largest budgeted
/// level, asserted with 5e-3 slack.
PressureBoundReport pressure_bound_checks(const CantorSystem& sys,
                                          const SymbolicMeasure& measure,
                                          const std::vector<double>& qs,
                                          std::size_t level_budget = 1 << 16);
PressureBoundReport pressure_bound_checks(const CarpetSystem& sys,
                                          const SymbolicMeasure& measure,
                                          const std::vector<double>& qs,
                                          std::size_t level_budget = 1 << 16);

struct MultiplicativityViolation {
  Word i, j;
  double ratio = 1.0;
  double envelope = 1.0;
};
struct MultiplicativityReport {
  std::size_t trials = 0;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  std::vector<MultiplicativityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Samples Phi(ij) / (Phi(i) Phi(j)) and checks it against the side implied
/// by sign(s - t_f - t_g), within the measured distortion envelope.
MultiplicativityReport multiplicativity_check(const CarpetSystem& sys,
                                              const SymbolicMeasure& measure,
                                              double s, double q, double t_f,
                                              double t_g, std::size_t trials,
                                              std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Spectrum curves

struct SpectrumPoint {
  double q = 0.0;
  double tau = 0.0;
  int level = 1;
  std::string mode;                // "full" or "induced(N)"
  std::optional<double> gap;       // |full root - induced root| when both ran
  bool failed = false;             // budget/bracket failure for this q
  std::string error;
};

struct SpectrumCurve {
  std::vector<SpectrumPoint> points;
  std::string method;  // pressure_root | empirical_slope
};

struct SpectrumOptions {
  std::vector<double> qs;  // default 0, 0.25, ..., 3
  int level = 0;           // 0: auto from budget
  std::optional<int> induced_N;
  Gauge gauge = Gauge::interval_length;
  double tol = 1e-9;
  std::size_t budget = 1 << 20;
};

std::vector<double> default_q_grid();

SpectrumCurve spectrum_curve(const CantorSystem& sys, const SymbolicMeasure& measure,
                             const SpectrumOptions& opt);
SpectrumCurve spectrum_curve(const CarpetSystem& sys, const SymbolicMeasure& measure,
                             const SpectrumOptions& opt);

}  // namespace parafrac

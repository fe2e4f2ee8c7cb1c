#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parafrac/measure.hpp"
#include "parafrac/system.hpp"

namespace parafrac {

struct Point2 {
  double x = 0.0;
  double y = 0.0;  // unused for Cantor samples
};

/// Moment sums D^q = sum over occupied delta-mesh cells of cell-mass^q,
/// with the 0^0 = 0 convention (empty cells never contribute).
struct GridMoments {
  double delta = 0.0;
  std::vector<double> qs;
  std::vector<double> D;
  std::string estimator;  // stopping_pushforward | chaos_game
  double truncated_mass = 0.0;
  bool truncation_warning = false;
  bool table_extension_used = false;
  std::size_t occupied = 0;
  std::size_t samples = 0;  // chaos game only
};

struct MomentOptions {
  int depth_cap = 5000;
  std::size_t budget = 1 << 22;
  AlphabetSpec mode = AlphabetSpec::full();
};

/// Builds the delta-stopping set and distributes each stopped cylinder's mass
/// over mesh cells proportionally to overlap (length in 1D, area in 2D).
/// Mesh anchored at 0 with cells [j delta, (j+1) delta).
GridMoments grid_moments_pushforward(const CantorSystem& sys,
                                     const SymbolicMeasure& measure, double delta,
                                     const std::vector<double>& qs,
                                     MomentOptions opt = {});
GridMoments grid_moments_pushforward(const CarpetSystem& sys,
                                     const SymbolicMeasure& measure, double delta,
                                     const std::vector<double>& qs,
                                     MomentOptions opt = {});

struct ChaosOptions {
  int depth = 60;
  std::uint64_t seed = 0;
  int threads = 1;
  double diameter_cutoff = 1e-12;  // stop once the tracked cylinder is this small
};

/// Monte Carlo realization of the pushforward measure. Per-sample
/// counter-based substreams keep results identical for any thread count.
std::vector<Point2> chaos_game_sample(const CantorSystem& sys,
                                      const SymbolicMeasure& measure,
                                      std::size_t points, ChaosOptions opt = {});
std::vector<Point2> chaos_game_sample(const CarpetSystem& sys,
                                      const SymbolicMeasure& measure,
                                      std::size_t points, ChaosOptions opt = {});

GridMoments grid_moments_chaos(const CantorSystem& sys, const SymbolicMeasure& measure,
                               double delta, const std::vector<double>& qs,
                               std::size_t points, ChaosOptions opt = {});
GridMoments grid_moments_chaos(const CarpetSystem& sys, const SymbolicMeasure& measure,
                               double delta, const std::vector<double>& qs,
                               std::size_t points, ChaosOptions opt = {});

/// Least-squares slope of log D^q against -log delta.
struct TauFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  bool degenerate = false;  // all D equal: slope carries no information
};

TauFit empirical_tau(const std::vector<GridMoments>& moments, double q);

/// log mass / log radius along powers of one symbol; blows up at parabolic
/// symbols, stays bounded at hyperbolic ones.
struct LocalExponentTrace {
  std::vector<int> depths;
  std::vector<double> radii;
  std::vector<double> exponents;
};

LocalExponentTrace local_exponent_trace(const CantorSystem& sys,
                                        const SymbolicMeasure& measure, Symbol symbol,
                                        const std::vector<int>& depths);

}  // namespace parafrac

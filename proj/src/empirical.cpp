#include "parafrac/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "parafrac/rng.hpp"

namespace parafrac {

namespace {

// Cells [j delta, (j+1) delta) keyed by index; overlaps below 1e-9 of a cell
// are treated as boundary-touching and dropped (lower-cell convention).
constexpr double kOverlapFraction = 1e-9;

struct CellMap1 {
  std::unordered_map<std::int64_t, double> mass;
  void add_interval(double lo, double hi, double m, double delta) {
    if (!(hi > lo)) {
      mass[static_cast<std::int64_t>(std::floor(lo / delta))] += m;
      return;
    }
    const auto jlo = static_cast<std::int64_t>(std::floor(lo / delta));
    const auto jhi = static_cast<std::int64_t>(std::floor(hi / delta));
    const double len = hi - lo;
    for (auto j = jlo; j <= jhi; ++j) {
      const double o = std::min(hi, (j + 1) * delta) - std::max(lo, j * delta);
      if (o > kOverlapFraction * delta) mass[j] += m * (o / len);
    }
  }
};

struct CellMap2 {
  std::unordered_map<std::int64_t, double> mass;
  static std::int64_t key(std::int64_t jx, std::int64_t jy) {
    return (jx << 26) ^ (jy & ((1 << 26) - 1));
  }
  void add_rect(double xlo, double xhi, double ylo, double yhi, double m,
                double delta) {
    const double area = std::max(xhi - xlo, 0.0) * std::max(yhi - ylo, 0.0);
    if (area <= 0.0) {
      const auto jx = static_cast<std::int64_t>(std::floor(xlo / delta));
      const auto jy = static_cast<std::int64_t>(std::floor(ylo / delta));
      mass[key(jx, jy)] += m;
      return;
    }
    const auto jx0 = static_cast<std::int64_t>(std::floor(xlo / delta));
    const auto jx1 = static_cast<std::int64_t>(std::floor(xhi / delta));
    const auto jy0 = static_cast<std::int64_t>(std::floor(ylo / delta));
    const auto jy1 = static_cast<std::int64_t>(std::floor(yhi / delta));
    for (auto jx = jx0; jx <= jx1; ++jx) {
      const double ox = std::min(xhi, (jx + 1) * delta) - std::max(xlo, jx * delta);
      if (ox <= kOverlapFraction * delta) continue;
      for (auto jy = jy0; jy <= jy1; ++jy) {
        const double oy = std::min(yhi, (jy + 1) * delta) - std::max(ylo, jy * delta);
        if (oy <= kOverlapFraction * delta) continue;
        mass[key(jx, jy)] += m * (ox * oy / area);
      }
    }
  }
};

template <class Map>
GridMoments moments_from_cells(const Map& cells, double delta,
                               const std::vector<double>& qs) {
  GridMoments gm;
  gm.delta = delta;
  gm.qs = qs;
  gm.occupied = cells.mass.size();
  for (double q : qs) {
    double d = 0.0;
    if (q == 0.0) {
      d = static_cast<double>(cells.mass.size());
    } else {
      for (const auto& [k, m] : cells.mass) {
        if (m > 0.0) d += std::pow(m, q);
      }
    }
    gm.D.push_back(d);
  }
  return gm;
}

}  // namespace

GridMoments grid_moments_pushforward(const CantorSystem& sys,
                                     const SymbolicMeasure& measure, double delta,
                                     const std::vector<double>& qs, MomentOptions opt) {
  const StoppingProblem prob = stopping_problem(sys, measure, opt.mode, opt.budget);
  const StoppingSet stop = delta_stopping(prob, delta, opt.depth_cap, opt.budget);

  CellMap1 cells;
  for (const auto& e : stop.entries) {
    const Interval iv = image_interval(word_maps(sys, e.word));
    cells.add_interval(iv.lo, iv.hi, e.mass, delta);
  }
  GridMoments gm = moments_from_cells(cells, delta, qs);
  gm.estimator = "stopping_pushforward";
  gm.truncated_mass = stop.truncated_mass;
  gm.truncation_warning = stop.truncation_warning;
  gm.table_extension_used = measure.needs_extension(
      static_cast<std::size_t>(stop.max_depth_seen));
  return gm;
}

GridMoments grid_moments_pushforward(const CarpetSystem& sys,
                                     const SymbolicMeasure& measure, double delta,
                                     const std::vector<double>& qs, MomentOptions opt) {
  const StoppingProblem prob = stopping_problem(sys, measure, opt.mode, opt.budget);
  const StoppingSet stop = delta_stopping(prob, delta, opt.depth_cap, opt.budget);

  CellMap2 cells;
  for (const auto& e : stop.entries) {
    const Interval ix = image_interval(word_fmaps(sys, e.word));
    const Interval iy = image_interval(word_gmaps(sys, e.word));
    cells.add_rect(ix.lo, ix.hi, iy.lo, iy.hi, e.mass, delta);
  }
  GridMoments gm = moments_from_cells(cells, delta, qs);
  gm.estimator = "stopping_pushforward";
  gm.truncated_mass = stop.truncated_mass;
  gm.truncation_warning = stop.truncation_warning;
  gm.table_extension_used = measure.needs_extension(
      static_cast<std::size_t>(stop.max_depth_seen));
  return gm;
}

// ---------------------------------------------------------------------------
// Chaos game

namespace {

Symbol draw_symbol(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < weights.size(); ++s) {
    acc += weights[s];
    if (u < acc) return static_cast<Symbol>(s);
  }
  return static_cast<Symbol>(weights.size() - 1);
}

// Conditional next-symbol draw for table measures given the prefix so far.
Symbol draw_conditional(const SymbolicMeasure& measure, Word& prefix, double u) {
  const double base = measure.mass(prefix);
  double acc = 0.0;
  prefix.push_back(0);
  for (std::size_t s = 0; s + 1 < measure.arity(); ++s) {
    prefix.back() = static_cast<Symbol>(s);
    acc += measure.mass(prefix) / base;
    if (u < acc) return prefix.back();
  }
  prefix.back() = static_cast<Symbol>(measure.arity() - 1);
  return prefix.back();
}

template <class Apply>
void run_samples(std::size_t points, int threads, const Apply& one_sample) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < points; ++i) one_sample(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (points + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(points, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([=, &one_sample] {
      for (std::size_t i = lo; i < hi; ++i) one_sample(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_chaos_args(std::size_t measure_arity, std::size_t system_size, int depth) {
  if (depth < 1) throw std::invalid_argument("chaos game depth must be >= 1");
  if (measure_arity != system_size) {
    throw std::invalid_argument("measure arity does not match the system");
  }
}

}  // namespace

std::vector<Point2> chaos_game_sample(const CantorSystem& sys,
                                      const SymbolicMeasure& measure,
                                      std::size_t points, ChaosOptions opt) {
  check_chaos_args(measure.arity(), sys.size(), opt.depth);
  std::vector<Point2> result(points);
  const bool bernoulli = measure.kind() == SymbolicMeasure::Kind::bernoulli;
  run_samples(points, opt.threads, [&](std::size_t i) {
    CounterRng rng(opt.seed, i);
    double v = 0.5, a = 0.0, b = 1.0;
    Word prefix;
    for (int d = 0; d < opt.depth && std::abs(b - a) >= opt.diameter_cutoff; ++d) {
      const double u = rng.uniform();
      const Symbol s = bernoulli ? draw_symbol(measure.weights(), u)
                                 : draw_conditional(measure, prefix, u);
      const auto& m = sys.map(s);
      v = m.eval(v);
      a = m.eval(a);
      b = m.eval(b);
    }
    result[i] = Point2{v, 0.0};
  });
  return result;
}

std::vector<Point2> chaos_game_sample(const CarpetSystem& sys,
                                      const SymbolicMeasure& measure,
                                      std::size_t points, ChaosOptions opt) {
  check_chaos_args(measure.arity(), sys.size(), opt.depth);
  std::vector<Point2> result(points);
  const bool bernoulli = measure.kind() == SymbolicMeasure::Kind::bernoulli;
  run_samples(points, opt.threads, [&](std::size_t i) {
    CounterRng rng(opt.seed, i);
    Point2 p{0.5, 0.5};
    double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
    Word prefix;
    for (int d = 0; d < opt.depth; ++d) {
      const double diam = std::max(std::abs(bx - ax), std::abs(by - ay));
      if (diam < opt.diameter_cutoff) break;
      const double u = rng.uniform();
      const Symbol s = bernoulli ? draw_symbol(measure.weights(), u)
                                 : draw_conditional(measure, prefix, u);
      const auto& c = sys.comp(s);
      p.x = c.f.eval(p.x);
      p.y = c.g.eval(p.y);
      ax = c.f.eval(ax);
      bx = c.f.eval(bx);
      ay = c.g.eval(ay);
      by = c.g.eval(by);
    }
    result[i] = p;
  });
  return result;
}

namespace {

template <class KeyFn>
GridMoments chaos_moments(const std::vector<Point2>& pts, double delta,
                          const std::vector<double>& qs, const KeyFn& key) {
  std::unordered_map<std::int64_t, std::size_t> counts;
  for (const auto& p : pts) ++counts[key(p)];
  GridMoments gm;
  gm.delta = delta;
  gm.qs = qs;
  gm.estimator = "chaos_game";
  gm.samples = pts.size();
  gm.occupied = counts.size();
  const double n = static_cast<double>(pts.size());
  for (double q : qs) {
    double d = 0.0;
    if (q == 0.0) {
      d = static_cast<double>(counts.size());
    } else if (q == 1.0) {
      d = 1.0;  // counting measure normalized: exact
    } else {
      for (const auto& [k, c] : counts) d += std::pow(c / n, q);
    }
    gm.D.push_back(d);
  }
  return gm;
}

}  // namespace

GridMoments grid_moments_chaos(const CantorSystem& sys, const SymbolicMeasure& measure,
                               double delta, const std::vector<double>& qs,
                               std::size_t points, ChaosOptions opt) {
  const auto pts = chaos_game_sample(sys, measure, points, opt);
  return chaos_moments(pts, delta, qs, [delta](const Point2& p) {
    return static_cast<std::int64_t>(std::floor(p.x / delta));
  });
}

GridMoments grid_moments_chaos(const CarpetSystem& sys, const SymbolicMeasure& measure,
                               double delta, const std::vector<double>& qs,
                               std::size_t points, ChaosOptions opt) {
  const auto pts = chaos_game_sample(sys, measure, points, opt);
  return chaos_moments(pts, delta, qs, [delta](const Point2& p) {
    const auto jx = static_cast<std::int64_t>(std::floor(p.x / delta));
    const auto jy = static_cast<std::int64_t>(std::floor(p.y / delta));
    return (jx << 26) ^ (jy & ((1 << 26) - 1));
  });
}

TauFit empirical_tau(const std::vector<GridMoments>& moments, double q) {
  if (moments.size() < 3) {
    throw std::invalid_argument("empirical_tau needs at least 3 scales");
  }
  std::vector<double> xs, ys;
  double prev_delta = 2.0;
  for (const auto& gm : moments) {
    if (!(gm.delta < prev_delta)) {
      throw std::invalid_argument("empirical_tau: deltas must strictly decrease");
    }
    prev_delta = gm.delta;
    auto it = std::find(gm.qs.begin(), gm.qs.end(), q);
    if (it == gm.qs.end()) {
      throw std::invalid_argument("empirical_tau: q missing from a moment row");
    }
    const double d = gm.D[static_cast<std::size_t>(it - gm.qs.begin())];
    if (!(d > 0.0)) throw std::invalid_argument("empirical_tau: nonpositive moment");
    xs.push_back(-std::log(gm.delta));
    ys.push_back(std::log(d));
  }

  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  TauFit fit;
  const double ymin = *std::min_element(ys.begin(), ys.end());
  const double ymax = *std::max_element(ys.begin(), ys.end());
  fit.degenerate = (ymax - ymin) <= 1e-14 * std::max(1.0, std::abs(ymax));
  fit.slope = fit.degenerate ? 0.0 : sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  }
  return fit;
}

LocalExponentTrace local_exponent_trace(const CantorSystem& sys,
                                        const SymbolicMeasure& measure, Symbol symbol,
                                        const std::vector<int>& depths) {
  if (symbol >= sys.size()) throw std::invalid_argument("symbol out of range");
  if (depths.empty()) throw std::invalid_argument("need at least one depth");
  std::vector<int> sorted = depths;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw std::invalid_argument("depths must be >= 1");

  const auto& m = sys.map(symbol);
  const double log_p = std::log(measure.mass(Word{symbol}));

  LocalExponentTrace tr;
  double a = 0.0, b = 1.0;
  int n = 0;
  for (int target : sorted) {
    for (; n < target; ++n) {
      a = m.eval(a);
      b = m.eval(b);
    }
    const double radius = std::abs(b - a);
    tr.depths.push_back(target);
    tr.radii.push_back(radius);
    tr.exponents.push_back(target * log_p / std::log(radius));
  }
  return tr;
}

}  // namespace parafrac

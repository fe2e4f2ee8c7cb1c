#include "parafrac/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace parafrac {

namespace {

constexpr double kHyperbolicMargin = 1e-6;

std::string axis_name(Axis a) { return a == Axis::x ? "x" : "y"; }

}  // namespace

CantorSystem::CantorSystem(std::vector<ContractionMap> maps) : maps_(std::move(maps)) {
  if (maps_.size() < 2) throw std::invalid_argument("Cantor system needs >= 2 maps");
  if (maps_.size() > 255) throw std::invalid_argument("alphabet too large");
  alpha_h_ = 1.0;
  for (const auto& m : maps_) alpha_h_ = std::min(alpha_h_, m.holder_exponent());
}

CarpetSystem::CarpetSystem(std::vector<CarpetComponent> components)
    : comps_(std::move(components)) {
  if (comps_.size() < 2) throw std::invalid_argument("carpet needs >= 2 components");
  if (comps_.size() > 255) throw std::invalid_argument("alphabet too large");
  alpha_f_ = alpha_g_ = 1.0;
  for (const auto& c : comps_) {
    alpha_f_ = std::min(alpha_f_, c.f.holder_exponent());
    alpha_g_ = std::min(alpha_g_, c.g.holder_exponent());
  }
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// Contraction + declared-parabolic consistency for one map.
void check_map_axioms(const ContractionMap& m, const std::string& label,
                      ValidationReport& rep) {
  AxiomCheck range{"A1 range " + label, true, ""};
  const double h0 = m.eval(0.0), h1 = m.eval(1.0);
  if (std::min(h0, h1) < -1e-12 || std::max(h0, h1) > 1.0 + 1e-12) {
    range.pass = false;
    range.message = "image not inside [0,1]";
  }
  rep.checks.push_back(range);

  AxiomCheck contract{"A1 contraction " + label, true, ""};
  AxiomCheck nonvanish{"A2 nonvanishing " + label, true, ""};
  const int samples = 512;
  const double spacing = 1.0 / samples;
  double inf_abs = std::numeric_limits<double>::infinity();
  // midpoints plus the endpoints: |h'| = 1 at an undeclared endpoint fixed
  // point is exactly how a forgotten parabolic declaration shows up
  std::vector<double> xs = {0.0, 1.0};
  for (int i = 0; i < samples; ++i) xs.push_back((i + 0.5) * spacing);
  for (double x : xs) {
    if (m.parabolic_point() && std::abs(x - *m.parabolic_point()) < spacing) {
      continue;  // strictness is only required away from the declared point
    }
    const double d = std::abs(m.deriv(x));
    inf_abs = std::min(inf_abs, d);
    if (d >= 1.0 && contract.pass) {
      contract.pass = false;
      contract.message = "|h'| >= 1 at x=" + std::to_string(x) +
                         " with no declared parabolic point there";
    }
  }
  if (inf_abs <= 1e-6) {
    nonvanish.pass = false;
    nonvanish.message = "sampled inf |h'| = " + std::to_string(inf_abs);
  }
  if (m.parabolic_point()) {
    const double p = *m.parabolic_point();
    if (std::abs(m.eval(p) - p) > 1e-12) {
      contract.pass = false;
      contract.message = "declared parabolic point is not fixed";
    } else if (std::abs(std::abs(m.deriv(p)) - 1.0) > 1e-9) {
      contract.pass = false;
      contract.message = "declared parabolic point has |h'(p)| != 1";
    }
  }
  rep.checks.push_back(contract);
  rep.checks.push_back(nonvanish);
}

struct Level1Image {
  double lo, hi;
  std::size_t index;
};

// Interior disjointness of level-1 images for maps in distinct grid groups.
void check_disjoint(const std::vector<Level1Image>& images, const std::string& axiom,
                    ValidationReport& rep) {
  auto sorted = images;
  std::sort(sorted.begin(), sorted.end(),
            [](const Level1Image& a, const Level1Image& b) { return a.lo < b.lo; });
  AxiomCheck chk{axiom, true, ""};
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1].lo < sorted[i].hi - 1e-10) {
      chk.pass = false;
      chk.message = "images of maps " + std::to_string(sorted[i].index) + " and " +
                    std::to_string(sorted[i + 1].index) + " overlap";
      break;
    }
  }
  rep.checks.push_back(chk);
}

bool maps_agree(const ContractionMap& a, const ContractionMap& b) {
  for (int i = 0; i <= 32; ++i) {
    const double x = i / 32.0;
    if (std::abs(a.eval(x) - b.eval(x)) > 1e-10) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate(const CantorSystem& sys) {
  ValidationReport rep;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    check_map_axioms(sys.map(static_cast<Symbol>(i)), "h" + std::to_string(i), rep);
  }
  std::vector<Level1Image> images;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& m = sys.map(static_cast<Symbol>(i));
    const double a = m.eval(0.0), b = m.eval(1.0);
    images.push_back({std::min(a, b), std::max(a, b), i});
  }
  check_disjoint(images, "A3' disjoint interiors", rep);
  return rep;
}

ValidationReport validate(const CarpetSystem& sys) {
  ValidationReport rep;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& c = sys.comp(static_cast<Symbol>(i));
    check_map_axioms(c.f, "f" + std::to_string(i), rep);
    check_map_axioms(c.g, "g" + std::to_string(i), rep);
  }

  // Grid consistency: equal ids mean declared-identical maps; distinct ids
  // mean interior-disjoint images. Shared (col,row) pairs are forbidden.
  AxiomCheck grid{"A3 grid consistency", true, ""};
  std::set<std::pair<int, int>> cells;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& c = sys.comp(static_cast<Symbol>(i));
    if (!cells.emplace(c.col, c.row).second) {
      grid.pass = false;
      grid.message = "two components share grid cell (" + std::to_string(c.col) +
                     "," + std::to_string(c.row) + ")";
    }
  }
  for (std::size_t i = 0; i < sys.size() && grid.pass; ++i) {
    for (std::size_t j = i + 1; j < sys.size() && grid.pass; ++j) {
      const auto& a = sys.comp(static_cast<Symbol>(i));
      const auto& b = sys.comp(static_cast<Symbol>(j));
      if (a.col == b.col && !maps_agree(a.f, b.f)) {
        grid.pass = false;
        grid.message = "components " + std::to_string(i) + "," + std::to_string(j) +
                       " share a column id but their f maps differ";
      }
      if (a.row == b.row && !maps_agree(a.g, b.g)) {
        grid.pass = false;
        grid.message = "components " + std::to_string(i) + "," + std::to_string(j) +
                       " share a row id but their g maps differ";
      }
    }
  }
  rep.checks.push_back(grid);

  // Interior disjointness across distinct grid ids (one representative each).
  {
    std::vector<Level1Image> xs, ys;
    std::set<int> seen_cols, seen_rows;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const auto& c = sys.comp(static_cast<Symbol>(i));
      if (seen_cols.insert(c.col).second) {
        const double a = c.f.eval(0.0), b = c.f.eval(1.0);
        xs.push_back({std::min(a, b), std::max(a, b), i});
      }
      if (seen_rows.insert(c.row).second) {
        const double a = c.g.eval(0.0), b = c.g.eval(1.0);
        ys.push_back({std::min(a, b), std::max(a, b), i});
      }
    }
    check_disjoint(xs, "A3 disjoint column images", rep);
    check_disjoint(ys, "A3 disjoint row images", rep);
  }

  // Carpets squashed into an axis line belong in the Cantor pipeline.
  {
    AxiomCheck degenerate{"nondegenerate attractor", true, ""};
    auto common_fixed = [&](auto proj) {
      const double p0 = proj(sys.comp(0)).fixed_point();
      for (std::size_t i = 1; i < sys.size(); ++i) {
        if (std::abs(proj(sys.comp(static_cast<Symbol>(i))).fixed_point() - p0) > 1e-9) {
          return false;
        }
      }
      return true;
    };
    if (common_fixed([](const CarpetComponent& c) -> const ContractionMap& { return c.f; })) {
      degenerate.pass = false;
      degenerate.message =
          "attractor lies on a vertical line; model it as a parabolic Cantor set "
          "(cantor config) instead";
    } else if (common_fixed([](const CarpetComponent& c) -> const ContractionMap& { return c.g; })) {
      degenerate.pass = false;
      degenerate.message =
          "attractor lies on a horizontal line; model it as a parabolic Cantor set "
          "(cantor config) instead";
    }
    rep.checks.push_back(degenerate);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Word geometry

std::vector<const ContractionMap*> word_maps(const CantorSystem& sys, const Word& w) {
  std::vector<const ContractionMap*> out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(&sys.map(s));
  return out;
}

std::vector<const ContractionMap*> word_fmaps(const CarpetSystem& sys, const Word& w) {
  std::vector<const ContractionMap*> out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(&sys.comp(s).f);
  return out;
}

std::vector<const ContractionMap*> word_gmaps(const CarpetSystem& sys, const Word& w) {
  std::vector<const ContractionMap*> out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(&sys.comp(s).g);
  return out;
}

Interval image_interval(std::span<const ContractionMap* const> maps) {
  const double a = compose_eval(maps, 0.0).value;
  const double b = compose_eval(maps, 1.0).value;
  return {std::min(a, b), std::max(a, b)};
}

double CylinderGeom::longer_side() const {
  if (!y_interval) return x_interval.length();
  return std::max(x_interval.length(), y_interval->length());
}

double CylinderGeom::shorter_side() const {
  if (!y_interval) return x_interval.length();
  return std::min(x_interval.length(), y_interval->length());
}

CylinderGeom cylinder_geometry(const CantorSystem& sys, const Word& w,
                               DerivRangeOptions opt) {
  if (w.empty()) throw std::invalid_argument("cylinder_geometry: empty word");
  CylinderGeom g;
  g.word = w;
  const auto maps = word_maps(sys, w);
  g.x_interval = image_interval(maps);
  const DerivBounds db = derivative_range(maps, 0.0, 1.0, opt);
  g.o1 = g.o2 = db.upper;
  g.u1 = g.u2 = db.lower;
  g.longer_axis = Axis::x;
  return g;
}

namespace {

// Joint scan of the two coordinate derivative magnitudes at shared midpoints.
struct JointScan {
  double max_max = 0.0, min_max = std::numeric_limits<double>::infinity();
  double max_min = 0.0, min_min = std::numeric_limits<double>::infinity();
  double arg_max_max = 0.5, arg_min_max = 0.5, arg_max_min = 0.5, arg_min_min = 0.5;
  double kappa = 0.0;  // largest adjacent jump in either coordinate
};

JointScan joint_scan(std::span<const ContractionMap* const> f,
                     std::span<const ContractionMap* const> g, double lo, double hi,
                     int grid) {
  JointScan s;
  const double step = (hi - lo) / grid;
  double pf = 0.0, pg = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (i + 0.5) * step;
    const double df = std::abs(compose_eval(f, x).derivative);
    const double dg = std::abs(compose_eval(g, x).derivative);
    const double big = std::max(df, dg), small = std::min(df, dg);
    if (big > s.max_max) { s.max_max = big; s.arg_max_max = x; }
    if (big < s.min_max) { s.min_max = big; s.arg_min_max = x; }
    if (small > s.max_min) { s.max_min = small; s.arg_max_min = x; }
    if (small < s.min_min) { s.min_min = small; s.arg_min_min = x; }
    if (i > 0) {
      s.kappa = std::max({s.kappa, std::abs(df - pf), std::abs(dg - pg)});
    }
    pf = df;
    pg = dg;
  }
  return s;
}

}  // namespace

CylinderGeom cylinder_geometry(const CarpetSystem& sys, const Word& w,
                               DerivRangeOptions opt) {
  if (w.empty()) throw std::invalid_argument("cylinder_geometry: empty word");
  CylinderGeom g;
  g.word = w;
  const auto fmaps = word_fmaps(sys, w);
  const auto gmaps = word_gmaps(sys, w);
  g.x_interval = image_interval(fmaps);
  g.y_interval = image_interval(gmaps);
  g.longer_axis =
      g.x_interval.length() >= g.y_interval->length() ? Axis::x : Axis::y;

  // Degenerate sup (derivative exactly 1) happens only at a parabolic point
  // fixed by the whole coordinate family; max-side refinement avoids it.
  const auto pf = common_parabolic_point(fmaps);
  const auto pg = common_parabolic_point(gmaps);
  auto degenerate_in = [&](double lo, double hi) {
    return (pf && *pf >= lo && *pf <= hi) || (pg && *pg >= lo && *pg <= hi);
  };

  JointScan s = joint_scan(fmaps, gmaps, 0.0, 1.0, opt.grid);
  double kappa = s.kappa;  // modulus estimate from the finest executed scan
  double window = 1.0 / opt.grid;
  for (int r = 0; r < opt.refinements; ++r) {
    struct Target {
      double* arg;
      bool max_side;
    };
    for (const Target tgt : {Target{&s.arg_max_max, true}, Target{&s.arg_max_min, true},
                             Target{&s.arg_min_max, false}, Target{&s.arg_min_min, false}}) {
      const double lo = std::max(0.0, *tgt.arg - window);
      const double hi = std::min(1.0, *tgt.arg + window);
      if (tgt.max_side && degenerate_in(lo, hi)) continue;
      JointScan t = joint_scan(fmaps, gmaps, lo, hi, opt.grid);
      if (t.max_max > s.max_max) { s.max_max = t.max_max; s.arg_max_max = t.arg_max_max; }
      if (t.min_max < s.min_max) { s.min_max = t.min_max; s.arg_min_max = t.arg_min_max; }
      if (t.max_min > s.max_min) { s.max_min = t.max_min; s.arg_max_min = t.arg_max_min; }
      if (t.min_min < s.min_min) { s.min_min = t.min_min; s.arg_min_min = t.arg_min_min; }
      kappa = std::min(kappa, t.kappa);
    }
    window *= 0.5;
  }

  const double spread =
      std::max({s.max_max - s.min_max, s.max_min - s.min_min, s.kappa});
  if (spread <= 1e-14 * std::max(1.0, s.max_max)) {
    // Constant derivatives in both coordinates: exact values.
    g.o1 = s.max_max;
    g.u1 = s.min_max;
    g.o2 = s.max_min;
    g.u2 = s.min_min;
    return g;
  }
  const double infl = 1.0 + opt.inflation;
  const double tiny = std::numeric_limits<double>::min();
  g.o1 = std::min(1.0, (s.max_max + kappa) * infl);
  g.o2 = std::min(g.o1, (s.max_min + kappa) * infl);
  g.u2 = std::max(tiny, std::max(s.min_min - kappa, 0.5 * s.min_min) / infl);
  g.u1 = std::clamp(std::max(s.min_max - kappa, 0.5 * s.min_max) / infl, g.u2, g.o1);
  g.o2 = std::max(g.o2, g.u2);
  return g;
}

// ---------------------------------------------------------------------------
// Hyperbolic index

namespace {

double coordinate_upper(const std::vector<const ContractionMap*>& maps) {
  if (maps.size() == 1) return maps[0]->max_abs_deriv();
  return derivative_range(maps).upper;
}

template <class CoordLister>
Word find_index_impl(std::size_t arity, const CoordLister& coords_for) {
  for (int len = 1; len <= 4; ++len) {
    std::vector<Word> words = enumerate_words(arity, len);
    for (const Word& w : words) {
      bool ok = true;
      for (const auto& maps : coords_for(w)) {
        // sup = 1 exactly at a shared parabolic point; sampling would miss it
        if (common_parabolic_point(maps).has_value() ||
            coordinate_upper(maps) > 1.0 - kHyperbolicMargin) {
          ok = false;
          break;
        }
      }
      if (ok) return w;
    }
  }
  throw std::runtime_error(
      "find_hyperbolic_index: no uniformly contracting word of length <= 4; "
      "the system looks degenerate");
}

}  // namespace

Word find_hyperbolic_index(const CantorSystem& sys) {
  // Needs at least two distinct fixed points, else the attractor is a point.
  bool distinct = false;
  const double p0 = sys.map(0).fixed_point();
  for (std::size_t i = 1; i < sys.size() && !distinct; ++i) {
    distinct = std::abs(sys.map(static_cast<Symbol>(i)).fixed_point() - p0) > 1e-9;
  }
  if (!distinct) {
    throw std::invalid_argument(
        "find_hyperbolic_index: all maps share one fixed point (single-point attractor)");
  }
  return find_index_impl(sys.size(), [&](const Word& w) {
    return std::vector<std::vector<const ContractionMap*>>{word_maps(sys, w)};
  });
}

Word find_hyperbolic_index(const CarpetSystem& sys) {
  return find_index_impl(sys.size(), [&](const Word& w) {
    return std::vector<std::vector<const ContractionMap*>>{word_fmaps(sys, w),
                                                           word_gmaps(sys, w)};
  });
}

template <class System>
InducedAlphabet induced_entries(const System& sys, int N, std::size_t budget) {
  const Word i0 = find_hyperbolic_index(sys);
  if (i0.size() != 1) {
    throw std::runtime_error(
        "induced mode needs a single hyperbolic symbol; this system's shortest "
        "uniformly contracting word has length " + std::to_string(i0.size()));
  }
  return induced_alphabet(sys.size(), i0[0], N, budget);
}

template InducedAlphabet induced_entries<CantorSystem>(const CantorSystem&, int, std::size_t);
template InducedAlphabet induced_entries<CarpetSystem>(const CarpetSystem&, int, std::size_t);

// ---------------------------------------------------------------------------
// Summability

SummabilityReport check_summability(const CantorSystem& sys, const Word& i0, int N,
                                    double exponent, std::size_t budget) {
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw std::invalid_argument("summability exponent must lie in (0,1]");
  }
  if (i0.size() != 1) {
    throw std::runtime_error("check_summability needs a single hyperbolic symbol");
  }
  SummabilityReport rep;
  rep.exponent = exponent;

  const InducedAlphabet ia = induced_alphabet(sys.size(), i0[0], N, budget);
  std::vector<double> by_length(static_cast<std::size_t>(N) + 1, 0.0);
  for (const Word& e : ia.entries) {
    const auto maps = word_maps(sys, e);
    by_length[e.size()] += std::pow(image_interval(maps).length(), exponent);
  }

  double running = 0.0;
  int next_cutoff = 4;
  std::vector<double> cumulative(by_length.size(), 0.0);
  for (std::size_t m = 1; m < by_length.size(); ++m) {
    running += by_length[m];
    cumulative[m] = running;
    if (static_cast<int>(m) == next_cutoff) {
      rep.cutoffs.push_back(static_cast<int>(m));
      rep.partial_sums.push_back(running);
      next_cutoff *= 2;
    }
  }
  if (rep.cutoffs.empty() || rep.cutoffs.back() != N) {
    rep.cutoffs.push_back(N);
    rep.partial_sums.push_back(running);
  }

  // Ratio of the last two dyadic window increments; ~2^{-c} for tails n^{-1-c}.
  if (rep.partial_sums.size() >= 3) {
    const std::size_t k = rep.partial_sums.size();
    const double inc1 = rep.partial_sums[k - 1] - rep.partial_sums[k - 2];
    const double inc0 = rep.partial_sums[k - 2] - rep.partial_sums[k - 3];
    rep.last_window_ratio = inc0 > 0.0 ? inc1 / inc0 : 0.0;
    rep.flagged_slow = rep.last_window_ratio >= 0.95;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stopping problems

namespace {

std::vector<Word> expansion_blocks(std::size_t arity, const AlphabetSpec& mode,
                                   const std::function<Word()>& index_finder,
                                   std::size_t budget) {
  if (!mode.is_induced()) {
    std::vector<Word> blocks;
    for (std::size_t s = 0; s < arity; ++s) blocks.push_back({static_cast<Symbol>(s)});
    return blocks;
  }
  const Word i0 = index_finder();
  if (i0.size() != 1) {
    throw std::runtime_error("induced stopping needs a single hyperbolic symbol");
  }
  return induced_alphabet(arity, i0[0], mode.N, budget).entries;
}

}  // namespace

StoppingProblem stopping_problem(const CantorSystem& sys,
                                 const SymbolicMeasure& measure, AlphabetSpec mode,
                                 std::size_t budget) {
  StoppingProblem p;
  p.blocks = expansion_blocks(sys.size(), mode,
                              [&] { return find_hyperbolic_index(sys); }, budget);
  p.stop_length = [&sys](const Word& w) {
    return image_interval(word_maps(sys, w)).length();
  };
  p.mass = [&measure](const Word& w) { return measure.mass(w); };
  return p;
}

StoppingProblem stopping_problem(const CarpetSystem& sys,
                                 const SymbolicMeasure& measure, AlphabetSpec mode,
                                 std::size_t budget) {
  StoppingProblem p;
  p.blocks = expansion_blocks(sys.size(), mode,
                              [&] { return find_hyperbolic_index(sys); }, budget);
  p.stop_length = [&sys](const Word& w) {
    const double wx = image_interval(word_fmaps(sys, w)).length();
    const double wy = image_interval(word_gmaps(sys, w)).length();
    return std::min(wx, wy);
  };
  p.mass = [&measure](const Word& w) { return measure.mass(w); };
  return p;
}

// ---------------------------------------------------------------------------
// Projections

ProjectedMeasure project(const CarpetSystem& sys, const SymbolicMeasure& measure,
                         Axis axis) {
  if (measure.kind() != SymbolicMeasure::Kind::bernoulli) {
    throw std::invalid_argument("project: only Bernoulli measures are supported");
  }
  if (measure.arity() != sys.size()) {
    throw std::invalid_argument("project: measure arity mismatch");
  }

  std::vector<int> ids;
  for (const auto& c : sys.components()) {
    ids.push_back(axis == Axis::x ? c.col : c.row);
  }
  std::vector<int> distinct = ids;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument("project: degenerate " + axis_name(axis) +
                                " projection (single merged map)");
  }

  std::vector<double> weights(distinct.size(), 0.0);
  std::vector<ContractionMap> maps;
  std::vector<int> symbol_to_merged(sys.size());
  maps.reserve(distinct.size());
  for (std::size_t m = 0; m < distinct.size(); ++m) {
    bool have_map = false;
    for (std::size_t s = 0; s < sys.size(); ++s) {
      if (ids[s] != distinct[m]) continue;
      symbol_to_merged[s] = static_cast<int>(m);
      weights[m] += measure.weights()[s];
      if (!have_map) {
        const auto& c = sys.comp(static_cast<Symbol>(s));
        maps.push_back(axis == Axis::x ? c.f : c.g);
        have_map = true;
      }
    }
  }

  return ProjectedMeasure{
      std::move(distinct), weights, std::move(symbol_to_merged),
      CantorSystem(std::move(maps)),
      SymbolicMeasure::bernoulli(BernoulliWeights(weights))};
}

}  // namespace parafrac

#include "parafrac/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "parafrac/rng.hpp"

namespace parafrac {

namespace {

constexpr double kLogFloor = -745.0;  // log of the smallest normal-ish double

double safe_log(double x) { return x > 0.0 ? std::max(std::log(x), kLogFloor) : kLogFloor; }

std::vector<Word> blocks_for(std::size_t arity, AlphabetSpec mode,
                             const std::function<Word()>& find_i0,
                             std::size_t budget) {
  if (!mode.is_induced()) {
    std::vector<Word> blocks;
    for (std::size_t s = 0; s < arity; ++s) blocks.push_back({static_cast<Symbol>(s)});
    return blocks;
  }
  const Word i0 = find_i0();
  if (i0.size() != 1) {
    throw std::runtime_error("induced mode needs a single hyperbolic symbol");
  }
  return induced_alphabet(arity, i0[0], mode.N, budget).entries;
}

void check_leaf_budget(std::size_t nblocks, int level, std::size_t budget) {
  double leaves = 1.0;
  for (int i = 0; i < level; ++i) leaves *= static_cast<double>(nblocks);
  if (leaves > static_cast<double>(budget)) {
    throw capacity_error("level sum of " + std::to_string(leaves) +
                         " words exceeds budget " + std::to_string(budget));
  }
}

// DFS over block^level words; `leaf(word, path_maps...)` is called once per
// leaf with the concatenated underlying word available in `scratch`.
template <class Leaf>
void for_each_block_word(const std::vector<Word>& blocks, int level, Leaf&& leaf) {
  Word scratch;
  std::function<void(int)> rec = [&](int depth) {
    if (depth == level) {
      leaf(scratch);
      return;
    }
    for (const Word& b : blocks) {
      scratch.insert(scratch.end(), b.begin(), b.end());
      rec(depth + 1);
      scratch.resize(scratch.size() - b.size());
    }
  };
  rec(0);
}

}  // namespace

int default_level(std::size_t arity, std::size_t budget) {
  int level = 1;
  std::size_t count = arity;
  while (count <= budget / arity) {
    count *= arity;
    ++level;
  }
  return level;
}

int adapted_induced_N(std::size_t arity, int requested, std::size_t entry_budget) {
  int N = requested;
  while (N > 1 && induced_alphabet_count(arity, N, entry_budget) > entry_budget) {
    --N;
  }
  return N;
}

LevelTable tabulate_level(const CantorSystem& sys, const SymbolicMeasure& measure,
                          int level, AlphabetSpec mode, Gauge gauge,
                          std::size_t budget) {
  if (level < 1) throw std::invalid_argument("level must be >= 1");
  const auto blocks =
      blocks_for(sys.size(), mode, [&] { return find_hyperbolic_index(sys); }, budget);
  check_leaf_budget(blocks.size(), level, budget);

  LevelTable t;
  t.level = level;
  t.carpet = false;
  t.mode = mode;
  t.gauge = gauge;

  std::vector<const ContractionMap*> maps;
  for_each_block_word(blocks, level, [&](const Word& w) {
    const double mass = measure.mass(w);
    if (mass <= 0.0) return;
    maps.clear();
    for (Symbol s : w) maps.push_back(&sys.map(s));
    double log_a;
    if (gauge == Gauge::interval_length) {
      log_a = log_image_length(maps);
    } else {
      log_a = safe_log(derivative_range(maps).upper);
    }
    t.log_mass.push_back(safe_log(mass));
    t.log_a1.push_back(log_a);
  });
  return t;
}

LevelTable tabulate_level(const CarpetSystem& sys, const SymbolicMeasure& measure,
                          int level, AlphabetSpec mode, Gauge gauge,
                          std::size_t budget) {
  if (level < 1) throw std::invalid_argument("level must be >= 1");
  const auto blocks =
      blocks_for(sys.size(), mode, [&] { return find_hyperbolic_index(sys); }, budget);
  check_leaf_budget(blocks.size(), level, budget);

  LevelTable t;
  t.level = level;
  t.carpet = true;
  t.mode = mode;
  t.gauge = gauge;

  std::vector<const ContractionMap*> fmaps, gmaps;
  for_each_block_word(blocks, level, [&](const Word& w) {
    const double mass = measure.mass(w);
    if (mass <= 0.0) return;
    fmaps.clear();
    gmaps.clear();
    for (Symbol s : w) {
      fmaps.push_back(&sys.comp(s).f);
      gmaps.push_back(&sys.comp(s).g);
    }
    const double log_wx = log_image_length(fmaps);
    const double log_wy = log_image_length(gmaps);
    const bool y_longer = log_wy > log_wx;
    double log_a1, log_a2;
    if (gauge == Gauge::interval_length) {
      log_a1 = std::max(log_wx, log_wy);
      log_a2 = std::min(log_wx, log_wy);
    } else {
      const CylinderGeom geom = cylinder_geometry(sys, w);
      log_a1 = safe_log(geom.o1);
      log_a2 = safe_log(geom.o2);
    }
    t.log_mass.push_back(safe_log(mass));
    t.log_a1.push_back(log_a1);
    t.log_a2.push_back(log_a2);
    t.longer_is_y.push_back(y_longer ? 1 : 0);
  });
  return t;
}

double level_sum(const LevelTable& t, double s, double q, double t_f, double t_g) {
  double sum = 0.0;
  if (!t.carpet) {
    for (std::size_t i = 0; i < t.log_mass.size(); ++i) {
      sum += std::exp(q * t.log_mass[i] + s * t.log_a1[i]);
    }
    return sum;
  }
  for (std::size_t i = 0; i < t.log_mass.size(); ++i) {
    const double tt = t.longer_is_y[i] ? t_g : t_f;
    sum += std::exp(q * t.log_mass[i] + tt * t.log_a1[i] + (s - tt) * t.log_a2[i]);
  }
  return sum;
}

double phi_singular(const CylinderGeom& geom, double mass, double s, double q,
                    double t_f, double t_g, Gauge gauge) {
  if (mass <= 0.0) return 0.0;  // 0^0 = 0 convention
  const double t = geom.longer_axis == Axis::x ? t_f : t_g;
  double a1, a2;
  if (gauge == Gauge::interval_length) {
    a1 = geom.longer_side();
    a2 = geom.shorter_side();
  } else {
    a1 = geom.o1;
    a2 = geom.o2;
  }
  return std::pow(mass, q) * std::pow(a1, t) * std::pow(a2, s - t);
}

PressureSample level_pressure(const CantorSystem& sys, const SymbolicMeasure& measure,
                              double s, double q, int level, AlphabetSpec mode,
                              Gauge gauge, std::size_t budget) {
  const LevelTable t = tabulate_level(sys, measure, level, mode, gauge, budget);
  PressureSample p{s, q, level, mode, gauge, 0.0};
  p.value = std::pow(level_sum(t, s, q), 1.0 / level);
  return p;
}

PressureSample level_pressure(const CarpetSystem& sys, const SymbolicMeasure& measure,
                              double s, double q, int level, double t_f, double t_g,
                              AlphabetSpec mode, Gauge gauge, std::size_t budget) {
  const LevelTable t = tabulate_level(sys, measure, level, mode, gauge, budget);
  PressureSample p{s, q, level, mode, gauge, 0.0};
  p.value = std::pow(level_sum(t, s, q, t_f, t_g), 1.0 / level);
  return p;
}

double root_from_table(const LevelTable& t, double q, double t_f, double t_g,
                       const RootOptions& opt) {
  if (t.log_mass.empty()) {
    throw std::runtime_error("root_from_table: empty level table");
  }
  auto F = [&](double s) { return level_sum(t, s, q, t_f, t_g); };

  double lo = opt.bracket_lo, hi = opt.bracket_hi;
  if (!(lo < hi)) throw std::invalid_argument("bad initial bracket");
  double step = hi - lo;
  int doublings = 0;
  while (F(hi) > 1.0) {
    hi += step;
    step *= 2.0;
    if (++doublings > opt.max_doublings) {
      throw std::runtime_error(
          "pressure root bracket expansion failed: sum stays above 1 (no root; "
          "the full-alphabet pressure of a parabolic family can sit above 1 at "
          "every s — try induced mode)");
    }
  }
  step = hi - lo;
  while (F(lo) < 1.0) {
    lo -= step;
    step *= 2.0;
    if (++doublings > opt.max_doublings) {
      throw std::runtime_error("pressure root bracket expansion failed below");
    }
  }
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gamma_root(const CantorSystem& sys, const SymbolicMeasure& measure, double q,
                  int level, AlphabetSpec mode, Gauge gauge, const RootOptions& opt,
                  std::size_t budget) {
  const LevelTable t = tabulate_level(sys, measure, level, mode, gauge, budget);
  return root_from_table(t, q, 0.0, 0.0, opt);
}

ProjectionSolver::ProjectionSolver(const CarpetSystem& sys,
                                   const SymbolicMeasure& measure, double tol,
                                   std::size_t entry_budget, std::size_t word_budget) {
  opt_.tol = tol;
  for (Axis axis : {Axis::x, Axis::y}) {
    const ProjectedMeasure proj = project(sys, measure, axis);
    // Largest induced truncation whose entry count stays budgeted; exact for
    // the 2-symbol alphabets that dominate in practice.
    const int N = adapted_induced_N(proj.system.size(), 30, entry_budget);
    const std::size_t entries = induced_alphabet_count(proj.system.size(), N, entry_budget);
    int k = 1;
    while (std::pow(static_cast<double>(entries), k + 1) <=
           static_cast<double>(word_budget)) {
      ++k;
    }
    LevelTable table = tabulate_level(proj.system, proj.measure, k,
                                      AlphabetSpec::induced(N),
                                      Gauge::interval_length, word_budget);
    if (axis == Axis::x) {
      table_x_ = std::move(table);
      induced_N_f_ = N;
    } else {
      table_y_ = std::move(table);
      induced_N_g_ = N;
    }
  }
}

ProjectionExponents ProjectionSolver::at(double q) const {
  ProjectionExponents out;
  out.t_f = root_from_table(table_x_, q, 0.0, 0.0, opt_);
  out.t_g = root_from_table(table_y_, q, 0.0, 0.0, opt_);
  out.induced_N_f = induced_N_f_;
  out.induced_N_g = induced_N_g_;
  return out;
}

ProjectionExponents projection_exponents(const CarpetSystem& sys,
                                         const SymbolicMeasure& measure, double q,
                                         double tol, std::size_t entry_budget,
                                         std::size_t word_budget) {
  return ProjectionSolver(sys, measure, tol, entry_budget, word_budget).at(q);
}

CarpetRoot beta_root(const CarpetSystem& sys, const SymbolicMeasure& measure, double q,
                     int level, AlphabetSpec mode, Gauge gauge, const RootOptions& opt,
                     std::size_t budget) {
  CarpetRoot out;
  out.level = level;
  out.exponents = projection_exponents(sys, measure, q, opt.tol / 10.0);
  const LevelTable t = tabulate_level(sys, measure, level, mode, gauge, budget);
  out.beta = root_from_table(t, q, out.exponents.t_f, out.exponents.t_g, opt);
  return out;
}

namespace {

ZetaPartial zeta_from_terms(std::vector<double> terms) {
  ZetaPartial z;
  z.level_terms = std::move(terms);
  z.partial_sums.resize(z.level_terms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < z.level_terms.size(); ++i) {
    acc += z.level_terms[i];
    z.partial_sums[i] = acc;
  }
  // Ratio test over the last <= 5 adjacent term ratios.
  const std::size_t n = z.level_terms.size();
  std::size_t used = 0;
  double sum_ratio = 0.0;
  for (std::size_t i = n >= 6 ? n - 5 : 1; i < n; ++i) {
    if (z.level_terms[i - 1] > 0.0) {
      sum_ratio += z.level_terms[i] / z.level_terms[i - 1];
      ++used;
    }
  }
  z.mean_tail_ratio = used ? sum_ratio / used : 0.0;
  z.divergent = z.mean_tail_ratio >= 1.0 - 1e-9;
  return z;
}

}  // namespace

ZetaPartial zeta_partial(const CantorSystem& sys, const SymbolicMeasure& measure,
                         double s, double q, int n_max, AlphabetSpec mode, Gauge gauge,
                         std::size_t budget) {
  std::vector<double> terms;
  for (int n = 1; n <= n_max; ++n) {
    terms.push_back(level_sum(tabulate_level(sys, measure, n, mode, gauge, budget), s, q));
  }
  return zeta_from_terms(std::move(terms));
}

ZetaPartial zeta_partial(const CarpetSystem& sys, const SymbolicMeasure& measure,
                         double s, double q, int n_max, double t_f, double t_g,
                         AlphabetSpec mode, Gauge gauge, std::size_t budget) {
  std::vector<double> terms;
  for (int n = 1; n <= n_max; ++n) {
    terms.push_back(
        level_sum(tabulate_level(sys, measure, n, mode, gauge, budget), s, q, t_f, t_g));
  }
  return zeta_from_terms(std::move(terms));
}

PressureBoundReport pressure_bound_checks(const CantorSystem& sys,
                                          const SymbolicMeasure& measure,
                                          const std::vector<double>& qs,
                                          std::size_t level_budget) {
  PressureBoundReport rep;
  const int level = default_level(sys.size(), level_budget);
  const LevelTable t = tabulate_level(sys, measure, level, AlphabetSpec::full(),
                                      Gauge::interval_length, level_budget);
  for (double q : qs) {
    PressureBoundRow row;
    row.q = q;
    row.s = 1.0;
    row.level = level;
    row.value = std::pow(level_sum(t, 1.0, q), 1.0 / level);
    row.pass = row.value <= 1.0 + 5e-3;
    rep.rows.push_back(row);
  }
  return rep;
}

PressureBoundReport pressure_bound_checks(const CarpetSystem& sys,
                                          const SymbolicMeasure& measure,
                                          const std::vector<double>& qs,
                                          std::size_t level_budget) {
  PressureBoundReport rep;
  const int level = default_level(sys.size(), level_budget);
  const LevelTable t = tabulate_level(sys, measure, level, AlphabetSpec::full(),
                                      Gauge::interval_length, level_budget);
  const ProjectionSolver projections(sys, measure);
  for (double q : qs) {
    const ProjectionExponents te = projections.at(q);
    PressureBoundRow row;
    row.q = q;
    row.s = 2.0;
    row.level = level;
    row.value = std::pow(level_sum(t, 2.0, q, te.t_f, te.t_g), 1.0 / level);
    row.pass = row.value <= 1.0 + 5e-3;
    rep.rows.push_back(row);
  }
  return rep;
}

MultiplicativityReport multiplicativity_check(const CarpetSystem& sys,
                                              const SymbolicMeasure& measure,
                                              double s, double q, double t_f,
                                              double t_g, std::size_t trials,
                                              std::uint64_t seed) {
  if (measure.kind() != SymbolicMeasure::Kind::bernoulli) {
    throw std::invalid_argument("multiplicativity_check needs a Bernoulli measure");
  }
  MultiplicativityReport rep;
  rep.trials = trials;
  CounterRng rng(seed, 0x6d17);

  // Side lengths as the canonical singular values; the measured distortion
  // of each factor word sets the comparison envelope.
  auto phi_len = [&](const Word& w) {
    const double wx = image_interval(word_fmaps(sys, w)).length();
    const double wy = image_interval(word_gmaps(sys, w)).length();
    const double t = wx >= wy ? t_f : t_g;
    const double a1 = std::max(wx, wy), a2 = std::min(wx, wy);
    return std::pow(measure.mass(w), q) * std::pow(a1, t) * std::pow(a2, s - t);
  };
  auto distortion = [&](const Word& w) {
    const auto f = word_fmaps(sys, w);
    const auto g = word_gmaps(sys, w);
    return std::max(empirical_distortion(std::span<const ContractionMap* const>(f)),
                    empirical_distortion(std::span<const ContractionMap* const>(g)));
  };
  const double T = std::abs(s) + 2.0 * std::max(std::abs(t_f), std::abs(t_g));
  const double diff = s - (t_f + t_g);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Word i, j;
    const std::size_t n1 = 1 + rng.below(6), n2 = 1 + rng.below(6);
    for (std::size_t k = 0; k < n1; ++k) i.push_back(static_cast<Symbol>(rng.below(sys.size())));
    for (std::size_t k = 0; k < n2; ++k) j.push_back(static_cast<Symbol>(rng.below(sys.size())));

    const double ratio = phi_len(concat(i, j)) / (phi_len(i) * phi_len(j));
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    const double envelope =
        std::pow(distortion(i) * distortion(j), T) * (1.0 + 1e-9);
    bool ok = true;
    if (diff < 0.0) {
      ok = ratio <= envelope;
    } else if (diff > 0.0) {
      ok = ratio >= 1.0 / envelope;
    } else {
      ok = ratio <= envelope && ratio >= 1.0 / envelope;
    }
    if (!ok) rep.violations.push_back({i, j, ratio, envelope});
  }
  return rep;
}

std::vector<double> default_q_grid() {
  std::vector<double> qs;
  for (int i = 0; i <= 12; ++i) qs.push_back(i * 0.25);
  return qs;
}

namespace {

// The per-word table is q-independent, so one tabulation per alphabet mode
// serves the whole q grid.
template <class System, class RootAt>
SpectrumCurve spectrum_impl(const System& sys, const SpectrumOptions& opt,
                            const RootAt& root_at) {
  SpectrumCurve curve;
  curve.method = "pressure_root";
  const std::vector<double> qs = opt.qs.empty() ? default_q_grid() : opt.qs;
  const int full_level =
      opt.level > 0 ? opt.level : default_level(sys.size(), opt.budget);

  std::optional<LevelTable> main, full_check;
  int induced_k = 0;
  std::string mode_name = "full";
  std::string table_error;
  try {
    if (opt.induced_N) {
      const std::size_t entries =
          induced_alphabet_count(sys.size(), *opt.induced_N, opt.budget);
      induced_k = 1;
      while (std::pow(static_cast<double>(entries), induced_k + 1) <=
             static_cast<double>(opt.budget)) {
        ++induced_k;
      }
      main = root_at.tabulate(induced_k, AlphabetSpec::induced(*opt.induced_N));
      mode_name = "induced(" + std::to_string(*opt.induced_N) + ")";
      try {
        full_check = root_at.tabulate(full_level, AlphabetSpec::full());
      } catch (const std::exception&) {
        // the full-alphabet diagnostic is optional in induced mode
      }
    } else {
      main = root_at.tabulate(full_level, AlphabetSpec::full());
    }
  } catch (const std::exception& e) {
    table_error = e.what();
  }

  for (double q : qs) {
    SpectrumPoint pt;
    pt.q = q;
    if (!main) {
      pt.failed = true;
      pt.error = table_error;
      curve.points.push_back(std::move(pt));
      continue;
    }
    try {
      pt.tau = root_at.root(*main, q);
      pt.level = opt.induced_N ? induced_k : full_level;
      pt.mode = mode_name;
      if (full_check) {
        try {
          pt.gap = std::abs(root_at.root(*full_check, q) - pt.tau);
        } catch (const std::exception&) {
          // full-alphabet root can legitimately fail to bracket (parabolic)
        }
      }
    } catch (const std::exception& e) {
      pt.failed = true;
      pt.error = e.what();
    }
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace

SpectrumCurve spectrum_curve(const CantorSystem& sys, const SymbolicMeasure& measure,
                             const SpectrumOptions& opt) {
  struct {
    const CantorSystem& sys;
    const SymbolicMeasure& measure;
    const SpectrumOptions& opt;
    RootOptions ropt;
    LevelTable tabulate(int level, AlphabetSpec mode) const {
      return tabulate_level(sys, measure, level, mode, opt.gauge, opt.budget);
    }
    double root(const LevelTable& t, double q) const {
      return root_from_table(t, q, 0.0, 0.0, ropt);
    }
  } solver{sys, measure, opt, RootOptions{opt.tol, 0.0, 2.0, 60}};
  return spectrum_impl(sys, opt, solver);
}

SpectrumCurve spectrum_curve(const CarpetSystem& sys, const SymbolicMeasure& measure,
                             const SpectrumOptions& opt) {
  struct Solver {
    const CarpetSystem& sys;
    const SymbolicMeasure& measure;
    const SpectrumOptions& opt;
    RootOptions ropt;
    ProjectionSolver projections;
    LevelTable tabulate(int level, AlphabetSpec mode) const {
      return tabulate_level(sys, measure, level, mode, opt.gauge, opt.budget);
    }
    double root(const LevelTable& t, double q) const {
      const ProjectionExponents te = projections.at(q);
      return root_from_table(t, q, te.t_f, te.t_g, ropt);
    }
  } solver{sys, measure, opt, RootOptions{opt.tol, 0.0, 2.0, 60},
           ProjectionSolver(sys, measure, opt.tol / 10.0)};
  return spectrum_impl(sys, opt, solver);
}

}  // namespace parafrac

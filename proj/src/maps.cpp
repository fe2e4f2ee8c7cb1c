#include "parafrac/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace parafrac {

namespace {

constexpr double kDomainSlack = 1e-12;

double clamp01(double x, const char* who) {
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack) {
    throw std::domain_error(std::string(who) + ": argument " + std::to_string(x) +
                            " outside [0,1]");
  }
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

ContractionMap ContractionMap::affine(double slope, double offset) {
  if (std::abs(slope) >= 1.0) {
    throw std::invalid_argument("affine map needs |slope| < 1");
  }
  ContractionMap m;
  m.kind_ = Kind::affine;
  m.a_ = slope;
  m.b_ = offset;
  m.holder_ = 1.0;
  const double lo = std::min(offset, slope + offset);
  const double hi = std::max(offset, slope + offset);
  if (lo < -kDomainSlack || hi > 1.0 + kDomainSlack) {
    throw std::invalid_argument("affine map does not send [0,1] into itself");
  }
  return m;
}

ContractionMap ContractionMap::mp_left(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mp_left needs alpha in (0,1)");
  }
  ContractionMap m;
  m.kind_ = Kind::mp_left;
  m.a_ = alpha;
  m.holder_ = alpha;
  m.parabolic_ = 0.0;
  return m;
}

ContractionMap ContractionMap::mp_right(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mp_right needs alpha in (0,1)");
  }
  ContractionMap m;
  m.kind_ = Kind::mp_right;
  m.a_ = alpha;
  m.holder_ = 1.0;  // the branch itself is affine
  return m;
}

ContractionMap ContractionMap::sqrt_map() {
  ContractionMap m;
  m.kind_ = Kind::sqrt_map;
  m.holder_ = 1.0;
  m.parabolic_ = 0.0;
  return m;
}

ContractionMap ContractionMap::table(std::function<double(double)> value,
                                     std::function<double(double)> derivative,
                                     double holder_exponent,
                                     std::optional<double> parabolic_point,
                                     std::optional<double> sup_abs_deriv) {
  if (!(holder_exponent > 0.0 && holder_exponent <= 1.0)) {
    throw std::invalid_argument("table map needs holder exponent in (0,1]");
  }
  ContractionMap m;
  m.kind_ = Kind::table;
  m.holder_ = holder_exponent;
  m.parabolic_ = parabolic_point;
  m.table_value_ = std::move(value);
  m.table_deriv_ = std::move(derivative);
  m.table_sup_deriv_ = sup_abs_deriv;
  return m;
}

double ContractionMap::eval(double x) const {
  x = clamp01(x, "eval");
  switch (kind_) {
    case Kind::affine:
      return a_ * x + b_;
    case Kind::mp_left:
      return mp_invert_left(a_, x);
    case Kind::mp_right:
      return 0.5 * (x + 1.0);
    case Kind::sqrt_map:
      return (std::sqrt(1.0 + 8.0 * x) - 1.0) / 4.0;
    case Kind::table:
      return table_value_(x);
  }
  return 0.0;
}

double ContractionMap::deriv(double x) const {
  x = clamp01(x, "deriv");
  switch (kind_) {
    case Kind::affine:
      return a_;
    case Kind::mp_left: {
      const double h = mp_invert_left(a_, x);
      return 1.0 / (1.0 + std::exp2(a_) * (1.0 + a_) * std::pow(h, a_));
    }
    case Kind::mp_right:
      return 0.5;
    case Kind::sqrt_map:
      return 1.0 / std::sqrt(1.0 + 8.0 * x);
    case Kind::table:
      return table_deriv_(x);
  }
  return 0.0;
}

double ContractionMap::max_abs_deriv() const {
  switch (kind_) {
    case Kind::affine:
      return std::abs(a_);
    case Kind::mp_left:
      return 1.0;  // attained at the parabolic point 0
    case Kind::mp_right:
      return 0.5;
    case Kind::sqrt_map:
      return 1.0;
    case Kind::table: {
      if (table_sup_deriv_) return *table_sup_deriv_;
      const ContractionMap* self = this;
      return derivative_range(std::span<const ContractionMap* const>(&self, 1)).upper;
    }
  }
  return 1.0;
}

double ContractionMap::fixed_point() const {
  // g(x) = h(x) - x changes sign on [0,1] and has a unique zero for a
  // contraction.
  double lo = 0.0, hi = 1.0;
  double glo = eval(lo) - lo;
  if (glo == 0.0) return lo;
  double ghi = eval(hi) - hi;
  if (ghi == 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = eval(mid) - mid;
    if (g == 0.0) return mid;
    if ((g > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string ContractionMap::describe() const {
  switch (kind_) {
    case Kind::affine:
      return "affine(" + std::to_string(a_) + "x+" + std::to_string(b_) + ")";
    case Kind::mp_left:
      return "mp_left(alpha=" + std::to_string(a_) + ")";
    case Kind::mp_right:
      return "mp_right";
    case Kind::sqrt_map:
      return "sqrt";
    case Kind::table:
      return "table";
  }
  return "?";
}

double mp_forward(double alpha, double x) {
  if (x <= 0.5) return x + std::exp2(alpha) * std::pow(x, 1.0 + alpha);
  return 2.0 * x - 1.0;
}

double mp_invert_left(double alpha, double y) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mp_invert_left: alpha outside (0,1)");
  }
  y = clamp01(y, "mp_invert_left");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;

  const double c = std::exp2(alpha);
  auto g = [&](double x) { return x + c * std::pow(x, 1.0 + alpha); };
  auto gp = [&](double x) { return 1.0 + c * (1.0 + alpha) * std::pow(x, alpha); };

  // g(x) <= 2x on [0,1/2], so the root lies in [y/2, min(y, 1/2)].
  double lo = 0.5 * y;
  double hi = std::min(y, 0.5);
  double x = hi;
  for (int it = 0; it < 200; ++it) {
    const double r = g(x) - y;
    if (std::abs(r) <= 1e-15) return x;  // g' >= 1, so |x - root| <= |r|
    if (r > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    double step = r / gp(x);
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection fallback
    if (hi - lo <= 5e-17 * std::max(1.0, hi)) return 0.5 * (lo + hi);
    x = xn;
  }
  throw std::runtime_error("mp_invert_left: no convergence after 200 iterations");
}

ComposeResult compose_eval(std::span<const ContractionMap* const> maps, double x) {
  if (maps.empty()) {
    throw std::invalid_argument("compose_eval: empty map sequence");
  }
  double v = clamp01(x, "compose_eval");
  double d = 1.0;
  for (std::size_t k = maps.size(); k-- > 0;) {
    d *= maps[k]->deriv(v);
    v = maps[k]->eval(v);
  }
  return {v, d};
}

ComposeResult compose_eval(std::span<const ContractionMap> maps, double x) {
  std::vector<const ContractionMap*> ptrs(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) ptrs[i] = &maps[i];
  return compose_eval(std::span<const ContractionMap* const>(ptrs), x);
}

namespace {

double abs_deriv_at(std::span<const ContractionMap* const> maps, double x) {
  return std::abs(compose_eval(maps, x).derivative);
}

struct Scan {
  double min_val, max_val;
  double min_arg, max_arg;
  double max_jump;  // largest difference between adjacent samples
};

// Samples |d| at the midpoints of `grid` uniform cells; midpoints avoid
// hitting parabolic fixed points that sit on cell boundaries.
Scan scan_midpoints(std::span<const ContractionMap* const> maps, double lo,
                    double hi, int grid) {
  Scan s{std::numeric_limits<double>::infinity(), 0.0, lo, lo, 0.0};
  const double step = (hi - lo) / grid;
  double prev = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (i + 0.5) * step;
    const double v = abs_deriv_at(maps, x);
    if (v < s.min_val) {
      s.min_val = v;
      s.min_arg = x;
    }
    if (v > s.max_val) {
      s.max_val = v;
      s.max_arg = x;
    }
    if (i > 0) s.max_jump = std::max(s.max_jump, std::abs(v - prev));
    prev = v;
  }
  return s;
}

}  // namespace

double log_image_length(std::span<const ContractionMap* const> maps) {
  if (maps.empty()) return 0.0;
  double a = 0.0, b = 1.0;
  std::size_t k = maps.size();
  // Endpoint images stay exact while the interval is wide enough that the
  // subtraction keeps most of its digits.
  while (k > 0 && std::abs(b - a) > 1e-8) {
    --k;
    a = maps[k]->eval(a);
    b = maps[k]->eval(b);
  }
  double ll = std::log(std::abs(b - a));
  // Remaining (outer) maps stretch the now-tiny interval by |h'| at the
  // midpoint orbit; the relative error per step is O(|interval|).
  double v = 0.5 * (a + b);
  while (k > 0) {
    --k;
    ll += std::log(std::abs(maps[k]->deriv(v)));
    v = maps[k]->eval(v);
  }
  return ll;
}

std::optional<double> common_parabolic_point(
    std::span<const ContractionMap* const> maps) {
  std::optional<double> common;
  for (const auto* m : maps) {
    if (!m->parabolic_point()) return std::nullopt;
    if (!common) {
      common = m->parabolic_point();
    } else if (std::abs(*common - *m->parabolic_point()) > 1e-12) {
      return std::nullopt;
    }
  }
  return common;
}

DerivBounds derivative_range(std::span<const ContractionMap* const> maps,
                             double lo, double hi, DerivRangeOptions opt) {
  if (maps.empty()) throw std::invalid_argument("derivative_range: empty word");
  if (opt.grid < 3) throw std::invalid_argument("derivative_range: grid < 3");
  if (!(lo < hi)) throw std::invalid_argument("derivative_range: empty interval");

  Scan base = scan_midpoints(maps, lo, hi, opt.grid);
  double m = base.min_val, M = base.max_val;
  double min_arg = base.min_arg, max_arg = base.max_arg;
  // Local modulus estimates near each extreme; refined scans shrink them.
  double kappa_max = base.max_jump, kappa_min = base.max_jump;

  // Local window halving around the running extremes. When the whole word
  // shares one parabolic fixed point, the sup degenerates to 1 exactly there;
  // chasing it would only report the useless bound 1, so max-refinement
  // avoids that point and keeps the base-resolution contraction estimate.
  const std::optional<double> degenerate_at = common_parabolic_point(maps);
  double window = (hi - lo) / opt.grid;
  for (int r = 0; r < opt.refinements; ++r) {
    {
      const double wlo = std::max(lo, max_arg - window);
      const double whi = std::min(hi, max_arg + window);
      if (!(degenerate_at && *degenerate_at >= wlo && *degenerate_at <= whi)) {
        Scan s = scan_midpoints(maps, wlo, whi, opt.grid);
        if (s.max_val > M) {
          M = s.max_val;
          max_arg = s.max_arg;
        }
        kappa_max = s.max_jump;
      }
    }
    {
      const double wlo = std::max(lo, min_arg - window);
      const double whi = std::min(hi, min_arg + window);
      Scan s = scan_midpoints(maps, wlo, whi, opt.grid);
      if (s.min_val < m) {
        m = s.min_val;
        min_arg = s.min_arg;
      }
      kappa_min = s.max_jump;
    }
    window *= 0.5;
  }

  DerivBounds b;
  b.interval_lo = lo;
  b.interval_hi = hi;
  b.refinement_level = opt.refinements;
  if (base.max_jump == 0.0 && M - m <= 1e-14 * std::max(1.0, M)) {
    // Constant derivative (affine words): the bracket is exact.
    b.lower = m;
    b.upper = M;
    return b;
  }
  b.upper = std::min(1.0, (M + kappa_max) * (1.0 + opt.inflation));
  b.lower = std::max(std::max(m - kappa_min, 0.5 * m) / (1.0 + opt.inflation),
                     std::numeric_limits<double>::min());
  return b;
}

DerivBounds derivative_range(std::span<const ContractionMap> maps, double lo,
                             double hi, DerivRangeOptions opt) {
  std::vector<const ContractionMap*> ptrs(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) ptrs[i] = &maps[i];
  return derivative_range(std::span<const ContractionMap* const>(ptrs), lo, hi, opt);
}

double empirical_distortion(std::span<const ContractionMap* const> maps, int grid) {
  Scan s = scan_midpoints(maps, 0.0, 1.0, grid);
  if (s.min_val <= 0.0) return std::numeric_limits<double>::infinity();
  return s.max_val / s.min_val;
}

}  // namespace parafrac

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parafrac {

/// One-dimensional C^{1+alpha} contraction of [0,1] with an evaluable
/// derivative. Parabolic fixed points (|h'(p)| = 1, h(p) = p) are allowed
/// and must be declared so that validation and hyperbolic-index search can
/// treat them exactly.
class ContractionMap {
 public:
  enum class Kind { affine, mp_left, mp_right, sqrt_map, table };

  static ContractionMap affine(double slope, double offset);
  /// Left inverse branch of the Manneville-Pomeau map x + 2^a x^{1+a},
  /// alpha in (0,1). Parabolic at 0.
  static ContractionMap mp_left(double alpha);
  /// Right inverse branch y -> (y+1)/2 of the (mod 1) Manneville-Pomeau map.
  static ContractionMap mp_right(double alpha);
  /// x -> (sqrt(1+8x)-1)/4. Parabolic at 0.
  static ContractionMap sqrt_map();
  /// User-supplied value/derivative callables. sup_deriv, when known,
  /// makes hyperbolicity checks exact.
  static ContractionMap table(std::function<double(double)> value,
                              std::function<double(double)> derivative,
                              double holder_exponent,
                              std::optional<double> parabolic_point = {},
                              std::optional<double> sup_abs_deriv = {});

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  double deriv(double x) const;

  Kind kind() const { return kind_; }
  double holder_exponent() const { return holder_; }
  std::optional<double> parabolic_point() const { return parabolic_; }

  /// Exact sup over [0,1] of |h'| where the kind admits one, sampled
  /// otherwise.
  double max_abs_deriv() const;

  /// Unique fixed point in [0,1] (bisection on h(x)-x).
  double fixed_point() const;

  /// Parameters for serialization; meaningful fields depend on kind.
  double param_a() const { return a_; }
  double param_b() const { return b_; }

  std::string describe() const;

 private:
  ContractionMap() = default;

  Kind kind_ = Kind::affine;
  double a_ = 0.0;  // affine slope / MP alpha
  double b_ = 0.0;  // affine offset
  double holder_ = 1.0;
  std::optional<double> parabolic_;
  std::function<double(double)> table_value_;
  std::function<double(double)> table_deriv_;
  std::optional<double> table_sup_deriv_;
};

/// Inverts x + 2^alpha x^{1+alpha} = y on [0,1/2] to absolute error <= 1e-14
/// via safeguarded Newton with bisection fallback.
double mp_invert_left(double alpha, double y);

/// Forward Manneville-Pomeau map (left branch for x <= 1/2, 2x-1 above);
/// used by tests and the branch inversion oracle.
double mp_forward(double alpha, double x);

/// Value and derivative of h_{i1} o ... o h_{in} at x, derivative
/// accumulated along the orbit right to left.
struct ComposeResult {
  double value;
  double derivative;
};
ComposeResult compose_eval(std::span<const ContractionMap> maps, double x);
ComposeResult compose_eval(std::span<const ContractionMap* const> maps, double x);

/// Bracket of |composed derivative| over a sub-interval of [0,1].
/// lower/upper enclose every sampled value; exact for constant derivatives.
struct DerivBounds {
  double lower = 0.0;
  double upper = 1.0;
  double interval_lo = 0.0;
  double interval_hi = 1.0;
  int refinement_level = 0;
};

struct DerivRangeOptions {
  int grid = 64;
  int refinements = 2;
  double inflation = 1e-3;  // multiplicative slack on top of the modulus bound
};

DerivBounds derivative_range(std::span<const ContractionMap* const> maps,
                             double lo = 0.0, double hi = 1.0,
                             DerivRangeOptions opt = {});
DerivBounds derivative_range(std::span<const ContractionMap> maps,
                             double lo = 0.0, double hi = 1.0,
                             DerivRangeOptions opt = {});

/// max_{x,y in grid} |h'(x)/h'(y)| for the composed word; the empirical
/// distortion constant used by multiplicativity envelopes.
double empirical_distortion(std::span<const ContractionMap* const> maps, int grid = 64);

/// The point p fixed by every map of the word with |h'(p)| = 1, when one
/// exists. At such p the composed derivative is exactly 1; everywhere else
/// the word contracts strictly.
std::optional<double> common_parabolic_point(std::span<const ContractionMap* const> maps);

/// log |h_w([0,1])| robust to cancellation: tracks endpoints while the
/// interval is wide, then accumulates chain-rule stretches of the midpoint
/// orbit once direct subtraction would lose the digits.
double log_image_length(std::span<const ContractionMap* const> maps);

}  // namespace parafrac

#include <doctest.h>

#include <cmath>

#include "parafrac/config_io.hpp"
#include "parafrac/pressure.hpp"

using namespace parafrac;

namespace {

std::string cfg(const std::string& name) {
  return std::string(PARAFRAC_CONFIG_DIR) + "/" + name;
}

const double kLog23 = std::log(2.0) / std::log(3.0);

CantorSystem middle_third() {
  return CantorSystem({ContractionMap::affine(1.0 / 3, 0.0),
                       ContractionMap::affine(1.0 / 3, 2.0 / 3)});
}

CantorSystem two_half() {
  return CantorSystem({ContractionMap::affine(0.5, 0.0),
                       ContractionMap::affine(0.5, 0.5)});
}

SymbolicMeasure uniform2() {
  return SymbolicMeasure::bernoulli(BernoulliWeights({0.5, 0.5}));
}

}  // namespace

TEST_CASE("phi_singular closed forms") {
  CylinderGeom g;
  g.o1 = g.o2 = g.u1 = g.u2 = 0.5;
  g.longer_axis = Axis::x;

  // q=0, s=1: alpha1^t alpha2^{1-t} = 1/2 for any t
  CHECK(phi_singular(g, 0.25, 1.0, 0.0, 0.3, 0.8) == doctest::Approx(0.5));
  // q=1, s=0, t_f=t_g=0: phi = mass
  CHECK(phi_singular(g, 0.25, 0.0, 1.0, 0.0, 0.0) == doctest::Approx(0.25));

  // Bedford-McMullen level-1 cell at the exact box-dimension root
  CylinderGeom bm;
  bm.o1 = bm.u1 = 0.5;
  bm.o2 = bm.u2 = 1.0 / 3;
  bm.longer_axis = Axis::y;
  const double s = 1.0 + kLog23;
  const double phi = phi_singular(bm, 0.25, s, 0.0, 0.0, 1.0);
  CHECK(phi == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(4.0 * phi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("level pressure on affine systems") {
  const auto sys = two_half();
  const auto mu = uniform2();
  for (int n : {1, 3, 6}) {
    CHECK(level_pressure(sys, mu, 1.0, 0.0, n).value == doctest::Approx(1.0));
    CHECK(level_pressure(sys, mu, 0.0, 0.0, n).value == doctest::Approx(2.0));
    CHECK(level_pressure(sys, mu, 0.0, 1.0, n).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pressure decreases in s") {
  const auto c = load_config(cfg("mp_cantor_09.json"));
  const auto sys = build_cantor(c);
  const auto mu = uniform2();
  const auto table = tabulate_level(sys, mu, 6, AlphabetSpec::full(),
                                    Gauge::interval_length);
  double prev = 1e300;
  for (int i = 0; i <= 20; ++i) {
    const double s = -1.0 + 0.2 * i;
    const double v = level_sum(table, s, 0.5);
    CHECK(v <= prev + 1e-12);
    CHECK(v < prev);  // strict: every cylinder here has length < 1
    prev = v;
  }
}

TEST_CASE("gamma_root: middle-third oracle at several q") {
  const auto sys = middle_third();
  const auto mu = uniform2();
  RootOptions opt;
  opt.tol = 1e-10;
  for (double q : {0.0, 0.5, 1.0, 2.0}) {
    for (int level : {2, 5, 9}) {
      const double root = gamma_root(sys, mu, q, level, AlphabetSpec::full(),
                                     Gauge::interval_length, opt);
      CHECK(root == doctest::Approx((1.0 - q) * kLog23).epsilon(1e-8));
    }
  }
  // the sup gauge coincides for affine words
  CHECK(gamma_root(sys, mu, 2.0, 4, AlphabetSpec::full(), Gauge::deriv_sup, opt) ==
        doctest::Approx(-kLog23).epsilon(1e-8));
}

TEST_CASE("gamma_root: negative root for q=2 on the full-interval system") {
  const double root = gamma_root(two_half(), uniform2(), 2.0, 5);
  CHECK(root == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("gamma_root returns 0 at q=1 on every system and level") {
  for (const char* name : {"middle_third_cantor.json", "mp_cantor_05.json",
                           "mp_cantor_09.json"}) {
    const auto c = load_config(cfg(name));
    const auto sys = build_cantor(c);
    const auto mu = build_measure(c);
    for (int level : {1, 4, 8}) {
      CHECK(std::abs(gamma_root(sys, mu, 1.0, level)) <= 1e-8);
    }
  }
}

TEST_CASE("induced-mode roots: sandwich in N on the MP system") {
  const auto c = load_config(cfg("mp_cantor_09.json"));
  const auto sys = build_cantor(c);
  const auto mu = build_measure(c);
  double prev = -1e9;
  for (int N : {5, 10, 20, 30}) {
    const double root = gamma_root(sys, mu, 0.0, 2, AlphabetSpec::induced(N));
    CHECK(root >= prev - 1e-12);
    prev = root;
  }
  // attractor is the full interval: gamma(0) = 1
  CHECK(prev == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("full-alphabet parabolic pressure at q=0 has no sup-gauge root") {
  const auto c = load_config(cfg("mp_cantor_09.json"));
  const auto sys = build_cantor(c);
  // the L^n word keeps sup-norm near 1, but the interval-length gauge
  // tiles [0,1] and pins the root at exactly 1
  const double root = gamma_root(sys, build_measure(c), 0.0, 8);
  CHECK(root == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("beta_root: Bedford-McMullen oracle") {
  const auto c = load_config(cfg("bedford_mcmullen_2x3.json"));
  const auto sys = build_carpet(c);
  const auto mu = build_measure(c);
  RootOptions opt;
  opt.tol = 1e-9;

  const auto r0 = beta_root(sys, mu, 0.0, 6, AlphabetSpec::full(),
                            Gauge::interval_length, opt);
  CHECK(r0.beta == doctest::Approx(1.0 + kLog23).epsilon(1e-6));
  CHECK(r0.exponents.t_g == doctest::Approx(1.0).epsilon(1e-7));

  const auto r1 = beta_root(sys, mu, 1.0, 6, AlphabetSpec::full(),
                            Gauge::interval_length, opt);
  CHECK(std::abs(r1.beta) <= 1e-7);

  const auto r2 = beta_root(sys, mu, 2.0, 6, AlphabetSpec::full(),
                            Gauge::interval_length, opt);
  CHECK(r2.beta == doctest::Approx(-(1.0 + kLog23)).epsilon(1e-6));
  CHECK(r2.exponents.t_g == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("carpet pressure at the exact root is 1 at level 1") {
  const auto c = load_config(cfg("bedford_mcmullen_2x3.json"));
  const auto sys = build_carpet(c);
  const auto mu = build_measure(c);
  const double s = 1.0 + kLog23;
  const auto p = level_pressure(sys, mu, s, 0.0, 1, 1.0, 1.0, AlphabetSpec::full(),
                                Gauge::interval_length);
  CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));
  // monotonicity: +0.5 in s strictly shrinks the sum
  const auto p2 = level_pressure(sys, mu, s + 0.5, 0.0, 1, 1.0, 1.0,
                                 AlphabetSpec::full(), Gauge::interval_length);
  CHECK(p2.value < p.value);
}

TEST_CASE("parabolic carpet roots: q=1 vanishes and the box dimension is 2") {
  // both projections of the MP x tripling carpet tile [0,1], so the
  // attractor is the full square
  const auto c = load_config(cfg("figure1_left.json"));
  const auto sys = build_carpet(c);
  const auto mu = build_measure(c);
  RootOptions opt;
  opt.tol = 1e-9;

  const auto r1 = beta_root(sys, mu, 1.0, 5, AlphabetSpec::full(),
                            Gauge::interval_length, opt);
  CHECK(std::abs(r1.beta) <= 1e-6);

  // the attractor tiles the square, so beta(0) = 2; the root inherits the
  // truncation bias of the induced projection exponents (~1e-2)
  const auto r0 = beta_root(sys, mu, 0.0, 5, AlphabetSpec::full(),
                            Gauge::interval_length, opt);
  CHECK(r0.beta == doctest::Approx(2.0).epsilon(0.02));
  CHECK(r0.exponents.t_f == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r0.exponents.t_g == doctest::Approx(1.0).epsilon(0.02));

  // with the exact projection exponents the level-5 pressure sum sits at 1
  const auto t = tabulate_level(sys, mu, 5, AlphabetSpec::full(),
                                Gauge::interval_length);
  CHECK(level_sum(t, 2.0, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zeta partial sums flag convergence across the root") {
  const auto sys = middle_third();
  const auto mu = uniform2();
  const double root = kLog23;

  const auto conv = zeta_partial(sys, mu, root + 0.1, 0.0, 10);
  CHECK_FALSE(conv.divergent);
  CHECK(conv.mean_tail_ratio == doctest::Approx(2.0 * std::pow(3.0, -root - 0.1)).epsilon(1e-9));

  const auto div = zeta_partial(sys, mu, root - 0.1, 0.0, 10);
  CHECK(div.divergent);

  // q=1, s=0: terms identically one
  const auto ones = zeta_partial(sys, mu, 0.0, 1.0, 8);
  CHECK(ones.divergent);
  for (double t : ones.level_terms) CHECK(t == doctest::Approx(1.0));
}

TEST_CASE("pressure bound checks: P(1,q) on Cantor systems") {
  for (const char* name : {"middle_third_cantor.json", "two_half_interval.json",
                           "mp_cantor_05.json", "mp_cantor_09.json"}) {
    const auto c = load_config(cfg(name));
    const auto rep = pressure_bound_checks(build_cantor(c), build_measure(c),
                                           {0.0, 1.0, 2.0});
    CHECK(rep.all_pass());
  }
  // middle-third at q=0: the level-1 sum of lengths is 2/3
  const auto rep1 = pressure_bound_checks(middle_third(), uniform2(), {0.0}, 2);
  CHECK(rep1.rows[0].value == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("pressure bound checks: P(2,q) on carpets") {
  for (const char* name : {"bedford_mcmullen_2x3.json", "figure1_left.json",
                           "figure1_centre.json", "figure1_right.json"}) {
    const auto c = load_config(cfg(name));
    const auto rep = pressure_bound_checks(build_carpet(c), build_measure(c),
                                           {0.0, 1.0, 2.0}, 1 << 12);
    CHECK(rep.all_pass());
  }
  // Bedford-McMullen area sum at level 1 is 4/6
  const auto c = load_config(cfg("bedford_mcmullen_2x3.json"));
  const auto rep = pressure_bound_checks(build_carpet(c), build_measure(c), {0.0}, 4);
  CHECK(rep.rows[0].value == doctest::Approx(4.0 / 6).epsilon(1e-9));
}

TEST_CASE("multiplicativity on a strictly affine carpet") {
  const auto c = load_config(cfg("bedford_mcmullen_2x3.json"));
  const auto sys = build_carpet(c);
  const auto mu = build_measure(c);
  const auto te = projection_exponents(sys, mu, 0.0);

  // s below t_f + t_g: submultiplicative within 1+1e-9
  const auto sub = multiplicativity_check(sys, mu, te.t_f + te.t_g - 0.5, 0.0,
                                          te.t_f, te.t_g, 200);
  CHECK(sub.ok());
  CHECK(sub.max_ratio <= 1.0 + 1e-9);

  // s above: supermultiplicative
  const auto super = multiplicativity_check(sys, mu, te.t_f + te.t_g + 0.5, 0.0,
                                            te.t_f, te.t_g, 200);
  CHECK(super.ok());
  CHECK(super.min_ratio >= 1.0 - 1e-9);

  // s at the crossover: exact multiplicativity up to axis switches
  const auto at = multiplicativity_check(sys, mu, te.t_f + te.t_g, 0.0, te.t_f,
                                         te.t_g, 200);
  CHECK(at.ok());
}

TEST_CASE("multiplicativity envelope on an MP-based carpet") {
  const auto c = load_config(cfg("figure1_left.json"));
  const auto sys = build_carpet(c);
  const auto mu = build_measure(c);
  const auto te = projection_exponents(sys, mu, 2.0);
  const auto rep =
      multiplicativity_check(sys, mu, 1.2, 2.0, te.t_f, te.t_g, 150);
  CHECK(rep.ok());
}

TEST_CASE("spectrum curve: non-increasing, convex, zero at q=1") {
  SpectrumOptions opt;
  opt.level = 6;

  const auto c = load_config(cfg("middle_third_cantor.json"));
  const auto curve = spectrum_curve(build_cantor(c), build_measure(c), opt);
  REQUIRE(curve.points.size() == 13);

  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    CHECK_FALSE(curve.points[i].failed);
    CHECK(curve.points[i + 1].tau <= curve.points[i].tau + 1e-9);
  }
  for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
    const double second_diff = curve.points[i + 1].tau - 2.0 * curve.points[i].tau +
                               curve.points[i - 1].tau;
    CHECK(second_diff >= -1e-6);
  }
  for (const auto& p : curve.points) {
    if (p.q == 1.0) CHECK(std::abs(p.tau) <= 1e-7);
    CHECK(p.tau == doctest::Approx((1.0 - p.q) * kLog23).epsilon(1e-7));
  }
}

TEST_CASE("spectrum curve with induced mode reports gaps") {
  const auto c = load_config(cfg("mp_cantor_09.json"));
  SpectrumOptions opt;
  opt.qs = {0.0, 1.0, 2.0};
  opt.induced_N = 20;
  opt.level = 0;
  opt.budget = 1 << 16;
  const auto curve = spectrum_curve(build_cantor(c), build_measure(c), opt);
  for (const auto& p : curve.points) {
    CHECK_FALSE(p.failed);
    CHECK(p.mode == "induced(20)");
    CHECK(p.gap.has_value());
  }
}

TEST_CASE("default level respects the budget") {
  CHECK(default_level(2, 1 << 10) == 10);
  CHECK(default_level(4, 1 << 10) == 5);
  CHECK(default_level(6, 100) == 2);
  CHECK(default_level(10, 5) == 1);
}

TEST_CASE("capacity errors surface as capacity_error") {
  const auto sys = middle_third();
  const auto mu = uniform2();
  CHECK_THROWS_AS(tabulate_level(sys, mu, 40, AlphabetSpec::full(),
                                 Gauge::interval_length, 1000),
                  capacity_error);
}

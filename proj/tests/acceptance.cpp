// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "parafrac/cli.hpp"
#include "parafrac/config_io.hpp"
#include "parafrac/empirical.hpp"
#include "parafrac/pressure.hpp"
#include "parafrac/rng.hpp"

using namespace parafrac;

namespace {

const double kLog23 = std::log(2.0) / std::log(3.0);

std::string cfg(const std::string& name) {
  return std::string(PARAFRAC_CONFIG_DIR) + "/" + name;
}

struct Checker {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +/- " << tol;
      failures.push_back(os.str());
    }
  }
};

int cli_run(const std::vector<std::string>& raw, std::string* out_text = nullptr) {
  std::vector<std::string> args = raw;
  args.insert(args.begin(), "parafrac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      parafrac::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --------------------------------------------------------------------------

void criterion1_cantor_oracle(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto conf = load_config(cfg("middle_third_cantor.json"));
  const auto sys = build_cantor(conf);
  const auto mu = build_measure(conf);
  RootOptions opt;
  opt.tol = 1e-9;
  for (double q : {0.0, 0.5, 1.0, 2.0}) {
    const double root = gamma_root(sys, mu, q, 8, AlphabetSpec::full(),
                                   Gauge::interval_length, opt);
    c.require_close(root, (1.0 - q) * kLog23, 1e-6, "gamma(q=" + std::to_string(q) + ")");
  }
  c.require(elapsed_s(t0) < 1.0, "runtime under 1 s");
}

void criterion2_carpet_oracle(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto conf = load_config(cfg("bedford_mcmullen_2x3.json"));
  const auto sys = build_carpet(conf);
  const auto mu = build_measure(conf);
  RootOptions opt;
  opt.tol = 1e-9;
  const double want = 1.0 + kLog23;
  const double tols[] = {1e-3, 1e-6, 1e-2};
  const double wants[] = {want, 0.0, -want};
  const double qs[] = {0.0, 1.0, 2.0};
  for (int i = 0; i < 3; ++i) {
    const auto r = beta_root(sys, mu, qs[i], 8, AlphabetSpec::full(),
                             Gauge::interval_length, opt);
    c.require_close(r.beta, wants[i], tols[i], "beta(q=" + std::to_string(qs[i]) + ")");
  }
  c.require(elapsed_s(t0) < 30.0, "runtime under 30 s");
}

void criterion3_compare(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  c.require(cli_run({"compare", cfg("middle_third_cantor.json"), "--q", "0,1,2",
                     "--delta", "3^-3..3^-7", "--ctol", "0.05"}) == 0,
            "cmd_compare on the middle-third Cantor oracle");
  c.require(cli_run({"compare", cfg("bedford_mcmullen_2x3.json"), "--q", "0,1,2",
                     "--delta", "3^-4..3^-8", "--ctol", "0.05"}) == 0,
            "cmd_compare on the Bedford-McMullen oracle");
  c.require(elapsed_s(t0) < 120.0, "runtime under 2 min");
}

void criterion4_parabolic_roots(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto conf = load_config(cfg("mp_cantor_09.json"));
  const auto sys = build_cantor(conf);
  const auto mu = build_measure(conf);

  const double box = gamma_root(sys, mu, 0.0, 3, AlphabetSpec::induced(30));
  c.require_close(box, 1.0, 0.05, "induced-mode gamma(0), N=30");

  for (int level : {1, 4, 8, 12}) {
    const double zero = gamma_root(sys, mu, 1.0, level);
    c.require(std::abs(zero) <= 1e-6,
              "gamma(1) = 0 at level " + std::to_string(level));
  }
  c.require(elapsed_s(t0) < 120.0, "runtime under 2 min");
}

void criterion5_parabolic_diagnostic(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto conf = load_config(cfg("mp_cantor_09.json"));
  const auto sys = build_cantor(conf);
  const auto mu = build_measure(conf);
  const auto tr = local_exponent_trace(sys, mu, 0, {50, 100, 200, 400});
  for (std::size_t i = 1; i < tr.exponents.size(); ++i) {
    c.require(tr.exponents[i] > tr.exponents[i - 1], "exponents strictly increasing");
  }
  c.require(tr.exponents[2] > 10.0, "exponent exceeds 10 by n=200");
  c.require(elapsed_s(t0) < 1.0, "runtime under 1 s");
}

void criterion6_pressure_bounds(Checker& c) {
  const std::vector<double> qs = {0.0, 1.0, 2.0};
  for (const char* name : {"middle_third_cantor.json", "two_half_interval.json",
                           "mp_cantor_05.json", "mp_cantor_09.json"}) {
    const auto conf = load_config(cfg(name));
    const auto rep = pressure_bound_checks(build_cantor(conf), build_measure(conf), qs);
    for (const auto& row : rep.rows) {
      c.require(row.pass, std::string("P(1,q) <= 1+5e-3 on ") + name +
                              " at q=" + std::to_string(row.q) +
                              " (value " + std::to_string(row.value) + ")");
    }
  }
  for (const char* name : {"bedford_mcmullen_2x3.json", "figure1_left.json",
                           "figure1_centre.json", "figure1_right.json"}) {
    const auto conf = load_config(cfg(name));
    const auto rep = pressure_bound_checks(build_carpet(conf), build_measure(conf), qs,
                                           1 << 12);
    for (const auto& row : rep.rows) {
      c.require(row.pass, std::string("P(2,q) <= 1+5e-3 on ") + name +
                              " at q=" + std::to_string(row.q) +
                              " (value " + std::to_string(row.value) + ")");
    }
  }
}

void criterion7_invariants(Checker& c) {
  // curve monotonicity and convexity on both oracles
  for (const char* name : {"middle_third_cantor.json", "bedford_mcmullen_2x3.json"}) {
    const auto conf = load_config(cfg(name));
    SpectrumOptions opt;
    opt.level = 5;
    const SpectrumCurve curve =
        conf.is_carpet()
            ? spectrum_curve(build_carpet(conf), build_measure(conf), opt)
            : spectrum_curve(build_cantor(conf), build_measure(conf), opt);
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
      c.require(!curve.points[i].failed, "curve point computed");
      c.require(curve.points[i + 1].tau <= curve.points[i].tau + 1e-9,
                std::string("tau non-increasing on ") + name);
    }
    for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
      const double dd = curve.points[i + 1].tau - 2.0 * curve.points[i].tau +
                        curve.points[i - 1].tau;
      c.require(dd >= -1e-6, std::string("tau convex on ") + name);
    }
    for (const auto& p : curve.points) {
      if (p.q == 1.0) c.require(std::abs(p.tau) <= 1e-6, "tau(1) = 0");
    }
  }

  // root sandwich on the MP system
  {
    const auto conf = load_config(cfg("mp_cantor_09.json"));
    const auto sys = build_cantor(conf);
    const auto mu = build_measure(conf);
    double prev = -1e30;
    for (int N : {5, 10, 20, 30}) {
      const double r = gamma_root(sys, mu, 0.0, 2, AlphabetSpec::induced(N));
      c.require(r >= prev - 1e-12, "induced roots non-decreasing in N");
      prev = r;
    }
    const double full = gamma_root(sys, mu, 0.0, 10, AlphabetSpec::full());
    c.require(prev <= full + 0.02, "induced roots bounded by full root + 0.02");
  }

  // chain rule vs central finite differences, 100 random words
  {
    const std::vector<ContractionMap> pool = {
        ContractionMap::affine(0.5, 0.0), ContractionMap::affine(1.0 / 3, 2.0 / 3),
        ContractionMap::mp_left(0.9), ContractionMap::mp_right(0.9),
        ContractionMap::sqrt_map()};
    CounterRng rng(1313);
    for (int t = 0; t < 100; ++t) {
      std::vector<ContractionMap> word;
      const std::size_t len = 1 + rng.below(8);
      for (std::size_t i = 0; i < len; ++i) word.push_back(pool[rng.below(pool.size())]);
      const double x = 0.05 + 0.9 * rng.uniform();
      const double d = compose_eval(word, x).derivative;
      const double h = 1e-6;
      const double fd =
          (compose_eval(word, x + h).value - compose_eval(word, x - h).value) / (2 * h);
      c.require(std::abs(d - fd) <= 1e-5 * std::max(std::abs(fd), 1e-10),
                "chain rule within 1e-5 of finite differences");
    }
  }

  // stopping-set mass conservation at 1e-12
  {
    const auto conf = load_config(cfg("mp_cantor_09.json"));
    const auto sys = build_cantor(conf);
    const auto mu = build_measure(conf);
    const auto stop =
        delta_stopping(stopping_problem(sys, mu, AlphabetSpec::full()), 0.05, 5000);
    double total = stop.truncated_mass;
    for (const auto& e : stop.entries) total += e.mass;
    c.require(std::abs(total - 1.0) <= 1e-12, "stopping-set mass conservation");
  }

  // induced alphabets prefix-free and matching brute force for N <= 6
  for (std::size_t k : {2u, 3u}) {
    for (int N = 1; N <= 6; ++N) {
      const auto ia = induced_alphabet(k, 0, N);
      std::size_t expected = 0, lvl = 1;
      for (int m = 0; m < N; ++m) {
        expected += lvl;
        lvl *= k - 1;
      }
      c.require(ia.entries.size() == expected, "induced count formula");
      for (std::size_t i = 0; i < ia.entries.size(); ++i) {
        for (std::size_t j = 0; j < ia.entries.size(); ++j) {
          if (i != j) {
            c.require(!is_prefix(ia.entries[i], ia.entries[j]),
                      "induced alphabet prefix-free");
          }
        }
      }
    }
  }
}

void criterion8_zeta_root_consistency(Checker& c) {
  {
    const auto conf = load_config(cfg("middle_third_cantor.json"));
    const auto sys = build_cantor(conf);
    const auto mu = build_measure(conf);
    for (double q : {0.0, 2.0}) {
      const double root = gamma_root(sys, mu, q, 8);
      const auto above = zeta_partial(sys, mu, root + 0.05, q, 10);
      const auto below = zeta_partial(sys, mu, root - 0.05, q, 10);
      c.require(!above.divergent, "cantor zeta convergent above the root");
      c.require(below.divergent, "cantor zeta divergent below the root");
    }
  }
  {
    const auto conf = load_config(cfg("bedford_mcmullen_2x3.json"));
    const auto sys = build_carpet(conf);
    const auto mu = build_measure(conf);
    for (double q : {0.0, 2.0}) {
      const auto r = beta_root(sys, mu, q, 6);
      const auto above = zeta_partial(sys, mu, r.beta + 0.05, q, 8, r.exponents.t_f,
                                      r.exponents.t_g);
      const auto below = zeta_partial(sys, mu, r.beta - 0.05, q, 8, r.exponents.t_f,
                                      r.exponents.t_g);
      c.require(!above.divergent, "carpet zeta convergent above the root");
      c.require(below.divergent, "carpet zeta divergent below the root");
    }
  }
}

void criterion9_determinism(Checker& c) {
  std::string a, b;
  const std::vector<std::string> spectrum_args = {
      "spectrum", cfg("mp_cantor_09.json"), "--q", "0,1,2", "--induced", "20",
      "--seed", "99"};
  c.require(cli_run(spectrum_args, &a) == 0, "cmd_spectrum runs");
  c.require(cli_run(spectrum_args, &b) == 0, "cmd_spectrum reruns");
  c.require(a == b && !a.empty(), "cmd_spectrum byte-identical CSV");

  const std::vector<std::string> moment_args = {
      "moments", cfg("bedford_mcmullen_2x3.json"), "--q", "0,1,2",
      "--delta", "3^-3..3^-5", "--estimator", "chaos", "--seed", "99"};
  c.require(cli_run(moment_args, &a) == 0, "cmd_moments runs");
  c.require(cli_run(moment_args, &b) == 0, "cmd_moments reruns");
  c.require(a == b && !a.empty(), "cmd_moments byte-identical CSV");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<void(Checker&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "hyperbolic Cantor oracle (middle-third gamma roots)", criterion1_cantor_oracle},
      {2, "Bedford-McMullen carpet oracle (beta roots)", criterion2_carpet_oracle},
      {3, "tau = gamma / tau = beta via cmd_compare at tol 0.05", criterion3_compare},
      {4, "parabolic Cantor roots (MP alpha=0.9)", criterion4_parabolic_roots},
      {5, "parabolic local-exponent diagnostic", criterion5_parabolic_diagnostic},
      {6, "pressure bound lemmas on all bundled configs", criterion6_pressure_bounds},
      {7, "invariant suites", criterion7_invariants},
      {8, "zeta/root consistency", criterion8_zeta_root_consistency},
      {9, "determinism of spectrum and moments CSV", criterion9_determinism},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    if (c.failures.empty()) {
      std::cout << "PASS criterion " << cr.id << ": " << cr.name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL criterion " << cr.id << ": " << cr.name << "\n";
      for (const auto& f : c.failures) std::cout << "    - " << f << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}

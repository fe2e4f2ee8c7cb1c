#include "parafrac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parafrac/config_io.hpp"
#include "parafrac/empirical.hpp"
#include "parafrac/pressure.hpp"
#include "parafrac/render.hpp"

namespace parafrac::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// "3^-3..3^-7" expands to the powers 3^-3 .. 3^-7; otherwise a comma list.
std::vector<double> parse_deltas(const std::string& s) {
  const auto caret = s.find("^-");
  const auto dots = s.find("..");
  if (caret != std::string::npos && dots != std::string::npos) {
    const double base = std::stod(s.substr(0, caret));
    const int lo = std::stoi(s.substr(caret + 2, dots - caret - 2));
    const auto caret2 = s.find("^-", dots);
    if (caret2 == std::string::npos) throw std::invalid_argument("bad delta range");
    const int hi = std::stoi(s.substr(caret2 + 2));
    std::vector<double> out;
    for (int e = lo; e <= hi; ++e) out.push_back(std::pow(base, -e));
    return out;
  }
  return parse_list(s);
}

struct CommonOptions {
  std::string config_path;
  std::string q_list;
  std::string delta_list;
  int level = 0;
  int induced_N = 0;
  double tol = 0.0;
  std::string estimator = "pushforward";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  double budget_scale = 1.0;
  std::string out_path;
  std::string gauge = "length";
};

Gauge parse_gauge(const std::string& g) {
  if (g == "length") return Gauge::interval_length;
  if (g == "sup") return Gauge::deriv_sup;
  throw std::invalid_argument("--gauge must be 'length' or 'sup'");
}

struct Loaded {
  SystemConfig cfg;
  std::optional<CantorSystem> cantor;
  std::optional<CarpetSystem> carpet;
  std::optional<SymbolicMeasure> measure;
  std::size_t budget = 0;
  int depth_cap = 0;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

Loaded load(const CommonOptions& opt) {
  Loaded L;
  L.cfg = load_config(opt.config_path);
  if (L.cfg.is_carpet()) {
    L.carpet = build_carpet(L.cfg);
  } else {
    L.cantor = build_cantor(L.cfg);
  }
  L.measure = build_measure(L.cfg);
  L.budget = static_cast<std::size_t>(
      std::max(1.0, L.cfg.budgets.enumeration * opt.budget_scale));
  L.depth_cap = std::max(1, static_cast<int>(L.cfg.budgets.depth_cap * opt.budget_scale));
  L.tol = opt.tol > 0.0 ? opt.tol : L.cfg.budgets.tol;
  L.seed = opt.seed_set ? opt.seed : L.cfg.seed;
  return L;
}

// Root budgets: level sums get a slice of the enumeration budget so default
// levels stay interactive.
std::size_t root_word_budget(const Loaded& L) {
  return std::min<std::size_t>(L.budget, 1 << 20);
}

std::vector<double> qs_or_default(const CommonOptions& opt,
                                  std::vector<double> fallback) {
  if (!opt.q_list.empty()) return parse_list(opt.q_list);
  return fallback;
}

class OutSink {
 public:
  OutSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

// ---------------------------------------------------------------------------

int cmd_validate(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  const Loaded L = load(opt);
  ValidationReport rep =
      L.carpet ? validate(*L.carpet) : validate(*L.cantor);

  bool all_pass = rep.all_pass();
  out << "check,status,message\n";
  for (const auto& c : rep.checks) {
    out << c.axiom << "," << (c.pass ? "pass" : "FAIL") << "," << c.message << "\n";
  }

  try {
    const Word i0 = L.carpet ? find_hyperbolic_index(*L.carpet)
                             : find_hyperbolic_index(*L.cantor);
    out << "hyperbolic_index,pass,i0=" << word_to_string(i0) << "\n";

    if (L.cantor) {
      const int N = adapted_induced_N(L.cantor->size(), 64, 4096);
      const auto rep_sum =
          check_summability(*L.cantor, i0, N, L.cantor->holder_exponent());
      out << "summability,"
          << (rep_sum.flagged_slow ? "FAIL" : "pass") << ",sum@N=" << rep_sum.cutoffs.back()
          << "=" << fmt(rep_sum.partial_sums.back())
          << " window_ratio=" << fmt(rep_sum.last_window_ratio) << "\n";
      all_pass = all_pass && !rep_sum.flagged_slow;
    } else {
      for (Axis axis : {Axis::x, Axis::y}) {
        const auto proj = project(*L.carpet, *L.measure, axis);
        const Word pi0 = find_hyperbolic_index(proj.system);
        if (pi0.size() != 1) continue;
        const int N = adapted_induced_N(proj.system.size(), 64, 4096);
        const auto rep_sum =
            check_summability(proj.system, pi0, N, proj.system.holder_exponent());
        out << "summability_" << (axis == Axis::x ? "x" : "y") << ","
            << (rep_sum.flagged_slow ? "FAIL" : "pass")
            << ",window_ratio=" << fmt(rep_sum.last_window_ratio) << "\n";
        all_pass = all_pass && !rep_sum.flagged_slow;
      }
    }
  } catch (const std::exception& e) {
    out << "hyperbolic_index,FAIL," << e.what() << "\n";
    all_pass = false;
  }

  if (!all_pass) {
    err << "validation failed\n";
    return 1;
  }
  return 0;
}

int cmd_spectrum(const CommonOptions& opt, std::ostream& rawout, std::ostream& err) {
  const Loaded L = load(opt);
  OutSink sink(opt.out_path, rawout);
  std::ostream& out = sink.stream();

  SpectrumOptions sopt;
  sopt.qs = qs_or_default(opt, default_q_grid());
  sopt.level = opt.level;
  if (opt.induced_N > 0) sopt.induced_N = opt.induced_N;
  sopt.gauge = parse_gauge(opt.gauge);
  sopt.tol = L.tol;
  sopt.budget = root_word_budget(L);

  const SpectrumCurve curve = L.carpet ? spectrum_curve(*L.carpet, *L.measure, sopt)
                                       : spectrum_curve(*L.cantor, *L.measure, sopt);

  out << "q,tau,method,level,mode,gap,note\n";
  bool any_failed = false;
  for (const auto& p : curve.points) {
    if (p.failed) {
      any_failed = true;
      err << "q=" << fmt(p.q) << ": " << p.error << "\n";
      continue;
    }
    out << fmt(p.q) << "," << fmt(p.tau) << "," << curve.method << "," << p.level
        << "," << p.mode << "," << (p.gap ? fmt(*p.gap) : std::string()) << ","
        << (p.q == 0.0 ? "box_dim" : "") << "\n";
  }

  // Informational only: central-difference Hausdorff-dimension estimate at q=1.
  const auto& pts = curve.points;
  for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
    if (pts[i].failed || pts[i + 1].failed || pts[i + 2].failed) continue;
    if (std::abs(pts[i + 1].q - 1.0) < 1e-12 &&
        std::abs((pts[i + 2].q - pts[i].q) - (pts[i + 2].q - pts[i + 1].q) * 2) < 1e-9) {
      const double slope = (pts[i + 2].tau - pts[i].tau) / (pts[i + 2].q - pts[i].q);
      out << "# dim_estimate_minus_tau_prime_1," << fmt(-slope) << "\n";
      break;
    }
  }
  return any_failed ? 1 : 0;
}

int cmd_moments(const CommonOptions& opt, std::ostream& rawout, std::ostream& err) {
  const Loaded L = load(opt);
  OutSink sink(opt.out_path, rawout);
  std::ostream& out = sink.stream();

  const std::vector<double> qs = qs_or_default(opt, {0.0, 1.0, 2.0});
  std::vector<double> deltas;
  if (!opt.delta_list.empty()) {
    deltas = parse_deltas(opt.delta_list);
  } else {
    deltas = L.carpet ? parse_deltas("3^-4..3^-8") : parse_deltas("3^-3..3^-7");
  }

  out << "delta,q,D,estimator,truncated_mass\n";
  bool any_failed = false;
  for (double delta : deltas) {
    try {
      GridMoments gm;
      if (opt.estimator == "chaos") {
        ChaosOptions copt;
        copt.seed = L.seed;
        copt.threads = opt.threads;
        const std::size_t points = 1'000'000;
        gm = L.carpet ? grid_moments_chaos(*L.carpet, *L.measure, delta, qs, points, copt)
                      : grid_moments_chaos(*L.cantor, *L.measure, delta, qs, points, copt);
      } else {
        MomentOptions mopt;
        mopt.depth_cap = L.depth_cap;
        mopt.budget = L.budget;
        if (opt.induced_N > 0) mopt.mode = AlphabetSpec::induced(opt.induced_N);
        gm = L.carpet ? grid_moments_pushforward(*L.carpet, *L.measure, delta, qs, mopt)
                      : grid_moments_pushforward(*L.cantor, *L.measure, delta, qs, mopt);
        if (gm.truncation_warning) {
          err << "warning: truncated mass " << fmt(gm.truncated_mass) << " at delta="
              << fmt(delta) << "\n";
        }
      }
      for (std::size_t i = 0; i < qs.size(); ++i) {
        out << fmt(delta) << "," << fmt(qs[i]) << "," << fmt(gm.D[i]) << ","
            << gm.estimator << "," << fmt(gm.truncated_mass) << "\n";
      }
    } catch (const std::exception& e) {
      any_failed = true;
      err << "delta=" << fmt(delta) << ": " << e.what() << "\n";
    }
  }
  return any_failed ? 1 : 0;
}

int cmd_compare(const CommonOptions& opt, double compare_tol, std::ostream& rawout,
                std::ostream& err) {
  const Loaded L = load(opt);
  OutSink sink(opt.out_path, rawout);
  std::ostream& out = sink.stream();

  const std::vector<double> qs = qs_or_default(opt, {0.0, 1.0, 2.0});
  std::vector<double> deltas;
  if (!opt.delta_list.empty()) {
    deltas = parse_deltas(opt.delta_list);
  } else {
    deltas = L.carpet ? parse_deltas("3^-4..3^-8") : parse_deltas("3^-3..3^-7");
  }

  MomentOptions mopt;
  mopt.depth_cap = L.depth_cap;
  mopt.budget = L.budget;
  std::vector<GridMoments> moments;
  for (double delta : deltas) {
    moments.push_back(L.carpet
                          ? grid_moments_pushforward(*L.carpet, *L.measure, delta, qs, mopt)
                          : grid_moments_pushforward(*L.cantor, *L.measure, delta, qs, mopt));
  }

  RootOptions ropt;
  ropt.tol = L.tol;
  const Gauge gauge = parse_gauge(opt.gauge);
  const std::size_t budget = root_word_budget(L);

  // one tabulation serves every q
  std::optional<LevelTable> table;
  std::optional<ProjectionSolver> projections;
  if (L.carpet) {
    const int level =
        opt.level > 0 ? opt.level : default_level(L.carpet->size(), budget);
    table = tabulate_level(*L.carpet, *L.measure, level, AlphabetSpec::full(),
                           gauge, budget);
    projections.emplace(*L.carpet, *L.measure, ropt.tol / 10.0);
  } else {
    const int level =
        opt.level > 0 ? opt.level : default_level(L.cantor->size(), budget);
    AlphabetSpec mode = AlphabetSpec::full();
    if (opt.induced_N > 0) mode = AlphabetSpec::induced(opt.induced_N);
    table = tabulate_level(*L.cantor, *L.measure, level, mode, gauge, budget);
  }

  out << "q,root,empirical,abs_diff,status\n";
  bool all_pass = true;
  for (double q : qs) {
    double root;
    if (L.carpet) {
      const ProjectionExponents te = projections->at(q);
      root = root_from_table(*table, q, te.t_f, te.t_g, ropt);
    } else {
      root = root_from_table(*table, q, 0.0, 0.0, ropt);
    }
    const TauFit fit = empirical_tau(moments, q);
    const double diff = std::abs(root - fit.slope);
    const bool pass = diff <= compare_tol;
    all_pass = all_pass && pass;
    out << fmt(q) << "," << fmt(root) << "," << fmt(fit.slope) << "," << fmt(diff)
        << "," << (pass ? "pass" : "FAIL") << "\n";
  }
  if (!all_pass) {
    err << "compare: tolerance " << fmt(compare_tol) << " exceeded\n";
    return 1;
  }
  return 0;
}

int cmd_render(const CommonOptions& opt, const std::string& mode, int width,
               int height, int render_level, std::size_t samples,
               const std::string& format, std::ostream& out, std::ostream& err) {
  const Loaded L = load(opt);
  if (!L.carpet) {
    err << "render needs a carpet config\n";
    return 2;
  }
  Image8 img(16, 16);
  if (mode == "cylinders") {
    img = render_cylinders(*L.carpet, render_level, width, height, L.budget);
  } else if (mode == "density") {
    DensitySpec spec;
    spec.samples = samples;
    spec.chaos.seed = L.seed;
    spec.chaos.threads = opt.threads;
    img = render_density(*L.carpet, *L.measure, width, height, spec);
  } else {
    err << "--mode must be cylinders or density\n";
    return 2;
  }

  const std::string path =
      opt.out_path.empty() ? ("render." + format) : opt.out_path;
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "cannot open " << path << "\n";
    return 2;
  }
  if (format == "ppm") {
    write_ppm(img, file);
  } else {
    write_pgm(img, file);
  }
  out << "wrote " << path << " (" << width << "x" << height << ")\n";
  return 0;
}

int cmd_diagnose_parabolic(const CommonOptions& opt, const std::string& depth_list,
                           std::ostream& rawout, std::ostream& err) {
  const Loaded L = load(opt);
  if (!L.cantor) {
    err << "diagnose-parabolic needs a cantor config\n";
    return 2;
  }
  std::optional<Symbol> parabolic;
  for (std::size_t s = 0; s < L.cantor->size(); ++s) {
    if (L.cantor->map(static_cast<Symbol>(s)).parabolic_point()) {
      parabolic = static_cast<Symbol>(s);
      break;
    }
  }
  if (!parabolic) {
    err << "no declared parabolic symbol in this config\n";
    return 1;
  }

  std::vector<int> depths;
  for (double d : parse_list(depth_list.empty() ? "50,100,200,400" : depth_list)) {
    depths.push_back(static_cast<int>(d));
  }
  const LocalExponentTrace tr =
      local_exponent_trace(*L.cantor, *L.measure, *parabolic, depths);

  OutSink sink(opt.out_path, rawout);
  std::ostream& out = sink.stream();
  out << "n,radius,exponent\n";
  double max_exp = 0.0;
  for (std::size_t i = 0; i < tr.depths.size(); ++i) {
    out << tr.depths[i] << "," << fmt(tr.radii[i]) << "," << fmt(tr.exponents[i])
        << "\n";
    max_exp = std::max(max_exp, tr.exponents[i]);
  }
  out << "# max_exponent," << fmt(max_exp) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"parafrac: L^q-spectra, box dimensions and multifractal "
               "diagnostics for parabolic Cantor sets and carpets"};
  app.require_subcommand(1);

  CommonOptions opt;
  double compare_tol = 0.05;
  std::string render_mode = "cylinders", render_format = "pgm";
  int width = 512, height = 512, render_level = 3;
  std::size_t samples = 1'000'000;
  std::string depth_list;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config) {
      cmd->add_option("config", opt.config_path, "system config (JSON)")->required();
    }
    cmd->add_option("--q", opt.q_list, "comma-separated q grid");
    cmd->add_option("--delta", opt.delta_list,
                    "comma list or range like 3^-3..3^-7");
    cmd->add_option("--level", opt.level, "pressure level / block level");
    cmd->add_option("--induced", opt.induced_N, "induced alphabet cutoff N");
    cmd->add_option("--tol", opt.tol, "bisection tolerance");
    cmd->add_option("--estimator", opt.estimator, "pushforward | chaos");
    cmd->add_option("--seed", opt.seed, "RNG seed")->each([&](const std::string&) {
      opt.seed_set = true;
    });
    cmd->add_option("--threads", opt.threads, "worker threads (chaos game)");
    cmd->add_option("--budget", opt.budget_scale,
                    "scale factor on all enumeration caps");
    cmd->add_option("--out", opt.out_path, "output file (default stdout)");
    cmd->add_option("--gauge", opt.gauge, "pressure gauge: length | sup");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check axioms A1-A3");
  add_common(validate_cmd);
  CLI::App* spectrum_cmd =
      app.add_subcommand("spectrum", "pressure-root L^q spectrum (CSV)");
  add_common(spectrum_cmd);
  CLI::App* moments_cmd = app.add_subcommand("moments", "grid moment sums (CSV)");
  add_common(moments_cmd);
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "pressure roots vs empirical slopes");
  add_common(compare_cmd);
  compare_cmd->add_option("--ctol", compare_tol, "pass/fail tolerance");
  CLI::App* render_cmd = app.add_subcommand("render", "rasterize a carpet");
  add_common(render_cmd);
  render_cmd->add_option("--mode", render_mode, "cylinders | density");
  render_cmd->add_option("--width", width, "pixels");
  render_cmd->add_option("--height", height, "pixels");
  render_cmd->add_option("--render-level", render_level, "cylinder level");
  render_cmd->add_option("--samples", samples, "density samples");
  render_cmd->add_option("--format", render_format, "pgm | ppm");
  CLI::App* diagnose_cmd = app.add_subcommand(
      "diagnose-parabolic", "local exponent trace at the parabolic symbol");
  add_common(diagnose_cmd);
  diagnose_cmd->add_option("--depths", depth_list, "comma list of depths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(opt, out, err);
    if (spectrum_cmd->parsed()) return cmd_spectrum(opt, out, err);
    if (moments_cmd->parsed()) return cmd_moments(opt, out, err);
    if (compare_cmd->parsed()) return cmd_compare(opt, compare_tol, out, err);
    if (render_cmd->parsed()) {
      return cmd_render(opt, render_mode, width, height, render_level, samples,
                        render_format, out, err);
    }
    if (diagnose_cmd->parsed()) {
      return cmd_diagnose_parabolic(opt, depth_list, out, err);
    }
  } catch (const capacity_error& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace parafrac::cli

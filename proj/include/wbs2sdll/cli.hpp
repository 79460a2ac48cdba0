#pragma once

/** @file
 * Command-line front end: simulate, detect, mc and diagnose.
 *
 * Exit codes: 0 success, 1 usage error, 2 data or numeric error.
 */

#include <iostream>
#include <optional>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbs2sdll/dgp.hpp"
#include "wbs2sdll/diagnostics.hpp"
#include "wbs2sdll/io.hpp"
#include "wbs2sdll/montecarlo.hpp"
#include "wbs2sdll/sdll.hpp"

namespace wbs2sdll {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

struct DgpOptions {
  std::string kind = "rw";
  std::string breaks;
  std::string levels;
  DgpSpec spec;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!detail::parse_double(item, v)) {
      throw std::invalid_argument(std::string("bad ") + what + " entry '" + item + "'");
    }
    if constexpr (std::is_integral_v<T>) {
      if (v < 0 || v != std::floor(v)) {
        throw std::invalid_argument(std::string("bad ") + what + " entry '" + item + "'");
      }
    }
    out.push_back(static_cast<T>(v));
  }
  return out;
}

struct DetectorOptions {
  Wbs2Config wbs2;
  SdllConfig sdll;
  std::optional<double> known_sigma;
};

inline void add_dgp_options(CLI::App& app, DgpOptions& o) {
  app.add_option("--kind", o.kind, "Generator: rw | setar | piecewise")
      ->capture_default_str()
      ->check(CLI::IsMember({"rw", "random_walk", "setar", "setar1", "piecewise", "pc"}));
  app.add_option("--n", o.spec.n, "Series length")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--sigma", o.spec.sigma, "Noise standard deviation")->capture_default_str();
  app.add_option("--y0", o.spec.y0, "Initial condition")->capture_default_str();
  app.add_option("--a", o.spec.a, "SETAR upper-regime intercept")->capture_default_str();
  app.add_option("--b", o.spec.b, "SETAR upper-regime slope")->capture_default_str();
  app.add_option("--tau", o.spec.tau, "SETAR threshold")->capture_default_str();
  app.add_option("--burn-in", o.spec.burn_in, "Discarded leading observations")
      ->capture_default_str();
  app.add_option("--breaks", o.breaks, "Piecewise change-points (1-based, comma separated)");
  app.add_option("--levels", o.levels, "Piecewise segment levels (comma separated)");
}

inline void add_detector_options(CLI::App& app, DetectorOptions& o) {
  app.add_option("--M", o.wbs2.M, "Random intervals per segment")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--min-len", o.wbs2.min_len, "Smallest splittable segment")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  app.add_option("--c-thr", o.sdll.c_thr, "Threshold multiplier on sqrt(2 ln n)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--c-low", o.sdll.c_low, "Low level as a fraction of the threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--eps-mag", o.sdll.eps_mag, "Floor for normalized magnitudes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--known-sigma", o.known_sigma,
                 "Use this noise scale instead of the MAD estimate")
      ->check(CLI::PositiveNumber);
}

inline DgpSpec finish_spec(const DgpOptions& o) {
  DgpSpec s = o.spec;
  s.kind = *parse_dgp_kind(o.kind);
  if (!o.breaks.empty()) s.breaks = parse_list<std::size_t>(o.breaks, "--breaks");
  if (!o.levels.empty()) s.levels = parse_list<double>(o.levels, "--levels");
  s.validate();
  return s;
}

/**
 * Expands "--config <path>" into "--key value" pairs placed directly after
 * the subcommand, so that explicit flags (which come later) take precedence.
 */
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    std::vector<std::string> injected;
    for (auto [key, value] : read_config(path)) {
      for (char& c : key) {
        if (c == '_') c = '-';
      }
      injected.push_back("--" + key);
      injected.push_back(value);
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    // args[1] is the subcommand name.
    const std::size_t at = args.size() > 1 ? 2 : args.size();
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
    break;
  }
  return args;
}

} // namespace detail

inline int run_cli(const std::vector<std::string>& raw_args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"WBS2.SDLL change-point detection, misspecification generators and diagnostics",
               "wbs2sdll"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  // Consumed by expand_config before parsing; declared for --help.
  std::string config_path;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a series and write it as CSV");
  detail::DgpOptions sim_dgp;
  std::uint64_t sim_seed = 1, sim_stream = 0;
  std::string sim_out = "-";
  detail::add_dgp_options(*sim, sim_dgp);
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--stream", sim_stream, "Random stream id")->capture_default_str();
  sim->add_option("--out,-o", sim_out, "Output CSV path ('-' for stdout)")->capture_default_str();
  sim->add_option("--config", config_path, "Flat key=value file; flags override it");

  // detect
  auto* det = app.add_subcommand("detect", "Segment a CSV series, emit JSON");
  detail::DetectorOptions det_opts;
  std::string det_in, det_out = "-", det_svg;
  det->add_option("input,--in", det_in, "Input CSV")->required();
  det->add_option("--out,-o", det_out, "Output JSON path ('-' for stdout)")->capture_default_str();
  det->add_option("--svg", det_svg, "Also render the fit overlay to this SVG file");
  det->add_option("--seed", det_opts.wbs2.seed, "Interval sampling seed")->capture_default_str();
  detail::add_detector_options(*det, det_opts);
  det->add_option("--config", config_path, "Flat key=value file; flags override it");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo count of detected change-points");
  detail::DgpOptions mc_dgp;
  detail::DetectorOptions mc_opts;
  std::size_t mc_r = 200;
  std::uint64_t mc_seed = 1;
  unsigned mc_threads = 0;
  std::string mc_out = "-";
  detail::add_dgp_options(*mc, mc_dgp);
  detail::add_detector_options(*mc, mc_opts);
  mc->add_option("--r,--R", mc_r, "Replications")->capture_default_str()->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_seed, "Master seed")->capture_default_str();
  mc->add_option("--threads", mc_threads, "Worker threads (0 = hardware)")->capture_default_str();
  mc->add_option("--out,-o", mc_out, "Output JSON path ('-' for stdout)")->capture_default_str();
  mc->add_option("--config", config_path, "Flat key=value file; flags override it");

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "Rank piecewise-constant vs AR(1)/SETAR/random walk by BIC");
  detail::DetectorOptions dia_opts;
  std::string dia_in, dia_out = "-";
  dia->add_option("input,--in", dia_in, "Input CSV")->required();
  dia->add_option("--out,-o", dia_out, "Output JSON path ('-' for stdout)")->capture_default_str();
  dia->add_option("--seed", dia_opts.wbs2.seed, "Interval sampling seed")->capture_default_str();
  detail::add_detector_options(*dia, dia_opts);
  dia->add_option("--config", config_path, "Flat key=value file; flags override it");

  std::vector<std::string> args;
  try {
    args = detail::expand_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto sdll_of = [](const detail::DetectorOptions& o) {
    SdllConfig s = o.sdll;
    s.sigma = o.known_sigma;
    return s;
  };

  try {
    if (*sim) {
      const DgpSpec spec = [&] {
        DgpSpec s = detail::finish_spec(sim_dgp);
        s.seed = sim_seed;
        return s;
      }();
      std::ostringstream csv;
      write_csv(csv, simulate(spec, sim_stream));
      write_text(sim_out, csv.str(), out);
    } else if (*det) {
      const TimeSeries x = read_csv(det_in);
      const DetectResult r = detect(x, det_opts.wbs2, sdll_of(det_opts));
      write_text(det_out, dump_json(to_json(r)), out);
      if (!det_svg.empty()) render_svg(x, r.segmentation, det_svg);
    } else if (*mc) {
      const McSummary m = run_mc(detail::finish_spec(mc_dgp), mc_opts.wbs2, sdll_of(mc_opts),
                                 mc_r, mc_seed, mc_threads);
      write_text(mc_out, dump_json(to_json(m)), out);
    } else if (*dia) {
      const TimeSeries x = read_csv(dia_in);
      const DetectResult r = detect(x, dia_opts.wbs2, sdll_of(dia_opts));
      const ModelComparison c = compare_models(x, r);
      write_text(dia_out, dump_json(to_json(c, r)), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace wbs2sdll

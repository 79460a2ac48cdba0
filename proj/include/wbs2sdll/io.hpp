#pragma once

/** @file
 * CSV ingestion, JSON documents for detect / mc / diagnose results, flat
 * key=value configuration files and SVG fit overlays.
 */

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wbs2sdll/diagnostics.hpp"
#include "wbs2sdll/montecarlo.hpp"
#include "wbs2sdll/sdll.hpp"

namespace wbs2sdll {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno != ERANGE && std::isfinite(out);
}

/// Numeric payload of a CSV row: the only field, or the second of two.
inline bool parse_row(std::string_view line, double& out) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos) return parse_double(line, out);
  const auto rest = line.substr(comma + 1);
  if (rest.find(',') != std::string_view::npos) return false;
  double t;
  return parse_double(line.substr(0, comma), t) && parse_double(rest, out);
}

} // namespace detail

/**
 * One value per line, or two columns "t,value". A first line that does not
 * parse is taken as a header; blank lines are skipped.
 */
inline TimeSeries parse_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    double v;
    const bool ok = detail::parse_row(line, v);
    if (!ok && first_content) {
      first_content = false;
      continue;
    }
    first_content = false;
    if (!ok) throw ParseError(lineno, "expected a numeric value, got '" + line + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ParseError(lineno, "no numeric data");
  return TimeSeries(std::move(values));
}

inline TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv(in);
}

inline void write_csv(std::ostream& out, const TimeSeries& x) {
  std::ostringstream buf;
  buf.precision(17);
  for (double v : x) buf << v << '\n';
  out << buf.str();
}

// JSON documents --------------------------------------------------------------

inline constexpr std::size_t kJsonCandidateLimit = 50;

inline nlohmann::ordered_json to_json(const DgpSpec& s) {
  nlohmann::ordered_json j{{"kind", std::string(to_string(s.kind))},
                   {"n", s.n},
                   {"sigma", s.sigma},
                   {"y0", s.y0},
                   {"seed", s.seed}};
  if (s.kind == DgpKind::Setar1) {
    j["a"] = s.a;
    j["b"] = s.b;
    j["tau"] = s.tau;
  }
  if (s.kind != DgpKind::PiecewiseConstant) j["burn_in"] = s.burn_in;
  if (s.kind == DgpKind::PiecewiseConstant) {
    j["breaks"] = s.breaks;
    j["levels"] = s.levels;
  }
  return j;
}

inline DgpSpec dgp_spec_from_json(const nlohmann::ordered_json& j) {
  DgpSpec s;
  const auto kind = parse_dgp_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown dgp kind");
  s.kind = *kind;
  s.n = j.at("n").get<std::size_t>();
  s.sigma = j.at("sigma").get<double>();
  s.y0 = j.value("y0", 0.0);
  s.seed = j.value("seed", std::uint64_t{1});
  s.a = j.value("a", s.a);
  s.b = j.value("b", s.b);
  s.tau = j.value("tau", s.tau);
  s.burn_in = j.value("burn_in", std::size_t{0});
  if (j.contains("breaks")) s.breaks = j.at("breaks").get<std::vector<std::size_t>>();
  if (j.contains("levels")) s.levels = j.at("levels").get<std::vector<double>>();
  s.validate();
  return s;
}

inline nlohmann::ordered_json to_json(const Wbs2Config& c) {
  return {{"M", c.M}, {"min_len", c.min_len}, {"seed", c.seed}, {"stream", c.stream}};
}

inline nlohmann::ordered_json to_json(const SdllConfig& c) {
  nlohmann::ordered_json j{{"c_thr", c.c_thr},
                   {"c_low", c.c_low},
                   {"eps_mag", c.eps_mag},
                   {"sigma_floor", c.sigma_floor}};
  j["sigma"] = c.sigma ? nlohmann::ordered_json(*c.sigma) : nlohmann::ordered_json(nullptr);
  return j;
}

inline nlohmann::ordered_json to_json(const DetectResult& r) {
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  const std::size_t k = std::min(r.candidates.size(), kJsonCandidateLimit);
  for (std::size_t i = 0; i < k; ++i) {
    cands.push_back({{"b", r.candidates[i].b}, {"magnitude", r.candidates[i].magnitude}});
  }
  return {{"n", r.segmentation.n},
          {"sigma_hat", r.sigma_hat},
          {"sigma_degenerate", r.sigma_degenerate},
          {"q_hat", r.q_hat},
          {"changepoints", r.segmentation.changepoints},
          {"means", r.segmentation.means},
          {"candidates", std::move(cands)}};
}

inline nlohmann::ordered_json to_json(const McSummary& m) {
  return {{"R", m.R},
          {"mean", m.mean},
          {"sd", m.sd},
          {"counts", m.counts},
          {"master_seed", m.master_seed},
          {"spec", to_json(m.spec)},
          {"configs", {{"wbs2", to_json(m.wbs2)}, {"sdll", to_json(m.sdll)}}}};
}

inline McSummary mc_summary_from_json(const nlohmann::ordered_json& j) {
  McSummary m;
  m.R = j.at("R").get<std::size_t>();
  m.mean = j.at("mean").get<double>();
  m.sd = j.at("sd").get<double>();
  m.counts = j.at("counts").get<std::vector<std::size_t>>();
  m.master_seed = j.value("master_seed", std::uint64_t{0});
  m.spec = dgp_spec_from_json(j.at("spec"));
  const auto& w = j.at("configs").at("wbs2");
  m.wbs2.M = w.at("M").get<std::size_t>();
  m.wbs2.min_len = w.at("min_len").get<std::size_t>();
  m.wbs2.seed = w.at("seed").get<std::uint64_t>();
  m.wbs2.stream = w.value("stream", std::uint64_t{0});
  const auto& s = j.at("configs").at("sdll");
  m.sdll.c_thr = s.at("c_thr").get<double>();
  m.sdll.c_low = s.value("c_low", m.sdll.c_low);
  m.sdll.eps_mag = s.at("eps_mag").get<double>();
  m.sdll.sigma_floor = s.value("sigma_floor", m.sdll.sigma_floor);
  if (s.contains("sigma") && !s.at("sigma").is_null()) m.sdll.sigma = s.at("sigma").get<double>();
  return m;
}

/// Non-finite values (a perfect fit has BIC -inf) serialize as null.
inline nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json to_json(const ModelFit& f) {
  return {{"kind", std::string(to_string(f.kind))},
          {"params", f.params},
          {"ssr", f.ssr},
          {"p", f.p},
          {"n_eff", f.n_eff},
          {"bic", finite_or_null(f.bic)},
          {"aic", finite_or_null(f.aic)}};
}

inline nlohmann::ordered_json to_json(const ModelComparison& c, const DetectResult& d) {
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const auto& f : c.ranked) models.push_back(to_json(f));
  nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
  for (const auto& [kind, why] : c.excluded) {
    excluded.push_back({{"kind", std::string(to_string(kind))}, {"reason", why}});
  }
  return {{"n", d.segmentation.n},
          {"q_hat", d.q_hat},
          {"models", std::move(models)},
          {"excluded", std::move(excluded)}};
}

inline std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

/// Writes text to path, or to fallback when path is "-" or empty.
inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

template <typename Result>
void write_json(const Result& result, const std::string& path, std::ostream& fallback) {
  write_text(path, dump_json(to_json(result)), fallback);
}

// Flat key=value configuration ------------------------------------------------

/**
 * Parses "key = value" lines; '#' starts a comment, blank lines are ignored.
 * Keys are returned in file order.
 */
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
    const auto key = detail::trim(view.substr(0, eq));
    const auto value = detail::trim(view.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in);
}

// SVG -------------------------------------------------------------------------

/**
 * Standalone SVG with the series as a polyline path, the fitted step
 * function as a second path in a contrasting stroke (one vertical riser per
 * change-point), axis lines and the change-point count in the title.
 */
inline std::string svg_markup(const TimeSeries& x, const Segmentation& seg,
                              const std::string& title = "Sample path and WBS2.SDLL fit") {
  if (seg.n != x.size()) throw std::invalid_argument("render_svg: segmentation length mismatch");
  constexpr double width = 800.0, height = 400.0;
  constexpr double left = 60.0, right = 20.0, top = 40.0, bottom = 40.0;
  const double n = static_cast<double>(x.size());

  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  for (double m : seg.means) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  // Observation t sits at position t; the plot spans [0.5, n + 0.5].
  auto px = [&](double t) { return left + (t - 0.5) / n * (width - left - right); };
  auto py = [&](double v) { return top + (hi - v) / (hi - lo) * (height - top - bottom); };

  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
    << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
    << "<title>" << title << " (" << seg.num_changepoints() << " change-points)</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"14\">" << title << ": " << seg.num_changepoints()
    << " change-points</text>\n";

  // Axes with min/max tick labels.
  const double x0 = left, x1 = width - right, y0 = height - bottom, y1 = top;
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
    << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
    << "</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">1</text>\n"
    << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << x.size()
    << "</text>\n"
    << "<text x=\"" << x0 - 6 << "\" y=\"" << py(lo) << "\" text-anchor=\"end\">" << lo
    << "</text>\n"
    << "<text x=\"" << x0 - 6 << "\" y=\"" << py(hi) << "\" text-anchor=\"end\">" << hi
    << "</text>\n"
    << "</g>\n";

  s << "<path class=\"series\" fill=\"none\" stroke=\"#7f7f7f\" stroke-width=\"1\" d=\"M";
  for (std::size_t t = 1; t <= x.size(); ++t) {
    s << (t == 1 ? " " : " L ") << px(static_cast<double>(t)) << ' ' << py(x.at1(t));
  }
  s << "\"/>\n";

  s << "<path class=\"fit\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" d=\"M "
    << px(0.5) << ' ' << py(seg.means.front());
  for (std::size_t j = 0; j < seg.changepoints.size(); ++j) {
    s << " H " << px(static_cast<double>(seg.changepoints[j]) + 0.5) << " V "
      << py(seg.means[j + 1]);
  }
  s << " H " << px(n + 0.5) << "\"/>\n";
  s << "</svg>\n";
  return s.str();
}

inline void render_svg(const TimeSeries& x, const Segmentation& seg, const std::string& path,
                       const std::string& title = "Sample path and WBS2.SDLL fit") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg_markup(x, seg, title);
  if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace wbs2sdll

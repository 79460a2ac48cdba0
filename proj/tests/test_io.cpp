#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "wbs2sdll/io.hpp"

using namespace wbs2sdll;
using Catch::Approx;

namespace {

TimeSeries csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++c;
  return c;
}

// Tag-balance check: every opening element is closed in order.
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([A-Za-z_][\w:.-]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string name = m[2];
    if (m[1].length() > 0) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (m[3].length() == 0) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("wbs2sdll_test_" + name)).string();
}

std::string fit_path_of(const std::string& svg) {
  const auto at = svg.find("class=\"fit\"");
  REQUIRE(at != std::string::npos);
  const auto d = svg.find(" d=\"", at);
  return svg.substr(d + 4, svg.find('"', d + 4) - d - 4);
}

} // namespace

TEST_CASE("CSV with one value per line", "[io][csv]") {
  REQUIRE(csv("1\n2\n3\n").values().size() == 3);
  REQUIRE(csv("1\n2\n3\n") == TimeSeries({1, 2, 3}));
}

TEST_CASE("CSV with header and two columns", "[io][csv]") {
  REQUIRE(csv("t,value\n1,0.5\n2,0.7\n") == TimeSeries({0.5, 0.7}));
  REQUIRE(csv("1, 0.5\r\n\n2 ,0.7\r\n") == TimeSeries({0.5, 0.7}));
}

TEST_CASE("CSV errors name the line", "[io][csv]") {
  try {
    csv("1\nabc\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
  }
  REQUIRE_THROWS_AS(csv(""), ParseError);
  REQUIRE_THROWS_AS(csv("value\n"), ParseError);
  REQUIRE_THROWS(csv("1\nnan\n"));
  REQUIRE_THROWS_AS(read_csv(temp_path("does_not_exist.csv")), IoError);
}

TEST_CASE("CSV write/read round trip is exact", "[io][csv]") {
  const TimeSeries x({0.1, -1e-300, 3.141592653589793, 1e17, -2.5});
  std::ostringstream out;
  write_csv(out, x);
  REQUIRE(csv(out.str()) == x);
}

TEST_CASE("detect JSON keeps an empty changepoints array", "[io][json]") {
  DetectResult r;
  r.segmentation = segment_means(TimeSeries({1, 1, 1}), {});
  r.sigma_hat = 1e-12;
  const auto j = nlohmann::ordered_json::parse(dump_json(to_json(r)));
  REQUIRE(j.contains("changepoints"));
  REQUIRE(j["changepoints"].is_array());
  REQUIRE(j["changepoints"].empty());
  REQUIRE(j["q_hat"] == 0);
  for (const char* key : {"n", "sigma_hat", "q_hat", "changepoints", "means", "candidates"}) {
    REQUIRE(j.contains(key));
  }
}

TEST_CASE("detect JSON truncates candidates", "[io][json]") {
  std::vector<double> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i * i));
  const auto r = detect(TimeSeries(v));
  const auto j = to_json(r);
  REQUIRE(j["candidates"].size() == kJsonCandidateLimit);
  REQUIRE(j["candidates"][0]["b"] == r.candidates[0].b);
}

TEST_CASE("McSummary JSON", "[io][json]") {
  const std::vector<std::size_t> counts{1, 1, 1};
  McSummary m;
  m.counts = counts;
  const auto s = summarize(counts);
  m.mean = s.mean;
  m.sd = s.sd;
  m.R = 3;
  const auto j = nlohmann::ordered_json::parse(dump_json(to_json(m)));
  REQUIRE(j["mean"].get<double>() == 1.0);
  REQUIRE(j["sd"].get<double>() == 0.0);
  for (const char* key : {"R", "mean", "sd", "counts", "spec", "configs"}) REQUIRE(j.contains(key));
}

TEST_CASE("McSummary JSON round trip through a file", "[io][json]") {
  DgpSpec spec;
  spec.kind = DgpKind::PiecewiseConstant;
  spec.n = 60;
  spec.breaks = {30};
  spec.levels = {0.0, 4.0};
  const auto m = run_mc(spec, {}, {}, 7, 11, 1);
  const std::string path = temp_path("mc.json");
  std::ostringstream unused;
  write_json(m, path, unused);
  std::ifstream in(path);
  const auto back = mc_summary_from_json(nlohmann::ordered_json::parse(in));
  std::remove(path.c_str());
  REQUIRE(back.mean == Approx(m.mean).margin(1e-12));
  REQUIRE(back.sd == Approx(m.sd).margin(1e-12));
  REQUIRE(back.counts == m.counts);
  REQUIRE(back.spec == m.spec);
  REQUIRE(back.wbs2 == m.wbs2);
  REQUIRE(back.sdll == m.sdll);
}

TEST_CASE("numbers keep full precision", "[io][json]") {
  const double v = 0.1234567890123456;
  REQUIRE(nlohmann::ordered_json::parse(dump_json(nlohmann::ordered_json(v))).get<double>() == v);
}

TEST_CASE("unwritable paths raise IoError", "[io]") {
  std::ostringstream unused;
  REQUIRE_THROWS_AS(write_text("/nonexistent_dir/x.json", "{}", unused), IoError);
  REQUIRE_THROWS_AS(render_svg(TimeSeries({1, 2}), segment_means(TimeSeries({1, 2}), {}),
                               "/nonexistent_dir/x.svg"),
                    IoError);
  std::ostringstream sink;
  write_text("-", "abc", sink);
  REQUIRE(sink.str() == "abc");
}

TEST_CASE("diagnose JSON nulls a perfect-fit BIC", "[io][json]") {
  const TimeSeries x({0, 0, 1, 1, 5, 5});
  const auto f = piecewise_fit(x, segment_means(x, {2, 4}));
  const auto j = to_json(f);
  REQUIRE(j["bic"].is_null());
  REQUIRE(j["kind"] == "PiecewiseConstant");
}

TEST_CASE("config files", "[io][config]") {
  std::istringstream in("# comment\nn = 40\n\nkind=piecewise  # trailing\nbreaks = 10,20\n");
  const auto kv = parse_config(in);
  REQUIRE(kv.size() == 3);
  REQUIRE(kv[0] == std::pair<std::string, std::string>{"n", "40"});
  REQUIRE(kv[1].second == "piecewise");
  REQUIRE(kv[2].second == "10,20");
  std::istringstream bad("n=1\nnonsense\n");
  try {
    parse_config(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
  }
}

TEST_CASE("SVG of a constant series", "[io][svg]") {
  const TimeSeries x(std::vector<double>(20, 3.0));
  const std::string svg = svg_markup(x, segment_means(x, {}));
  REQUIRE(count(svg, "<path") == 2);
  REQUIRE(count(fit_path_of(svg), " V ") == 0);
  REQUIRE(svg.find("(0 change-points)") != std::string::npos);
  REQUIRE(balanced_xml(svg));
}

TEST_CASE("SVG of a 50/50 step has one riser", "[io][svg]") {
  std::vector<double> v(100, 0.0);
  std::fill(v.begin() + 50, v.end(), 1.0);
  const TimeSeries x(v);
  const std::string svg = svg_markup(x, segment_means(x, {50}));
  REQUIRE(count(svg, "<path") == 2);
  REQUIRE(count(fit_path_of(svg), " V ") == 1);
  REQUIRE(svg.find("(1 change-points)") != std::string::npos);
  REQUIRE(count(svg, "<line") == 2);
  REQUIRE(balanced_xml(svg));
}

TEST_CASE("render_svg writes the markup", "[io][svg]") {
  const TimeSeries x({0, 0, 2, 2});
  const auto seg = segment_means(x, {2});
  const std::string path = temp_path("fit.svg");
  render_svg(x, seg, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(path.c_str());
  REQUIRE(ss.str() == svg_markup(x, seg));
  REQUIRE_THROWS_AS(svg_markup(x, segment_means(TimeSeries({1, 2, 3}), {})), std::invalid_argument);
}

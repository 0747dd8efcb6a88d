#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfdfa/series.hpp"
#include "mfdfa/synth.hpp"
#include "oracles.hpp"

using namespace mfdfa;

namespace {

// weekday-only date sequence starting Monday 2019-01-07
std::vector<Date> trading_days(std::size_t n) {
  std::vector<Date> out;
  Date d = Date::parse("2019-01-07");
  while (out.size() < n) {
    if (!d.is_weekend()) out.push_back(d);
    d = d.next_day();
  }
  return out;
}

ReturnSeries make_returns(const std::vector<double>& values) {
  ReturnSeries r;
  r.dates = trading_days(values.size());
  r.returns = values;
  return r;
}

}  // namespace

// ============================================================================
// parse_prices
// ============================================================================

TEST_CASE("minimal two-column file parses") {
  const auto p = parse_prices("Date,Close\n2019-01-02,100.0\n2019-01-03,101.0\n");
  REQUIRE(p.size() == 2);
  CHECK(p.dates[0].to_string() == "2019-01-02");
  CHECK(p.closes[1] == 101.0);
  CHECK(p.dropped_rows == 0);
}

TEST_CASE("null rows are dropped and counted") {
  const auto p = parse_prices(
      "Date,Open,High,Low,Close,Adj Close,Volume\n"
      "2019-01-02,1,1,1,100.0,99.0,1000\n"
      "2019-01-03,1,1,1,null,null,0\n"
      "2019-01-04,1,1,1,102.0,101.0,1200\n");
  REQUIRE(p.size() == 2);
  CHECK(p.dropped_rows == 1);
  CHECK(p.closes[1] == 102.0);
}

TEST_CASE("adj close column is selectable") {
  const std::string text =
      "Date,Close,Adj Close\n2019-01-02,100.0,50.0\n2019-01-03,102.0,51.0\n";
  CHECK(parse_prices(text, PriceColumn::close).closes[0] == 100.0);
  CHECK(parse_prices(text, PriceColumn::adj_close).closes[0] == 50.0);
}

TEST_CASE("rows are sorted by date") {
  const auto p = parse_prices("Date,Close\n2019-01-04,103.0\n2019-01-02,100.0\n2019-01-03,101.0\n");
  REQUIRE(p.size() == 3);
  CHECK(p.dates[0] < p.dates[1]);
  CHECK(p.dates[1] < p.dates[2]);
  CHECK(p.closes[0] == 100.0);
}

TEST_CASE("ingestion rejects malformed input with the matching error") {
  auto code_of = [](const std::string& text) {
    try {
      parse_prices(text);
    } catch (const Error& e) {
      return e.code();
    }
    return errc::invalid_config;
  };
  CHECK(code_of("Time,Price\n2019-01-02,1\n") == errc::malformed_header);
  CHECK(code_of("") == errc::malformed_header);
  CHECK(code_of("Date,Close\n02/01/2019,100\n") == errc::unparsable_date);
  CHECK(code_of("Date,Close\n2019-02-30,100\n") == errc::unparsable_date);
  CHECK(code_of("Date,Close\n2019-01-02,-3\n") == errc::non_positive_close);
  CHECK(code_of("Date,Close\n2019-01-02,abc\n") == errc::non_positive_close);
  CHECK(code_of("Date,Close\n2019-01-02,100\n2019-01-02,101\n") == errc::duplicate_date);
  CHECK(code_of("Date,Close\n2019-01-02\n") == errc::malformed_header);
}

// ============================================================================
// log_returns
// ============================================================================

TEST_CASE("log returns of flat, e-fold and down moves") {
  PriceSeries p;
  p.dates = trading_days(4);
  p.closes = {100.0, 100.0, 100.0 * std::exp(1.0), 90.0 * std::exp(1.0)};
  const auto r = log_returns(p);
  REQUIRE(r.size() == 3);
  CHECK(r.returns[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(r.returns[1] == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.returns[2] == Catch::Approx(std::log(0.9)).margin(1e-12));
  CHECK(r.dates[0] == p.dates[1]);  // dated by the later day
}

TEST_CASE("returns need two prices") {
  PriceSeries p;
  p.dates = trading_days(1);
  p.closes = {100.0};
  CHECK_THROWS_MATCHES(log_returns(p), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == errc::series_too_short; }));
}

TEST_CASE("cumulative-exponential prices round-trip to the same returns", "[property]") {
  const auto r = oracle::gaussian_sample(257, 21);
  PriceSeries p;
  p.dates = trading_days(r.size() + 1);
  p.closes.push_back(100.0);
  for (double v : r) p.closes.push_back(p.closes.back() * std::exp(0.01 * v));
  const auto back = log_returns(p);
  REQUIRE(back.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(back.returns[i] == Catch::Approx(0.01 * r[i]).margin(1e-12));
}

// ============================================================================
// day_resolve
// ============================================================================

TEST_CASE("returns are mapped to their calendar weekday") {
  ReturnSeries r;
  r.dates = {Date::parse("2019-01-07"), Date::parse("2019-01-08")};  // Mon, Tue
  r.returns = {0.01, -0.02};
  const auto d = day_resolve(r);
  REQUIRE(d.weekday[0].size() == 1);
  REQUIRE(d.weekday[1].size() == 1);
  CHECK(d.weekday[0].returns[0] == 0.01);
  CHECK(d.weekday[1].returns[0] == -0.02);
  CHECK(d.weekend_returns == 0);
}

TEST_CASE("two full weeks give two entries per weekday") {
  const auto r = make_returns(std::vector<double>(10, 0.5));
  const auto d = day_resolve(r);
  for (const auto& series : d.weekday) CHECK(series.size() == 2);
}

TEST_CASE("weekend-dated returns are excluded and counted") {
  ReturnSeries r;
  r.dates = {Date::parse("2019-01-11"), Date::parse("2019-01-12"), Date::parse("2019-01-14")};
  r.returns = {1.0, 2.0, 3.0};  // Fri, Sat, Mon
  const auto d = day_resolve(r);
  CHECK(d.weekend_returns == 1);
  CHECK(d.weekday[4].size() == 1);
  CHECK(d.weekday[0].size() == 1);
  std::size_t total = 0;
  for (const auto& s : d.weekday) total += s.size();
  CHECK(total == 2);
}

TEST_CASE("stride5 reproduces the literal every-5th-index construction") {
  std::vector<double> vals(23);
  std::iota(vals.begin(), vals.end(), 0.0);
  const auto r = make_returns(vals);
  const auto d = day_resolve(r, /*stride5=*/true);
  for (std::size_t day = 0; day < 5; ++day) {
    const auto& s = d.weekday[day];
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(s.returns[j] == static_cast<double>(day + 5 * j));
  }
  CHECK(d.weekend_returns == 0);
}

TEST_CASE("weekday series partition the full series", "[property]") {
  const auto vals = oracle::gaussian_sample(253, 4);
  const auto r = make_returns(vals);
  const auto d = day_resolve(r);
  struct Tagged {
    Date date;
    double value;
  };
  std::vector<Tagged> merged;
  std::size_t total = 0;
  for (const auto& s : d.weekday) {
    total += s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      merged.push_back({s.dates[i], s.returns[i]});
      CHECK(!s.dates[i].is_weekend());
      if (i + 1 < s.size()) CHECK(s.dates[i] < s.dates[i + 1]);  // chronological
    }
  }
  REQUIRE(total == r.size());
  std::sort(merged.begin(), merged.end(),
            [](const Tagged& a, const Tagged& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < merged.size(); ++i) {
    CHECK(merged[i].date == r.dates[i]);
    CHECK(merged[i].value == r.returns[i]);
  }
}

// ============================================================================
// shuffle
// ============================================================================

TEST_CASE("shuffle preserves the value multiset for any seed", "[property]") {
  const auto x = oracle::gaussian_sample(501, 8);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    auto y = shuffle(x, 10 * x.size(), seed);
    REQUIRE(y.size() == x.size());
    auto xs = x, ys = y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    CHECK(xs == ys);
  }
}

TEST_CASE("shuffle is deterministic in the seed", "[property]") {
  const auto x = oracle::gaussian_sample(256, 3);
  CHECK(shuffle(x, 1000, 7) == shuffle(x, 1000, 7));
  CHECK(shuffle(x, 1000, 7) != shuffle(x, 1000, 8));
}

TEST_CASE("shuffling iid noise leaves the spectrum width alone") {
  // iid has no temporal order to destroy; widths before/after must agree
  // within the seed-to-seed spread of the original widths
  AnalysisConfig cfg;
  std::vector<double> orig, shuf;
  for (int s = 0; s < 12; ++s) {
    const auto x = gen_gaussian_noise({4096, 0.5, 700ull + s});
    const auto a = analyze_series(x, cfg);
    if (a.outcome == SpectrumOutcome::ok) orig.push_back(a.params->width);
    const auto y = shuffle(x, 10 * x.size(), 77ull + s);
    const auto b = analyze_series(y, cfg);
    if (b.outcome == SpectrumOutcome::ok) shuf.push_back(b.params->width);
  }
  REQUIRE(orig.size() >= 3);
  REQUIRE(shuf.size() >= 3);
  const double mo = std::accumulate(orig.begin(), orig.end(), 0.0) / orig.size();
  const double ms = std::accumulate(shuf.begin(), shuf.end(), 0.0) / shuf.size();
  double var = 0.0;
  for (double w : orig) var += (w - mo) * (w - mo);
  const double sd = std::sqrt(var / orig.size());
  CHECK(std::abs(ms - mo) <= sd);
}

// ============================================================================
// shuffle_test
// ============================================================================

TEST_CASE("shuffle test on iid input shows no correlation signal", "[property][slow]") {
  AnalysisConfig cfg;
  cfg.repetitions = 12;
  cfg.transposition_factor = 20;
  const auto x = gen_gaussian_noise({4096, 0.5, 42});
  const auto rep = shuffle_test_series(x, cfg, "iid");
  REQUIRE(rep.delta_alpha0.has_value());
  CHECK(*rep.delta_alpha0 < 0.05);
  if (rep.delta_width && rep.n_width >= 3) CHECK(*rep.delta_width < 2.0 * rep.std_width);
  CHECK(rep.failures == 0);
}

TEST_CASE("shuffling the cascade destroys correlations but not the broad pdf", "[slow]") {
  // correlation-type multifractality goes away (alpha0 falls to ~0.5-0.65);
  // distribution-type multifractality survives, so the width only shrinks
  AnalysisConfig cfg;
  cfg.repetitions = 10;
  cfg.transposition_factor = 20;
  const auto x = gen_binomial_cascade({0.7, 12, 7});
  const auto rep = shuffle_test_series(x, cfg, "cascade");
  REQUIRE(rep.original_width.has_value());
  REQUIRE(rep.n_width >= 5);
  CHECK(rep.original_alpha0 - rep.mean_alpha0 > 0.2);
  CHECK(rep.mean_width < 0.9 * *rep.original_width);
  CHECK(rep.mean_width > 0.0);
}

TEST_CASE("per-weekday shuffle test emits one report per weekday") {
  AnalysisConfig cfg;
  cfg.repetitions = 2;
  cfg.transposition_factor = 5;
  const auto vals = gen_binomial_cascade({0.65, 11, 1});
  const auto r = make_returns(std::vector<double>(vals.begin(), vals.end()));
  const auto d = day_resolve(r);
  const auto reports = shuffle_test(d, cfg);
  REQUIRE(reports.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(reports[i].label == std::string(kWeekdayNames[i]));
    CHECK(reports[i].n_repetitions == 2);
    CHECK(reports[i].transpositions_per_rep == 5 * d.weekday[i].size());
  }
}

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfdfa/detail/rng.hpp"
#include "mfdfa/errors.hpp"
#include "mfdfa/pipeline.hpp"

namespace mfdfa {

// ============================================================================
// Calendar dates
// ============================================================================

struct Date {
  std::chrono::sys_days value{};

  static Date parse(std::string_view text) {
    // strict YYYY-MM-DD
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        std::from_chars(text.data(), text.data() + 4, y).ec != std::errc{} ||
        std::from_chars(text.data() + 5, text.data() + 7, m).ec != std::errc{} ||
        std::from_chars(text.data() + 8, text.data() + 10, d).ec != std::errc{})
      raise(errc::unparsable_date, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok())
      raise(errc::unparsable_date, "'" + std::string(text) + "' is not a calendar date");
    return Date{std::chrono::sys_days{ymd}};
  }

  std::string to_string() const {
    const std::chrono::year_month_day ymd{value};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  // 0 = Monday ... 6 = Sunday
  unsigned weekday_index() const {
    return std::chrono::weekday{value}.iso_encoding() - 1;
  }
  bool is_weekend() const { return weekday_index() >= 5; }

  Date next_day() const { return Date{value + std::chrono::days{1}}; }

  auto operator<=>(const Date&) const = default;
};

inline constexpr std::array<std::string_view, 5> kWeekdayNames = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};

// ============================================================================
// Price ingestion
// ============================================================================

struct PriceSeries {
  std::string market_code;
  std::vector<Date> dates;   // strictly increasing
  std::vector<double> closes;
  std::size_t dropped_rows = 0;  // rows with a missing/null price value

  std::size_t size() const { return dates.size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline bool is_missing(std::string_view v) {
  if (v.empty()) return true;
  static constexpr std::string_view kNull = "null";
  if (v.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i)
    if ((v[i] | 0x20) != kNull[i]) return false;
  return true;
}

}  // namespace detail

// Parses provider-style CSV (Date,Open,High,Low,Close,Adj Close,Volume) or the
// minimal Date,Close form. Missing ("null"/empty) prices are dropped and
// counted; rows are sorted by date; duplicate dates are rejected.
inline PriceSeries parse_prices(std::string_view text, PriceColumn column = PriceColumn::close,
                                std::string market_code = "") {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= text.size()) return std::nullopt;
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    return line;
  };

  const auto header_line = next_line();
  if (!header_line) raise(errc::malformed_header, "empty input");
  const auto header = detail::split_csv(*header_line);
  long date_col = -1, close_col = -1, adj_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "Date") date_col = static_cast<long>(i);
    else if (header[i] == "Close") close_col = static_cast<long>(i);
    else if (header[i] == "Adj Close" || header[i] == "AdjClose")
      adj_col = static_cast<long>(i);
  }
  long value_col = column == PriceColumn::close ? close_col : adj_col;
  if (column == PriceColumn::close && value_col < 0) value_col = adj_col;
  if (date_col < 0 || value_col < 0)
    raise(errc::malformed_header, "header must name Date and " + to_string(column) + " columns");

  struct Row {
    Date date;
    double close;
  };
  std::vector<Row> rows;
  PriceSeries out;
  out.market_code = std::move(market_code);
  while (const auto line = next_line()) {
    if (detail::trim(*line).empty()) continue;
    const auto fields = detail::split_csv(*line);
    if (fields.size() <= static_cast<std::size_t>(std::max(date_col, value_col)))
      raise(errc::malformed_header, "row with too few columns: '" + std::string(*line) + "'");
    const auto raw = fields[static_cast<std::size_t>(value_col)];
    if (detail::is_missing(raw)) {
      ++out.dropped_rows;
      continue;
    }
    const Date date = Date::parse(fields[static_cast<std::size_t>(date_col)]);
    double close = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), close);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
      raise(errc::non_positive_close, "unparsable price '" + std::string(raw) + "'");
    if (!std::isfinite(close)) raise(errc::non_finite_input, "non-finite price in input");
    if (close <= 0.0)
      raise(errc::non_positive_close,
            "price must be positive, got " + std::string(raw) + " on " + date.to_string());
    rows.push_back({date, close});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].date == rows[i - 1].date)
      raise(errc::duplicate_date, "duplicate date " + rows[i].date.to_string());

  out.dates.reserve(rows.size());
  out.closes.reserve(rows.size());
  for (const auto& r : rows) {
    out.dates.push_back(r.date);
    out.closes.push_back(r.close);
  }
  return out;
}

// ============================================================================
// Log returns and day-of-week resolution
// ============================================================================

struct ReturnSeries {
  std::vector<Date> dates;  // date of t+1, the later day of each pair
  std::vector<double> returns;

  std::size_t size() const { return returns.size(); }
};

inline ReturnSeries log_returns(const PriceSeries& prices) {
  if (prices.size() < 2)
    raise(errc::series_too_short, "need at least 2 prices for returns");
  ReturnSeries out;
  out.dates.reserve(prices.size() - 1);
  out.returns.reserve(prices.size() - 1);
  for (std::size_t t = 0; t + 1 < prices.size(); ++t) {
    out.dates.push_back(prices.dates[t + 1]);
    out.returns.push_back(std::log(prices.closes[t + 1] / prices.closes[t]));
  }
  return out;
}

// The full series plus its five weekday sub-series. With calendar resolution
// (default) a return belongs to the weekday of its own (later) date, so the
// weekend gap lands in Monday's series; weekend-dated returns are excluded
// and counted. stride5 reproduces the literal every-5th-index construction.
struct DayResolvedReturns {
  std::array<ReturnSeries, 5> weekday;  // Monday..Friday
  ReturnSeries all;
  std::size_t weekend_returns = 0;
};

inline DayResolvedReturns day_resolve(const ReturnSeries& returns, bool stride5 = false) {
  DayResolvedReturns out;
  out.all = returns;
  if (stride5) {
    for (std::size_t i = 0; i < returns.size(); ++i) {
      auto& series = out.weekday[i % 5];
      series.dates.push_back(returns.dates[i]);
      series.returns.push_back(returns.returns[i]);
    }
    return out;
  }
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const unsigned w = returns.dates[i].weekday_index();
    if (w >= 5) {
      ++out.weekend_returns;
      continue;
    }
    out.weekday[w].dates.push_back(returns.dates[i]);
    out.weekday[w].returns.push_back(returns.returns[i]);
  }
  return out;
}

// ============================================================================
// Shuffling and the multifractality-source test
// ============================================================================

// Random transpositions driven by mt19937_64; the value multiset is preserved
// exactly and the same seed always yields the same permutation.
inline std::vector<double> shuffle(std::span<const double> series, std::uint64_t transpositions,
                                   std::uint64_t seed) {
  if (transpositions < 1) raise(errc::invalid_config, "transpositions must be >= 1");
  std::vector<double> out(series.begin(), series.end());
  if (out.size() < 2) return out;
  detail::Rng rng(seed);
  const std::uint64_t n = out.size();
  for (std::uint64_t t = 0; t < transpositions; ++t) {
    const std::uint64_t i = rng.bounded(n);
    const std::uint64_t j = rng.bounded(n);
    std::swap(out[i], out[j]);
  }
  return out;
}

// Original-vs-shuffled statistics for one series. Repetitions that throw are
// excluded and counted in `failures`; repetitions whose quartic has no real
// root contribute alpha0 but no width (tracked by n_width); degenerate
// repetitions contribute W=0, r=1.
struct ShuffleReport {
  std::string label;
  int n_repetitions = 0;
  std::uint64_t transpositions_per_rep = 0;

  SpectrumOutcome original_outcome = SpectrumOutcome::failed;
  double original_alpha0 = 0.0;
  std::optional<double> original_width;
  std::optional<double> original_skew;

  double mean_alpha0 = 0.0, std_alpha0 = 0.0;
  double mean_width = 0.0, std_width = 0.0;
  double mean_skew = 0.0, std_skew = 0.0;
  int n_alpha0 = 0;  // repetitions contributing alpha0
  int n_width = 0;   // repetitions contributing width/skew
  int failures = 0;  // repetitions that threw

  std::optional<double> delta_alpha0;  // |original - shuffled mean|
  std::optional<double> delta_width;
};

namespace detail {

struct RunningStats {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stddev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sumsq / n - m * m));
  }
};

}  // namespace detail

inline ShuffleReport shuffle_test_series(std::span<const double> series,
                                         const AnalysisConfig& cfg, std::string label) {
  cfg.validate();
  ShuffleReport rep;
  rep.label = std::move(label);
  rep.n_repetitions = cfg.repetitions;
  rep.transpositions_per_rep =
      static_cast<std::uint64_t>(cfg.transposition_factor) * series.size();

  const SeriesAnalysis original = analyze_series(series, cfg);
  rep.original_outcome = original.outcome;
  rep.original_alpha0 = original.alpha0();
  if (original.params && original.outcome != SpectrumOutcome::no_root_left &&
      original.outcome != SpectrumOutcome::no_root_right) {
    rep.original_width = original.params->width;
    rep.original_skew = original.params->skew;
  }

  detail::RunningStats a0, width, skew;
  for (int r = 0; r < cfg.repetitions; ++r) {
    const std::uint64_t rep_seed = cfg.seed + static_cast<std::uint64_t>(r);
    try {
      const auto shuffled = shuffle(series, rep.transpositions_per_rep, rep_seed);
      const SeriesAnalysis an = analyze_series(shuffled, cfg);
      a0.add(an.alpha0());
      if (an.params) {
        width.add(an.params->width);
        skew.add(an.params->skew);
      }
    } catch (const Error&) {
      ++rep.failures;
    }
  }
  rep.mean_alpha0 = a0.mean();
  rep.std_alpha0 = a0.stddev();
  rep.n_alpha0 = a0.n;
  rep.mean_width = width.mean();
  rep.std_width = width.stddev();
  rep.mean_skew = skew.mean();
  rep.std_skew = skew.stddev();
  rep.n_width = width.n;

  if (a0.n > 0) rep.delta_alpha0 = std::abs(rep.original_alpha0 - rep.mean_alpha0);
  if (width.n > 0 && rep.original_width)
    rep.delta_width = std::abs(*rep.original_width - rep.mean_width);
  return rep;
}

// One ShuffleReport per weekday.
inline std::vector<ShuffleReport> shuffle_test(const DayResolvedReturns& day_returns,
                                               const AnalysisConfig& cfg) {
  std::vector<ShuffleReport> out;
  out.reserve(5);
  for (std::size_t d = 0; d < 5; ++d)
    out.push_back(shuffle_test_series(day_returns.weekday[d].returns, cfg,
                                      std::string(kWeekdayNames[d])));
  return out;
}

}  // namespace mfdfa

// mfdfa: day-of-the-week resolved multifractal analysis of price series.
//
// Subcommands: analyze, shuffle-test, evolve, synth. Reports are CSV (default)
// or JSON, deterministic for fixed (input bytes, flags, seed); the only
// non-reproducible line is the generated_at header, which determinism checks
// exclude.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 ingestion error,
// 3 analysis error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfdfa/mfdfa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngestion = 2;
constexpr int kExitAnalysis = 3;

bool is_ingestion_error(mfdfa::errc c) {
  switch (c) {
    case mfdfa::errc::malformed_header:
    case mfdfa::errc::unparsable_date:
    case mfdfa::errc::non_positive_close:
    case mfdfa::errc::duplicate_date:
    case mfdfa::errc::non_finite_input:
      return true;
    default:
      return false;
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mfdfa::Error(mfdfa::errc::malformed_header, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mfdfa::Error(mfdfa::errc::invalid_config, "cannot write '" + path + "'");
  out << body;
}

struct CommonOpts {
  mfdfa::AnalysisConfig config;
  std::string format = "csv";
  std::string out = "-";
  bool single_pass = false;
  std::string column = "Close";
  bool seed_given = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  auto& c = o.config;
  cmd->add_option("--detrend-order", c.detrend_order, "local polynomial order m")
      ->capture_default_str();
  cmd->add_option("--q-min", c.q_min, "lowest moment order")->capture_default_str();
  cmd->add_option("--q-max", c.q_max, "highest moment order")->capture_default_str();
  cmd->add_option("--q-step", c.q_step, "moment grid step")->capture_default_str();
  cmd->add_option("--n-min", c.n_min, "smallest box size")->capture_default_str();
  cmd->add_option("--n-max-divisor", c.n_max_divisor,
                  "largest box size is N divided by this")
      ->capture_default_str();
  cmd->add_flag("--single-pass", o.single_pass,
                "segment only from the series start (drops the tail)");
  cmd->add_flag("--stride5", c.stride5,
                "resolve days by every-5th-index striding instead of calendar weekday");
  cmd->add_option("--seed", c.seed, "random seed (env MFDFA_SEED is the fallback)")
      ->capture_default_str()
      ->each([&o](const std::string&) { o.seed_given = true; });
  cmd->add_option("--repetitions", c.repetitions, "shuffle repetitions")->capture_default_str();
  cmd->add_option("--transposition-factor", c.transposition_factor,
                  "transpositions per repetition = factor * N")
      ->capture_default_str();
  cmd->add_option("--window", c.window, "sliding window size (observations)")
      ->capture_default_str();
  cmd->add_option("--step", c.step, "sliding step (observations)")->capture_default_str();
  cmd->add_option("--column", o.column, "price column: Close or AdjClose")
      ->capture_default_str()
      ->check(CLI::IsMember({"Close", "AdjClose"}));
  cmd->add_option("--format", o.format, "report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "output path ('-' for stdout)")->capture_default_str();
}

void finalize_config(CommonOpts& o) {
  o.config.dual_pass = !o.single_pass;
  o.config.column =
      o.column == "AdjClose" ? mfdfa::PriceColumn::adj_close : mfdfa::PriceColumn::close;
  if (!o.seed_given) {
    if (const char* env = std::getenv("MFDFA_SEED")) o.config.seed = std::strtoull(env, nullptr, 10);
  }
  o.config.validate();
}

std::string fmt(double v) { return mfdfa::format_double(v); }

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

mfdfa::Report make_report(const std::string& command, const std::string& input_path,
                          const std::string& input_bytes, const mfdfa::AnalysisConfig& cfg) {
  mfdfa::Report r;
  r.command = command;
  r.input = input_path;
  r.input_digest =
      input_path.empty() ? "-" : "fnv1a64:" + mfdfa::hex64(mfdfa::fnv1a64(input_bytes));
  r.generated_at = utc_now();
  r.config = cfg;
  return r;
}

struct LoadedSeries {
  mfdfa::PriceSeries prices;
  mfdfa::ReturnSeries returns;
  mfdfa::DayResolvedReturns days;
};

LoadedSeries load_series(const std::string& text, const mfdfa::AnalysisConfig& cfg) {
  LoadedSeries s;
  s.prices = mfdfa::parse_prices(text, cfg.column);
  s.returns = mfdfa::log_returns(s.prices);
  s.days = mfdfa::day_resolve(s.returns, cfg.stride5);
  return s;
}

const mfdfa::ReturnSeries& series_for(const LoadedSeries& s, const std::string& day) {
  if (day == "All") return s.days.all;
  for (std::size_t d = 0; d < 5; ++d)
    if (day == mfdfa::kWeekdayNames[d]) return s.days.weekday[d];
  throw mfdfa::Error(mfdfa::errc::invalid_config, "unknown day '" + day + "'");
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------
int run_analyze(const std::string& input, CommonOpts& o, bool with_spectra,
                std::vector<std::string> days) {
  const std::string text = read_file(input);
  const LoadedSeries s = load_series(text, o.config);

  auto report = make_report("analyze", input, text, o.config);
  report.notes.push_back("dropped_null_rows=" + std::to_string(s.prices.dropped_rows));
  report.notes.push_back("weekend_returns=" + std::to_string(s.days.weekend_returns));
  report.notes.push_back("prices=" + std::to_string(s.prices.size()));

  report.add_table("complexity", {"day", "n", "alpha0", "width", "skew", "alpha_min",
                                  "alpha_max", "h2", "h2_r2", "status"});
  if (with_spectra) report.add_table("spectra", {"day", "q", "alpha", "f_alpha"});
  auto& table = report.tables[0];
  mfdfa::Report::Table* spectra = with_spectra ? &report.tables[1] : nullptr;

  std::size_t failures = 0;
  for (const auto& day : days) {
    const auto& series = series_for(s, day);
    try {
      const auto an = mfdfa::analyze_series(series.returns, o.config);
      const long q2 = an.hurst.q_grid.index_of(2.0);
      std::vector<std::string> row{
          day,
          std::to_string(series.size()),
          fmt(an.alpha0()),
          an.params ? fmt(an.params->width) : "",
          an.params ? fmt(an.params->skew) : "",
          an.params ? fmt(an.params->alpha_min) : "",
          an.params ? fmt(an.params->alpha_max) : "",
          q2 >= 0 ? fmt(an.hurst.h[q2]) : "",
          q2 >= 0 ? fmt(an.hurst.fit_r2[q2]) : "",
          to_string(an.outcome)};
      table.rows.push_back(std::move(row));
      if (spectra)
        for (std::size_t i = 0; i < an.spectrum.alpha.size(); ++i)
          spectra->rows.push_back({day, fmt(an.spectrum.source_q[i]), fmt(an.spectrum.alpha[i]),
                                   fmt(an.spectrum.f_alpha[i])});
    } catch (const mfdfa::Error& e) {
      ++failures;
      table.rows.push_back({day, std::to_string(series.size()), "", "", "", "", "", "", "",
                            std::string("failed:") + e.what()});
    }
  }

  const std::string body =
      o.format == "json" ? mfdfa::render_json(report) : mfdfa::render_csv(report);
  write_output(o.out, body);
  return failures == days.size() ? kExitAnalysis : kExitOk;
}

// ---------------------------------------------------------------------------
// shuffle-test
// ---------------------------------------------------------------------------
int run_shuffle_test(const std::string& input, CommonOpts& o) {
  const std::string text = read_file(input);
  const LoadedSeries s = load_series(text, o.config);

  auto report = make_report("shuffle-test", input, text, o.config);
  report.notes.push_back("repetitions=" + std::to_string(o.config.repetitions));
  auto& table = report.add_table(
      "shuffle", {"day", "n", "orig_alpha0", "orig_width", "orig_skew", "shuf_mean_alpha0",
                  "shuf_std_alpha0", "shuf_mean_width", "shuf_std_width", "shuf_mean_skew",
                  "shuf_std_skew", "n_alpha0", "n_width", "failures", "delta_alpha0",
                  "delta_width", "status"});

  std::size_t failures = 0;
  for (std::size_t d = 0; d < 5; ++d) {
    const std::string day(mfdfa::kWeekdayNames[d]);
    const auto& series = s.days.weekday[d];
    try {
      const auto rep = mfdfa::shuffle_test_series(series.returns, o.config, day);
      table.rows.push_back({day, std::to_string(series.size()), fmt(rep.original_alpha0),
                            fmt_opt(rep.original_width), fmt_opt(rep.original_skew),
                            fmt(rep.mean_alpha0), fmt(rep.std_alpha0), fmt(rep.mean_width),
                            fmt(rep.std_width), fmt(rep.mean_skew), fmt(rep.std_skew),
                            std::to_string(rep.n_alpha0), std::to_string(rep.n_width),
                            std::to_string(rep.failures), fmt_opt(rep.delta_alpha0),
                            fmt_opt(rep.delta_width), to_string(rep.original_outcome)});
    } catch (const mfdfa::Error& e) {
      ++failures;
      table.rows.push_back({day, std::to_string(series.size()), "", "", "", "", "", "", "", "",
                            "", "", "", "", "", "", std::string("failed:") + e.what()});
    }
  }

  const std::string body =
      o.format == "json" ? mfdfa::render_json(report) : mfdfa::render_csv(report);
  write_output(o.out, body);
  return failures == 5 ? kExitAnalysis : kExitOk;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------
int run_evolve(const std::string& input, CommonOpts& o) {
  const std::string text = read_file(input);
  const LoadedSeries s = load_series(text, o.config);

  auto report = make_report("evolve", input, text, o.config);
  // window timestamps are the last date inside each window
  report.notes.push_back("window_time=window_end_date");

  report.add_table("trace", {"window_end_date", "day", "alpha0", "width", "skew", "status"});
  report.add_table("difference", {"window_end_date", "day", "delta_alpha0", "delta_width"});
  auto& trace_table = report.tables[0];
  auto& diff_table = report.tables[1];

  std::vector<std::optional<mfdfa::SpectrumTrace>> traces(5);
  std::size_t failures = 0;
  for (std::size_t d = 0; d < 5; ++d) {
    const std::string day(mfdfa::kWeekdayNames[d]);
    const auto& series = s.days.weekday[d];
    try {
      const auto plan = mfdfa::plan_windows(series.size(), o.config.window, o.config.step);
      traces[d] = mfdfa::evolve_spectra(series, plan, o.config, day);
      const auto& tr = *traces[d];
      for (std::size_t t = 0; t < tr.plan.count; ++t) {
        trace_table.rows.push_back(
            {tr.window_times[t].to_string(), day,
             tr.alpha0[t] ? fmt(*tr.alpha0[t]) : "",
             tr.params[t] ? fmt(tr.params[t]->width) : "",
             tr.params[t] ? fmt(tr.params[t]->skew) : "", to_string(tr.outcomes[t])});
      }
    } catch (const mfdfa::Error& e) {
      ++failures;
      report.notes.push_back(day + "_failed=" + std::string(e.what()));
    }
  }

  if (traces[0]) {
    for (std::size_t d = 1; d < 5; ++d) {
      if (!traces[d]) continue;
      try {
        const auto diff = mfdfa::difference_trace(*traces[0], *traces[d]);
        for (std::size_t t = 0; t < diff.window_times.size(); ++t)
          diff_table.rows.push_back({diff.window_times[t].to_string(), diff.other_day,
                                     fmt(diff.delta_alpha0[t]), fmt_opt(diff.delta_width[t])});
      } catch (const mfdfa::Error& e) {
        report.notes.push_back("difference_" + std::string(mfdfa::kWeekdayNames[d]) +
                               "_failed=" + std::string(e.what()));
      }
    }
  } else {
    report.notes.push_back("difference_skipped=no Monday trace");
  }

  const std::string body =
      o.format == "json" ? mfdfa::render_json(report) : mfdfa::render_csv(report);
  write_output(o.out, body);
  return failures == 5 ? kExitAnalysis : kExitOk;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------
int run_synth(bool cascade, bool noise, double multiplier, int levels, std::size_t length,
              double hurst, std::uint64_t seed, const std::string& out) {
  if (cascade == noise)
    throw mfdfa::Error(mfdfa::errc::invalid_config, "pick exactly one of --cascade / --noise");
  std::vector<double> x;
  if (cascade)
    x = mfdfa::gen_binomial_cascade({multiplier, levels, seed});
  else
    x = mfdfa::gen_gaussian_noise({length, hurst, seed});

  // Emit N+1 prices whose log returns reproduce the series exactly; dates
  // cycle Monday..Friday so day resolution is exercisable on synthetic data.
  std::string body = "Date,Close\n";
  mfdfa::Date date = mfdfa::Date::parse("1970-01-05");  // a Monday
  double close = 100.0;
  body += date.to_string() + "," + mfdfa::format_double(close) + "\n";
  for (double r : x) {
    do {
      date = date.next_day();
    } while (date.is_weekend());
    close *= std::exp(r);
    body += date.to_string() + "," + mfdfa::format_double(close) + "\n";
  }
  write_output(out, body);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractal detrended fluctuation analysis of day-resolved returns"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "per-weekday complexity parameters");
  std::string analyze_input;
  bool with_spectra = false;
  std::string days_csv = "Monday,Tuesday,Wednesday,Thursday,Friday,All";
  CommonOpts analyze_opts;
  analyze->add_option("input", analyze_input, "price CSV")->required();
  analyze->add_flag("--spectra", with_spectra, "also emit the (alpha, f(alpha)) point sets");
  analyze->add_option("--days", days_csv, "comma list of Monday..Friday,All")
      ->capture_default_str();
  add_common_flags(analyze, analyze_opts);

  // shuffle-test
  auto* shuffle = app.add_subcommand("shuffle-test", "original vs shuffled complexity");
  std::string shuffle_input;
  CommonOpts shuffle_opts;
  shuffle->add_option("input", shuffle_input, "price CSV")->required();
  add_common_flags(shuffle, shuffle_opts);

  // evolve
  auto* evolve = app.add_subcommand("evolve", "sliding-window spectrum traces");
  std::string evolve_input;
  CommonOpts evolve_opts;
  evolve->add_option("input", evolve_input, "price CSV")->required();
  add_common_flags(evolve, evolve_opts);

  // synth
  auto* synth = app.add_subcommand("synth", "write synthetic series as a price CSV");
  bool synth_cascade = false, synth_noise = false;
  double synth_multiplier = 0.6, synth_hurst = 0.5;
  int synth_levels = 13;
  std::size_t synth_length = 8192;
  std::uint64_t synth_seed = 42;
  std::string synth_out = "-";
  synth->add_flag("--cascade", synth_cascade, "binomial multiplicative cascade");
  synth->add_flag("--noise", synth_noise, "gaussian / fractional gaussian noise");
  synth->add_option("--multiplier", synth_multiplier, "cascade multiplier a in [0.5,1)")
      ->capture_default_str();
  synth->add_option("--levels", synth_levels, "cascade levels k (length 2^k)")
      ->capture_default_str();
  synth->add_option("--length", synth_length, "noise length N")->capture_default_str();
  synth->add_option("--hurst", synth_hurst, "noise Hurst exponent in (0,1)")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "random seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output path ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      finalize_config(analyze_opts);
      std::vector<std::string> days;
      std::stringstream ss(days_csv);
      std::string token;
      while (std::getline(ss, token, ',')) days.push_back(token);
      return run_analyze(analyze_input, analyze_opts, with_spectra, std::move(days));
    }
    if (shuffle->parsed()) {
      finalize_config(shuffle_opts);
      return run_shuffle_test(shuffle_input, shuffle_opts);
    }
    if (evolve->parsed()) {
      finalize_config(evolve_opts);
      return run_evolve(evolve_input, evolve_opts);
    }
    if (synth->parsed()) {
      return run_synth(synth_cascade, synth_noise, synth_multiplier, synth_levels, synth_length,
                       synth_hurst, synth_seed, synth_out);
    }
  } catch (const mfdfa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == mfdfa::errc::invalid_config) return kExitUsage;
    return is_ingestion_error(e.code()) ? kExitIngestion : kExitAnalysis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return kExitUsage;
}

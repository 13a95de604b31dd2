// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

// Runs each acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles/brute_force.hpp"
#include "pseudoref/cli.hpp"
#include "pseudoref/fileio.hpp"
#include "pseudoref/report.hpp"
#include "pseudoref/scorer.hpp"
#include "pseudoref/stats.hpp"
#include "pseudoref/text.hpp"
#include "unit/test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pseudoref;
using pseudoref::testing::data_path;
using pseudoref::testing::read_file;
using pseudoref::testing::TempDir;

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct Criterion {
  std::string name;
  std::chrono::milliseconds budget;
  std::function<std::string()> body;  // returns a short note on success
};

// ---- aggregation ---------------------------------------------------------------

std::string aggregation() {
  const std::vector<double> rho{0.011, 0.005, 0.005, 0.000, -0.003};
  const std::vector<double> r{0.005, 0.005, 0.004, -0.008, -0.010};
  const std::pair<std::string, std::string> got[] = {
      {stats::format3(stats::aggregate(rho, stats::Aggregate::median)), "0.005"},
      {stats::format3(stats::aggregate(rho, stats::Aggregate::mean)), "0.004"},
      {stats::format3(stats::aggregate(r, stats::Aggregate::median)), "0.004"},
      {stats::format3(stats::aggregate(r, stats::Aggregate::mean)), "-0.001"},
  };
  for (const auto& [g, want] : got) require(g == want, "got " + g + ", want " + want);
  return "rho median/mean 0.005/0.004, r median/mean 0.004/-0.001";
}

// ---- growth ----------------------------------------------------------------------

struct PublishedCell {
  std::string model, column;
  double ours = 0, base = 0;
  long growth = 0;
};

std::vector<PublishedCell> published_growth_cells() {
  const auto doc = read_file(pseudoref::testing::source_dir() / "tests/acceptance/experiment1_published.tsv");
  std::vector<std::vector<std::string>> rows;
  for (auto line : text::split_lines(doc)) {
    if (text::is_blank(line)) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  require(rows.size() == 16, "fixture should hold a header and 15 rows");
  const auto& header = rows[0];
  std::vector<PublishedCell> cells;
  for (std::size_t i = 1; i + 2 < rows.size(); i += 3) {
    const auto &ours = rows[i], &base = rows[i + 1], &growth = rows[i + 2];
    require(ours[1] == "ours" && base[1] == "baseline" && growth[1] == "growth", "fixture row order");
    for (std::size_t c = 2; c < header.size(); ++c) {
      auto g = growth[c];
      require(!g.empty() && g.back() == '%', "growth cell " + g);
      g.pop_back();
      cells.push_back({ours[0], header[c], std::stod(ours[c]), std::stod(base[c]), std::stol(g)});
    }
  }
  return cells;
}

std::string growth() {
  const std::pair<std::pair<double, double>, std::string> exact[] = {
      {{0.56, 0.333}, "+68%"}, {{0.543, 0.379}, "+43%"}, {{0.347, 0.384}, "-10%"}, {{0.444, 0.089}, "+399%"}};
  for (const auto& [in, want] : exact) {
    const auto got = stats::format_growth(stats::growth_percent(in.first, in.second));
    require(got == want, "(" + fmt_double(in.first) + ", " + fmt_double(in.second) + ") gave " + got + ", want " + want);
  }

  std::size_t checked = 0, matched_exactly = 0;
  std::vector<std::string> sensitive;
  for (const auto& cell : published_growth_cells()) {
    const long got = stats::growth_percent(cell.ours, cell.base);
    if (cell.base < 0.05) {
      sensitive.push_back(cell.model + " " + cell.column + " " + std::to_string(got) + "% vs printed " +
                          std::to_string(cell.growth) + "%");
      continue;
    }
    ++checked;
    matched_exactly += got == cell.growth;
    const double rel = std::abs(static_cast<double>(got - cell.growth)) / std::max(1.0, std::abs(double(cell.growth)));
    require(rel <= 0.40, cell.model + " " + cell.column + ": " + std::to_string(got) + "% vs printed " +
                             std::to_string(cell.growth) + "%");
  }
  require(checked + sensitive.size() == 50, "expected 50 growth cells");
  std::string note = std::to_string(checked) + " cells within tolerance (" + std::to_string(matched_exactly) +
                     " exact); rounding-sensitive (baseline < 0.05):";
  for (const auto& s : sensitive) note += " [" + s + "]";
  return note;
}

// ---- correlation oracle ------------------------------------------------------------

std::string oracle_equivalence() {
  std::mt19937 rng(20240917);
  std::uniform_int_distribution<int> n_dist(2, 8);
  std::uniform_int_distribution<int> v_dist(0, 3);
  std::size_t degenerate = 0;
  const auto same = [](const std::optional<double>& a, const std::optional<double>& b) {
    return a.has_value() == b.has_value() && (!a || std::abs(*a - *b) <= 1e-12);
  };
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> xs, ys;
    const int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
      xs.push_back(v_dist(rng));
      ys.push_back(v_dist(rng));
    }
    const stats::PairedSample s(xs, ys);
    const auto where = " on sample " + std::to_string(k);
    require(same(stats::pearson(s), oracle::pearson(xs, ys)), "pearson" + where);
    require(same(stats::spearman(s), oracle::spearman(xs, ys)), "spearman" + where);
    require(same(stats::kendall_tau_b(s), oracle::kendall_tau_b(xs, ys)), "kendall_tau_b" + where);
    const stats::PairedSample ranked(stats::average_ranks(xs), stats::average_ranks(ys));
    require(same(stats::spearman(s), stats::pearson(ranked)), "spearman vs ranked pearson" + where);
    degenerate += !stats::pearson(s);
  }
  return "1000 tied samples agree to 1e-12 (" + std::to_string(degenerate) + " degenerate)";
}

// ---- failure accounting -------------------------------------------------------------

std::string failure_accounting() {
  const auto set = corpus::load_evaluation_set(data_path("ro-en-867.tsv"), corpus::DataFormat::tsv);
  require(set.size() == 867, "dataset has " + std::to_string(set.size()) + " segments");
  llm::GatewayOptions opts;
  opts.failure_rate = 0.5304475;
  llm::Gateway gateway(llm::BackendSpec{}, opts);
  scoring::ScoringContext ctx{gateway};
  const auto result = scoring::run_evaluation(set, scoring::Method::direct_scoring, ctx, 8);
  const auto t = result.manifest.totals();
  require(t.scored == 406 && t.failed == 461,
          "scored=" + std::to_string(t.scored) + " failed=" + std::to_string(t.failed));
  const auto rep = stats::correlate_pair(result.scores, set, corpus::LanguagePair::parse("ro-en"));
  require(rep.n_used == 406 && rep.n_excluded == 461, "n_used=" + std::to_string(rep.n_used));
  return "scored=406 failed=461 n_used=406";
}

// ---- end-to-end determinism -----------------------------------------------------------

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err, [](std::string_view) { return std::optional<std::string>(); });
  return {code, out.str(), err.str()};
}

std::size_t last_manifest_backend_calls(const fs::path& out_dir) {
  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(out_dir / "runs")) runs.push_back(e.path());
  std::sort(runs.begin(), runs.end());
  return nlohmann::json::parse(read_file(runs.back() / "manifest.json"))["backend_calls"].get<std::size_t>();
}

// One full pipeline: score (both methods), correlate, exp1. Returns the
// deterministic artifacts concatenated with separators.
std::string pipeline(const fs::path& cache, const fs::path& work, const std::string& parallelism, bool expect_warm) {
  const auto dataset = data_path("synthetic20.jsonl").string();
  std::string bytes;
  for (const std::string method : {"generation", "direct"}) {
    const auto out = work / method;
    const auto r = cli({"score", "--dataset", dataset, "--lexicon", data_path("lexicon20.json").string(), "--method",
                        method, "--cache-dir", cache.string(), "--out", out.string(), "--parallelism", parallelism});
    require(r.code == 0, "score " + method + " exited " + std::to_string(r.code) + ": " + r.err);
    const auto calls = last_manifest_backend_calls(out);
    require(!expect_warm || calls == 0, "warm " + method + " run made " + std::to_string(calls) + " backend calls");
    require(expect_warm || calls == 20, "cold " + method + " run made " + std::to_string(calls) + " backend calls");
    bytes += "== scores " + method + "\n" + read_file(out / "scores.jsonl");
    if (method == "generation") bytes += "== generations\n" + read_file(out / "generations.jsonl");
    const auto c = cli({"correlate", "--dataset", dataset, "--scores", (out / "scores.jsonl").string()});
    require(c.code == 0, "correlate exited " + std::to_string(c.code) + ": " + c.err);
    bytes += "== correlate " + method + "\n" + c.out;
  }
  const auto e = cli({"exp1", "--dataset", dataset, "--label", "mock", "--ours", (work / "generation/scores.jsonl").string(),
                      "--baseline", (work / "direct/scores.jsonl").string(), "--out", (work / "report").string()});
  require(e.code == 0, "exp1 exited " + std::to_string(e.code) + ": " + e.err);
  bytes += "== exp1.md\n" + read_file(work / "report/exp1.md") + "== exp1.csv\n" + read_file(work / "report/exp1.csv");
  return bytes;
}

std::string determinism() {
  TempDir a, b;
  const auto first = pipeline(a / "cache", a / "run1", "1", false);
  const auto second = pipeline(a / "cache", a / "run2", "1", true);
  const auto parallel = pipeline(b / "cache", b / "run", "4", false);
  require(first == second, "two runs differ");
  require(first == parallel, "parallelism 1 and 4 differ");
  return std::to_string(first.size()) + " bytes identical across runs and K=1/K=4; warm run made 0 backend calls";
}

// ---- identity pipeline ----------------------------------------------------------------

std::string identity() {
  const auto set = corpus::load_evaluation_set(data_path("synthetic20.jsonl"), corpus::DataFormat::jsonl);
  llm::GatewayOptions opts;
  for (const auto& s : set.segments()) opts.lexicon[s.src] = s.mt;
  llm::Gateway gateway(llm::BackendSpec{}, opts);
  embed::Embedder embedder(embed::EmbeddingProviderSpec{}, std::nullopt);
  scoring::ScoringContext ctx{gateway, &embedder};
  for (const auto& s : scoring::run_evaluation(set, scoring::Method::generation_based, ctx, 4).scores) {
    require(s.valid && std::abs(*s.value - 1.0) <= 1e-9, "segment " + s.segment_id + " scored " +
                                                             (s.value ? fmt_double(*s.value) : "nothing"));
  }

  // Human scores set to the predictions of an ordinary run.
  llm::GatewayOptions plain;
  plain.lexicon = llm::load_lexicon(data_path("lexicon20.json"));
  llm::Gateway gw2(llm::BackendSpec{}, plain);
  scoring::ScoringContext ctx2{gw2, &embedder};
  const auto scores = scoring::run_evaluation(set, scoring::Method::generation_based, ctx2, 4).scores;
  auto segs = set.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) segs[i].human_score = *scores[i].value;
  const corpus::EvaluationSet mirrored("mirrored", segs);
  for (const auto& rep : stats::correlate_all(scores, mirrored)) {
    for (const auto& v : {rep.rho, rep.r, rep.tau}) {
      require(v && std::abs(*v - 1.0) <= 1e-12, rep.lp.display() + " correlation " + (v ? fmt_double(*v) : "null"));
    }
  }
  return "20 scores of 1.0; rho = r = tau = 1 on mirrored human scores";
}

// ---- comparison flags --------------------------------------------------------------------

std::string comparison() {
  const auto sets = corpus::load_metric_scores(data_path("mtme_noref.csv"));
  const auto uk = corpus::LanguagePair::parse("uk-en");
  const auto flags = report::compare_cell(0.025, sets, uk, corpus::Statistic::rho);
  require(flags.exceeds_mean && flags.exceeds_median && flags.exceeds_best, "flags not all set");
  const std::vector rows{report::Experiment2Row{"ours", {{{uk, corpus::Statistic::rho}, 0.025}}}};
  const std::vector pairs{uk};
  const std::vector statistics{corpus::Statistic::rho};
  const auto md = report::render_experiment2(rows, sets, pairs, statistics, report::Format::markdown);
  require(md.find("| **0.025** |") != std::string::npos, "cell not bold");
  return "exceeds mean, median and best; markdown cell bold";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"aggregation", std::chrono::milliseconds(1000), aggregation},
      {"growth", std::chrono::milliseconds(1000), growth},
      {"correlation-oracle", std::chrono::milliseconds(5000), oracle_equivalence},
      {"failure-accounting", std::chrono::milliseconds(10000), failure_accounting},
      {"end-to-end-determinism", std::chrono::milliseconds(10000), determinism},
      {"identity-pipeline", std::chrono::milliseconds(10000), identity},
      {"comparison-flags", std::chrono::milliseconds(1000), comparison},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string note;
    bool ok = true;
    try {
      note = c.body();
    } catch (const std::exception& e) {
      ok = false;
      note = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (ok && ms > c.budget) {
      ok = false;
      note = "took " + std::to_string(ms.count()) + " ms, budget " + std::to_string(c.budget.count()) + " ms";
    }
    failures += !ok;
    std::printf("%s %-24s %6lld ms  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), static_cast<long long>(ms.count()),
                note.c_str());
  }
  return failures;
}

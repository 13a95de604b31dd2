// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pseudoref/corpus.hpp"
#include "pseudoref/embed.hpp"
#include "pseudoref/fileio.hpp"
#include "pseudoref/llm.hpp"
#include "pseudoref/prompt.hpp"
#include "pseudoref/report.hpp"
#include "pseudoref/scorer.hpp"
#include "pseudoref/scores.hpp"
#include "pseudoref/stats.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::cli {
namespace fs = std::filesystem;
namespace {

// Thrown for problems in input files supplied on the command line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

void require_file(const fs::path& p, std::string_view what) {
  if (!fs::exists(p)) throw config::ConfigError(std::string(what) + " not found: " + p.string());
}

corpus::EvaluationSet load_dataset(const config::RunConfig& cfg) {
  config::check_paths(cfg, true);
  return corpus::load_evaluation_set(*cfg.dataset, cfg.dataset_format());
}

std::vector<scoring::QualityScore> load_scores(const fs::path& p) {
  require_file(p, "score file");
  return scoring::parse_scores_jsonl(fileio::read_file(p));
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path fresh_run_dir(const fs::path& out_dir) {
  const auto stamp = utc_stamp();
  auto dir = out_dir / "runs" / stamp;
  for (int i = 1; fs::exists(dir); ++i) dir = out_dir / "runs" / (stamp + "-" + std::to_string(i));
  fs::create_directories(dir);
  return dir;
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json correlations_json(const corpus::EvaluationSet& set,
                                         const std::vector<scoring::QualityScore>& scores,
                                         const std::vector<stats::CorrelationReport>& reports) {
  nlohmann::ordered_json j;
  j["dataset"] = set.name();
  std::set<std::string> methods;
  for (const auto& s : scores) methods.insert(std::string(scoring::to_string(s.method)));
  j["method"] = methods.size() == 1 ? nlohmann::ordered_json(*methods.begin()) : nlohmann::ordered_json(nullptr);
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    pairs.push_back({{"lp", r.lp.display()},
                     {"rho", opt_json(r.rho)},
                     {"r", opt_json(r.r)},
                     {"tau", opt_json(r.tau)},
                     {"n_used", r.n_used},
                     {"n_excluded", r.n_excluded}});
  }
  return j;
}

std::vector<corpus::LanguagePair> parse_pair_list(std::string_view list) {
  std::vector<corpus::LanguagePair> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const auto item = text::trim(list.substr(start, end - start));
    if (!item.empty()) {
      try {
        out.push_back(corpus::LanguagePair::parse(item));
      } catch (const std::exception& e) {
        throw config::ConfigError("bad language pair '" + std::string(item) + "': " + e.what());
      }
    }
    start = end + 1;
  }
  return out;
}

std::vector<corpus::Statistic> parse_stat_list(std::string_view list) {
  std::vector<corpus::Statistic> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const auto item = text::trim(list.substr(start, end - start));
    if (!item.empty()) {
      auto s = corpus::parse_statistic(item);
      if (!s) throw config::ConfigError("unknown statistic '" + std::string(item) + "'");
      out.push_back(*s);
    }
    start = end + 1;
  }
  return out;
}

// ---- score -----------------------------------------------------------------

int cmd_score(const config::RunConfig& cfg, Io io) {
  const auto set = load_dataset(cfg);

  llm::GatewayOptions gopts;
  gopts.cache_dir = cfg.cache_dir;
  gopts.max_in_flight = cfg.parallelism;
  gopts.failure_rate = cfg.failure_rate;
  gopts.api_key = cfg.api_key;
  if (cfg.lexicon) gopts.lexicon = llm::load_lexicon(*cfg.lexicon);
  llm::Gateway gateway(cfg.backend, std::move(gopts));

  std::optional<embed::Embedder> embedder;
  if (cfg.method == scoring::Method::generation_based) {
    embedder.emplace(cfg.embedder, cfg.cache_dir);
    if (cfg.embedder.provider == embed::ProviderId::remote) {
      const auto dim = embedder->check_remote_health();
      if (dim != cfg.embedder.expected_dim) {
        throw config::ConfigError("embedding service reports dim " + std::to_string(dim) + ", expected " +
                                  std::to_string(cfg.embedder.expected_dim));
      }
    }
  }

  std::optional<prompt::PromptTemplate> gen_tpl;
  std::optional<prompt::PromptTemplate> direct_tpl;
  scoring::ScoringContext ctx{gateway, embedder ? &*embedder : nullptr};
  ctx.naming = cfg.naming;
  if (cfg.generation_prompt) {
    gen_tpl = prompt::PromptTemplate::from_file(prompt::TemplateId::generation, *cfg.generation_prompt);
    ctx.generation_template = &*gen_tpl;
  }
  if (cfg.direct_prompt) {
    direct_tpl = prompt::PromptTemplate::from_file(prompt::TemplateId::direct_scoring, *cfg.direct_prompt);
    ctx.direct_template = &*direct_tpl;
  }

  auto result = scoring::run_evaluation(set, cfg.method, ctx, cfg.parallelism);

  fileio::write_file_atomic(cfg.out_dir / "scores.jsonl", scoring::scores_to_jsonl(set, result.scores));
  if (cfg.method == scoring::Method::generation_based) {
    fileio::write_file_atomic(cfg.out_dir / "generations.jsonl", scoring::generations_to_jsonl(result.generations));
  }
  auto manifest = result.manifest.to_json();
  manifest["dataset_path"] = cfg.dataset->string();
  manifest["cache_dir"] = cfg.cache_dir.string();
  const auto run_dir = fresh_run_dir(cfg.out_dir);
  fileio::write_file_atomic(run_dir / "manifest.json", manifest.dump(2) + "\n");

  const auto totals = result.manifest.totals();
  io.err << "scored " << totals.scored << "/" << totals.total << " segments (" << totals.failed
         << " failed); backend calls " << result.manifest.backend_calls << ", cache hits "
         << result.manifest.completion_cache_hits << "; manifest " << (run_dir / "manifest.json").string() << "\n";

  if (totals.total > 0 && totals.scored == 0) {
    const bool backend_failures = std::any_of(result.scores.begin(), result.scores.end(), [](const auto& s) {
      return s.detail.starts_with("backend_failed");
    });
    if (backend_failures) throw BackendExhausted("no segment could be scored: backend failed for every segment");
  }
  return kExitOk;
}

// ---- correlate ---------------------------------------------------------------

int cmd_correlate(const config::RunConfig& cfg, const fs::path& scores_path, const std::optional<fs::path>& output,
                  Io io) {
  const auto set = load_dataset(cfg);
  const auto scores = load_scores(scores_path);
  const auto reports = stats::correlate_all(scores, set);
  const auto doc = correlations_json(set, scores, reports).dump(2) + "\n";
  if (output) {
    fileio::write_file_atomic(*output, doc);
  } else {
    io.out << doc;
  }
  return kExitOk;
}

// ---- exp1 --------------------------------------------------------------------

int cmd_exp1(const config::RunConfig& cfg, const std::vector<std::string>& labels,
             const std::vector<std::string>& ours, const std::vector<std::string>& baselines, Io io) {
  if (labels.empty() || labels.size() != ours.size() || labels.size() != baselines.size()) {
    throw config::ConfigError("exp1 needs matching counts of --label, --ours and --baseline");
  }
  const auto set = load_dataset(cfg);
  const auto pairs = set.language_pairs();
  std::vector<report::Experiment1Row> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto ours_reports = stats::correlate_all(load_scores(ours[i]), set);
    const auto base_reports = stats::correlate_all(load_scores(baselines[i]), set);
    report::Experiment1Row row{labels[i], {}};
    for (const auto& r : ours_reports) {
      auto& cell = row.pairs[r.lp];
      cell.rho_ours = r.rho;
      cell.r_ours = r.r;
    }
    for (const auto& r : base_reports) {
      auto& cell = row.pairs[r.lp];
      cell.rho_base = r.rho;
      cell.r_base = r.r;
    }
    rows.push_back(std::move(row));
  }
  const auto md = report::render_experiment1(rows, pairs, report::Format::markdown);
  const auto csv = report::render_experiment1(rows, pairs, report::Format::csv);
  fileio::write_file_atomic(cfg.out_dir / "exp1.md", md);
  fileio::write_file_atomic(cfg.out_dir / "exp1.csv", csv);
  io.err << "wrote " << (cfg.out_dir / "exp1.md").string() << " and exp1.csv\n";
  return kExitOk;
}

// ---- exp2 --------------------------------------------------------------------

struct OursCorrelations {
  std::string label;
  std::vector<corpus::LanguagePair> pairs;
  std::map<report::CellKey, double> values;
};

OursCorrelations load_correlations(const fs::path& p, std::string label) {
  require_file(p, "correlations file");
  OursCorrelations out;
  out.label = std::move(label);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(fileio::read_file(p));
    for (const auto& item : j.at("pairs")) {
      const auto lp = corpus::LanguagePair::parse(item.at("lp").get<std::string>());
      out.pairs.push_back(lp);
      for (auto stat : {corpus::Statistic::rho, corpus::Statistic::r, corpus::Statistic::tau}) {
        const auto key = std::string(corpus::to_string(stat));
        if (item.contains(key) && item[key].is_number()) out.values[{lp, stat}] = item[key].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(p.string() + ": malformed correlations file: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(p.string() + ": " + e.what());
  }
  return out;
}

int cmd_exp2(const config::RunConfig& cfg, const std::vector<std::string>& files, std::vector<std::string> labels,
             const std::string& stats_list, const std::string& pairs_list, Io io) {
  if (files.empty()) throw config::ConfigError("exp2 needs at least one --correlations file");
  if (!labels.empty() && labels.size() != files.size()) {
    throw config::ConfigError("exp2 needs one --label per --correlations file");
  }
  if (!cfg.metric_scores) throw config::ConfigError("exp2 needs --metric-scores");
  require_file(*cfg.metric_scores, "metric scores file");
  if (labels.empty()) {
    for (const auto& f : files) labels.push_back(fs::path(f).stem().string());
  }

  std::vector<report::Experiment2Row> rows;
  std::vector<corpus::LanguagePair> seen_pairs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto c = load_correlations(files[i], labels[i]);
    for (const auto& lp : c.pairs) {
      if (std::find(seen_pairs.begin(), seen_pairs.end(), lp) == seen_pairs.end()) seen_pairs.push_back(lp);
    }
    rows.push_back({std::move(c.label), std::move(c.values)});
  }
  const auto pairs = pairs_list.empty() ? seen_pairs : parse_pair_list(pairs_list);
  const auto statistics = parse_stat_list(stats_list);
  if (pairs.empty() || statistics.empty()) throw config::ConfigError("exp2 needs at least one pair and statistic");

  auto all_sets = corpus::load_metric_scores(*cfg.metric_scores);
  std::vector<corpus::MetricScoreSet> noref;
  for (auto& s : all_sets) {
    if (s.reference_free) noref.push_back(std::move(s));
  }
  if (noref.empty()) throw DataError("metric scores file holds no reference-free metrics");

  const auto md = report::render_experiment2(rows, noref, pairs, statistics, report::Format::markdown);
  const auto csv = report::render_experiment2(rows, noref, pairs, statistics, report::Format::csv);
  fileio::write_file_atomic(cfg.out_dir / "exp2.md", md);
  fileio::write_file_atomic(cfg.out_dir / "exp2.csv", csv);
  io.err << "wrote " << (cfg.out_dir / "exp2.md").string() << " and exp2.csv\n";
  return kExitOk;
}

// ---- cache stats -------------------------------------------------------------

struct DirUsage {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
};

DirUsage usage(const fs::path& root, std::string_view extension) {
  DirUsage u;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return u;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == extension) {
      ++u.entries;
      u.bytes += it->file_size();
    }
  }
  return u;
}

int cmd_cache_stats(const config::RunConfig& cfg, Io io) {
  const auto completions = usage(cfg.cache_dir / "completions", ".json");
  nlohmann::ordered_json j;
  j["cache_dir"] = cfg.cache_dir.string();
  j["completions"] = {{"entries", completions.entries}, {"bytes", completions.bytes}};
  auto& emb = j["embeddings"] = nlohmann::ordered_json::object();
  std::error_code ec;
  const auto emb_root = cfg.cache_dir / "embeddings";
  if (fs::is_directory(emb_root, ec)) {
    std::vector<fs::path> providers;
    for (const auto& e : fs::directory_iterator(emb_root, ec)) {
      if (e.is_directory()) providers.push_back(e.path());
    }
    std::sort(providers.begin(), providers.end());
    for (const auto& p : providers) {
      std::vector<fs::path> models;
      for (const auto& e : fs::directory_iterator(p, ec)) {
        if (e.is_directory()) models.push_back(e.path());
      }
      std::sort(models.begin(), models.end());
      for (const auto& m : models) {
        const auto u = usage(m, ".vec");
        emb[p.filename().string() + "/" + m.filename().string()] = {{"entries", u.entries}, {"bytes", u.bytes}};
      }
    }
  }
  io.out << j.dump(2) << "\n";
  return kExitOk;
}

// ---- option wiring -------------------------------------------------------------

class OptionBinder {
 public:
  explicit OptionBinder(config::Settings& flags) : flags_(flags) {}

  void add(CLI::App* app, const std::string& setting, const std::string& help) {
    std::string flag = "--" + setting;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto& flags = flags_;
    app->add_option_function<std::string>(
        flag, [&flags, setting](const std::string& v) { flags[setting] = v; }, help);
  }

  void add_config(CLI::App* app) {
    auto& flags = flags_;
    app->add_option_function<std::string>(
        "--config", [&flags](const std::string& v) { flags["config"] = v; }, "TOML configuration file");
  }

 private:
  config::Settings& flags_;
};

void add_dataset_options(OptionBinder& b, CLI::App* app) {
  b.add_config(app);
  b.add(app, "dataset", "evaluation set (JSONL or TSV)");
  b.add(app, "format", "dataset format: jsonl | tsv (default: by extension)");
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err, const config::EnvLookup& env) {
  CLI::App app{"Reference-free translation quality estimation with LLM pseudo-references", "pseudoref"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for all subcommands");

  config::Settings flags;
  OptionBinder bind(flags);

  auto* score = app.add_subcommand("score", "score every segment of a dataset");
  add_dataset_options(bind, score);
  bind.add(score, "method", "generation | direct");
  bind.add(score, "backend", "text-generation backend: mock | openai-compatible");
  bind.add(score, "endpoint", "backend base URL");
  bind.add(score, "model", "backend model id");
  bind.add(score, "temperature", "sampling temperature");
  bind.add(score, "max_retries", "retries on transient backend errors");
  bind.add(score, "embedder", "embedding provider: mock | remote | file");
  bind.add(score, "embed_endpoint", "embedding service base URL");
  bind.add(score, "embed_model", "embedding model id");
  bind.add(score, "expected_dim", "expected embedding dimension");
  bind.add(score, "parallelism", "concurrent segments");
  bind.add(score, "cache_dir", "cache directory");
  bind.add(score, "out", "output directory");
  bind.add(score, "prompt_file", "template overriding the built-in prompt of the chosen method");
  bind.add(score, "lexicon", "mock backend lexicon (JSON object src -> reference)");
  bind.add(score, "failure_rate", "mock backend failure-injection rate in [0, 1]");

  auto* correlate = app.add_subcommand("correlate", "correlate a score file with the human scores");
  add_dataset_options(bind, correlate);
  std::string scores_path;
  std::string correlate_output;
  correlate->add_option("--scores", scores_path, "score file written by `score`")->required();
  correlate->add_option("-o,--output", correlate_output, "write JSON here instead of stdout");

  auto* exp1 = app.add_subcommand("exp1", "ours vs. direct-scoring baseline report");
  add_dataset_options(bind, exp1);
  bind.add(exp1, "out", "report directory");
  std::vector<std::string> exp1_labels, exp1_ours, exp1_base;
  exp1->add_option("--label", exp1_labels, "model label (repeat per model)")->required();
  exp1->add_option("--ours", exp1_ours, "generation-based score file (repeat per model)")->required();
  exp1->add_option("--baseline", exp1_base, "direct-scoring score file (repeat per model)")->required();

  auto* exp2 = app.add_subcommand("exp2", "ours vs. reference-free metric report");
  bind.add_config(exp2);
  bind.add(exp2, "metric_scores", "metric correlations CSV (metric,ref_mode,lp,stat,value)");
  bind.add(exp2, "out", "report directory");
  std::vector<std::string> exp2_files, exp2_labels;
  std::string exp2_stats = "rho,r";
  std::string exp2_pairs;
  exp2->add_option("--correlations", exp2_files, "JSON written by `correlate` (repeat per model)")->required();
  exp2->add_option("--label", exp2_labels, "row label per correlations file");
  exp2->add_option("--stats", exp2_stats, "comma-separated statistics")->capture_default_str();
  exp2->add_option("--pairs", exp2_pairs, "comma-separated language pairs (default: those in the inputs)");

  auto* cache = app.add_subcommand("cache", "cache maintenance");
  cache->require_subcommand(1);
  auto* cache_stats = cache->add_subcommand("stats", "entry counts and sizes");
  bind.add_config(cache_stats);
  bind.add(cache_stats, "cache_dir", "cache directory");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("pseudoref");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const Io io{out, err};
  try {
    const auto cfg = config::resolve(flags, env);
    if (*score) return cmd_score(cfg, io);
    if (*correlate) {
      return cmd_correlate(cfg, scores_path,
                           correlate_output.empty() ? std::nullopt : std::optional<fs::path>(correlate_output), io);
    }
    if (*exp1) return cmd_exp1(cfg, exp1_labels, exp1_ours, exp1_base, io);
    if (*exp2) return cmd_exp2(cfg, exp2_files, exp2_labels, exp2_stats, exp2_pairs, io);
    if (*cache_stats) return cmd_cache_stats(cfg, io);
    err << "error: no subcommand\n";
    return kExitConfig;
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const prompt::PromptError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const corpus::CorpusError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const scoring::ScoreFileError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const stats::StatsError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const report::ReportError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const scoring::PipelineAborted& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const BackendExhausted& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const llm::BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return e.kind() == llm::BackendError::Kind::InvalidSpec ? kExitConfig : kExitBackend;
  } catch (const embed::EmbedError& e) {
    err << "embedding error: " << e.what() << "\n";
    return e.kind() == embed::EmbedError::Kind::InvalidSpec ? kExitConfig : kExitBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace pseudoref::cli

#include "intimacy/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <memory>

#include "intimacy/corpus.hpp"
#include "intimacy/csv.hpp"
#include "intimacy/ensemble.hpp"
#include "intimacy/error.hpp"
#include "intimacy/evaluation.hpp"
#include "intimacy/manifest.hpp"
#include "intimacy/regressor.hpp"
#include "intimacy/report.hpp"
#include "intimacy/translation.hpp"

namespace intimacy {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(const fs::path& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required option ") + flag);
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorCategory::io, "cannot create " + cfg.out.string() + ": " + ec.message());
}

std::optional<fs::path> external_adapter(const RunConfig& cfg) {
  constexpr std::string_view prefix = "external:";
  if (cfg.backbone == kHashGramBackboneId) return std::nullopt;
  if (cfg.backbone.starts_with(prefix) && cfg.backbone.size() > prefix.size()) {
    return fs::path(cfg.backbone.substr(prefix.size()));
  }
  throw UsageError("--backbone must be hashgram or external:<adapter>");
}

std::unique_ptr<TranslationBackend> make_backend(const RunConfig& cfg) {
  if (cfg.backend == "none") return std::make_unique<NullBackend>();
  if (cfg.backend.starts_with("mock:")) {
    return std::make_unique<StaticLookupBackend>(fs::path(cfg.backend.substr(5)));
  }
  if (cfg.backend.starts_with("http:")) {
    return std::make_unique<HttpTranslationBackend>(
        HttpTranslationBackend::from_environment(cfg.backend.substr(5)));
  }
  throw UsageError("--backend must be none, mock:<file> or http:<base-url>");
}

MissingTranslation policy(const RunConfig& cfg) {
  return cfg.fallback_original ? MissingTranslation::fallback_original : MissingTranslation::error;
}

Dataset load(const RunConfig& cfg, SplitTag tag) {
  require(cfg.data, "--data");
  return load_dataset(cfg.data, cfg.known_languages(), tag);
}

// Served from the cache file when given, from the backend on misses; new
// entries are written back to the cache file.
TranslationMap translations_for(const RunConfig& cfg, const Dataset& dataset, Manifest& manifest) {
  auto backend = make_backend(cfg);
  if (const auto& b = cfg.backend; b.starts_with("mock:")) {
    manifest.add_input("translation_table", fs::path(b.substr(5)));
  }
  TranslationCache cache(cfg.cache);
  if (!cfg.cache.empty() && fs::exists(cfg.cache)) manifest.add_input("translation_cache", cfg.cache);
  const std::size_t before = cache.size();
  auto map = translate_dataset(dataset, *backend, cache, policy(cfg));
  if (!cfg.cache.empty() && cache.size() != before) cache.save();
  return map;
}

std::vector<double> labels_of(const Dataset& d) {
  std::vector<double> labels;
  labels.reserve(d.size());
  for (const auto& r : d.records) {
    if (!r.score) throw Error(ErrorCategory::validation, "record " + r.id + " has no label", {r.id});
    labels.push_back(*r.score);
  }
  return labels;
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(csv::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::parse, path.string() + ": " + e.what(), {path.string()});
  }
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const auto data = load(cfg, SplitTag::train);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);
  const auto table = compute_statistics(data);
  write_statistics(cfg.out / "stats.csv", table);
  manifest.write(cfg.out);
  for (const auto& row : table.rows) {
    out << row.language << '\t' << row.count << '\t' << csv::format_fixed(row.avg_tokens, 2) << '\n';
  }
  return 0;
}

int cmd_translate(const RunConfig& cfg, std::ostream& out) {
  const auto data = load(cfg, SplitTag::train);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);
  const auto map = translations_for(cfg, data, manifest);

  std::string lines;
  for (const auto& r : data.records) {
    lines += nlohmann::json{{"id", r.id}, {"lang", r.language}, {"text", r.text},
                            {"translation", map.at(r.id)}}
                 .dump();
    lines += '\n';
  }
  write_file(cfg.out / "translations.jsonl", lines);
  manifest.write(cfg.out);
  out << "translated " << data.size() << " records\n";
  return 0;
}

int cmd_split(const RunConfig& cfg, std::ostream& out) {
  const auto data = load(cfg, SplitTag::train);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);
  manifest.set_derived_seeds({{"root", cfg.seed}, {"split", cfg.seed}});
  const auto [train_part, validation_part] = split_dataset(data, {cfg.ratio, cfg.seed});
  save_dataset(cfg.out / "train.csv", train_part);
  save_dataset(cfg.out / "validation.csv", validation_part);
  manifest.write(cfg.out);
  out << "train " << train_part.size() << ", validation " << validation_part.size() << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  if (external_adapter(cfg)) {
    throw UsageError("external backbones are trained outside this tool; use --backbone hashgram");
  }
  const auto data = load(cfg, SplitTag::train);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);

  std::vector<Strategy> strategies;
  if (cfg.routed) {
    strategies = {Strategy::original, Strategy::joint};
  } else {
    strategies = {parse_strategy(cfg.strategy)};
  }
  TranslationMap translations;
  const bool needs_translation =
      std::any_of(strategies.begin(), strategies.end(), [](Strategy s) { return s != Strategy::original; });
  if (needs_translation) translations = translations_for(cfg, data, manifest);

  const auto config = cfg.training_config();
  const auto labels = labels_of(data);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.ensemble_size; ++i) seeds.push_back(member_seed(cfg.seed, i));
  manifest.set_derived_seeds({{"root", cfg.seed}, {"ensemble_members", seeds}});

  for (const Strategy strategy : strategies) {
    const auto inputs = render_dataset(data, translations, strategy, policy(cfg));
    const auto members = train_ensemble(inputs, labels, config, cfg.ensemble_size, {}, cfg.threads);
    const fs::path dir = cfg.out / "models" / std::string(to_string(strategy));
    fs::create_directories(dir);
    nlohmann::json listing = nlohmann::json::array();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::string name = "member-" + std::to_string(i) + ".model";
      save_model(members[i], dir / name);
      listing.push_back(name);
    }
    nlohmann::json ensemble{{"strategy", to_string(strategy)},
                            {"backbone", std::string(kHashGramBackboneId)},
                            {"members", listing},
                            {"seeds", seeds}};
    write_file(dir / "ensemble.json", ensemble.dump(2) + "\n");
    out << "trained " << members.size() << ' ' << to_string(strategy) << " model(s) into "
        << dir.string() << '\n';
  }
  manifest.write(cfg.out);
  return 0;
}

EnsembleSpec load_ensemble(const fs::path& dir, Strategy expected) {
  const fs::path listing = dir / "ensemble.json";
  if (!fs::exists(listing)) {
    throw Error(ErrorCategory::storage, "no ensemble at " + dir.string(), {dir.string()});
  }
  const auto doc = read_json(listing);
  EnsembleSpec spec;
  try {
    spec.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    for (const auto& m : doc.at("members")) spec.members.push_back((dir / m.get<std::string>()).string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::storage, listing.string() + ": " + e.what(), {listing.string()});
  }
  if (spec.strategy != expected) {
    throw Error(ErrorCategory::storage,
                listing.string() + ": expected a " + std::string(to_string(expected)) + " ensemble",
                {listing.string()});
  }
  return spec;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  require(cfg.models, "--models");
  const auto adapter = external_adapter(cfg);
  const auto test = load(cfg, SplitTag::test);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);

  Router router;
  router.seen = cfg.seen_languages();
  router.unseen = cfg.unseen_languages();

  // Only languages that exist in the test data need an ensemble on disk.
  bool any_seen = false;
  bool any_unseen = false;
  for (const auto& r : test.records) {
    any_seen = any_seen || router.seen.contains(r.language);
    any_unseen = any_unseen || router.unseen.contains(r.language);
  }
  router.seen_ensemble = any_seen ? load_ensemble(cfg.models / "original", Strategy::original)
                                  : EnsembleSpec{{"unused"}, Strategy::original};
  router.unseen_ensemble = any_unseen ? load_ensemble(cfg.models / "joint", Strategy::joint)
                                      : EnsembleSpec{{"unused"}, Strategy::joint};

  Dataset needs_translation;
  for (const auto& r : test.records) {
    if (router.unseen.contains(r.language)) needs_translation.records.push_back(r);
  }
  const auto translations = needs_translation.empty()
                                ? TranslationMap{}
                                : translations_for(cfg, needs_translation, manifest);

  std::map<std::string, ModelHandle> loaded;
  MemberPredictor predictor = [&](const std::string& member, std::span<const RenderedInput> inputs) {
    if (adapter) return predict_external(*adapter, member, inputs, cfg.out / "adapter-work");
    auto it = loaded.find(member);
    if (it == loaded.end()) {
      manifest.add_input("model:" + fs::path(member).parent_path().filename().string() + "/" +
                             fs::path(member).filename().string(),
                         member);
      it = loaded.emplace(member, load_model(member)).first;
    }
    return predict(it->second, inputs);
  };

  const auto predictions = route_predict(router, test, translations, default_renderer(policy(cfg)),
                                         predictor, {cfg.clamp});
  write_predictions(cfg.out / "predictions.csv", predictions);
  manifest.write(cfg.out);
  out << "scored " << predictions.size() << " records\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  require(cfg.predictions, "--predictions");
  const auto gold = load(cfg, SplitTag::test);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("gold", cfg.data);
  manifest.add_input("predictions", cfg.predictions);
  const auto scores = read_prediction_scores(cfg.predictions);
  const auto report =
      evaluate_by_language(scores, gold, cfg.seen_languages(), cfg.unseen_languages());
  write_evaluation_report(cfg.out, report, manifest.metadata());
  manifest.write(cfg.out);
  for (const auto& [language, m] : report.per_language) {
    out << language << "\tr=" << (m.metrics.pearson_r ? csv::format_fixed(*m.metrics.pearson_r, 3) : "undefined")
        << "\tmse=" << csv::format_fixed(m.metrics.mse, 3) << '\n';
  }
  if (report.overall.pooled && report.overall.pooled->pearson_r) {
    out << "overall\tr=" << csv::format_fixed(*report.overall.pooled->pearson_r, 3) << '\n';
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  require(cfg.predictions, "--predictions");
  const auto gold = load(cfg, SplitTag::test);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("gold", cfg.data);
  manifest.add_input("predictions", cfg.predictions);
  write_distribution_report(cfg.out, gold, read_prediction_scores(cfg.predictions), manifest.metadata());
  manifest.write(cfg.out);
  out << "wrote histograms.csv, scatter.csv, summary.json\n";
  return 0;
}

int cmd_zeroshot(const RunConfig& cfg, std::ostream& out) {
  const auto data = load(cfg, SplitTag::train);
  prepare_out(cfg);
  Manifest manifest(cfg);
  manifest.add_input("data", cfg.data);
  manifest.set_derived_seeds({{"root", cfg.seed}, {"cells", cfg.seed}});

  std::vector<std::string> exclude;
  for (const auto& c : cfg.exclude) exclude.push_back(normalize_language(c));
  if (exclude.empty()) {
    for (const auto& language : data.languages()) {
      if (language != kEnglish) exclude.push_back(language);
    }
  }
  const auto translations = translations_for(cfg, data, manifest);
  GridOptions options;
  options.policy = policy(cfg);
  options.threads = cfg.threads;
  const auto grid = run_zero_shot_grid(data, translations, cfg.training_config(), exclude, options);
  write_grid(cfg.out, grid, manifest.metadata());
  manifest.write(cfg.out);
  out << "grid " << kGridRows.size() << " x " << exclude.size() << " written to "
      << (cfg.out / "grid.csv").string() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Multilingual tweet-intimacy experiment harness", "intimacy"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");

  app.add_option("--data", cfg.data, "Dataset CSV (text,label,language[,id])");
  app.add_option("--predictions", cfg.predictions, "Prediction CSV with id and score columns");
  app.add_option("--models", cfg.models, "Directory holding models/{original,joint} ensembles");
  app.add_option("--cache", cfg.cache, "Translation cache (JSON lines)");
  app.add_option("--backend", cfg.backend, "none | mock:<jsonl> | http:<base-url>");
  app.add_option("--backbone", cfg.backbone, "hashgram | external:<adapter>");
  app.add_option("--strategy", cfg.strategy, "Input representation")
      ->check(CLI::IsMember({"original", "translated", "joint"}));
  app.add_flag("--routed", cfg.routed, "train: build both the original and joint ensembles");
  app.add_option("--seed", cfg.seed, "Root seed");
  app.add_option("--epochs", cfg.epochs)->check(CLI::PositiveNumber);
  app.add_option("--batch-size", cfg.batch_size)->check(CLI::PositiveNumber);
  app.add_option("--max-len", cfg.max_sequence_length)->check(CLI::Range(8, 1 << 20));
  double lr = 0.0;
  auto* lr_option = app.add_option("--lr", lr, "Learning rate (default: backbone-specific)")
                        ->check(CLI::PositiveNumber);
  app.add_option("--ensemble-size", cfg.ensemble_size)->check(CLI::PositiveNumber);
  app.add_option("--ratio", cfg.ratio, "Training share of split")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--clamp", cfg.clamp, "Clamp predictions into [1, 5]");
  app.add_flag("--fallback-original", cfg.fallback_original,
               "Use the original text when a translation is unavailable");
  app.add_option("--languages", cfg.languages, "Known language codes")->delimiter(',');
  app.add_option("--seen", cfg.seen, "Languages routed to the original ensemble")->delimiter(',');
  app.add_option("--unseen", cfg.unseen, "Languages routed to the joint ensemble")->delimiter(',');
  app.add_option("--exclude", cfg.exclude, "Zero-shot grid columns")->delimiter(',');
  app.add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Output directory");

  const std::map<std::string, std::pair<std::string, int (*)(const RunConfig&, std::ostream&)>>
      commands{
          {"stats", {"Per-language counts and average token lengths", cmd_stats}},
          {"translate", {"Translate a dataset to English through the cache", cmd_translate}},
          {"split", {"Seeded train/validation split", cmd_split}},
          {"train", {"Train an ensemble of reference models", cmd_train}},
          {"predict", {"Score a dataset with language-routed ensembles", cmd_predict}},
          {"zeroshot", {"Leave-one-language-out representation grid", cmd_zeroshot}},
          {"evaluate", {"Per-language and aggregate Pearson r and MSE", cmd_evaluate}},
          {"report", {"Score distributions and scatter pairs", cmd_report}},
      };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  std::vector<const char*> argv{"intimacy"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  cfg.command = name;
  if (lr_option->count() > 0) cfg.learning_rate = lr;

  try {
    return commands.at(name).second(cfg, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error[" << to_string(e.category()) << "] " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[io] " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal] " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace intimacy

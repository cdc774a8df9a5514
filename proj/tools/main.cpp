#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "kgrec/config.hpp"
#include "kgrec/error.hpp"
#include "kgrec/log.hpp"
#include "kgrec/pipeline.hpp"
#include "kgrec/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "kgrec: knowledge-graph walk embeddings, item recommendations and "
      "cross-KG bias reports"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kgrec::kToolVersion);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  bool deterministic = true;
  std::string log_level = "info";

  app.add_option("--config", config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for parallel stages")
      ->check(CLI::PositiveNumber);
  app.add_option("--deterministic", deterministic,
                 "Bit-reproducible runs (true) or faster lock-free training "
                 "(false)");
  app.add_option("--log-level", log_level, "error, warn, info or debug");

  app.add_subcommand("ingest", "Parse the KG dumps and build the graph stores");
  app.add_subcommand("walk", "Generate random-walk corpora (implies ingest)");
  app.add_subcommand("embed", "Train entity embeddings (implies walk)");
  app.add_subcommand("recommend", "Write per-user top-N lists (implies embed)");
  app.add_subcommand("eval", "Score recommendations against the holdout");
  app.add_subcommand("bias", "Run the cross-KG feature bias analysis");
  app.add_subcommand("run", "Full pipeline including reports");
  app.add_subcommand("report", "Re-render text tables from a finished run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    kgrec::set_log_level(kgrec::parse_log_level(log_level));
    kgrec::ExperimentConfig cfg = kgrec::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    kgrec::RunOptions opts;
    opts.threads = threads;
    opts.deterministic = deterministic;

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "run") {
      kgrec::run_pipeline(cfg, opts);
    } else if (sub == "report") {
      kgrec::render_report(cfg);
    } else if (sub == "bias") {
      if (cfg.bias.features.empty())
        throw kgrec::ValidationError(
            "[bias] features is empty; nothing to analyze");
      kgrec::run_until(cfg, sub, opts);
    } else {
      kgrec::run_until(cfg, sub, opts);
    }
    return 0;
  } catch (const kgrec::ValidationError& e) {
    for (const auto& p : e.problems())
      std::fprintf(stderr, "error: %s\n", p.c_str());
    return 1;
  } catch (const kgrec::StageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.io_cause() ? 3 : 2;
  } catch (const kgrec::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

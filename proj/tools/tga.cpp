// tga: target gender annotation toolkit.
//
//   tga align           train aligners in both directions, write symmetrized
//                       Pharaoh alignments
//   tga annotate        project target gender onto the source side and write
//                       factor files
//   tga coref-annotate  inference-time annotations from coreference clusters
//   tga evaluate        WinoMT-style scoring
//   tga dropout         apply annotation dropout to existing factor files
//
// Every option can also be set from an INI file given with --config; global
// keys go at the top, command keys in a section named after the command.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tga/error.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int fail(const std::string& msg) {
  std::cerr << "tga: error: " << one_line(msg) << '\n';
  return 1;
}

// Output paths must land in an existing directory.
const CLI::Validator kWritable(
    [](std::string& path) -> std::string {
      auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent))
        return "directory does not exist: " + parent.string();
      return {};
    },
    "WRITABLE");

}  // namespace

int main(int argc, char** argv) {
  using namespace tga::cli;
  CLI::App app{"Target gender annotation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Global random seed");
  app.add_option("--threads", global.threads, "Worker threads")
      ->envname("TGA_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", global.verbosity, "Progress messages on stderr");

  AlignOptions align;
  auto* cmd_align = app.add_subcommand("align", "Word-align a parallel corpus");
  cmd_align->add_option("--source", align.source)->required()->check(CLI::ExistingFile);
  cmd_align->add_option("--target", align.target)->required()->check(CLI::ExistingFile);
  cmd_align->add_option("-o,--output", align.output, "Pharaoh alignment file")
      ->required()->check(kWritable);
  cmd_align->add_option("--model", align.model_prefix,
                        "Write models to PREFIX.s2t and PREFIX.t2s")
      ->check(kWritable);
  cmd_align->add_option("--iterations", align.aligner.iterations)
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd_align->add_option("--tension", align.aligner.diagonal_tension)
      ->capture_default_str();
  cmd_align->add_option("--p0", align.aligner.null_probability)->capture_default_str();
  bool fixed_tension = false;
  cmd_align->add_flag("--fixed-tension", fixed_tension, "Do not optimize the tension");
  cmd_align->add_option("--heuristic", align.heuristic, "Symmetrization")
      ->capture_default_str()
      ->check(CLI::IsMember({"intersection", "union", "grow-diag-final-and"}));

  AnnotateOptions annotate;
  auto* cmd_annotate =
      app.add_subcommand("annotate", "Project target gender onto source tokens");
  cmd_annotate->add_option("--source", annotate.source)->required()->check(CLI::ExistingFile);
  cmd_annotate->add_option("--target", annotate.target)->required()->check(CLI::ExistingFile);
  cmd_annotate->add_option("--conllu", annotate.conllu, "Tagged target side")
      ->required()->check(CLI::ExistingFile);
  cmd_annotate->add_option("--alignments", annotate.alignments, "Pharaoh file")
      ->required()->check(CLI::ExistingFile);
  cmd_annotate->add_option("--segmented-source", annotate.segmented,
                           "Subword-segmented source side")
      ->check(CLI::ExistingFile);
  cmd_annotate->add_option("--subword-marker", annotate.subword_marker)
      ->capture_default_str();
  cmd_annotate->add_option("-o,--output", annotate.output,
                           "Token file (or inline file with --inline)")
      ->required()->check(kWritable);
  cmd_annotate->add_option("--factors", annotate.factors, "Factor file")->check(kWritable);
  cmd_annotate->add_flag("--inline", annotate.inline_format, "Write token|TAG");
  cmd_annotate->add_flag("--two-copy", annotate.two_copy,
                         "Prepend a copy with every factor set to U");
  cmd_annotate->add_flag("--no-dropout", annotate.no_dropout);
  cmd_annotate->add_option("--dropout-mode", annotate.dropout_mode)
      ->capture_default_str()
      ->check(CLI::IsMember({"span_count", "per_token"}));
  cmd_annotate->add_option("--dropout-rate", annotate.dropout_rate)
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));

  CorefOptions coref;
  auto* cmd_coref = app.add_subcommand(
      "coref-annotate", "Annotate source sentences from coreference clusters");
  cmd_coref->add_option("--clusters", coref.clusters, "JSON lines, one per sentence")
      ->required()->check(CLI::ExistingFile);
  cmd_coref->add_option("--input", coref.input, "Sentences to check the clusters against")
      ->check(CLI::ExistingFile);
  cmd_coref->add_option("--lexicon", coref.lexicon, "surface<TAB>tag overrides")
      ->check(CLI::ExistingFile);
  cmd_coref->add_option("-o,--output", coref.output)->required()->check(kWritable);
  cmd_coref->add_option("--factors", coref.factors)->check(kWritable);
  cmd_coref->add_flag("--inline", coref.inline_format);

  EvaluateOptions eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Score translations");
  cmd_eval->add_option("--instances", eval.instances)->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--translations", eval.translations)->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--conllu", eval.conllu)->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--alignments", eval.alignments, "source-target Pharaoh file")
      ->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--format", eval.format)
      ->capture_default_str()->check(CLI::IsMember({"text", "tsv", "json"}));
  cmd_eval->add_option("-o,--output", eval.output, "Report file (default stdout)")
      ->check(kWritable);
  cmd_eval->add_option("--details", eval.details, "Per-instance judgments")
      ->check(kWritable);

  DropoutOptions drop;
  auto* cmd_drop = app.add_subcommand("dropout", "Apply annotation dropout");
  cmd_drop->add_option("--input", drop.input)->required()->check(CLI::ExistingFile);
  cmd_drop->add_option("--input-factors", drop.input_factors)->check(CLI::ExistingFile);
  cmd_drop->add_option("-o,--output", drop.output)->required()->check(kWritable);
  cmd_drop->add_option("--factors", drop.factors)->check(kWritable);
  cmd_drop->add_flag("--inline", drop.inline_format);
  cmd_drop->add_option("--dropout-mode", drop.dropout_mode)
      ->capture_default_str()
      ->check(CLI::IsMember({"span_count", "per_token"}));
  cmd_drop->add_option("--dropout-rate", drop.dropout_rate)
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(e.what());
  }

  try {
    align.aligner.optimize_tension = !fixed_tension;
    if (*cmd_align) run_align(global, align);
    if (*cmd_annotate) run_annotate(global, annotate);
    if (*cmd_coref) run_coref_annotate(global, coref);
    if (*cmd_eval) run_evaluate(global, eval);
    if (*cmd_drop) run_dropout(global, drop);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <string>

#include "tga/align.hpp"
#include "tga/links.hpp"
#include "tga/project.hpp"
#include "tga/winomt.hpp"

namespace tga::cli {

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: TGA_THREADS or 1
  int verbosity = 0;
};

struct AlignOptions {
  std::string source, target, output, model_prefix;
  AlignerConfig aligner;
  std::string heuristic = "grow-diag-final-and";
};

struct AnnotateOptions {
  std::string source, target, conllu, alignments, segmented;
  std::string output, factors;
  std::string subword_marker = std::string(kDefaultSubwordMarker);
  bool inline_format = false;
  bool two_copy = false;
  bool no_dropout = false;
  std::string dropout_mode = "span_count";
  double dropout_rate = 1.0;
};

struct CorefOptions {
  std::string input, clusters, lexicon, output, factors;
  bool inline_format = false;
};

struct EvaluateOptions {
  std::string instances, translations, conllu, alignments;
  std::string output, details;
  std::string format = "text";
};

struct DropoutOptions {
  std::string input, input_factors, output, factors;
  bool inline_format = false;
  std::string dropout_mode = "span_count";
  double dropout_rate = 1.0;
};

// Each command throws tga::Error on failure.
void run_align(const GlobalOptions& g, AlignOptions o);
void run_annotate(const GlobalOptions& g, const AnnotateOptions& o);
void run_coref_annotate(const GlobalOptions& g, const CorefOptions& o);
void run_evaluate(const GlobalOptions& g, const EvaluateOptions& o);
void run_dropout(const GlobalOptions& g, const DropoutOptions& o);

}  // namespace tga::cli

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "tga/coref.hpp"
#include "tga/corpus.hpp"
#include "tga/error.hpp"
#include "tga/parallel.hpp"
#include "tga/rng.hpp"
#include "tga/text.hpp"

namespace tga::cli {
namespace {

// Sentences processed per parallel batch; output is written in input order.
constexpr std::size_t kBatchSize = 4096;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(path + ": write failed");
  out.close();
}

void info(const GlobalOptions& g, const std::string& msg) {
  if (g.verbosity > 0) std::cerr << "tga: info: " << msg << '\n';
}

void warn_skips(std::size_t skipped) {
  if (skipped > 0)
    std::cerr << "tga: warning: skipped " << skipped
              << " sentence pair(s) with an empty side\n";
}

DropoutPolicy make_policy(const std::string& mode, double rate,
                          std::uint64_t global_seed) {
  auto m = parse_dropout_mode(mode);
  if (!m) throw Error("unknown dropout mode '" + mode + "'");
  DropoutPolicy p{*m, rate, stage_seed(global_seed, "dropout")};
  p.validate();
  return p;
}

// Writes factored sentences to one or two files.
class FactorSink {
 public:
  FactorSink(const std::string& output, const std::string& factors,
             bool inline_format)
      : output_path_(output), factors_path_(factors), tokens_(open_out(output)) {
    if (inline_format) {
      writer_.emplace(tokens_);
    } else {
      if (factors.empty())
        throw Error("a factor file is required unless --inline is given");
      factors_ = open_out(factors);
      writer_.emplace(tokens_, factors_);
    }
  }

  void write(const FactoredSentence& s) { writer_->write(s); }

  void close() {
    finish(tokens_, output_path_);
    if (!writer_->is_inline()) finish(factors_, factors_path_);
  }

 private:
  std::string output_path_, factors_path_;
  std::ofstream tokens_, factors_;
  std::optional<FactorWriter> writer_;
};

void append_file(const std::string& from, std::ofstream& to) {
  std::ifstream in = open_in(from);
  to << in.rdbuf();
}

}  // namespace

void run_align(const GlobalOptions& g, AlignOptions o) {
  auto heuristic = parse_symmetrization(o.heuristic);
  if (!heuristic) throw Error("unknown symmetrization '" + o.heuristic + "'");
  o.aligner.seed = stage_seed(g.seed, "align");
  o.aligner.threads = resolve_threads(g.threads);
  o.aligner.validate();

  std::ifstream src = open_in(o.source), tgt = open_in(o.target);
  ParallelReader reader(src, tgt);
  std::vector<RawPair> corpus;
  // line index of each retained pair; skipped lines get an empty output line
  std::vector<std::size_t> line_of;
  while (auto p = reader.next()) {
    corpus.push_back(std::move(*p));
    line_of.push_back(reader.lines_read());
  }
  warn_skips(reader.skips().skipped);
  if (corpus.empty()) throw Error("corpus has no usable sentence pairs");

  info(g, "training source-to-target model on " + std::to_string(corpus.size()) +
              " pairs");
  auto fwd = train(corpus, o.aligner, Direction::kSourceToTarget);
  info(g, "training target-to-source model");
  auto bwd = train(corpus, o.aligner, Direction::kTargetToSource);

  if (!o.model_prefix.empty()) {
    for (const auto* model : {&fwd, &bwd}) {
      const std::string path =
          o.model_prefix +
          (model->direction == Direction::kSourceToTarget ? ".s2t" : ".t2s");
      std::ofstream out = open_out(path);
      write_model(out, *model);
      finish(out, path);
    }
  }

  std::ofstream out = open_out(o.output);
  std::vector<std::string> lines;
  std::size_t written_lines = 0;
  for (std::size_t begin = 0; begin < corpus.size(); begin += kBatchSize) {
    const std::size_t end = std::min(corpus.size(), begin + kBatchSize);
    lines.assign(end - begin, {});
    parallel_for(end - begin, o.aligner.threads, [&](std::size_t k) {
      const RawPair& p = corpus[begin + k];
      lines[k] = write_pharaoh(symmetrize(viterbi_pair(fwd, p),
                                          viterbi_pair(bwd, p), *heuristic));
    });
    for (std::size_t k = 0; k < lines.size(); ++k) {
      for (; written_lines + 1 < line_of[begin + k]; ++written_lines) out << '\n';
      out << lines[k] << '\n';
      ++written_lines;
    }
  }
  for (; written_lines < reader.lines_read(); ++written_lines) out << '\n';
  finish(out, o.output);
}

void run_annotate(const GlobalOptions& g, const AnnotateOptions& o) {
  const unsigned threads = resolve_threads(g.threads);
  std::optional<DropoutPolicy> policy;
  if (!o.no_dropout) policy = make_policy(o.dropout_mode, o.dropout_rate, g.seed);

  std::ifstream src = open_in(o.source), tgt = open_in(o.target);
  std::ifstream conllu_in = open_in(o.conllu), align_in = open_in(o.alignments);
  std::optional<std::ifstream> seg_in;
  if (!o.segmented.empty()) seg_in.emplace(open_in(o.segmented));
  ConlluReader conllu(conllu_in);
  PharaohReader aligns(align_in);
  std::optional<LineReader> segs;
  if (seg_in) segs.emplace(*seg_in);

  FactorSink sink(o.output, o.factors, o.inline_format);
  // Copy B goes to side files and is appended after copy A.
  const std::string tmp_out = o.output + ".copy-b.tmp";
  const std::string tmp_fac = o.factors.empty() ? "" : o.factors + ".copy-b.tmp";
  std::optional<FactorSink> copy_b;
  if (o.two_copy) copy_b.emplace(tmp_out, tmp_fac, o.inline_format);

  struct Item {
    SentencePair pair;
    AlignmentLinkSet links;
    std::optional<Tokens> segmented;
    std::size_t ordinal;
  };
  std::vector<Item> batch;
  std::vector<FactoredSentence> results;
  std::size_t line_no = 0, skipped = 0, ordinal = 0;

  auto flush = [&] {
    results.assign(batch.size(), {});
    parallel_for(batch.size(), threads, [&](std::size_t k) {
      Item& it = batch[k];
      FactoredSentence f = project_gender(it.pair, it.links);
      if (it.segmented)
        f = replicate_subword_factors(f, *it.segmented, o.subword_marker);
      if (policy) f = tga_dropout(f, *policy, it.ordinal);
      results[k] = std::move(f);
    });
    for (auto& f : results) {
      if (copy_b) {
        sink.write(force_unannotated(f));
        copy_b->write(f);
      } else {
        sink.write(f);
      }
    }
    batch.clear();
  };

  std::string sline, tline;
  for (;;) {
    const bool hs = read_line(src, sline);
    const bool ht = read_line(tgt, tline);
    if (!hs && !ht) break;
    ++line_no;
    if (hs != ht)
      throw Error("source and target differ in line count at line " +
                  std::to_string(line_no));
    auto links = aligns.next();
    if (!links)
      throw Error(o.alignments + ": fewer lines than the corpus (ends before line " +
                  std::to_string(line_no) + ")");
    std::optional<Tokens> seg;
    if (segs) {
      seg = segs->next();
      if (!seg)
        throw Error(o.segmented + ": fewer lines than the corpus (ends before line " +
                    std::to_string(line_no) + ")");
    }
    RawPair raw{split_whitespace(sline), split_whitespace(tline)};
    std::optional<TaggedSentence> tagged;
    if (!raw.target.empty()) {
      tagged = conllu.next();
      if (!tagged)
        throw Error(o.conllu + ": fewer sentences than non-empty target lines (line " +
                    std::to_string(line_no) + ")");
    }
    if (raw.source.empty() || raw.target.empty()) {
      ++skipped;
      continue;
    }
    SentencePair pair = zip_tagged(std::move(raw), std::move(*tagged), line_no - 1);
    AlignmentLinkSet linkset;
    try {
      linkset = AlignmentLinkSet(pair.source.size(), pair.target.size(), *links);
    } catch (const Error& e) {
      throw ParseError(o.alignments + ": " + e.what(), line_no);
    }
    batch.push_back({std::move(pair), std::move(linkset), std::move(seg), ordinal++});
    if (batch.size() == kBatchSize) flush();
  }
  flush();
  if (aligns.next()) throw Error(o.alignments + ": more lines than the corpus");
  if (conllu.next()) throw Error(o.conllu + ": more sentences than the corpus");
  if (segs && segs->next()) throw Error(o.segmented + ": more lines than the corpus");
  warn_skips(skipped);

  if (copy_b) {
    copy_b->close();
    sink.close();
    std::ofstream out(o.output, std::ios::binary | std::ios::app);
    append_file(tmp_out, out);
    finish(out, o.output);
    std::filesystem::remove(tmp_out);
    if (!o.inline_format) {
      std::ofstream fac(o.factors, std::ios::binary | std::ios::app);
      append_file(tmp_fac, fac);
      finish(fac, o.factors);
      std::filesystem::remove(tmp_fac);
    }
  } else {
    sink.close();
  }
  info(g, "annotated " + std::to_string(ordinal) + " sentence pairs");
}

void run_coref_annotate(const GlobalOptions& g, const CorefOptions& o) {
  const unsigned threads = resolve_threads(g.threads);
  PronounLexicon lexicon = default_lexicon();
  if (!o.lexicon.empty()) {
    std::ifstream lex = open_in(o.lexicon);
    lexicon.load(lex);
  }
  std::ifstream clusters_in = open_in(o.clusters);
  std::optional<std::ifstream> input;
  if (!o.input.empty()) input.emplace(open_in(o.input));
  FactorSink sink(o.output, o.factors, o.inline_format);

  std::vector<std::pair<std::string, std::optional<Tokens>>> batch;
  std::vector<FactoredSentence> results;
  std::size_t first_line = 1;
  auto flush = [&] {
    results.assign(batch.size(), {});
    parallel_for(batch.size(), threads, [&](std::size_t k) {
      const auto& [json, sentence] = batch[k];
      try {
        CorefClusterSet c = sentence ? parse_clusters(json, *sentence)
                                     : parse_clusters(json);
        results[k] = infer_annotations(c.tokens, c, lexicon);
      } catch (const Error& e) {
        throw ParseError(o.clusters + ": " + e.what(), first_line + k);
      }
    });
    for (const auto& r : results) sink.write(r);
    first_line += batch.size();
    batch.clear();
  };

  std::string json, sentence;
  std::size_t line_no = 0;
  for (;;) {
    const bool hc = read_line(clusters_in, json);
    const bool hi = input ? read_line(*input, sentence) : hc;
    if (!hc && !hi) break;
    ++line_no;
    if (hc != hi)
      throw Error("cluster file and input differ in line count at line " +
                  std::to_string(line_no));
    std::optional<Tokens> toks;
    if (input) toks = split_whitespace(sentence);
    batch.emplace_back(json, std::move(toks));
    if (batch.size() == kBatchSize) flush();
  }
  flush();
  sink.close();
  info(g, "annotated " + std::to_string(line_no) + " sentences");
}

void run_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
  auto format = parse_report_format(o.format);
  if (!format) throw Error("unknown report format '" + o.format + "'");
  std::ifstream inst_in = open_in(o.instances);
  std::vector<WinoMTInstance> instances = load_winomt_tsv(inst_in);

  std::ifstream tr_in = open_in(o.translations), conllu_in = open_in(o.conllu),
                al_in = open_in(o.alignments);
  LineReader translations(tr_in);
  ConlluReader conllu(conllu_in);
  PharaohReader aligns(al_in);

  std::vector<AntecedentJudgment> judgments;
  judgments.reserve(instances.size());
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const std::string where = " (instance " + std::to_string(k + 1) + ")";
    auto tr = translations.next();
    if (!tr) throw Error(o.translations + ": fewer lines than instances" + where);
    auto links = aligns.next();
    if (!links) throw Error(o.alignments + ": fewer lines than instances" + where);
    std::optional<TaggedSentence> tagged;
    if (!tr->empty()) {
      tagged = conllu.next();
      if (!tagged) throw Error(o.conllu + ": fewer sentences than translations" + where);
      RawPair raw{instances[k].source, *tr};
      zip_tagged(std::move(raw), *tagged, k);
    } else {
      tagged = TaggedSentence{};
    }
    std::size_t max_src = 0, max_tgt = 0;
    for (const Link& l : *links) {
      max_src = std::max(max_src, l.src + 1);
      max_tgt = std::max(max_tgt, l.tgt + 1);
    }
    AlignmentLinkSet linkset(std::max(max_src, instances[k].source.size()),
                             std::max(max_tgt, tagged->size()), *links);
    judgments.push_back(judge(instances[k], *tagged, linkset));
  }
  if (translations.next()) throw Error(o.translations + ": more lines than instances");
  if (aligns.next()) throw Error(o.alignments + ": more lines than instances");
  if (conllu.next()) throw Error(o.conllu + ": more sentences than translations");

  MetricsReport report = aggregate(instances, judgments);
  const std::string rendered = render_report(report, *format);
  if (o.output.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out = open_out(o.output);
    out << rendered;
    finish(out, o.output);
  }
  if (!o.details.empty()) {
    std::ofstream out = open_out(o.details);
    write_judgments_tsv(out, instances, judgments);
    finish(out, o.details);
  }
  info(g, "evaluated " + std::to_string(instances.size()) + " instances");
}

void run_dropout(const GlobalOptions& g, const DropoutOptions& o) {
  const unsigned threads = resolve_threads(g.threads);
  const DropoutPolicy policy = make_policy(o.dropout_mode, o.dropout_rate, g.seed);
  std::ifstream in = open_in(o.input);
  std::optional<std::ifstream> fin;
  if (!o.inline_format) {
    if (o.input_factors.empty())
      throw Error("--input-factors is required unless --inline is given");
    fin.emplace(open_in(o.input_factors));
  }
  FactorSink sink(o.output, o.factors, o.inline_format);

  std::vector<FactoredSentence> batch;
  std::size_t ordinal = 0;
  auto flush = [&] {
    const std::size_t base = ordinal - batch.size();
    parallel_for(batch.size(), threads, [&](std::size_t k) {
      batch[k] = tga_dropout(batch[k], policy, base + k);
    });
    for (const auto& s : batch) sink.write(s);
    batch.clear();
  };
  std::string tl, fl;
  std::size_t line_no = 0;
  for (;;) {
    const bool ht = read_line(in, tl);
    const bool hf = fin ? read_line(*fin, fl) : ht;
    if (!ht && !hf) break;
    ++line_no;
    if (ht != hf)
      throw ParseError("token and factor files differ in line count", line_no);
    batch.push_back(o.inline_format ? parse_inline_line(tl, line_no)
                                    : parse_factor_lines(tl, fl, line_no));
    ++ordinal;
    if (batch.size() == kBatchSize) flush();
  }
  flush();
  sink.close();
}

}  // namespace tga::cli

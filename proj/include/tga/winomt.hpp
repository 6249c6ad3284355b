#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tga/coref.hpp"
#include "tga/corpus.hpp"
#include "tga/gender.hpp"
#include "tga/links.hpp"

namespace tga {

enum class Stereotype { kPro, kAnti };

std::string_view to_string(Stereotype s);

// One challenge item: the antecedent profession, its gold gender (M or F)
// and whether that gender matches the profession's stereotype.
struct WinoMTInstance {
  std::string id;
  Tokens source;
  MentionSpan entity;
  GenderTag gold = GenderTag::M;
  Stereotype stereotype = Stereotype::kPro;
};

// Predicted gender U means no evidence was found.
struct AntecedentJudgment {
  std::string id;
  GenderTag predicted = GenderTag::U;
  bool correct = false;
};

struct GenderScores {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
};

struct MetricsReport {
  double accuracy = 0.0;  // percent
  double delta_g = 0.0;   // F1(M) - F1(F), percentage points
  double delta_s = 0.0;   // Acc(pro) - Acc(anti), percentage points
  // #predicted M / #predicted F; +inf when only the denominator is zero,
  // 0 when both are.
  double mf_ratio = 0.0;
  GenderScores masculine;
  GenderScores feminine;

  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t gold_masculine = 0;
  std::size_t gold_feminine = 0;
  std::size_t pro = 0;
  std::size_t anti = 0;
  std::size_t predicted_masculine = 0;
  std::size_t predicted_feminine = 0;
  std::size_t predicted_neuter = 0;
  std::size_t unknown = 0;
};

// Links are (instance source, translation) positions. The judged token is
// the leftmost aligned noun; without aligned nouns, the leftmost aligned
// token with a gender. Links outside either sentence are ignored.
AntecedentJudgment judge(const WinoMTInstance& instance,
                         const TaggedSentence& translation,
                         const AlignmentLinkSet& links);

// Judgments are matched to instances by id. Throws tga::Error on unmatched
// or duplicate ids.
MetricsReport aggregate(const std::vector<WinoMTInstance>& instances,
                        const std::vector<AntecedentJudgment>& judgments);

// Rows: gold gender (male/female or M/F), entity ("k" or "start:end", end
// exclusive), sentence, stereotype (pro/anti), optional id. Rows without an
// id get their 0-based row index. Throws ParseError with the row number.
std::vector<WinoMTInstance> load_winomt_tsv(std::istream& in);
WinoMTInstance parse_winomt_row(std::string_view row, std::size_t row_no);

enum class ReportFormat { kText, kTsv, kJson };

std::optional<ReportFormat> parse_report_format(std::string_view name);

// Percentages and the M:F ratio are rounded to one decimal. An infinite
// M:F ratio renders as "inf".
std::string render_report(const MetricsReport& report, ReportFormat format);

// id, gold, predicted, correct, stereotype; one header row.
void write_judgments_tsv(std::ostream& out,
                         const std::vector<WinoMTInstance>& instances,
                         const std::vector<AntecedentJudgment>& judgments);

}  // namespace tga

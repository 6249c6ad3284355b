#include "tga/winomt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "tga/error.hpp"
#include "tga/text.hpp"

namespace tga {

std::string_view to_string(Stereotype s) {
  return s == Stereotype::kPro ? "pro" : "anti";
}

AntecedentJudgment judge(const WinoMTInstance& instance,
                         const TaggedSentence& translation,
                         const AlignmentLinkSet& links) {
  AntecedentJudgment out{instance.id, GenderTag::U, false};
  std::vector<std::size_t> aligned;
  for (const Link& l : links.links()) {
    if (l.src < instance.entity.start || l.src >= instance.entity.end) continue;
    if (l.tgt >= translation.size() || l.tgt >= translation.tags.size()) continue;
    aligned.push_back(l.tgt);
  }
  std::sort(aligned.begin(), aligned.end());
  aligned.erase(std::unique(aligned.begin(), aligned.end()), aligned.end());

  std::optional<std::size_t> chosen;
  if (translation.has_pos()) {
    for (std::size_t j : aligned)
      if (j < translation.pos.size() && translation.pos[j] == "NOUN") {
        chosen = j;
        break;
      }
  }
  if (!chosen) {
    for (std::size_t j : aligned)
      if (is_gendered(translation.tags[j])) {
        chosen = j;
        break;
      }
  }
  if (chosen) out.predicted = translation.tags[*chosen];
  out.correct = out.predicted == instance.gold;
  return out;
}

namespace {

double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) /
                              static_cast<double>(den);
}

GenderScores scores(std::size_t tp, std::size_t fp, std::size_t fn) {
  GenderScores s;
  s.precision = percent(tp, tp + fp);
  s.recall = percent(tp, tp + fn);
  s.f1 = s.precision + s.recall == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

MetricsReport aggregate(const std::vector<WinoMTInstance>& instances,
                        const std::vector<AntecedentJudgment>& judgments) {
  std::map<std::string, const AntecedentJudgment*> by_id;
  for (const auto& j : judgments)
    if (!by_id.emplace(j.id, &j).second)
      throw Error("duplicate judgment for instance '" + j.id + "'");
  if (judgments.size() != instances.size())
    throw Error(std::to_string(judgments.size()) + " judgments for " +
                std::to_string(instances.size()) + " instances");

  MetricsReport r;
  std::size_t tp_m = 0, fp_m = 0, fn_m = 0, tp_f = 0, fp_f = 0, fn_f = 0;
  std::size_t pro_correct = 0, anti_correct = 0;
  std::map<std::string, int> seen;
  for (const auto& inst : instances) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end())
      throw Error("no judgment for instance '" + inst.id + "'");
    if (seen[inst.id]++)
      throw Error("duplicate instance id '" + inst.id + "'");
    const GenderTag pred = it->second->predicted;
    const bool correct = pred == inst.gold;

    ++r.total;
    if (correct) ++r.correct;
    if (inst.gold == GenderTag::M) ++r.gold_masculine;
    if (inst.gold == GenderTag::F) ++r.gold_feminine;
    if (inst.stereotype == Stereotype::kPro) {
      ++r.pro;
      if (correct) ++pro_correct;
    } else {
      ++r.anti;
      if (correct) ++anti_correct;
    }
    switch (pred) {
      case GenderTag::M: ++r.predicted_masculine; break;
      case GenderTag::F: ++r.predicted_feminine; break;
      case GenderTag::N: ++r.predicted_neuter; break;
      case GenderTag::U: ++r.unknown; break;
    }
    // Neuter and unknown predictions are misses for the gold class only.
    if (inst.gold == GenderTag::M) (pred == GenderTag::M ? tp_m : fn_m)++;
    if (inst.gold == GenderTag::F) (pred == GenderTag::F ? tp_f : fn_f)++;
    if (pred == GenderTag::M && inst.gold != GenderTag::M) ++fp_m;
    if (pred == GenderTag::F && inst.gold != GenderTag::F) ++fp_f;
  }

  r.accuracy = percent(r.correct, r.total);
  r.masculine = scores(tp_m, fp_m, fn_m);
  r.feminine = scores(tp_f, fp_f, fn_f);
  r.delta_g = r.masculine.f1 - r.feminine.f1;
  r.delta_s = percent(pro_correct, r.pro) - percent(anti_correct, r.anti);
  if (r.predicted_feminine > 0)
    r.mf_ratio = static_cast<double>(r.predicted_masculine) /
                 static_cast<double>(r.predicted_feminine);
  else
    r.mf_ratio = r.predicted_masculine > 0
                     ? std::numeric_limits<double>::infinity()
                     : 0.0;
  return r;
}

WinoMTInstance parse_winomt_row(std::string_view row, std::size_t row_no) {
  auto cols = split(row, '\t');
  if (cols.size() != 4 && cols.size() != 5)
    throw ParseError("expected 4 or 5 tab-separated columns, found " +
                         std::to_string(cols.size()),
                     row_no);
  WinoMTInstance inst;
  std::string_view gender = trim(cols[0]);
  if (gender == "male" || gender == "M")
    inst.gold = GenderTag::M;
  else if (gender == "female" || gender == "F")
    inst.gold = GenderTag::F;
  else
    throw ParseError("gold gender must be male or female, got '" +
                         std::string(gender) + "'",
                     row_no);

  inst.source = split_whitespace(cols[2]);
  if (inst.source.empty()) throw ParseError("empty sentence", row_no);

  std::string_view span = trim(cols[1]);
  auto colon = span.find(':');
  bool ok = false;
  if (colon == std::string_view::npos) {
    ok = parse_size(span, inst.entity.start);
    inst.entity.end = inst.entity.start + 1;
  } else {
    ok = parse_size(span.substr(0, colon), inst.entity.start) &&
         parse_size(span.substr(colon + 1), inst.entity.end);
  }
  if (!ok) throw ParseError("invalid entity span '" + std::string(span) + "'", row_no);
  if (!(inst.entity.start < inst.entity.end &&
        inst.entity.end <= inst.source.size()))
    throw ParseError("entity span '" + std::string(span) +
                         "' is empty or outside the " +
                         std::to_string(inst.source.size()) + "-token sentence",
                     row_no);

  std::string_view stereo = trim(cols[3]);
  if (stereo == "pro")
    inst.stereotype = Stereotype::kPro;
  else if (stereo == "anti")
    inst.stereotype = Stereotype::kAnti;
  else
    throw ParseError("stereotype must be pro or anti, got '" +
                         std::string(stereo) + "'",
                     row_no);
  if (cols.size() == 5) {
    inst.id = std::string(trim(cols[4]));
    if (inst.id.empty()) throw ParseError("empty instance id", row_no);
  }
  return inst;
}

std::vector<WinoMTInstance> load_winomt_tsv(std::istream& in) {
  std::vector<WinoMTInstance> out;
  std::string line;
  std::size_t row_no = 0;
  while (read_line(in, line)) {
    ++row_no;
    if (trim(line).empty()) throw ParseError("empty row", row_no);
    WinoMTInstance inst = parse_winomt_row(line, row_no);
    if (inst.id.empty()) inst.id = std::to_string(out.size());
    out.push_back(std::move(inst));
  }
  return out;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "json") return ReportFormat::kJson;
  return std::nullopt;
}

namespace {

double round1(double v) {
  double r = std::round(v * 10.0) / 10.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string fmt1(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", round1(v));
  return buf;
}

struct Field {
  const char* text_label;
  const char* key;
  std::string value;
  nlohmann::ordered_json json;
};

std::vector<Field> fields(const MetricsReport& r) {
  auto pct = [](double v) { return nlohmann::ordered_json(round1(v)); };
  auto count = [](std::size_t v) { return nlohmann::ordered_json(v); };
  nlohmann::ordered_json mf = std::isinf(r.mf_ratio)
                                  ? nlohmann::ordered_json("inf")
                                  : nlohmann::ordered_json(round1(r.mf_ratio));
  return {
      {"Acc.", "accuracy", fmt1(r.accuracy), pct(r.accuracy)},
      {"dG", "delta_g", fmt1(r.delta_g), pct(r.delta_g)},
      {"dS", "delta_s", fmt1(r.delta_s), pct(r.delta_s)},
      {"M:F", "mf_ratio", fmt1(r.mf_ratio), mf},
      {"P(M)", "precision_m", fmt1(r.masculine.precision), pct(r.masculine.precision)},
      {"R(M)", "recall_m", fmt1(r.masculine.recall), pct(r.masculine.recall)},
      {"F1(M)", "f1_m", fmt1(r.masculine.f1), pct(r.masculine.f1)},
      {"P(F)", "precision_f", fmt1(r.feminine.precision), pct(r.feminine.precision)},
      {"R(F)", "recall_f", fmt1(r.feminine.recall), pct(r.feminine.recall)},
      {"F1(F)", "f1_f", fmt1(r.feminine.f1), pct(r.feminine.f1)},
      {"Total", "total", std::to_string(r.total), count(r.total)},
      {"Correct", "correct", std::to_string(r.correct), count(r.correct)},
      {"Gold(M)", "gold_m", std::to_string(r.gold_masculine), count(r.gold_masculine)},
      {"Gold(F)", "gold_f", std::to_string(r.gold_feminine), count(r.gold_feminine)},
      {"Pro", "pro", std::to_string(r.pro), count(r.pro)},
      {"Anti", "anti", std::to_string(r.anti), count(r.anti)},
      {"Pred(M)", "predicted_m", std::to_string(r.predicted_masculine), count(r.predicted_masculine)},
      {"Pred(F)", "predicted_f", std::to_string(r.predicted_feminine), count(r.predicted_feminine)},
      {"Pred(N)", "predicted_n", std::to_string(r.predicted_neuter), count(r.predicted_neuter)},
      {"Unknown", "unknown", std::to_string(r.unknown), count(r.unknown)},
  };
}

}  // namespace

std::string render_report(const MetricsReport& report, ReportFormat format) {
  const auto fs = fields(report);
  std::string out;
  switch (format) {
    case ReportFormat::kText:
      for (const auto& f : fs) {
        out += f.text_label;
        out += ' ';
        out += f.value;
        out += '\n';
      }
      return out;
    case ReportFormat::kTsv: {
      std::string header, row;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) {
          header += '\t';
          row += '\t';
        }
        header += fs[i].key;
        row += fs[i].value;
      }
      return header + '\n' + row + '\n';
    }
    case ReportFormat::kJson: {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& f : fs) j[f.key] = f.json;
      return j.dump(2) + '\n';
    }
  }
  return out;
}

void write_judgments_tsv(std::ostream& out,
                         const std::vector<WinoMTInstance>& instances,
                         const std::vector<AntecedentJudgment>& judgments) {
  if (instances.size() != judgments.size())
    throw Error("judgment count does not match instance count");
  out << "id\tgold\tpredicted\tcorrect\tstereotype\n";
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& inst = instances[k];
    const auto& j = judgments[k];
    if (inst.id != j.id)
      throw Error("judgment '" + j.id + "' is out of order with instance '" +
                  inst.id + "'");
    out << inst.id << '\t' << to_string(inst.gold) << '\t'
        << (j.predicted == GenderTag::U ? "unknown" : to_string(j.predicted))
        << '\t' << (j.correct ? "true" : "false") << '\t'
        << to_string(inst.stereotype) << '\n';
  }
}

}  // namespace tga

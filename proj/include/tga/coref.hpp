#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tga/corpus.hpp"
#include "tga/gender.hpp"
#include "tga/project.hpp"

namespace tga {

// Token span [start, end).
struct MentionSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const MentionSpan&) const = default;
};

using CorefCluster = std::vector<MentionSpan>;

struct CorefClusterSet {
  Tokens tokens;
  std::vector<CorefCluster> clusters;
};

// Parses {"tokens": [...], "clusters": [[[start, end], ...], ...]}.
// Throws tga::Error on malformed JSON, empty or out-of-range spans.
CorefClusterSet parse_clusters(std::string_view json_text);

// Same, and checks that the document's tokens equal `sentence` exactly.
CorefClusterSet parse_clusters(std::string_view json_text,
                               const Tokens& sentence);

// Case-insensitive map from pronoun surface to F or M.
class PronounLexicon {
 public:
  // Throws tga::Error for tags other than F and M.
  void set(std::string_view surface, GenderTag tag);
  std::optional<GenderTag> lookup(std::string_view surface) const;
  std::size_t size() const { return entries_.size(); }

  // Adds or replaces entries from "surface<TAB>tag" lines. Blank lines and
  // lines starting with '#' are ignored.
  void load(std::istream& in);

 private:
  std::map<std::string, GenderTag> entries_;
};

// English personal pronouns: he/him/his/himself -> M, she/her/hers/herself -> F.
PronounLexicon default_lexicon();

// Propagates pronoun gender through each cluster onto every token of every
// mention. Clusters without a gendered pronoun, with conflicting pronouns,
// or overlapping a cluster of the other gender leave their tokens U.
FactoredSentence infer_annotations(const Tokens& tokens,
                                   const CorefClusterSet& clusters,
                                   const PronounLexicon& lexicon);

}  // namespace tga

#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tga {

struct Link {
  std::size_t src = 0;
  std::size_t tgt = 0;
  auto operator<=>(const Link&) const = default;
};

// Word alignment for one sentence pair. Links are kept sorted by (src, tgt)
// and free of duplicates.
class AlignmentLinkSet {
 public:
  AlignmentLinkSet() = default;
  AlignmentLinkSet(std::size_t src_len, std::size_t tgt_len)
      : src_len_(src_len), tgt_len_(tgt_len) {}
  // Throws tga::Error if a link is out of range.
  AlignmentLinkSet(std::size_t src_len, std::size_t tgt_len,
                   std::vector<Link> links);

  // Throws tga::Error if the link is out of range. Duplicates are ignored.
  void add(Link link);
  bool contains(Link link) const;

  std::size_t src_len() const { return src_len_; }
  std::size_t tgt_len() const { return tgt_len_; }
  const std::vector<Link>& links() const { return links_; }
  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }

  // Swaps the roles of source and target.
  AlignmentLinkSet transposed() const;

  // Target positions aligned to source position i, ascending.
  std::vector<std::size_t> targets_of(std::size_t i) const;

  bool operator==(const AlignmentLinkSet&) const = default;

 private:
  std::size_t src_len_ = 0;
  std::size_t tgt_len_ = 0;
  std::vector<Link> links_;
};

enum class Symmetrization { kIntersection, kUnion, kGrowDiagFinalAnd };

std::optional<Symmetrization> parse_symmetrization(std::string_view name);
std::string_view to_string(Symmetrization heuristic);

// `forward` is in (source, target) orientation; `backward` comes from the
// reverse model and is in (target, source) orientation. Throws tga::Error on
// mismatched sentence lengths.
AlignmentLinkSet symmetrize(const AlignmentLinkSet& forward,
                            const AlignmentLinkSet& backward,
                            Symmetrization heuristic);

// Pharaoh format: "i-j i-j ..." ascending by (i, j); empty string for no
// links.
std::string write_pharaoh(const AlignmentLinkSet& links);
std::string write_pharaoh(const std::vector<Link>& links);

// Parses one Pharaoh line. `line_no` is used in error messages only.
std::vector<Link> read_pharaoh(std::string_view line, std::size_t line_no = 0);

// Parses one line and validates it against the sentence lengths.
AlignmentLinkSet read_pharaoh(std::string_view line, std::size_t src_len,
                              std::size_t tgt_len, std::size_t line_no = 0);

// Streaming reader over a Pharaoh file, one sentence pair per line.
class PharaohReader {
 public:
  explicit PharaohReader(std::istream& in) : in_(in) {}
  std::optional<std::vector<Link>> next();
  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace tga

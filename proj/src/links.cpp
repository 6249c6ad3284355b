#include "tga/links.hpp"

#include <algorithm>
#include <istream>

#include "tga/error.hpp"
#include "tga/text.hpp"

namespace tga {

AlignmentLinkSet::AlignmentLinkSet(std::size_t src_len, std::size_t tgt_len,
                                   std::vector<Link> links)
    : src_len_(src_len), tgt_len_(tgt_len), links_(std::move(links)) {
  for (const Link& l : links_)
    if (l.src >= src_len_ || l.tgt >= tgt_len_)
      throw Error("link " + std::to_string(l.src) + "-" +
                  std::to_string(l.tgt) + " out of range for " +
                  std::to_string(src_len_) + "x" + std::to_string(tgt_len_) +
                  " sentence pair");
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

void AlignmentLinkSet::add(Link link) {
  if (link.src >= src_len_ || link.tgt >= tgt_len_)
    throw Error("link " + std::to_string(link.src) + "-" +
                std::to_string(link.tgt) + " out of range for " +
                std::to_string(src_len_) + "x" + std::to_string(tgt_len_) +
                " sentence pair");
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it != links_.end() && *it == link) return;
  links_.insert(it, link);
}

bool AlignmentLinkSet::contains(Link link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

AlignmentLinkSet AlignmentLinkSet::transposed() const {
  std::vector<Link> flipped;
  flipped.reserve(links_.size());
  for (const Link& l : links_) flipped.push_back({l.tgt, l.src});
  return AlignmentLinkSet(tgt_len_, src_len_, std::move(flipped));
}

std::vector<std::size_t> AlignmentLinkSet::targets_of(std::size_t i) const {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(links_.begin(), links_.end(), Link{i, 0});
  for (; it != links_.end() && it->src == i; ++it) out.push_back(it->tgt);
  return out;
}

std::optional<Symmetrization> parse_symmetrization(std::string_view name) {
  if (name == "intersection") return Symmetrization::kIntersection;
  if (name == "union") return Symmetrization::kUnion;
  if (name == "grow-diag-final-and") return Symmetrization::kGrowDiagFinalAnd;
  return std::nullopt;
}

std::string_view to_string(Symmetrization heuristic) {
  switch (heuristic) {
    case Symmetrization::kIntersection: return "intersection";
    case Symmetrization::kUnion: return "union";
    case Symmetrization::kGrowDiagFinalAnd: return "grow-diag-final-and";
  }
  return "grow-diag-final-and";
}

namespace {

// Dense boolean grid over an n x m sentence pair, row-major by source index.
class Grid {
 public:
  Grid(std::size_t n, std::size_t m) : n_(n), m_(m), cells_(n * m, 0) {}
  bool at(std::size_t i, std::size_t j) const { return cells_[i * m_ + j]; }
  void set(std::size_t i, std::size_t j) { cells_[i * m_ + j] = 1; }

 private:
  std::size_t n_, m_;
  std::vector<char> cells_;
};

AlignmentLinkSet grow_diag_final_and(const AlignmentLinkSet& fwd,
                                     const AlignmentLinkSet& bwd) {
  const std::size_t n = fwd.src_len(), m = fwd.tgt_len();
  Grid uni(n, m), cur(n, m);
  std::vector<char> src_aligned(n, 0), tgt_aligned(m, 0);
  for (const Link& l : fwd.links()) uni.set(l.src, l.tgt);
  for (const Link& l : bwd.links()) uni.set(l.src, l.tgt);

  AlignmentLinkSet out(n, m);
  auto add = [&](std::size_t i, std::size_t j) {
    cur.set(i, j);
    src_aligned[i] = 1;
    tgt_aligned[j] = 1;
    out.add({i, j});
  };
  for (const Link& l : fwd.links())
    if (bwd.contains(l)) add(l.src, l.tgt);

  static constexpr int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0},  {0, 1},
                                           {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  bool added = true;
  while (added) {
    added = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!cur.at(i, j)) continue;
        for (const auto& d : kNeighbors) {
          const auto ni = static_cast<std::ptrdiff_t>(i) + d[0];
          const auto nj = static_cast<std::ptrdiff_t>(j) + d[1];
          if (ni < 0 || nj < 0 || ni >= static_cast<std::ptrdiff_t>(n) ||
              nj >= static_cast<std::ptrdiff_t>(m))
            continue;
          const auto ui = static_cast<std::size_t>(ni);
          const auto uj = static_cast<std::size_t>(nj);
          if (cur.at(ui, uj) || !uni.at(ui, uj)) continue;
          if (!src_aligned[ui] || !tgt_aligned[uj]) {
            add(ui, uj);
            added = true;
          }
        }
      }
    }
  }

  // final-and
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (uni.at(i, j) && !src_aligned[i] && !tgt_aligned[j]) add(i, j);
  return out;
}

}  // namespace

AlignmentLinkSet symmetrize(const AlignmentLinkSet& forward,
                            const AlignmentLinkSet& backward,
                            Symmetrization heuristic) {
  if (forward.src_len() != backward.tgt_len() ||
      forward.tgt_len() != backward.src_len())
    throw Error("cannot symmetrize: forward alignment is " +
                std::to_string(forward.src_len()) + "x" +
                std::to_string(forward.tgt_len()) +
                " but backward alignment is " +
                std::to_string(backward.src_len()) + "x" +
                std::to_string(backward.tgt_len()));
  const AlignmentLinkSet bwd = backward.transposed();
  switch (heuristic) {
    case Symmetrization::kIntersection: {
      std::vector<Link> links;
      std::set_intersection(forward.links().begin(), forward.links().end(),
                            bwd.links().begin(), bwd.links().end(),
                            std::back_inserter(links));
      return AlignmentLinkSet(forward.src_len(), forward.tgt_len(),
                              std::move(links));
    }
    case Symmetrization::kUnion: {
      std::vector<Link> links;
      std::set_union(forward.links().begin(), forward.links().end(),
                     bwd.links().begin(), bwd.links().end(),
                     std::back_inserter(links));
      return AlignmentLinkSet(forward.src_len(), forward.tgt_len(),
                              std::move(links));
    }
    case Symmetrization::kGrowDiagFinalAnd:
      return grow_diag_final_and(forward, bwd);
  }
  return grow_diag_final_and(forward, bwd);
}

std::string write_pharaoh(const std::vector<Link>& links) {
  std::vector<Link> sorted = links;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(sorted[k].src);
    out += '-';
    out += std::to_string(sorted[k].tgt);
  }
  return out;
}

std::string write_pharaoh(const AlignmentLinkSet& links) {
  return write_pharaoh(links.links());
}

std::vector<Link> read_pharaoh(std::string_view line, std::size_t line_no) {
  std::vector<Link> out;
  for (const std::string& item : split_whitespace(line)) {
    auto dash = item.find('-');
    Link link;
    if (dash == std::string::npos ||
        !parse_size(std::string_view(item).substr(0, dash), link.src) ||
        !parse_size(std::string_view(item).substr(dash + 1), link.tgt))
      throw ParseError("malformed alignment link '" + item + "'", line_no);
    out.push_back(link);
  }
  return out;
}

AlignmentLinkSet read_pharaoh(std::string_view line, std::size_t src_len,
                              std::size_t tgt_len, std::size_t line_no) {
  auto links = read_pharaoh(line, line_no);
  for (const Link& l : links)
    if (l.src >= src_len || l.tgt >= tgt_len)
      throw ParseError("alignment link " + std::to_string(l.src) + "-" +
                           std::to_string(l.tgt) + " out of range for " +
                           std::to_string(src_len) + "x" +
                           std::to_string(tgt_len) + " sentence pair",
                       line_no);
  return AlignmentLinkSet(src_len, tgt_len, std::move(links));
}

std::optional<std::vector<Link>> PharaohReader::next() {
  std::string line;
  if (!read_line(in_, line)) return std::nullopt;
  ++line_no_;
  return read_pharaoh(line, line_no_);
}

}  // namespace tga

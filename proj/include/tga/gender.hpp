#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace tga {

// Grammatical gender annotation carried by a token on either side of a
// sentence pair. U marks tokens whose gender is unavailable.
enum class GenderTag : std::uint8_t { F, M, N, U };

inline constexpr GenderTag kAllTags[] = {GenderTag::F, GenderTag::M,
                                         GenderTag::N, GenderTag::U};

constexpr char to_char(GenderTag tag) {
  switch (tag) {
    case GenderTag::F: return 'F';
    case GenderTag::M: return 'M';
    case GenderTag::N: return 'N';
    case GenderTag::U: return 'U';
  }
  return 'U';
}

constexpr std::string_view to_string(GenderTag tag) {
  switch (tag) {
    case GenderTag::F: return "F";
    case GenderTag::M: return "M";
    case GenderTag::N: return "N";
    case GenderTag::U: return "U";
  }
  return "U";
}

constexpr std::optional<GenderTag> parse_gender_tag(std::string_view s) {
  if (s == "F") return GenderTag::F;
  if (s == "M") return GenderTag::M;
  if (s == "N") return GenderTag::N;
  if (s == "U") return GenderTag::U;
  return std::nullopt;
}

constexpr bool is_gendered(GenderTag tag) { return tag != GenderTag::U; }

}  // namespace tga

#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace tga {

// Splits on runs of ASCII whitespace; leading and trailing whitespace is
// ignored.
std::vector<std::string> split_whitespace(std::string_view line);

// Splits on every occurrence of `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// getline that also drops a trailing '\r'.
bool read_line(std::istream& in, std::string& line);

bool parse_size(std::string_view s, std::size_t& out);

}  // namespace tga

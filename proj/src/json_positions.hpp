#pragma once

#include <map>
#include <string>
#include <string_view>

namespace cssd::detail {

struct TextPosition {
    int line = 0;
    int column = 0;
};

/// Maps field paths ("design.eta", "sources[2].tau_sq") to where their value
/// starts in the source text. Expects text that already parsed as JSON;
/// returns an empty map if it cannot follow the structure.
std::map<std::string, TextPosition> index_json_positions(std::string_view text);

}  // namespace cssd::detail

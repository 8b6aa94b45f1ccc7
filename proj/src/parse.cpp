#include "rankaudit/parse.hpp"

#include <cctype>
#include <regex>

namespace rankaudit {

namespace {

const std::regex kHouseholdRef(
    R"(\bhouse\s?hold[\s*_'"`:#-]*([ab])\b)",
    std::regex::icase | std::regex::optimize);

const std::regex kActionRef(
    R"(\b(?:choose|chose|select|selected|pick|picked|prioritize[sd]?|recommend(?:ed)?|answer(?:\s+is)?|choice(?:\s+is)?)\s*[:\-]?\s*(?:option\s+)?([ab])\b)",
    std::regex::icase | std::regex::optimize);

const std::regex kOptionRef(
    R"(\boption[\s*_'"`:#-]*([ab])\b)",
    std::regex::icase | std::regex::optimize);

// A bare one-letter reply ("A", "B.", "b)") counts as a selection of the
// whole trimmed response only.
const std::regex kBareLetter(R"(^\s*[*_'"`]*([ab])[*_'"`]*\s*[.):\]]?\s*$)",
                             std::regex::icase | std::regex::optimize);

void collect(const std::regex& re, const std::string& text, bool& saw_a, bool& saw_b) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(
            (*it)[1].str()[0])));
        if (c == 'a') saw_a = true;
        if (c == 'b') saw_b = true;
    }
}

}  // namespace

std::optional<std::string> parse_verdict(const std::string& response_text,
                                         const std::string& left_id,
                                         const std::string& right_id) {
    bool saw_a = false, saw_b = false;
    collect(kHouseholdRef, response_text, saw_a, saw_b);
    collect(kActionRef, response_text, saw_a, saw_b);
    collect(kOptionRef, response_text, saw_a, saw_b);

    std::smatch m;
    if (std::regex_match(response_text, m, kBareLetter)) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(m[1].str()[0])));
        if (c == 'a') saw_a = true;
        if (c == 'b') saw_b = true;
    }

    if (saw_a == saw_b) return std::nullopt;  // none or both: ambiguous
    return saw_a ? std::optional<std::string>(left_id) : std::optional<std::string>(right_id);
}

}  // namespace rankaudit

#pragma once

#include <optional>
#include <string>

namespace rankaudit {

// Extracts the selected item from a judge reply. The pair is always presented
// as "Household A" (left) and "Household B" (right). Returns the referenced
// item id when exactly one household is selected, and nothing when no
// selection pattern matches or both households are referenced: the parser
// never guesses and never returns a token outside {left_id, right_id}.
std::optional<std::string> parse_verdict(const std::string& response_text,
                                         const std::string& left_id,
                                         const std::string& right_id);

}  // namespace rankaudit

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace consentscan::textclass {

/// Languages with a bundled stopword list, in tie-break order.
const std::vector<std::string>& supported_languages();
const std::vector<std::string>& stopwords(const std::string& language);

/// ISO-639-1 code of the language whose stopword list has the largest fraction
/// present among the text's tokens; "und" when fewer than 3 tokens or the best
/// fraction is below 0.02.
std::string detect_language(std::string_view text);

} // namespace consentscan::textclass

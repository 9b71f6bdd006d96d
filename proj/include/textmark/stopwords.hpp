#pragma once

#include <string>
#include <unordered_set>

namespace textmark {

// Bundled stop-word lists, looked up by id. "en-v1" is the shipped English
// list; "none" disables stop-word removal. Unknown ids throw.
const std::unordered_set<std::string>& stopword_list(const std::string& id);

bool stopword_list_exists(const std::string& id);

}  // namespace textmark

#include "textmark/stopwords.hpp"

#include "textmark/common.hpp"

namespace textmark {

namespace {

// en-v1: fixed English list. Frozen; changing it would silently change every
// corpus digest and trigger set built with it, so additions go into a new id.
const std::unordered_set<std::string>& en_v1() {
    static const std::unordered_set<std::string> words = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves",
        "you", "your", "yours", "yourself", "yourselves",
        "he", "him", "his", "himself", "she", "her", "hers", "herself",
        "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
        "what", "which", "who", "whom", "this", "that", "these", "those",
        "am", "is", "are", "was", "were", "be", "been", "being",
        "have", "has", "had", "having", "do", "does", "did", "doing",
        "a", "an", "the", "and", "but", "if", "or", "because", "as",
        "until", "while", "of", "at", "by", "for", "with", "about", "against",
        "between", "into", "through", "during", "before", "after", "above", "below",
        "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
        "again", "further", "then", "once", "here", "there", "when", "where",
        "why", "how", "all", "any", "both", "each", "few", "more", "most",
        "other", "some", "such", "no", "nor", "not", "only", "own", "same",
        "so", "than", "too", "very", "s", "t", "can", "will", "just",
        "don", "should", "now",
    };
    return words;
}

const std::unordered_set<std::string>& empty_list() {
    static const std::unordered_set<std::string> words;
    return words;
}

}  // namespace

const std::unordered_set<std::string>& stopword_list(const std::string& id) {
    if (id == "en-v1") return en_v1();
    if (id == "none") return empty_list();
    throw Error("unknown stop-word list id: " + id);
}

bool stopword_list_exists(const std::string& id) {
    return id == "en-v1" || id == "none";
}

}  // namespace textmark

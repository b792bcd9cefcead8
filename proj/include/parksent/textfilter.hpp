#pragma once

// Sentence splitting, coarse POS tagging and parking-sentence extraction.
//
// The filter keeps sentences containing "parking" regardless of tag, and
// "park"/"parked" only when the tagger calls them VERB, so "nice walk in
// the park" stays out. Plurals and proper names never trigger: only the
// three exact keywords match, case-insensitively, on token boundaries.
//
// The tagger is a deterministic rule/lexicon tagger: closed-class lists,
// two bigram rules (DET _ -> NOUN, PRON/NOUN _ed -> VERB) plus a
// prev-word rule for modals/"to", then suffix heuristics. It is exposed
// behind pos_tag() so a stronger tagger can be swapped in.

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "parksent/corpus.hpp"

namespace parksent::text {

enum class PosTag { VERB, NOUN, ADJ, ADV, PRON, DET, ADP, NUM, PUNCT, OTHER };

inline std::string_view to_string(PosTag t) {
    switch (t) {
        case PosTag::VERB: return "VERB";
        case PosTag::NOUN: return "NOUN";
        case PosTag::ADJ: return "ADJ";
        case PosTag::ADV: return "ADV";
        case PosTag::PRON: return "PRON";
        case PosTag::DET: return "DET";
        case PosTag::ADP: return "ADP";
        case PosTag::NUM: return "NUM";
        case PosTag::PUNCT: return "PUNCT";
        case PosTag::OTHER: return "OTHER";
    }
    return "?";
}

inline std::optional<PosTag> parse_tag(std::string_view s) {
    static const std::unordered_map<std::string_view, PosTag> m = {
        {"VERB", PosTag::VERB}, {"NOUN", PosTag::NOUN}, {"ADJ", PosTag::ADJ},
        {"ADV", PosTag::ADV},   {"PRON", PosTag::PRON}, {"DET", PosTag::DET},
        {"ADP", PosTag::ADP},   {"NUM", PosTag::NUM},   {"PUNCT", PosTag::PUNCT},
        {"OTHER", PosTag::OTHER}};
    auto it = m.find(s);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

struct Token {
    std::string text;   // original surface form
    std::string lower;  // lowercased, used for matching
    PosTag tag = PosTag::OTHER;
};

struct Sentence {
    std::string review_id;
    int index = 0;  // 0-based position within the review
    std::string text;
    std::vector<Token> tokens;
};

struct ParkingMention {
    Sentence sentence;
    std::string trigger;   // parking | park | parked
    PosTag trigger_pos = PosTag::OTHER;
};

namespace detail {

inline std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline bool is_digit_token(std::string_view s) {
    bool any = false;
    for (char ch : s) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isdigit(c)) {
            any = true;
        } else if (c != '.' && c != ',') {
            return false;
        }
    }
    return any;
}

struct Lexicon {
    std::unordered_set<std::string> det{
        "the", "a", "an", "this", "that", "these", "those", "each", "every",
        "either", "neither", "both", "all", "some", "any", "no", "another",
        "my", "your", "his", "her", "its", "our", "their", "many", "few",
        "several", "most"};
    std::unordered_set<std::string> pron{
        "i", "you", "he", "she", "it", "we", "they", "me", "him", "us",
        "them", "mine", "yours", "hers", "ours", "theirs", "myself",
        "yourself", "himself", "herself", "itself", "ourselves",
        "themselves", "who", "whom", "someone", "anyone", "everyone",
        "nobody", "somebody", "anybody", "everybody", "something",
        "anything", "everything", "nothing", "y'all"};
    std::unordered_set<std::string> verb{
        "am", "is", "are", "was", "were", "be", "been", "being", "have",
        "has", "had", "do", "does", "did", "will", "would", "can", "could",
        "shall", "should", "may", "might", "must", "go", "went", "gone",
        "get", "got", "make", "made", "take", "took", "come", "came",
        "find", "leave", "avoid", "expect", "pay", "cost", "charge"};
    std::unordered_set<std::string> adp{
        "in", "on", "at", "by", "for", "with", "from", "of", "about",
        "into", "onto", "over", "under", "near", "off", "through",
        "during", "after", "before", "between", "among", "against",
        "along", "across", "around", "behind", "beside", "down", "up",
        "out", "inside", "outside", "within", "without", "than", "as",
        "per", "via", "toward", "towards", "upon", "to"};
    std::unordered_set<std::string> adv{
        "not", "very", "too", "quite", "really", "never", "always",
        "often", "sometimes", "usually", "rarely", "here", "there", "now",
        "then", "soon", "already", "just", "also", "even", "still",
        "again", "almost", "enough", "maybe", "perhaps", "away", "back",
        "nearby", "downtown", "everywhere", "anywhere", "somewhere",
        "right", "only", "overall", "early", "late", "fast", "yesterday",
        "today", "tomorrow", "n't", "anyway"};
    std::unordered_set<std::string> adj{
        "good", "great", "bad", "nice", "easy", "hard", "difficult",
        "free", "big", "small", "little", "large", "huge", "tiny",
        "tight", "narrow", "wide", "ample", "cheap", "expensive", "busy",
        "full", "empty", "clean", "dirty", "safe", "friendly", "rude",
        "terrible", "awful", "excellent", "amazing", "horrible", "poor",
        "fine", "open", "closed", "available", "crowded", "convenient",
        "limited", "spacious", "steep", "real", "new", "old", "close",
        "half", "main", "fair", "slow", "quick", "loud", "quiet", "fun",
        "best", "worst", "better", "worse", "delicious", "private",
        "favorite", "beautiful", "gorgeous", "incredible", "muddy"};
    std::unordered_set<std::string> other{
        "and", "or", "but", "so", "nor", "yet", "if", "because", "while",
        "when", "although", "though", "since", "unless", "until",
        "whether", "where", "what", "which", "how", "why"};
    std::unordered_set<std::string> noun{"parking", "lot", "lots"};
    std::unordered_set<std::string> numword{
        "zero", "one", "two", "three", "four", "five", "six", "seven",
        "eight", "nine", "ten", "eleven", "twelve", "twenty", "thirty",
        "forty", "fifty", "hundred", "thousand", "dozen"};
    // previous words that force a verb reading on the next open-class word
    std::unordered_set<std::string> verb_trigger_prev{
        "to", "can", "could", "will", "would", "shall", "should", "may",
        "might", "must", "do", "does", "did", "don't", "doesn't", "didn't",
        "won't", "can't", "cannot", "couldn't", "wouldn't", "shouldn't",
        "never", "always", "not", "please"};

    static const Lexicon& instance() {
        static const Lexicon lex;
        return lex;
    }
};

inline bool ends_with(std::string_view s, std::string_view suf) {
    return s.size() >= suf.size() &&
           s.substr(s.size() - suf.size()) == suf;
}

inline bool adj_suffix(std::string_view w) {
    return ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "ive") ||
           ends_with(w, "able") || ends_with(w, "ible") || ends_with(w, "ic") ||
           ends_with(w, "est");
}

}  // namespace detail

// Unicode-aware in the byte sense: non-ASCII bytes group with word
// characters. Apostrophes stay inside words ("y'all", "don't"); digit
// runs keep internal '.'/',' ("3.50").
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (detail::is_word_char(c)) {
            while (i < n) {
                unsigned char cc = static_cast<unsigned char>(text[i]);
                if (detail::is_word_char(cc)) {
                    ++i;
                } else if ((cc == '\'' || cc == '.' || cc == ',') && i + 1 < n &&
                           detail::is_word_char(
                               static_cast<unsigned char>(text[i + 1]))) {
                    // keep apostrophes inside words and separators inside
                    // numbers ("3.50"); "." stays only between digits
                    if (cc == '\'' ||
                        (std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
                        ++i;
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
        } else {
            // punctuation run of identical characters ("!!!", "...")
            while (i < n && static_cast<unsigned char>(text[i]) == c) ++i;
        }
        Token t;
        t.text = std::string(text.substr(start, i - start));
        t.lower = detail::lower_ascii(t.text);
        out.push_back(std::move(t));
    }
    return out;
}

// Deterministic coarse tagging; assigns every token exactly one tag.
inline void pos_tag(std::vector<Token>& tokens) {
    const auto& lex = detail::Lexicon::instance();
    PosTag prev = PosTag::OTHER;
    bool has_prev = false;
    std::string prev_lower;
    for (auto& tok : tokens) {
        const std::string& w = tok.lower;
        PosTag tag;
        unsigned char c0 = static_cast<unsigned char>(w.empty() ? ' ' : w[0]);
        if (!detail::is_word_char(c0)) {
            tag = PosTag::PUNCT;
        } else if (detail::is_digit_token(w) || lex.numword.count(w)) {
            tag = PosTag::NUM;
        } else if (lex.noun.count(w)) {
            tag = PosTag::NOUN;
        } else if (lex.det.count(w)) {
            tag = PosTag::DET;
        } else if (lex.pron.count(w)) {
            tag = PosTag::PRON;
        } else if (lex.verb.count(w)) {
            tag = PosTag::VERB;
        } else if (lex.adp.count(w)) {
            tag = PosTag::ADP;
        } else if (lex.adv.count(w)) {
            tag = PosTag::ADV;
        } else if (lex.adj.count(w)) {
            tag = PosTag::ADJ;
        } else if (lex.other.count(w)) {
            tag = PosTag::OTHER;
        } else if (has_prev && lex.verb_trigger_prev.count(prev_lower)) {
            tag = PosTag::VERB;
        } else if (has_prev && prev == PosTag::DET) {
            tag = detail::adj_suffix(w) ? PosTag::ADJ : PosTag::NOUN;
        } else if (has_prev && (prev == PosTag::PRON || prev == PosTag::NOUN) &&
                   detail::ends_with(w, "ed")) {
            tag = PosTag::VERB;
        } else if (has_prev && prev == PosTag::PRON) {
            tag = PosTag::VERB;
        } else if (detail::ends_with(w, "ly") && w.size() > 3) {
            tag = PosTag::ADV;
        } else if ((detail::ends_with(w, "ed") || detail::ends_with(w, "ing")) &&
                   w.size() > 4) {
            tag = PosTag::VERB;
        } else if (detail::ends_with(w, "tion") || detail::ends_with(w, "sion") ||
                   detail::ends_with(w, "ness") || detail::ends_with(w, "ment") ||
                   detail::ends_with(w, "ity") || detail::ends_with(w, "ance") ||
                   detail::ends_with(w, "ence") || detail::ends_with(w, "ship")) {
            tag = PosTag::NOUN;
        } else if (detail::adj_suffix(w)) {
            tag = PosTag::ADJ;
        } else {
            tag = PosTag::NOUN;
        }
        tok.tag = tag;
        if (tag != PosTag::PUNCT) {
            prev = tag;
            prev_lower = w;
            has_prev = true;
        }
    }
}

namespace detail {

inline const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> abbr = {
        "dr", "mr", "mrs", "ms", "st", "ave", "blvd", "rd", "etc", "vs",
        "jr", "sr", "prof", "inc", "co", "corp", "no", "dept", "approx",
        "esp", "min", "max", "est", "fig", "jan", "feb", "mar", "apr",
        "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "mon",
        "tue", "wed", "thu", "fri", "sat", "sun"};
    return abbr;
}

// Word immediately preceding position `i` (exclusive), lowercased.
inline std::string word_before(std::string_view s, std::size_t i) {
    std::size_t e = i;
    while (e > 0 && !is_word_char(static_cast<unsigned char>(s[e - 1]))) --e;
    std::size_t b = e;
    while (b > 0 && is_word_char(static_cast<unsigned char>(s[b - 1]))) --b;
    return lower_ascii(s.substr(b, e - b));
}

}  // namespace detail

// Splits on . ! ? followed by whitespace or end of text. A terminator run
// may be followed by closing quotes/brackets. Periods do not split after
// known abbreviations or single-letter initials.
inline std::vector<Sentence> split_sentences(const corpus::Review& review) {
    std::string text = corpus::detail::trim(review.text);
    std::vector<Sentence> out;
    if (text.empty()) return out;

    const std::size_t n = text.size();
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        std::string s = corpus::detail::trim(
            std::string_view(text).substr(start, end - start));
        if (!s.empty()) {
            Sentence sent;
            sent.review_id = review.review_id;
            sent.index = static_cast<int>(out.size());
            sent.text = std::move(s);
            out.push_back(std::move(sent));
        }
    };
    while (i < n) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?'))
                ++j;
            bool only_period = (j == i + 1) && text[i] == '.';
            // allow closing quotes / brackets after the terminator
            std::size_t k = j;
            while (k < n && (text[k] == '\'' || text[k] == '"' ||
                             text[k] == ')' || text[k] == ']'))
                ++k;
            bool at_break = (k >= n) ||
                            std::isspace(static_cast<unsigned char>(text[k]));
            bool guard = false;
            if (only_period && at_break) {
                std::string prev = detail::word_before(text, i);
                guard = prev.size() == 1 ||
                        detail::abbreviations().count(prev) > 0;
            }
            if (at_break && !guard) {
                flush(k);
                i = k;
                while (i < n && std::isspace(static_cast<unsigned char>(text[i])))
                    ++i;
                start = i;
                continue;
            }
            i = j;
            continue;
        }
        ++i;
    }
    if (start < n) flush(n);

    for (auto& s : out) {
        s.tokens = tokenize(s.text);
        pos_tag(s.tokens);
    }
    return out;
}

// Keyword rule over a tagged sentence. Returns the first trigger found.
inline std::optional<std::pair<std::string, PosTag>> parking_trigger(
        const Sentence& s) {
    for (const auto& t : s.tokens) {
        if (t.lower == "parking")
            return std::make_pair(std::string("parking"), t.tag);
        if ((t.lower == "park" || t.lower == "parked") && t.tag == PosTag::VERB)
            return std::make_pair(t.lower, t.tag);
    }
    return std::nullopt;
}

inline std::vector<ParkingMention> extract_parking_sentences(
        const std::vector<corpus::Review>& reviews) {
    std::vector<ParkingMention> out;
    for (const auto& r : reviews) {
        for (auto& s : split_sentences(r)) {
            auto trig = parking_trigger(s);
            if (!trig) continue;
            ParkingMention m;
            m.sentence = std::move(s);
            m.trigger = trig->first;
            m.trigger_pos = trig->second;
            out.push_back(std::move(m));
        }
    }
    return out;
}

inline std::string sentence_uid(const std::string& review_id, int index) {
    return review_id + "#" + std::to_string(index);
}

}  // namespace parksent::text

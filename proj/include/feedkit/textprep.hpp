#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedkit/corpus.hpp"

namespace feedkit {

// Fixed per-language POS tagsets: 16 tags for English, 18 for Italian.
// Indices are positions in pos_tag_names(language).
struct PosTag {
  uint8_t index = 0;
  bool operator==(const PosTag&) const = default;
};

size_t pos_tag_count(Language lang);  // 16 (EN) / 18 (IT)
const std::vector<std::string>& pos_tag_names(Language lang);
const std::string& pos_tag_name(Language lang, PosTag tag);
PosTag pos_tag_from_name(Language lang, const std::string& name);

// Tense ids are indices into tense_names(language):
//   EN: past, present            (2)
//   IT: presente, passato, imperfetto, futuro   (4)
size_t tense_count(Language lang);
const std::vector<std::string>& tense_names(Language lang);

struct Token {
  std::string surface;
  std::string lemma;
  PosTag pos;
  std::optional<uint8_t> tense;
};

struct ProcessedText {
  std::string original;
  std::string masked_lower;
  Language language = Language::EN;
  std::vector<Token> tokens;
  std::vector<std::string> lemmas;  // mirrors tokens
};

// Per-language lexical resources, loaded once and shared read-only:
//   lemmas.tsv     surface<TAB>lemma
//   pos.tsv        surface<TAB>tag      (closed-class words)
//   stopwords.txt  one word per line
struct Lexicons {
  Language language = Language::EN;
  std::unordered_map<std::string, std::string> lemmas;
  std::unordered_map<std::string, PosTag> pos;
  std::set<std::string> stopwords;
};

Lexicons load_lexicons(const std::string& data_dir, Language lang);

// UTF-8 case folding for ASCII and the Latin-1 supplement; idempotent.
std::string lowercase(const std::string& text);

// Replaces @handles with "account", URLs with "link" and #tags with
// "hashtag". Whitespace and all other text are preserved.
std::string mask(const std::string& text);

// Whitespace + punctuation segmentation. Punctuation characters become
// standalone tokens. English contractions split PTB-style ("don't" ->
// "do","n't"); Italian elisions split after the apostrophe ("l'app" ->
// "l'","app").
std::vector<std::string> tokenize(const std::string& text, Language lang);

// Lexicon lookup first, deterministic suffix rules second, identity last.
// Output length always equals input length.
std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, Language lang,
                                   const Lexicons& lex);

// Closed-class lexicon plus suffix and context heuristics; one tag per token.
std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens, Language lang,
                            const Lexicons& lex);

// Maps a verb POS tag to a tense id, if the tag carries one.
std::optional<uint8_t> tense_of(Language lang, PosTag tag);

// Counts per tense id; vector length is tense_count(language).
std::vector<size_t> detect_tense(const std::vector<Token>& tokens, Language lang);

bool is_punctuation_token(const std::string& token);

// Full pipeline: mask -> lowercase -> tokenize -> lemmatize -> tag.
ProcessedText process(const std::string& text, Language lang, const Lexicons& lex);

}  // namespace feedkit

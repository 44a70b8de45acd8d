#include "feedkit/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

namespace feedkit {

namespace {

const std::vector<std::string> kPosEn = {
    "noun", "propn", "verb_base", "verb_pres", "verb_past", "verb_ger", "adj", "adv",
    "pron", "det",   "adp",       "conj",      "num",       "intj",     "punct", "x"};

const std::vector<std::string> kPosIt = {
    "noun", "propn", "verb_pres", "verb_past", "verb_impf", "verb_fut", "verb_inf",
    "verb_ger", "adj", "adv", "pron", "det", "adp", "conj", "num", "intj", "punct", "x"};

const std::vector<std::string> kTenseEn = {"past", "present"};
const std::vector<std::string> kTenseIt = {"presente", "passato", "imperfetto", "futuro"};

PosTag tag_of(Language lang, const char* name) { return pos_tag_from_name(lang, name); }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_digit_token(const std::string& t) {
  bool has_digit = false;
  for (unsigned char c : t) {
    if (std::isdigit(c))
      has_digit = true;
    else if (c != '.' && c != ',' && c != '%' && c != ':' && c != '+' && c != '-')
      return false;
  }
  return has_digit;
}

}  // namespace

size_t pos_tag_count(Language lang) { return lang == Language::EN ? kPosEn.size() : kPosIt.size(); }

const std::vector<std::string>& pos_tag_names(Language lang) {
  return lang == Language::EN ? kPosEn : kPosIt;
}

const std::string& pos_tag_name(Language lang, PosTag tag) {
  return pos_tag_names(lang).at(tag.index);
}

PosTag pos_tag_from_name(Language lang, const std::string& name) {
  const auto& names = pos_tag_names(lang);
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return PosTag{static_cast<uint8_t>(i)};
  throw InputError("unknown POS tag '" + name + "' for language " + to_string(lang));
}

size_t tense_count(Language lang) { return lang == Language::EN ? 2 : 4; }

const std::vector<std::string>& tense_names(Language lang) {
  return lang == Language::EN ? kTenseEn : kTenseIt;
}

Lexicons load_lexicons(const std::string& data_dir, Language lang) {
  std::string dir = data_dir + "/" + (lang == Language::EN ? "en" : "it");
  Lexicons lex;
  lex.language = lang;

  auto read_tsv = [&](const std::string& file, auto&& handler) {
    std::string path = dir + "/" + file;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos)
        throw InputError(path + ":" + std::to_string(lineno) + ": expected two tab-separated fields");
      handler(line.substr(0, tab), line.substr(tab + 1), path, lineno);
    }
  };

  read_tsv("lemmas.tsv", [&](std::string surface, std::string lemma, const std::string& path,
                             size_t lineno) {
    if (!lex.lemmas.emplace(std::move(surface), std::move(lemma)).second)
      throw InputError(path + ":" + std::to_string(lineno) + ": duplicate surface form");
  });
  read_tsv("pos.tsv", [&](std::string surface, const std::string& tag, const std::string& path,
                          size_t lineno) {
    PosTag t;
    try {
      t = pos_tag_from_name(lang, tag);
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!lex.pos.emplace(std::move(surface), t).second)
      throw InputError(path + ":" + std::to_string(lineno) + ": duplicate surface form");
  });

  std::string sw_path = dir + "/stopwords.txt";
  std::ifstream sw(sw_path);
  if (!sw) throw InputError("cannot open lexicon " + sw_path);
  std::string word;
  while (std::getline(sw, word)) {
    if (!word.empty() && word.back() == '\r') word.pop_back();
    if (!word.empty()) lex.stopwords.insert(word);
  }
  return lex;
}

std::string lowercase(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out += static_cast<char>(std::tolower(c));
    } else if (c == 0xC3 && i + 1 < text.size()) {
      // Latin-1 supplement: U+00C0..U+00DE fold to U+00E0..U+00FE, skipping
      // the multiplication sign U+00D7.
      auto c2 = static_cast<unsigned char>(text[i + 1]);
      out += static_cast<char>(c);
      if (c2 >= 0x80 && c2 <= 0x9E && c2 != 0x97)
        out += static_cast<char>(c2 + 0x20);
      else
        out += static_cast<char>(c2);
      ++i;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string mask(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      out += static_cast<char>(c);
      ++i;
      continue;
    }
    size_t end = i;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    std::string chunk = text.substr(i, end - i);
    std::string lowered = lowercase(chunk);
    if (lowered.rfind("http://", 0) == 0 || lowered.rfind("https://", 0) == 0 ||
        lowered.rfind("www.", 0) == 0) {
      out += "link";
    } else if ((chunk[0] == '@' || chunk[0] == '#') && chunk.size() > 1 &&
               is_word_byte(static_cast<unsigned char>(chunk[1]))) {
      size_t j = 1;
      while (j < chunk.size() && is_word_byte(static_cast<unsigned char>(chunk[j]))) ++j;
      out += chunk[0] == '@' ? "account" : "hashtag";
      out += chunk.substr(j);  // trailing punctuation kept
    } else {
      out += chunk;
    }
    i = end;
  }
  return out;
}

namespace {

// PTB-ish contraction handling for English word tokens containing an
// apostrophe; Italian elisions keep the apostrophe with the prefix.
void split_apostrophe_word(const std::string& word, Language lang,
                           std::vector<std::string>& out) {
  if (lang == Language::EN) {
    if (word.size() > 3 && ends_with(word, "n't")) {
      out.push_back(word.substr(0, word.size() - 3));
      out.push_back("n't");
      return;
    }
    for (const char* suf : {"'re", "'ve", "'ll", "'s", "'d", "'m"}) {
      std::string s(suf);
      if (word.size() > s.size() && ends_with(word, s)) {
        out.push_back(word.substr(0, word.size() - s.size()));
        out.push_back(s);
        return;
      }
    }
    out.push_back(word);
  } else {
    size_t ap = word.find('\'');
    if (ap != std::string::npos && ap + 1 < word.size() && ap <= 4) {
      out.push_back(word.substr(0, ap + 1));
      out.push_back(word.substr(ap + 1));
    } else {
      out.push_back(word);
    }
  }
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, Language lang) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_word_byte(c) || c == '\'') {
      size_t j = i;
      while (j < text.size()) {
        auto cj = static_cast<unsigned char>(text[j]);
        if (is_word_byte(cj) || cj == '\'')
          ++j;
        else
          break;
      }
      std::string word = text.substr(i, j - i);
      // Strip apostrophes that only border the word.
      while (!word.empty() && word.front() == '\'') {
        tokens.push_back("'");
        word.erase(word.begin());
      }
      size_t trailing = 0;
      while (!word.empty() && word.back() == '\'') {
        word.pop_back();
        ++trailing;
      }
      if (!word.empty()) {
        if (word.find('\'') != std::string::npos)
          split_apostrophe_word(word, lang, tokens);
        else
          tokens.push_back(word);
      }
      for (size_t t = 0; t < trailing; ++t) tokens.push_back("'");
      i = j;
    } else {
      tokens.push_back(std::string(1, static_cast<char>(c)));
      ++i;
    }
  }
  return tokens;
}

bool is_punctuation_token(const std::string& token) {
  if (token.empty()) return true;
  for (unsigned char c : token)
    if (is_word_byte(c)) return false;
  return true;
}

namespace {

std::string lemma_suffix_rules_en(const std::string& w) {
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 5 && ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (w.size() > 3 && ends_with(w, "es")) {
    std::string stem = w.substr(0, w.size() - 2);
    if (ends_with(stem, "ch") || ends_with(stem, "sh") || ends_with(stem, "s") ||
        ends_with(stem, "x") || ends_with(stem, "z"))
      return stem;
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is"))
    return w.substr(0, w.size() - 1);
  if (w.size() > 5 && ends_with(w, "ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) stem.pop_back();
    return stem;
  }
  if (w.size() > 4 && ends_with(w, "ed")) {
    std::string stem = w.substr(0, w.size() - 2);
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) stem.pop_back();
    return stem;
  }
  return w;
}

std::string lemma_suffix_rules_it(const std::string& w) {
  if (w.size() > 6 && ends_with(w, "zioni")) return w.substr(0, w.size() - 1) + "e";
  if (w.size() > 4 && ends_with(w, "che")) return w.substr(0, w.size() - 2) + "a";
  if (w.size() > 3 && ends_with(w, "i")) return w.substr(0, w.size() - 1) + "o";
  return w;
}

}  // namespace

std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, Language lang,
                                   const Lexicons& lex) {
  std::vector<std::string> lemmas;
  lemmas.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = lex.lemmas.find(t);
    if (it != lex.lemmas.end()) {
      lemmas.push_back(it->second);
    } else if (is_punctuation_token(t) || is_digit_token(t)) {
      lemmas.push_back(t);
    } else {
      lemmas.push_back(lang == Language::EN ? lemma_suffix_rules_en(t) : lemma_suffix_rules_it(t));
    }
  }
  return lemmas;
}

namespace {

PosTag tag_en(const std::string& t, const Lexicons& lex, const std::optional<PosTag>& prev) {
  Language lang = Language::EN;
  if (is_punctuation_token(t)) return tag_of(lang, "punct");
  if (is_digit_token(t)) return tag_of(lang, "num");
  if (auto it = lex.pos.find(t); it != lex.pos.end()) return it->second;
  if (ends_with(t, "ly") && t.size() > 3) return tag_of(lang, "adv");
  if (ends_with(t, "ing") && t.size() > 4) return tag_of(lang, "verb_ger");
  if (ends_with(t, "ed") && t.size() > 3) return tag_of(lang, "verb_past");
  for (const char* suf : {"tion", "ment", "ness", "ity", "ship"})
    if (ends_with(t, suf)) return tag_of(lang, "noun");
  for (const char* suf : {"ous", "ful", "less", "able", "ible", "ive"})
    if (ends_with(t, suf)) return tag_of(lang, "adj");
  bool prev_nominal = prev && (*prev == tag_of(lang, "noun") || *prev == tag_of(lang, "pron") ||
                               *prev == tag_of(lang, "propn"));
  if (ends_with(t, "s") && !ends_with(t, "ss") && t.size() > 2)
    return prev_nominal ? tag_of(lang, "verb_pres") : tag_of(lang, "noun");
  if (prev && *prev == tag_of(lang, "pron")) return tag_of(lang, "verb_pres");
  return tag_of(lang, "noun");
}

PosTag tag_it(const std::string& t, const Lexicons& lex) {
  Language lang = Language::IT;
  if (is_punctuation_token(t)) return tag_of(lang, "punct");
  if (is_digit_token(t)) return tag_of(lang, "num");
  if (auto it = lex.pos.find(t); it != lex.pos.end()) return it->second;
  if (ends_with(t, "mente") && t.size() > 6) return tag_of(lang, "adv");
  for (const char* suf : {"ando", "endo"})
    if (ends_with(t, suf) && t.size() > 5) return tag_of(lang, "verb_ger");
  for (const char* suf : {"er\xC3\xB2", "er\xC3\xA0", "erai", "eremo", "erete", "eranno",
                          "ir\xC3\xB2", "ir\xC3\xA0", "irai", "iremo", "irete", "iranno"})
    if (ends_with(t, suf)) return tag_of(lang, "verb_fut");
  for (const char* suf : {"ava", "avi", "avo", "avano", "avamo", "avate", "eva", "evi", "evo",
                          "evano", "evamo", "iva", "ivi", "ivo", "ivano", "ivamo"})
    if (ends_with(t, suf) && t.size() > 4) return tag_of(lang, "verb_impf");
  for (const char* suf : {"ato", "ata", "ati", "uto", "uta", "uti", "ito", "ita", "iti"})
    if (ends_with(t, suf) && t.size() > 4) return tag_of(lang, "verb_past");
  for (const char* suf : {"are", "ere", "ire"})
    if (ends_with(t, suf) && t.size() > 4) return tag_of(lang, "verb_inf");
  for (const char* suf : {"iamo", "ono", "isce", "isco"})
    if (ends_with(t, suf) && t.size() > 4) return tag_of(lang, "verb_pres");
  for (const char* suf : {"oso", "osa", "osi", "ose"})
    if (ends_with(t, suf) && t.size() > 4) return tag_of(lang, "adj");
  for (const char* suf : {"zione", "sione", "t\xC3\xA0"})
    if (ends_with(t, suf)) return tag_of(lang, "noun");
  return tag_of(lang, "noun");
}

}  // namespace

std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens, Language lang,
                            const Lexicons& lex) {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  std::optional<PosTag> prev;
  for (const auto& t : tokens) {
    PosTag tag = lang == Language::EN ? tag_en(t, lex, prev) : tag_it(t, lex);
    tags.push_back(tag);
    prev = tag;
  }
  return tags;
}

std::optional<uint8_t> tense_of(Language lang, PosTag tag) {
  const std::string& name = pos_tag_name(lang, tag);
  if (lang == Language::EN) {
    if (name == "verb_past") return 0;
    if (name == "verb_pres" || name == "verb_base" || name == "verb_ger") return 1;
    return std::nullopt;
  }
  if (name == "verb_pres") return 0;
  if (name == "verb_past") return 1;
  if (name == "verb_impf") return 2;
  if (name == "verb_fut") return 3;
  return std::nullopt;
}

std::vector<size_t> detect_tense(const std::vector<Token>& tokens, Language lang) {
  std::vector<size_t> counts(tense_count(lang), 0);
  for (const auto& t : tokens)
    if (t.tense) counts[*t.tense]++;
  return counts;
}

ProcessedText process(const std::string& text, Language lang, const Lexicons& lex) {
  if (lex.language != lang) throw InputError("lexicons do not match requested language");
  ProcessedText p;
  p.original = text;
  // Masking runs before case folding: URL detection needs the raw text.
  p.masked_lower = lowercase(mask(text));
  p.language = lang;
  auto surfaces = tokenize(p.masked_lower, lang);
  auto lemmas = lemmatize(surfaces, lang, lex);
  auto tags = pos_tag(surfaces, lang, lex);
  p.tokens.reserve(surfaces.size());
  for (size_t i = 0; i < surfaces.size(); ++i) {
    Token tok;
    tok.surface = std::move(surfaces[i]);
    tok.lemma = lemmas[i];
    tok.pos = tags[i];
    tok.tense = tense_of(lang, tags[i]);
    p.tokens.push_back(std::move(tok));
  }
  p.lemmas = std::move(lemmas);
  return p;
}

}  // namespace feedkit

#include "zz/response.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace zz {
namespace {

struct TagRegion {
  size_t open_begin = 0;   // index of '<'
  size_t inner_begin = 0;  // first char after open tag
  size_t inner_end = 0;    // index of '<' of close tag
  size_t close_end = 0;    // one past '>' of close tag
};

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

/// Locates <name>...</name>. Fails with MissingTag when either side is
/// absent or out of order, DuplicateTag when either side repeats.
Expected<TagRegion, FormatError> find_tag(const std::string& text, const std::string& name) {
  const std::string open = "<" + name + ">";
  const std::string close = "</" + name + ">";
  const size_t n_open = count_occurrences(text, open);
  const size_t n_close = count_occurrences(text, close);
  if (n_open == 0 || n_close == 0) {
    return FormatError{FormatErrorKind::MissingTag, name};
  }
  if (n_open > 1 || n_close > 1) {
    return FormatError{FormatErrorKind::DuplicateTag, name};
  }
  TagRegion region;
  region.open_begin = text.find(open);
  region.inner_begin = region.open_begin + open.size();
  region.inner_end = text.find(close);
  region.close_end = region.inner_end + close.size();
  if (region.inner_end < region.inner_begin) {
    return FormatError{FormatErrorKind::MissingTag, name};
  }
  return region;
}

bool is_space_only(const std::string& text, size_t begin, size_t end) {
  for (size_t i = begin; i < end; ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

void skip_spaces(const std::string& text, size_t& pos, size_t end) {
  while (pos < end && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
}

/// Parses one decimal number (optional sign, optional fraction/exponent).
bool parse_number(const std::string& text, size_t& pos, size_t end, double& out) {
  skip_spaces(text, pos, end);
  const char* first = text.data() + pos;
  const char* last = text.data() + end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr == first || !std::isfinite(value)) return false;
  pos = static_cast<size_t>(ptr - text.data());
  out = value;
  return true;
}

bool expect_char(const std::string& text, size_t& pos, size_t end, char want) {
  skip_spaces(text, pos, end);
  if (pos >= end || text[pos] != want) return false;
  ++pos;
  return true;
}

/// Span-list grammar: "[" pair ("," pair)* "]" | "[" "]",
/// pair := "(" number "," number ")". Whitespace is free between tokens.
Expected<std::vector<std::pair<double, double>>, FormatError> parse_span_list(
    const std::string& text, size_t begin, size_t end) {
  const auto fail = [&]() -> FormatError {
    return FormatError{FormatErrorKind::MalformedSpanList, text.substr(begin, end - begin)};
  };
  std::vector<std::pair<double, double>> pairs;
  size_t pos = begin;
  if (!expect_char(text, pos, end, '[')) return fail();
  skip_spaces(text, pos, end);
  if (pos < end && text[pos] == ']') {
    ++pos;
  } else {
    while (true) {
      double s = 0.0, e = 0.0;
      if (!expect_char(text, pos, end, '(')) return fail();
      if (!parse_number(text, pos, end, s)) return fail();
      if (!expect_char(text, pos, end, ',')) return fail();
      if (!parse_number(text, pos, end, e)) return fail();
      if (!expect_char(text, pos, end, ')')) return fail();
      pairs.emplace_back(s, e);
      skip_spaces(text, pos, end);
      if (pos < end && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
    if (!expect_char(text, pos, end, ']')) return fail();
  }
  skip_spaces(text, pos, end);
  if (pos != end) return fail();
  return pairs;
}

/// <time> contents: one number, or two numbers separated by ',' or '-',
/// optionally parenthesized. "12.5 - 14" and "(3, 4)" both parse.
Expected<TimeMark, FormatError> parse_time_mark(const std::string& text, size_t begin, size_t end) {
  const auto fail = [&]() -> FormatError {
    return FormatError{FormatErrorKind::MalformedSpanList, text.substr(begin, end - begin)};
  };
  size_t pos = begin;
  skip_spaces(text, pos, end);
  bool parens = pos < end && text[pos] == '(';
  if (parens) ++pos;
  TimeMark mark;
  if (!parse_number(text, pos, end, mark.start)) return fail();
  skip_spaces(text, pos, end);
  if (pos < end && (text[pos] == ',' || text[pos] == '-')) {
    ++pos;
    double second = 0.0;
    if (!parse_number(text, pos, end, second)) return fail();
    mark.end = second;
  }
  if (parens && !expect_char(text, pos, end, ')')) return fail();
  skip_spaces(text, pos, end);
  if (pos != end) return fail();
  return mark;
}

Expected<std::vector<TimeMark>, FormatError> parse_time_marks(const std::string& text, size_t begin,
                                                              size_t end) {
  static const std::string kOpen = "<time>";
  static const std::string kClose = "</time>";
  std::vector<TimeMark> marks;
  size_t pos = begin;
  while (true) {
    size_t open = text.find(kOpen, pos);
    if (open == std::string::npos || open >= end) break;
    size_t inner = open + kOpen.size();
    size_t close = text.find(kClose, inner);
    if (close == std::string::npos || close > end) {
      return FormatError{FormatErrorKind::MissingTag, "time"};
    }
    auto mark = parse_time_mark(text, inner, close);
    if (!mark.ok()) return mark.error();
    marks.push_back(mark.value());
    pos = close + kClose.size();
  }
  return marks;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::MissingTag: return "MissingTag";
    case FormatErrorKind::DuplicateTag: return "DuplicateTag";
    case FormatErrorKind::MalformedSpanList: return "MalformedSpanList";
    case FormatErrorKind::UnknownAnswerLetter: return "UnknownAnswerLetter";
    case FormatErrorKind::ConcatenationMismatch: return "ConcatenationMismatch";
  }
  return "?";
}

ParseResult parse_response(const std::string& text, const std::vector<char>& options) {
  auto think = find_tag(text, "think");
  if (!think.ok()) return think.error();
  auto answer = find_tag(text, "answer");
  if (!answer.ok()) return answer.error();
  auto glue = find_tag(text, "glue");
  if (!glue.ok()) return glue.error();

  StructuredResponse out;
  out.raw_text = text;
  const TagRegion& t = think.value();
  out.think_text = text.substr(t.inner_begin, t.inner_end - t.inner_begin);

  auto marks = parse_time_marks(text, t.inner_begin, t.inner_end);
  if (!marks.ok()) return marks.error();
  out.time_marks = marks.value();

  const TagRegion& a = answer.value();
  size_t pos = a.inner_begin;
  skip_spaces(text, pos, a.inner_end);
  size_t tail = a.inner_end;
  while (tail > pos && std::isspace(static_cast<unsigned char>(text[tail - 1]))) --tail;
  if (tail != pos + 1 ||
      std::find(options.begin(), options.end(), text[pos]) == options.end()) {
    return FormatError{FormatErrorKind::UnknownAnswerLetter,
                       text.substr(a.inner_begin, a.inner_end - a.inner_begin)};
  }
  out.answer_letter = text[pos];

  const TagRegion& g = glue.value();
  auto pairs = parse_span_list(text, g.inner_begin, g.inner_end);
  if (!pairs.ok()) return pairs.error();
  out.glue_spans = normalize(pairs.value());
  return out;
}

int format_reward(const std::string& text, const std::vector<char>& options) {
  if (!parse_response(text, options).ok()) return 0;
  // Re-derive tag positions to check order and the outside-tag residue.
  auto think = find_tag(text, "think");
  auto answer = find_tag(text, "answer");
  auto glue = find_tag(text, "glue");
  const TagRegion& t = think.value();
  const TagRegion& a = answer.value();
  const TagRegion& g = glue.value();
  if (!(t.close_end <= a.open_begin && a.close_end <= g.open_begin)) return 0;
  if (!is_space_only(text, 0, t.open_begin)) return 0;
  if (!is_space_only(text, t.close_end, a.open_begin)) return 0;
  if (!is_space_only(text, a.close_end, g.open_begin)) return 0;
  if (!is_space_only(text, g.close_end, text.size())) return 0;
  return 1;
}

LenientExtract lenient_extract(const std::string& text, const std::vector<char>& options) {
  LenientExtract out;
  // Answer: the letter right after <answer> if valid, else the first
  // standalone option letter anywhere.
  auto answer = find_tag(text, "answer");
  if (answer.ok()) {
    const TagRegion& a = answer.value();
    size_t pos = a.inner_begin;
    skip_spaces(text, pos, a.inner_end);
    if (pos < a.inner_end &&
        std::find(options.begin(), options.end(), text[pos]) != options.end()) {
      out.answer = text[pos];
    }
  }
  if (!out.answer) {
    for (size_t i = 0; i < text.size(); ++i) {
      if (std::find(options.begin(), options.end(), text[i]) == options.end()) continue;
      bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
      bool right_ok =
          i + 1 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 1]));
      if (left_ok && right_ok) {
        out.answer = text[i];
        break;
      }
    }
  }
  // Spans: a well-formed glue region, else any bare "(s, e)" pairs in order.
  auto glue = find_tag(text, "glue");
  if (glue.ok()) {
    const TagRegion& g = glue.value();
    auto pairs = parse_span_list(text, g.inner_begin, g.inner_end);
    if (pairs.ok()) {
      out.spans = normalize(pairs.value());
      return out;
    }
  }
  std::vector<std::pair<double, double>> pairs;
  for (size_t open = text.find('('); open != std::string::npos; open = text.find('(', open + 1)) {
    size_t close = text.find(')', open + 1);
    if (close == std::string::npos) break;
    size_t pos = open + 1;
    double s = 0.0, e = 0.0;
    if (parse_number(text, pos, close, s) && expect_char(text, pos, close, ',') &&
        parse_number(text, pos, close, e)) {
      skip_spaces(text, pos, close);
      if (pos == close) pairs.emplace_back(s, e);
    }
  }
  out.spans = normalize(pairs);
  return out;
}

std::string render_response(const std::string& think_text, char answer_letter,
                            const IntervalSet& spans) {
  std::ostringstream os;
  os << "<think>" << think_text << "</think>";
  os << "<answer>" << answer_letter << "</answer>";
  os << "<glue> [";
  bool first = true;
  for (const auto& iv : spans.intervals()) {
    if (!first) os << ", ";
    first = false;
    os << "(" << format_double(iv.start) << ", " << format_double(iv.end) << ")";
  }
  os << "] </glue>";
  return os.str();
}

size_t TokenSpanMap::glue_count() const {
  size_t n = 0;
  for (bool b : is_glue) n += b ? 1 : 0;
  return n;
}

Expected<TokenSpanMap, FormatError> glue_token_mask(const std::string& text,
                                                    const std::vector<std::string>& token_texts) {
  size_t total = 0;
  for (const auto& tok : token_texts) total += tok.size();
  if (total != text.size()) {
    return FormatError{FormatErrorKind::ConcatenationMismatch, text};
  }
  size_t offset = 0;
  for (const auto& tok : token_texts) {
    if (text.compare(offset, tok.size(), tok) != 0) {
      return FormatError{FormatErrorKind::ConcatenationMismatch, tok};
    }
    offset += tok.size();
  }

  // Character-level glue regions, tags included.
  static const std::string kOpen = "<glue>";
  static const std::string kClose = "</glue>";
  std::vector<std::pair<size_t, size_t>> char_regions;
  size_t pos = 0;
  while (true) {
    size_t open = text.find(kOpen, pos);
    if (open == std::string::npos) break;
    size_t close = text.find(kClose, open + kOpen.size());
    if (close == std::string::npos) {
      return FormatError{FormatErrorKind::MissingTag, "glue"};
    }
    char_regions.emplace_back(open, close + kClose.size());
    pos = close + kClose.size();
  }

  TokenSpanMap map;
  map.total_len = token_texts.size();
  map.is_glue.assign(token_texts.size(), false);
  size_t begin = 0;
  for (size_t i = 0; i < token_texts.size(); ++i) {
    size_t end = begin + token_texts[i].size();
    for (const auto& [rb, re] : char_regions) {
      if (begin < re && rb < end) {  // nonempty character overlap
        map.is_glue[i] = true;
        break;
      }
    }
    begin = end;
  }
  // Compress the boolean mask into half-open token ranges.
  for (size_t i = 0; i < map.is_glue.size();) {
    if (!map.is_glue[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < map.is_glue.size() && map.is_glue[j]) ++j;
    map.glue_ranges.emplace_back(i, j);
    i = j;
  }
  return map;
}

}  // namespace zz

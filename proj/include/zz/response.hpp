#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zz/expected.hpp"
#include "zz/intervals.hpp"

namespace zz {

/// A timestamp or time range found in a <time> tag.
struct TimeMark {
  double start = 0.0;
  std::optional<double> end;  // absent for point marks
};

/// Parsed instance of the structured output template:
///   <think>...</think><answer>L</answer><glue> [(s1, e1), ...] </glue>
struct StructuredResponse {
  std::string think_text;
  std::vector<TimeMark> time_marks;
  char answer_letter = '\0';
  IntervalSet glue_spans;
  std::string raw_text;
};

enum class FormatErrorKind {
  MissingTag,
  DuplicateTag,
  MalformedSpanList,
  UnknownAnswerLetter,
  ConcatenationMismatch,
};

struct FormatError {
  FormatErrorKind kind;
  std::string region;  // the offending slice of the input
};

const char* to_string(FormatErrorKind kind);

using ParseResult = Expected<StructuredResponse, FormatError>;

/// Parse a full decoded rollout. Requires exactly one think/answer/glue
/// region each, a known answer letter, and a well-formed span list;
/// tolerates arbitrary surrounding text (strictness lives in
/// format_reward). <time> tags are optional but validated when present.
ParseResult parse_response(const std::string& text, const std::vector<char>& options);

/// 1 iff parse_response succeeds, the tag order is think -> answer -> glue,
/// and nothing but whitespace appears outside the three tag regions.
/// Total function: every failure maps to 0.
int format_reward(const std::string& text, const std::vector<char>& options);

/// Best-effort field extraction for responses that fail the strict parse,
/// so accuracy/IoU/zoom stay informative when only the syntax slipped.
struct LenientExtract {
  std::optional<char> answer;
  IntervalSet spans;
};
LenientExtract lenient_extract(const std::string& text, const std::vector<char>& options);

/// Render a response back to canonical template text. parse_response of the
/// result reproduces the same fields (round-trip).
std::string render_response(const std::string& think_text, char answer_letter,
                            const IntervalSet& spans);

/// Token-index classification of a tokenized response: a token is a glue
/// token iff any of its characters lie inside a <glue>...</glue> region,
/// tags included.
struct TokenSpanMap {
  std::vector<std::pair<size_t, size_t>> glue_ranges;  // half-open token ranges
  size_t total_len = 0;
  std::vector<bool> is_glue;  // size total_len

  size_t glue_count() const;
};

/// Classify each token of a response. token_texts must concatenate exactly
/// to text; otherwise ConcatenationMismatch.
Expected<TokenSpanMap, FormatError> glue_token_mask(const std::string& text,
                                                    const std::vector<std::string>& token_texts);

}  // namespace zz

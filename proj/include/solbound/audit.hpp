#pragma once
// Static scanner for reward-hacking patterns in submission sources.
//
// Sources are normalized before matching: comments are blanked according to
// a per-extension comment grammar (line numbers are preserved) and runs of
// whitespace collapse to one space. Rules are data loaded from a JSON file.

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"

namespace solbound {

enum class ExploitFamily {
  kThreadInjection,
  kStreamInjection,
  kJitForking,
  kCachedOutputReuse,
  kLazyEvaluation,
  kOneTimeCorrectness,
  kMonkeyPatching,
  kPrecisionDowngrade,
  kEmbeddedBinary,
};
std::string_view family_name(ExploitFamily f);
std::optional<ExploitFamily> parse_family(std::string_view s);
inline constexpr int kFamilyCount = 9;

enum class Severity { kReject, kReview };
std::string_view severity_name(Severity s);

struct Pattern {
  bool is_regex = false;
  std::string text;
  std::regex compiled;  // set when is_regex
};

struct AuditRule {
  std::string id;
  ExploitFamily family = ExploitFamily::kThreadInjection;
  std::vector<Pattern> patterns;
  Severity severity = Severity::kReject;
};

struct CommentGrammar {
  std::vector<std::string> extensions;  // ".py"; "*" is the fallback
  std::vector<std::string> line_markers;
  std::vector<std::pair<std::string, std::string>> block_markers;
  std::vector<char> string_quotes;  // comment markers inside these are ignored
};

struct RuleSet {
  std::vector<AuditRule> rules;
  std::vector<CommentGrammar> grammars;

  const CommentGrammar& grammar_for(std::string_view filename) const;
};

struct AuditFinding {
  std::string rule_id;
  ExploitFamily family = ExploitFamily::kThreadInjection;
  std::string file;
  std::size_t line = 0;  // 1-based
  std::string matched_excerpt;
  Severity severity = Severity::kReject;
};

// Accepts a bare JSON array of rules (built-in comment grammars) or an
// object {"comment_grammars": [...], "rules": [...]}. Throws kRuleLoad naming
// the rule id on an invalid regular expression.
RuleSet parse_rules(std::string_view text);

std::vector<CommentGrammar> default_comment_grammars();

// Comment-blanked text with the same line structure as the input.
std::string strip_comments(std::string_view source, const CommentGrammar& grammar);

// Findings sorted by (file, line, rule id). PrecisionDowngrade rules only
// fire when declared_precision is fp32, and always at review severity.
// Pass std::nullopt when the precision is unknown.
std::vector<AuditFinding> scan_submission(const std::map<std::string, std::string>& sources,
                                          const RuleSet& rules,
                                          std::optional<DType> declared_precision);

struct MagicSignature {
  std::string name;
  std::vector<std::uint8_t> bytes;
};
std::vector<MagicSignature> default_binary_magics();  // ELF, CUDA fatbin

// Base64 runs of at least min_blob_chars whose decoded prefix starts with a
// known magic. Throws kInvalidValue when min_blob_chars < 64.
std::vector<AuditFinding> detect_embedded_binary(
    const std::map<std::string, std::string>& sources, std::size_t min_blob_chars,
    const std::vector<MagicSignature>& magics = default_binary_magics(),
    const RuleSet* grammars = nullptr);

struct FamilyShare {
  std::uint64_t count = 0;
  double fraction = 0;
};

// Submissions with >= 1 finding per family; a submission may count for
// several families. Every family appears in the result.
std::map<ExploitFamily, FamilyShare> exploit_distribution(
    const std::vector<std::vector<AuditFinding>>& findings_by_submission,
    std::uint64_t total_submissions);

jsonu::OrderedJson finding_to_json(const AuditFinding& f);
AuditFinding finding_from_json(const jsonu::Json& j);

inline constexpr std::size_t kMaxExcerptChars = 120;

}  // namespace solbound

#include "solbound/audit.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "solbound/base64.hpp"
#include "solbound/error.hpp"

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

namespace {

constexpr std::array<std::pair<ExploitFamily, std::string_view>, kFamilyCount> kFamilies{{
    {ExploitFamily::kThreadInjection, "ThreadInjection"},
    {ExploitFamily::kStreamInjection, "StreamInjection"},
    {ExploitFamily::kJitForking, "JitForking"},
    {ExploitFamily::kCachedOutputReuse, "CachedOutputReuse"},
    {ExploitFamily::kLazyEvaluation, "LazyEvaluation"},
    {ExploitFamily::kOneTimeCorrectness, "OneTimeCorrectness"},
    {ExploitFamily::kMonkeyPatching, "MonkeyPatching"},
    {ExploitFamily::kPrecisionDowngrade, "PrecisionDowngrade"},
    {ExploitFamily::kEmbeddedBinary, "EmbeddedBinary"},
}};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// One source line after whitespace collapsing, with the original column of
// every kept character.
struct NormalizedLine {
  std::string text;
  std::vector<std::size_t> origin;
};

NormalizedLine normalize_line(std::string_view stripped) {
  NormalizedLine out;
  bool pending_space = false;
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    const char c = stripped[i];
    if (is_space(c)) {
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      out.origin.push_back(i - 1);
      pending_space = false;
    }
    out.text.push_back(c);
    out.origin.push_back(i);
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string excerpt(std::string_view original_line, std::size_t begin, std::size_t end) {
  end = std::min(end, original_line.size());
  if (begin >= end) return {};
  return std::string(original_line.substr(begin, std::min(end - begin, kMaxExcerptChars)));
}

std::vector<std::string> string_list(const Json& j, std::string_view path) {
  std::vector<std::string> out;
  if (!j.is_array()) throw Error(ErrorKind::kRuleLoad, "field '" + std::string(path) + "' must be an array");
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(ErrorKind::kRuleLoad, "field '" + std::string(path) + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

CommentGrammar grammar_from_json(const Json& j, std::string_view path) {
  CommentGrammar g;
  g.extensions = string_list(jsonu::require(j, "extensions", path), jsonu::join(path, "extensions"));
  if (auto it = j.find("line"); it != j.end()) g.line_markers = string_list(*it, jsonu::join(path, "line"));
  if (auto it = j.find("block"); it != j.end()) {
    for (const auto& pair : *it) {
      auto p = string_list(pair, jsonu::join(path, "block"));
      if (p.size() != 2) throw Error(ErrorKind::kRuleLoad, "block comment markers come in pairs");
      g.block_markers.emplace_back(p[0], p[1]);
    }
  }
  if (auto it = j.find("quotes"); it != j.end() && it->is_string()) {
    for (char c : it->get<std::string>()) g.string_quotes.push_back(c);
  }
  return g;
}

}  // namespace

std::string_view family_name(ExploitFamily f) {
  for (const auto& [v, s] : kFamilies) {
    if (v == f) return s;
  }
  return "ThreadInjection";
}

std::optional<ExploitFamily> parse_family(std::string_view s) {
  for (const auto& [v, n] : kFamilies) {
    if (n == s) return v;
  }
  return std::nullopt;
}

std::string_view severity_name(Severity s) { return s == Severity::kReject ? "reject" : "review"; }

std::vector<CommentGrammar> default_comment_grammars() {
  return {
      CommentGrammar{{".py", "*"}, {"#"}, {}, {'"', '\''}},
      CommentGrammar{{".cu", ".cuh", ".cpp", ".cc", ".h", ".hpp", ".c"},
                     {"//"},
                     {{"/*", "*/"}},
                     {'"', '\''}},
  };
}

const CommentGrammar& RuleSet::grammar_for(std::string_view filename) const {
  const CommentGrammar* fallback = nullptr;
  for (const auto& g : grammars) {
    for (const auto& ext : g.extensions) {
      if (ext == "*") {
        if (fallback == nullptr) fallback = &g;
      } else if (filename.size() >= ext.size() &&
                 filename.substr(filename.size() - ext.size()) == ext) {
        return g;
      }
    }
  }
  if (fallback != nullptr) return *fallback;
  static const CommentGrammar kNone{};
  return kNone;
}

RuleSet parse_rules(std::string_view text) {
  Json doc;
  try {
    doc = jsonu::parse_document(text, "rule file");
  } catch (const Error& e) {
    throw Error(ErrorKind::kRuleLoad, e.what());
  }
  RuleSet set;
  const Json* rules = &doc;
  if (doc.is_object()) {
    auto it = doc.find("rules");
    if (it == doc.end()) throw Error(ErrorKind::kRuleLoad, "rule file has no 'rules' array");
    rules = &*it;
    if (auto g = doc.find("comment_grammars"); g != doc.end()) {
      for (std::size_t i = 0; i < g->size(); ++i) {
        set.grammars.push_back(grammar_from_json((*g)[i], jsonu::index("comment_grammars", i)));
      }
    }
  }
  if (set.grammars.empty()) set.grammars = default_comment_grammars();
  if (!rules->is_array() || rules->empty()) {
    throw Error(ErrorKind::kRuleLoad, "rule list must be a non-empty array");
  }

  std::set<std::string> ids;
  for (std::size_t i = 0; i < rules->size(); ++i) {
    const Json& r = (*rules)[i];
    const std::string path = jsonu::index("rules", i);
    AuditRule rule;
    try {
      rule.id = jsonu::require_string(r, "id", path);
      const std::string fam = jsonu::require_string(r, "family", path);
      auto f = parse_family(fam);
      if (!f) throw Error(ErrorKind::kRuleLoad, "unknown exploit family '" + fam + "'");
      rule.family = *f;
      const std::string sev = jsonu::require_string(r, "severity", path);
      if (sev == "reject") {
        rule.severity = Severity::kReject;
      } else if (sev == "review") {
        rule.severity = Severity::kReview;
      } else {
        throw Error(ErrorKind::kRuleLoad, "unknown severity '" + sev + "'");
      }
      const Json& pats = jsonu::require(r, "patterns", path);
      if (!pats.is_array() || pats.empty()) {
        throw Error(ErrorKind::kRuleLoad, "rule needs at least one pattern");
      }
      for (const auto& p : pats) {
        Pattern pat;
        if (p.is_object() && p.contains("regex") && p["regex"].is_string()) {
          pat.is_regex = true;
          pat.text = p["regex"].get<std::string>();
          try {
            pat.compiled = std::regex(pat.text, std::regex::ECMAScript);
          } catch (const std::regex_error& e) {
            throw Error(ErrorKind::kRuleLoad, "invalid regular expression '" + pat.text + "'");
          }
        } else if (p.is_object() && p.contains("literal") && p["literal"].is_string()) {
          pat.text = p["literal"].get<std::string>();
        } else if (p.is_string()) {
          pat.text = p.get<std::string>();
        } else {
          throw Error(ErrorKind::kRuleLoad, "pattern must be a string, {literal} or {regex}");
        }
        if (pat.text.empty()) throw Error(ErrorKind::kRuleLoad, "pattern is empty");
        rule.patterns.push_back(std::move(pat));
      }
    } catch (const Error& e) {
      const std::string who = rule.id.empty() ? path : "rule '" + rule.id + "'";
      throw Error(ErrorKind::kRuleLoad, who + ": " + e.what());
    }
    if (!ids.insert(rule.id).second) {
      throw Error(ErrorKind::kRuleLoad, "rule '" + rule.id + "' is defined twice");
    }
    set.rules.push_back(std::move(rule));
  }
  return set;
}

std::string strip_comments(std::string_view src, const CommentGrammar& g) {
  std::string out(src);
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto starts_with = [&](std::size_t at, std::string_view m) {
    return !m.empty() && src.substr(at, m.size()) == m;
  };
  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < n; ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  };
  while (i < n) {
    const char c = src[i];
    if (std::find(g.string_quotes.begin(), g.string_quotes.end(), c) != g.string_quotes.end()) {
      const bool triple = i + 2 < n && src[i + 1] == c && src[i + 2] == c;
      if (triple) {
        const std::string closer(3, c);
        const std::size_t end = src.find(closer, i + 3);
        i = end == std::string_view::npos ? n : end + 3;
        continue;
      }
      ++i;
      while (i < n && src[i] != c && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i < n && src[i] == c) ++i;
      continue;
    }
    bool consumed = false;
    for (const auto& m : g.line_markers) {
      if (starts_with(i, m)) {
        std::size_t end = src.find('\n', i);
        if (end == std::string_view::npos) end = n;
        blank(i, end);
        i = end;
        consumed = true;
        break;
      }
    }
    if (consumed) continue;
    for (const auto& [open, close] : g.block_markers) {
      if (starts_with(i, open)) {
        std::size_t end = src.find(close, i + open.size());
        end = end == std::string_view::npos ? n : end + close.size();
        blank(i, end);
        i = end;
        consumed = true;
        break;
      }
    }
    if (!consumed) ++i;
  }
  return out;
}

namespace {

void sort_findings(std::vector<AuditFinding>& f) {
  std::sort(f.begin(), f.end(), [](const AuditFinding& a, const AuditFinding& b) {
    return std::tie(a.file, a.line, a.rule_id) < std::tie(b.file, b.line, b.rule_id);
  });
}

}  // namespace

std::vector<AuditFinding> scan_submission(const std::map<std::string, std::string>& sources,
                                          const RuleSet& rules,
                                          std::optional<DType> declared_precision) {
  if (rules.rules.empty()) throw Error(ErrorKind::kRuleLoad, "no audit rules loaded");
  std::vector<AuditFinding> findings;
  for (const auto& [file, text] : sources) {
    const std::string stripped = strip_comments(text, rules.grammar_for(file));
    const auto original_lines = split_lines(text);
    const auto stripped_lines = split_lines(stripped);
    for (std::size_t ln = 0; ln < stripped_lines.size(); ++ln) {
      const NormalizedLine norm = normalize_line(stripped_lines[ln]);
      if (norm.text.empty()) continue;
      for (const auto& rule : rules.rules) {
        const bool downgrade = rule.family == ExploitFamily::kPrecisionDowngrade;
        if (downgrade && declared_precision != DType::kFP32) continue;
        for (const auto& pat : rule.patterns) {
          std::size_t pos = std::string::npos, len = 0;
          if (pat.is_regex) {
            std::smatch m;
            if (std::regex_search(norm.text, m, pat.compiled) && m.length(0) > 0) {
              pos = static_cast<std::size_t>(m.position(0));
              len = static_cast<std::size_t>(m.length(0));
            }
          } else {
            pos = norm.text.find(pat.text);
            len = pat.text.size();
          }
          if (pos == std::string::npos) continue;
          const std::size_t begin = norm.origin[pos];
          const std::size_t end = norm.origin[pos + len - 1] + 1;
          findings.push_back(AuditFinding{rule.id, rule.family, file, ln + 1,
                                          excerpt(original_lines[ln], begin, end),
                                          downgrade ? Severity::kReview : rule.severity});
          break;
        }
      }
    }
  }
  sort_findings(findings);
  return findings;
}

std::vector<MagicSignature> default_binary_magics() {
  return {
      {"elf", {0x7F, 0x45, 0x4C, 0x46}},
      {"cuda-fatbin", {0x50, 0xED, 0x55, 0xBA}},
  };
}

std::vector<AuditFinding> detect_embedded_binary(const std::map<std::string, std::string>& sources,
                                                 std::size_t min_blob_chars,
                                                 const std::vector<MagicSignature>& magics,
                                                 const RuleSet* grammars) {
  if (min_blob_chars < 64) {
    throw Error(ErrorKind::kInvalidValue, "min_blob_chars must be at least 64");
  }
  const RuleSet fallback{{}, default_comment_grammars()};
  const RuleSet& gsrc = grammars != nullptr ? *grammars : fallback;
  std::vector<AuditFinding> findings;
  for (const auto& [file, text] : sources) {
    const std::string stripped = strip_comments(text, gsrc.grammar_for(file));
    const auto lines = split_lines(stripped);
    const auto original = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      const std::string_view line = lines[ln];
      std::size_t i = 0;
      while (i < line.size()) {
        if (!base64::is_alphabet_char(line[i])) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < line.size() && base64::is_alphabet_char(line[j])) ++j;
        std::size_t end = j;
        while (end < line.size() && end - j < 2 && line[end] == '=') ++end;
        if (end - i >= min_blob_chars) {
          // Decode only a short prefix; 16 chars give 12 bytes.
          const auto prefix = base64::decode(line.substr(i, 16));
          if (prefix) {
            for (const auto& magic : magics) {
              if (prefix->size() >= magic.bytes.size() &&
                  std::equal(magic.bytes.begin(), magic.bytes.end(), prefix->begin())) {
                findings.push_back(AuditFinding{"embedded-binary-" + magic.name,
                                                ExploitFamily::kEmbeddedBinary, file, ln + 1,
                                                excerpt(original[ln], i, end), Severity::kReject});
                break;
              }
            }
          }
        }
        i = end;
      }
    }
  }
  sort_findings(findings);
  return findings;
}

std::map<ExploitFamily, FamilyShare> exploit_distribution(
    const std::vector<std::vector<AuditFinding>>& findings_by_submission,
    std::uint64_t total_submissions) {
  if (total_submissions == 0) {
    throw Error(ErrorKind::kInvalidValue, "exploit distribution needs total_submissions > 0");
  }
  std::uint64_t flagged = 0;
  std::map<ExploitFamily, FamilyShare> out;
  for (const auto& [f, name] : kFamilies) out[f] = FamilyShare{};
  for (const auto& submission : findings_by_submission) {
    std::set<ExploitFamily> seen;
    for (const auto& f : submission) seen.insert(f.family);
    if (!seen.empty()) ++flagged;
    for (auto f : seen) ++out[f].count;
  }
  if (flagged > total_submissions) {
    throw Error(ErrorKind::kInvalidValue, "more flagged submissions than total submissions");
  }
  for (auto& [f, share] : out) {
    share.fraction = static_cast<double>(share.count) / static_cast<double>(total_submissions);
  }
  return out;
}

OrderedJson finding_to_json(const AuditFinding& f) {
  OrderedJson j;
  j["rule_id"] = f.rule_id;
  j["family"] = std::string(family_name(f.family));
  j["file"] = f.file;
  j["line"] = f.line;
  j["matched_excerpt"] = f.matched_excerpt;
  j["severity"] = std::string(severity_name(f.severity));
  return j;
}

AuditFinding finding_from_json(const Json& j) {
  AuditFinding f;
  f.rule_id = jsonu::require_string(j, "rule_id", "");
  const std::string fam = jsonu::require_string(j, "family", "");
  auto pf = parse_family(fam);
  if (!pf) throw Error(ErrorKind::kInvalidValue, "unknown exploit family '" + fam + "'");
  f.family = *pf;
  f.file = jsonu::require_string(j, "file", "");
  const Json& line = jsonu::require(j, "line", "");
  if (!line.is_number_integer()) throw Error(ErrorKind::kInvalidValue, "field 'line' must be an integer");
  f.line = line.get<std::size_t>();
  if (auto it = j.find("matched_excerpt"); it != j.end() && it->is_string()) {
    f.matched_excerpt = it->get<std::string>();
  }
  const std::string sev = jsonu::require_string(j, "severity", "");
  if (sev != "reject" && sev != "review") {
    throw Error(ErrorKind::kInvalidValue, "unknown severity '" + sev + "'");
  }
  f.severity = sev == "reject" ? Severity::kReject : Severity::kReview;
  return f;
}

}  // namespace solbound

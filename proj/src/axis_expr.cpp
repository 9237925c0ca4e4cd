// Recursive-descent evaluator for axis expressions.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>

#include "solbound/error.hpp"
#include "solbound/specs_io.hpp"

namespace solbound {

namespace {

struct Ast {
  char op = 0;  // 0 = leaf
  std::int64_t literal = 0;
  std::string ident;
  std::size_t column = 0;
  std::unique_ptr<Ast> lhs, rhs;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  std::unique_ptr<Ast> parse() {
    auto root = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kParse, "axis expression '" + std::string(text_) + "': " + what +
                                       " at column " + std::to_string(pos_ + 1));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static std::unique_ptr<Ast> binary(char op, std::unique_ptr<Ast> l, std::unique_ptr<Ast> r,
                                     std::size_t column) {
    auto n = std::make_unique<Ast>();
    n->op = op;
    n->column = column;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  std::unique_ptr<Ast> parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      skip_space();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        const char op = text_[pos_];
        const std::size_t col = pos_ + 1;
        ++pos_;
        lhs = binary(op, std::move(lhs), parse_product(), col);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Ast> parse_product() {
    auto lhs = parse_factor();
    for (;;) {
      skip_space();
      if (pos_ < text_.size() && (text_[pos_] == '*' || text_[pos_] == '/')) {
        const char op = text_[pos_];
        const std::size_t col = pos_ + 1;
        ++pos_;
        lhs = binary(op, std::move(lhs), parse_factor(), col);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Ast> parse_factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    auto leaf = std::make_unique<Ast>();
    leaf->column = pos_ + 1;
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, text_[pos_] - '0', &v)) {
          fail("integer literal overflows");
        }
        ++pos_;
      }
      if (v == 0) fail("literal must be positive");
      leaf->literal = v;
      return leaf;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      leaf->ident = std::string(text_.substr(start, pos_ - start));
      return leaf;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::int64_t evaluate(const Ast& n, std::string_view text,
                      const std::map<std::string, std::uint64_t>& env) {
  auto fail = [&](ErrorKind kind, const std::string& what) {
    throw Error(kind, "axis expression '" + std::string(text) + "': " + what + " at column " +
                          std::to_string(n.column));
  };
  if (n.op == 0) {
    if (n.ident.empty()) return n.literal;
    auto it = env.find(n.ident);
    if (it == env.end()) fail(ErrorKind::kInconsistentBinding, "unbound identifier '" + n.ident + "'");
    if (it->second > static_cast<std::uint64_t>(INT64_MAX)) fail(ErrorKind::kInvalidValue, "value too large");
    return static_cast<std::int64_t>(it->second);
  }
  const std::int64_t a = evaluate(*n.lhs, text, env);
  const std::int64_t b = evaluate(*n.rhs, text, env);
  std::int64_t r = 0;
  switch (n.op) {
    case '+':
      if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::kInvalidValue, "overflow");
      return r;
    case '-':
      if (__builtin_sub_overflow(a, b, &r)) fail(ErrorKind::kInvalidValue, "overflow");
      return r;
    case '*':
      if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::kInvalidValue, "overflow");
      return r;
    case '/':
      if (b == 0) fail(ErrorKind::kDivisionByZero, "division by zero");
      if (a == INT64_MIN && b == -1) fail(ErrorKind::kInvalidValue, "overflow");
      if (a % b != 0) {
        fail(ErrorKind::kInvalidValue, "inexact division " + std::to_string(a) + "/" +
                                           std::to_string(b));
      }
      return a / b;
  }
  return 0;
}

void collect(const Ast& n, std::vector<std::string>& out) {
  if (n.op == 0) {
    if (!n.ident.empty() && std::find(out.begin(), out.end(), n.ident) == out.end()) {
      out.push_back(n.ident);
    }
    return;
  }
  collect(*n.lhs, out);
  collect(*n.rhs, out);
}

}  // namespace

std::uint64_t eval_axis_expr(std::string_view expr_text,
                             const std::map<std::string, std::uint64_t>& env) {
  const auto ast = ExprParser(expr_text).parse();
  const std::int64_t v = evaluate(*ast, expr_text, env);
  if (v <= 0) {
    throw Error(ErrorKind::kInvalidValue, "axis expression '" + std::string(expr_text) +
                                              "' evaluated to non-positive " + std::to_string(v));
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> expr_identifiers(std::string_view expr_text) {
  const auto ast = ExprParser(expr_text).parse();
  std::vector<std::string> out;
  collect(*ast, out);
  return out;
}

}  // namespace solbound

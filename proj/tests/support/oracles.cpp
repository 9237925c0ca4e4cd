#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <set>

namespace oracle {

using namespace solbound;

namespace {

std::map<char, std::uint64_t> extents_of(const EinsumNode& n, const EinsumGraph& g) {
  std::map<char, std::uint64_t> ext;
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    const auto& shape = g.tensors.at(n.inputs[i]).shape;
    for (std::size_t d = 0; d < shape.size(); ++d) ext[n.input_specs[i][d]] = shape[d];
  }
  const auto& out = g.tensors.at(n.output).shape;
  for (std::size_t d = 0; d < out.size(); ++d) ext[n.output_spec[d]] = out[d];
  return ext;
}

// Calls body once per point of the box with these extents.
void for_each_point(const std::vector<std::uint64_t>& extents, const std::function<void()>& body) {
  std::vector<std::uint64_t> idx(extents.size(), 0);
  if (std::any_of(extents.begin(), extents.end(), [](auto e) { return e == 0; })) return;
  for (;;) {
    body();
    std::size_t d = 0;
    while (d < idx.size()) {
      if (++idx[d] < extents[d]) break;
      idx[d] = 0;
      ++d;
    }
    if (d == idx.size()) return;
  }
}

}  // namespace

std::uint64_t brute_force_node_flops(const EinsumNode& n, const EinsumGraph& g) {
  const auto ext = extents_of(n, g);
  std::vector<std::uint64_t> space;
  std::uint64_t count = 0;
  switch (n.kind) {
    case NodeKind::kContraction: {
      for (const auto& [c, e] : ext) space.push_back(e);
      const std::uint64_t operands = n.inputs.size();
      for_each_point(space, [&] {
        count += operands - 1;  // multiplies
        count += 1;             // accumulate
      });
      return count;
    }
    case NodeKind::kElementwise: {
      for (char c : n.output_spec) space.push_back(ext.at(c));
      for_each_point(space, [&] { count += n.elementwise_cost; });
      return count;
    }
    case NodeKind::kReduction: {
      for (char c : n.input_specs[0]) space.push_back(ext.at(c));
      for_each_point(space, [&] { ++count; });
      return count;
    }
    case NodeKind::kPermutation:
      return 0;
  }
  return 0;
}

std::uint64_t brute_force_flops(const EinsumGraph& g) {
  std::uint64_t total = 0;
  for (const auto& n : g.nodes) total += brute_force_node_flops(n, g);
  return total;
}

namespace {

std::string shuffled(std::string s, std::mt19937_64& rng) {
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

std::string random_subset(const std::string& from, std::size_t min_size, std::mt19937_64& rng) {
  std::string s = shuffled(from, rng);
  std::uniform_int_distribution<std::size_t> len(std::min(min_size, s.size()), s.size());
  s.resize(len(rng));
  return s;
}

}  // namespace

EinsumGraph random_graph(std::mt19937_64& rng, int max_nodes, std::uint64_t max_extent) {
  static const std::string kPool = "abcdef";
  static const DType kTypes[] = {DType::kFP32, DType::kBF16, DType::kFP16, DType::kFP8,
                                 DType::kINT32};
  std::uniform_int_distribution<std::uint64_t> extent(1, max_extent);
  std::map<char, std::uint64_t> ext;
  for (char c : kPool) ext[c] = extent(rng);

  EinsumGraph g;
  int tensor_id = 0;
  auto add_tensor = [&](const std::string& spec, TensorRole role) {
    TensorDecl t;
    t.name = "t" + std::to_string(tensor_id++);
    for (char c : spec) t.shape.push_back(ext[c]);
    t.dtype.name = kTypes[std::uniform_int_distribution<int>(0, 4)(rng)];
    if (t.dtype.name == DType::kFP8) t.dtype.scale_block = default_scale_block(DType::kFP8);
    t.role = role;
    g.tensors[t.name] = t;
    return t.name;
  };

  const int nodes = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  std::string cur_name, cur_spec;
  for (int i = 0; i < nodes; ++i) {
    EinsumNode n;
    n.id = "n" + std::to_string(i);
    if (cur_name.empty()) {
      cur_spec = random_subset(kPool, 1, rng);
      if (cur_spec.size() > 4) cur_spec.resize(4);
      cur_name = add_tensor(cur_spec, TensorRole::kInput);
    }
    int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    if (kind == 2 && cur_spec.size() < 2) kind = 1;
    std::string out_spec;
    switch (kind) {
      case 0: {  // contraction: a second operand sharing >= 1 letter, one shared letter dropped
        n.kind = NodeKind::kContraction;
        std::string other = random_subset(cur_spec, 1, rng);
        std::string extra;
        for (char c : kPool) {
          if (cur_spec.find(c) == std::string::npos && std::bernoulli_distribution(0.3)(rng)) extra += c;
        }
        other = shuffled(other + extra.substr(0, 2), rng);
        const char dropped = other[std::uniform_int_distribution<std::size_t>(0, other.size() - 1)(rng)];
        std::string uni = cur_spec;
        for (char c : other) {
          if (uni.find(c) == std::string::npos) uni += c;
        }
        for (char c : uni) {
          if (c != dropped && std::bernoulli_distribution(0.85)(rng)) out_spec += c;
        }
        if (out_spec.empty()) {
          for (char c : uni) {
            if (c != dropped) {
              out_spec = std::string(1, c);
              break;
            }
          }
        }
        if (out_spec.empty()) {  // both operands are exactly {dropped}
          n.kind = NodeKind::kElementwise;
          out_spec = cur_spec;
          n.inputs = {cur_name};
          n.input_specs = {cur_spec};
          break;
        }
        const std::string other_name =
            add_tensor(other, std::bernoulli_distribution(0.5)(rng) ? TensorRole::kWeight
                                                                    : TensorRole::kInput);
        n.inputs = {cur_name, other_name};
        n.input_specs = {cur_spec, other};
        if (std::bernoulli_distribution(0.2)(rng)) {
          const std::string third = random_subset(uni, 1, rng);
          n.inputs.push_back(add_tensor(third, TensorRole::kInput));
          n.input_specs.push_back(third);
        }
        out_spec = shuffled(out_spec, rng);
        break;
      }
      case 1: {  // elementwise with an optional broadcast operand
        n.kind = NodeKind::kElementwise;
        n.elementwise_cost = std::uniform_int_distribution<std::uint64_t>(0, 4)(rng);
        n.op = "op" + std::to_string(n.elementwise_cost);
        out_spec = cur_spec;
        n.inputs = {cur_name};
        n.input_specs = {cur_spec};
        if (std::bernoulli_distribution(0.6)(rng)) {
          const std::string b = random_subset(cur_spec, 1, rng);
          n.inputs.push_back(add_tensor(b, TensorRole::kInput));
          n.input_specs.push_back(b);
        }
        break;
      }
      case 2: {  // reduction to a strict, non-empty subset
        n.kind = NodeKind::kReduction;
        out_spec = random_subset(cur_spec, 1, rng);
        if (out_spec.size() == cur_spec.size()) out_spec.pop_back();
        n.inputs = {cur_name};
        n.input_specs = {cur_spec};
        break;
      }
      default: {
        n.kind = NodeKind::kPermutation;
        out_spec = shuffled(cur_spec, rng);
        n.inputs = {cur_name};
        n.input_specs = {cur_spec};
        break;
      }
    }
    n.output_spec = out_spec;
    n.output = add_tensor(out_spec, i + 1 == nodes ? TensorRole::kOutput : TensorRole::kIntermediate);
    cur_name = n.output;
    cur_spec = out_spec;
    g.nodes.push_back(std::move(n));
  }
  return g;
}

namespace {

struct Expr {
  char op = 0;
  std::int64_t literal = 0;
  std::string ident;
  std::unique_ptr<Expr> l, r;
};

int precedence(char op) { return op == '+' || op == '-' ? 1 : 2; }

std::unique_ptr<Expr> gen(std::mt19937_64& rng, int depth) {
  auto e = std::make_unique<Expr>();
  if (depth == 0 || std::bernoulli_distribution(0.3)(rng)) {
    if (std::bernoulli_distribution(0.5)(rng)) {
      e->ident = std::string(1, "abcde"[std::uniform_int_distribution<int>(0, 4)(rng)]);
      if (std::bernoulli_distribution(0.3)(rng)) e->ident += "_dim";
    } else {
      e->literal = std::uniform_int_distribution<std::int64_t>(1, 64)(rng);
    }
    return e;
  }
  e->op = "+-*/"[std::uniform_int_distribution<int>(0, 3)(rng)];
  e->l = gen(rng, depth - 1);
  e->r = gen(rng, depth - 1);
  return e;
}

std::string spaces(std::mt19937_64& rng) {
  return std::string(std::uniform_int_distribution<int>(0, 2)(rng) == 2 ? 1 : 0, ' ');
}

std::string render(const Expr& e, std::mt19937_64& rng) {
  if (e.op == 0) return e.ident.empty() ? std::to_string(e.literal) : e.ident;
  std::string l = render(*e.l, rng), r = render(*e.r, rng);
  const bool paren_l = e.l->op != 0 && (precedence(e.l->op) < precedence(e.op) ||
                                        std::bernoulli_distribution(0.2)(rng));
  const bool paren_r = e.r->op != 0 && (precedence(e.r->op) <= precedence(e.op) ||
                                        std::bernoulli_distribution(0.2)(rng));
  if (paren_l) l = "(" + spaces(rng) + l + spaces(rng) + ")";
  if (paren_r) r = "(" + spaces(rng) + r + spaces(rng) + ")";
  return l + spaces(rng) + e.op + spaces(rng) + r;
}

std::optional<__int128> eval(const Expr& e, const std::map<std::string, std::uint64_t>& env) {
  constexpr __int128 kMax = INT64_MAX, kMin = INT64_MIN;
  if (e.op == 0) {
    if (e.ident.empty()) return e.literal;
    auto it = env.find(e.ident);
    if (it == env.end()) return std::nullopt;
    return static_cast<__int128>(it->second);
  }
  auto a = eval(*e.l, env), b = eval(*e.r, env);
  if (!a || !b) return std::nullopt;
  __int128 v = 0;
  switch (e.op) {
    case '+': v = *a + *b; break;
    case '-': v = *a - *b; break;
    case '*': v = *a * *b; break;
    case '/':
      if (*b == 0 || *a % *b != 0) return std::nullopt;
      v = *a / *b;
      break;
  }
  if (v > kMax || v < kMin) return std::nullopt;
  return v;
}

}  // namespace

ExprCase random_expression(std::mt19937_64& rng) {
  ExprCase c;
  for (const char* name : {"a", "b", "c", "d", "e", "a_dim", "b_dim", "c_dim", "d_dim"}) {
    c.env[name] = std::uniform_int_distribution<std::uint64_t>(1, 48)(rng);
  }
  auto tree = gen(rng, std::uniform_int_distribution<int>(0, 5)(rng));
  c.text = spaces(rng) + render(*tree, rng) + spaces(rng);
  auto v = eval(*tree, c.env);
  if (v && *v > 0) c.expected = static_cast<std::int64_t>(*v);
  return c;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const long double mx = sx / n, my = sy / n;
  long double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(cxy / std::sqrt(cxx * cyy));
}

}  // namespace oracle

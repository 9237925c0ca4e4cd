#include "solbound/ir.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "solbound/error.hpp"

namespace solbound {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kMissingField: return "missing-field";
    case ErrorKind::kInvalidValue: return "invalid-value";
    case ErrorKind::kUnsupportedType: return "unsupported-element-type";
    case ErrorKind::kInconsistentBinding: return "inconsistent-binding";
    case ErrorKind::kCycle: return "cycle";
    case ErrorKind::kDivisionByZero: return "division-by-zero";
    case ErrorKind::kUnknownPrecision: return "unknown-precision";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kMisconfiguration: return "misconfiguration";
    case ErrorKind::kEmpty: return "empty";
    case ErrorKind::kRuleLoad: return "rule-load";
    case ErrorKind::kValidation: return "validation";
  }
  return "unknown";
}

namespace {

struct DTypeRow {
  DType dtype;
  std::string_view name;
  std::uint32_t bits;  // 0 for MIXED
};

constexpr DTypeRow kDTypes[] = {
    {DType::kFP32, "fp32", 32}, {DType::kFP16, "fp16", 16},
    {DType::kBF16, "bf16", 16}, {DType::kFP8, "fp8", 8},
    {DType::kNVFP4, "nvfp4", 4}, {DType::kINT32, "int32", 32},
    {DType::kBOOL, "bool", 8},   {DType::kMIXED, "mixed", 0},
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::string_view what) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::kInvalidValue, std::string(what) + ": 64-bit overflow");
  }
  return out;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return a / b + (a % b != 0 ? 1 : 0);
}

}  // namespace

std::string_view dtype_name(DType d) {
  for (const auto& row : kDTypes) {
    if (row.dtype == d) return row.name;
  }
  return "mixed";
}

std::optional<DType> parse_dtype(std::string_view s) {
  for (const auto& row : kDTypes) {
    if (row.name == s) return row.dtype;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> dtype_bits(DType d) {
  for (const auto& row : kDTypes) {
    if (row.dtype == d) {
      if (row.bits == 0) return std::nullopt;
      return row.bits;
    }
  }
  return std::nullopt;
}

bool dtype_allows_scale_block(DType d) { return d == DType::kFP8 || d == DType::kNVFP4; }

ScaleBlock default_scale_block(DType d) {
  // NVFP4 uses 16-element blocks; FP8 blockwise scaling uses 1x128 tiles.
  if (d == DType::kFP8) return ScaleBlock{128, 8};
  return ScaleBlock{16, 8};
}

std::optional<std::uint32_t> ElementType::bits() const { return dtype_bits(name); }

std::string_view role_name(TensorRole r) {
  switch (r) {
    case TensorRole::kInput: return "input";
    case TensorRole::kWeight: return "weight";
    case TensorRole::kIntermediate: return "intermediate";
    case TensorRole::kOutput: return "output";
  }
  return "input";
}

std::optional<TensorRole> parse_role(std::string_view s) {
  if (s == "input") return TensorRole::kInput;
  if (s == "weight") return TensorRole::kWeight;
  if (s == "intermediate") return TensorRole::kIntermediate;
  if (s == "output") return TensorRole::kOutput;
  return std::nullopt;
}

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::kContraction: return "contraction";
    case NodeKind::kElementwise: return "elementwise";
    case NodeKind::kReduction: return "reduction";
    case NodeKind::kPermutation: return "permutation";
  }
  return "elementwise";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  if (s == "contraction") return NodeKind::kContraction;
  if (s == "elementwise") return NodeKind::kElementwise;
  if (s == "reduction") return NodeKind::kReduction;
  if (s == "permutation") return NodeKind::kPermutation;
  return std::nullopt;
}

std::uint64_t TensorDecl::numel() const {
  std::uint64_t n = 1;
  for (auto e : shape) n = checked_mul(n, e, "numel of " + name);
  return n;
}

const TensorDecl* EinsumGraph::find_tensor(std::string_view name) const {
  auto it = tensors.find(std::string(name));
  return it == tensors.end() ? nullptr : &it->second;
}

const EinsumNode* EinsumGraph::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

bool ValidationOutcome::has_rule(std::string_view rule) const {
  return std::any_of(defects.begin(), defects.end(),
                     [&](const Defect& d) { return d.rule == rule; });
}

std::uint64_t tensor_bytes(const TensorDecl& decl, bool include_scale_overhead) {
  auto bits = decl.dtype.bits();
  if (!bits) {
    throw Error(ErrorKind::kUnsupportedType,
                "tensor '" + decl.name + "' has dtype mixed, which has no byte size");
  }
  const std::uint64_t n = decl.numel();
  std::uint64_t bytes = ceil_div(checked_mul(n, *bits, "bit count of " + decl.name), 8);
  if (include_scale_overhead && decl.dtype.scale_block) {
    const auto& sb = *decl.dtype.scale_block;
    const std::uint64_t blocks = ceil_div(n, sb.block_size);
    bytes += ceil_div(checked_mul(blocks, sb.scale_bits, "scale bits of " + decl.name), 8);
  }
  return bytes;
}

std::map<char, std::uint64_t> bind_node_letters(const EinsumNode& node,
                                                const EinsumGraph& graph) {
  std::map<char, std::uint64_t> binding;
  auto bind = [&](const IndexSpec& spec, const std::string& tensor_name) {
    const TensorDecl* t = graph.find_tensor(tensor_name);
    if (t == nullptr) {
      throw Error(ErrorKind::kInconsistentBinding,
                  "node '" + node.id + "' references undeclared tensor '" + tensor_name + "'");
    }
    if (spec.size() != t->shape.size()) {
      throw Error(ErrorKind::kInconsistentBinding,
                  "node '" + node.id + "': index spec '" + spec + "' has " +
                      std::to_string(spec.size()) + " letters but tensor '" + tensor_name +
                      "' has rank " + std::to_string(t->shape.size()));
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
      auto [it, inserted] = binding.emplace(spec[i], t->shape[i]);
      if (!inserted && it->second != t->shape[i]) {
        throw Error(ErrorKind::kInconsistentBinding,
                    "node '" + node.id + "': index '" + std::string(1, spec[i]) +
                        "' bound to extent " + std::to_string(it->second) + " and " +
                        std::to_string(t->shape[i]));
      }
    }
  };
  if (node.input_specs.size() != node.inputs.size()) {
    throw Error(ErrorKind::kInconsistentBinding,
                "node '" + node.id + "' has " + std::to_string(node.inputs.size()) +
                    " inputs but " + std::to_string(node.input_specs.size()) + " input specs");
  }
  for (std::size_t i = 0; i < node.inputs.size(); ++i) bind(node.input_specs[i], node.inputs[i]);
  bind(node.output_spec, node.output);
  return binding;
}

namespace {

void check_node_structure(const EinsumNode& node, const EinsumGraph& graph,
                          std::vector<Defect>& out) {
  auto defect = [&](std::string rule, std::string detail) {
    out.push_back(Defect{node.id, std::move(rule), std::move(detail)});
  };

  bool refs_ok = true;
  for (const auto& in : node.inputs) {
    if (graph.find_tensor(in) == nullptr) {
      defect("undeclared tensor", "input '" + in + "' is not declared");
      refs_ok = false;
    }
  }
  if (graph.find_tensor(node.output) == nullptr) {
    defect("undeclared tensor", "output '" + node.output + "' is not declared");
    refs_ok = false;
  }
  if (node.input_specs.size() != node.inputs.size()) {
    defect("arity", "input spec count differs from input count");
    return;
  }

  std::set<char> in_letters;
  for (const auto& s : node.input_specs) in_letters.insert(s.begin(), s.end());
  const std::set<char> out_letters(node.output_spec.begin(), node.output_spec.end());
  for (char c : out_letters) {
    if (!in_letters.count(c)) {
      defect("unbound output index",
             "output index '" + std::string(1, c) + "' appears in no input spec");
    }
  }
  const bool drops_index = std::any_of(in_letters.begin(), in_letters.end(),
                                       [&](char c) { return !out_letters.count(c); });

  switch (node.kind) {
    case NodeKind::kContraction:
      if (node.inputs.size() < 2) defect("contraction arity", "contraction needs >= 2 inputs");
      if (!drops_index) defect("contraction index", "contraction reduces no index");
      break;
    case NodeKind::kElementwise:
      if (node.inputs.empty()) defect("elementwise arity", "elementwise needs >= 1 input");
      if (drops_index) defect("elementwise index", "elementwise node drops an input index");
      break;
    case NodeKind::kPermutation: {
      if (node.inputs.size() != 1) {
        defect("permutation arity", "permutation needs exactly 1 input");
        break;
      }
      std::string a = node.input_specs[0], b = node.output_spec;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) defect("permutation index", "input and output index multisets differ");
      break;
    }
    case NodeKind::kReduction:
      if (node.inputs.size() != 1) {
        defect("reduction arity", "reduction needs exactly 1 input");
        break;
      }
      if (!drops_index) defect("reduction index", "reduction output is not a strict subset");
      break;
  }

  if (refs_ok) {
    try {
      bind_node_letters(node, graph);
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.find("rank") != std::string::npos) {
        defect("rank mismatch", msg);
      } else {
        defect("inconsistent extent", msg);
      }
    }
  }
}

}  // namespace

ValidationOutcome validate_graph(const EinsumGraph& graph) {
  ValidationOutcome result;
  auto& defects = result.defects;

  for (const auto& [key, t] : graph.tensors) {
    if (t.name.empty() || t.name != key) {
      defects.push_back({key, "tensor name", "tensor name is empty or does not match its key"});
    }
    for (auto e : t.shape) {
      if (e == 0) {
        defects.push_back({key, "non-positive extent", "shape contains a zero extent"});
        break;
      }
    }
    if (t.dtype.scale_block && !dtype_allows_scale_block(t.dtype.name)) {
      defects.push_back({key, "scale block", "scale_block is only valid for fp8 and nvfp4"});
    }
  }

  std::set<std::string> ids;
  std::map<std::string, int> producers;
  std::map<std::string, int> consumers;
  for (const auto& node : graph.nodes) {
    if (node.id.empty() || !ids.insert(node.id).second) {
      defects.push_back({node.id, "duplicate node id", "node id is empty or repeated"});
    }
    check_node_structure(node, graph, defects);
    ++producers[node.output];
    for (const auto& in : node.inputs) ++consumers[in];
  }

  for (const auto& [name, t] : graph.tensors) {
    const int p = producers.count(name) ? producers.at(name) : 0;
    const bool produced_role =
        t.role == TensorRole::kIntermediate || t.role == TensorRole::kOutput;
    if (produced_role && p != 1) {
      defects.push_back({name, "producer count",
                         std::string(role_name(t.role)) + " tensor has " + std::to_string(p) +
                             " producers, expected 1"});
    }
    if (!produced_role && p != 0) {
      defects.push_back({name, "producer count",
                         std::string(role_name(t.role)) + " tensor must not be produced"});
    }
    if (t.role == TensorRole::kIntermediate && !consumers.count(name)) {
      defects.push_back({name, "unconsumed intermediate", "intermediate is never consumed"});
    }
  }

  // Acyclicity: Kahn over node -> node edges induced by tensors.
  std::map<std::string, std::string> producer_of;
  for (const auto& n : graph.nodes) producer_of.emplace(n.output, n.id);
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : graph.nodes) indegree[n.id];
  for (const auto& n : graph.nodes) {
    for (const auto& in : n.inputs) {
      auto it = producer_of.find(in);
      if (it != producer_of.end()) {
        ++indegree[n.id];
        succ[it->second].push_back(n.id);
      }
    }
  }
  std::vector<std::string> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& s : succ[id]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (visited != indegree.size()) {
    for (const auto& [id, d] : indegree) {
      if (d > 0) defects.push_back({id, "cycle", "node participates in a dataflow cycle"});
    }
  }
  return result;
}

std::vector<std::string> topological_order(const EinsumGraph& graph) {
  std::map<std::string, std::string> producer_of;
  for (const auto& n : graph.nodes) producer_of.emplace(n.output, n.id);

  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : graph.nodes) indegree[n.id];
  for (const auto& n : graph.nodes) {
    for (const auto& in : n.inputs) {
      auto it = producer_of.find(in);
      if (it == producer_of.end()) continue;
      ++indegree[n.id];
      succ[it->second].push_back(n.id);
    }
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push(id);
  }
  std::vector<std::string> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    auto id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& s : succ[id]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (order.size() != indegree.size()) {
    throw Error(ErrorKind::kCycle, "graph contains a dataflow cycle");
  }
  return order;
}

}  // namespace solbound

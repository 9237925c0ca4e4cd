#pragma once
// Extended-einsum graph IR.
//
// A graph is a set of named, shaped, typed tensors plus an ordered list of
// nodes. Each node describes its iteration space with one index string per
// operand; a letter binds to the extent of the shape position it occupies.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solbound {

enum class DType { kFP32, kFP16, kBF16, kFP8, kNVFP4, kINT32, kBOOL, kMIXED };

struct ScaleBlock {
  std::uint32_t block_size = 16;  // elements sharing one scale
  std::uint32_t scale_bits = 8;

  friend bool operator==(const ScaleBlock&, const ScaleBlock&) = default;
};

struct ElementType {
  DType name = DType::kFP32;
  std::optional<ScaleBlock> scale_block;

  // Bits per element; nullopt for MIXED.
  std::optional<std::uint32_t> bits() const;

  friend bool operator==(const ElementType&, const ElementType&) = default;
};

// Exact lowercase strings used in every file format.
std::string_view dtype_name(DType d);
std::optional<DType> parse_dtype(std::string_view s);
std::optional<std::uint32_t> dtype_bits(DType d);
bool dtype_allows_scale_block(DType d);

// Default block layout used when a quantized tensor omits one.
ScaleBlock default_scale_block(DType d);

enum class TensorRole { kInput, kWeight, kIntermediate, kOutput };
std::string_view role_name(TensorRole r);
std::optional<TensorRole> parse_role(std::string_view s);

using Shape = std::vector<std::uint64_t>;

struct TensorDecl {
  std::string name;
  Shape shape;
  ElementType dtype;
  TensorRole role = TensorRole::kInput;

  // Product of extents; throws kInvalidValue on 64-bit overflow.
  std::uint64_t numel() const;
};

enum class NodeKind { kContraction, kElementwise, kReduction, kPermutation };
std::string_view node_kind_name(NodeKind k);
std::optional<NodeKind> parse_node_kind(std::string_view s);

// One character per axis. Nodes written with multi-character axis names get
// letters assigned in order of first appearance and keep the names in
// axis_names so they can be written back unchanged.
using IndexSpec = std::string;

struct EinsumNode {
  std::string id;
  NodeKind kind = NodeKind::kElementwise;
  std::vector<IndexSpec> input_specs;
  IndexSpec output_spec;
  std::vector<std::string> inputs;
  std::string output;
  std::uint64_t elementwise_cost = 0;
  std::string op;                       // optional operator label, e.g. "add"
  std::vector<std::string> axis_names;  // empty when specs were letters
};

struct EinsumGraph {
  std::map<std::string, TensorDecl> tensors;
  std::vector<EinsumNode> nodes;
  std::map<std::string, std::string> metadata;

  const TensorDecl* find_tensor(std::string_view name) const;
  const EinsumNode* find_node(std::string_view id) const;
};

struct Defect {
  std::string subject;  // offending tensor name or node id
  std::string rule;     // short rule tag, e.g. "cycle"
  std::string detail;

  friend bool operator==(const Defect&, const Defect&) = default;
};

struct ValidationOutcome {
  std::vector<Defect> defects;
  bool ok() const { return defects.empty(); }
  bool has_rule(std::string_view rule) const;
};

ValidationOutcome validate_graph(const EinsumGraph& graph);

// Kahn's algorithm, ties broken by ascending node id. Throws kCycle.
std::vector<std::string> topological_order(const EinsumGraph& graph);

// ceil(numel * bits / 8), plus ceil(ceil(numel / block) * scale_bits / 8)
// when include_scale_overhead is set and the dtype carries a scale block.
// Throws kUnsupportedType for MIXED.
std::uint64_t tensor_bytes(const TensorDecl& decl, bool include_scale_overhead);

// Letter -> extent map for one node. Throws kInconsistentBinding when a letter
// is bound to two different extents or a spec length disagrees with a rank.
std::map<char, std::uint64_t> bind_node_letters(const EinsumNode& node,
                                                const EinsumGraph& graph);

}  // namespace solbound

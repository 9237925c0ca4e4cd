#pragma once
// Graph file reader/writer.
//
//   { "tensors":  [ {name, shape, dtype, role, scale_block?} ... ],
//     "nodes":    [ {id, kind, op?, inputs, input_specs, output, output_spec,
//                    elementwise_cost} ... ],
//     "metadata": { string: string } }
//
// Index specs are either letter strings ("ACB") or arrays of axis names
// (["batch", "seq", "hidden"]); one node uses one form throughout.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"

namespace solbound {

// FLOPs per output element for named elementwise operators. Unknown names
// fall back to 1.
std::uint64_t default_elementwise_cost(std::string_view op);

EinsumGraph parse_graph(std::string_view text);
std::string serialize_graph(const EinsumGraph& graph);

// Building blocks reused by the problem-file parser.
ElementType element_type_from_json(const jsonu::Json& tensor, std::string_view path);
EinsumNode node_from_json(const jsonu::Json& j, std::string_view path);
jsonu::OrderedJson node_to_json(const EinsumNode& node);
void write_element_type(const ElementType& t, jsonu::OrderedJson& into);
TensorRole role_from_json(const jsonu::Json& tensor, std::string_view path);

}  // namespace solbound

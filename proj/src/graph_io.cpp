#include "solbound/graph_io.hpp"

#include <array>

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

namespace {

struct CostRow {
  std::string_view op;
  std::uint64_t flops;
};

// Transcendentals and division are charged 4 FLOPs per element.
constexpr std::array<CostRow, 20> kElementwiseCosts{{
    {"add", 1},     {"sub", 1},     {"mul", 1},     {"neg", 1},      {"relu", 1},
    {"max", 1},     {"min", 1},     {"abs", 1},     {"copy", 0},     {"cast", 1},
    {"exp", 4},     {"log", 4},     {"div", 4},     {"sqrt", 4},     {"rsqrt", 4},
    {"tanh", 4},    {"sigmoid", 4}, {"gelu", 4},    {"silu", 4},     {"pow", 4},
}};

constexpr std::string_view kLetters =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

}  // namespace

std::uint64_t default_elementwise_cost(std::string_view op) {
  for (const auto& row : kElementwiseCosts) {
    if (row.op == op) return row.flops;
  }
  return 1;
}

ElementType element_type_from_json(const Json& tensor, std::string_view path) {
  const std::string s = jsonu::require_string(tensor, "dtype", path);
  auto d = parse_dtype(s);
  if (!d) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + jsonu::join(path, "dtype") + "' has unknown dtype '" + s + "'");
  }
  ElementType t{*d, std::nullopt};
  if (auto it = tensor.find("scale_block"); it != tensor.end() && !it->is_null()) {
    if (!dtype_allows_scale_block(*d)) {
      throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::join(path, "scale_block") +
                                                "' is only valid for fp8 and nvfp4");
    }
    const std::string sp = jsonu::join(path, "scale_block");
    t.scale_block = ScaleBlock{
        static_cast<std::uint32_t>(jsonu::require_positive_int(*it, "block_size", sp)),
        static_cast<std::uint32_t>(jsonu::require_positive_int(*it, "scale_bits", sp))};
  } else if (dtype_allows_scale_block(*d)) {
    t.scale_block = default_scale_block(*d);
  }
  return t;
}

void write_element_type(const ElementType& t, OrderedJson& into) {
  into["dtype"] = std::string(dtype_name(t.name));
  if (t.scale_block) {
    into["scale_block"] = OrderedJson{{"block_size", t.scale_block->block_size},
                                      {"scale_bits", t.scale_block->scale_bits}};
  }
}

TensorRole role_from_json(const Json& tensor, std::string_view path) {
  const std::string s = jsonu::require_string(tensor, "role", path);
  auto r = parse_role(s);
  if (!r) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + jsonu::join(path, "role") + "' has unknown role '" + s + "'");
  }
  return *r;
}

EinsumNode node_from_json(const Json& j, std::string_view path) {
  EinsumNode node;
  node.id = jsonu::require_string(j, "id", path);
  const std::string kind = jsonu::require_string(j, "kind", path);
  auto k = parse_node_kind(kind);
  if (!k) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + jsonu::join(path, "kind") + "' has unknown kind '" + kind + "'");
  }
  node.kind = *k;
  if (auto it = j.find("op"); it != j.end() && it->is_string()) node.op = it->get<std::string>();

  const Json& inputs = jsonu::require(j, "inputs", path);
  if (!inputs.is_array()) {
    throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::join(path, "inputs") +
                                              "' must be an array of tensor names");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].is_string()) {
      throw Error(ErrorKind::kInvalidValue,
                  "field '" + jsonu::index(jsonu::join(path, "inputs"), i) + "' must be a string");
    }
    node.inputs.push_back(inputs[i].get<std::string>());
  }
  node.output = jsonu::require_string(j, "output", path);

  const Json& in_specs = jsonu::require(j, "input_specs", path);
  const Json& out_spec = jsonu::require(j, "output_spec", path);
  if (!in_specs.is_array()) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + jsonu::join(path, "input_specs") + "' must be an array");
  }
  bool named = out_spec.is_array();
  for (const auto& s : in_specs) named = named || s.is_array();

  if (!named) {
    for (std::size_t i = 0; i < in_specs.size(); ++i) {
      if (!in_specs[i].is_string()) {
        throw Error(ErrorKind::kInvalidValue, "field '" +
                                                  jsonu::index(jsonu::join(path, "input_specs"), i) +
                                                  "' must be a string");
      }
      node.input_specs.push_back(in_specs[i].get<std::string>());
    }
    if (!out_spec.is_string()) {
      throw Error(ErrorKind::kInvalidValue,
                  "field '" + jsonu::join(path, "output_spec") + "' must be a string");
    }
    node.output_spec = out_spec.get<std::string>();
  } else {
    auto letters_for = [&](const Json& spec, const std::string& where) {
      if (!spec.is_array()) {
        throw Error(ErrorKind::kInvalidValue,
                    "field '" + where + "' must be an array of axis names (node mixes forms)");
      }
      IndexSpec out;
      for (const auto& name : spec) {
        if (!name.is_string() || name.get<std::string>().empty()) {
          throw Error(ErrorKind::kInvalidValue, "field '" + where + "' holds a non-string axis");
        }
        const std::string n = name.get<std::string>();
        std::size_t pos = 0;
        while (pos < node.axis_names.size() && node.axis_names[pos] != n) ++pos;
        if (pos == node.axis_names.size()) {
          if (pos >= kLetters.size()) {
            throw Error(ErrorKind::kInvalidValue, "node '" + node.id + "' uses too many axes");
          }
          node.axis_names.push_back(n);
        }
        out.push_back(kLetters[pos]);
      }
      return out;
    };
    for (std::size_t i = 0; i < in_specs.size(); ++i) {
      node.input_specs.push_back(
          letters_for(in_specs[i], jsonu::index(jsonu::join(path, "input_specs"), i)));
    }
    node.output_spec = letters_for(out_spec, jsonu::join(path, "output_spec"));
  }

  if (auto it = j.find("elementwise_cost"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::join(path, "elementwise_cost") +
                                                "' must be a non-negative integer");
    }
    node.elementwise_cost = it->get<std::uint64_t>();
  } else if (node.kind == NodeKind::kElementwise) {
    node.elementwise_cost = default_elementwise_cost(node.op);
  }
  return node;
}

OrderedJson node_to_json(const EinsumNode& node) {
  auto spec_json = [&](const IndexSpec& spec) -> OrderedJson {
    if (node.axis_names.empty()) return spec;
    OrderedJson arr = OrderedJson::array();
    for (char c : spec) arr.push_back(node.axis_names.at(kLetters.find(c)));
    return arr;
  };
  OrderedJson j;
  j["id"] = node.id;
  j["kind"] = std::string(node_kind_name(node.kind));
  if (!node.op.empty()) j["op"] = node.op;
  j["inputs"] = node.inputs;
  OrderedJson specs = OrderedJson::array();
  for (const auto& s : node.input_specs) specs.push_back(spec_json(s));
  j["input_specs"] = std::move(specs);
  j["output"] = node.output;
  j["output_spec"] = spec_json(node.output_spec);
  j["elementwise_cost"] = node.elementwise_cost;
  return j;
}

EinsumGraph parse_graph(std::string_view text) {
  const Json doc = jsonu::parse_document(text, "graph file");
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "graph file: top level must be an object");

  EinsumGraph g;
  const Json& tensors = jsonu::require(doc, "tensors", "");
  if (!tensors.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'tensors' must be an array");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::string path = jsonu::index("tensors", i);
    TensorDecl t;
    t.name = jsonu::require_string(tensors[i], "name", path);
    const Json& shape = jsonu::require(tensors[i], "shape", path);
    if (!shape.is_array()) {
      throw Error(ErrorKind::kInvalidValue, "field '" + path + ".shape' must be an array");
    }
    for (std::size_t d = 0; d < shape.size(); ++d) {
      t.shape.push_back(jsonu::as_positive_int(shape[d], jsonu::index(path + ".shape", d)));
    }
    t.dtype = element_type_from_json(tensors[i], path);
    t.role = role_from_json(tensors[i], path);
    if (t.name.empty()) throw Error(ErrorKind::kInvalidValue, "field '" + path + ".name' is empty");
    if (!g.tensors.emplace(t.name, t).second) {
      throw Error(ErrorKind::kInvalidValue, "duplicate tensor name '" + t.name + "'");
    }
  }

  const Json& nodes = jsonu::require(doc, "nodes", "");
  if (!nodes.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'nodes' must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    g.nodes.push_back(node_from_json(nodes[i], jsonu::index("nodes", i)));
  }

  if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorKind::kInvalidValue, "field 'metadata' must be an object");
    for (const auto& [k, v] : it->items()) {
      g.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return g;
}

std::string serialize_graph(const EinsumGraph& graph) {
  OrderedJson doc;
  OrderedJson tensors = OrderedJson::array();
  for (const auto& [name, t] : graph.tensors) {
    OrderedJson j;
    j["name"] = t.name;
    j["shape"] = t.shape;
    write_element_type(t.dtype, j);
    j["role"] = std::string(role_name(t.role));
    tensors.push_back(std::move(j));
  }
  doc["tensors"] = std::move(tensors);
  OrderedJson nodes = OrderedJson::array();
  for (const auto& n : graph.nodes) nodes.push_back(node_to_json(n));
  doc["nodes"] = std::move(nodes);
  OrderedJson meta = OrderedJson::object();
  for (const auto& [k, v] : graph.metadata) meta[k] = v;
  doc["metadata"] = std::move(meta);
  return jsonu::dump(doc);
}

}  // namespace solbound

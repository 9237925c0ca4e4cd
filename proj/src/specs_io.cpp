#include "solbound/specs_io.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "solbound/error.hpp"
#include "solbound/graph_io.hpp"

namespace solbound {

using jsonu::Json;
using jsonu::OrderedJson;

namespace {

template <typename E, std::size_t N>
struct EnumTable {
  std::array<std::pair<E, std::string_view>, N> rows;

  std::string_view name(E e) const {
    for (const auto& [v, s] : rows) {
      if (v == e) return s;
    }
    return rows[0].second;
  }
  std::optional<E> parse(std::string_view s) const {
    for (const auto& [v, n] : rows) {
      if (n == s) return v;
    }
    return std::nullopt;
  }
};

constexpr EnumTable<Category, 4> kCategories{{{
    {Category::kL1, "L1"}, {Category::kL2, "L2"}, {Category::kQuant, "Quant"},
    {Category::kFIB, "FIB"}}}};

constexpr EnumTable<OpType, 11> kOpTypes{{{
    {OpType::kAttention, "attention"}, {OpType::kMoe, "moe"},
    {OpType::kNormalization, "normalization"}, {OpType::kEmbedding, "embedding"},
    {OpType::kLinear, "linear"}, {OpType::kFused, "fused"}, {OpType::kGemm, "gemm"},
    {OpType::kMlp, "mlp"}, {OpType::kConvolution, "convolution"}, {OpType::kSsm, "ssm"},
    {OpType::kOther, "other"}}}};

constexpr EnumTable<Domain, 6> kDomains{{{
    {Domain::kLlm, "llm"}, {Domain::kMultimodal, "multimodal"},
    {Domain::kDiffusion, "diffusion"}, {Domain::kVision, "vision"},
    {Domain::kAudio, "audio"}, {Domain::kVideo, "video"}}}};

const std::set<std::string> kProblemFields = {
    "name", "category", "op_type", "domain", "direction", "precision", "axes",
    "tensors", "nodes", "metadata", "reference", "structured_inputs"};

template <typename Table>
auto require_enum(const Json& doc, std::string_view key, const Table& table) {
  const std::string s = jsonu::require_string(doc, key, "");
  auto v = table.parse(s);
  if (!v) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + std::string(key) + "' has unknown value '" + s + "'");
  }
  return *v;
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Splits JSON Lines text; blank lines are skipped but still counted.
template <typename F>
void for_each_record(std::string_view document, std::string_view what, F&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= document.size()) {
    std::size_t end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      try {
        fn(jsonu::parse_document(line, what), line_no);
      } catch (const Error& e) {
        throw Error(e.kind(), line_prefix(line_no) + e.what());
      }
    }
    if (end == document.size()) break;
    start = end + 1;
  }
}

}  // namespace

std::string_view category_name(Category c) { return kCategories.name(c); }
std::string_view op_type_name(OpType o) { return kOpTypes.name(o); }
std::string_view domain_name(Domain d) { return kDomains.name(d); }
std::string_view direction_name(Direction d) {
  return d == Direction::kForward ? "forward" : "backward";
}
std::optional<Category> parse_category(std::string_view s) { return kCategories.parse(s); }
std::optional<OpType> parse_op_type(std::string_view s) { return kOpTypes.parse(s); }
std::optional<Domain> parse_domain(std::string_view s) { return kDomains.parse(s); }

ProblemSpec parse_problem(std::string_view document) {
  const Json doc = jsonu::parse_document(document, "problem file");
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "problem file: top level must be an object");

  ProblemSpec spec;
  spec.name = jsonu::require_string(doc, "name", "");
  spec.category = require_enum(doc, "category", kCategories);
  spec.op_type = require_enum(doc, "op_type", kOpTypes);
  spec.domain = require_enum(doc, "domain", kDomains);
  const std::string dir = jsonu::require_string(doc, "direction", "");
  if (dir == "forward") {
    spec.direction = Direction::kForward;
  } else if (dir == "backward") {
    spec.direction = Direction::kBackward;
  } else {
    throw Error(ErrorKind::kInvalidValue, "field 'direction' has unknown value '" + dir + "'");
  }
  spec.precision = jsonu::require_string(doc, "precision", "");
  if (!parse_dtype(spec.precision)) {
    throw Error(ErrorKind::kInvalidValue,
                "field 'precision' has unknown value '" + spec.precision + "'");
  }

  const Json& axes = jsonu::require(doc, "axes", "");
  if (!axes.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'axes' must be an array");
  std::set<std::string> axis_names;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string path = jsonu::index("axes", i);
    AxisDecl a;
    a.name = jsonu::require_string(axes[i], "name", path);
    const std::string kind = jsonu::require_string(axes[i], "kind", path);
    const bool has_value = axes[i].contains("const_value");
    const bool has_expr = axes[i].contains("expr_text");
    if (kind == "const") {
      a.kind = AxisKind::kConst;
      a.const_value = jsonu::require_positive_int(axes[i], "const_value", path);
      if (has_expr) throw Error(ErrorKind::kInvalidValue, "field '" + path + ".expr_text' not allowed on a const axis");
    } else if (kind == "var") {
      a.kind = AxisKind::kVar;
      if (has_value || has_expr) {
        throw Error(ErrorKind::kInvalidValue, "field '" + path + "' is a var axis and takes no value");
      }
    } else if (kind == "expr") {
      a.kind = AxisKind::kExpr;
      a.expr_text = jsonu::require_string(axes[i], "expr_text", path);
      if (has_value) throw Error(ErrorKind::kInvalidValue, "field '" + path + ".const_value' not allowed on an expr axis");
    } else {
      throw Error(ErrorKind::kInvalidValue,
                  "field '" + path + ".kind' has unknown value '" + kind + "'");
    }
    if (a.name.empty() || !axis_names.insert(a.name).second) {
      throw Error(ErrorKind::kInvalidValue, "field '" + path + ".name' is empty or duplicated");
    }
    spec.axes.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < spec.axes.size(); ++i) {
    if (spec.axes[i].kind != AxisKind::kExpr) continue;
    for (const auto& id : expr_identifiers(*spec.axes[i].expr_text)) {
      if (!axis_names.count(id)) {
        throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::index("axes", i) +
                                                  ".expr_text' references unknown axis '" + id +
                                                  "'");
      }
    }
  }

  const Json& tensors = jsonu::require(doc, "tensors", "");
  if (!tensors.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'tensors' must be an array");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::string path = jsonu::index("tensors", i);
    TensorTemplate t;
    t.name = jsonu::require_string(tensors[i], "name", path);
    const Json& shape = jsonu::require(tensors[i], "shape", path);
    if (!shape.is_array()) throw Error(ErrorKind::kInvalidValue, "field '" + path + ".shape' must be an array");
    for (std::size_t d = 0; d < shape.size(); ++d) {
      const std::string dp = jsonu::index(path + ".shape", d);
      Extent e;
      if (shape[d].is_string()) {
        e.axis = shape[d].get<std::string>();
        if (!axis_names.count(e.axis)) {
          throw Error(ErrorKind::kInvalidValue,
                      "field '" + dp + "' references unknown axis '" + e.axis + "'");
        }
      } else {
        e.literal = jsonu::as_positive_int(shape[d], dp);
      }
      t.shape.push_back(std::move(e));
    }
    t.dtype = element_type_from_json(tensors[i], path);
    t.role = role_from_json(tensors[i], path);
    spec.tensor_templates.push_back(std::move(t));
  }

  const Json& nodes = jsonu::require(doc, "nodes", "");
  if (!nodes.is_array()) throw Error(ErrorKind::kInvalidValue, "field 'nodes' must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    spec.nodes.push_back(node_from_json(nodes[i], jsonu::index("nodes", i)));
  }

  if (auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      spec.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  if (auto it = doc.find("reference"); it != doc.end()) {
    if (!it->is_string()) throw Error(ErrorKind::kInvalidValue, "field 'reference' must be a string");
    spec.reference = it->get<std::string>();
  }
  if (auto it = doc.find("structured_inputs"); it != doc.end()) {
    if (!it->is_boolean()) throw Error(ErrorKind::kInvalidValue, "field 'structured_inputs' must be a boolean");
    spec.structured_inputs = it->get<bool>();
  }
  for (const auto& [k, v] : doc.items()) {
    if (!kProblemFields.count(k)) spec.extra[k] = v;
  }
  return spec;
}

std::string serialize_problem(const ProblemSpec& spec) {
  OrderedJson j;
  j["name"] = spec.name;
  j["category"] = std::string(category_name(spec.category));
  j["op_type"] = std::string(op_type_name(spec.op_type));
  j["domain"] = std::string(domain_name(spec.domain));
  j["direction"] = std::string(direction_name(spec.direction));
  j["precision"] = spec.precision;
  OrderedJson axes = OrderedJson::array();
  for (const auto& a : spec.axes) {
    OrderedJson aj;
    aj["name"] = a.name;
    switch (a.kind) {
      case AxisKind::kConst:
        aj["kind"] = "const";
        aj["const_value"] = *a.const_value;
        break;
      case AxisKind::kVar:
        aj["kind"] = "var";
        break;
      case AxisKind::kExpr:
        aj["kind"] = "expr";
        aj["expr_text"] = *a.expr_text;
        break;
    }
    axes.push_back(std::move(aj));
  }
  j["axes"] = std::move(axes);
  OrderedJson tensors = OrderedJson::array();
  for (const auto& t : spec.tensor_templates) {
    OrderedJson tj;
    tj["name"] = t.name;
    OrderedJson shape = OrderedJson::array();
    for (const auto& e : t.shape) {
      if (e.literal) {
        shape.push_back(*e.literal);
      } else {
        shape.push_back(e.axis);
      }
    }
    tj["shape"] = std::move(shape);
    write_element_type(t.dtype, tj);
    tj["role"] = std::string(role_name(t.role));
    tensors.push_back(std::move(tj));
  }
  j["tensors"] = std::move(tensors);
  OrderedJson nodes = OrderedJson::array();
  for (const auto& n : spec.nodes) nodes.push_back(node_to_json(n));
  j["nodes"] = std::move(nodes);
  OrderedJson meta = OrderedJson::object();
  for (const auto& [k, v] : spec.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["reference"] = spec.reference;
  j["structured_inputs"] = spec.structured_inputs;
  for (const auto& [k, v] : spec.extra.items()) j[k] = OrderedJson::parse(v.dump());
  return jsonu::dump(j);
}

std::map<std::string, std::uint64_t> resolve_axes(const ProblemSpec& spec,
                                                  const Workload& workload) {
  std::map<std::string, const AxisDecl*> decls;
  for (const auto& a : spec.axes) decls[a.name] = &a;

  for (const auto& [name, value] : workload.bindings) {
    auto it = decls.find(name);
    if (it == decls.end()) {
      throw Error(ErrorKind::kInvalidValue, "workload binds undeclared axis '" + name + "'");
    }
    if (it->second->kind != AxisKind::kVar) {
      throw Error(ErrorKind::kInvalidValue, "workload binds non-var axis '" + name + "'");
    }
    if (value == 0) throw Error(ErrorKind::kInvalidValue, "axis '" + name + "' bound to 0");
  }

  std::map<std::string, std::uint64_t> env;
  for (const auto& a : spec.axes) {
    if (a.kind == AxisKind::kConst) {
      env[a.name] = *a.const_value;
    } else if (a.kind == AxisKind::kVar) {
      auto it = workload.bindings.find(a.name);
      if (it == workload.bindings.end()) {
        throw Error(ErrorKind::kMissingField, "workload does not bind var axis '" + a.name + "'");
      }
      env[a.name] = it->second;
    }
  }

  // Expr axes in dependency order: depth-first with an on-stack marker.
  enum class Mark { kNone, kActive, kDone };
  std::map<std::string, Mark> mark;
  std::function<void(const AxisDecl&)> visit = [&](const AxisDecl& a) {
    if (a.kind != AxisKind::kExpr || mark[a.name] == Mark::kDone) return;
    if (mark[a.name] == Mark::kActive) {
      throw Error(ErrorKind::kCycle, "expr axis '" + a.name + "' depends on itself");
    }
    mark[a.name] = Mark::kActive;
    for (const auto& id : expr_identifiers(*a.expr_text)) {
      auto it = decls.find(id);
      if (it == decls.end()) {
        throw Error(ErrorKind::kInvalidValue,
                    "expr axis '" + a.name + "' references unknown axis '" + id + "'");
      }
      visit(*it->second);
    }
    env[a.name] = eval_axis_expr(*a.expr_text, env);
    mark[a.name] = Mark::kDone;
  };
  for (const auto& a : spec.axes) visit(a);
  return env;
}

EinsumGraph bind_axes(const ProblemSpec& spec, const Workload& workload) {
  const auto env = resolve_axes(spec, workload);
  EinsumGraph g;
  for (const auto& t : spec.tensor_templates) {
    TensorDecl d;
    d.name = t.name;
    d.dtype = t.dtype;
    d.role = t.role;
    for (const auto& e : t.shape) d.shape.push_back(e.literal ? *e.literal : env.at(e.axis));
    if (!g.tensors.emplace(d.name, d).second) {
      throw Error(ErrorKind::kValidation, "duplicate tensor '" + d.name + "'");
    }
  }
  g.nodes = spec.nodes;
  g.metadata = spec.metadata;
  g.metadata["problem"] = spec.name;
  g.metadata["category"] = std::string(category_name(spec.category));
  g.metadata["op_type"] = std::string(op_type_name(spec.op_type));
  g.metadata["direction"] = std::string(direction_name(spec.direction));
  g.metadata["precision"] = spec.precision;

  const auto outcome = validate_graph(g);
  if (!outcome.ok()) {
    std::string msg = "bound graph for '" + spec.name + "' is invalid:";
    for (const auto& d : outcome.defects) msg += " [" + d.subject + ": " + d.rule + "]";
    throw Error(ErrorKind::kValidation, msg);
  }
  return g;
}

namespace {

ToleranceTuple tolerance_from_json(const Json& j, std::string_view path) {
  ToleranceTuple t;
  t.atol = jsonu::require_number(j, "atol", path);
  t.rtol = jsonu::require_number(j, "rtol", path);
  t.matched_ratio = jsonu::require_number(j, "matched_ratio", path);
  if (t.atol < 0) throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::join(path, "atol") + "' must be >= 0");
  if (t.rtol < 0) throw Error(ErrorKind::kInvalidValue, "field '" + jsonu::join(path, "rtol") + "' must be >= 0");
  if (!(t.matched_ratio > 0 && t.matched_ratio <= 1)) {
    throw Error(ErrorKind::kInvalidValue,
                "field '" + jsonu::join(path, "matched_ratio") + "' must be in (0, 1]");
  }
  return t;
}

}  // namespace

std::vector<Workload> parse_workloads(std::string_view document) {
  std::vector<Workload> out;
  for_each_record(document, "workload record", [&](const Json& rec, std::size_t) {
    Workload w;
    const Json& b = jsonu::require(rec, "bindings", "");
    if (!b.is_object()) throw Error(ErrorKind::kInvalidValue, "field 'bindings' must be an object");
    for (const auto& [k, v] : b.items()) w.bindings[k] = jsonu::as_positive_int(v, "bindings." + k);
    w.tolerance = tolerance_from_json(jsonu::require(rec, "tolerance", ""), "tolerance");
    out.push_back(std::move(w));
  });
  return out;
}

std::string serialize_workload(const Workload& w) {
  OrderedJson j;
  OrderedJson b = OrderedJson::object();
  for (const auto& [k, v] : w.bindings) b[k] = v;
  j["bindings"] = std::move(b);
  j["tolerance"] = OrderedJson{{"atol", w.tolerance.atol},
                               {"rtol", w.tolerance.rtol},
                               {"matched_ratio", w.tolerance.matched_ratio}};
  return j.dump() + "\n";
}

std::vector<TimingLog> parse_timing_log(std::string_view document) {
  std::vector<TimingLog> out;
  for_each_record(document, "timing record", [&](const Json& rec, std::size_t) {
    TimingLog log;
    log.problem = jsonu::require_string(rec, "problem", "");
    const Json& wi = jsonu::require(rec, "workload_index", "");
    if (!wi.is_number_unsigned() && !(wi.is_number_integer() && wi.get<std::int64_t>() >= 0)) {
      throw Error(ErrorKind::kInvalidValue, "field 'workload_index' must be a non-negative integer");
    }
    log.workload_index = wi.get<std::uint64_t>();
    log.candidate_id = jsonu::require_string(rec, "candidate_id", "");
    const Json& wc = jsonu::require(rec, "warmup_count", "");
    if (!wc.is_number_integer() || wc.get<std::int64_t>() < 0) {
      throw Error(ErrorKind::kInvalidValue, "field 'warmup_count' must be a non-negative integer");
    }
    log.warmup_count = wc.get<std::uint64_t>();
    log.timed_count = jsonu::require_positive_int(rec, "timed_count", "");
    if (auto it = rec.find("correct"); it != rec.end()) {
      if (!it->is_boolean()) throw Error(ErrorKind::kInvalidValue, "field 'correct' must be a boolean");
      log.correct = it->get<bool>();
    }
    const Json& trials = jsonu::require(rec, "trials", "");
    if (!trials.is_array() || trials.empty()) {
      throw Error(ErrorKind::kInvalidValue, "field 'trials' must be a non-empty array");
    }
    for (std::size_t t = 0; t < trials.size(); ++t) {
      const std::string tp = jsonu::index("trials", t);
      if (!trials[t].is_array()) throw Error(ErrorKind::kInvalidValue, "field '" + tp + "' must be an array");
      if (trials[t].size() != log.timed_count) {
        throw Error(ErrorKind::kInvalidValue,
                    "field '" + tp + "' has " + std::to_string(trials[t].size()) +
                        " samples but timed_count is " + std::to_string(log.timed_count));
      }
      std::vector<double> samples;
      samples.reserve(trials[t].size());
      for (std::size_t s = 0; s < trials[t].size(); ++s) {
        const double v = jsonu::as_number(trials[t][s], jsonu::index(tp, s));
        if (!(v > 0)) {
          throw Error(ErrorKind::kInvalidValue,
                      "field '" + jsonu::index(tp, s) + "' must be a positive time");
        }
        samples.push_back(v);
      }
      log.trials.push_back(std::move(samples));
    }
    out.push_back(std::move(log));
  });
  return out;
}

std::string serialize_timing_log(const TimingLog& log) {
  OrderedJson j;
  j["problem"] = log.problem;
  j["workload_index"] = log.workload_index;
  j["candidate_id"] = log.candidate_id;
  j["trials"] = log.trials;
  j["warmup_count"] = log.warmup_count;
  j["timed_count"] = log.timed_count;
  j["correct"] = log.correct;
  return j.dump() + "\n";
}

}  // namespace solbound

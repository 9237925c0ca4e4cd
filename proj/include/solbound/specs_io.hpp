#pragma once
// Problem definitions, workloads and timing logs.
//
// A problem file declares typed symbolic axes and a graph template whose
// tensor shapes name those axes. A workload binds the var axes; binding
// yields a concrete EinsumGraph that the cost model can analyze.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solbound/ir.hpp"
#include "solbound/json_util.hpp"

namespace solbound {

enum class AxisKind { kConst, kVar, kExpr };

struct AxisDecl {
  std::string name;
  AxisKind kind = AxisKind::kVar;
  std::optional<std::uint64_t> const_value;
  std::optional<std::string> expr_text;
};

enum class Category { kL1, kL2, kQuant, kFIB };
enum class OpType {
  kAttention, kMoe, kNormalization, kEmbedding, kLinear, kFused,
  kGemm, kMlp, kConvolution, kSsm, kOther
};
enum class Domain { kLlm, kMultimodal, kDiffusion, kVision, kAudio, kVideo };
enum class Direction { kForward, kBackward };

std::string_view category_name(Category c);
std::string_view op_type_name(OpType o);
std::string_view domain_name(Domain d);
std::string_view direction_name(Direction d);
std::optional<Category> parse_category(std::string_view s);
std::optional<OpType> parse_op_type(std::string_view s);
std::optional<Domain> parse_domain(std::string_view s);

// One shape entry of a tensor template: a literal extent or an axis name.
struct Extent {
  std::optional<std::uint64_t> literal;
  std::string axis;
};

struct TensorTemplate {
  std::string name;
  std::vector<Extent> shape;
  ElementType dtype;
  TensorRole role = TensorRole::kInput;
};

struct ProblemSpec {
  std::string name;
  Category category = Category::kL1;
  OpType op_type = OpType::kOther;
  Domain domain = Domain::kLlm;
  Direction direction = Direction::kForward;
  std::string precision;  // dtype name, "mixed" allowed
  std::vector<AxisDecl> axes;
  std::vector<TensorTemplate> tensor_templates;
  std::vector<EinsumNode> nodes;
  std::map<std::string, std::string> metadata;
  std::string reference;           // opaque reference-implementation source
  bool structured_inputs = false;  // custom input generation; shapes may be value-dependent
  jsonu::Json extra = jsonu::Json::object();  // unknown fields, kept verbatim
};

struct ToleranceTuple {
  double atol = 0;
  double rtol = 0;
  double matched_ratio = 1;
};

struct Workload {
  std::map<std::string, std::uint64_t> bindings;
  ToleranceTuple tolerance;
};

struct TimingLog {
  std::string problem;
  std::uint64_t workload_index = 0;
  std::string candidate_id;
  std::vector<std::vector<double>> trials;  // milliseconds
  std::uint64_t warmup_count = 0;
  std::uint64_t timed_count = 0;
  bool correct = true;
};

ProblemSpec parse_problem(std::string_view document);
std::string serialize_problem(const ProblemSpec& spec);

// Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
// factor := identifier | positive integer | '(' expr ')'. Exact int64
// arithmetic; '/' must divide exactly; the result must be positive.
std::uint64_t eval_axis_expr(std::string_view expr_text,
                             const std::map<std::string, std::uint64_t>& env);

// Identifiers referenced by an expression, in order of first appearance.
std::vector<std::string> expr_identifiers(std::string_view expr_text);

// Axis name -> concrete extent for one workload.
std::map<std::string, std::uint64_t> resolve_axes(const ProblemSpec& spec,
                                                  const Workload& workload);

// Concrete graph; throws kValidation listing defects when it does not
// validate.
EinsumGraph bind_axes(const ProblemSpec& spec, const Workload& workload);

std::vector<Workload> parse_workloads(std::string_view document);
std::string serialize_workload(const Workload& w);

std::vector<TimingLog> parse_timing_log(std::string_view document);
std::string serialize_timing_log(const TimingLog& log);

}  // namespace solbound

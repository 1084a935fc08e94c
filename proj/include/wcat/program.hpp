#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wcat {

enum class EdgeKind { forward, back };

enum class BoundOrigin { driver, hardware, protocol };

struct BasicBlock {
  std::string id;
  std::uint64_t cycles = 0;
  std::vector<std::string> device_ops;  // fired, in order, when the block executes
  std::string label;
  int line = 0;  // source line, 0 when synthesized

  bool operator==(const BasicBlock& o) const {
    return id == o.id && cycles == o.cycles && device_ops == o.device_ops && label == o.label;
  }
};

struct Edge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::forward;  // classified against a DFS tree from entry
  int line = 0;

  bool operator==(const Edge& o) const { return from == o.from && to == o.to && kind == o.kind; }
};

// Max iterations of the loop body per entry into the loop: the analysis
// constrains back-edge flow <= bound * entry-edge flow.
struct LoopBound {
  std::string header;
  std::uint64_t bound = 1;
  BoundOrigin origin = BoundOrigin::driver;
  int line = 0;

  bool operator==(const LoopBound& o) const {
    return header == o.header && bound == o.bound && origin == o.origin;
  }
};

// Annotated control-flow graph, the analysis subject. Immutable once loaded;
// all analyses take it by const reference.
struct WcirProgram {
  std::string name;
  std::vector<BasicBlock> blocks;
  std::vector<Edge> edges;
  std::string entry;
  std::set<std::string> exits;
  std::vector<LoopBound> annotations;
  std::set<std::string> entry_states;  // analysis override, may be empty

  bool operator==(const WcirProgram& o) const {
    return name == o.name && blocks == o.blocks && edges == o.edges && entry == o.entry &&
           exits == o.exits && annotations == o.annotations && entry_states == o.entry_states;
  }

  const BasicBlock* find_block(const std::string& id) const;
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_)
      : std::runtime_error(msg), line(line_), column(column_) {}
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  int line = 0;

  std::string render() const;
};

// Syntax-level parse of the WCIR text format. Line/column errors only;
// semantic problems (dangling ids, missing bounds, ...) are validate()'s job.
// Edge kinds are left as `forward` until classify_edges runs.
WcirProgram parse_wcir(const std::string& text);

// Canonical text form; parse_wcir(serialize_wcir(p)) == p for valid p.
std::string serialize_wcir(const WcirProgram& program);

// Classifies each edge as forward or back (retreating w.r.t. a DFS spanning
// tree from entry). Unreachable edges stay forward; validate flags them.
void classify_edges(WcirProgram& program);

// Full semantic check. Empty result iff every program invariant holds.
std::vector<Diagnostic> validate(const WcirProgram& program);

// parse + classify_edges + validate; throws std::runtime_error listing the
// diagnostics if any have error severity.
WcirProgram load_program(const std::string& text);
WcirProgram load_program_file(const std::string& path);

// Dominator sets over blocks reachable from entry: result[b] = ids that
// dominate b. Dead blocks are absent.
std::map<std::string, std::set<std::string>> dominators(const WcirProgram& program);

struct NaturalLoop {
  std::string header;
  std::set<std::string> body;  // includes the header
  std::vector<std::size_t> back_edges;  // indices into program.edges
};

// Standard natural-loop decomposition; back edges sharing a header merge.
// Throws std::runtime_error("irreducible control flow") when a retreating
// edge targets a non-dominator.
std::vector<NaturalLoop> natural_loops(const WcirProgram& program);

// Predecessor/successor index used by the analyses.
struct CfgIndex {
  std::map<std::string, std::vector<std::string>> succs;
  std::map<std::string, std::vector<std::string>> preds;
  explicit CfgIndex(const WcirProgram& program);
};

}  // namespace wcat

#include "wcat/ipet.hpp"

#include <sstream>

namespace wcat {

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::wcet_cycles: return "wcet_cycles";
    case Objective::wcec_always_on: return "wcec_always_on";
    case Objective::wcec_device_aware: return "wcec_device_aware";
  }
  return "wcet_cycles";
}

IlpProblem build_ilp(const WcirProgram& program, const StateMap* statemap,
                     const DeviceGraph& graph, const PlatformModel& platform,
                     Objective objective) {
  if (objective == Objective::wcec_device_aware && !statemap)
    throw std::invalid_argument("device-aware objective requires a state map");

  IlpProblem p;
  p.name = program.name;

  std::map<std::string, std::size_t> block_var;
  for (const auto& b : program.blocks) {
    std::string name = "f_" + b.id;
    block_var[b.id] = p.add_variable(name);
    p.metadata[name] = "block " + b.id;
  }
  std::vector<std::size_t> edge_var(program.edges.size());
  for (std::size_t i = 0; i < program.edges.size(); ++i) {
    const Edge& e = program.edges[i];
    std::string name = "e" + std::to_string(i) + "_" + e.from + "_" + e.to;
    edge_var[i] = p.add_variable(name);
    p.metadata[name] = "edge " + e.from + " -> " + e.to;
  }
  std::map<std::string, std::size_t> sink_var;
  for (const auto& x : program.exits) {
    std::string name = "esink_" + x;
    sink_var[x] = p.add_variable(name);
    p.metadata[name] = "virtual sink edge from " + x;
  }

  for (const auto& b : program.blocks) {
    Rat coeff = rat_from_u64(b.cycles);
    if (objective == Objective::wcec_always_on)
      coeff *= energy_per_cycle(graph, platform, kAlwaysOn);
    else if (objective == Objective::wcec_device_aware)
      coeff *= energy_per_cycle(graph, platform, statemap->at(b.id).cost_state);
    if (coeff != 0) p.objective.push_back({coeff, block_var[b.id]});
  }

  // Flow conservation with a virtual source injecting one unit at entry and
  // one virtual sink edge per exit.
  for (const auto& b : program.blocks) {
    LinConstraint in{"flow_in_" + b.id, {{rat(1), block_var[b.id]}}, Rel::eq,
                     b.id == program.entry ? rat(1) : rat(0)};
    LinConstraint out{"flow_out_" + b.id, {{rat(1), block_var[b.id]}}, Rel::eq, rat(0)};
    for (std::size_t i = 0; i < program.edges.size(); ++i) {
      if (program.edges[i].to == b.id) in.terms.push_back({rat(-1), edge_var[i]});
      if (program.edges[i].from == b.id) out.terms.push_back({rat(-1), edge_var[i]});
    }
    if (program.exits.count(b.id)) out.terms.push_back({rat(-1), sink_var[b.id]});
    p.constraints.push_back(std::move(in));
    p.constraints.push_back(std::move(out));
  }
  LinConstraint sink{"sink", {}, Rel::eq, rat(1)};
  for (const auto& [x, v] : sink_var) sink.terms.push_back({rat(1), v});
  p.constraints.push_back(std::move(sink));

  // Per-entry loop bounds: back-edge flow <= N * loop-entry flow. The
  // virtual source counts as an entry edge when the header is the program
  // entry (constant folded into the rhs).
  std::map<std::string, std::uint64_t> bound_of;
  for (const auto& lb : program.annotations) bound_of[lb.header] = lb.bound;
  for (const auto& loop : natural_loops(program)) {
    auto it = bound_of.find(loop.header);
    if (it == bound_of.end())
      throw std::runtime_error("loop at '" + loop.header + "' has no bound annotation");
    Rat n = rat_from_u64(it->second);
    LinConstraint lc{"loop_" + loop.header, {}, Rel::le,
                     loop.header == program.entry ? n : rat(0)};
    for (std::size_t ei : loop.back_edges) lc.terms.push_back({rat(1), edge_var[ei]});
    for (std::size_t i = 0; i < program.edges.size(); ++i) {
      const Edge& e = program.edges[i];
      if (e.to == loop.header && !loop.body.count(e.from)) lc.terms.push_back({-n, edge_var[i]});
    }
    p.constraints.push_back(std::move(lc));
  }
  return p;
}

namespace {

// Renders "c x" term sequences with a soft wrap so no LP line gets
// unreasonably long.
void emit_terms(std::ostringstream& out, const std::vector<LinTerm>& terms,
                const IlpProblem& p) {
  int on_line = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Rat c = terms[i].coeff;
    bool neg = c < 0;
    if (neg) c = -c;
    if (i == 0)
      out << (neg ? "- " : "");
    else
      out << (neg ? " - " : " + ");
    if (c != 1) out << lp_number(c) << " ";
    out << p.variables[terms[i].var].name;
    if (++on_line == 8 && i + 1 < terms.size()) {
      out << "\n    ";
      on_line = 0;
    }
  }
}

}  // namespace

std::string export_lp(const IlpProblem& p) {
  std::ostringstream out;
  out << "\\ " << p.name << "\n";
  out << "Maximize\n obj: ";
  if (p.objective.empty())
    out << "0 " << (p.variables.empty() ? "x" : p.variables[0].name);
  else
    emit_terms(out, p.objective, p);
  out << "\nSubject To\n";
  for (const auto& c : p.constraints) {
    out << " " << c.name << ": ";
    emit_terms(out, c.terms, p);
    out << (c.rel == Rel::le ? " <= " : c.rel == Rel::ge ? " >= " : " = ");
    out << lp_number(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : p.variables) out << " " << v.name << " >= 0\n";
  bool any_int = false;
  for (const auto& v : p.variables) any_int = any_int || v.integer;
  if (any_int) {
    out << "Generals\n";
    int on_line = 0;
    for (const auto& v : p.variables) {
      if (!v.integer) continue;
      out << (on_line == 0 ? " " : " ") << v.name;
      if (++on_line == 8) {
        out << "\n";
        on_line = 0;
      }
    }
    if (on_line) out << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace wcat

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcat/rational.hpp"

namespace wcat {

struct LinTerm {
  Rat coeff;
  std::size_t var;  // index into IlpProblem::variables
};

enum class Rel { le, eq, ge };

struct LinConstraint {
  std::string name;
  std::vector<LinTerm> terms;
  Rel rel = Rel::le;
  Rat rhs;
};

struct IlpVariable {
  std::string name;
  bool integer = true;
  // Lower bound is 0 for every variable; there is no implicit upper bound.
};

// Maximization problem over nonnegative (optionally integral) variables.
struct IlpProblem {
  std::string name;
  std::vector<IlpVariable> variables;
  std::vector<LinTerm> objective;  // maximize
  std::vector<LinConstraint> constraints;
  std::map<std::string, std::string> metadata;  // variable name -> origin (block/edge id)

  std::size_t add_variable(const std::string& name, bool integer = true);
  std::size_t var_index(const std::string& name) const;  // throws if absent
};

enum class IlpStatus { optimal, infeasible, unbounded, resource_limit };

struct SolverStats {
  std::uint64_t pivots = 0;
  std::uint64_t nodes = 0;
};

struct IlpSolution {
  IlpStatus status = IlpStatus::infeasible;
  Rat objective_value;
  std::vector<Rat> values;  // aligned with IlpProblem::variables
  SolverStats stats;

  const Rat& value_of(const IlpProblem& problem, const std::string& var_name) const;
};

struct SolverConfig {
  std::uint64_t max_pivots = 1000000;
  std::uint64_t max_nodes = 10000;
};

// Exact mixed-integer solve: two-phase primal simplex (rational arithmetic,
// Bland's rule, lowest-index tie-breaks) plus depth-first branch-and-bound
// (most-fractional variable, lowest index on ties, <=-branch explored
// first). Fully deterministic for a given problem and config. Exceeding the
// configured pivot/node budget yields resource_limit, never a wrong answer.
IlpSolution solve(const IlpProblem& problem, const SolverConfig& config = {});

// Re-verifies an optimal solution from scratch: nonnegativity, integrality
// of integer variables, every constraint, and the objective value.
bool check_certificate(const IlpProblem& problem, const IlpSolution& solution);

}  // namespace wcat

#include "wcat/ilp.hpp"

#include <algorithm>

namespace wcat {

std::size_t IlpProblem::add_variable(const std::string& name, bool integer) {
  variables.push_back({name, integer});
  return variables.size() - 1;
}

std::size_t IlpProblem::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  throw std::runtime_error("unknown variable '" + name + "'");
}

const Rat& IlpSolution::value_of(const IlpProblem& problem, const std::string& var_name) const {
  return values.at(problem.var_index(var_name));
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Dense two-phase primal simplex over exact rationals. Bland's rule (lowest
// eligible column; leaving row by minimum ratio, ties to the lowest basic
// variable index) guarantees termination and determinism. Row layout:
// [structural | slack/surplus | artificial | rhs], objective as extra row.
class Tableau {
 public:
  Tableau(const IlpProblem& p, const std::vector<LinConstraint>& extra, std::uint64_t& budget)
      : budget_(budget), n_struct_(p.variables.size()) {
    std::vector<const LinConstraint*> rows;
    rows.reserve(p.constraints.size() + extra.size());
    for (const auto& c : p.constraints) rows.push_back(&c);
    for (const auto& c : extra) rows.push_back(&c);
    m_ = rows.size();

    std::vector<std::vector<Rat>> a(m_, std::vector<Rat>(n_struct_));
    std::vector<Rat> rhs(m_);
    std::vector<Rel> rel(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& t : rows[i]->terms) a[i][t.var] += t.coeff;
      rhs[i] = rows[i]->rhs;
      rel[i] = rows[i]->rel;
      if (rhs[i] < 0) {  // canonical nonnegative rhs
        for (auto& v : a[i]) v = -v;
        rhs[i] = -rhs[i];
        rel[i] = rel[i] == Rel::le ? Rel::ge : rel[i] == Rel::ge ? Rel::le : Rel::eq;
      }
    }
    std::size_t n_slack = 0, n_art = 0;
    for (auto r : rel) {
      if (r != Rel::eq) ++n_slack;
      if (r != Rel::le) ++n_art;
    }
    art_begin_ = n_struct_ + n_slack;
    total_ = art_begin_ + n_art;
    tab_.assign(m_ + 1, std::vector<Rat>(total_ + 1));
    basis_.assign(m_, kNone);
    allowed_.assign(total_, true);

    std::size_t sc = n_struct_, ac = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_struct_; ++j) tab_[i][j] = a[i][j];
      tab_[i][total_] = rhs[i];
      if (rel[i] == Rel::le) {
        tab_[i][sc] = 1;
        basis_[i] = sc++;
      } else if (rel[i] == Rel::ge) {
        tab_[i][sc] = -1;
        ++sc;
        tab_[i][ac] = 1;
        basis_[i] = ac++;
      } else {
        tab_[i][ac] = 1;
        basis_[i] = ac++;
      }
    }
    n_art_ = n_art;
  }

  IlpStatus solve_lp(const std::vector<LinTerm>& objective, Rat& z_out, std::vector<Rat>& x_out) {
    if (n_art_ > 0) {
      // Phase 1: maximize -(sum of artificials); 0 iff feasible.
      std::vector<Rat> cost(total_);
      for (std::size_t j = art_begin_; j < total_; ++j) cost[j] = rat(-1);
      load_objective(cost);
      IlpStatus st = iterate();
      if (st != IlpStatus::optimal) return st;  // only resource_limit possible here
      if (objective_value() < 0) return IlpStatus::infeasible;
      purge_artificials();
    }
    std::vector<Rat> cost(total_);
    for (const auto& t : objective) cost.at(t.var) += t.coeff;
    load_objective(cost);
    IlpStatus st = iterate();
    if (st != IlpStatus::optimal) return st;
    z_out = objective_value();
    x_out.assign(n_struct_, Rat());
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_struct_) x_out[basis_[i]] = tab_[i][total_];
    return IlpStatus::optimal;
  }

 private:
  void load_objective(const std::vector<Rat>& cost) {
    auto& obj = tab_[m_];
    for (std::size_t j = 0; j < total_; ++j) obj[j] = cost[j];
    obj[total_] = 0;
    // Price out the current basis so basic reduced costs are zero.
    for (std::size_t i = 0; i < m_; ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= total_; ++j) obj[j] -= cb * tab_[i][j];
    }
  }

  Rat objective_value() const { return -tab_[m_][total_]; }

  void pivot(std::size_t r, std::size_t c) {
    Rat p = tab_[r][c];
    for (auto& v : tab_[r]) v /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r || tab_[i][c] == 0) continue;
      Rat f = tab_[i][c];
      for (std::size_t j = 0; j <= total_; ++j) tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  IlpStatus iterate() {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < total_; ++j) {
        if (allowed_[j] && tab_[m_][j] > 0) {
          enter = j;
          break;
        }
      }
      if (enter == kNone) return IlpStatus::optimal;
      std::size_t leave = kNone;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][enter] <= 0) continue;
        if (leave == kNone) {
          leave = i;
          continue;
        }
        // Compare rhs_i / a_i vs rhs_l / a_l without division.
        Rat lhs = tab_[i][total_] * tab_[leave][enter];
        Rat rhs = tab_[leave][total_] * tab_[i][enter];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
      }
      if (leave == kNone) return IlpStatus::unbounded;
      if (budget_ == 0) return IlpStatus::resource_limit;
      --budget_;
      pivot(leave, enter);
    }
  }

  // After a feasible phase 1, pivot artificials out of the basis (their rhs
  // is necessarily 0); rows that cannot be pivoted are redundant and drop.
  void purge_artificials() {
    std::vector<std::size_t> redundant;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      std::size_t col = kNone;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (tab_[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col == kNone)
        redundant.push_back(i);
      else
        pivot(i, col);
    }
    for (auto it = redundant.rbegin(); it != redundant.rend(); ++it) {
      tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(*it));
      basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(*it));
      --m_;
    }
    for (std::size_t j = art_begin_; j < total_; ++j) allowed_[j] = false;
  }

  std::uint64_t& budget_;
  std::size_t n_struct_, m_ = 0, total_ = 0, art_begin_ = 0, n_art_ = 0;
  std::vector<std::vector<Rat>> tab_;  // m_ constraint rows + objective row
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
};

struct BranchAndBound {
  const IlpProblem& problem;
  SolverConfig config;
  std::uint64_t pivots_left;
  std::uint64_t nodes = 0;
  bool limit_hit = false;
  IlpStatus root_status = IlpStatus::infeasible;
  std::optional<Rat> best_z;
  std::vector<Rat> best_x;

  // Depth-first; returns false to hard-stop on a resource limit.
  bool visit(std::vector<LinConstraint>& extra, bool root) {
    if (nodes >= config.max_nodes) {
      limit_hit = true;
      return false;
    }
    ++nodes;
    Tableau t(problem, extra, pivots_left);
    Rat z;
    std::vector<Rat> x;
    IlpStatus st = t.solve_lp(problem.objective, z, x);
    if (root) root_status = st;
    if (st == IlpStatus::resource_limit) {
      limit_hit = true;
      return false;
    }
    if (st == IlpStatus::infeasible) return true;
    if (st == IlpStatus::unbounded) return !root;  // children of a bounded root stay bounded
    if (best_z && !(z > *best_z)) return true;     // bound: cannot strictly improve

    // Most-fractional integer variable, lowest index on ties.
    std::size_t bv = kNone;
    Rat best_dist;
    for (std::size_t j = 0; j < problem.variables.size(); ++j) {
      if (!problem.variables[j].integer || is_integer(x[j])) continue;
      Rat frac = x[j] - rat_floor(x[j]);
      Rat up = rat(1) - frac;
      Rat dist = frac < up ? frac : up;
      if (bv == kNone || dist > best_dist) {
        bv = j;
        best_dist = dist;
      }
    }
    if (bv == kNone) {
      best_z = z;
      best_x = std::move(x);
      return true;
    }
    Rat fl = rat_floor(x[bv]);
    extra.push_back({"branch_le", {{rat(1), bv}}, Rel::le, fl});
    bool go = visit(extra, false);
    extra.pop_back();
    if (!go) return false;
    extra.push_back({"branch_ge", {{rat(1), bv}}, Rel::ge, fl + 1});
    go = visit(extra, false);
    extra.pop_back();
    return go;
  }
};

}  // namespace

IlpSolution solve(const IlpProblem& problem, const SolverConfig& config) {
  BranchAndBound bnb{problem, config, config.max_pivots};
  std::vector<LinConstraint> extra;
  bnb.visit(extra, true);

  IlpSolution sol;
  sol.stats.pivots = config.max_pivots - bnb.pivots_left;
  sol.stats.nodes = bnb.nodes;
  if (bnb.limit_hit) {
    // An incumbent without a finished search is not a proven optimum.
    sol.status = IlpStatus::resource_limit;
  } else if (bnb.best_z) {
    sol.status = IlpStatus::optimal;
    sol.objective_value = *bnb.best_z;
    sol.values = std::move(bnb.best_x);
  } else {
    sol.status = bnb.root_status == IlpStatus::unbounded ? IlpStatus::unbounded
                                                         : IlpStatus::infeasible;
  }
  return sol;
}

bool check_certificate(const IlpProblem& problem, const IlpSolution& solution) {
  if (solution.status != IlpStatus::optimal) return false;
  if (solution.values.size() != problem.variables.size()) return false;
  for (std::size_t j = 0; j < problem.variables.size(); ++j) {
    if (solution.values[j] < 0) return false;
    if (problem.variables[j].integer && !is_integer(solution.values[j])) return false;
  }
  for (const auto& c : problem.constraints) {
    Rat lhs;
    for (const auto& t : c.terms) lhs += t.coeff * solution.values.at(t.var);
    bool ok = c.rel == Rel::le ? lhs <= c.rhs : c.rel == Rel::ge ? lhs >= c.rhs : lhs == c.rhs;
    if (!ok) return false;
  }
  Rat z;
  for (const auto& t : problem.objective) z += t.coeff * solution.values.at(t.var);
  return z == solution.objective_value;
}

}  // namespace wcat

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sks/exec.hpp"

namespace sks {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation;
  double rhs;
  std::string name;
};

/// Minimization program over bounded variables. Constraint rows are stored
/// sparsely; the solver densifies them.
class LinearProgram {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  int add_variable(std::string name, double cost, double lo = 0.0, double hi = kInfinity);
  int add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});

  std::size_t num_variables() const { return cost_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  const std::vector<double>& objective() const { return cost_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  double evaluate(const std::vector<double>& x) const;
  /// Activity a_i . x of constraint `row`.
  double activity(std::size_t row, const std::vector<double>& x) const;

 private:
  std::vector<double> cost_, lo_, hi_;
  std::vector<std::string> names_;
  std::vector<Constraint> rows_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  /// Constraint multipliers from the final basis, in the sign convention of
  /// the original rows (>= rows nonnegative, <= rows nonpositive).
  std::vector<double> duals;
  std::size_t iterations = 0;
};

struct SolveOptions {
  ExecPolicy policy = ExecPolicy::kParallel;
  std::size_t max_iterations = 2'000'000;
  /// Dense tableau size limit in entries (8 bytes each); larger programs
  /// fail with a resource error instead of exhausting memory.
  std::size_t max_tableau_entries = std::size_t{1} << 27;
  /// Consecutive degenerate Dantzig pivots tolerated before switching to
  /// Bland's rule until the next objective improvement.
  std::size_t degenerate_streak = 50;
};

inline constexpr double kPivotTol = 1e-10;
inline constexpr double kFeasTol = 1e-7;

/// Two-phase dense tableau simplex. Infeasible and unbounded programs are
/// reported through `status`.
LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

struct CertificateReport {
  double max_violation = 0.0;   // constraints and bounds, absolute
  std::string worst;            // name of the most violated row or bound
  double primal_objective = 0.0;
  bool dual_available = false;
  double dual_objective = 0.0;
  double dual_violation = 0.0;  // sign errors on multipliers / reduced costs
  double gap = 0.0;             // relative duality gap
  bool pass = false;
};

/// Independent audit of a reported optimum: primal feasibility from the
/// program rows, and a duality gap from the solver's multipliers.
CertificateReport lp_dual_bound(const LinearProgram& lp, const LpSolution& sol);

/// CPLEX-style LP text dump (see docs/lp_format.md).
void write_lp_text(const LinearProgram& lp, std::ostream& out);

}  // namespace sks

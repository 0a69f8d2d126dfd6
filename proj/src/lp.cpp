#include "sks/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "sks/error.hpp"
#include "sks/tableau.hpp"

namespace sks {

int LinearProgram::add_variable(std::string name, double cost, double lo, double hi) {
  if (!std::isfinite(cost)) fail(ErrorKind::kValidation, "objective coefficient must be finite");
  if (!std::isfinite(lo)) fail(ErrorKind::kValidation, "variable lower bound must be finite");
  if (lo > hi) fail(ErrorKind::kValidation, "variable " + name + " has lo > hi");
  cost_.push_back(cost);
  lo_.push_back(lo);
  hi_.push_back(hi);
  names_.push_back(std::move(name));
  return static_cast<int>(cost_.size()) - 1;
}

int LinearProgram::add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                                  std::string name) {
  if (!std::isfinite(rhs)) fail(ErrorKind::kValidation, "constraint rhs must be finite");
  for (const Term& t : terms) {
    if (t.var < 0 || static_cast<std::size_t>(t.var) >= cost_.size())
      fail(ErrorKind::kValidation, "constraint references unknown variable " + std::to_string(t.var));
    if (!std::isfinite(t.coef)) fail(ErrorKind::kValidation, "constraint coefficient must be finite");
  }
  if (name.empty()) name = "c" + std::to_string(rows_.size());
  rows_.push_back({std::move(terms), relation, rhs, std::move(name)});
  return static_cast<int>(rows_.size()) - 1;
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
  if (x.size() != cost_.size()) fail(ErrorKind::kValidation, "value vector has wrong dimension");
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += cost_[j] * x[j];
  return v;
}

double LinearProgram::activity(std::size_t row, const std::vector<double>& x) const {
  double v = 0.0;
  for (const Term& t : rows_[row].terms) v += t.coef * x[static_cast<std::size_t>(t.var)];
  return v;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

enum class ColumnKind { kStructural, kSlack, kArtificial };

struct StandardForm {
  std::size_t n_struct = 0;
  std::size_t m = 0;                 // rows, including upper-bound rows
  std::vector<ColumnKind> kind;      // per column (excluding rhs)
  std::vector<double> cost;          // phase-2 cost per column
  std::vector<std::size_t> basis;    // initial basic column per row
  std::vector<double> row_sign;      // +1 / -1 normalisation of each row
  std::vector<std::size_t> unit_col; // column holding +e_i (slack or artificial)
  Tableau tab;
};

StandardForm build_standard_form(const LinearProgram& lp, std::size_t max_entries) {
  StandardForm sf;
  const std::size_t n = lp.num_variables();
  sf.n_struct = n;

  struct Row {
    std::vector<Term> terms;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.num_constraints());
  for (const Constraint& c : lp.constraints()) {
    double shift = 0.0;
    for (const Term& t : c.terms) shift += t.coef * lp.lower()[static_cast<std::size_t>(t.var)];
    rows.push_back({c.terms, c.relation, c.rhs - shift});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper()[j]))
      rows.push_back({{Term{static_cast<int>(j), 1.0}}, Relation::kLessEqual,
                      lp.upper()[j] - lp.lower()[j]});
  }
  sf.m = rows.size();
  sf.row_sign.assign(sf.m, 1.0);
  for (std::size_t i = 0; i < sf.m; ++i) {
    if (rows[i].rhs < 0.0) {
      sf.row_sign[i] = -1.0;
      rows[i].rhs = -rows[i].rhs;
      for (Term& t : rows[i].terms) t.coef = -t.coef;
      if (rows[i].rel == Relation::kLessEqual)
        rows[i].rel = Relation::kGreaterEqual;
      else if (rows[i].rel == Relation::kGreaterEqual)
        rows[i].rel = Relation::kLessEqual;
    }
  }

  std::size_t n_slack = 0, n_art = 0;
  for (const Row& r : rows) {
    if (r.rel != Relation::kEqual) ++n_slack;
    if (r.rel != Relation::kLessEqual) ++n_art;
  }
  const std::size_t ncols = n + n_slack + n_art;
  sf.kind.assign(ncols, ColumnKind::kStructural);
  sf.cost.assign(ncols, 0.0);
  for (std::size_t j = 0; j < n; ++j) sf.cost[j] = lp.objective()[j];
  sf.basis.assign(sf.m, 0);
  sf.unit_col.assign(sf.m, 0);
  if ((sf.m + 1) > max_entries / (ncols + 1))
    fail(ErrorKind::kResource, "dense tableau of " + std::to_string(sf.m + 1) + " x " + std::to_string(ncols + 1) +
                                   " entries exceeds the solver limit");
  sf.tab = Tableau(sf.m + 1, ncols + 1);

  std::size_t next_slack = n, next_art = n + n_slack;
  for (std::size_t i = 0; i < sf.m; ++i) {
    const Row& r = rows[i];
    for (const Term& t : r.terms) sf.tab(i, static_cast<std::size_t>(t.var)) += t.coef;
    sf.tab(i, ncols) = r.rhs;
    if (r.rel == Relation::kLessEqual) {
      sf.kind[next_slack] = ColumnKind::kSlack;
      sf.tab(i, next_slack) = 1.0;
      sf.basis[i] = sf.unit_col[i] = next_slack++;
    } else {
      if (r.rel == Relation::kGreaterEqual) {
        sf.kind[next_slack] = ColumnKind::kSlack;
        sf.tab(i, next_slack++) = -1.0;
      }
      sf.kind[next_art] = ColumnKind::kArtificial;
      sf.tab(i, next_art) = 1.0;
      sf.basis[i] = sf.unit_col[i] = next_art++;
    }
  }
  return sf;
}

class Simplex {
 public:
  Simplex(StandardForm& sf, const SolveOptions& opt) : sf_(sf), opt_(opt) {}

  // Loads `cost` into the objective row and prices out the current basis.
  void set_objective(const std::vector<double>& cost) {
    Tableau& t = sf_.tab;
    const std::size_t obj = sf_.m, rhs = t.cols() - 1;
    for (std::size_t j = 0; j < rhs; ++j) t(obj, j) = cost[j];
    t(obj, rhs) = 0.0;
    for (std::size_t i = 0; i < sf_.m; ++i) {
      const double cb = cost[sf_.basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= rhs; ++j) t(obj, j) -= cb * t(i, j);
    }
  }

  // Runs simplex iterations; `allow_artificial` lets artificial columns enter.
  // Returns false when the objective is unbounded below.
  bool run(bool allow_artificial) {
    Tableau& t = sf_.tab;
    const std::size_t obj = sf_.m, rhs = t.cols() - 1;
    bool bland = false;
    std::size_t streak = 0;
    while (true) {
      if (++iterations_ > opt_.max_iterations)
        fail(ErrorKind::kResource, "simplex iteration limit exceeded");
      std::size_t enter = rhs;
      double best = -kPivotTol;
      for (std::size_t j = 0; j < rhs; ++j) {
        if (!allow_artificial && sf_.kind[j] == ColumnKind::kArtificial) continue;
        const double d = t(obj, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == rhs) return true;

      std::size_t leave = sf_.m;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < sf_.m; ++i) {
        const double a = t(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t(i, rhs) / a;
        if (leave == sf_.m || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && sf_.basis[i] < sf_.basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == sf_.m) return false;

      const bool degenerate = best_ratio <= 1e-12;
      pivot(t, leave, enter, opt_.policy);
      sf_.basis[leave] = enter;
      for (std::size_t i = 0; i < sf_.m; ++i) {
        if (t(i, rhs) < 0.0 && t(i, rhs) > -1e-11) t(i, rhs) = 0.0;
      }
      if (degenerate) {
        if (++streak >= opt_.degenerate_streak) bland = true;
      } else {
        streak = 0;
        bland = false;
      }
    }
  }

  // Pivots basic artificials out of the basis after phase 1 where possible.
  void drive_out_artificials() {
    Tableau& t = sf_.tab;
    const std::size_t rhs = t.cols() - 1;
    for (std::size_t i = 0; i < sf_.m; ++i) {
      if (sf_.kind[sf_.basis[i]] != ColumnKind::kArtificial) continue;
      std::size_t col = rhs;
      double best = kPivotTol;
      for (std::size_t j = 0; j < rhs; ++j) {
        if (sf_.kind[j] == ColumnKind::kArtificial) continue;
        if (std::abs(t(i, j)) > best) {
          best = std::abs(t(i, j));
          col = j;
        }
      }
      if (col == rhs) continue;  // redundant row
      pivot(t, i, col, opt_.policy);
      sf_.basis[i] = col;
    }
  }

  std::size_t iterations() const { return iterations_; }

 private:
  StandardForm& sf_;
  const SolveOptions& opt_;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& options) {
  StandardForm sf = build_standard_form(lp, options.max_tableau_entries);
  Simplex simplex(sf, options);
  Tableau& t = sf.tab;
  const std::size_t rhs = t.cols() - 1;
  LpSolution sol;

  bool has_artificial = false;
  std::vector<double> phase1(rhs, 0.0);
  for (std::size_t j = 0; j < rhs; ++j) {
    if (sf.kind[j] == ColumnKind::kArtificial) {
      phase1[j] = 1.0;
      has_artificial = true;
    }
  }
  if (has_artificial) {
    simplex.set_objective(phase1);
    simplex.run(true);
    const double infeasibility = -t(sf.m, rhs);
    double scale = 1.0;
    for (const Constraint& c : lp.constraints()) scale = std::max(scale, std::abs(c.rhs));
    if (infeasibility > kFeasTol * scale) {
      sol.status = LpStatus::kInfeasible;
      sol.iterations = simplex.iterations();
      return sol;
    }
    simplex.drive_out_artificials();
  }

  simplex.set_objective(sf.cost);
  const bool bounded = simplex.run(false);
  sol.iterations = simplex.iterations();
  if (!bounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  sol.status = LpStatus::kOptimal;
  sol.values.assign(lp.num_variables(), 0.0);
  for (std::size_t i = 0; i < sf.m; ++i) {
    const std::size_t b = sf.basis[i];
    if (b < sf.n_struct) sol.values[b] = t(i, rhs);
  }
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    sol.values[j] = std::max(sol.values[j], 0.0) + lp.lower()[j];
    sol.values[j] = std::min(sol.values[j], lp.upper()[j]);
  }
  sol.objective_value = lp.evaluate(sol.values);

  // The unit column of row i has phase-2 cost 0, so its reduced cost is the
  // negated multiplier of the normalised row.
  sol.duals.assign(lp.num_constraints(), 0.0);
  for (std::size_t i = 0; i < lp.num_constraints(); ++i)
    sol.duals[i] = -t(sf.m, sf.unit_col[i]) * sf.row_sign[i];
  return sol;
}

CertificateReport lp_dual_bound(const LinearProgram& lp, const LpSolution& sol) {
  CertificateReport rep;
  if (sol.status != LpStatus::kOptimal || sol.values.size() != lp.num_variables()) {
    rep.worst = "solution not optimal";
    rep.max_violation = LinearProgram::kInfinity;
    return rep;
  }
  const auto& x = sol.values;
  auto note = [&](double v, const std::string& what) {
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst = what;
    }
  };
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraints()[i];
    const double a = lp.activity(i, x);
    double v = 0.0;
    switch (c.relation) {
      case Relation::kLessEqual: v = a - c.rhs; break;
      case Relation::kGreaterEqual: v = c.rhs - a; break;
      case Relation::kEqual: v = std::abs(a - c.rhs); break;
    }
    note(v, c.name);
  }
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    note(lp.lower()[j] - x[j], "lower bound of " + lp.names()[j]);
    note(x[j] - lp.upper()[j], "upper bound of " + lp.names()[j]);
  }
  rep.primal_objective = lp.evaluate(x);

  bool dual_ok = sol.duals.size() == lp.num_constraints();
  if (dual_ok) {
    rep.dual_available = true;
    std::vector<double> reduced = lp.objective();
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
      const Constraint& c = lp.constraints()[i];
      const double y = sol.duals[i];
      if (c.relation == Relation::kGreaterEqual && y < 0.0)
        rep.dual_violation = std::max(rep.dual_violation, -y);
      if (c.relation == Relation::kLessEqual && y > 0.0)
        rep.dual_violation = std::max(rep.dual_violation, y);
      dual_obj += y * c.rhs;
      for (const Term& t : c.terms) reduced[static_cast<std::size_t>(t.var)] -= y * t.coef;
    }
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
      const double z = reduced[j];
      if (z >= 0.0) {
        dual_obj += z * lp.lower()[j];
      } else if (std::isfinite(lp.upper()[j])) {
        dual_obj += z * lp.upper()[j];
      } else {
        rep.dual_violation = std::max(rep.dual_violation, -z);
      }
    }
    rep.dual_objective = dual_obj;
    rep.gap = std::abs(rep.primal_objective - dual_obj) / std::max(1.0, std::abs(rep.primal_objective));
  }
  rep.pass = rep.max_violation <= kFeasTol && (!rep.dual_available || (rep.gap <= 1e-6 && rep.dual_violation <= 1e-6));
  return rep;
}

namespace {

std::string lp_name(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '[') c = '(';
    else if (c == ']') c = ')';
    else if (c == ' ' || c == ':' || c == '+' || c == '-' || c == '*' || c == '<' || c == '>' || c == '=')
      c = '_';
  }
  return out;
}

void write_terms(std::ostream& out, const LinearProgram& lp, const std::vector<Term>& terms) {
  bool first = true;
  for (const Term& t : terms) {
    if (t.coef == 0.0) continue;
    out << (t.coef < 0.0 ? " - " : (first ? " " : " + ")) << std::abs(t.coef) << ' '
        << lp_name(lp.names()[static_cast<std::size_t>(t.var)]);
    first = false;
  }
  if (first) out << " 0 " << lp_name(lp.names().empty() ? "x" : lp.names()[0]);
}

}  // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  out.precision(17);
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    if (lp.objective()[j] != 0.0) obj.push_back({static_cast<int>(j), lp.objective()[j]});
  write_terms(out, lp, obj);
  out << "\nSubject To\n";
  for (const Constraint& c : lp.constraints()) {
    out << ' ' << lp_name(c.name) << ':';
    write_terms(out, lp, c.terms);
    switch (c.relation) {
      case Relation::kLessEqual: out << " <= "; break;
      case Relation::kGreaterEqual: out << " >= "; break;
      case Relation::kEqual: out << " = "; break;
    }
    out << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    out << ' ' << lp.lower()[j] << " <= " << lp_name(lp.names()[j]);
    if (std::isfinite(lp.upper()[j])) out << " <= " << lp.upper()[j];
    out << '\n';
  }
  out << "End\n";
}

}  // namespace sks

// Copyright 2026 The emkt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "emkt/common.hpp"

namespace emkt {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMaximize, kMinimize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  bool is_integer = false;
};

/// One linear row: sum(coef * var) <relation> rhs.
struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Relation rel = Relation::kLessEqual;
  double rhs = 0.0;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit, kIterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kGapLimit: return "gap_limit";
    case SolveStatus::kIterationLimit: return "iteration_limit";
  }
  return "?";
}

struct MilpSolution {
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> values;
  double best_bound = 0.0;
  long nodes = 0;
  double wall_seconds = 0.0;
};

/// Language-neutral linear program with integrality marks.
class MilpProblem {
 public:
  Sense sense = Sense::kMinimize;

  int add_variable(std::string name, double lb, double ub, bool is_integer = false,
                   double objective_coef = 0.0) {
    vars_.push_back({std::move(name), lb, ub, is_integer});
    obj_.push_back(objective_coef);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name, double objective_coef = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, true, objective_coef);
  }

  int add_constraint(Constraint c) {
    rows_.push_back(std::move(c));
    return static_cast<int>(rows_.size()) - 1;
  }

  int add_row(std::string name, std::vector<std::pair<int, double>> terms, Relation rel,
              double rhs) {
    return add_constraint({std::move(name), std::move(terms), rel, rhs});
  }

  void set_objective(int var, double coef) { obj_[var] = coef; }
  double objective_coef(int var) const { return obj_[var]; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_integers() const {
    int n = 0;
    for (const auto& v : vars_) n += v.is_integer ? 1 : 0;
    return n;
  }

  const std::vector<Variable>& variables() const { return vars_; }
  std::vector<Variable>& variables() { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return obj_; }

  double eval_objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (int j = 0; j < num_vars(); ++j) s += obj_[j] * x[j];
    return s;
  }

  double row_activity(int row, const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& [j, c] : rows_[row].terms) a += c * x[j];
    return a;
  }

  /// Largest bound/row violation of x; used to re-verify every solution.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_vars(); ++j) {
      worst = std::max(worst, vars_[j].lb - x[j]);
      worst = std::max(worst, x[j] - vars_[j].ub);
    }
    for (int i = 0; i < num_rows(); ++i) {
      const double a = row_activity(i, x);
      switch (rows_[i].rel) {
        case Relation::kLessEqual: worst = std::max(worst, a - rows_[i].rhs); break;
        case Relation::kGreaterEqual: worst = std::max(worst, rows_[i].rhs - a); break;
        case Relation::kEqual: worst = std::max(worst, std::fabs(a - rows_[i].rhs)); break;
      }
    }
    return worst;
  }

  double max_integrality_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_vars(); ++j)
      if (vars_[j].is_integer) worst = std::max(worst, std::fabs(x[j] - std::round(x[j])));
    return worst;
  }

  /// Structural checks: references in range, binary bounds inside [0, 1],
  /// lb <= ub. Throws ValidationError on the first defect.
  void validate() const {
    for (int j = 0; j < num_vars(); ++j) {
      const auto& v = vars_[j];
      if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub)
        throw ValidationError("variable '" + v.name + "': invalid bounds");
      if (v.is_integer && (v.lb < -1e18 || v.ub > 1e18))
        throw ValidationError("variable '" + v.name + "': integer variable needs finite bounds");
    }
    for (const auto& r : rows_) {
      for (const auto& [j, c] : r.terms) {
        if (j < 0 || j >= num_vars())
          throw ValidationError("row '" + r.name + "': references undeclared variable");
        if (!std::isfinite(c))
          throw ValidationError("row '" + r.name + "': non-finite coefficient");
      }
      if (!std::isfinite(r.rhs)) throw ValidationError("row '" + r.name + "': non-finite rhs");
    }
  }

 private:
  std::vector<Variable> vars_;
  std::vector<double> obj_;
  std::vector<Constraint> rows_;
};

// ---------------------------------------------------------------------------
// LP-format text (CPLEX dialect): \Maximize / Subject To / Bounds / Binary
// ---------------------------------------------------------------------------

namespace detail {
inline void write_linear_expr(std::ostream& os, const std::vector<std::pair<int, double>>& terms,
                              const std::vector<Variable>& vars) {
  bool first = true;
  for (const auto& [j, c] : terms) {
    if (c == 0.0) continue;
    if (first) {
      if (c < 0) os << "- ";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    const double a = std::fabs(c);
    if (a != 1.0) os << format_double(a) << " ";
    os << vars[j].name;
  }
  if (first) os << "0 " << (vars.empty() ? "x" : vars[0].name);
}
}  // namespace detail

inline std::string write_lp_format(const MilpProblem& p) {
  std::ostringstream os;
  os << (p.sense == Sense::kMaximize ? "Maximize" : "Minimize") << "\n obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.objective()[j] != 0.0) obj_terms.emplace_back(j, p.objective()[j]);
  detail::write_linear_expr(os, obj_terms, p.variables());
  os << "\nSubject To\n";
  for (const auto& r : p.constraints()) {
    os << " " << r.name << ": ";
    detail::write_linear_expr(os, r.terms, p.variables());
    switch (r.rel) {
      case Relation::kLessEqual: os << " <= "; break;
      case Relation::kEqual: os << " = "; break;
      case Relation::kGreaterEqual: os << " >= "; break;
    }
    os << format_double(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : p.variables()) {
    if (v.is_integer && v.lb == 0.0 && v.ub == 1.0) continue;  // implied by Binary section
    if (v.lb == -kInf && v.ub == kInf) {
      os << " " << v.name << " free\n";
    } else if (v.lb == -kInf) {
      os << " -inf <= " << v.name << " <= " << format_double(v.ub) << "\n";
    } else if (v.ub == kInf) {
      if (v.lb != 0.0) os << " " << v.name << " >= " << format_double(v.lb) << "\n";
    } else {
      os << " " << format_double(v.lb) << " <= " << v.name << " <= " << format_double(v.ub)
         << "\n";
    }
  }
  bool any_bin = false, any_gen = false;
  for (const auto& v : p.variables()) {
    if (v.is_integer && v.lb == 0.0 && v.ub == 1.0) any_bin = true;
    if (v.is_integer && !(v.lb == 0.0 && v.ub == 1.0)) any_gen = true;
  }
  if (any_bin) {
    os << "Binary\n";
    for (const auto& v : p.variables())
      if (v.is_integer && v.lb == 0.0 && v.ub == 1.0) os << " " << v.name << "\n";
  }
  if (any_gen) {
    os << "General\n";
    for (const auto& v : p.variables())
      if (v.is_integer && !(v.lb == 0.0 && v.ub == 1.0)) os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

/// Reads the LP dialect produced by write_lp_format (plus normal whitespace
/// variations). Enough for round-trips and external cross-checks.
inline MilpProblem read_lp_format(const std::string& text) {
  MilpProblem p;
  std::map<std::string, int> index;
  auto var_of = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = p.add_variable(name, 0.0, kInf);
    index.emplace(name, id);
    return id;
  };

  // Tokenize, tracking line numbers for error messages.
  struct Tok { std::string s; int line; };
  std::vector<Tok> toks;
  {
    int line = 1;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) { toks.push_back({cur, line}); cur.clear(); }
    };
    for (size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '\\') {  // comment to end of line
        flush();
        while (i < text.size() && text[i] != '\n') ++i;
        ++line;
        continue;
      }
      if (c == '\n') { flush(); ++line; continue; }
      if (std::isspace(static_cast<unsigned char>(c))) { flush(); continue; }
      if (c == '+' || c == '-') {
        // sign tokens separate terms unless inside a number/name
        bool part_of_number = !cur.empty() && (cur.back() == 'e' || cur.back() == 'E') &&
                              std::isdigit(static_cast<unsigned char>(cur[0]));
        if (!part_of_number) { flush(); toks.push_back({std::string(1, c), line}); continue; }
      }
      if (c == ':' || c == '<' || c == '>' || c == '=') {
        if (!cur.empty() && (c == '=') && (cur == "<" || cur == ">")) { cur += c; flush(); continue; }
        flush();
        if (c == ':') { toks.push_back({":", line}); continue; }
        cur += c;
        if (c == '=') { flush(); }
        continue;
      }
      cur += c;
    }
    flush();
  }

  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto is_number = [](const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str();
  };

  enum Section { SEC_NONE, SEC_OBJ, SEC_ROWS, SEC_BOUNDS, SEC_BIN, SEC_GEN, SEC_END };
  Section sec = SEC_NONE;
  size_t i = 0;
  auto peek = [&]() -> const Tok* { return i < toks.size() ? &toks[i] : nullptr; };

  auto section_of = [&](const std::string& w, size_t at) -> Section {
    std::string lw = lower(w);
    if (lw == "maximize" || lw == "maximise" || lw == "max") { p.sense = Sense::kMaximize; return SEC_OBJ; }
    if (lw == "minimize" || lw == "minimise" || lw == "min") { p.sense = Sense::kMinimize; return SEC_OBJ; }
    if (lw == "subject") {
      if (at + 1 < toks.size() && lower(toks[at + 1].s) == "to") return SEC_ROWS;
      return SEC_NONE;
    }
    if (lw == "st" || lw == "s.t.") return SEC_ROWS;
    if (lw == "bounds") return SEC_BOUNDS;
    if (lw == "binary" || lw == "binaries" || lw == "bin") return SEC_BIN;
    if (lw == "general" || lw == "generals" || lw == "gen" || lw == "integer" || lw == "integers")
      return SEC_GEN;
    if (lw == "end") return SEC_END;
    return SEC_NONE;
  };

  // Parses "name:"? (sign? coef? var)+ — stops at relation token or section word.
  auto parse_expr = [&](std::vector<std::pair<int, double>>& terms, std::string* row_name) {
    if (row_name && i + 1 < toks.size() && toks[i + 1].s == ":") {
      *row_name = toks[i].s;
      i += 2;
    }
    double sign = 1.0;
    bool have_coef = false;
    double coef = 1.0;
    while (const Tok* t = peek()) {
      if (t->s == "<=" || t->s == ">=" || t->s == "=" || t->s == "<" || t->s == ">") break;
      Section ns = section_of(t->s, i);
      if (ns != SEC_NONE && !have_coef) break;
      if (t->s == "+") { sign = 1.0; ++i; continue; }
      if (t->s == "-") { sign = -sign; ++i; continue; }
      if (is_number(t->s)) {
        coef = std::strtod(t->s.c_str(), nullptr);
        have_coef = true;
        ++i;
        continue;
      }
      terms.emplace_back(var_of(t->s), sign * (have_coef ? coef : 1.0));
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
      ++i;
    }
  };

  std::vector<std::pair<int, double>> obj_terms;
  while (const Tok* t = peek()) {
    Section ns = section_of(t->s, i);
    if (ns == SEC_ROWS && lower(t->s) == "subject") { i += 2; sec = SEC_ROWS; continue; }
    if (ns != SEC_NONE) { ++i; sec = ns; if (sec == SEC_END) break; continue; }
    switch (sec) {
      case SEC_OBJ: {
        std::string name;
        parse_expr(obj_terms, &name);
        break;
      }
      case SEC_ROWS: {
        Constraint c;
        std::string name = "c" + std::to_string(p.num_rows());
        std::vector<std::pair<int, double>> terms;
        parse_expr(terms, &name);
        const Tok* rel = peek();
        if (!rel) throw ParseError("row '" + name + "': missing relation", t->line);
        if (rel->s == "<=" || rel->s == "<") c.rel = Relation::kLessEqual;
        else if (rel->s == ">=" || rel->s == ">") c.rel = Relation::kGreaterEqual;
        else if (rel->s == "=") c.rel = Relation::kEqual;
        else throw ParseError("row '" + name + "': bad relation '" + rel->s + "'", rel->line);
        ++i;
        double sign = 1.0;
        if (peek() && (peek()->s == "-" || peek()->s == "+")) {
          sign = peek()->s == "-" ? -1.0 : 1.0;
          ++i;
        }
        if (!peek() || !is_number(peek()->s))
          throw ParseError("row '" + name + "': missing rhs", rel->line);
        c.rhs = sign * std::strtod(peek()->s.c_str(), nullptr);
        ++i;
        c.name = name;
        c.terms = std::move(terms);
        p.add_constraint(std::move(c));
        break;
      }
      case SEC_BOUNDS: {
        // forms: v free | v >= L | v <= U | L <= v <= U | -inf <= v <= U
        std::vector<Tok> stmt;
        int line = t->line;
        while (peek() && peek()->line == line) { stmt.push_back(*peek()); ++i; }
        std::vector<std::string> flat;
        for (auto& s : stmt) flat.push_back(s.s);
        // merge sign tokens into following numbers
        std::vector<std::string> merged;
        for (size_t k = 0; k < flat.size(); ++k) {
          if ((flat[k] == "-" || flat[k] == "+") && k + 1 < flat.size() &&
              (is_number(flat[k + 1]) || lower(flat[k + 1]) == "inf" ||
               lower(flat[k + 1]) == "infinity")) {
            merged.push_back(flat[k] + flat[k + 1]);
            ++k;
          } else {
            merged.push_back(flat[k]);
          }
        }
        auto num_of = [&](const std::string& s) -> double {
          std::string l = lower(s);
          if (l == "inf" || l == "+inf" || l == "infinity" || l == "+infinity") return kInf;
          if (l == "-inf" || l == "-infinity") return -kInf;
          return std::strtod(s.c_str(), nullptr);
        };
        if (merged.size() == 2 && lower(merged[1]) == "free") {
          int v = var_of(merged[0]);
          p.variables()[v].lb = -kInf;
          p.variables()[v].ub = kInf;
        } else if (merged.size() == 3 && (merged[1] == ">=" || merged[1] == "<=")) {
          if (is_number(merged[0]) || lower(merged[0]).find("inf") != std::string::npos) {
            // "L <= v" / "L >= v"
            int v = var_of(merged[2]);
            if (merged[1] == "<=") p.variables()[v].lb = num_of(merged[0]);
            else p.variables()[v].ub = num_of(merged[0]);
          } else {
            int v = var_of(merged[0]);
            if (merged[1] == ">=") p.variables()[v].lb = num_of(merged[2]);
            else p.variables()[v].ub = num_of(merged[2]);
          }
        } else if (merged.size() == 5 && merged[1] == "<=" && merged[3] == "<=") {
          int v = var_of(merged[2]);
          p.variables()[v].lb = num_of(merged[0]);
          p.variables()[v].ub = num_of(merged[4]);
        } else if (!merged.empty()) {
          throw ParseError("unrecognized bound statement starting '" + merged[0] + "'", line);
        }
        break;
      }
      case SEC_BIN: {
        int v = var_of(t->s);
        p.variables()[v].is_integer = true;
        p.variables()[v].lb = std::max(p.variables()[v].lb, 0.0);
        p.variables()[v].ub = std::min(p.variables()[v].ub, 1.0);
        ++i;
        break;
      }
      case SEC_GEN: {
        p.variables()[var_of(t->s)].is_integer = true;
        ++i;
        break;
      }
      default:
        throw ParseError("unexpected token '" + t->s + "'", t->line);
    }
  }
  for (auto& [j, c] : obj_terms) p.set_objective(j, p.objective_coef(j) + c);
  return p;
}

/// CSV dump: header + one (variable, value) row per variable.
inline std::string solution_to_csv(const MilpProblem& p, const MilpSolution& s) {
  std::ostringstream os;
  os << "variable,value\n";
  for (int j = 0; j < p.num_vars(); ++j)
    os << p.variables()[j].name << "," << format_double(j < (int)s.values.size() ? s.values[j] : 0.0)
       << "\n";
  return os.str();
}

/// JSON summary: status, objective, bound, node count.
inline std::string solution_summary_json(const MilpSolution& s) {
  std::ostringstream os;
  os << "{\"status\":\"" << to_string(s.status) << "\",\"objective\":" << format_double(s.objective)
     << ",\"best_bound\":" << format_double(s.best_bound) << ",\"nodes\":" << s.nodes << "}";
  return os.str();
}

}  // namespace emkt

#pragma once

#include <cstdint>
#include <string>

namespace convlab {

enum class Hypothesis { Satisfied, Violated, Vacuous };
enum class Verdict { Pass, Fail, Skipped };
enum class TolKind { Exact, Discretization, FloatEps };

inline const char *to_string(Hypothesis h) {
  switch (h) {
  case Hypothesis::Satisfied:
    return "satisfied";
  case Hypothesis::Violated:
    return "violated";
  case Hypothesis::Vacuous:
    return "vacuous";
  }
  return "?";
}

inline const char *to_string(Verdict v) {
  switch (v) {
  case Verdict::Pass:
    return "PASS";
  case Verdict::Fail:
    return "FAIL";
  case Verdict::Skipped:
    return "SKIPPED";
  }
  return "?";
}

inline const char *to_string(TolKind t) {
  switch (t) {
  case TolKind::Exact:
    return "exact";
  case TolKind::Discretization:
    return "discretization";
  case TolKind::FloatEps:
    return "float";
  }
  return "?";
}

// Result of one inequality instance.  Sign convention: margin = rhs - lhs,
// and margin >= -tolerance means the inequality holds.
struct CheckReport {
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  TolKind tol_kind = TolKind::FloatEps;
  Hypothesis hypothesis = Hypothesis::Vacuous;
  Verdict verdict = Verdict::Skipped;
  std::uint64_t seed = 0;
  std::string note;

  // Standard verdict rule: a violated hypothesis yields SKIPPED (the
  // statements are conditional); otherwise PASS iff margin >= -tolerance.
  static CheckReport make(std::string statement, double lhs, double rhs, double tolerance,
                          TolKind tol_kind, Hypothesis hyp, std::string note = {}) {
    CheckReport r;
    r.statement = std::move(statement);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.tol_kind = tol_kind;
    r.hypothesis = hyp;
    r.note = std::move(note);
    if (hyp == Hypothesis::Violated)
      r.verdict = Verdict::Skipped;
    else
      r.verdict = r.margin >= -tolerance ? Verdict::Pass : Verdict::Fail;
    return r;
  }
};

} // namespace convlab

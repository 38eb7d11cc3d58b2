#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "convlab/convex_fn.hpp"
#include "convlab/errors.hpp"
#include "convlab/extremal_search.hpp"
#include "convlab/group_model.hpp"
#include "convlab/report.hpp"
#include "convlab/step_fn.hpp"

namespace convlab {

using json = nlohmann::json;

// Cayley table of Z/n.
inline std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      t[i][j] = (i + j) % n;
  return t;
}

// Cayley table of the symmetric group on three letters, generated from the
// permutation composition (identity is element 0).
inline std::vector<std::vector<int>> s3_table() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const int n = static_cast<int>(perms.size());
  auto index_of = [&](const std::array<int, 3> &q) {
    for (int i = 0; i < n; ++i)
      if (perms[i] == q)
        return i;
    return -1;
  };
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::array<int, 3> q;
      for (int x = 0; x < 3; ++x)
        q[x] = perms[i][perms[j][x]];
      t[i][j] = index_of(q);
    }
  return t;
}

inline std::vector<std::vector<int>> named_finite_table(const std::string &name) {
  if (name == "S3")
    return s3_table();
  if (name.rfind("Z", 0) == 0) {
    const int n = std::stoi(name.substr(1));
    if (n >= 1)
      return cyclic_table(n);
  }
  throw validation_error("named_finite_table: unknown group '" + name + "'");
}

// Model spec: {"kind": "circle"|"cyclic"|"line"|"cayley"|"product", ...}.
inline GroupModelPtr model_from_json(const json &j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "circle")
    return make_cyclic(j.at("n").get<int>(), j.value("volume", 1.0), true);
  if (kind == "cyclic") {
    const bool circle = j.value("semantics", std::string("discrete")) == "circle";
    return make_cyclic(j.at("n").get<int>(), j.value("volume", 1.0), circle);
  }
  if (kind == "line")
    return make_real_grid(j.at("h").get<double>(), j.at("half_width").get<double>());
  if (kind == "cayley") {
    std::vector<std::vector<int>> table;
    if (j.contains("name"))
      table = named_finite_table(j.at("name").get<std::string>());
    else
      table = j.at("cayley").get<std::vector<std::vector<int>>>();
    return make_finite_cayley(table, j.value("weight", 1.0));
  }
  if (kind == "product")
    return make_product(model_from_json(j.at("connected")), model_from_json(j.at("finite")));
  throw validation_error("model_from_json: unknown kind '" + kind + "'");
}

// Function spec: {"family": "ft"|"power"|"negpower"|"entropy"|"piecewise_linear", ...}.
inline ConvexFn convex_from_json(const json &j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "ft")
    return ConvexFn::ft(j.at("t").get<double>());
  if (family == "power")
    return ConvexFn::power(j.at("p").get<double>());
  if (family == "negpower")
    return ConvexFn::negpower(j.at("p").get<double>());
  if (family == "entropy")
    return ConvexFn::entropy();
  if (family == "piecewise_linear") {
    std::vector<std::pair<double, double>> pts;
    for (const auto &pt : j.at("points"))
      pts.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    return ConvexFn::piecewise_linear(std::move(pts));
  }
  throw validation_error("convex_from_json: unknown family '" + family + "'");
}

inline json report_to_json(const CheckReport &r) {
  return json{{"statement", r.statement},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"margin", r.margin},
              {"tol", r.tolerance},
              {"tol_kind", to_string(r.tol_kind)},
              {"hypothesis", to_string(r.hypothesis)},
              {"verdict", to_string(r.verdict)},
              {"instance_seed", r.seed},
              {"note", r.note}};
}

inline json reports_to_json(const std::vector<CheckReport> &reports) {
  int pass = 0, fail = 0, skipped = 0;
  json arr = json::array();
  for (const auto &r : reports) {
    arr.push_back(report_to_json(r));
    switch (r.verdict) {
    case Verdict::Pass:
      ++pass;
      break;
    case Verdict::Fail:
      ++fail;
      break;
    case Verdict::Skipped:
      ++skipped;
      break;
    }
  }
  return json{{"reports", std::move(arr)},
              {"summary", {{"pass", pass}, {"fail", fail}, {"skipped", skipped}}}};
}

inline void write_report_json(const std::string &path, const std::vector<CheckReport> &reports) {
  std::ofstream out(path);
  if (!out)
    throw validation_error("write_report_json: cannot open " + path);
  out << reports_to_json(reports).dump(2) << "\n";
}

inline json stepfn_to_json(const StepFn &fn, const std::string &model_ref) {
  return json{{"model_ref", model_ref}, {"values", fn.values()}};
}

// CSV export: one row per cell, (coordinate, value).
inline std::string stepfn_to_csv(const StepFn &fn) {
  std::ostringstream os;
  os << "coord,value\n";
  for (int c = 0; c < fn.model()->size(); ++c)
    os << fn.model()->coord(c) << "," << fn[c] << "\n";
  return os.str();
}

inline std::string gap_rows_to_csv(const std::vector<GapRow> &rows) {
  std::ostringstream os;
  os << "I,S_hat,bound,gap,budget,seed\n";
  for (const auto &r : rows)
    os << r.I << "," << r.s_hat << "," << r.bound << "," << r.gap << "," << r.budget << ","
       << r.seed << "\n";
  return os.str();
}

struct BenchRow {
  std::string model;
  int n;
  std::string kernel;
  double seconds;
  double checksum;
};

inline std::string bench_rows_to_csv(const std::vector<BenchRow> &rows) {
  std::ostringstream os;
  os << "model,n,kernel,seconds,checksum\n";
  os.precision(17);
  for (const auto &r : rows)
    os << r.model << "," << r.n << "," << r.kernel << "," << r.seconds << "," << r.checksum
       << "\n";
  return os.str();
}

inline void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out)
    throw validation_error("write_text_file: cannot open " + path);
  out << content;
}

} // namespace convlab

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "convlab/errors.hpp"

namespace convlab {

enum class GroupKind { FiniteCayley, CircleGrid, RealLineGrid, Product };

class GroupModel;
using GroupModelPtr = std::shared_ptr<const GroupModel>;

// A discrete measured model of a unimodular locally compact group: an
// indexed carrier of cells, a composition law on cell ids, a uniform Haar
// weight per cell, and the continuum metadata (m(G), connectedness) of the
// group being modeled.
//
// Cell geometry:
//   CircleGrid   - n arcs [i*V/n, (i+1)*V/n), composition (i+j) mod n.
//   RealLineGrid - 2N+1 cells centered at s*h for s in [-N, N], each
//                  covering [s*h - h/2, s*h + h/2); centered cells keep
//                  reflection exact on the grid. compose returns -1 when
//                  the result index leaves [-N, N].
//   FiniteCayley - explicit composition table.
//   Product      - (connected factor) x (finite factor), id = ia*nb + ib.
class GroupModel {
public:
  static constexpr int kOverflow = -1;

  GroupKind kind;

  int size() const { return n_; }
  double weight() const { return weight_; }
  double total_volume() const { return n_ * weight_; }
  double m_value() const { return m_value_; }
  bool is_m_infinite() const { return std::isinf(m_value_); }
  bool connected() const { return connected_; }
  int identity() const { return identity_; }

  int compose(int a, int b) const {
    switch (kind) {
    case GroupKind::CircleGrid: {
      int r = a + b;
      return r >= n_ ? r - n_ : r;
    }
    case GroupKind::RealLineGrid: {
      int s = (a - half_n_) + (b - half_n_);
      if (s < -half_n_ || s > half_n_)
        return kOverflow;
      return s + half_n_;
    }
    case GroupKind::FiniteCayley:
      return table_[a * n_ + b];
    case GroupKind::Product: {
      int ca = factor_a_->compose(a / nb_, b / nb_);
      if (ca == kOverflow)
        return kOverflow;
      int cb = factor_b_->compose(a % nb_, b % nb_);
      return ca * nb_ + cb;
    }
    }
    return kOverflow;
  }

  int inverse(int a) const {
    switch (kind) {
    case GroupKind::CircleGrid:
      return a == 0 ? 0 : n_ - a;
    case GroupKind::RealLineGrid:
      return 2 * half_n_ - a;
    case GroupKind::FiniteCayley:
      return inv_[a];
    case GroupKind::Product:
      return factor_a_->inverse(a / nb_) * nb_ + factor_b_->inverse(a % nb_);
    }
    return kOverflow;
  }

  // RealLineGrid accessors.
  double step() const { return h_; }
  int half_count() const { return half_n_; }
  int cell_of_signed(int s) const { return s + half_n_; }
  int signed_of_cell(int c) const { return c - half_n_; }

  // A representative coordinate per cell: cell center on the line, left arc
  // endpoint on the circle, plain index otherwise.
  double coord(int cell) const {
    switch (kind) {
    case GroupKind::RealLineGrid:
      return (cell - half_n_) * h_;
    case GroupKind::CircleGrid:
      return cell * weight_;
    default:
      return cell;
    }
  }

  const GroupModelPtr &connected_factor() const { return factor_a_; }
  const GroupModelPtr &finite_factor() const { return factor_b_; }
  int finite_factor_size() const { return nb_; }

  friend GroupModelPtr make_cyclic(int n, double total_volume, bool as_circle);
  friend GroupModelPtr make_finite_cayley(const std::vector<std::vector<int>> &table,
                                          double element_weight);
  friend GroupModelPtr make_real_grid(double h, double half_width);
  friend GroupModelPtr make_product(GroupModelPtr connected, GroupModelPtr finite);

private:
  GroupModel() = default;

  int n_ = 0;
  double weight_ = 1.0;
  double m_value_ = 0.0;
  bool connected_ = false;
  int identity_ = 0;

  int half_n_ = 0; // RealLineGrid
  double h_ = 0.0;

  std::vector<int> table_; // FiniteCayley, row-major
  std::vector<int> inv_;

  GroupModelPtr factor_a_, factor_b_; // Product
  int nb_ = 1;
};

inline GroupModelPtr make_cyclic(int n, double total_volume, bool as_circle) {
  if (n < 1)
    throw construction_error("make_cyclic: n must be >= 1");
  if (!(total_volume > 0))
    throw construction_error("make_cyclic: total_volume must be > 0");
  auto m = std::shared_ptr<GroupModel>(new GroupModel());
  m->kind = GroupKind::CircleGrid;
  m->n_ = n;
  m->weight_ = total_volume / n;
  m->connected_ = as_circle;
  // Circle semantics: m(G) is the volume of the connected group being
  // modeled.  Discrete semantics: the trivial subgroup {e} is open, so
  // m(G) is one cell weight.
  m->m_value_ = as_circle ? total_volume : m->weight_;
  return m;
}

namespace detail {

inline void validate_cayley(const std::vector<std::vector<int>> &table, int &identity,
                            std::vector<int> &inv) {
  const int n = static_cast<int>(table.size());
  if (n < 1)
    throw validation_error("cayley: empty table");
  for (auto &row : table) {
    if (static_cast<int>(row.size()) != n)
      throw validation_error("cayley: table is not square");
    for (int v : row)
      if (v < 0 || v >= n)
        throw validation_error("cayley: entry out of range");
  }
  // Latin square.
  for (int i = 0; i < n; ++i) {
    std::vector<char> seen_row(n, 0), seen_col(n, 0);
    for (int j = 0; j < n; ++j) {
      if (seen_row[table[i][j]]++)
        throw validation_error("cayley: row " + std::to_string(i) +
                               " repeats element " + std::to_string(table[i][j]));
      if (seen_col[table[j][i]]++)
        throw validation_error("cayley: column " + std::to_string(i) +
                               " repeats element " + std::to_string(table[j][i]));
    }
  }
  // Two-sided identity.
  identity = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      ok = table[e][x] == x && table[x][e] == x;
    if (ok) {
      identity = e;
      break;
    }
  }
  if (identity < 0)
    throw validation_error("cayley: no two-sided identity element");
  // Two-sided inverses.
  inv.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (table[a][b] == identity && table[b][a] == identity) {
        inv[a] = b;
        break;
      }
    if (inv[a] < 0)
      throw validation_error("cayley: element " + std::to_string(a) +
                             " has no two-sided inverse");
  }
  // Associativity, exhaustive.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw validation_error("cayley: associativity fails at triple (" +
                                 std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c) + ")");
}

} // namespace detail

inline GroupModelPtr make_finite_cayley(const std::vector<std::vector<int>> &table,
                                        double element_weight) {
  if (!(element_weight > 0))
    throw construction_error("make_finite_cayley: element_weight must be > 0");
  int identity;
  std::vector<int> inv;
  detail::validate_cayley(table, identity, inv);
  auto m = std::shared_ptr<GroupModel>(new GroupModel());
  m->kind = GroupKind::FiniteCayley;
  m->n_ = static_cast<int>(table.size());
  m->weight_ = element_weight;
  m->connected_ = false;
  m->identity_ = identity;
  m->inv_ = std::move(inv);
  m->table_.resize(m->n_ * m->n_);
  for (int i = 0; i < m->n_; ++i)
    for (int j = 0; j < m->n_; ++j)
      m->table_[i * m->n_ + j] = table[i][j];
  // The trivial subgroup is open in a discrete group.
  m->m_value_ = element_weight;
  return m;
}

inline GroupModelPtr make_real_grid(double h, double half_width) {
  if (!(h > 0))
    throw construction_error("make_real_grid: step must be > 0");
  if (!(half_width >= h))
    throw construction_error("make_real_grid: half_width must be >= step");
  auto m = std::shared_ptr<GroupModel>(new GroupModel());
  m->kind = GroupKind::RealLineGrid;
  m->half_n_ = static_cast<int>(std::llround(half_width / h));
  m->n_ = 2 * m->half_n_ + 1;
  m->h_ = h;
  m->weight_ = h;
  m->connected_ = true;
  m->m_value_ = std::numeric_limits<double>::infinity();
  m->identity_ = m->half_n_;
  return m;
}

inline GroupModelPtr make_product(GroupModelPtr connected, GroupModelPtr finite) {
  if (!connected || !finite)
    throw construction_error("make_product: null factor");
  if (connected->kind != GroupKind::CircleGrid && connected->kind != GroupKind::RealLineGrid)
    throw construction_error("make_product: first factor must be CircleGrid or RealLineGrid");
  if (connected->kind == GroupKind::CircleGrid && !connected->connected())
    throw construction_error("make_product: circle factor must have circle semantics");
  if (finite->kind != GroupKind::FiniteCayley)
    throw construction_error("make_product: second factor must be FiniteCayley");
  auto m = std::shared_ptr<GroupModel>(new GroupModel());
  m->kind = GroupKind::Product;
  m->factor_a_ = connected;
  m->factor_b_ = finite;
  m->nb_ = finite->size();
  m->n_ = connected->size() * finite->size();
  m->weight_ = connected->weight() * finite->weight();
  m->connected_ = false;
  m->identity_ = connected->identity() * m->nb_ + finite->identity();
  m->m_value_ = connected->is_m_infinite() ? std::numeric_limits<double>::infinity()
                                           : connected->total_volume();
  return m;
}

// All subgroups of a finite Cayley model, as sorted cell sets, found by
// closing cyclic subgroups under pairwise joins.
inline std::vector<std::vector<int>> enumerate_subgroups(const GroupModel &model) {
  if (model.kind != GroupKind::FiniteCayley && model.kind != GroupKind::CircleGrid)
    throw validation_error("enumerate_subgroups: finite model required");
  const int n = model.size();
  if (n > 128)
    throw validation_error("enumerate_subgroups: |G| > 128; override m_value explicitly");

  auto closure = [&](std::vector<int> gens) {
    std::set<int> cur(gens.begin(), gens.end());
    cur.insert(model.identity());
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<int> elems(cur.begin(), cur.end());
      for (int a : elems)
        for (int b : elems) {
          if (cur.insert(model.compose(a, b)).second)
            grew = true;
          if (cur.insert(model.inverse(a)).second)
            grew = true;
        }
    }
    return std::vector<int>(cur.begin(), cur.end());
  };

  std::set<std::vector<int>> subs;
  for (int g = 0; g < n; ++g)
    subs.insert(closure({g}));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<int>> cur(subs.begin(), subs.end());
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t j = i + 1; j < cur.size(); ++j) {
        std::vector<int> gens = cur[i];
        gens.insert(gens.end(), cur[j].begin(), cur[j].end());
        if (subs.insert(closure(gens)).second)
          grew = true;
      }
  }
  return {subs.begin(), subs.end()};
}

// Designated open subgroup G0 and the coset index map G -> G/G0.
struct CosetStructure {
  GroupModelPtr model;
  std::vector<int> g0_cells;
  std::vector<int> coset_of;   // cell id -> coset id
  std::vector<int> coset_reps; // coset id -> representative cell
  double vol_g0 = 0.0;

  int num_cosets() const { return static_cast<int>(coset_reps.size()); }
};

// Canonical coset structure of a product model: G0 = connected factor.
// Coset ids coincide with finite-factor element ids, so the quotient group
// law is the finite factor's Cayley table.
inline CosetStructure product_cosets(GroupModelPtr product) {
  if (!product || product->kind != GroupKind::Product)
    throw validation_error("product_cosets: product model required");
  CosetStructure cs;
  cs.model = product;
  const int nb = product->finite_factor_size();
  const int na = product->size() / nb;
  cs.coset_of.resize(product->size());
  for (int ia = 0; ia < na; ++ia)
    for (int ib = 0; ib < nb; ++ib)
      cs.coset_of[ia * nb + ib] = ib;
  cs.coset_reps.resize(nb);
  const int ia_e = product->connected_factor()->identity();
  for (int ib = 0; ib < nb; ++ib)
    cs.coset_reps[ib] = ia_e * nb + ib;
  cs.g0_cells.reserve(na);
  const int ib_e = product->finite_factor()->identity();
  for (int ia = 0; ia < na; ++ia)
    cs.g0_cells.push_back(ia * nb + ib_e);
  cs.vol_g0 = product->connected_factor()->total_volume() * product->finite_factor()->weight();
  return cs;
}

// Whole-group coset structure (trivial quotient).
inline CosetStructure trivial_cosets(GroupModelPtr model) {
  CosetStructure cs;
  cs.model = model;
  cs.g0_cells.resize(model->size());
  for (int i = 0; i < model->size(); ++i)
    cs.g0_cells[i] = i;
  cs.coset_of.assign(model->size(), 0);
  cs.coset_reps = {model->identity()};
  cs.vol_g0 = model->total_volume();
  return cs;
}

} // namespace convlab

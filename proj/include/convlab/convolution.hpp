#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <fftw3.h>

#include "convlab/errors.hpp"
#include "convlab/group_model.hpp"
#include "convlab/step_fn.hpp"

namespace convlab {

// Haar-weighted convolution, direct kernel.  This is the semantic
// definition; the FFT kernel below is an accelerator cross-checked against
// it.  Accumulation is scatter-ordered: out[compose(i,j)] += phi1[i] *
// phi2[j] * w in ascending (i, j), which is deterministic.
inline StepFn convolve(const StepFn &phi1, const StepFn &phi2) {
  if (!phi1.same_model(phi2))
    throw model_mismatch_error("convolve: model mismatch");
  const auto &model = *phi1.model();
  const int n = model.size();
  const double w = model.weight();
  std::vector<double> out(n, 0.0);

  if (model.kind == GroupKind::CircleGrid) {
    for (int i = 0; i < n; ++i) {
      const double a = phi1[i];
      if (a == 0.0)
        continue;
      int k = i;
      for (int j = 0; j < n; ++j) {
        out[k] += a * phi2[j];
        if (++k == n)
          k = 0;
      }
    }
  } else if (model.kind == GroupKind::RealLineGrid) {
    const int N = model.half_count();
    for (int i = 0; i < n; ++i) {
      const double a = phi1[i];
      if (a == 0.0)
        continue;
      for (int j = 0; j < n; ++j) {
        const double p = a * phi2[j];
        if (p == 0.0)
          continue;
        const int s = (i - N) + (j - N);
        if (s < -N || s > N)
          throw overflow_error("convolve: mass outside RealLineGrid range");
        out[s + N] += p;
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double a = phi1[i];
      if (a == 0.0)
        continue;
      for (int j = 0; j < n; ++j) {
        const double p = a * phi2[j];
        if (p == 0.0)
          continue;
        const int k = model.compose(i, j);
        if (k == GroupModel::kOverflow)
          throw overflow_error("convolve: mass outside grid range");
        out[k] += p;
      }
    }
  }
  for (double &v : out)
    v *= w;
  return StepFn(phi1.model(), std::move(out), std::nullopt);
}

// Integer convolution of the exact numerators: N(g) = sum over i*j = g of
// num1[i] * num2[j].  Weights and denominators are left to the caller, so
// the result is exact.
inline std::vector<__int128> convolve_exact_num(const StepFn &phi1, const StepFn &phi2) {
  if (!phi1.same_model(phi2))
    throw model_mismatch_error("convolve_exact_num: model mismatch");
  if (!phi1.is_exact() || !phi2.is_exact())
    throw validation_error("convolve_exact_num: both inputs must be exact");
  const auto &model = *phi1.model();
  const int n = model.size();
  std::vector<__int128> out(n, 0);
  for (int i = 0; i < n; ++i) {
    const std::int64_t a = phi1.exact_num()[i];
    if (a == 0)
      continue;
    for (int j = 0; j < n; ++j) {
      const std::int64_t b = phi2.exact_num()[j];
      if (b == 0)
        continue;
      const int k = model.compose(i, j);
      if (k == GroupModel::kOverflow)
        throw overflow_error("convolve_exact_num: mass outside grid range");
      out[k] += static_cast<__int128>(a) * b;
    }
  }
  return out;
}

namespace detail {

// Real circular convolution of fixed size via FFTW r2c/c2r.
class CircularFft {
public:
  explicit CircularFft(int m) : m_(m), spec_len_(m / 2 + 1) {
    in_ = fftw_alloc_real(m_);
    out_ = fftw_alloc_complex(spec_len_);
    fwd_ = fftw_plan_dft_r2c_1d(m_, in_, out_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(m_, out_, in_, FFTW_ESTIMATE);
  }
  ~CircularFft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }
  CircularFft(const CircularFft &) = delete;
  CircularFft &operator=(const CircularFft &) = delete;

  int size() const { return m_; }

  std::vector<std::complex<double>> forward(const std::vector<double> &x) {
    for (int i = 0; i < m_; ++i)
      in_[i] = i < static_cast<int>(x.size()) ? x[i] : 0.0;
    fftw_execute(fwd_);
    std::vector<std::complex<double>> s(spec_len_);
    for (int i = 0; i < spec_len_; ++i)
      s[i] = {out_[i][0], out_[i][1]};
    return s;
  }

  std::vector<double> backward_product(const std::vector<std::complex<double>> &a,
                                       const std::vector<std::complex<double>> &b) {
    for (int i = 0; i < spec_len_; ++i) {
      const auto p = a[i] * b[i];
      out_[i][0] = p.real();
      out_[i][1] = p.imag();
    }
    fftw_execute(bwd_);
    std::vector<double> r(m_);
    const double scale = 1.0 / m_;
    for (int i = 0; i < m_; ++i)
      r[i] = in_[i] * scale;
    return r;
  }

private:
  int m_, spec_len_;
  double *in_;
  fftw_complex *out_;
  fftw_plan fwd_, bwd_;
};

// Generator exponent relabeling of a cyclic Cayley factor: cell -> k with
// cell = g^k, or nullopt when the factor is not cyclic.
inline std::optional<std::vector<int>> cyclic_exponents(const GroupModel &f) {
  const int n = f.size();
  for (int g = 0; g < n; ++g) {
    std::vector<int> expo(n, -1);
    int cur = f.identity(), k = 0;
    while (expo[cur] < 0) {
      expo[cur] = k++;
      cur = f.compose(cur, g);
    }
    if (k == n)
      return expo;
  }
  return std::nullopt;
}

// FFT round trips leave ulp-scale negatives where the true value is 0;
// StepFn validation is strict, so shave them.
inline void shave_negatives(std::vector<double> &v, double eps) {
  for (double &x : v)
    if (x < 0.0 && x > -eps)
      x = 0.0;
}

} // namespace detail

// FFT convolution kernel.  Supported models: CircleGrid (circular),
// RealLineGrid (zero-padded linear with range check), and Product of a
// grid with a cyclic FiniteCayley factor (2-D circular transform after
// generator relabeling).
inline StepFn convolve_fft(const StepFn &phi1, const StepFn &phi2) {
  if (!phi1.same_model(phi2))
    throw model_mismatch_error("convolve_fft: model mismatch");
  const auto &model = *phi1.model();
  const int n = model.size();
  const double w = model.weight();

  if (model.kind == GroupKind::CircleGrid) {
    detail::CircularFft fft(n);
    auto r = fft.backward_product(fft.forward(phi1.values()), fft.forward(phi2.values()));
    for (double &v : r)
      v *= w;
    detail::shave_negatives(r, 1e-10 * (1.0 + l1_norm(phi1) * l1_norm(phi2)));
    return StepFn(phi1.model(), std::move(r), std::nullopt);
  }

  if (model.kind == GroupKind::RealLineGrid) {
    const int N = model.half_count();
    int m = 1;
    while (m < 2 * n)
      m <<= 1;
    detail::CircularFft fft(m);
    auto r = fft.backward_product(fft.forward(phi1.values()), fft.forward(phi2.values()));
    // r index k corresponds to signed sum (k - 2N); keep [-N, N].
    std::vector<double> out(n, 0.0);
    const double tol = 1e-12 * (1.0 + l1_norm(phi1) + l1_norm(phi2));
    for (int k = 0; k < m; ++k) {
      const int s = k - 2 * N;
      if (s >= -N && s <= N)
        out[s + N] = r[k] * w;
      else if (std::abs(r[k]) * w > tol)
        throw overflow_error("convolve_fft: mass outside RealLineGrid range");
    }
    detail::shave_negatives(out, 1e-10 * (1.0 + l1_norm(phi1) * l1_norm(phi2)));
    return StepFn(phi1.model(), std::move(out), std::nullopt);
  }

  if (model.kind == GroupKind::Product) {
    const auto &fa = *model.connected_factor();
    const auto &fb = *model.finite_factor();
    auto expo = detail::cyclic_exponents(fb);
    if (!expo)
      throw validation_error("convolve_fft: finite factor is not cyclic");
    const int nb = fb.size();
    const int na = fa.size();
    const bool line = fa.kind == GroupKind::RealLineGrid;
    int ma = line ? 1 : na;
    if (line)
      while (ma < 2 * na)
        ma <<= 1;
    // 2-D circular convolution as nb 1-D transforms per column is simplest
    // with the r2c API: do full complex 2-D via row-column decomposition.
    // Sizes are desk-scale, so use a direct complex DFT per dimension.
    std::vector<std::complex<double>> A(ma * nb, 0.0), B(ma * nb, 0.0);
    for (int ia = 0; ia < na; ++ia)
      for (int ib = 0; ib < nb; ++ib) {
        A[ia * nb + (*expo)[ib]] += phi1[ia * nb + ib];
        B[ia * nb + (*expo)[ib]] += phi2[ia * nb + ib];
      }
    fftw_plan pa = fftw_plan_dft_2d(ma, nb, reinterpret_cast<fftw_complex *>(A.data()),
                                    reinterpret_cast<fftw_complex *>(A.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_2d(ma, nb, reinterpret_cast<fftw_complex *>(B.data()),
                                    reinterpret_cast<fftw_complex *>(B.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    for (int i = 0; i < ma * nb; ++i)
      A[i] *= B[i];
    fftw_plan pi = fftw_plan_dft_2d(ma, nb, reinterpret_cast<fftw_complex *>(A.data()),
                                    reinterpret_cast<fftw_complex *>(A.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(pi);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pi);
    const double scale = 1.0 / (ma * nb);
    std::vector<double> out(n, 0.0);
    std::vector<int> unexpo(nb);
    for (int ib = 0; ib < nb; ++ib)
      unexpo[(*expo)[ib]] = ib;
    const double tol = 1e-12 * (1.0 + l1_norm(phi1) + l1_norm(phi2));
    const int N = line ? fa.half_count() : 0;
    for (int ka = 0; ka < ma; ++ka)
      for (int kb = 0; kb < nb; ++kb) {
        const double v = A[ka * nb + kb].real() * scale;
        int cell_a;
        if (line) {
          const int s = ka - 2 * N;
          if (s < -N || s > N) {
            if (std::abs(v) * w > tol)
              throw overflow_error("convolve_fft: mass outside grid range");
            continue;
          }
          cell_a = s + N;
        } else {
          cell_a = ka;
        }
        out[cell_a * nb + unexpo[kb]] = v * w;
      }
    detail::shave_negatives(out, 1e-10 * (1.0 + l1_norm(phi1) * l1_norm(phi2)));
    return StepFn(phi1.model(), std::move(out), std::nullopt);
  }

  throw validation_error("convolve_fft: unsupported model kind");
}

// Convolution with the integration restricted to G0:
// phi1 *_{G0} phi2(g') = sum over g'' in G0 of phi1(g'') phi2(g''^-1 g') w.
// The result lives on G0; it is returned as a StepFn on the ambient model
// supported on G0 cells.
inline StepFn convolve_in_subgroup(const StepFn &phi1, const StepFn &phi2,
                                   const CosetStructure &cs) {
  if (!phi1.same_model(phi2))
    throw model_mismatch_error("convolve_in_subgroup: model mismatch");
  if (cs.model != phi1.model())
    throw model_mismatch_error("convolve_in_subgroup: coset structure for a different model");
  const auto &model = *phi1.model();
  std::vector<double> out(model.size(), 0.0);
  for (int gpp : cs.g0_cells) {
    const double a = phi1[gpp];
    if (a == 0.0)
      continue;
    const int gi = model.inverse(gpp);
    for (int gp : cs.g0_cells) {
      const int src = model.compose(gi, gp);
      if (src == GroupModel::kOverflow)
        continue;
      out[gp] += a * phi2[src];
    }
  }
  const double w = model.weight();
  for (double &v : out)
    v *= w;
  return StepFn(phi1.model(), std::move(out), std::nullopt);
}

// Per-coset contributions of Lemma-style coset decomposition at g' in G0:
// term(g'') = (L_{g''} phi1) *_{G0} (R_{g''} phi2)(g'' g' g''^-1),
// one term per coset representative g''.  The terms sum to the full
// convolution at g'.
inline std::vector<double> coset_decompose_convolution(const StepFn &phi1, const StepFn &phi2,
                                                       const CosetStructure &cs, int g_prime) {
  if (!phi1.same_model(phi2))
    throw model_mismatch_error("coset_decompose_convolution: model mismatch");
  if (cs.model != phi1.model())
    throw model_mismatch_error("coset_decompose_convolution: coset structure mismatch");
  const auto &model = *phi1.model();
  if (cs.coset_of[g_prime] != cs.coset_of[model.identity()])
    throw validation_error("coset_decompose_convolution: g' must lie in G0");
  const double w = model.weight();
  std::vector<double> terms;
  terms.reserve(cs.num_cosets());
  for (int rep : cs.coset_reps) {
    const int rep_inv = model.inverse(rep);
    // conjugate g'' g' g''^-1 stays in G0
    const int conj = model.compose(model.compose(rep, g_prime), rep_inv);
    double acc = 0.0;
    for (int c : cs.g0_cells) {
      const int a_src = model.compose(rep_inv, c); // L_{g''} phi1(c)
      if (a_src == GroupModel::kOverflow)
        continue;
      const double a = phi1[a_src];
      if (a == 0.0)
        continue;
      const int mid = model.compose(model.inverse(c), conj);
      if (mid == GroupModel::kOverflow)
        continue;
      const int b_src = model.compose(mid, rep); // R_{g''} phi2(c^-1 conj)
      if (b_src == GroupModel::kOverflow)
        continue;
      acc += a * phi2[b_src];
    }
    terms.push_back(acc * w);
  }
  return terms;
}

// Exact continuum tent psi_{I1,I2}(x) = phi_(I1) * phi_(I2) (x) on R.
inline double tent_value(double i1, double i2, double x, bool auto_swap = true) {
  if (i1 > i2) {
    if (!auto_swap)
      throw validation_error("tent_value: I1 > I2");
    std::swap(i1, i2);
  }
  const double c = (i2 - i1) / 2.0, cp = (i1 + i2) / 2.0;
  const double a = std::abs(x);
  if (a <= c)
    return i1;
  if (a <= cp)
    return cp - a;
  return 0.0;
}

} // namespace convlab

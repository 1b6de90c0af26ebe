#include "itp/bm_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "itp/par.hpp"

namespace itp::bm {

namespace {

using measures::IntegralValue;
using measures::ProductMeasure;
using measures::QuadratureCfg;

constexpr std::uint64_t kPushStream = 0x9e3779b97f4a7c15ull;

}  // namespace

StabSeqPtr choose_f(const chars::ProductState& s, int depth) {
  return tensor::StabSeq::budget_selected(s.measure,
                                          measures::BudgetKind::Quartic, depth);
}

std::vector<TailRow> verify_tail(const StabSeqPtr& f,
                                 const chars::ProductState& s, int k_lo,
                                 int k_hi, int n,
                                 const QuadratureCfg& cfg) {
  if (!f) throw InvalidArgError("tail check needs a level sequence");
  if (k_lo < 1 || k_hi < k_lo)
    throw InvalidArgError("k range must satisfy 1 <= k_lo <= k_hi");
  if (n < k_hi) throw InvalidArgError("last coordinate must be >= k_hi");
  if (const int md = f->materialized_depth(); md > 0 && md < n)
    throw InvalidArgError("level sequence not materialized through the last coordinate");
  cfg.validate();

  std::vector<double> factor(static_cast<std::size_t>(n), 1.0);
  std::vector<double> err(static_cast<std::size_t>(n), 0.0);
  par::guarded_for(n, [&](std::int64_t idx) {
    const int j = static_cast<int>(idx) + 1;
    const IntegralValue iv =
        measures::integrate(f->slot_fn(j), s.measure.at(j), cfg);
    factor[static_cast<std::size_t>(idx)] =
        std::clamp(iv.value.real(), 0.0, 1.0);
    err[static_cast<std::size_t>(idx)] = iv.err;
  });

  // suffix products and error sums, descending so each k reuses the next
  std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 1.0);
  std::vector<double> errsum(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = n; j >= 1; --j) {
    suffix[j - 1] = factor[j - 1] * suffix[j];
    errsum[j - 1] = err[j - 1] + errsum[j];
  }

  std::vector<TailRow> rows;
  rows.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (int k = k_lo; k <= k_hi; ++k) {
    TailRow r;
    r.k = k;
    r.residual = 1.0 - suffix[k - 1];
    r.bound = k >= 2 ? 1.0 / (k - 1) : 1.0;
    r.slack = errsum[k - 1];
    r.pass = r.residual <= r.bound + r.slack;
    rows.push_back(r);
  }
  return rows;
}

std::vector<McRow> mc_verify(const chars::ProductState& s,
                             const std::vector<std::map<int, double>>& xs,
                             int samples, std::uint64_t seed, int depth,
                             const QuadratureCfg& cfg) {
  if (samples < 1) throw InvalidArgError("samples must be >= 1");
  if (depth < 1) throw InvalidArgError("depth must be >= 1");
  for (const auto& x : xs)
    if (!x.empty() && x.rbegin()->first > depth)
      throw InvalidArgError("point support exceeds the sample depth");
  cfg.validate();

  const std::vector<double> y =
      measures::sample_matrix(s.measure, depth, samples, seed);
  const double radius = 4.0 / std::sqrt(static_cast<double>(samples));

  std::vector<McRow> rows;
  rows.reserve(xs.size());
  for (const auto& x : xs) {
    McRow r;
    r.x = x;
    const ComplexDisk closed = chars::state_eval(s, x, cfg);
    r.closed = closed.value;
    r.closed_err = closed.radius;
    const Cplx total = par::blocked_sum(samples, [&](std::int64_t row) {
      double phase = 0.0;
      for (const auto& [slot, xv] : x)
        phase += xv * y[static_cast<std::size_t>(row) * depth + (slot - 1)];
      return std::polar(1.0, phase);
    });
    r.estimate = total / static_cast<double>(samples);
    r.radius = radius;
    r.pass = std::abs(r.closed - r.estimate) <= r.radius + r.closed_err;
    rows.push_back(std::move(r));
  }
  return rows;
}

DecompositionReport decompose(const chars::ProductState& s,
                              const DecomposeCfg& cfg) {
  if (cfg.depth < 1) throw InvalidArgError("depth must be >= 1");
  if (cfg.push_elems < 0 || cfg.push_samples < 1)
    throw InvalidArgError("pushforward stage needs nonnegative element count and samples >= 1");
  DecompositionReport rep;
  rep.measure_key = s.measure.key();
  rep.depth = cfg.depth;
  rep.seed = cfg.seed;
  rep.samples = cfg.samples;

  auto record = [&rep](const char* stage, const std::exception& e) {
    if (rep.error.empty())
      rep.error = std::string(stage) + ": " + e.what();
  };

  StabSeqPtr f;
  try {
    f = choose_f(s, std::max(cfg.depth, cfg.tail_n));
    const auto& lv = f->prefix_levels();
    rep.levels.assign(lv.begin(), lv.end());
    rep.levels_pass = true;
  } catch (const Error& e) {
    record("levels", e);
  }

  if (f) {
    try {
      rep.tail = verify_tail(f, s, cfg.k_lo, cfg.k_hi, cfg.tail_n, cfg.quad);
      rep.tail_pass = std::all_of(rep.tail.begin(), rep.tail.end(),
                                  [](const TailRow& r) { return r.pass; });
    } catch (const Error& e) {
      record("tail", e);
    }
  }

  try {
    rep.mc = mc_verify(s, cfg.points, cfg.samples, cfg.seed, cfg.depth,
                       cfg.quad);
    rep.mc_pass = std::all_of(rep.mc.begin(), rep.mc.end(),
                              [](const McRow& r) { return r.pass; });
  } catch (const Error& e) {
    record("mc", e);
  }

  // pushforward spot check: the sample average of the character values
  // gamma(y_r, 1)[A] over rows y_r ~ mu must match <Omega, pi(A) Omega>
  // for finite-window elements A
  try {
    const StabSeqPtr base = f ? f : tensor::StabSeq::constant_level(1);
    const std::uint64_t push_seed = cfg.seed ^ kPushStream;
    const double radius =
        4.0 / std::sqrt(static_cast<double>(cfg.push_samples));
    bool all = true;
    for (int i = 1; i <= cfg.push_elems; ++i) {
      tensor::ElemTensor a;
      for (int j = 1; j <= i; ++j) a.devs[j] = fnalg::make_bump(j).fn;
      const tensor::TensorElem elem = tensor::TensorElem::of(a);

      PushRow row;
      row.elem = i;
      Cplx closed{1.0, 0.0};
      double cerr = 0.0;
      for (int j = 1; j <= i; ++j) {
        const IntegralValue iv = measures::integrate(
            fnalg::make_bump(j).fn, s.measure.at(j), cfg.quad);
        cerr = cerr * std::abs(iv.value) + std::abs(closed) * iv.err +
               cerr * iv.err;
        closed *= iv.value;
      }
      row.closed = closed;
      row.closed_err = cerr;
      const Cplx total =
          par::blocked_sum(cfg.push_samples, [&](std::int64_t r) {
            const chars::Character gamma = chars::Character::make(
                chars::PointSeq::sampled(s.measure, push_seed,
                                         static_cast<std::uint64_t>(r)),
                1.0, base);
            return chars::char_eval(gamma, elem, cfg.depth).value;
          });
      row.estimate = total / static_cast<double>(cfg.push_samples);
      row.radius = radius;
      row.pass = std::abs(row.closed - row.estimate) <= row.radius + cerr;
      all = all && row.pass;
      rep.push.push_back(std::move(row));
    }
    rep.push_pass = all;
  } catch (const Error& e) {
    record("push", e);
  }

  rep.pass = rep.levels_pass && rep.tail_pass && rep.mc_pass && rep.push_pass;
  return rep;
}

}  // namespace itp::bm

#pragma once

// Decomposition pipeline for product states: select a stabilizing level
// sequence from the summable-deficit budget, verify the tail condition
// against the 1/(k-1) envelope, Monte-Carlo-verify the transform identity
// against closed forms, and spot-check the character pushforward.  Every
// stage reports pass/fail; a failing stage never aborts the report.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "itp/chars_states.hpp"

namespace itp::bm {

using fnalg::Cplx;
using tensor::StabSeqPtr;

// least levels under the quartic budget, materialized through depth
StabSeqPtr choose_f(const chars::ProductState& s, int depth);

// r_k = 1 - prod_{j=k}^{N} integral(f_j dmu_j) against the bound 1/(k-1);
// slack is the accumulated quadrature error of the suffix product
struct TailRow {
  int k = 0;
  double residual = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
};

std::vector<TailRow> verify_tail(const StabSeqPtr& f,
                                 const chars::ProductState& s, int k_lo,
                                 int k_hi, int n,
                                 const measures::QuadratureCfg& cfg = {});

// one transform point: closed value against the sample mean of e^{i<x,Y>}
struct McRow {
  std::map<int, double> x;
  Cplx closed{0.0, 0.0};
  double closed_err = 0.0;
  Cplx estimate{0.0, 0.0};
  double radius = 0.0;
  bool pass = false;
};

// one shared sample matrix for every point, so estimate(-x) is exactly the
// conjugate of estimate(x)
std::vector<McRow> mc_verify(const chars::ProductState& s,
                             const std::vector<std::map<int, double>>& xs,
                             int samples, std::uint64_t seed, int depth,
                             const measures::QuadratureCfg& cfg = {});

struct DecomposeCfg {
  int depth = 64;       // sample depth and level materialization floor
  int tail_n = 200;     // last coordinate of the tail residual products
  int k_lo = 2;
  int k_hi = 10;
  int samples = 20000;  // transform MC rows
  int push_elems = 4;   // window elements for the pushforward spot check
  int push_samples = 20000;
  std::uint64_t seed = 1;
  std::vector<std::map<int, double>> points;
  measures::QuadratureCfg quad;
};

struct PushRow {
  int elem = 0;  // window element with bump deviations on slots 1..elem
  Cplx closed{0.0, 0.0};
  double closed_err = 0.0;
  Cplx estimate{0.0, 0.0};
  double radius = 0.0;
  bool pass = false;
};

struct DecompositionReport {
  std::string measure_key;
  int depth = 0;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<int> levels;
  std::vector<TailRow> tail;
  std::vector<McRow> mc;
  std::vector<PushRow> push;
  bool levels_pass = false;
  bool tail_pass = false;
  bool mc_pass = false;
  bool push_pass = false;
  bool pass = false;
  std::string error;  // first stage failure, empty when clean
};

DecompositionReport decompose(const chars::ProductState& s,
                              const DecomposeCfg& cfg = {});

}  // namespace itp::bm

#include "itp/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "json.hpp"

namespace itp::tensor {

namespace {

constexpr double kZeroCoeff = 1e-300;

// Whether the measure's support sits exactly inside the plateau [-k, k],
// making the slot deficit literally zero (never true for Gaussian).
bool deficit_exactly_zero(const measures::Measure1D& m, int k) {
  switch (m.kind()) {
    case measures::MKind::Gaussian:
      return false;
    case measures::MKind::Uniform:
    case measures::MKind::Density:
      return m.lo() >= -static_cast<double>(k) &&
             m.hi() <= static_cast<double>(k);
  }
  return false;
}

std::string join_levels(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

TailDeficit TailDeficit::combined(const TailDeficit& o) const {
  if (kind == Kind::Divergent || o.kind == Kind::Divergent)
    return divergent();
  if (kind == Kind::Unknown || o.kind == Kind::Unknown) return unknown();
  if (kind == Kind::Zero && o.kind == Kind::Zero) return zero();
  return bounded(bound + o.bound);
}

TailDeficit TailDeficit::scaled(int l) const {
  if (l < 1) throw InvalidArgError("deficit exponent must be >= 1");
  if (kind == Kind::Bounded) return bounded(bound * l);
  return *this;
}

std::shared_ptr<const StabSeq> StabSeq::constant_level(int level) {
  return periodic({}, {level});
}

std::shared_ptr<const StabSeq> StabSeq::periodic(std::vector<int> prefix,
                                                 std::vector<int> cycle) {
  if (cycle.empty())
    throw InvalidArgError("level sequence needs a repeating cycle");
  for (int k : prefix)
    if (k < 1) throw InvalidLevelError("levels must be >= 1");
  for (int k : cycle)
    if (k < 1) throw InvalidLevelError("levels must be >= 1");
  auto s = std::shared_ptr<StabSeq>(new StabSeq);
  s->periodic_ = true;
  s->prefix_ = std::move(prefix);
  s->cycle_ = std::move(cycle);
  s->key_ = "S[" + join_levels(s->prefix_) + "|" + join_levels(s->cycle_) + "]";
  return s;
}

std::shared_ptr<const StabSeq> StabSeq::budget_selected(
    const measures::ProductMeasure& mu, measures::BudgetKind budget,
    int depth) {
  auto s = std::shared_ptr<StabSeq>(new StabSeq);
  s->periodic_ = false;
  s->prefix_ = measures::select_levels(mu, budget, depth);
  s->selected_ = true;
  s->mu_ = mu;
  s->budget_kind_ = budget;
  s->key_ = std::string("B[") +
            (budget == measures::BudgetKind::Pow2 ? "p2" : "q4") + ":" +
            std::to_string(depth) + "|" + mu.key() + "]";
  return s;
}

int StabSeq::level(int n) const {
  if (n < 1) throw InvalidArgError("slot indices are 1-based");
  const auto p = static_cast<int>(prefix_.size());
  if (n <= p) return prefix_[static_cast<std::size_t>(n - 1)];
  if (periodic_)
    return cycle_[static_cast<std::size_t>(n - p - 1) % cycle_.size()];
  throw DepthExceededError("level sequence materialized to depth " +
                           std::to_string(p) + "; slot " + std::to_string(n) +
                           " requested");
}

int StabSeq::materialized_depth() const {
  return periodic_ ? 0 : static_cast<int>(prefix_.size());
}

int StabSeq::level_floor_beyond(int from) const {
  int floor = INT32_MAX;
  if (periodic_) {
    for (std::size_t i = static_cast<std::size_t>(std::max(from, 0));
         i < prefix_.size(); ++i)
      floor = std::min(floor, prefix_[i]);
    for (int k : cycle_) floor = std::min(floor, k);
    return floor;
  }
  const int d = static_cast<int>(prefix_.size());
  // Budgets strictly decrease, so level(n + L) >= level(n) for slots with
  // the same coordinate measure; the last full cycle bounds everything
  // past the materialized range.
  const int L = mu_.cycle_len();
  int beyond_floor = 1;
  if (d - L >= mu_.prefix_len()) {
    beyond_floor = INT32_MAX;
    for (int i = d - L; i < d; ++i)
      beyond_floor = std::min(beyond_floor, prefix_[static_cast<std::size_t>(i)]);
  }
  floor = beyond_floor;
  for (int i = std::max(from, 0); i < d; ++i)
    floor = std::min(floor, prefix_[static_cast<std::size_t>(i)]);
  return floor;
}

bool StabSeq::selected_for(const measures::ProductMeasure& mu) const {
  return selected_ && mu_ == mu;
}

TailDeficit StabSeq::deficit_beyond(const measures::ProductMeasure& mu,
                                    int beyond) const {
  if (beyond < 0) throw InvalidArgError("deficit start must be >= 0");
  const auto def_at = [&](int n) {
    return 1.0 - measures::plateau_mass(mu.at(n), level(n));
  };
  if (!periodic_) {
    if (selected_for(mu))
      return TailDeficit::bounded(
          measures::budget_tail_sum(budget_kind_, beyond));
    // Foreign measure: exact over the materialized range, then a floor
    // argument for the rest.
    const int d = static_cast<int>(prefix_.size());
    double finite = 0.0;
    for (int n = beyond + 1; n <= d; ++n) finite += def_at(n);
    const int fl = level_floor_beyond(d);
    bool covered = true;
    for (int n = d + 1; n <= mu.prefix_len() && covered; ++n)
      covered = deficit_exactly_zero(mu.at(n), fl);
    const int base = std::max(d, mu.prefix_len());
    for (int j = 1; j <= mu.cycle_len() && covered; ++j)
      covered = deficit_exactly_zero(mu.at(base + j), fl);
    if (!covered) return TailDeficit::unknown();
    return finite > 0.0 ? TailDeficit::bounded(finite + 1e-12)
                        : TailDeficit::zero();
  }
  const long L = std::lcm(static_cast<long>(cycle_.size()),
                          static_cast<long>(mu.cycle_len()));
  if (L > 4096) return TailDeficit::unknown();
  const int start =
      std::max(beyond, std::max(static_cast<int>(prefix_.size()),
                                mu.prefix_len()));
  double finite = 0.0;
  for (int n = beyond + 1; n <= start; ++n) finite += def_at(n);
  bool cycle_zero = true;
  for (int n = start + 1; n <= start + static_cast<int>(L); ++n)
    cycle_zero = cycle_zero && deficit_exactly_zero(mu.at(n), level(n));
  if (!cycle_zero) return TailDeficit::divergent();
  return finite > 0.0 ? TailDeficit::bounded(finite + 1e-12)
                      : TailDeficit::zero();
}

TailSpec TailSpec::power(StabSeqPtr base, int exp) {
  if (!base) throw InvalidArgError("tail needs a level sequence");
  if (exp < 1) throw InvalidArgError("tail exponent must be >= 1");
  TailSpec t;
  t.factors_.push_back({std::move(base), exp});
  t.rebuild_key();
  return t;
}

void TailSpec::rebuild_key() {
  std::sort(factors_.begin(), factors_.end(),
            [](const TailFactor& a, const TailFactor& b) {
              return a.base->key() < b.base->key();
            });
  if (factors_.empty()) {
    key_ = "1";
    return;
  }
  key_.clear();
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) key_ += "*";
    key_ += factors_[i].base->key() + "^" + std::to_string(factors_[i].exp);
  }
}

int TailSpec::exponent_on(const std::string& base_key) const {
  for (const auto& f : factors_)
    if (f.base->key() == base_key) return f.exp;
  return 0;
}

int TailSpec::total_exponent() const {
  int t = 0;
  for (const auto& f : factors_) t += f.exp;
  return t;
}

ScalarFn TailSpec::slot_fn(int n) const {
  if (factors_.empty()) return ScalarFn::constant(Cplx{1.0, 0.0});
  ScalarFn out = fnalg::sf_pow(factors_[0].base->slot_fn(n), factors_[0].exp);
  for (std::size_t i = 1; i < factors_.size(); ++i)
    out = fnalg::multiply(
        out, fnalg::sf_pow(factors_[i].base->slot_fn(n), factors_[i].exp));
  return out;
}

double TailSpec::slot_value(int n, double x) const {
  double v = 1.0;
  for (const auto& f : factors_) {
    const double b = fnalg::bump_value(f.base->level(n), x);
    v *= ipow(b, f.exp);
  }
  return v;
}

TailDeficit TailSpec::deficit_beyond(const measures::ProductMeasure& mu,
                                     int beyond) const {
  TailDeficit d = TailDeficit::zero();
  for (const auto& f : factors_)
    d = d.combined(f.base->deficit_beyond(mu, beyond).scaled(f.exp));
  return d;
}

TailSpec operator*(const TailSpec& a, const TailSpec& b) {
  TailSpec t;
  t.factors_ = a.factors_;
  for (const auto& f : b.factors_) {
    bool merged = false;
    for (auto& g : t.factors_)
      if (g.base->key() == f.base->key()) {
        g.exp += f.exp;
        merged = true;
        break;
      }
    if (!merged) t.factors_.push_back(f);
  }
  t.rebuild_key();
  return t;
}

namespace {

// true if the term survives (nonzero); canonicalizes in place
bool normalize_term(ElemTensor& t) {
  if (std::abs(t.coeff) < kZeroCoeff) return false;
  for (const auto& [n, fn] : t.devs) {
    if (n < 1) throw InvalidArgError("slot indices are 1-based");
    if (fn.is_zero()) return false;
  }
  // scalar extraction: leading coefficient of each deviation moves into
  // the term coefficient
  for (auto& [n, fn] : t.devs) {
    Cplx s = fn.constant_part();
    bool from_const = true;
    if (std::abs(s) <= fnalg::kNormTol && !fn.terms().empty()) {
      s = fn.terms()[0].coeff;
      from_const = false;
    }
    if (std::abs(s) >= kZeroCoeff && s != Cplx{1.0, 0.0}) {
      const Cplx inv = Cplx{1.0, 0.0} / s;
      Cplx c = fn.constant_part() * inv;
      std::vector<fnalg::ScalarFn::Term> terms = fn.terms();
      for (auto& tm : terms) tm.coeff *= inv;
      // pin the extracted coefficient to exactly one so repeated
      // normalization is a no-op (s / s can round below 1)
      if (from_const)
        c = Cplx{1.0, 0.0};
      else
        terms[0].coeff = Cplx{1.0, 0.0};
      fn = fnalg::ScalarFn::make(c, std::move(terms));
      t.coeff *= s;
    }
  }
  // deviations matching the tail are no deviation at all
  for (auto it = t.devs.begin(); it != t.devs.end();) {
    if (fnalg::sf_equal(it->second, t.tail.slot_fn(it->first)))
      it = t.devs.erase(it);
    else
      ++it;
  }
  return std::abs(t.coeff) >= kZeroCoeff;
}

std::string term_signature(const ElemTensor& t) {
  std::string s = t.tail.key();
  for (const auto& [n, fn] : t.devs)
    s += "#" + std::to_string(n) + "=" + fn.canonical_key();
  return s;
}

bool same_devs(const ElemTensor& a, const ElemTensor& b, double tol) {
  if (a.devs.size() != b.devs.size()) return false;
  auto ia = a.devs.begin();
  auto ib = b.devs.begin();
  for (; ia != a.devs.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!fnalg::sf_equal(ia->second, ib->second, tol)) return false;
  }
  return true;
}

}  // namespace

TensorElem TensorElem::of(ElemTensor t) { return make({std::move(t)}); }

TensorElem TensorElem::make(std::vector<ElemTensor> terms) {
  std::vector<ElemTensor> kept;
  kept.reserve(terms.size());
  for (auto& t : terms)
    if (normalize_term(t)) kept.push_back(std::move(t));
  std::vector<std::string> sig(kept.size());
  std::vector<std::size_t> order(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    sig[i] = term_signature(kept[i]);
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sig[a] < sig[b];
  });
  TensorElem out;
  for (std::size_t oi : order) {
    ElemTensor& t = kept[oi];
    if (!out.terms_.empty()) {
      ElemTensor& prev = out.terms_.back();
      if (prev.tail == t.tail && same_devs(prev, t, fnalg::kNormTol)) {
        prev.coeff += t.coeff;
        continue;
      }
    }
    out.terms_.push_back(std::move(t));
  }
  std::erase_if(out.terms_, [](const ElemTensor& t) {
    return std::abs(t.coeff) < fnalg::kNormTol;
  });
  return out;
}

const TailSpec* TensorElem::homogeneous_class() const {
  if (terms_.empty()) return nullptr;
  for (const auto& t : terms_)
    if (!(t.tail == terms_[0].tail)) return nullptr;
  return &terms_[0].tail;
}

TensorElem tensor_add(const TensorElem& a, const TensorElem& b) {
  std::vector<ElemTensor> all = a.terms();
  all.insert(all.end(), b.terms().begin(), b.terms().end());
  return TensorElem::make(std::move(all));
}

TensorElem tensor_scale(const TensorElem& a, Cplx s) {
  std::vector<ElemTensor> all = a.terms();
  for (auto& t : all) t.coeff *= s;
  return TensorElem::make(std::move(all));
}

TensorElem tensor_sub(const TensorElem& a, const TensorElem& b) {
  return tensor_add(a, tensor_scale(b, Cplx{-1.0, 0.0}));
}

TensorElem tensor_mul(const TensorElem& a, const TensorElem& b) {
  std::vector<ElemTensor> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) {
      ElemTensor p;
      p.tail = ta.tail * tb.tail;
      p.coeff = ta.coeff * tb.coeff;
      for (const auto& [n, fn] : ta.devs)
        p.devs[n] = fnalg::multiply(fn, tb.slot_fn(n));
      for (const auto& [n, fn] : tb.devs)
        if (!p.devs.count(n)) p.devs[n] = fnalg::multiply(ta.slot_fn(n), fn);
      out.push_back(std::move(p));
    }
  return TensorElem::make(std::move(out));
}

TensorElem tensor_adjoint(const TensorElem& a) {
  std::vector<ElemTensor> out = a.terms();
  for (auto& t : out) {
    t.coeff = std::conj(t.coeff);
    for (auto& [n, fn] : t.devs) fn = fnalg::conj_fn(fn);
  }
  return TensorElem::make(std::move(out));
}

bool tensor_equal(const TensorElem& a, const TensorElem& b, double tol) {
  if (a.terms().size() != b.terms().size()) return false;
  std::vector<bool> used(b.terms().size(), false);
  for (const auto& ta : a.terms()) {
    bool found = false;
    for (std::size_t j = 0; j < b.terms().size() && !found; ++j) {
      if (used[j]) continue;
      const auto& tb = b.terms()[j];
      if (!(ta.tail == tb.tail)) continue;
      if (!same_devs(ta, tb, tol)) continue;
      if (std::abs(ta.coeff - tb.coeff) > tol) continue;
      used[j] = true;
      found = true;
    }
    if (!found) return false;
  }
  return true;
}

bool equivalent(const ElemTensor& x, const ElemTensor& y) {
  return x.tail == y.tail;
}

namespace {

FiniteTensor finite_normalize(FiniteTensor f) {
  std::erase_if(f.terms, [](const FiniteTensor::Term& t) {
    return std::abs(t.coeff) < fnalg::kNormTol;
  });
  std::vector<std::string> sig(f.terms.size());
  for (std::size_t i = 0; i < f.terms.size(); ++i)
    for (const auto& fn : f.terms[i].fns) sig[i] += fn.canonical_key() + "#";
  std::vector<std::size_t> order(f.terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
  FiniteTensor out;
  out.slots = f.slots;
  for (std::size_t oi : order) {
    auto& t = f.terms[oi];
    if (!out.terms.empty()) {
      auto& prev = out.terms.back();
      bool same = prev.fns.size() == t.fns.size();
      for (std::size_t k = 0; same && k < t.fns.size(); ++k)
        same = fnalg::sf_equal(prev.fns[k], t.fns[k]);
      if (same) {
        prev.coeff += t.coeff;
        continue;
      }
    }
    out.terms.push_back(std::move(t));
  }
  std::erase_if(out.terms, [](const FiniteTensor::Term& t) {
    return std::abs(t.coeff) < fnalg::kNormTol;
  });
  return out;
}

}  // namespace

FiniteTensor window_project(const TensorElem& a, const ElemTensor& base,
                            std::vector<int> window) {
  std::sort(window.begin(), window.end());
  window.erase(std::unique(window.begin(), window.end()), window.end());
  if (!window.empty() && window.front() < 1)
    throw InvalidArgError("slot indices are 1-based");
  FiniteTensor out;
  out.slots = window;
  for (const auto& t : a.terms()) {
    if (!(t.tail == base.tail)) continue;  // other classes project to 0
    for (const auto& [n, fn] : t.devs)
      if (!std::binary_search(window.begin(), window.end(), n))
        throw WindowTooSmallError("deviation at slot " + std::to_string(n) +
                                  " lies outside the window; enlarge it");
    FiniteTensor::Term ft;
    ft.coeff = t.coeff;  // off-window slots contract to their value at 0 = 1
    ft.fns.reserve(window.size());
    for (int n : window) ft.fns.push_back(t.slot_fn(n));
    out.terms.push_back(std::move(ft));
  }
  return finite_normalize(std::move(out));
}

FiniteTensor finite_mul(const FiniteTensor& a, const FiniteTensor& b) {
  if (a.slots != b.slots)
    throw InvalidArgError("finite tensors live on different windows");
  FiniteTensor out;
  out.slots = a.slots;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      FiniteTensor::Term t;
      t.coeff = ta.coeff * tb.coeff;
      t.fns.reserve(a.slots.size());
      for (std::size_t k = 0; k < a.slots.size(); ++k)
        t.fns.push_back(fnalg::multiply(ta.fns[k], tb.fns[k]));
      out.terms.push_back(std::move(t));
    }
  return finite_normalize(std::move(out));
}

bool finite_equal(const FiniteTensor& a, const FiniteTensor& b, double tol) {
  if (a.slots != b.slots) return false;
  if (a.terms.size() != b.terms.size()) return false;
  std::vector<bool> used(b.terms.size(), false);
  for (const auto& ta : a.terms) {
    bool found = false;
    for (std::size_t j = 0; j < b.terms.size() && !found; ++j) {
      if (used[j]) continue;
      const auto& tb = b.terms[j];
      if (std::abs(ta.coeff - tb.coeff) > tol) continue;
      bool same = true;
      for (std::size_t k = 0; same && k < ta.fns.size(); ++k)
        same = fnalg::sf_equal(ta.fns[k], tb.fns[k], tol);
      if (!same) continue;
      used[j] = true;
      found = true;
    }
    if (!found) return false;
  }
  return true;
}

bool regroup_check(const TensorElem& a, const TensorElem& b, int cut,
                   double tol) {
  if (cut < 1) throw InvalidArgError("cut must be >= 1");
  const TailSpec* ca = a.homogeneous_class();
  const TailSpec* cb = b.homogeneous_class();
  if (!ca || !cb)
    throw InvalidArgError("regroup check needs homogeneous inputs");
  std::vector<int> window(static_cast<std::size_t>(cut));
  for (int i = 0; i < cut; ++i) window[static_cast<std::size_t>(i)] = i + 1;
  ElemTensor base_a, base_b, base_ab;
  base_a.tail = *ca;
  base_b.tail = *cb;
  base_ab.tail = *ca * *cb;
  const FiniteTensor joint = window_project(tensor_mul(a, b), base_ab, window);
  const FiniteTensor split = finite_mul(window_project(a, base_a, window),
                                        window_project(b, base_b, window));
  return finite_equal(joint, split, tol);
}

TensorElem eta_act(const std::map<int, double>& x, const TensorElem& a) {
  std::vector<ElemTensor> out = a.terms();
  for (auto& t : out)
    for (const auto& [j, xj] : x) {
      if (j < 1) throw InvalidArgError("slot indices are 1-based");
      if (xj == 0.0) continue;
      t.devs[j] = fnalg::modulate(xj, t.slot_fn(j));
    }
  return TensorElem::make(std::move(out));
}

double cross_norm_upper(const TensorElem& a, int refinement) {
  double total = 0.0;
  for (const auto& t : a.terms()) {
    double prod = std::abs(t.coeff);
    for (const auto& [n, fn] : t.devs)
      prod *= fnalg::sup_norm_bound(fn, refinement).hi;
    total += prod;
  }
  return total;
}

// ---------------------------------------------------------------- JSON --

namespace {

using nlohmann::json;

json cplx_to(const Cplx& c) { return json::array({c.real(), c.imag()}); }

Cplx cplx_from(const json& j) {
  return Cplx{j.at(0).get<double>(), j.at(1).get<double>()};
}

json pp_to(const fnalg::PiecewisePoly& p) {
  json pieces = json::array();
  for (const auto& poly : p.pieces()) pieces.push_back(poly.c);
  return json{{"breaks", p.breaks()}, {"pieces", pieces}};
}

fnalg::PiecewisePoly pp_from(const json& j) {
  std::vector<fnalg::Poly> pieces;
  for (const auto& coeffs : j.at("pieces"))
    pieces.push_back(fnalg::Poly{coeffs.get<std::vector<double>>()});
  return fnalg::PiecewisePoly::make(j.at("breaks").get<std::vector<double>>(),
                                    std::move(pieces));
}

json sf_to(const ScalarFn& f) {
  json terms = json::array();
  for (const auto& t : f.terms())
    terms.push_back(json{
        {"coeff", cplx_to(t.coeff)}, {"env", pp_to(t.env)}, {"freq", t.freq}});
  return json{{"constant", cplx_to(f.constant_part())}, {"terms", terms}};
}

ScalarFn sf_from(const json& j) {
  std::vector<ScalarFn::Term> terms;
  for (const auto& t : j.at("terms")) {
    ScalarFn::Term term;
    term.freq = t.at("freq").get<double>();
    term.env = pp_from(t.at("env"));
    term.coeff = cplx_from(t.at("coeff"));
    terms.push_back(std::move(term));
  }
  return ScalarFn::make(cplx_from(j.at("constant")), std::move(terms));
}

json measure_to(const measures::Measure1D& m) {
  switch (m.kind()) {
    case measures::MKind::Gaussian:
      return json{{"kind", "gaussian"}, {"sigma", m.sigma()}};
    case measures::MKind::Uniform:
      return json{{"kind", "uniform"}, {"a", m.lo()}, {"b", m.hi()}};
    case measures::MKind::Density:
      return json{{"kind", "density"}, {"pdf", pp_to(m.pdf())}};
  }
  throw InvalidArgError("unknown measure kind");
}

measures::Measure1D measure_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian")
    return measures::Measure1D::gaussian(j.at("sigma").get<double>());
  if (kind == "uniform")
    return measures::Measure1D::uniform(j.at("a").get<double>(),
                                        j.at("b").get<double>());
  if (kind == "density")
    return measures::Measure1D::density(pp_from(j.at("pdf")));
  throw InvalidArgError("unknown measure kind: " + kind);
}

json pm_to(const measures::ProductMeasure& mu) {
  json prefix = json::array();
  for (int n = 1; n <= mu.prefix_len(); ++n) prefix.push_back(measure_to(mu.at(n)));
  json cycle = json::array();
  for (int j2 = 1; j2 <= mu.cycle_len(); ++j2)
    cycle.push_back(measure_to(mu.at(mu.prefix_len() + j2)));
  return json{{"cycle", cycle}, {"prefix", prefix}};
}

measures::ProductMeasure pm_from(const json& j) {
  std::vector<measures::Measure1D> prefix, cycle;
  for (const auto& m : j.at("prefix")) prefix.push_back(measure_from(m));
  for (const auto& m : j.at("cycle")) cycle.push_back(measure_from(m));
  return measures::ProductMeasure::of(std::move(prefix), std::move(cycle));
}

json seq_to(const StabSeq& s) {
  if (s.is_periodic())
    return json{{"cycle", s.cycle_levels()},
                {"kind", "periodic"},
                {"prefix", s.prefix_levels()}};
  return json{{"budget", s.budget() == measures::BudgetKind::Pow2 ? "pow2"
                                                                  : "quartic"},
              {"depth", s.materialized_depth()},
              {"kind", "selected"},
              {"measure", pm_to(*s.selection_measure())}};
}

StabSeqPtr seq_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "periodic")
    return StabSeq::periodic(j.at("prefix").get<std::vector<int>>(),
                             j.at("cycle").get<std::vector<int>>());
  if (kind == "selected") {
    const std::string b = j.at("budget").get<std::string>();
    return StabSeq::budget_selected(pm_from(j.at("measure")),
                                    b == "pow2"
                                        ? measures::BudgetKind::Pow2
                                        : measures::BudgetKind::Quartic,
                                    j.at("depth").get<int>());
  }
  throw InvalidArgError("unknown level sequence kind: " + kind);
}

}  // namespace

std::string tensor_to_json(const TensorElem& a) {
  json terms = json::array();
  for (const auto& t : a.terms()) {
    json tail = json::array();
    for (const auto& f : t.tail.factors())
      tail.push_back(json{{"exp", f.exp}, {"seq", seq_to(*f.base)}});
    json devs = json::object();
    for (const auto& [n, fn] : t.devs) devs[std::to_string(n)] = sf_to(fn);
    terms.push_back(
        json{{"coeff", cplx_to(t.coeff)}, {"devs", devs}, {"tail", tail}});
  }
  return json{{"terms", terms}}.dump();
}

TensorElem tensor_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<ElemTensor> terms;
  for (const auto& t : j.at("terms")) {
    ElemTensor e;
    e.coeff = cplx_from(t.at("coeff"));
    for (const auto& f : t.at("tail"))
      e.tail = e.tail * TailSpec::power(seq_from(f.at("seq")),
                                        f.at("exp").get<int>());
    for (const auto& [k, v] : t.at("devs").items())
      e.devs[std::stoi(k)] = sf_from(v);
    terms.push_back(std::move(e));
  }
  return TensorElem::make(std::move(terms));
}

std::string scalar_fn_to_json(const ScalarFn& f) { return sf_to(f).dump(); }

ScalarFn scalar_fn_from_json(const std::string& text) {
  return sf_from(json::parse(text));
}

}  // namespace itp::tensor

#include "itp/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "itp/bm_pipeline.hpp"
#include "itp/config.hpp"
#include "itp/rep_engine.hpp"
#include "itp/report_io.hpp"
#include "itp/rng.hpp"

namespace itp::cli {

namespace {

using config::Config;
using fnalg::Cplx;
using fnalg::ScalarFn;
using measures::Measure1D;
using measures::ProductMeasure;
using tensor::StabSeqPtr;
using tensor::TailSpec;

struct Ctx {
  Config cfg;
  std::string sub;
  std::uint64_t seed = 1;
  int depth = 64;
  int samples = 20000;
  double tol = 1e-10;
  std::string out = "out";
  measures::QuadratureCfg quad;
};

// deterministic keyed draw stream for the property sweeps
struct Draw {
  std::uint64_t seed;
  std::uint64_t counter = 0;
  double u01() { return rng::uniform01(seed, 0, counter++); }
  double sym() { return 2.0 * u01() - 1.0; }
  int below(int n) { return static_cast<int>(u01() * n) % n; }
};

Measure1D measure_from(const Config& c) {
  const std::string kind = c.get_str("measure", "kind", "gaussian");
  if (kind == "gaussian")
    return Measure1D::gaussian(c.get_double("measure", "sigma", 1.0));
  if (kind == "uniform")
    return Measure1D::uniform(c.require_double("measure", "a"),
                              c.require_double("measure", "b"));
  if (kind == "density") {
    const int bline = c.line_of("measure", "breaks");
    const auto btok = config::split_fields(c.require("measure", "breaks"));
    if (btok.size() < 2)
      throw ConfigError("density needs at least two breaks", bline);
    std::vector<double> breaks;
    for (const auto& t : btok)
      breaks.push_back(config::to_double(t, "measure.breaks", bline));
    std::vector<fnalg::Poly> pieces;
    for (std::size_t p = 0; p + 1 < btok.size(); ++p) {
      const std::string key = "piece" + std::to_string(p);
      const int pline = c.line_of("measure", key);
      fnalg::Poly poly;
      for (const auto& t : config::split_fields(c.require("measure", key)))
        poly.c.push_back(config::to_double(t, "measure." + key, pline));
      pieces.push_back(std::move(poly));
    }
    return Measure1D::density(
        fnalg::PiecewisePoly::make(std::move(breaks), std::move(pieces)));
  }
  throw ConfigError("unknown measure kind '" + kind + "'",
                    c.line_of("measure", "kind"));
}

StabSeqPtr levels_from(const Config& c, const ProductMeasure& mu,
                       int depth) {
  const std::string rule = c.get_str("levels", "rule", "auto");
  if (rule == "auto")
    return tensor::StabSeq::budget_selected(
        mu, measures::BudgetKind::Quartic, depth);
  if (rule == "constant")
    return tensor::StabSeq::constant_level(c.get_int("levels", "value", 1));
  if (rule == "periodic") {
    auto ints = [&c](const char* key, bool required) {
      std::vector<int> v;
      if (!required && !c.has("levels", key)) return v;
      const int line = c.line_of("levels", key);
      for (const auto& t : config::split_fields(c.require("levels", key)))
        v.push_back(config::to_int(t, std::string("levels.") + key, line));
      return v;
    };
    return tensor::StabSeq::periodic(ints("prefix", false),
                                     ints("cycle", true));
  }
  throw ConfigError("unknown levels rule '" + rule + "'",
                    c.line_of("levels", "rule"));
}

std::map<int, double> parse_point(const std::string& v,
                                  const std::string& what, int line) {
  std::map<int, double> x;
  for (const auto& tok : config::split_fields(v)) {
    const std::size_t pos = tok.find(':');
    if (pos == std::string::npos)
      throw ConfigError("expected slot:value fields in " + what, line);
    const int slot = config::to_int(tok.substr(0, pos), what, line);
    const double val = config::to_double(tok.substr(pos + 1), what, line);
    if (slot < 1) throw ConfigError("slots are 1-based in " + what, line);
    if (!x.emplace(slot, val).second)
      throw ConfigError("duplicate slot in " + what, line);
  }
  return x;
}

std::vector<std::pair<std::string, std::map<int, double>>> points_from(
    const Config& c) {
  std::vector<std::pair<std::string, std::map<int, double>>> out;
  for (const auto& key : c.keys("points"))
    out.emplace_back(key, parse_point(*c.get("points", key), "points." + key,
                                      c.line_of("points", key)));
  return out;
}

std::string out_path(const Ctx& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out) / name).string();
}

const char* deficit_name(const tensor::TailDeficit& d) {
  switch (d.kind) {
    case tensor::TailDeficit::Kind::Zero:
      return "zero";
    case tensor::TailDeficit::Kind::Bounded:
      return "bounded";
    case tensor::TailDeficit::Kind::Divergent:
      return "divergent";
    default:
      return "unknown";
  }
}

ScalarFn rand_fn(Draw& d) {
  const int nterms = 1 + d.below(2);
  ScalarFn f = ScalarFn::constant(Cplx{0.6 * d.sym(), 0.6 * d.sym()});
  for (int t = 0; t < nterms; ++t) {
    const ScalarFn env = fnalg::make_bump(1 + d.below(3)).fn;
    const double freq = 0.5 * (d.below(13) - 6);
    const ScalarFn osc = freq == 0.0 ? env : fnalg::modulate(freq, env);
    f = fnalg::sf_add(f, fnalg::sf_scale(osc, Cplx{d.sym(), d.sym()}));
  }
  return f;
}

tensor::TensorElem rand_tensor(Draw& d, const StabSeqPtr& f) {
  std::vector<tensor::ElemTensor> ts;
  const int nterms = 1 + d.below(2);
  for (int t = 0; t < nterms; ++t) {
    tensor::ElemTensor e;
    e.tail = TailSpec::power(f, 1 + d.below(2));
    const int ndevs = d.below(3);
    for (int k = 0; k < ndevs; ++k) e.devs[1 + d.below(4)] = rand_fn(d);
    e.coeff = Cplx{d.sym(), d.sym()};
    ts.push_back(std::move(e));
  }
  return tensor::TensorElem::make(std::move(ts));
}

int run_algebra(const Ctx& ctx) {
  Draw d{ctx.seed};
  const StabSeqPtr f = tensor::StabSeq::constant_level(2);
  report::Csv csv({"check", "cases", "failures", "pass"});
  int bad = 0;
  auto add = [&](const char* name, int cases, int failures) {
    csv.row({name, std::to_string(cases), std::to_string(failures),
             failures == 0 ? "1" : "0"});
    std::printf("%s: %s (%d cases)\n", name,
                failures == 0 ? "pass" : "FAIL", cases);
    bad += failures;
  };

  {
    int fails = 0;
    for (int i = 0; i < 200; ++i) {
      const int n = 1 + d.below(19);
      const int m = n + 1 + d.below(20 - n);
      const ScalarFn vn = fnalg::make_bump(n).fn;
      const ScalarFn vm = fnalg::make_bump(m).fn;
      if (!fnalg::sf_equal(fnalg::multiply(vn, vm), vn, 1e-12)) ++fails;
    }
    add("bump-semigroup", 200, fails);
  }
  {
    int fails = 0;
    for (int i = 0; i < 60; ++i) {
      const ScalarFn a = rand_fn(d), b = rand_fn(d);
      if (!fnalg::sf_equal(fnalg::multiply(a, b), fnalg::multiply(b, a),
                           1e-12))
        ++fails;
    }
    add("mul-commutes", 60, fails);
  }
  {
    int fails = 0;
    for (int i = 0; i < 40; ++i) {
      const ScalarFn a = rand_fn(d), b = rand_fn(d), c = rand_fn(d);
      if (!fnalg::sf_equal(fnalg::multiply(fnalg::multiply(a, b), c),
                           fnalg::multiply(a, fnalg::multiply(b, c)),
                           1e-12))
        ++fails;
    }
    add("mul-associates", 40, fails);
  }
  {
    int fails = 0;
    for (int i = 0; i < 40; ++i) {
      const tensor::TensorElem a = rand_tensor(d, f), b = rand_tensor(d, f);
      if (!tensor::tensor_equal(
              tensor::tensor_adjoint(tensor::tensor_mul(a, b)),
              tensor::tensor_mul(tensor::tensor_adjoint(b),
                                 tensor::tensor_adjoint(a)),
              1e-12))
        ++fails;
    }
    add("adjoint-antimultiplicative", 40, fails);
  }
  {
    int fails = 0;
    for (int i = 0; i < 60; ++i) {
      const int k = 1 + d.below(3), l = 1 + d.below(3);
      tensor::ElemTensor a, b;
      a.tail = TailSpec::power(f, k);
      b.tail = TailSpec::power(f, l);
      const tensor::TensorElem p = tensor::tensor_mul(
          tensor::TensorElem::of(a), tensor::TensorElem::of(b));
      const TailSpec* cls = p.homogeneous_class();
      if (!cls || !cls->single() || cls->single()->exp != k + l) ++fails;
    }
    add("tail-grading", 60, fails);
  }

  report::write_file(out_path(ctx, "checks.csv"), csv.text());
  std::printf("algebra-check: %s\n", bad == 0 ? "pass" : "FAIL");
  return bad == 0 ? 0 : 1;
}

int run_bochner(const Ctx& ctx) {
  const ProductMeasure mu = ProductMeasure::iid(measure_from(ctx.cfg));
  const auto labeled = points_from(ctx.cfg);
  std::vector<std::map<int, double>> xs;
  for (const auto& [label, x] : labeled) xs.push_back(x);
  const chars::ProductState st{mu};
  const auto rows =
      bm::mc_verify(st, xs, ctx.samples, ctx.seed, ctx.depth, ctx.quad);

  report::Csv state({"point", "closed_re", "closed_im", "closed_err",
                     "estimate_re", "estimate_im", "radius", "pass"});
  report::Csv charfn({"point", "slot", "x", "re", "im"});
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string& label = labeled[i].first;
    state.row({label, report::fmt(r.closed.real()),
               report::fmt(r.closed.imag()), report::fmt(r.closed_err),
               report::fmt(r.estimate.real()), report::fmt(r.estimate.imag()),
               report::fmt(r.radius), r.pass ? "1" : "0"});
    for (const auto& [slot, xv] : r.x) {
      const Cplx cf = measures::char_fn(mu.at(slot), xv, ctx.quad);
      charfn.row({label, std::to_string(slot), report::fmt(xv),
                  report::fmt(cf.real()), report::fmt(cf.imag())});
    }
    all = all && r.pass;
    std::printf("%s: %s\n", label.c_str(), r.pass ? "pass" : "FAIL");
  }
  report::write_file(out_path(ctx, "state.csv"), state.text());
  report::write_file(out_path(ctx, "charfn.csv"), charfn.text());
  std::printf("bochner: %s\n", all ? "pass" : "FAIL");
  return all ? 0 : 1;
}

int run_excess(const Ctx& ctx) {
  const ProductMeasure mu = ProductMeasure::iid(measure_from(ctx.cfg));
  const StabSeqPtr f = levels_from(ctx.cfg, mu, ctx.depth);
  const int ell = ctx.cfg.get_int("excess", "ell", 1);
  const int n_max = ctx.cfg.get_int("excess", "n_max", 16);
  const int k_max = ctx.cfg.get_int("excess", "k", 8);
  const rep::VecElem omega = rep::VecElem::vacuum(mu);

  const rep::ExcessResult ex =
      rep::excess_elem(f, ell, omega, omega, n_max, ctx.depth, ctx.quad);
  report::Csv exc({"n", "re", "im", "lo", "hi", "radius"});
  for (const auto& r : ex.rows)
    exc.row({std::to_string(r.n), report::fmt(r.value.real()),
             report::fmt(r.value.imag()), report::fmt(r.lo),
             report::fmt(r.hi), report::fmt(r.radius)});
  report::write_file(out_path(ctx, "excess.csv"), exc.text());

  const auto partials =
      rep::f_elem_partials_vacuum(f, ell, 1, mu, ctx.depth, ctx.quad);
  report::Csv par({"n", "partial"});
  bool monotone = true;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    par.row({std::to_string(i + 1), report::fmt(partials[i])});
    if (i > 0 && partials[i] > partials[i - 1]) monotone = false;
  }
  report::write_file(out_path(ctx, "partials.csv"), par.text());

  const rep::ProjReport pr =
      rep::p_elem(f, omega, omega, k_max, ctx.depth, ctx.quad);
  report::Csv proj({"re", "im", "radius", "ell_spread", "idem_gap", "slack"});
  proj.row({report::fmt(pr.value.value.real()),
            report::fmt(pr.value.value.imag()), report::fmt(pr.value.radius),
            report::fmt(pr.ell_spread), report::fmt(pr.idem_gap),
            report::fmt(pr.slack)});
  report::write_file(out_path(ctx, "proj.csv"), proj.text());

  const bool ok = monotone && pr.ell_spread <= pr.slack + 1e-12 &&
                  pr.idem_gap <= pr.slack + 1e-12;
  std::printf("limit: %s %s radius %s tail %s\n",
              report::fmt(ex.limit.value.real()).c_str(),
              report::fmt(ex.limit.value.imag()).c_str(),
              report::fmt(ex.limit.radius).c_str(), deficit_name(ex.tail));
  std::printf("excess: %s\n", ok ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

int run_decompose(const Ctx& ctx) {
  const ProductMeasure mu = ProductMeasure::iid(measure_from(ctx.cfg));
  const chars::ProductState st{mu};
  bm::DecomposeCfg dc;
  dc.depth = ctx.depth;
  dc.samples = ctx.samples;
  dc.seed = ctx.seed;
  dc.quad = ctx.quad;
  dc.tail_n = ctx.cfg.get_int("decompose", "tail_n", 200);
  dc.k_lo = ctx.cfg.get_int("decompose", "k_lo", 2);
  dc.k_hi = ctx.cfg.get_int("decompose", "k_hi", 10);
  dc.push_elems = ctx.cfg.get_int("decompose", "push_elems", 4);
  dc.push_samples = ctx.cfg.get_int("decompose", "push_samples", 20000);
  const auto labeled = points_from(ctx.cfg);
  for (const auto& [label, x] : labeled) dc.points.push_back(x);

  const bm::DecompositionReport rep = bm::decompose(st, dc);

  report::write_file(out_path(ctx, "report.json"),
                     report::decomposition_to_json(rep));
  report::Csv tail({"k", "residual", "bound", "slack", "pass"});
  for (const auto& r : rep.tail)
    tail.row({std::to_string(r.k), report::fmt(r.residual),
              report::fmt(r.bound), report::fmt(r.slack),
              r.pass ? "1" : "0"});
  report::write_file(out_path(ctx, "tail.csv"), tail.text());
  report::write_file(out_path(ctx, "tail.gp"),
                     report::residual_plot_script("tail.csv"));

  report::Csv mc({"point", "closed_re", "closed_im", "closed_err",
                  "estimate_re", "estimate_im", "radius", "pass"});
  for (std::size_t i = 0; i < rep.mc.size(); ++i) {
    const auto& r = rep.mc[i];
    mc.row({labeled[i].first, report::fmt(r.closed.real()),
            report::fmt(r.closed.imag()), report::fmt(r.closed_err),
            report::fmt(r.estimate.real()), report::fmt(r.estimate.imag()),
            report::fmt(r.radius), r.pass ? "1" : "0"});
  }
  report::write_file(out_path(ctx, "mc.csv"), mc.text());

  report::Csv push({"elem", "closed_re", "closed_im", "closed_err",
                    "estimate_re", "estimate_im", "radius", "pass"});
  for (const auto& r : rep.push)
    push.row({std::to_string(r.elem), report::fmt(r.closed.real()),
              report::fmt(r.closed.imag()), report::fmt(r.closed_err),
              report::fmt(r.estimate.real()), report::fmt(r.estimate.imag()),
              report::fmt(r.radius), r.pass ? "1" : "0"});
  report::write_file(out_path(ctx, "push.csv"), push.text());

  std::printf("levels: %s\n", rep.levels_pass ? "pass" : "FAIL");
  std::printf("tail: %s\n", rep.tail_pass ? "pass" : "FAIL");
  std::printf("mc: %s\n", rep.mc_pass ? "pass" : "FAIL");
  std::printf("push: %s\n", rep.push_pass ? "pass" : "FAIL");
  if (!rep.error.empty()) std::printf("error: %s\n", rep.error.c_str());
  std::printf("decompose: %s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}

int run_spectrum(const Ctx& ctx) {
  const ProductMeasure mu = ProductMeasure::iid(measure_from(ctx.cfg));
  const StabSeqPtr f = levels_from(ctx.cfg, mu, ctx.depth);
  const int ell = ctx.cfg.get_int("character", "ell", 1);
  const std::string rule = ctx.cfg.get_str("character", "points", "plateau");
  const double cval = ctx.cfg.get_double("character", "c", 0.0);

  chars::PointSeq point = chars::PointSeq::in_plateau();
  if (rule == "constant") {
    point = chars::PointSeq::constant(cval);
  } else if (rule == "sampled") {
    point = chars::PointSeq::sampled(mu, ctx.seed);
  } else if (rule != "plateau") {
    throw ConfigError("unknown character points rule '" + rule + "'",
                      ctx.cfg.line_of("character", "points"));
  }

  std::vector<double> grid;
  if (auto gv = ctx.cfg.get("character", "qgrid")) {
    const int line = ctx.cfg.line_of("character", "qgrid");
    for (const auto& t : config::split_fields(*gv))
      grid.push_back(config::to_double(t, "character.qgrid", line));
  } else if (ctx.cfg.has("character", "q")) {
    grid.push_back(ctx.cfg.require_double("character", "q"));
  } else {
    for (int i = 1; i <= 50; ++i) grid.push_back(0.02 * i);
  }

  // tail polynomial p(F) = F - F^2 over the base
  tensor::ElemTensor t1, t2;
  t1.tail = TailSpec::power(f, 1);
  t2.tail = TailSpec::power(f, 2);
  t2.coeff = Cplx{-1.0, 0.0};
  const tensor::TensorElem a = tensor::TensorElem::make({t1, t2});

  std::vector<chars::Character> cs;
  for (const double q : grid)
    cs.push_back(chars::Character::make(point, q, f));

  report::Csv sweep({"q", "re", "im", "radius", "degenerate", "undetermined",
                     "excess"});
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const chars::CharEval ev = chars::char_eval(cs[i], a, ctx.depth);
    const rep::CharExcess qx = rep::excess_char(cs[i], ell, ctx.depth);
    sweep.row({report::fmt(grid[i]), report::fmt(ev.value.real()),
               report::fmt(ev.value.imag()), report::fmt(ev.radius),
               ev.degenerate ? "1" : "0", ev.undetermined ? "1" : "0",
               report::fmt(qx.value)});
  }
  report::write_file(out_path(ctx, "sweep.csv"), sweep.text());

  const chars::TailVerdict tv =
      chars::tail_product(point, *f, ell, 1, ctx.depth);
  const char* kind =
      tv.kind == chars::TailVerdict::Kind::Limit
          ? "limit"
          : tv.kind == chars::TailVerdict::Kind::InNf ? "exceptional"
                                                      : "undetermined";
  report::Csv verdict({"start", "kind", "lo", "hi", "deficit", "scanned"});
  verdict.row({"1", kind, report::fmt(tv.bracket.lo),
               report::fmt(tv.bracket.hi), report::fmt(tv.deficit),
               std::to_string(tv.scanned)});
  report::write_file(out_path(ctx, "verdict.csv"), verdict.text());

  const double lower = chars::char_sup_lower(a, cs, ctx.depth);
  const double upper = tensor::cross_norm_upper(a);
  const bool ok = lower <= upper + 1e-12;
  report::Csv norms({"lower", "upper", "pass"});
  norms.row({report::fmt(lower), report::fmt(upper), ok ? "1" : "0"});
  report::write_file(out_path(ctx, "norms.csv"), norms.text());

  std::printf("verdict: %s\n", kind);
  std::printf("norm lower %s upper %s\n", report::fmt(lower).c_str(),
              report::fmt(upper).c_str());
  std::printf("spectrum: %s\n", ok ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

int dispatch(Ctx& ctx) {
  ctx.quad.abs_tol = ctx.tol;
  ctx.quad.validate();
  if (ctx.depth < 1) throw InvalidArgError("depth must be >= 1");
  if (ctx.samples < 1) throw InvalidArgError("samples must be >= 1");
  std::filesystem::create_directories(ctx.out);
  if (ctx.sub == "algebra-check") {
    const int rc = run_algebra(ctx);
    ctx.cfg.finish();
    return rc;
  }
  // construct-before-run order keeps config errors on exit code 2
  int rc;
  if (ctx.sub == "bochner") {
    rc = run_bochner(ctx);
  } else if (ctx.sub == "excess") {
    rc = run_excess(ctx);
  } else if (ctx.sub == "decompose") {
    rc = run_decompose(ctx);
  } else if (ctx.sub == "spectrum") {
    rc = run_spectrum(ctx);
  } else {
    throw ConfigError("unknown subcommand '" + ctx.sub + "'",
                      ctx.cfg.line_of("run", "subcommand"));
  }
  ctx.cfg.finish();
  return rc;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"stabilized tensor product experiment driver"};
  std::string config_path;
  std::uint64_t seed = 0;
  int depth = 0, samples = 0;
  double tol = 0.0;
  std::string out;
  app.add_option("--config", config_path, "run config file")->required();
  auto* o_seed = app.add_option("--seed", seed, "override [run] seed");
  auto* o_depth = app.add_option("--depth", depth, "override [run] depth");
  auto* o_tol = app.add_option("--tol", tol, "override [run] tol");
  auto* o_samples =
      app.add_option("--samples", samples, "override [run] samples");
  auto* o_out = app.add_option("--out", out, "override [run] out directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Ctx ctx;
    ctx.cfg = Config::parse_file(config_path);
    ctx.sub = ctx.cfg.require("run", "subcommand");
    ctx.seed = ctx.cfg.get_u64("run", "seed", 1);
    ctx.depth = ctx.cfg.get_int("run", "depth", 64);
    ctx.samples = ctx.cfg.get_int("run", "samples", 20000);
    ctx.tol = ctx.cfg.get_double("run", "tol", 1e-10);
    ctx.out = ctx.cfg.get_str("run", "out", "out");
    if (o_seed->count()) ctx.seed = seed;
    if (o_depth->count()) ctx.depth = depth;
    if (o_tol->count()) ctx.tol = tol;
    if (o_samples->count()) ctx.samples = samples;
    if (o_out->count()) ctx.out = out;
    return dispatch(ctx);
  } catch (const InvalidArgError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace itp::cli

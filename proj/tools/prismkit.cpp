#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "prismkit/dmodules.hpp"
#include "prismkit/envelope.hpp"
#include "prismkit/ext_complex.hpp"
#include "prismkit/qprism.hpp"
#include "prismkit/sample.hpp"
#include "prismkit/suite.hpp"
#include "prismkit/witt.hpp"

using namespace prismkit;

namespace {

enum Exit { Pass = 0, Violation = 1, BadInput = 2, NoPrecision = 3 };

struct Options {
  i64 p = 2;
  int N = 6, M = 8, Q = 16, depth = 0;
  std::optional<std::uint64_t> seed;
  int samples = 0;
  std::string in;
  bool human = false;
};

std::uint64_t effective_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* s = std::getenv("PRISMKIT_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      fail(ErrorKind::InputError, "PRISMKIT_SEED is not an unsigned integer");
    }
  }
  return 0;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InputError, what + " is not valid JSON: " + e.what());
  }
}

// Inline JSON, or the contents of a file, or stdin for "-".
json load(const std::string& arg, const std::string& what) {
  if (arg.empty()) fail(ErrorKind::InputError, what + " is required");
  if (arg == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return parse_json(ss.str(), what);
  }
  const char c = arg.front();
  if (c == '{' || c == '[' || c == '"' || c == '-' || (c >= '0' && c <= '9')) return parse_json(arg, what);
  std::ifstream f(arg);
  if (!f) {
    if (arg.find('/') != std::string::npos || arg.find('.') != std::string::npos)
      fail(ErrorKind::InputError, "cannot read " + arg);
    return parse_json(arg, what);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_json(ss.str(), what);
}

RingSpec flag_spec(const Options& o, bool u, bool q) {
  RingSpec s;
  s.p = o.p;
  s.N = o.N;
  if (u) s.M = o.M;
  if (q) s.Q = o.Q, s.depth = o.depth;
  return s;
}

Elem element_in(const json& j, const RingPtr& R) {
  if (j.is_object()) {
    Elem x = elem_from_json(j);
    if (!(x.ring()->spec() == R->spec())) fail(ErrorKind::InputError, "element lives in a different ring");
    return Elem(R, x.coeffs(), x.prec());
  }
  return elem_from_json(j, R);
}

json envelope_matrix(const Matrix<EnvElem>& X) {
  json rows = json::array();
  for (int i = 0; i < X.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < X.cols(); ++j) r.push_back(to_json(X(i, j)));
    rows.push_back(r);
  }
  return rows;
}

// Output envelope shared by every subcommand.
json wrap(const std::string& command, bool ok, json result) {
  return json{{"schema", "1"}, {"command", command}, {"ok", ok}, {"result", std::move(result)}};
}

void render_human(const json& out, std::ostream& os) {
  os << out["command"].get<std::string>() << ": " << (out.value("ok", false) ? "PASS" : "FAIL") << "\n";
  auto table = [&](const json& checks, const std::string& prefix) {
    for (const auto& c : checks) {
      std::string v = c.value("pass", false) ? "pass" : (c.value("required", true) ? "FAIL" : "advisory-fail");
      os << "  " << prefix << c.value("id", c.value("name", std::string("?"))) << "  " << v << "\n";
      if (c.contains("witness") && !c["witness"].is_null()) os << "      witness: " << c["witness"].dump() << "\n";
    }
  };
  if (out.contains("suites")) {
    for (const auto& s : out["suites"]) table(s["checks"], s["suite"].get<std::string>() + "/");
    return;
  }
  const json& r = out["result"];
  if (r.is_object() && r.contains("report") && r["report"].is_array()) {
    table(r["report"], "");
    return;
  }
  os << r.dump(2) << "\n";
}

int emit(const json& out, const Options& o) {
  if (o.human) render_human(out, std::cout);
  else std::cout << out.dump() << "\n";
  return out.value("ok", false) ? Pass : Violation;
}

json report_json(const CheckReport& r) { return to_json(r); }

int cmd_witt(const Options& o, int len) {
  auto w = witt_structure_polys(o.p, len);
  return emit(wrap("witt polys", true, polys_to_json(*w)), o);
}

int cmd_delta(const Options& o, const std::string& ring) {
  RingPtr R = Ring::make(ring.empty() ? flag_spec(o, false, false) : spec_from_json(load(ring, "--ring")));
  const std::uint64_t seed = suite_seed(effective_seed(o), "delta-check");
  const int n = o.samples > 0 ? o.samples : 200;
  const int g = R->N() - 1;
  const i64 p = R->p();
  SuiteReport rep("delta check");
  json wit;
  bool ok = true;
  for (int k = 0; k < n && ok; ++k) {
    auto rng = sample::stream(seed, std::uint64_t(k));
    Elem x = sample::random_elem(R, rng), y = sample::random_elem(R, rng);
    Elem dx = delta_of(x), dy = delta_of(y);
    bool prod = eq_at(delta_of(x * y), x.pow(std::uint64_t(p)) * dy + y.pow(std::uint64_t(p)) * dx + (dx * dy).scaled(p), g);
    bool sum = eq_at(delta_of(x + y), dx + dy + delta_sum_correction(x, y), g);
    bool frob = eq_at(x.phi(), x.pow(std::uint64_t(p)), 1);
    if (!(prod && sum && frob)) ok = false, wit = {{"sample", k}, {"x", to_json(x)}, {"y", to_json(y)}};
  }
  rep.add("delta_laws", ok, wit);
  json res = rep.to_json();
  res["ring"] = spec_to_json(R->spec());
  res["seed"] = effective_seed(o);
  json out = wrap("delta check", rep.ok(), res);
  out["suites"] = json::array({rep.to_json()});
  return emit(out, o);
}

int cmd_qlog(const Options& o, const std::string& xs, std::optional<int> terms) {
  QContext C = q_context(o.p, o.N, o.depth, o.Q);
  Elem x = element_in(load(xs, "--x"), C.ring());
  QLogResult r = q_log(C, x, terms);
  return emit(wrap("qlog", true, to_json(r)), o);
}

int cmd_envelope(const Options& o, const std::string& prism, const std::string& xs, int K, std::optional<int> cert) {
  Prism P = prism_from_json(load(prism, "--prism"));
  Elem x = element_in(load(xs, "--x"), P.A);
  Envelope E = envelope_build(P, x, K);
  json res = envelope_to_json(E);
  if (cert) res["nilpotence"] = to_json(nilpotence_certify(E, *cert));
  return emit(wrap("envelope", true, res), o);
}

int cmd_window(const Options& o, const std::string& action, const std::string& schedule) {
  json in = load(o.in, "--in");
  const std::string cmd = "window " + action;
  if (action == "lift") {
    Window<Elem> M = window_from_json(in.at("source")), N = window_from_json(in.at("target"));
    const RingPtr& A = M.frame->one.ring();
    Prism P = prism_from_json(in.at("source").at("frame").at("prism"));
    Elem x = element_in(in.at("x"), A);
    Envelope E = envelope_build(P, x, in.value("depth", 3));
    auto FB = envelope_frame(E, M.frame);
    auto kappa = envelope_inclusion(E, M.frame, FB);
    EMatrix alpha = ematrix_from_json(in.at("alpha"), A);
    Matrix<EnvElem> a(alpha.rows(), alpha.cols(), FB->one.zero_like());
    for (int i = 0; i < alpha.rows(); ++i)
      for (int j = 0; j < alpha.cols(); ++j) a(i, j) = E.lift(alpha(i, j));
    Schedule s = schedule == "iterate" ? Schedule::Iterate : Schedule::Series;
    auto res = lift_window_hom(base_change(M, kappa), base_change(N, kappa), a, envelope_kernel(E), s);
    return emit(wrap(cmd, true,
                     {{"value", envelope_matrix(res.value)}, {"iterations", res.iterations}, {"levels", res.levels},
                      {"witness", res.witness}}),
                o);
  }
  Window<Elem> W = window_from_json(in);
  if (action == "check") {
    CheckReport r = window_check(W);
    return emit(wrap(cmd, r.ok(), {{"report", report_json(r).at("axioms")}}), o);
  }
  if (action == "normal") {
    NormalData<Elem> nd = normal_decomposition(W);
    return emit(wrap(cmd, true, {{"P", to_json(nd.P)}, {"r", nd.r}, {"Psi", to_json(nd.Psi)}}), o);
  }
  if (action == "to-bk") {
    BKModule bk = window_to_bk(W);
    return emit(wrap(cmd, true, {{"frame", W.frame->spec}, {"B", to_json(bk.B)}}), o);
  }
  fail(ErrorKind::InputError, "unknown window action " + action);
}

int cmd_bk(const Options& o) {
  json in = load(o.in, "--in");
  Prism P = prism_from_json(in.at("prism"));
  auto F = frame_from_prism(P, Flavor::D);
  BKWindow bw = bk_to_window(F, ematrix_from_json(in.at("B"), P.A));
  CheckReport r = window_check(bw.window);
  return emit(wrap("bk", r.ok(), {{"window", to_json(bw.window)}, {"U", to_json(bw.U)}, {"report", report_json(r).at("axioms")}}),
              o);
}

int cmd_dm(const Options& o, const std::string& action, const std::string& kind, int rank, const std::string& prism) {
  const std::string cmd = "dm " + action;
  if (action == "standard") {
    Prism P = prism.empty() ? crystalline_prism(o.p, o.N) : prism_from_json(load(prism, "--prism"));
    FilteredDM F = standard_module(standard_kind_from_string(kind), P, rank);
    return emit(wrap(cmd, fdm_check(F).ok(), to_json(F)), o);
  }
  json in = load(o.in, "--in");
  if (action == "check") {
    if (in.contains("relations")) {
      CheckReport r = torsion_check(torsion_from_json(in));
      return emit(wrap(cmd, r.ok(), {{"report", report_json(r).at("axioms")}}), o);
    }
    if (in.contains("fil")) {
      CheckReport r = fdm_check(fdm_from_json(in));
      return emit(wrap(cmd, r.ok(), {{"report", report_json(r).at("axioms")}}), o);
    }
    DMReport r = dm_check(dm_from_json(in));
    json res{{"report", report_json(r.report).at("axioms")}};
    if (r.psi) res["psi"] = to_json(*r.psi);
    return emit(wrap(cmd, r.report.ok(), res), o);
  }
  if (action == "dual") return emit(wrap(cmd, true, to_json(dual(dm_from_json(in)))), o);
  if (action == "cokernel") {
    DieudonneModule D1 = dm_from_json(in.at("source")), D2 = dm_from_json(in.at("target"));
    TorsionDM T = isogeny_cokernel(D1, D2, ematrix_from_json(in.at("f"), D2.P.A));
    CheckReport r = torsion_check(T);
    json res = to_json(T);
    res["invariants"] = torsion_invariants(T.Rel);
    res["report"] = report_json(r).at("axioms");
    return emit(wrap(cmd, r.ok(), res), o);
  }
  if (action == "refill") return emit(wrap(cmd, true, to_json(refill_perfect(dm_from_json(in)))), o);
  fail(ErrorKind::InputError, "unknown dm action " + action);
}

std::vector<i64> parse_orders(const std::string& s) {
  std::vector<i64> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorKind::InputError, "bad group order '" + tok + "'");
    }
  }
  if (out.empty()) fail(ErrorKind::InputError, "--group needs at least one order");
  return out;
}

int cmd_ext(const Options& o, const std::string& group, i64 coeff, std::optional<int> prim) {
  if (prim) return emit(wrap("ext", true, to_json(primitive_elements(*prim, o.p))), o);
  ExtGroups e = ext_groups(FiniteAbelianGroup(parse_orders(group)), coeff);
  return emit(wrap("ext", true, to_json(e)), o);
}

int cmd_suite(const Options& o, const std::vector<i64>& primes, const std::vector<std::string>& only, bool strict) {
  RunConfig cfg;
  if (!primes.empty()) cfg.primes = primes;
  cfg.N = o.N;
  cfg.M = o.M;
  cfg.Q = o.Q;
  cfg.depth = o.depth == 0 ? 1 : o.depth;
  cfg.seed = effective_seed(o);
  cfg.samples = o.samples;
  for (i64 p : cfg.primes)
    if (!zpn::is_prime(p)) fail(ErrorKind::InputError, "--p must be prime");
  json out = run_suites(only.empty() ? suite_names() : only, cfg);
  out["ok"] = report_ok(out, strict);
  if (o.human) render_human(out, std::cout);
  else std::cout << out.dump() << "\n";
  return out["ok"].get<bool>() ? Pass : Violation;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::PrecisionExhausted:
    case ErrorKind::FilNotComputable:
    case ErrorKind::TailNotNegligible:
    case ErrorKind::FrontierExceeded:
      return NoPrecision;
    default:
      return BadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prismatic and Witt-vector computations over truncated p-adic rings"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* s, bool precision = true) {
    s->add_option("--p", o.p, "prime");
    if (precision) {
      s->add_option("--N", o.N, "p-adic precision");
      s->add_option("--M", o.M, "u truncation order");
      s->add_option("--Q", o.Q, "(q_s - 1) truncation order");
      s->add_option("--depth", o.depth, "root depth s of q_s");
    }
    s->add_option("--seed", o.seed, "random seed (default: PRISMKIT_SEED or 0)");
    s->add_option("--samples", o.samples, "sample count override");
    s->add_flag("--human", o.human, "render a table instead of JSON");
  };

  int len = 3;
  auto* witt = app.add_subcommand("witt", "Witt vector structure polynomials");
  witt->require_subcommand(1);
  auto* polys = witt->add_subcommand("polys", "emit S and P polynomials");
  common(polys, false);
  polys->add_option("--len", len, "Witt vector length")->check(CLI::Range(1, 5));

  std::string ring;
  auto* delta = app.add_subcommand("delta", "delta-ring laws");
  delta->require_subcommand(1);
  auto* dcheck = delta->add_subcommand("check", "check the delta laws on random pairs");
  common(dcheck);
  dcheck->add_option("--ring", ring, "ring spec JSON (inline or file)");

  std::string xs;
  std::optional<int> terms;
  auto* qlog = app.add_subcommand("qlog", "q-logarithm with convergence certificate");
  common(qlog);
  qlog->add_option("--x", xs, "element JSON")->required();
  qlog->add_option("--terms", terms, "number of summed terms");

  std::string prism;
  int K = 3;
  std::optional<int> certify;
  auto* env = app.add_subcommand("envelope", "prismatic envelope A{x/d}");
  common(env, false);
  env->add_option("--prism", prism, "prism JSON")->required();
  env->add_option("--x", xs, "element JSON")->required();
  env->add_option("--depth", K, "number of generators")->check(CLI::Range(1, 12));
  env->add_option("--certify", certify, "nilpotence target l");

  std::string schedule = "series";
  auto* window = app.add_subcommand("window", "windows over frames");
  window->require_subcommand(1);
  std::vector<CLI::App*> wsubs;
  for (const char* a : {"check", "normal", "to-bk", "lift"}) {
    auto* s = window->add_subcommand(a);
    common(s, false);
    s->add_option("--in", o.in, "window JSON (inline, file or -)")->required();
    if (std::string(a) == "lift") s->add_option("--schedule", schedule)->check(CLI::IsMember({"series", "iterate"}));
    wsubs.push_back(s);
  }

  auto* bk = app.add_subcommand("bk", "minuscule Breuil-Kisin module to window");
  common(bk, false);
  bk->add_option("--in", o.in, "{prism, B} JSON")->required();

  std::string kind = "etale";
  int rank = 1;
  auto* dm = app.add_subcommand("dm", "prismatic Dieudonne modules");
  dm->require_subcommand(1);
  std::vector<CLI::App*> dsubs;
  for (const char* a : {"check", "dual", "cokernel", "standard", "refill"}) {
    auto* s = dm->add_subcommand(a);
    common(s);
    if (std::string(a) == "standard") {
      s->add_option("--kind", kind)->check(CLI::IsMember({"etale", "multiplicative", "qpzp_filtered", "mu_filtered"}));
      s->add_option("--rank", rank)->check(CLI::PositiveNumber);
      s->add_option("--prism", prism, "prism JSON (default crystalline)");
    } else {
      s->add_option("--in", o.in, "module JSON (inline, file or -)")->required();
    }
    dsubs.push_back(s);
  }

  std::string group;
  i64 coeff = 2;
  std::optional<int> primitive;
  auto* ext = app.add_subcommand("ext", "Ext^0 and Ext^1 from low-degree Breen-Deligne terms");
  common(ext, false);
  ext->add_option("--group", group, "cyclic orders, comma separated");
  ext->add_option("--coeff", coeff, "coefficient modulus m");
  ext->add_option("--primitive", primitive, "primitive elements of the exterior algebra of F_p^r instead");

  std::vector<i64> primes;
  std::vector<std::string> only;
  bool strict = false;
  auto* suite = app.add_subcommand("suite", "deterministic property suites");
  suite->add_option("--p", primes, "primes (repeatable; default 2 and 3)");
  suite->add_option("--N", o.N);
  suite->add_option("--M", o.M);
  suite->add_option("--Q", o.Q);
  suite->add_option("--depth", o.depth);
  suite->add_option("--seed", o.seed);
  suite->add_option("--samples", o.samples);
  suite->add_option("--only", only, "run only these suites")->check(CLI::IsMember(suite_names()));
  suite->add_flag("--strict", strict, "advisory checks also decide the exit code");
  suite->add_flag("--human", o.human);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BadInput;
  }

  try {
    if (polys->parsed()) return cmd_witt(o, len);
    if (dcheck->parsed()) return cmd_delta(o, ring);
    if (qlog->parsed()) return cmd_qlog(o, xs, terms);
    if (env->parsed()) return cmd_envelope(o, prism, xs, K, certify);
    for (auto* s : wsubs)
      if (s->parsed()) return cmd_window(o, s->get_name(), schedule);
    if (bk->parsed()) return cmd_bk(o);
    for (auto* s : dsubs)
      if (s->parsed()) return cmd_dm(o, s->get_name(), kind, rank, prism);
    if (ext->parsed()) {
      if (!primitive && group.empty()) fail(ErrorKind::InputError, "ext needs --group or --primitive");
      return cmd_ext(o, group, coeff, primitive);
    }
    if (suite->parsed()) return cmd_suite(o, primes, only, strict);
  } catch (const Error& e) {
    std::cout << json{{"schema", "1"}, {"ok", false}, {"error", kind_name(e.kind())}, {"message", e.what()}}.dump()
              << "\n";
    return exit_for(e.kind());
  } catch (const json::exception& e) {
    std::cout << json{{"schema", "1"}, {"ok", false}, {"error", "InputError"}, {"message", e.what()}}.dump() << "\n";
    return BadInput;
  }
  return BadInput;
}

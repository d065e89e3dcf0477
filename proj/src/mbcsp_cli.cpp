// mbcsp: command-line front end for the streaming Max-CSP toolkit.
//
// Subcommands:
//   alpha     sketching approximability threshold of a symmetric predicate
//   analyze   lambda / gamma / beta / mu of a level distribution
//   gen       seeded hard-instance generators (maxcut, maxdicut, csp, ocsp)
//   estimate  streaming value estimation from a bias sketch
//   assign    majority-plus-perturbation rounding
//   solve     exact optimum by enumeration
//   ordsolve  exact ordering optimum by enumeration
//   repro     run the acceptance battery
//
// Exit codes: 0 success (for `alpha`: certified result), 2 numeric-only
// alpha result, 64 usage error, 65 malformed input data, 69 resource cap
// exceeded. All output is deterministic given the flags; --seed defaults to
// a fixed constant so repeated runs are byte-identical.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance_battery.hpp"
#include "mbcsp/analysis.hpp"
#include "mbcsp/assign.hpp"
#include "mbcsp/core.hpp"
#include "mbcsp/hardgen.hpp"
#include "mbcsp/ocsp.hpp"
#include "mbcsp/sketch.hpp"

namespace {

using namespace mbcsp;

constexpr uint64_t kDefaultSeed = 0xC5B5;

// ---- output records ------------------------------------------------------
// Each command emits an ordered list of fields, rendered either as
// `key value` lines or as a single JSON object with the same key order.
// Floating-point values use 12 significant digits in both formats.

std::string fnum(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

struct Field {
  std::string key;
  std::string text;  // rendering in `key value` lines
  std::string json;  // rendering inside the JSON object
};

Field num_field(const std::string& key, double v) {
  const std::string s = fnum(v);
  return {key, s, s};
}

Field int_field(const std::string& key, long long v) {
  const std::string s = std::to_string(v);
  return {key, s, s};
}

Field bool_field(const std::string& key, bool v) {
  const std::string s = v ? "true" : "false";
  return {key, s, s};
}

Field str_field(const std::string& key, const std::string& v) {
  return {key, v, '"' + v + '"'};
}

Field rat_field(const std::string& key, const Rat& v) {
  const std::string s = rat_str(v);
  return {key, s, '"' + s + '"'};
}

template <typename T, typename Fn>
Field list_field(const std::string& key, const T& xs, Fn&& render) {
  std::string text, json = "[";
  bool first = true;
  for (const auto& x : xs) {
    const std::string s = render(x);
    if (!first) {
      text += ',';
      json += ',';
    }
    text += s;
    json += s;
    first = false;
  }
  json += ']';
  return {key, text, json};
}

Field int_list_field(const std::string& key, const std::vector<int>& xs) {
  return list_field(key, xs, [](int v) { return std::to_string(v); });
}

Field num_list_field(const std::string& key, const std::vector<double>& xs) {
  return list_field(key, xs, [](double v) { return fnum(v); });
}

Field bits_field(const std::string& key, const Assignment& x) {
  std::string bits;
  bits.reserve(x.size());
  for (uint8_t b : x) bits.push_back(b ? '1' : '0');
  return str_field(key, bits);
}

void emit(std::ostream& out, const std::vector<Field>& fields, bool json) {
  if (json) {
    out << '{';
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out << ',';
      out << '"' << fields[i].key << "\":" << fields[i].json;
    }
    out << "}\n";
  } else {
    for (const Field& f : fields) out << f.key << ' ' << f.text << '\n';
  }
}

// ---- shared option state -------------------------------------------------

struct Options {
  int k = 0;
  std::vector<int> S;
  int n = 0;
  long long m = -1;  // estimate stream mode: expected constraint count
  int T = 50;
  int alpha_n = 4;  // hyperedges sampled per round
  int q = 0;        // 0: per-command default
  double eps = 0.1;
  double delta = 0.05;
  double p = -1.0;  // analyze: retention probability (optional)
  uint64_t seed = kDefaultSeed;
  std::string game_case;
  std::string format = "text";
  std::string out_path;
  std::string pred = "mas";
  std::vector<double> dist;
  std::string input = "-";

  bool json() const { return format == "json"; }
};

SymmetricPredicate predicate_from_flags(const Options& opt) {
  if (opt.k < 1) throw ArgumentError("--k is required and must be positive");
  if (opt.S.empty()) throw ArgumentError("--S is required (comma-separated accepted weights)");
  return SymmetricPredicate(opt.k, std::set<int>(opt.S.begin(), opt.S.end()));
}

GameCase case_from_flags(const Options& opt) {
  if (opt.game_case == "yes") return GameCase::Yes;
  if (opt.game_case == "no") return GameCase::No;
  throw ArgumentError("--case must be 'yes' or 'no'");
}

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Full instance file, or (when --n is given) a headerless constraint stream
// with the predicate supplied by --k/--S. The stream mode reuses the file
// parser by prepending the synthesized header.
Instance load_instance(const Options& opt) {
  std::string content = read_all(opt.input);
  if (opt.n > 0) {
    if (opt.k < 1 || opt.S.empty())
      throw ArgumentError("constraint-stream input needs --k and --S alongside --n");
    long long m = 0;
    {
      std::istringstream is(content);
      std::string line;
      int lineno = 0;
      while (detail::next_content_line(is, line, lineno)) ++m;
    }
    if (opt.m >= 0 && opt.m != m)
      throw ParseError("expected " + std::to_string(opt.m) + " constraints, saw " +
                       std::to_string(m));
    std::ostringstream with_header;
    with_header << "mbcsp k=" << opt.k << " n=" << opt.n << " m=" << m << " S=";
    for (size_t i = 0; i < opt.S.size(); ++i) with_header << (i ? "," : "") << opt.S[i];
    with_header << '\n' << content;
    std::istringstream is(with_header.str());
    return parse_instance(is);
  }
  std::istringstream is(content);
  return parse_instance(is);
}

// ---- gen helpers ---------------------------------------------------------

// q-ary lift of f_{S,k}: accept iff the number of nonzero digits lies in S.
// For q = 2 this is exactly the Boolean predicate.
QPredicate lift_predicate(const SymmetricPredicate& f, int q) {
  return QPredicate::from_function(q, f.k, [&](const std::vector<int>& z) {
    int c = 0;
    for (int d : z) c += (d != 0);
    return f.accepts_weight(c);
  });
}

std::string digits_str(const std::vector<int>& xs) {
  std::string s;
  s.reserve(xs.size());
  for (int d : xs) s.push_back(static_cast<char>('0' + d));
  return s;
}

// Base-q layout mirroring the Boolean instance format: the header gains a
// q= field and pattern/planted columns hold base-q digit strings. These
// files are for inspection; only q = 2 output (written in the standard
// Boolean format) is consumed by the other subcommands.
void write_qary_instance(std::ostream& out, const QInstance& inst, const std::set<int>& S,
                         const std::string& trailer) {
  out << "mbcsp k=" << inst.pred.k << " n=" << inst.n << " m=" << inst.cons.size() << " S=";
  bool first = true;
  for (int s : S) {
    if (!first) out << ',';
    out << s;
    first = false;
  }
  out << " q=" << inst.pred.q << '\n';
  const std::string zeros(static_cast<size_t>(inst.pred.k), '0');
  for (const QConstraint& c : inst.cons) {
    out << zeros;
    for (int idx : c.j) out << ' ' << idx;
    out << ' ' << c.w << '\n';
  }
  if (!trailer.empty()) out << "# " << trailer << '\n';
}

// ---- commands ------------------------------------------------------------

int cmd_alpha(const Options& opt) {
  const AlphaResult r = alpha(predicate_from_flags(opt), opt.seed);
  std::vector<Field> fields;
  fields.push_back(int_list_field("S", std::vector<int>(r.S.begin(), r.S.end())));
  fields.push_back(int_field("k", r.k));
  fields.push_back(num_field("alpha", r.alpha));
  fields.push_back(num_list_field("d_star", r.d_star));
  fields.push_back(num_field("p_star", r.p_star));
  fields.push_back(bool_field("certified", r.certified));
  fields.push_back(str_field("method", r.method));
  emit(std::cout, fields, opt.json());
  return r.certified ? 0 : 2;
}

int cmd_analyze(const Options& opt) {
  const SymmetricPredicate f = predicate_from_flags(opt);
  if (static_cast<int>(opt.dist.size()) != f.k + 1)
    throw ArgumentError("--dist needs k+1 comma-separated masses (levels 0..k)");
  validate_distribution(f.k, opt.dist);
  const double mu_v = mu(f.k, opt.dist);
  const BetaResult b = beta_dist(f, opt.dist);
  std::vector<Field> fields;
  fields.push_back(int_field("k", f.k));
  fields.push_back(int_list_field("S", std::vector<int>(f.S.begin(), f.S.end())));
  fields.push_back(num_list_field("dist", opt.dist));
  fields.push_back(num_field("mu", mu_v));
  fields.push_back(num_field("gamma", gamma_mu(f, mu_v)));
  fields.push_back(num_field("beta", b.value));
  fields.push_back(num_field("beta_p", b.p_star));
  if (opt.p >= 0.0) {
    if (opt.p > 1.0) throw ArgumentError("--p must lie in [0,1]");
    fields.push_back(num_field("lambda", lambda(f, opt.dist, opt.p)));
  }
  emit(std::cout, fields, opt.json());
  return 0;
}

int cmd_gen(const std::string& kind, const Options& opt) {
  if (opt.n < 1) throw ArgumentError("gen needs --n");
  const GameCase gc = case_from_flags(opt);
  SplitRng rng(opt.seed, 0);

  std::ostringstream body;
  if (kind == "maxcut" || kind == "maxdicut") {
    const HardInstance h = kind == "maxcut"
                               ? sbpd_to_maxcut(opt.T, opt.alpha_n, opt.n, gc, rng)
                               : sbpd_prime_to_maxdicut(opt.T, opt.alpha_n, opt.n, gc, rng);
    write_instance(body, h.inst, planted_trailer(h.x_star, opt.game_case, opt.seed));
  } else if (kind == "csp") {
    const SymmetricPredicate f = predicate_from_flags(opt);
    const int q = opt.q == 0 ? 2 : opt.q;
    if (q < 2 || q > 10) throw ArgumentError("gen csp needs 2 <= --q <= 10");
    const QPredicate qf = lift_predicate(f, q);
    std::vector<int> base(static_cast<size_t>(f.k), 0);
    for (int t = 0; t < f.min_weight(); ++t) base[static_cast<size_t>(t)] = 1;
    const HardQInstance h = sirsd_to_csp(qf, base, opt.T, opt.alpha_n, opt.n, gc, rng);
    if (q == 2) {
      Instance inst;
      inst.n = h.inst.n;
      inst.pred = f;
      for (const QConstraint& qc : h.inst.cons)
        inst.cons.push_back(Constraint{std::vector<uint8_t>(static_cast<size_t>(f.k), 0),
                                       qc.j, qc.w});
      Assignment xstar(h.x_star.begin(), h.x_star.end());
      write_instance(body, inst, planted_trailer(xstar, opt.game_case, opt.seed));
    } else {
      write_qary_instance(body, h.inst, f.S,
                          "planted " + digits_str(h.x_star) + " case " + opt.game_case +
                              " seed " + std::to_string(opt.seed));
    }
  } else if (kind == "ocsp") {
    const OrderingPredicate Pi =
        opt.pred == "mas" ? OrderingPredicate::mas() : OrderingPredicate::btwn();
    if (opt.pred != "mas" && opt.pred != "btwn")
      throw ArgumentError("gen ocsp needs --pred mas|btwn");
    const int q = opt.q == 0 ? 4 : opt.q;
    const std::vector<int> base = *Pi.accepted.begin();
    const HardOrderingInstance h =
        gen_ocsp_hard(Pi, base, q, opt.T, opt.alpha_n, opt.n, gc, rng);
    write_ordering_instance(body, h.inst, Pi,
                            planted_order_trailer(h.sigma_star, opt.game_case, opt.seed));
  } else {
    throw ArgumentError("gen kind must be one of maxcut, maxdicut, csp, ocsp");
  }

  if (opt.out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(opt.out_path);
    if (!out) throw ResourceError("cannot open output '" + opt.out_path + "'");
    out << body.str();
  }
  return 0;
}

int cmd_estimate(const Options& opt) {
  const Instance inst = load_instance(opt);
  const double est = estimate_value(inst, opt.eps, opt.seed, opt.delta);
  emit(std::cout, {num_field("estimate", est)}, opt.json());
  return 0;
}

int cmd_assign(const Options& opt) {
  const Instance inst = load_instance(opt);
  const AssignResult r = run_assign(inst, opt.seed);
  std::vector<Field> fields;
  fields.push_back(bits_field("x", r.x));
  fields.push_back(rat_field("value", r.achieved));
  fields.push_back(num_field("p_star", r.p_star));
  fields.push_back(num_field("alpha", r.alpha));
  fields.push_back(bool_field("certified", r.certified));
  fields.push_back(str_field("method", r.method));
  emit(std::cout, fields, opt.json());
  return 0;
}

int cmd_solve(const Options& opt) {
  const Instance inst = load_instance(opt);
  const OptResult r = opt_value(inst);
  std::vector<Field> fields;
  fields.push_back(rat_field("value", r.value));
  fields.push_back(bits_field("argmax", r.argmax));
  emit(std::cout, fields, opt.json());
  return 0;
}

int cmd_ordsolve(const Options& opt) {
  const std::string content = read_all(opt.input);
  std::istringstream is(content);
  const ParsedOrderingInstance po = parse_ordering_instance(is);
  const OrdOptResult r = opt_ordvalue(po.inst, po.pred);
  std::vector<Field> fields;
  fields.push_back(rat_field("value", r.value));
  fields.push_back(int_list_field("argmax", r.argmax));
  emit(std::cout, fields, opt.json());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::string gen_kind;

  CLI::App app{"streaming Max-CSP toolkit: thresholds, sketches, generators, solvers"};
  app.require_subcommand(1);

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
  };
  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "64-bit seed")->capture_default_str();
  };
  const auto add_pred_flags = [&](CLI::App* sub, bool required) {
    auto* k = sub->add_option("--k", opt.k, "predicate arity");
    auto* S = sub->add_option("--S", opt.S, "accepted Hamming weights")->delimiter(',');
    if (required) {
      k->required();
      S->required();
    }
  };
  const auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", opt.input, "instance file, or - for stdin")
        ->capture_default_str();
  };

  CLI::App* alpha_cmd = app.add_subcommand("alpha", "sketching approximability threshold");
  add_pred_flags(alpha_cmd, true);
  add_seed(alpha_cmd);
  add_format(alpha_cmd);

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "lambda/gamma/beta/mu of a level distribution");
  add_pred_flags(analyze_cmd, true);
  analyze_cmd->add_option("--dist", opt.dist, "level distribution d_0,...,d_k")
      ->delimiter(',')
      ->required();
  analyze_cmd->add_option("--p", opt.p, "retention probability for lambda");
  add_format(analyze_cmd);

  CLI::App* gen_cmd = app.add_subcommand("gen", "seeded hard-instance generators");
  gen_cmd->add_option("kind", gen_kind, "maxcut | maxdicut | csp | ocsp")->required();
  add_pred_flags(gen_cmd, false);
  gen_cmd->add_option("--n", opt.n, "number of variables")->required();
  gen_cmd->add_option("--T", opt.T, "communication rounds")->capture_default_str();
  gen_cmd->add_option("--alpha-n", opt.alpha_n, "hyperedges sampled per round")
      ->capture_default_str();
  gen_cmd->add_option("--q", opt.q, "alphabet size (csp/ocsp)");
  gen_cmd->add_option("--pred", opt.pred, "ordering predicate (ocsp): mas | btwn")
      ->capture_default_str();
  gen_cmd->add_option("--case", opt.game_case, "yes | no")->required();
  gen_cmd->add_option("--out", opt.out_path, "output file (default stdout)");
  add_seed(gen_cmd);

  CLI::App* est_cmd = app.add_subcommand("estimate", "streaming value estimation");
  add_input(est_cmd);
  add_pred_flags(est_cmd, false);
  est_cmd->add_option("--n", opt.n, "variable count (headerless constraint stream)");
  est_cmd->add_option("--m", opt.m, "expected constraint count (stream mode check)");
  est_cmd->add_option("--eps", opt.eps, "accuracy parameter")->capture_default_str();
  est_cmd->add_option("--delta", opt.delta, "sketch failure probability")
      ->capture_default_str();
  add_seed(est_cmd);
  add_format(est_cmd);

  CLI::App* assign_cmd = app.add_subcommand("assign", "majority-plus-perturbation rounding");
  add_input(assign_cmd);
  add_seed(assign_cmd);
  add_format(assign_cmd);

  CLI::App* solve_cmd = app.add_subcommand("solve", "exact optimum by enumeration");
  add_input(solve_cmd);
  add_format(solve_cmd);

  CLI::App* ordsolve_cmd =
      app.add_subcommand("ordsolve", "exact ordering optimum by enumeration");
  add_input(ordsolve_cmd);
  add_format(ordsolve_cmd);

  CLI::App* repro_cmd = app.add_subcommand("repro", "run the acceptance battery");
  (void)repro_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 64;
  }

  try {
    if (app.got_subcommand(alpha_cmd)) return cmd_alpha(opt);
    if (app.got_subcommand(analyze_cmd)) return cmd_analyze(opt);
    if (app.got_subcommand(gen_cmd)) return cmd_gen(gen_kind, opt);
    if (app.got_subcommand(est_cmd)) return cmd_estimate(opt);
    if (app.got_subcommand(assign_cmd)) return cmd_assign(opt);
    if (app.got_subcommand(solve_cmd)) return cmd_solve(opt);
    if (app.got_subcommand(ordsolve_cmd)) return cmd_ordsolve(opt);
    if (app.got_subcommand(repro_cmd))
      return acceptance::run_all() == acceptance::kCriteria ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 65;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 69;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 70;
  }
  return 64;
}

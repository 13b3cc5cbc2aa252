#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "flagmirror/crit.hpp"
#include "flagmirror/mirror.hpp"
#include "flagmirror/qhpartial.hpp"
#include "flagmirror/schubring.hpp"
#include "flagmirror/verify.hpp"

namespace flagmirror::cli {

namespace {

using cd = std::complex<double>;
using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// A usage problem detected after parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string format = "text";
  std::optional<std::string> cache_dir;
  std::string shape;
  std::string q;
  int n = 0, max_n = 0, j = 0, i = 0, starts = 0, threads = 0, samples = 50;
  std::uint64_t seed = 1;
  std::string u, v, view = "pluecker", out_dir;
};

json tagged(const std::string& command, json body) {
  body["schema"] = "flagmirror/" + command;
  body["schema_version"] = kSchemaVersion;
  return body;
}

// Parts below 1e-14 of the modulus are rounding noise and are not printed.
std::string complex_text(cd v) {
  double floor = 1e-14 * (1 + std::abs(v));
  if (std::abs(v.real()) < floor) v.real(0);
  if (std::abs(v.imag()) < floor) v.imag(0);
  std::ostringstream os;
  os << std::setprecision(12) << v.real();
  if (v.imag() != 0) os << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i";
  return os.str();
}

void require_format(const Options& o, std::initializer_list<const char*> allowed, const std::string& command) {
  for (const char* f : allowed)
    if (o.format == f) return;
  throw UsageError(command + ": --format " + o.format + " is not available");
}

FlagShape shape_of(const Options& o) {
  if (o.shape.empty()) throw UsageError("--shape is required");
  return FlagShape::parse(o.shape);
}

std::vector<cd> q_of(const Options& o, const FlagShape& shape) {
  std::vector<cd> q = o.q.empty() ? std::vector<cd>(shape.r(), cd(1)) : parse_q(o.q);
  if (static_cast<int>(q.size()) != shape.r())
    throw UsageError("--q needs " + std::to_string(shape.r()) + " values for shape " + shape.str());
  return q;
}

CritConfig crit_config(const Options& o) {
  CritConfig cfg;
  cfg.seed = o.seed;
  cfg.starts = o.starts;
  cfg.threads = o.threads;
  return cfg;
}

std::string qh_latex(const QHClass& c) {
  std::vector<std::string> names;
  for (int k = 1; k <= c.nq; ++k) names.push_back("q_{" + std::to_string(k) + "}");
  if (c.is_zero()) return "0";
  std::string s;
  for (const auto& [w, coef] : c.terms) {
    std::string k = coef.str(names);
    k = std::regex_replace(k, std::regex("\\*"), " ");
    if (!s.empty()) s += " + ";
    if (k == "-1")
      s += "-";
    else if (k != "1")
      s += "(" + k + ")";
    s += "\\sigma_{" + perm_to_string(w) + "}";
  }
  return s;
}

json qh_json(const QHClass& c, const std::vector<std::string>& names) {
  json terms = json::array();
  for (const auto& [w, coef] : c.terms) terms.push_back({{"perm", perm_to_string(w)}, {"coefficient", coef.str(names)}});
  return terms;
}

// ---------------------------------------------------------------- subcommands

int cmd_superpotential(const Options& o, std::ostream& out) {
  FlagShape shape = shape_of(o);
  if (o.view != "pluecker" && o.view != "young") throw UsageError("--view must be pluecker or young");
  auto terms = o.view == "young" ? young_view(shape) : superpotential(shape);
  if (o.format == "json") {
    out << tagged("superpotential", {{"shape", shape.str()}, {"view", o.view}, {"terms", terms_json(terms, shape)}}).dump(2)
        << "\n";
  } else if (o.format == "latex") {
    out << (o.view == "young" ? render_young_latex(terms, shape) : render_latex(terms, shape)) << "\n";
  } else {
    out << render_text(terms, shape) << "\n";
  }
  return kSuccess;
}

// Term -> divisor map of one shape: each denominator must be +-D_k for the recorded k, and the
// map must hit every k in [1, n-1+r] once.
struct DivisorCheck {
  FlagShape shape;
  std::vector<PlPoly> divisors;
  std::vector<SuperpotentialTerm> terms;
  std::vector<std::optional<int>> matched;
  bool bijective = false;
};

DivisorCheck check_divisors(const FlagShape& shape) {
  DivisorCheck c{shape, divisor_equations(shape), superpotential(shape), {}, false};
  std::set<int> hit;
  bool ok = c.terms.size() == c.divisors.size();
  for (const SuperpotentialTerm& t : c.terms) {
    c.matched.push_back(match_divisor(t.denominator, c.divisors));
    ok = ok && c.matched.back() == t.divisor && hit.insert(t.divisor).second;
  }
  c.bijective = ok && static_cast<int>(hit.size()) == shape.n() - 1 + shape.r();
  return c;
}

int cmd_divisors(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "divisors");
  std::vector<FlagShape> shapes;
  if (o.max_n > 0) {
    for (int n = 2; n <= o.max_n; ++n)
      for (const FlagShape& s : FlagShape::all_shapes(n)) shapes.push_back(s);
  } else {
    shapes.push_back(shape_of(o));
  }
  bool all = true;
  json reports = json::array();
  for (const FlagShape& shape : shapes) {
    DivisorCheck c = check_divisors(shape);
    all = all && c.bijective;
    const int n = shape.n();
    if (o.format == "json") {
      json divs = json::array(), map = json::array();
      for (const PlPoly& d : c.divisors) divs.push_back(d.text(n));
      for (std::size_t k = 0; k < c.terms.size(); ++k)
        map.push_back({{"family", family_name(c.terms[k].family)},
                       {"index", c.terms[k].index},
                       {"divisor", c.terms[k].divisor},
                       {"matched", c.matched[k] ? json(*c.matched[k]) : json()}});
      reports.push_back({{"shape", shape.str()}, {"divisors", divs}, {"terms", map}, {"bijective", c.bijective}});
    } else if (o.max_n > 0) {
      out << shape.str() << ": " << c.terms.size() << " terms, " << (c.bijective ? "PASS" : "FAIL") << "\n";
    } else {
      for (std::size_t k = 0; k < c.divisors.size(); ++k) out << "D_" << k + 1 << " = " << c.divisors[k].text(n) << "\n";
      for (std::size_t k = 0; k < c.terms.size(); ++k)
        out << family_name(c.terms[k].family) << " " << c.terms[k].index << " -> D_" << c.terms[k].divisor
            << (c.matched[k] == c.terms[k].divisor ? "" : "  (mismatch)") << "\n";
      out << (c.bijective ? "PASS" : "FAIL") << ": term to divisor map is " << (c.bijective ? "" : "not ")
          << "a bijection\n";
    }
  }
  if (o.format == "json") out << tagged("divisors", {{"shapes", reports}, {"passed", all}}).dump(2) << "\n";
  else if (o.max_n > 0) out << (all ? "PASS" : "FAIL") << ": " << shapes.size() << " shapes\n";
  return all ? kSuccess : kCheckFailed;
}

int cmd_qh_mult(const Options& o, std::ostream& out) {
  if (o.u.empty() || o.v.empty()) throw UsageError("qh-mult needs --u and --v");
  Perm u = parse_perm(o.u), v = parse_perm(o.v);
  int n = o.n > 0 ? o.n : static_cast<int>(std::max(u.size(), v.size()));
  if (static_cast<int>(u.size()) > n || static_cast<int>(v.size()) > n) throw UsageError("--n is smaller than a permutation");
  QHClass p = class_product(embed(u, n), embed(v, n), n);
  auto names = q_names(n - 1);
  if (o.format == "json")
    out << tagged("qh-mult", {{"n", n}, {"u", perm_to_string(u)}, {"v", perm_to_string(v)}, {"terms", qh_json(p, names)}})
               .dump(2)
        << "\n";
  else if (o.format == "latex")
    out << "\\sigma_{" << perm_to_string(u) << "} * \\sigma_{" << perm_to_string(v) << "} = " << qh_latex(p) << "\n";
  else
    out << p.str(names) << "\n";
  return kSuccess;
}

int cmd_c1_spectrum(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "c1-spectrum");
  FlagShape shape = shape_of(o);
  std::vector<cd> q = q_of(o, shape);
  auto ev = c1_spectrum(shape, q);
  if (o.format == "json") {
    out << tagged("c1-spectrum", spectrum_report(shape, q, ev)).dump(2) << "\n";
  } else {
    out << "c1 of " << shape.str() << ": " << ev.size() << " eigenvalues\n";
    for (cd e : ev) out << "  " << complex_text(e) << "\n";
  }
  return kSuccess;
}

int cmd_crit(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "crit");
  FlagShape shape = shape_of(o);
  std::vector<cd> q = q_of(o, shape);
  CritStats stats;
  auto points = find_critical_points(shape, q, crit_config(o), &stats);
  if (o.format == "json") {
    out << tagged("crit", crit_report(shape, q, points, stats)).dump(2) << "\n";
  } else {
    out << points.size() << " critical points of " << shape.str() << " (total multiplicity "
        << total_multiplicity(points) << ", expected " << stats.expected << ")\n";
    for (const CritPoint& p : points) {
      out << "  " << complex_text(p.value) << "  toeplitz " << p.toeplitz_residual;
      if (p.multiplicity > 1) out << "  multiplicity " << p.multiplicity;
      out << "\n";
    }
    for (const std::string& w : stats.warnings) out << "warning: " << w << "\n";
  }
  return kSuccess;
}

void print_records(const Options& o, const std::string& command, const std::string& title,
                   const std::vector<CheckRecord>& records, std::ostream& out) {
  if (o.format == "json") out << tagged(command, json_report(records)).dump(2) << "\n";
  else out << markdown_report(records, title);
}

bool all_passed(const std::vector<CheckRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; });
}

int cmd_verify_identity(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "verify-identity");
  std::vector<CheckRecord> records;
  if (o.max_n > 0) {
    for (const KeyIdentityReport& r : key_identity_sweep(o.max_n, o.threads)) records.push_back(r.record());
  } else {
    FlagShape shape = shape_of(o);
    try {
      KeyIdentityReport r = check_key_identity(shape, o.j, o.i);
      records.push_back(r.record());
      if (o.format == "text") {
        for (const KeyIdentityTerm& t : r.terms) {
          out << (t.sign > 0 ? "+ " : "- ") << "J = {";
          for (std::size_t k = 0; k < t.J.size(); ++k) out << (k ? "," : "") << t.J[k];
          out << "}: " << (t.wJ ? perm_to_string(*t.wJ) : std::string("undefined")) << " * "
              << perm_to_string(t.grassmannian) << " = " << t.product.str(q_names(shape.n() - 1)) << "\n";
        }
        out << "\n";
      }
    } catch (const IdentityViolation& e) {
      records.push_back(e.report.record());
    }
  }
  print_records(o, "verify-identity", "Quantum Schubert identity", records, out);
  return all_passed(records) ? kSuccess : kCheckFailed;
}

int cmd_verify_detformula(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "verify-detformula");
  int lo = o.n > 0 ? o.n : 2, hi = o.n > 0 ? o.n : (o.max_n > 0 ? o.max_n : 5);
  std::vector<CheckRecord> records;
  for (int n = lo; n <= hi; ++n) {
    try {
      records.push_back(check_det_formula(n).record());
    } catch (const FormulaViolation& e) {
      records.push_back(e.report.record());
    }
  }
  print_records(o, "verify-detformula", "Determinantal formula", records, out);
  return all_passed(records) ? kSuccess : kCheckFailed;
}

int cmd_verify_mirror(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "verify-mirror");
  FlagShape shape = shape_of(o);
  std::vector<cd> q = q_of(o, shape);
  MirrorSpectrumReport r = check_mirror_spectrum(shape, q, crit_config(o));
  if (o.format == "json") {
    out << tagged("verify-mirror", json_report({r.record()})).dump(2) << "\n";
  } else {
    out << (r.passed() ? "PASS" : "FAIL") << ": " << shape.str() << ", " << r.pairs.size() << " pairs, "
        << r.eigenvalues.size() << " eigenvalues, " << r.critical_values.size() << " critical values (with multiplicity)\n";
    out << "max distance " << r.max_distance << ", tolerance " << r.tolerance << "\n";
    for (auto [a, b] : r.pairs)
      out << "  " << complex_text(r.eigenvalues[a]) << "  <->  " << complex_text(r.critical_values[b]) << "\n";
    for (const std::string& w : r.crit_stats.warnings) out << "warning: " << w << "\n";
  }
  return r.passed() ? kSuccess : kCheckFailed;
}

// Every verification at desk scale, in one report.
int cmd_report_all(const Options& o, std::ostream& out) {
  require_format(o, {"text", "json"}, "report-all");
  std::vector<CheckRecord> records;
  try {
    records.push_back(check_key_identity(FlagShape::parse("2,4;7"), 1, 4).record());
  } catch (const IdentityViolation& e) {
    records.push_back(e.report.record());
  }
  for (const KeyIdentityReport& r : key_identity_sweep(o.max_n > 0 ? o.max_n : 6, o.threads)) records.push_back(r.record());
  for (int n = 2; n <= 5; ++n) {
    try {
      records.push_back(check_det_formula(n).record());
    } catch (const FormulaViolation& e) {
      records.push_back(e.report.record());
    }
  }
  CritConfig cfg = crit_config(o);
  for (const char* name : {"1;2", "1;3", "2;4", "1,2;3", "1,2;4", "1,3;4", "2;5", "1,2,3;4"}) {
    FlagShape shape = FlagShape::parse(name);
    records.push_back(check_mirror_spectrum(shape, std::vector<cd>(shape.r(), cd(1)), cfg).record());
  }
  records.push_back(check_tau_symmetry(FlagShape::parse("2,4;7"), o.samples, o.seed).record());
  records.push_back(check_u_middle(FlagShape::parse("1,2;4"), {1.0, 1.0}, cfg).record());

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    std::ofstream(std::filesystem::path(o.out_dir) / "report.md") << markdown_report(records, "Verification report");
    std::ofstream(std::filesystem::path(o.out_dir) / "report.json") << tagged("report-all", json_report(records)).dump(2)
                                                                      << "\n";
  }
  print_records(o, "report-all", "Verification report", records, out);
  return all_passed(records) ? kSuccess : kCheckFailed;
}

}  // namespace

std::vector<cd> parse_q(const std::string& s) {
  static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex real_re("^[+-]?" + num + "$");
  static const std::regex imag_re("^([+-]?)(" + num + ")?i$");
  static const std::regex complex_re("^([+-]?" + num + ")([+-])(" + num + ")?i$");
  std::vector<cd> q;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    std::smatch m;
    if (std::regex_match(tok, real_re)) {
      q.emplace_back(std::stod(tok), 0);
    } else if (std::regex_match(tok, m, imag_re)) {
      double im = m[2].matched ? std::stod(m[2]) : 1;
      q.emplace_back(0, m[1] == "-" ? -im : im);
    } else if (std::regex_match(tok, m, complex_re)) {
      double im = m[3].matched ? std::stod(m[3]) : 1;
      q.emplace_back(std::stod(m[1]), m[2] == "-" ? -im : im);
    } else {
      throw std::invalid_argument("cannot parse q value '" + tok + "'");
    }
  }
  if (q.empty()) throw std::invalid_argument("empty q list");
  return q;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum cohomology and mirror superpotentials of partial flag varieties"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "latex"}));
  app.add_option("--cache-dir", o.cache_dir, "Directory for cached Monk operators (default $FLAGMIRROR_CACHE_DIR)");
  app.fallthrough();

  auto add_shape = [&](CLI::App* c) { c->add_option("--shape", o.shape, "Shape n_1,...,n_r;n"); };
  auto add_q = [&](CLI::App* c) { c->add_option("--q", o.q, "Quantum parameters, e.g. 1,0.5-2i (default all ones)"); };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--starts", o.starts, "Newton starts (0: adaptive)")->check(CLI::NonNegativeNumber);
    c->add_option("--threads", o.threads, "Worker threads (0: hardware)")->check(CLI::NonNegativeNumber);
  };

  auto* sp = app.add_subcommand("superpotential", "Terms of the mirror superpotential");
  add_shape(sp);
  sp->add_option("--view", o.view, "pluecker or young");
  auto* dv = app.add_subcommand("divisors", "Divisor equations and the term to divisor map");
  add_shape(dv);
  dv->add_option("--max-n", o.max_n, "Check every shape with n up to this instead")->check(CLI::Range(2, 9));
  auto* qm = app.add_subcommand("qh-mult", "Product of two Schubert classes in QH*(Fl_n)");
  qm->add_option("--n", o.n, "n (default: the larger permutation size)")->check(CLI::Range(1, 8));
  qm->add_option("--u", o.u, "Permutation in one-line notation")->required();
  qm->add_option("--v", o.v, "Permutation in one-line notation")->required();
  auto* cs = app.add_subcommand("c1-spectrum", "Eigenvalues of quantum multiplication by c1");
  add_shape(cs);
  add_q(cs);
  auto* cr = app.add_subcommand("crit", "Critical points of the superpotential");
  add_shape(cr);
  add_q(cr);
  add_solver(cr);
  auto* vi = app.add_subcommand("verify-identity", "Quantum Schubert identity, one instance or a sweep");
  add_shape(vi);
  vi->add_option("--j", o.j, "Step index j");
  vi->add_option("--i", o.i, "Index i");
  vi->add_option("--max-n", o.max_n, "Sweep every legal instance with n up to this")->check(CLI::Range(3, 7));
  vi->add_option("--threads", o.threads, "Worker threads (0: hardware)")->check(CLI::NonNegativeNumber);
  auto* vd = app.add_subcommand("verify-detformula", "Determinantal formula for 321-avoiding permutations");
  vd->add_option("--n", o.n, "Single n")->check(CLI::Range(2, 5));
  vd->add_option("--max-n", o.max_n, "All n from 2 up to this (default 5)")->check(CLI::Range(2, 5));
  auto* vm = app.add_subcommand("verify-mirror", "c1 spectrum against critical values");
  add_shape(vm);
  add_q(vm);
  add_solver(vm);
  auto* ra = app.add_subcommand("report-all", "All desk-scale verifications");
  ra->add_option("--out-dir", o.out_dir, "Also write report.md and report.json here");
  ra->add_option("--max-n", o.max_n, "Identity sweep bound (default 6)")->check(CLI::Range(3, 7));
  ra->add_option("--samples", o.samples, "Samples for the tau check")->check(CLI::PositiveNumber);
  add_solver(ra);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    set_cache_dir(resolve_cache_dir(o.cache_dir));
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "superpotential") return cmd_superpotential(o, out);
    if (name == "divisors") return cmd_divisors(o, out);
    if (name == "qh-mult") return cmd_qh_mult(o, out);
    if (name == "c1-spectrum") return cmd_c1_spectrum(o, out);
    if (name == "crit") return cmd_crit(o, out);
    if (name == "verify-identity") return cmd_verify_identity(o, out);
    if (name == "verify-detformula") return cmd_verify_detformula(o, out);
    if (name == "verify-mirror") return cmd_verify_mirror(o, out);
    return cmd_report_all(o, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv = {"flagmirror"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace flagmirror::cli

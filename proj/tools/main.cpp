#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperconv/constants.hpp"
#include "hyperconv/fit.hpp"
#include "hyperconv/summation.hpp"

using json = nlohmann::ordered_json;
using namespace hyperconv;

namespace {

// Shortest representation truncated to 12 significant digits; keeps CSV and
// JSON byte-stable across runs.
std::string fmt_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_sig(double v) { return std::strtod(fmt_sig(v).c_str(), nullptr); }

json scalar_json(const ScalarValue& v) {
  if (v.is_exact()) {
    int128 e = v.exact();
    if (e <= int128(INT64_MAX) && e >= int128(INT64_MIN)) return json(int64_t(e));
    return json(to_string(e));
  }
  return json(round_sig(v.approx()));
}

std::string scalar_csv(const ScalarValue& v) {
  if (v.is_exact()) return to_string(v.exact());
  return fmt_sig(v.approx());
}

struct Output {
  std::string format = "json";
  std::string out_path;
  bool timing = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void emit(const json& query, const json& result, json meta, const std::string& csv) const {
    std::string text;
    if (format == "csv") {
      text = csv;
    } else {
      if (timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        meta["elapsed_ms"] = ms;
      }
      json doc;
      doc["query"] = query;
      doc["result"] = result;
      doc["meta"] = meta;
      text = doc.dump(2);
      text += "\n";
    }
    if (out_path.empty()) {
      std::fputs(text.c_str(), stdout);
    } else {
      std::ofstream fout(out_path, std::ios::binary);
      if (!fout) throw resource_error("cannot open output file " + out_path);
      fout << text;
    }
  }
};

struct FnFlags {
  std::string f = "one";
  double r = 1.0;
};

FunctionId parse_f(const FnFlags& ff, int k_for_tauk) {
  if (ff.f == "one") return FunctionId::one();
  if (ff.f == "id") return FunctionId::id_pow(ff.r);
  if (ff.f == "log") return FunctionId::log();
  if (ff.f == "omega") return FunctionId::small_omega();
  if (ff.f == "bigomega") return FunctionId::big_omega();
  if (ff.f == "tau") return FunctionId::tau();
  if (ff.f == "tauk") return FunctionId::tau_k(k_for_tauk);
  if (ff.f == "mobius") return FunctionId::mobius();
  if (ff.f == "lambda") return FunctionId::lambda();
  if (ff.f == "sigma") return FunctionId::sigma_pow(ff.r);
  if (ff.f == "phi") return FunctionId::phi_pow(ff.r);
  throw CLI::ValidationError("--f", "unknown function " + ff.f);
}

ConvoluteKind parse_kind(const std::string& form, const FnFlags& ff, int k) {
  if (form == "gcd") return ConvoluteKind::gcd_of(parse_f(ff, k), k);
  if (form == "lcm") return ConvoluteKind::lcm_of(parse_f(ff, k), k);
  if (form == "tau") return ConvoluteKind::plain_tau_k(k);
  throw CLI::ValidationError("--form", "unknown form " + form);
}

SumMethod parse_method(const std::string& m) {
  if (m == "enumerate") return SumMethod::Enumerate;
  if (m == "sieve") return SumMethod::Sieve;
  if (m == "identity") return SumMethod::Identity;
  if (m == "series") return SumMethod::Series;
  throw CLI::ValidationError("--method", "unknown method " + m);
}

PrimeTable table_for_sum(SumMethod method, double x, int k, uint64_t prime_limit) {
  uint64_t X = x < 1.0 ? 0 : uint64_t(x);
  uint64_t need = 2;
  if (method == SumMethod::Identity) {
    need = std::max<uint64_t>(1000, integer_nth_root(X, k) + 1);
  } else {
    need = std::max<uint64_t>(X, 2);
  }
  return build_prime_table(std::max(need, prime_limit));
}

// ---------------------------------------------------------------------------
// verify suites

int g_checks = 0;

void check(bool ok, const std::string& what) {
  if (!ok) throw verification_error(what);
  ++g_checks;
}

void suite_cross_method(int k, uint64_t x_max, const PrimeTable& table) {
  TruncationConfig cfg;
  const FunctionId exact_fs[] = {FunctionId::one(),       FunctionId::id_pow(1),
                                 FunctionId::tau(),       FunctionId::small_omega(),
                                 FunctionId::big_omega(), FunctionId::mobius()};
  for (const auto& f : exact_fs) {
    ConvoluteKind kind = ConvoluteKind::gcd_of(f, k);
    for (uint64_t x = 1; x <= x_max; ++x) {
      int128 a = hyper_sum_enumerate(kind, double(x), table).value.exact();
      int128 b = sieve_convolute_prefix(kind, double(x), table).value.exact();
      int128 c = hyper_sum_gcd_identity(f, k, double(x), table).value.exact();
      check(a == b && a == c,
            "gcd engines disagree for " + kind.name() + " at x=" + std::to_string(x));
    }
    std::printf("ok: gcd[%s] k=%d enumerate=sieve=identity up to %llu\n", f.name().c_str(), k,
                (unsigned long long)x_max);
  }
  {
    ConvoluteKind kind = ConvoluteKind::gcd_of(FunctionId::log(), k);
    for (uint64_t x = 1; x <= x_max; ++x) {
      double a = hyper_sum_enumerate(kind, double(x), table).value.approx();
      double c = hyper_sum_gcd_identity(FunctionId::log(), k, double(x), table).value.approx();
      check(std::abs(a - c) <= 1e-9 * std::max(1.0, std::abs(a)),
            "gcd log engines disagree at x=" + std::to_string(x));
    }
    std::printf("ok: gcd[log] k=%d enumerate~identity (1e-9) up to %llu\n", k,
                (unsigned long long)x_max);
  }
  for (const auto& f : {FunctionId::tau(), FunctionId::id_pow(1)}) {
    ConvoluteKind kind = ConvoluteKind::lcm_of(f, k);
    for (uint64_t x = 1; x <= x_max; ++x) {
      int128 a = hyper_sum_enumerate(kind, double(x), table).value.exact();
      int128 b = sieve_convolute_prefix(kind, double(x), table).value.exact();
      int128 c = evaluate_sum(kind, double(x), SumMethod::Series, cfg, table).value.exact();
      check(a == b && a == c,
            "lcm engines disagree for " + kind.name() + " at x=" + std::to_string(x));
    }
    std::printf("ok: lcm[%s] k=%d enumerate=sieve=series up to %llu\n", f.name().c_str(), k,
                (unsigned long long)x_max);
  }
}

void suite_pointwise_identity(int k, uint64_t n_max, const PrimeTable& table) {
  const FunctionId fs[] = {FunctionId::one(),       FunctionId::id_pow(1),
                           FunctionId::tau(),       FunctionId::small_omega(),
                           FunctionId::big_omega(), FunctionId::mobius()};
  for (const auto& f : fs) {
    for (uint64_t n = 1; n <= n_max; ++n) {
      check(convolute_gcd(f, k, n, table).exact() == convolute_gcd_identity(f, k, n, table).exact(),
            "pointwise identity fails for " + f.name() + " at n=" + std::to_string(n));
    }
    std::printf("ok: convolute_gcd[%s] k=%d matches divisor identity up to %llu\n",
                f.name().c_str(), k, (unsigned long long)n_max);
  }
}

void suite_reconstruction(uint64_t entry_max, const PrimeTable& table) {
  const LcmCoeffMode modes[] = {LcmCoeffMode::ar_class(FunctionId::id_pow(1), 1),
                                LcmCoeffMode::ar_class(FunctionId::id_pow(0), 0),
                                LcmCoeffMode::tau_mode()};
  for (const auto& mode : modes) {
    uint64_t t2[2], t3[3];
    for (uint64_t a = 1; a <= entry_max; ++a) {
      for (uint64_t b = 1; b <= entry_max; ++b) {
        t2[0] = a;
        t2[1] = b;
        auto [lhs, rhs] = verify_lcm_reconstruction(mode, 2, std::span<const uint64_t>(t2, 2), table);
        check(lhs == rhs, "reconstruction fails, mode " + mode.name());
      }
    }
    for (uint64_t a = 1; a <= entry_max; ++a) {
      for (uint64_t b = 1; b <= entry_max; ++b) {
        for (uint64_t c = 1; c <= entry_max; ++c) {
          t3[0] = a;
          t3[1] = b;
          t3[2] = c;
          auto [lhs, rhs] =
              verify_lcm_reconstruction(mode, 3, std::span<const uint64_t>(t3, 3), table);
          check(lhs == rhs, "reconstruction fails, mode " + mode.name());
        }
      }
    }
    std::printf("ok: lcm reconstruction, mode %s, entries<=%llu, k=2,3\n", mode.name().c_str(),
                (unsigned long long)entry_max);
  }
}

void suite_eulerian() {
  for (int t = 1; t <= 10; ++t) {
    int128 sum = 0, fact = 1;
    for (int i = 2; i <= t; ++i) fact = checked_mul(fact, int128(i));
    for (int128 v : eulerian_row(t)) sum = checked_add(sum, v);
    check(sum == fact, "eulerian row sum != t! at t=" + std::to_string(t));
  }
  std::printf("ok: eulerian row sums equal t! for t<=10\n");
  // sum m^t q^m against q psi_{t-1}(q) / (1-q)^(t+1)
  for (int t = 1; t <= 5; ++t) {
    for (double q : {0.5, 1.0 / 3.0, 0.2}) {
      auto row = eulerian_row(t);
      double psi = 0.0;
      for (size_t i = row.size(); i-- > 0;) psi = psi * q + to_double(row[i]);
      double closed = q * psi / std::pow(1.0 - q, t + 1);
      double partial = 0.0;
      int M = 220;
      for (int m = 1; m <= M; ++m) partial += std::pow(double(m), t) * std::pow(q, m);
      double ratio = std::pow((M + 2.0) / (M + 1.0), t) * q;
      double tail = std::pow(M + 1.0, t) * std::pow(q, M + 1) / (1.0 - ratio);
      check(std::abs(closed - partial) <= tail + 1e-12 * std::abs(closed),
            "power-series identity fails at t=" + std::to_string(t));
    }
  }
  std::printf("ok: sum m^t q^m matches Eulerian closed form (t<=5)\n");
}

void suite_constants(const PrimeTable& table) {
  EulerConfig cfg;
  cfg.prime_limit = std::min<uint64_t>(table.limit, 1000000);
  ConstantResult z2 = zeta_value(2, cfg), z3 = zeta_value(3, cfg);
  ConstantResult c2 = euler_product_C(FunctionId::id_pow(1), 1, 2, cfg, table);
  check(std::abs(c2.value - z3.value / z2.value) < 1e-6, "C_2 != zeta(3)/zeta(2)");
  std::printf("ok: C_2 matches zeta(3)/zeta(2) to 1e-6\n");
  ConstantResult d2 = euler_product_D(2, cfg, table);
  double prod = 1.0;
  for (uint32_t p : table.primes) {
    if (p > 100000) break;
    prod *= 1.0 - 1.0 / ((double(p) + 1.0) * (double(p) + 1.0));
  }
  double pi = 3.14159265358979323846;
  check(std::abs(d2.value / 6.0 - prod / (pi * pi)) < 1e-6, "D_2/3! mismatch");
  std::printf("ok: D_2/3! matches (1/pi^2) prod (1 - (p+1)^-2) to 1e-6\n");

  EulerConfig dbl = cfg;
  dbl.prime_limit *= 2;
  dbl.exponent_cap *= 2;
  PrimeTable big = build_prime_table(dbl.prime_limit);
  ConstantResult c2b = euler_product_C(FunctionId::id_pow(1), 1, 2, dbl, big);
  check(std::abs(c2b.value - c2.value) <= c2.tail_bound, "C_2 moved beyond its tail bound");
  ConstantResult k3 = gcd_prime_constant(FunctionId::small_omega(), 3, cfg, table);
  ConstantResult k3b = gcd_prime_constant(FunctionId::small_omega(), 3, dbl, big);
  check(std::abs(k3b.value - k3.value) <= k3.tail_bound, "K_omega_3 moved beyond its tail bound");
  std::printf("ok: doubling prime_limit/exponent_cap stays within tail bounds\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("HYPERCONV_MEM_CAP_MB")) {
    char* end = nullptr;
    unsigned long long mb = std::strtoull(cap, &end, 10);
    if (end && *end == '\0' && mb > 0) set_memory_cap_mb(mb);
  }

  CLI::App app{"hyperbolic gcd/lcm summation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Output out;
  app.add_option("--format", out.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out.out_path, "write output to a file");
  app.add_flag("--timing", out.timing, "include elapsed_ms in the output");

  FnFlags ff;
  int k = 2;
  double x_flag = 100.0;
  std::string form = "gcd";
  std::string method = "enumerate";
  uint64_t n_flag = 1;
  uint64_t prime_limit = 100000;
  int exp_cap = 40;
  double tol = 1e-9;
  uint64_t coord_cap = 0;  // 0: unbounded
  double x_min = 10.0, x_max = 100000.0;
  int points = 24;
  int degree = -1;
  double scale = -1.0;
  std::string report = "fit";
  std::string suite = "cross-method";
  std::string what = "f";
  uint64_t n_max = 20000, entry_max = 30;
  int t_flag = 3, m_flag = -1;
  double s_flag = 2.0;

  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--f", ff.f, "arithmetic function")
        ->check(CLI::IsMember({"one", "id", "log", "omega", "bigomega", "tau", "tauk", "mobius",
                               "lambda", "sigma", "phi"}));
    cmd->add_option("--r", ff.r, "exponent for id/sigma/phi");
    cmd->add_option("--k", k, "number of variables");
    cmd->add_option("--prime-limit", prime_limit, "prime table / series cutoff");
  };

  CLI::App* c_factor = app.add_subcommand("factor", "prime factorization");
  c_factor->add_option("--n", n_flag, "integer to factor")->required();
  c_factor->add_option("--prime-limit", prime_limit, "prime table limit");

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate f(n)");
  add_shared(c_eval);
  c_eval->add_option("--n", n_flag, "argument")->required();

  CLI::App* c_conv = app.add_subcommand("convolute", "pointwise convolute at n");
  add_shared(c_conv);
  c_conv->add_option("--form", form, "gcd|lcm|tau");
  c_conv->add_option("--n", n_flag, "argument")->required();
  c_conv->add_option("--method", method, "enumerate|identity");

  CLI::App* c_sum = app.add_subcommand("sum", "summatory value over the hyperbolic region");
  add_shared(c_sum);
  c_sum->add_option("--form", form, "gcd|lcm|tau");
  c_sum->add_option("--x", x_flag, "region bound")->required();
  c_sum->add_option("--method", method, "enumerate|sieve|identity|series");
  c_sum->add_option("--cap", coord_cap, "series coordinate cap (0 = unbounded)");
  c_sum->add_option("--tol", tol, "series tail tolerance");

  CLI::App* c_const = app.add_subcommand("constant", "asymptotic constants with tail bounds");
  add_shared(c_const);
  std::string cname = "C";
  c_const->add_option("--name", cname, "K|wintner|C|D|b|zeta|eulerian")->required();
  c_const->add_option("--exp-cap", exp_cap, "exponent cap of the local sums");
  c_const->add_option("--tol", tol, "target tolerance (reported, not enforced)");
  c_const->add_option("--t", t_flag, "t for b and eulerian");
  c_const->add_option("--m", m_flag, "m for eulerian");
  c_const->add_option("--s", s_flag, "s for zeta");

  CLI::App* c_fit = app.add_subcommand("fit", "sample a grid and fit the main term");
  add_shared(c_fit);
  c_fit->add_option("--form", form, "gcd|lcm|tau");
  c_fit->add_option("--x-min", x_min, "grid start")->required();
  c_fit->add_option("--x-max", x_max, "grid end")->required();
  c_fit->add_option("--points", points, "grid size");
  c_fit->add_option("--method", method, "engine for sampling");
  c_fit->add_option("--degree", degree, "fit degree (default: k-1 or 2k-1)");
  c_fit->add_option("--scale", scale, "scale exponent (default: r+1 or 1)");
  c_fit->add_option("--report", report, "fit|ratio|slope")
      ->check(CLI::IsMember({"fit", "ratio", "slope"}));

  CLI::App* c_verify = app.add_subcommand("verify", "self-check suites");
  add_shared(c_verify);
  c_verify->add_option("--suite", suite,
                       "cross-method|pointwise-identity|reconstruction|eulerian|constants");
  c_verify->add_option("--x-max", x_max, "range for cross-method");
  c_verify->add_option("--n-max", n_max, "range for pointwise-identity");
  c_verify->add_option("--entry-max", entry_max, "range for reconstruction");

  CLI::App* c_table = app.add_subcommand("table", "tabulate values as CSV/JSON");
  add_shared(c_table);
  c_table->add_option("--what", what, "f|convolute|piltz|eulerian|theta");
  c_table->add_option("--form", form, "gcd|lcm|tau (for --what convolute)");
  c_table->add_option("--n-max", n_max, "table range");
  c_table->add_option("--t", t_flag, "eulerian rows");

  try {
    app.parse(argc, argv);

    if (c_factor->parsed()) {
      PrimeTable table = build_prime_table(std::max<uint64_t>(prime_limit, 1000));
      Factorization fac = factorize(n_flag, table);
      json arr = json::array();
      std::string csv = "p,e\n";
      for (const auto& pp : fac.parts) {
        arr.push_back({pp.p, pp.e});
        csv += std::to_string(pp.p) + "," + std::to_string(pp.e) + "\n";
      }
      out.emit({{"command", "factor"}, {"n", n_flag}}, {{"factors", arr}},
               {{"method", "spf"}, {"terms", fac.parts.size()}}, csv);
    } else if (c_eval->parsed()) {
      PrimeTable table = build_prime_table(std::max<uint64_t>(prime_limit, 1000));
      FunctionId f = parse_f(ff, k);
      ScalarValue v = eval_f(f, n_flag, table);
      out.emit({{"command", "eval"}, {"f", f.name()}, {"n", n_flag}},
               {{"value", scalar_json(v)}, {"exact", v.is_exact()}},
               {{"method", "factorization"}, {"terms", 1}},
               "n,value,method,exact\n" + std::to_string(n_flag) + "," + scalar_csv(v) +
                   ",factorization," + (v.is_exact() ? "true" : "false") + "\n");
    } else if (c_conv->parsed()) {
      PrimeTable table =
          build_prime_table(std::max<uint64_t>(prime_limit, std::max<uint64_t>(n_flag, 1000)));
      ConvoluteKind kind = parse_kind(form, ff, k);
      kind.validate();
      ScalarValue v;
      if (kind.form == ConvoluteForm::PlainTauK) {
        v = tau_k_point(k, n_flag, table);
      } else if (method == "identity") {
        if (kind.form != ConvoluteForm::GcdOf)
          throw domain_error("convolute --method identity applies to --form gcd");
        v = convolute_gcd_identity(kind.f, k, n_flag, table);
      } else if (kind.form == ConvoluteForm::GcdOf) {
        v = convolute_gcd(kind.f, k, n_flag, table);
      } else {
        v = convolute_lcm(kind.f, k, n_flag, table);
      }
      out.emit(
          {{"command", "convolute"}, {"form", form}, {"f", kind.f.name()}, {"k", k}, {"n", n_flag}},
          {{"value", scalar_json(v)}, {"exact", v.is_exact()}}, {{"method", method}, {"terms", 1}},
          "n,value,method,exact\n" + std::to_string(n_flag) + "," + scalar_csv(v) + "," + method +
              "," + (v.is_exact() ? "true" : "false") + "\n");
    } else if (c_sum->parsed()) {
      SumMethod sm = parse_method(method);
      ConvoluteKind kind = parse_kind(form, ff, k);
      kind.validate();
      PrimeTable table = table_for_sum(sm, x_flag, k, prime_limit);
      TruncationConfig cfg;
      cfg.coordinate_cap = coord_cap == 0 ? UINT64_MAX : coord_cap;
      cfg.tail_tolerance = tol;
      SummatoryResult res = evaluate_sum(kind, x_flag, sm, cfg, table);
      json result = {{"value", scalar_json(res.value)}, {"exact", res.value.is_exact()}};
      if (res.truncation_bound) result["truncation_bound"] = round_sig(*res.truncation_bound);
      out.emit({{"command", "sum"}, {"form", form}, {"f", kind.f.name()}, {"k", k}, {"x", x_flag}},
               result, {{"method", method_name(res.method)}, {"terms", res.terms_used}},
               "x,value,method,exact\n" + fmt_sig(x_flag) + "," + scalar_csv(res.value) + "," +
                   method_name(res.method) + "," + (res.value.is_exact() ? "true" : "false") + "\n");
    } else if (c_const->parsed()) {
      EulerConfig cfg;
      cfg.prime_limit = prime_limit;
      cfg.exponent_cap = exp_cap;
      cfg.tail_tolerance = tol;
      PrimeTable table = build_prime_table(std::max<uint64_t>(cfg.prime_limit, 1000));
      FunctionId f = parse_f(ff, k);
      ConstantResult cr;
      json query = {{"command", "constant"}, {"name", cname}};
      if (cname == "K") {
        cr = gcd_prime_constant(f, k, cfg, table);
        query["f"] = f.name();
        query["k"] = k;
      } else if (cname == "wintner") {
        cr = wintner_gcd_constant(f, k, cfg, table);
        query["f"] = f.name();
        query["k"] = k;
      } else if (cname == "C") {
        cr = euler_product_C(f, ff.r, k, cfg, table);
        query["f"] = f.name();
        query["r"] = ff.r;
        query["k"] = k;
      } else if (cname == "D") {
        cr = euler_product_D(k, cfg, table);
        query["k"] = k;
      } else if (cname == "b") {
        cr = b_constant(k, t_flag, cfg, table);
        query["k"] = k;
        query["t"] = t_flag;
      } else if (cname == "zeta") {
        cr = zeta_value(s_flag, cfg);
        query["s"] = s_flag;
      } else if (cname == "eulerian") {
        if (m_flag < 0) throw domain_error("constant --name eulerian needs --m");
        int128 v = eulerian_number(t_flag, m_flag);
        query["t"] = t_flag;
        query["m"] = m_flag;
        out.emit(query, {{"value", scalar_json(ScalarValue::from_int(v))}, {"exact", true}},
                 {{"method", "recurrence"}, {"terms", t_flag}},
                 "t,m,value\n" + std::to_string(t_flag) + "," + std::to_string(m_flag) + "," +
                     to_string(v) + "\n");
        return 0;
      } else {
        throw CLI::ValidationError("--name", "unknown constant " + cname);
      }
      out.emit(query,
               {{"value", round_sig(cr.value)},
                {"exact", false},
                {"tail_bound", round_sig(cr.tail_bound)}},
               {{"method", "truncated-series"}, {"terms", cr.terms}},
               "name,value,tail_bound,terms\n" + cname + "," + fmt_sig(cr.value) + "," +
                   fmt_sig(cr.tail_bound) + "," + std::to_string(cr.terms) + "\n");
    } else if (c_fit->parsed()) {
      SumMethod sm = parse_method(method);
      ConvoluteKind kind = parse_kind(form, ff, k);
      kind.validate();
      PrimeTable table = table_for_sum(sm, x_max, k, prime_limit);
      TruncationConfig cfg;
      cfg.coordinate_cap = UINT64_MAX;
      SampleGrid grid = sample_grid(kind, x_min, x_max, points, sm, cfg, table);
      int deg = degree >= 0 ? degree : prescribed_degree(kind);
      double sc = scale >= 0.0 ? scale : 1.0;
      if (scale < 0.0 && kind.form == ConvoluteForm::LcmOf && kind.f.ar_class())
        sc = kind.f.ar_class()->r + 1.0;

      json query = {{"command", "fit"},   {"form", form},     {"f", kind.f.name()},
                    {"k", k},             {"x_min", x_min},   {"x_max", x_max},
                    {"points", points},   {"method", method}, {"report", report}};
      if (report == "ratio") {
        EulerConfig ecfg;
        ecfg.prime_limit = std::min<uint64_t>(table.limit, std::max<uint64_t>(prime_limit, 100000));
        ConstantResult ref = wintner_gcd_constant(
            kind.form == ConvoluteForm::PlainTauK ? FunctionId::one() : kind.f, k, ecfg, table);
        RatioReport rr = wintner_ratio_report(grid, k, ref);
        json pts = json::array();
        std::string csv = "x,ratio\n";
        for (const auto& p : rr.points) {
          pts.push_back({{"x", p.x}, {"ratio", round_sig(p.ratio)}});
          csv += fmt_sig(p.x) + "," + fmt_sig(p.ratio) + "\n";
        }
        out.emit(query,
                 {{"points", pts},
                  {"reference", round_sig(rr.reference)},
                  {"final_deviation", round_sig(rr.final_deviation)},
                  {"diverging", rr.diverging}},
                 {{"method", method}, {"terms", grid.xs.size()}}, csv);
      } else {
        FitReport fr = fit_main_term(grid, sc, deg);
        if (report == "slope") {
          SlopeReport sr = error_exponent_report(grid, fr);
          int theta_k = kind.form == ConvoluteForm::LcmOf && kind.f.tag == Fn::Tau ? 2 * k : k;
          out.emit(query,
                   {{"slope", round_sig(sr.slope)},
                    {"points_used", sr.points_used},
                    {"points_dropped", sr.points_dropped},
                    {"at_rounding_floor", sr.at_rounding_floor},
                    {"theta_reference", round_sig(theta_reference(theta_k))}},
                   {{"method", method}, {"terms", grid.xs.size()}},
                   "slope,points_used\n" + fmt_sig(sr.slope) + "," +
                       std::to_string(sr.points_used) + "\n");
        } else {
          json coeffs = json::array();
          std::string csv = "j,coefficient\n";
          for (size_t j = 0; j < fr.coefficients.size(); ++j) {
            coeffs.push_back(round_sig(fr.coefficients[j]));
            csv += std::to_string(j) + "," + fmt_sig(fr.coefficients[j]) + "\n";
          }
          out.emit(query,
                   {{"scale_exponent", fr.scale_exponent},
                    {"degree", fr.degree},
                    {"coefficients", coeffs},
                    {"condition_warning", fr.condition_warning},
                    {"condition_estimate", round_sig(fr.condition_estimate)}},
                   {{"method", method}, {"terms", grid.xs.size()}}, csv);
        }
      }
    } else if (c_verify->parsed()) {
      g_checks = 0;
      if (suite == "cross-method") {
        uint64_t xm = uint64_t(x_max);
        PrimeTable table = build_prime_table(std::max<uint64_t>(xm, 1000));
        suite_cross_method(k, xm, table);
      } else if (suite == "pointwise-identity") {
        PrimeTable table = build_prime_table(std::max<uint64_t>(n_max, 1000));
        suite_pointwise_identity(k, n_max, table);
      } else if (suite == "reconstruction") {
        PrimeTable table = build_prime_table(std::max<uint64_t>(entry_max * entry_max, 1000));
        suite_reconstruction(entry_max, table);
      } else if (suite == "eulerian") {
        suite_eulerian();
      } else if (suite == "constants") {
        PrimeTable table = build_prime_table(std::max<uint64_t>(prime_limit, 1000000));
        suite_constants(table);
      } else {
        throw CLI::ValidationError("--suite", "unknown suite " + suite);
      }
      std::printf("suite %s: %d checks passed\n", suite.c_str(), g_checks);
    } else if (c_table->parsed()) {
      PrimeTable table = build_prime_table(std::max<uint64_t>(n_max, 1000));
      std::string csv;
      json rows = json::array();
      json query = {{"command", "table"}, {"what", what}};
      if (what == "f") {
        FunctionId f = parse_f(ff, k);
        query["f"] = f.name();
        csv = "n,value\n";
        for (uint64_t n = 1; n <= n_max; ++n) {
          ScalarValue v = eval_f(f, n, table);
          rows.push_back(scalar_json(v));
          csv += std::to_string(n) + "," + scalar_csv(v) + "\n";
        }
      } else if (what == "convolute") {
        ConvoluteKind kind = parse_kind(form, ff, k);
        kind.validate();
        query["form"] = form;
        query["k"] = k;
        csv = "n,value\n";
        for (uint64_t n = 1; n <= n_max; ++n) {
          ScalarValue v;
          if (kind.form == ConvoluteForm::PlainTauK)
            v = tau_k_point(k, n, table);
          else if (kind.form == ConvoluteForm::GcdOf)
            v = convolute_gcd(kind.f, k, n, table);
          else
            v = convolute_lcm(kind.f, k, n, table);
          rows.push_back(scalar_json(v));
          csv += std::to_string(n) + "," + scalar_csv(v) + "\n";
        }
      } else if (what == "piltz") {
        query["k"] = k;
        csv = "x,value\n";
        for (uint64_t n = 1; n <= n_max; ++n) {
          ScalarValue v = piltz_summatory(k, double(n));
          rows.push_back(scalar_json(v));
          csv += std::to_string(n) + "," + scalar_csv(v) + "\n";
        }
      } else if (what == "eulerian") {
        query["t"] = t_flag;
        csv = "t,m,value\n";
        for (int t = 1; t <= t_flag; ++t) {
          auto row = eulerian_row(t);
          json jrow = json::array();
          for (size_t m = 0; m < row.size(); ++m) {
            jrow.push_back(scalar_json(ScalarValue::from_int(row[m])));
            csv += std::to_string(t) + "," + std::to_string(m) + "," + to_string(row[m]) + "\n";
          }
          rows.push_back(jrow);
        }
      } else if (what == "theta") {
        csv = "k,theta,floor_gcd_route,floor_lcm_route\n";
        for (int kk = 2; kk <= 12; ++kk) {
          json row = {{"k", kk},
                      {"theta", round_sig(theta_reference(kk))},
                      {"floor_gcd_route", round_sig(theta_floor_gcd(kk))},
                      {"floor_lcm_route", 0.5}};
          rows.push_back(row);
          csv += std::to_string(kk) + "," + fmt_sig(theta_reference(kk)) + "," +
                 fmt_sig(theta_floor_gcd(kk)) + ",0.5\n";
        }
      } else {
        throw CLI::ValidationError("--what", "unknown table " + what);
      }
      out.emit(query, {{"rows", rows}}, {{"method", "table"}, {"terms", rows.size()}}, csv);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const verification_error& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return 4;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 5;
  } catch (const domain_error& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 3;
  } catch (const overflow_error& e) {
    std::fprintf(stderr, "overflow: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

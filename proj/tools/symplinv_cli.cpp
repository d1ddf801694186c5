// Command-line front end: factor, verify, census and paper-checks.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 refused input (the element
// has no factorization here or the census is out of budget), 3 failed
// verification. Every run ends with one JSON status line on stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "symplinv/io.hpp"

using namespace symplinv;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kIo = 1, kRefused = 2, kVerification = 3 };

struct RunConfig {
  std::string command;
  std::string field = "q";
  std::uint64_t p = 0;
  std::size_t dim = 4;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;
  bool extended = false;
};

// Thrown for failures that map to exit code 1.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int finish(int code, json status) {
  status["exit"] = code;
  std::cerr << status.dump() << '\n';
  return code;
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  out << text;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoFailure(std::string("malformed JSON: ") + e.what());
  }
}

Field field_of(const RunConfig& cfg) {
  if (cfg.field == "q" || cfg.field == "Q") return Field::rationals();
  if (cfg.field == "fp" || cfg.field == "Fp") {
    if (cfg.p == 0) throw IoFailure("--field fp needs --p");
    return Field::prime(cfg.p);
  }
  return Field::from_name(cfg.field);
}

// Product of 20 transvections with entries in {-1, 0, 1}.
SPair random_element(const RunConfig& cfg) {
  Field f = field_of(cfg);
  SymplecticSpace space = SymplecticSpace::standard(f, cfg.dim);
  Rng rng(cfg.seed);
  Matrix u = space.identity();
  for (int i = 0; i < 20; ++i) {
    Matrix v(f, cfg.dim, 1);
    for (std::size_t r = 0; r < cfg.dim; ++r) v(r, 0) = f.from_int(rng.range(-1, 1));
    u = u * transvection(space, v, rng.below(2) ? f.one() : -f.one());
  }
  return SPair(space, u);
}

SPair read_pair(const RunConfig& cfg) {
  if (cfg.in.empty()) return random_element(cfg);
  json j = parse_json(read_input(cfg.in));
  if (j.is_object() && !j.contains("field")) j["field"] = field_of(cfg).name();
  try {
    return io::pair_from_json(j);
  } catch (const Error& e) {
    throw IoFailure(std::string(error_name(e.code())) + ": " + e.what());
  }
}

int cmd_factor(const RunConfig& cfg) {
  SPair pair = read_pair(cfg);
  Certificate cert = factor(pair, cfg.seed);
  Verdict v = verify_certificate(cert);
  if (!v.ok) return finish(kVerification, {{"command", "factor"}, {"status", "verification-failed"}, {"reasons", v.reasons}});
  write_output(cfg.out, io::certificate_to_json(cert).dump(2) + "\n");
  return finish(kOk, {{"command", "factor"},
                      {"status", "ok"},
                      {"dim", pair.dim()},
                      {"factors", cert.factors.size()},
                      {"bound", factor_bound(pair.dim())}});
}

int cmd_verify(const RunConfig& cfg) {
  json j = parse_json(read_input(cfg.in));
  Certificate cert;
  try {
    cert = io::certificate_from_json(j);
  } catch (const Error& e) {
    throw IoFailure(std::string(error_name(e.code())) + ": " + e.what());
  }
  Verdict v = verify_certificate(cert);
  for (const auto& r : v.reasons) std::cout << r << '\n';
  if (!v.ok) return finish(kVerification, {{"command", "verify"}, {"status", "rejected"}, {"reasons", v.reasons}});
  return finish(kOk, {{"command", "verify"}, {"status", "ok"}, {"factors", cert.factors.size()}});
}

int cmd_census(const RunConfig& cfg) {
  std::uint64_t p = cfg.p == 0 ? 3 : cfg.p;
  if (cfg.extended && p == 5 && cfg.dim == 4) {
    // No table for Sp_4(F_5): report the involutions and the meet-in-the-middle verdicts.
    census::PackedOps ops(5, 4);
    auto invs = census::involutions_from_planes(ops);
    census::ReflectionOracle oracle(ops, invs);
    json examples = json::array();
    for (long long a : {0LL, 1LL, 4LL}) {
      Matrix u = census::detail::identity_plus_companion(ops.field(), a);
      examples.push_back({{"matrix", io::rows_to_json(u)}, {"three_reflectional", oracle.is_k_reflectional(ops.encode(u), 3)}});
    }
    json doc = {{"field", "F5"}, {"dim", 4}, {"order", census::symplectic_group_order(5, 4)},
                {"involutions", invs.size()}, {"examples", examples}};
    write_output(cfg.out, doc.dump(2) + "\n");
    return finish(kOk, {{"command", "census"}, {"status", "ok"}, {"p", 5}, {"dim", 4}, {"mode", "meet-in-the-middle"}});
  }
  census::GroupTable g = census::enumerate_group(p, cfg.dim);
  census::LengthTable l = census::reflection_lengths(g);
  std::ostringstream csv;
  census::write_census_csv(csv, g, l);
  write_output(cfg.out, csv.str());
  return finish(kOk, {{"command", "census"},
                      {"status", "ok"},
                      {"p", p},
                      {"dim", cfg.dim},
                      {"elements", g.size()},
                      {"max_length", l.max_length()}});
}

int cmd_checks(const RunConfig& cfg) {
  census::CheckOptions opt;
  opt.seed = cfg.seed;
  opt.extended = cfg.extended;
  census::CheckReport r = census::run_checks(opt);
  write_output(cfg.out, io::report_to_json(r).dump(2) + "\n");
  std::size_t passed = 0;
  for (const auto& c : r.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    passed += c.passed;
  }
  return finish(r.all_passed() ? kOk : kVerification,
                {{"command", "paper-checks"}, {"status", r.all_passed() ? "ok" : "failed"}, {"passed", passed},
                 {"total", r.checks.size()}});
}

int refused_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return kIo;
    case ErrorCode::InternalCheckFailed: return kVerification;
    default: return kRefused;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factor symplectic matrices into involutions and census small symplectic groups."};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--field", cfg.field, "q for the rationals, fp for F_p (with --p), or a name such as F7")
        ->capture_default_str();
    sub->add_option("--p", cfg.p, "prime modulus");
    sub->add_option("--dim", cfg.dim, "dimension of the symplectic space")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for every random choice")->capture_default_str();
    sub->add_option("--in", cfg.in, "input JSON file, - for stdin");
    sub->add_option("--out", cfg.out, "output file, stdout when omitted");
    sub->add_flag("--extended", cfg.extended, "include Sp_4(F_5) through the meet-in-the-middle oracle");
  };
  auto* f = app.add_subcommand("factor", "factor an element given as {field, gram?, u}, or a random one");
  auto* v = app.add_subcommand("verify", "check a factorization certificate");
  auto* c = app.add_subcommand("census", "CSV of Sp_dim(F_p) with exact reflection lengths");
  auto* k = app.add_subcommand("paper-checks", "run the finite-group and identity checks");
  for (auto* sub : {f, v, c, k}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return finish(kOk, {{"status", "help"}});
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return finish(kIo, {{"status", "usage"}, {"reason", e.what()}});
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.command == "factor") return cmd_factor(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "census") return cmd_census(cfg);
    return cmd_checks(cfg);
  } catch (const IoFailure& e) {
    return finish(kIo, {{"command", cfg.command}, {"status", "io-error"}, {"reason", e.what()}});
  } catch (const Error& e) {
    int code = refused_code(e.code());
    return finish(code, {{"command", cfg.command}, {"status", "error"}, {"reason", error_name(e.code())}, {"detail", e.what()}});
  } catch (const std::exception& e) {
    return finish(kIo, {{"command", cfg.command}, {"status", "io-error"}, {"reason", e.what()}});
  }
}

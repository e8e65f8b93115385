#pragma once

// Command-line front end. run() parses arguments, solves, prints the report
// and returns the process exit code: 0 yes, 1 no, 2 input error, 3 guard.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aboveavg/boolean_csp.hpp"
#include "aboveavg/exact_search.hpp"
#include "aboveavg/io.hpp"
#include "aboveavg/lin2.hpp"
#include "aboveavg/perm_ordering.hpp"
#include "aboveavg/report.hpp"

namespace aboveavg::cli {

enum ExitCode : int { kYes = 0, kNo = 1, kInputError = 2, kResourceGuard = 3 };

struct Options {
  std::string command;
  std::string input;
  std::string out;
  std::string eps;
  Weight k = 1;
  std::size_t guard = 0;  // 0: per-solver default
  std::uint64_t seed = 0;
  bool quiet = false;
};

inline std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

inline Rational parse_eps(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("eps must be written NUM/DEN");
  }
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  f << contents;
}

namespace detail {

inline std::size_t guard_or(const Options& o, std::size_t fallback) { return o.guard ? o.guard : fallback; }

inline int lin2_command(const Options& o, RunReport& r) {
  const auto sys = parse_lin2(read_input(o.input));
  r.num_vars = sys.num_vars;
  r.num_constraints = sys.equations.size();
  r.total_weight = sys.original_total_weight();
  r.average = Rational(sys.original_total_weight(), 2);

  if (o.command == "oracle-lin2") {
    const auto opt = brute_force_lin2(sys);
    r.verdict = "optimum";
    r.branch = "exact";
    r.optimum = opt.weight + sys.offset;
    r.witness = format_witness(opt.assignment);
    return kYes;
  }

  r.k = o.k;
  r.threshold = lin2_threshold(sys, o.k);
  if (o.command == "solve-lin2") {
    const auto v = solve_aa(sys, o.k, {guard_or(o, kDefaultExhaustiveGuard)});
    r.verdict = v.yes ? "yes" : "no";
    r.branch = std::string(to_string(v.branch));
    (v.yes ? r.achieved : r.optimum) = v.weight;
    r.witness = format_witness(v.witness);
    return v.yes ? kYes : kNo;
  }

  // kernelize-lin2
  const auto result = kernelize(sys, o.k);
  if (const auto* yes = std::get_if<Lin2YesCertificate>(&result)) {
    r.verdict = "yes";
    r.branch = std::string(to_string(Branch::yes_certificate));
    r.achieved = yes->weight;
    r.witness = format_witness(yes->assignment);
    return kYes;
  }
  const auto& kernel = std::get<Lin2Kernel>(result);
  r.verdict = "kernel";
  r.extra.emplace_back("kernel_vars", std::to_string(kernel.system.num_vars));
  r.extra.emplace_back("kernel_equations", std::to_string(kernel.system.equations.size()));
  r.extra.emplace_back("kernel_offset", std::to_string(kernel.system.offset));
  r.extra.emplace_back("kernel_bound", std::to_string(lin2_kernel_bound(sys.arity_bound, o.k)));
  if (!o.out.empty()) {
    write_file(o.out, serialize_lin2(kernel.system));
    r.extra.emplace_back("kernel_file", o.out);
  }
  return kYes;
}

inline int csp_command(const Options& o, RunReport& r) {
  const auto inst = parse_csp(read_input(o.input));
  inst.validate();
  r.num_vars = inst.num_vars;
  r.num_constraints = inst.constraints.size();
  r.total_weight = inst.total_weight();
  r.average = average_weight(inst);

  if (o.command == "oracle-csp") {
    const auto opt = brute_force_csp(inst);
    r.verdict = "optimum";
    r.branch = "exact";
    r.optimum = opt.weight;
    r.witness = format_witness(opt.assignment);
    return kYes;
  }

  if (o.command == "hybrid-csp") {
    const Rational eps = parse_eps(o.eps);
    const auto h = hybrid_solve(inst, eps, {guard_or(o, kDefaultExhaustiveGuard)});
    r.eps = eps;
    const bool exact = h.kind == HybridResult::Kind::exact;
    r.verdict = exact ? "exact" : "approx";
    r.branch = r.verdict;
    r.achieved = h.weight;
    if (exact) r.optimum = h.weight;
    r.threshold = hybrid_approx_bound(inst, eps);
    r.witness = format_witness(h.assignment);
    r.extra.emplace_back("hybrid_k", std::to_string(h.k));
    return kYes;
  }

  r.k = o.k;
  r.threshold = csp_threshold(inst, o.k);
  if (o.command == "solve-csp") {
    const auto v = solve_csp_aa(inst, o.k, {guard_or(o, kDefaultExhaustiveGuard)});
    r.verdict = v.yes ? "yes" : "no";
    r.branch = std::string(to_string(v.branch));
    (v.yes ? r.achieved : r.optimum) = v.weight;
    r.witness = format_witness(v.witness);
    return v.yes ? kYes : kNo;
  }

  // kernelize-csp
  const auto result = kernelize_csp(inst, o.k);
  if (const auto* yes = std::get_if<CspYesCertificate>(&result)) {
    r.verdict = "yes";
    r.branch = std::string(to_string(Branch::yes_certificate));
    r.achieved = yes->weight;
    r.witness = format_witness(yes->assignment);
    return kYes;
  }
  const auto& kernel = std::get<CspKernel>(result);
  r.verdict = "kernel";
  r.extra.emplace_back("kernel_vars", std::to_string(kernel.instance.num_vars));
  r.extra.emplace_back("kernel_constraints", std::to_string(kernel.instance.constraints.size()));
  r.extra.emplace_back("new_k", std::to_string(kernel.k));
  r.extra.emplace_back("kernel_bound", std::to_string(lin2_kernel_bound(std::max(2u, inst.arity_bound), o.k)));
  if (!o.out.empty()) {
    write_file(o.out, serialize_csp(kernel.instance));
    r.extra.emplace_back("kernel_file", o.out);
  }
  return kYes;
}

inline void add_stats(const OrderingRunStats& s, RunReport& r) {
  r.extra.emplace_back("reduced_vars", std::to_string(s.reduced_vars));
  r.extra.emplace_back("lin2_vars", std::to_string(s.lin2_vars));
}

inline int ordering_command(const Options& o, RunReport& r) {
  const std::size_t guard = guard_or(o, kDefaultHeldKarpGuard);
  if (o.command == "solve-perm") {
    const auto inst = parse_perm(read_input(o.input));
    inst.validate();
    r.num_vars = inst.num_vars;
    r.num_constraints = inst.constraints.size();
    r.total_weight = inst.total_weight();
    r.average = rho_W(inst);
    r.k = o.k;
    r.threshold = r.average + Rational(o.k);
    OrderingRunStats stats;
    const auto v = solve_perm_aa(inst, o.k, {guard}, &stats);
    r.verdict = v.yes ? "yes" : "no";
    r.branch = std::string(to_string(v.branch));
    (v.yes ? r.achieved : r.optimum) = v.weight;
    r.witness = format_witness(v.witness);
    add_stats(stats, r);
    return v.yes ? kYes : kNo;
  }

  const auto inst = parse_ordering(read_input(o.input));
  inst.validate();
  r.num_vars = inst.num_vars;
  r.num_constraints = inst.constraints.size();
  r.total_weight = inst.total_weight();
  r.average = rho_W(inst);

  if (o.command == "exact-ord" || o.command == "oracle-ord") {
    const auto opt = o.command == "exact-ord" ? held_karp_ordering(inst, guard) : brute_force_ordering(inst);
    r.verdict = "optimum";
    r.branch = o.command == "exact-ord" ? std::string(to_string(Branch::held_karp)) : "exact";
    r.optimum = opt.weight;
    r.witness = format_witness(opt.ordering);
    return kYes;
  }

  // solve-ord
  r.k = o.k;
  r.threshold = ordering_threshold(inst, o.k);
  OrderingRunStats stats;
  const auto v = solve_ordering_aa(inst, o.k, {guard}, &stats);
  r.verdict = v.yes ? "yes" : "no";
  r.branch = std::string(to_string(v.branch));
  (v.yes ? r.achieved : r.optimum) = v.weight;
  r.witness = format_witness(v.witness);
  add_stats(stats, r);
  return v.yes ? kYes : kNo;
}

}  // namespace detail

/// Dispatches an already-parsed command.
inline int execute(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = o.command;
  int code = kInputError;
  try {
    if (o.k < 1) throw std::invalid_argument("--k must be positive");
    if (o.command.ends_with("lin2")) {
      code = detail::lin2_command(o, report);
    } else if (o.command.ends_with("csp")) {
      code = detail::csp_command(o, report);
    } else {
      code = detail::ordering_command(o, report);
    }
  } catch (const ResourceGuardError& e) {
    err << "resource guard: " << e.what() << "; raise --guard or eps\n";
    return kResourceGuard;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ArithmeticOverflow& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  report.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  out << report.serialize(!o.quiet) << std::flush;
  return code;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Above-average solvers for Max-c-Lin-2, Max-c-CSP and permutation CSPs", "aboveavg"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "seed for randomized fallbacks (the default pipeline is deterministic)");
  app.add_option("--guard", o.guard, "variable ceiling for exhaustive search and subset DP");
  app.add_flag("--quiet", o.quiet, "omit the witness line");

  struct Spec {
    const char* name;
    const char* help;
    bool k;
    bool out;
    bool eps;
  };
  const Spec specs[] = {
      {"solve-lin2", "decide Max-c-Lin-2 above average", true, false, false},
      {"kernelize-lin2", "certificate or kernel for Max-c-Lin-2", true, true, false},
      {"solve-csp", "decide Max-c-CSP above average", true, false, false},
      {"hybrid-csp", "approximate beyond average or solve exactly", false, false, true},
      {"kernelize-csp", "certificate or kernel for Max-c-CSP", true, true, false},
      {"solve-ord", "decide linear ordering above average", true, false, false},
      {"solve-perm", "decide permutation CSP above average", true, false, false},
      {"exact-ord", "optimal linear ordering by subset DP", false, false, false},
      {"oracle-lin2", "brute-force Max-c-Lin-2 optimum", false, false, false},
      {"oracle-csp", "brute-force Max-c-CSP optimum", false, false, false},
      {"oracle-ord", "brute-force linear ordering optimum", false, false, false},
  };
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("input", o.input, "instance file, '-' for stdin")->required();
    if (s.k) sub->add_option("--k", o.k, "parameter k")->required();
    if (s.out) sub->add_option("--out", o.out, "kernel output file");
    if (s.eps) sub->add_option("--eps", o.eps, "eps as NUM/DEN")->required();
    sub->callback([&o, name = std::string(s.name)] { o.command = name; });
  }

  std::vector<const char*> argv{"aboveavg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kYes;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return execute(o, out, err);
}

}  // namespace aboveavg::cli

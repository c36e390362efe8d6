/**
 * Copyright 2026 The dicke-lqg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: graph, verify, compile, simulate, scan.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dicke/dicke.hpp"

namespace {

using namespace dicke;

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kBudget = 3, kConsistency = 4 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::vector<unsigned> parse_list(const std::string& s) {
  std::vector<unsigned> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const long v = std::stol(item, &used);
    if (used != item.size() || v < 1) throw ValidationError("bad list entry '" + item + "'");
    out.push_back(static_cast<unsigned>(v));
  }
  return out;
}

Backend parse_backend(const std::string& s) {
  if (s == "exact") return Backend::Exact;
  if (s == "float") return Backend::Float;
  return Backend::Auto;
}

struct GraphArgs {
  unsigned n = 0, k = 0;
  bool degenerate = false;
  std::string format = "json", output;
};

int cmd_graph(const GraphArgs& a) {
  const auto g = build_dicke_digraph(a.n, a.k, std::nullopt, a.degenerate);
  const auto covers = enumerate_dccs(g);
  if (a.format == "dot") {
    emit(digraph_to_dot(g), a.output);
    std::cerr << "dcc_count " << covers.size() << "\n";
    return kOk;
  }
  if (a.format == "svg") {
    emit(digraph_to_svg(g), a.output);
    return kOk;
  }
  const auto b = digraph_to_bigraph(g);
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = a.n;
  j["k"] = a.k;
  j["dcc_count"] = covers.size();
  j["dcc_formula"] = dcc_count_formula(a.n, a.k).get_str();
  j["matching_count"] = enumerate_perfect_matchings(b).size();
  j["epm_digraph"] = is_epm_digraph(g);
  j["epm_bigraph"] = is_epm_bigraph(b);
  j["digraph"] = digraph_to_json(g);
  j["bigraph"] = bigraph_to_json(b);
  emit(dump_json(j), a.output);
  return kOk;
}

struct VerifyArgs {
  unsigned n = 0, k = 0, max_n = 6;
  bool degenerate = false;
  std::string format = "text", output;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.n > a.max_n) {
    std::cerr << "resource limit: n = " << a.n << " exceeds --max-n " << a.max_n << "\n";
    return kBudget;
  }
  const auto v = verify_dicke_graph<ExactScalar>(a.n, a.k, std::nullopt, a.degenerate);
  if (a.format == "json") {
    emit(dump_json(graph_verification_json(v)), a.output);
  } else {
    std::ostringstream os;
    os << "n " << a.n << " k " << a.k << " dcc_count " << v.dcc_count << " matchings " << v.matching_count
       << " graph_fidelity " << (v.fidelity.is_rational() ? v.fidelity.to_rational().get_str() : v.fidelity.to_string())
       << " " << (v.passed() ? "PASS" : "FAIL") << "\n";
    emit(os.str(), a.output);
  }
  return v.passed() ? kOk : kConsistency;
}

struct CompileArgs {
  unsigned n = 0, k = 0;
  std::optional<double> alpha, beta;
  std::string format = "json", output;
};

int cmd_compile(const CompileArgs& a) {
  const auto best = optimal_splitting(a.n, a.k);
  const auto c = compile(a.n, a.k, a.alpha.value_or(best.alpha), a.beta.value_or(best.beta));
  if (c.mode_count() != 5u * a.n + 2u * a.n * a.k) throw ConsistencyError("mode count law violated");
  if (circuit_unitary(c).unitarity_defect() > 1e-12) throw ConsistencyError("compiled circuit is not unitary");
  emit(a.format == "svg" ? circuit_to_svg(c) : dump_json(circuit_to_json(c)), a.output);
  return kOk;
}

struct SimulateArgs {
  unsigned n = 0, k = 0;
  std::optional<double> alpha, beta;
  std::string backend = "auto", format = "json", output, patterns;
  std::size_t budget = 100000000;
  bool unfiltered = false, no_graph = false;
};

int cmd_simulate(const SimulateArgs& a) {
  SimulateOptions o;
  o.backend = parse_backend(a.backend);
  o.alpha = a.alpha;
  o.beta = a.beta;
  o.budget = a.budget;
  if (a.unfiltered) o.filtered = false;
  o.graph_check = !a.no_graph;
  o.record_patterns = !a.patterns.empty();
  const auto r = simulate_scheme(a.n, a.k, o);
  if (a.format == "csv") {
    ScanResult s;
    ScanRow row;
    row.n = r.n;
    row.k = r.k;
    row.alpha = r.alpha;
    row.beta = r.beta;
    row.p_closed = r.p_success_closed_form;
    row.log10_p = std::log10(r.p_success_closed_form);
    row.p_simulated = r.p_success_simulated;
    row.accepted_patterns = r.accepted_pattern_count;
    row.fidelity = r.circuit_fidelity;
    s.rows.push_back(row);
    emit(scan_csv(s), a.output);
  } else {
    emit(dump_json(scheme_report_json(r)), a.output);
  }
  if (!a.patterns.empty()) emit(pattern_csv(r), a.patterns);
  if (!r.passed()) {
    std::cerr << "simulated and closed-form results disagree (relative error " << format_real(r.relative_error)
              << ", accepted " << r.accepted_pattern_count << " of " << r.feedforward_factor << ")\n";
    return kConsistency;
  }
  return kOk;
}

struct ScanArgs {
  std::string ks = "2,3,4", format = "csv", output, gnuplot, backend = "auto";
  unsigned n_min = 1, n_max = 10, simulate_max_n = 0;
};

int cmd_scan(const ScanArgs& a) {
  const auto ks = parse_list(a.ks);
  SimulateOptions o;
  o.backend = parse_backend(a.backend);
  const auto s = run_scan(ks, a.n_min, a.n_max, a.simulate_max_n, o);
  emit(a.format == "json" ? dump_json(scan_json(s)) : scan_csv(s), a.output);
  if (!a.gnuplot.empty()) emit(scan_gnuplot(a.output.empty() ? "scan.csv" : a.output, ks), a.gnuplot);
  for (const auto& r : s.rows) {
    if (!(r.p_closed > 0.0 && r.p_closed <= 1.0)) throw ConsistencyError("scan row outside (0, 1]");
    if (r.p_simulated && std::abs(*r.p_simulated - r.p_closed) > 1e-9 * r.p_closed)
      throw ConsistencyError("simulated probability disagrees with the closed form at n=" + std::to_string(r.n) +
                             " k=" + std::to_string(r.k));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dicke-state generation via sculpting graphs and linear optics"};
  app.require_subcommand(1);

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "Build the Dicke digraph and its bigraph; report cover counts");
  graph->add_option("--n", ga.n, "system qubits")->required();
  graph->add_option("--k", ga.k, "excitations")->required();
  graph->add_flag("--degenerate", ga.degenerate, "allow k = 0 and k = n");
  graph->add_option("--format", ga.format)->check(CLI::IsMember({"json", "dot", "svg"}));
  graph->add_option("-o,--output", ga.output);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Exact graph-side check of the produced state");
  verify->add_option("--n", va.n)->required();
  verify->add_option("--k", va.k)->required();
  verify->add_option("--max-n", va.max_n, "largest n attempted symbolically");
  verify->add_flag("--degenerate", va.degenerate);
  verify->add_option("--format", va.format)->check(CLI::IsMember({"text", "json"}));
  verify->add_option("-o,--output", va.output);

  CompileArgs ca;
  auto* comp = app.add_subcommand("compile", "Emit the linear-optical circuit");
  comp->add_option("--n", ca.n)->required();
  comp->add_option("--k", ca.k)->required();
  comp->add_option("--alpha", ca.alpha);
  comp->add_option("--beta", ca.beta);
  comp->add_option("--format", ca.format)->check(CLI::IsMember({"json", "svg"}));
  comp->add_option("-o,--output", ca.output);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate the heralded circuit and compare with the closed form");
  sim->add_option("--n", sa.n)->required();
  sim->add_option("--k", sa.k)->required();
  sim->add_option("--alpha", sa.alpha);
  sim->add_option("--beta", sa.beta);
  sim->add_option("--backend", sa.backend)->check(CLI::IsMember({"auto", "exact", "float"}));
  sim->add_option("--budget", sa.budget, "maximum number of expanded terms");
  sim->add_flag("--unfiltered", sa.unfiltered, "expand every output term (enables the completeness sum)");
  sim->add_flag("--no-graph-check", sa.no_graph);
  sim->add_option("--format", sa.format)->check(CLI::IsMember({"json", "csv"}));
  sim->add_option("--patterns", sa.patterns, "write per-pattern CSV here");
  sim->add_option("-o,--output", sa.output);

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "Success probability table over n for several k");
  scan->add_option("--k", sc.ks, "comma-separated k values");
  scan->add_option("--n-min", sc.n_min);
  scan->add_option("--n-max", sc.n_max);
  scan->add_option("--simulate-max-n", sc.simulate_max_n, "also simulate rows with n up to this value");
  scan->add_option("--backend", sc.backend)->check(CLI::IsMember({"auto", "exact", "float"}));
  scan->add_option("--format", sc.format)->check(CLI::IsMember({"csv", "json"}));
  scan->add_option("-o,--output", sc.output);
  scan->add_option("--gnuplot", sc.gnuplot, "write a gnuplot script here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*graph) return cmd_graph(ga);
    if (*verify) return cmd_verify(va);
    if (*comp) return cmd_compile(ca);
    if (*sim) return cmd_simulate(sa);
    if (*scan) return cmd_scan(sc);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NotRepresentable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const BudgetExceeded& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kBudget;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return kConsistency;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

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

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/circuit_compiler.hpp"
#include "dicke/closed_form.hpp"
#include "dicke/graph_io.hpp"
#include "dicke/photonic_sim.hpp"

namespace dicke {

inline constexpr int kSchemaVersion = 1;

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

namespace report_detail {

inline void quote(std::ostringstream& os, const std::string& s) {
  os << ordered_json(s).dump();
}

inline void write(std::ostringstream& os, const ordered_json& j, int indent, int depth) {
  const std::string pad(std::size_t(indent * (depth + 1)), ' '), close(std::size_t(indent * depth), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        quote(os, k);
        os << ": ";
        write(os, v, indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // scalar arrays stay on one line
      bool flat = true;
      for (const auto& v : j)
        if (v.is_structured()) flat = false;
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case ordered_json::value_t::number_float:
      if (!std::isfinite(j.get<double>())) {
        os << "null";
        return;
      }
      os << format_real(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace report_detail

/// Deterministic JSON text: insertion-ordered keys and every float as %.12e.
inline std::string dump_json(const ordered_json& j, int indent = 2) {
  std::ostringstream os;
  report_detail::write(os, j, indent, 0);
  os << "\n";
  return os.str();
}

template <class T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json scheme_report_json(const SchemeReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = r.n;
  j["k"] = r.k;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["optimal_splitting"] = r.optimal_splitting;
  j["backend"] = r.backend;
  j["dcc_count"] = optional_json(r.dcc_count);
  j["graph_fidelity"] = optional_json(r.graph_fidelity);
  j["circuit_fidelity"] = r.circuit_fidelity;
  j["single_pattern_amplitude"] = r.single_pattern_amplitude;
  j["single_pattern_amplitude_closed_form"] = r.single_pattern_amplitude_closed_form;
  j["accepted_pattern_count"] = r.accepted_pattern_count;
  j["feedforward_factor"] = r.feedforward_factor;
  j["correctable_pattern_count"] = r.correctable_pattern_count;
  j["p_success_simulated"] = r.p_success_simulated;
  j["p_success_closed_form"] = r.p_success_closed_form;
  j["p_success_correctable"] = r.p_success_correctable;
  j["relative_error"] = r.relative_error;
  j["exact_match"] = optional_json(r.exact_match);
  j["total_probability"] = optional_json(r.total_probability);
  j["filtered_expansion"] = r.filtered;
  j["output_terms"] = r.output_terms;
  j["pattern_count"] = r.pattern_count;
  j["passed"] = r.passed();
  return j;
}

template <class S>
ordered_json graph_verification_json(const GraphVerification<S>& g) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = g.n;
  j["k"] = g.k;
  j["epm_digraph"] = g.epm_digraph;
  j["epm_bigraph"] = g.epm_bigraph;
  j["dcc_count"] = g.dcc_count;
  j["dcc_formula"] = g.dcc_formula.get_str();
  j["matching_count"] = g.matching_count;
  j["self_loop_counts"] = std::vector<std::size_t>(g.self_loop_counts.begin(), g.self_loop_counts.end());
  j["no_bunching"] = g.no_bunching;
  j["two_path_equal"] = g.two_path_equal;
  j["final_state_terms"] = g.final_state.size();
  if constexpr (ScalarTraits<S>::kExact) {
    j["fidelity_exact"] = g.fidelity.to_string();
  }
  j["graph_fidelity"] = g.fidelity_value;
  j["passed"] = g.passed();
  return j;
}

template <class S>
ordered_json circuit_to_json(const OpticalCircuit<S>& c) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = c.n;
  j["k"] = c.k;
  j["alpha"] = ScalarTraits<S>::real(c.alpha);
  j["beta"] = ScalarTraits<S>::real(c.beta);
  auto modes = ordered_json::array();
  for (const auto& m : c.modes) modes.push_back({{"id", m.id}, {"origin", m.origin}});
  j["modes"] = modes;
  auto layers = ordered_json::array();
  for (const auto& e : c.layers) {
    ordered_json l;
    l["step"] = e.step;
    l["kind"] = element_kind_name(e.kind);
    l["modes"] = e.modes;
    auto rows = ordered_json::array();
    for (std::size_t r = 0; r < e.matrix.rows(); ++r) {
      auto row = ordered_json::array();
      for (std::size_t col = 0; col < e.matrix.cols(); ++col) {
        const Complex z = ScalarTraits<S>::to_complex(e.matrix(r, col));
        // clean negative zeros so the text is stable
        row.push_back(ordered_json::array({z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()}));
      }
      rows.push_back(row);
    }
    l["matrix"] = rows;
    layers.push_back(l);
  }
  j["layers"] = layers;
  j["detectors"] = c.detectors;
  auto groups = ordered_json::array();
  for (const auto& g : c.detector_groups) {
    const char* kind = g.kind == DetectorGroupKind::SBranch   ? "s_branch"
                       : g.kind == DetectorGroupKind::TBranch ? "t_branch"
                                                               : "system_pair";
    groups.push_back({{"kind", kind}, {"index", g.index}, {"modes", g.modes}});
  }
  j["detector_groups"] = groups;
  j["outputs"] = c.outputs;
  return j;
}

/// Horizontal mode wires with one column of boxes per element.
template <class S>
std::string circuit_to_svg(const OpticalCircuit<S>& c) {
  const double dy = 14, dx = 26, left = 110, top = 20;
  const double width = left + dx * double(c.layers.size() + 2), height = top * 2 + dy * double(c.mode_count());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, R"x(<svg xmlns="http://www.w3.org/2000/svg" width="%.0f" height="%.0f">)x", width,
                height);
  os << buf << "\n";
  std::vector<bool> detected(c.mode_count(), false);
  for (auto d : c.detectors) detected[d] = true;
  for (const auto& m : c.modes) {
    const double y = top + dy * double(m.id);
    std::snprintf(buf, sizeof buf,
                  R"x(  <text x="4" y="%.1f" font-size="9">%s</text><line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" stroke="%s"/>)x",
                  y + 3, m.origin.c_str(), left, y, width - dx, y, detected[m.id] ? "gray" : "black");
    os << buf << "\n";
  }
  const char* fill[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#dadaeb", "#fcbba1"};
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    const auto& e = c.layers[i];
    const auto [lo, hi] = std::minmax_element(e.modes.begin(), e.modes.end());
    const double x = left + dx * double(i + 1) - 8;
    std::snprintf(buf, sizeof buf,
                  R"x(  <rect x="%.1f" y="%.1f" width="16" height="%.1f" fill="%s" stroke="black"><title>step %d %s</title></rect>)x",
                  x, top + dy * double(*lo) - 5, dy * double(*hi - *lo) + 10, fill[static_cast<int>(e.kind) % 5],
                  e.step, element_kind_name(e.kind));
    os << buf << "\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// One line per heralding pattern: pattern,weight,accepted,fidelity.
inline std::string pattern_csv(const SchemeReport& r) {
  std::ostringstream os;
  os << "pattern,weight,accepted,fidelity\n";
  for (const auto& p : r.patterns)
    os << p.pattern << "," << format_real(p.weight) << "," << (p.accepted ? 1 : 0) << ","
       << (p.fidelity ? format_real(*p.fidelity) : std::string()) << "\n";
  return os.str();
}

struct ScanRow {
  unsigned n = 0, k = 0;
  double alpha = 0.0, beta = 0.0;
  Rational p_exact;
  double p_closed = 0.0;
  double log10_p = 0.0;
  std::optional<double> p_simulated;
  std::optional<std::size_t> accepted_patterns;
  std::optional<double> fidelity;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<std::pair<unsigned, bool>> monotone_decreasing;  // per k
};

/**
 * Closed-form success probability for every k and n in [max(n_min, k), n_max],
 * ordered by (k, n). Rows with n <= simulate_max_n and k < n are also simulated.
 */
inline ScanResult run_scan(const std::vector<unsigned>& ks, unsigned n_min, unsigned n_max, unsigned simulate_max_n = 0,
                           const SimulateOptions& sim = {}) {
  ScanResult out;
  for (unsigned k : ks) {
    if (k < 1) throw ValidationError("scan needs k >= 1");
    bool mono = true;
    std::optional<Rational> prev;
    for (unsigned n = std::max(n_min, k); n <= n_max; ++n) {
      ScanRow r;
      r.n = n;
      r.k = k;
      const auto s = optimal_splitting(n, k);
      r.alpha = s.alpha;
      r.beta = s.beta;
      r.p_exact = success_probability_exact(n, k);
      r.p_closed = r.p_exact.get_d();
      r.log10_p = std::log10(r.p_closed);
      if (n <= simulate_max_n && k < n) {
        auto opt = sim;
        opt.graph_check = false;
        const auto rep = simulate_scheme(n, k, opt);
        r.p_simulated = rep.p_success_simulated;
        r.accepted_patterns = rep.accepted_pattern_count;
        r.fidelity = rep.circuit_fidelity;
      }
      if (prev && !(r.p_exact < *prev)) mono = false;
      prev = r.p_exact;
      out.rows.push_back(std::move(r));
    }
    out.monotone_decreasing.emplace_back(k, mono);
  }
  return out;
}

inline std::string scan_csv(const ScanResult& s) {
  std::ostringstream os;
  os << "n,k,alpha,beta,p_closed,p_simulated,log10_p,accepted_patterns,fidelity\n";
  for (const auto& r : s.rows) {
    os << r.n << "," << r.k << "," << format_real(r.alpha) << "," << format_real(r.beta) << ","
       << format_real(r.p_closed) << "," << (r.p_simulated ? format_real(*r.p_simulated) : "") << ","
       << format_real(r.log10_p) << "," << (r.accepted_patterns ? std::to_string(*r.accepted_patterns) : "") << ","
       << (r.fidelity ? format_real(*r.fidelity) : "") << "\n";
  }
  return os.str();
}

inline ordered_json scan_json(const ScanResult& s) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  auto rows = ordered_json::array();
  for (const auto& r : s.rows) {
    ordered_json row;
    row["n"] = r.n;
    row["k"] = r.k;
    row["alpha"] = r.alpha;
    row["beta"] = r.beta;
    row["p_closed"] = r.p_closed;
    row["p_closed_exact"] = r.p_exact.get_str();
    row["p_simulated"] = optional_json(r.p_simulated);
    row["log10_p"] = r.log10_p;
    row["accepted_patterns"] = optional_json(r.accepted_patterns);
    row["fidelity"] = optional_json(r.fidelity);
    rows.push_back(row);
  }
  j["rows"] = rows;
  auto diag = ordered_json::array();
  for (const auto& [k, mono] : s.monotone_decreasing) diag.push_back({{"k", k}, {"monotone_decreasing", mono}});
  j["diagnostics"] = diag;
  return j;
}

/// gnuplot script plotting log10 P against n, one curve per k, from the CSV file.
inline std::string scan_gnuplot(const std::string& csv_path, const std::vector<unsigned>& ks,
                                const std::string& png_path = "scan.png") {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set terminal pngcairo size 800,600\n"
     << "set output '" << png_path << "'\n"
     << "set xlabel 'n'\n"
     << "set ylabel 'success probability'\n"
     << "set logscale y\n"
     << "set format y '10^{%L}'\n"
     << "set key top right\n"
     << "plot";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) os << ",";
    os << " '" << csv_path << "' using ($2==" << ks[i] << " ? $1 : 1/0):5 every ::1 with linespoints title 'k=" << ks[i]
       << "'";
  }
  os << "\n";
  return os.str();
}

}  // namespace dicke

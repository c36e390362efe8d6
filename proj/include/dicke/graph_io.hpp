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
#include <sstream>
#include <string>

#include <json.hpp>

#include "dicke/lqg_graphs.hpp"

namespace dicke {

using ordered_json = nlohmann::ordered_json;

/// {re, im, field: 8 rational coordinates over zeta_24, radicand}.
inline ordered_json weight_to_json(const ExactScalar& w) {
  const Complex z = w.to_complex();
  ordered_json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  auto field = ordered_json::array();
  for (int i = 0; i < Cyclotomic24::kDegree; ++i) field.push_back(w.field_part().coeff(i).get_str());
  j["field"] = field;
  j["radicand"] = w.radicand();
  return j;
}

inline ExactScalar weight_from_json(const ordered_json& j) {
  try {
    Cyclotomic24 v;
    const auto& field = j.at("field");
    if (!field.is_array() || field.size() != std::size_t(Cyclotomic24::kDegree))
      throw ValidationError("weight field must list 8 rationals");
    for (int i = 0; i < Cyclotomic24::kDegree; ++i) {
      Rational q(field[std::size_t(i)].get<std::string>());
      q.canonicalize();
      v = v + Cyclotomic24::zeta_power(i).scaled(q);
    }
    const auto r = j.at("radicand").get<std::uint64_t>();
    if (r == 0 || r % 2 == 0 || r % 3 == 0) throw ValidationError("radicand must be positive and coprime to 6");
    for (std::uint64_t f = 5; f * f <= r; f += 2)
      if (r % (f * f) == 0) throw ValidationError("radicand must be squarefree");
    return ExactScalar(v, r);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed weight: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("malformed rational: ") + e.what());
  }
}

inline ordered_json vertex_to_json(const Vertex& v) {
  return {{"role", role_name(v.role)}, {"index", v.index}, {"name", v.name()}};
}

inline ordered_json digraph_to_json(const SculptingDigraph& g) {
  ordered_json j;
  auto vs = ordered_json::array();
  for (const auto& v : g.vertices()) vs.push_back(vertex_to_json(v));
  auto es = ordered_json::array();
  for (const auto& e : g.edges())
    es.push_back({{"source", e.source}, {"target", e.target}, {"color", color_name(e.color)},
                  {"weight", weight_to_json(e.weight)}});
  j["vertices"] = vs;
  j["edges"] = es;
  return j;
}

inline SculptingDigraph digraph_from_json(const ordered_json& j) {
  SculptingDigraph g;
  try {
    for (const auto& v : j.at("vertices"))
      g.add_vertex({role_from_name(v.at("role").get<std::string>()), v.at("index").get<unsigned>()});
    for (const auto& e : j.at("edges"))
      g.add_edge(e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>(),
                 color_from_name(e.at("color").get<std::string>()), weight_from_json(e.at("weight")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed digraph: ") + e.what());
  }
  return g;
}

inline ordered_json bigraph_to_json(const SculptingBigraph& b) {
  ordered_json j;
  auto cs = ordered_json::array();
  for (const auto& v : b.circles()) cs.push_back(vertex_to_json(v));
  j["circles"] = cs;
  j["dots"] = b.dots();
  auto es = ordered_json::array();
  for (const auto& e : b.edges())
    es.push_back({{"dot", e.dot}, {"circle", e.circle}, {"color", color_name(e.color)},
                  {"weight", weight_to_json(e.weight)}});
  j["edges"] = es;
  return j;
}

namespace io_detail {

inline std::string dot_style(EdgeColor c) {
  switch (c) {
    case EdgeColor::SolidBlack: return "color=black";
    case EdgeColor::DashedBlack: return "color=black, style=dashed";
    case EdgeColor::Red: return "color=red";
    default: return "color=blue";
  }
}

inline std::string svg_stroke(EdgeColor c) {
  switch (c) {
    case EdgeColor::SolidBlack: return R"x(stroke="black")x";
    case EdgeColor::DashedBlack: return R"x(stroke="black" stroke-dasharray="6,4")x";
    case EdgeColor::Red: return R"x(stroke="red")x";
    default: return R"x(stroke="blue")x";
  }
}

inline std::string label_of(const ExactScalar& w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", w.to_complex().real());
  return buf;
}

}  // namespace io_detail

inline std::string digraph_to_dot(const SculptingDigraph& g, const std::string& name = "dicke") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t i = 0; i < g.vertices().size(); ++i) {
    const auto& v = g.vertices()[i];
    os << "  v" << i << " [label=\"" << v.name() << "\", shape=" << (v.role == VertexRole::System ? "doublecircle" : "circle")
       << "];\n";
  }
  for (const auto& e : g.edges())
    os << "  v" << e.source << " -> v" << e.target << " [" << io_detail::dot_style(e.color) << ", label=\""
       << io_detail::label_of(e.weight) << "\"];\n";
  os << "}\n";
  return os.str();
}

inline std::string bigraph_to_dot(const SculptingBigraph& b, const std::string& name = "dicke_bigraph") {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (std::size_t i = 0; i < b.circles().size(); ++i)
    os << "  c" << i << " [label=\"" << b.circles()[i].name() << "\", shape=circle];\n";
  for (std::size_t i = 0; i < b.dots().size(); ++i)
    os << "  d" << i << " [label=\"" << b.dots()[i] << "\", shape=point];\n";
  for (const auto& e : b.edges())
    os << "  d" << e.dot << " -- c" << e.circle << " [" << io_detail::dot_style(e.color) << ", label=\""
       << io_detail::label_of(e.weight) << "\"];\n";
  os << "}\n";
  return os.str();
}

/// Vertices on a circle, straight arrows, self-loops as small rings.
inline std::string digraph_to_svg(const SculptingDigraph& g) {
  const double size = 480, cx = size / 2, cy = size / 2, radius = size / 2 - 50;
  const std::size_t nv = g.vertices().size();
  std::vector<std::pair<double, double>> pos(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const double t = 2 * M_PI * double(i) / double(std::max<std::size_t>(nv, 1)) - M_PI / 2;
    pos[i] = {cx + radius * std::cos(t), cy + radius * std::sin(t)};
  }
  std::ostringstream os;
  char buf[256];
  os << R"x(<svg xmlns="http://www.w3.org/2000/svg" width="480" height="480" viewBox="0 0 480 480">)x" << "\n";
  os << R"x(  <defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>)x"
     << "\n";
  for (const auto& e : g.edges()) {
    const auto [x1, y1] = pos[e.source];
    const auto [x2, y2] = pos[e.target];
    if (e.source == e.target) {
      const double dx = x1 - cx, dy = y1 - cy, len = std::hypot(dx, dy);
      std::snprintf(buf, sizeof buf, R"x(  <circle cx="%.1f" cy="%.1f" r="12" fill="none" )x", x1 + 26 * dx / len,
                    y1 + 26 * dy / len);
      os << buf << io_detail::svg_stroke(e.color) << "/>\n";
      continue;
    }
    const double dx = x2 - x1, dy = y2 - y1, len = std::hypot(dx, dy);
    std::snprintf(buf, sizeof buf, R"x(  <line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" marker-end="url(#arrow)" )x",
                  x1 + 16 * dx / len, y1 + 16 * dy / len, x2 - 16 * dx / len, y2 - 16 * dy / len);
    os << buf << io_detail::svg_stroke(e.color) << "/>\n";
  }
  for (std::size_t i = 0; i < nv; ++i) {
    std::snprintf(buf, sizeof buf,
                  R"x(  <circle cx="%.1f" cy="%.1f" r="15" fill="white" stroke="black"/><text x="%.1f" y="%.1f" font-size="11" text-anchor="middle">)x",
                  pos[i].first, pos[i].second, pos[i].first, pos[i].second + 4);
    os << buf << g.vertices()[i].name() << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dicke

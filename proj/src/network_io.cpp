#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/network.hpp"

namespace phasenet {

using nlohmann::json;

namespace {

json domain_json(const Domain& D) {
  if (D.kind() == Domain::Kind::Disk) return {{"kind", "disk"}, {"center", {D.center().x, D.center().y}}, {"radius", D.radius()}};
  return {{"kind", "rect"}, {"lo", {D.lo().x, D.lo().y}}, {"hi", {D.hi().x, D.hi().y}}};
}

Domain domain_from(const json& j) {
  std::string kind = j.value("kind", "disk");
  if (kind == "disk") {
    auto c = j.value("center", std::vector<double>{0.0, 0.0});
    return Domain::disk({c.at(0), c.at(1)}, j.at("radius").get<double>());
  }
  if (kind == "rect") {
    auto lo = j.at("lo").get<std::vector<double>>();
    auto hi = j.at("hi").get<std::vector<double>>();
    return Domain::rect({lo.at(0), lo.at(1)}, {hi.at(0), hi.at(1)});
  }
  throw Error(Errc::ConfigParse, "unknown domain kind '" + kind + "'");
}

const char* palette(int label) {
  static const char* colors[] = {"#f2e6a0", "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f",
                                 "#cab2d6", "#ffff99", "#8dd3c7", "#bebada", "#80b1d3"};
  if (label < 0) return "#ffffff";
  return colors[label % 10];
}

}  // namespace

std::string network_to_json(const Network& net) {
  json j;
  j["domain"] = domain_json(net.domain);
  j["N"] = net.N;
  j["Ntilde"] = net.Ntilde;
  if (net.background >= 0) j["background"] = net.background;
  j["nodes"] = json::array();
  for (const auto& n : net.nodes)
    j["nodes"].push_back({{"x", n.pos.x}, {"y", n.pos.y}, {"kind", n.kind == NodeKind::End ? "end" : "branch"}});
  j["arcs"] = json::array();
  for (const auto& a : net.arcs) {
    json pts = json::array();
    for (const auto& p : a.points) pts.push_back({p.x, p.y});
    j["arcs"].push_back({{"nodes", {a.nodes[0], a.nodes[1]}},
                         {"phases", {a.phases[0], a.phases[1]}},
                         {"points", pts},
                         {"degenerate", a.degenerate}});
  }
  return j.dump(2);
}

Network network_from_json(const std::string& text) {
  Network net;
  try {
    json j = json::parse(text);
    if (j.contains("domain")) net.domain = domain_from(j["domain"]);
    net.N = j.value("N", 0);
    net.Ntilde = j.value("Ntilde", 0);
    net.background = j.value("background", -1);
    for (const auto& n : j.at("nodes")) {
      std::string kind = n.value("kind", "branch");
      if (kind != "end" && kind != "branch") throw Error(Errc::ConfigParse, "unknown node kind '" + kind + "'");
      net.add_node({n.at("x").get<double>(), n.at("y").get<double>()}, kind == "end" ? NodeKind::End : NodeKind::Branch);
    }
    for (const auto& a : j.at("arcs")) {
      auto nd = a.at("nodes").get<std::vector<int>>();
      auto ph = a.at("phases").get<std::vector<int>>();
      if (nd.size() != 2 || ph.size() != 2) throw Error(Errc::ConfigParse, "arc needs two nodes and two phases");
      for (int v : nd)
        if (v < 0 || v >= static_cast<int>(net.nodes.size())) throw Error(Errc::ConfigParse, "arc node index out of range");
      int k = net.add_arc(nd[0], nd[1], ph[0], ph[1]);
      if (a.contains("points")) {
        std::vector<Vec2> pts;
        for (const auto& p : a["points"]) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        if (pts.size() >= 2) net.arcs[k].points = pts;
      }
      if (a.contains("degenerate")) net.arcs[k].degenerate = a["degenerate"].get<bool>();
    }
    if (net.N == 0) {
      int mx = -1;
      for (const auto& a : net.arcs) mx = std::max({mx, a.phases[0], a.phases[1]});
      net.N = mx + 1;
    }
    if (!j.contains("Ntilde")) net.Ntilde = net.end_count();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("network JSON: ") + e.what());
  }
  return net;
}

std::string network_to_svg(const Network& net, int pixels) {
  const Domain& D = net.domain;
  Vec2 lo, hi;
  if (D.kind() == Domain::Kind::Disk) {
    lo = D.center() - Vec2{D.radius(), D.radius()};
    hi = D.center() + Vec2{D.radius(), D.radius()};
  } else {
    lo = D.lo();
    hi = D.hi();
  }
  double span = std::max(hi.x - lo.x, hi.y - lo.y);
  double pad = 0.05 * span;
  double s = pixels / (span + 2 * pad);
  auto X = [&](Vec2 p) { return (p.x - lo.x + pad) * s; };
  auto Y = [&](Vec2 p) { return (hi.y - p.y + pad) * s; };
  std::ostringstream o;
  char buf[128];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels << "\">\n";
  FaceTrace ft;
  if (!net.arcs.empty()) ft = trace_faces(net);
  for (const auto& f : ft.faces) {
    if (f.label == -2 || f.boundary.size() < 3) continue;
    o << "<polygon fill=\"" << palette(f.label) << "\" stroke=\"none\" points=\"";
    for (const auto& p : f.boundary) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p), Y(p));
      o << buf;
    }
    o << "\"/>\n";
  }
  if (net.arcs.empty() && net.background >= 0) {
    auto path = D.boundary_path(0.0, D.perimeter() * (1 - 1e-9), 64);
    o << "<polygon fill=\"" << palette(net.background) << "\" points=\"";
    for (const auto& p : path) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p), Y(p));
      o << buf;
    }
    o << "\"/>\n";
  }
  {
    auto path = D.boundary_path(0.0, D.perimeter() * (1 - 1e-9), 64);
    o << "<polygon fill=\"none\" stroke=\"#555\" stroke-width=\"1\" points=\"";
    for (const auto& p : path) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p), Y(p));
      o << buf;
    }
    o << "\"/>\n";
  }
  for (const auto& a : net.arcs) {
    if (a.degenerate) continue;
    o << "<polyline fill=\"none\" stroke=\"#1f3a93\" stroke-width=\"2\" points=\"";
    for (const auto& p : a.points) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p), Y(p));
      o << buf;
    }
    o << "\"/>\n";
  }
  for (const auto& n : net.nodes) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", X(n.pos), Y(n.pos),
                  n.kind == NodeKind::End ? "#333" : "#d62728");
    o << buf;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace phasenet

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "topoplan/scenario.hpp"

namespace topoplan {

namespace {

constexpr const char* kClassColors[] = {
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
};

struct Mapper {
  Rect bounds;
  double scale;
  double margin;

  double x(double wx) const { return margin + (wx - bounds.min.x) * scale; }
  // SVG y axis points down.
  double y(double wy) const { return margin + (bounds.max.y - wy) * scale; }
};

std::string sig_label(const HSig& sig) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof(buf), "%+.3f", sig[i]);
    out += buf;
  }
  return out + ")";
}

void polyline(std::ofstream& out, const Mapper& m,
              const std::vector<Point2>& pts, const std::string& style) {
  out << "<polyline fill=\"none\" " << style << " points=\"";
  for (const Point2& p : pts) {
    out << m.x(p.x) << "," << m.y(p.y) << " ";
  }
  out << "\"/>\n";
}

}  // namespace

void render_svg(const PlanResult& r, const Scenario& s,
                const std::filesystem::path& path, const Graph* graph) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open svg file: " + path.string());

  const double target = 720.0;
  Mapper m;
  m.bounds = s.bounds;
  m.scale = target / std::max(s.bounds.width(), s.bounds.height());
  m.margin = 24.0;
  const double width = s.bounds.width() * m.scale + 2 * m.margin;
  const double height = s.bounds.height() * m.scale + 2 * m.margin;
  const double legend_height = 18.0 * (r.classes.size() + 1);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height + legend_height << "\" viewBox=\"0 0 "
      << width << " " << height + legend_height << "\">\n";
  out << "<rect x=\"" << m.x(s.bounds.min.x) << "\" y=\""
      << m.y(s.bounds.max.y) << "\" width=\"" << s.bounds.width() * m.scale
      << "\" height=\"" << s.bounds.height() * m.scale
      << "\" fill=\"white\" stroke=\"black\"/>\n";

  // Graph edges below everything else.
  if (graph != nullptr) {
    out << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
    for (const CachedEdge* e : graph->all_adjacency()) {
      const Point2 a = graph->vertex(e->from).state.position;
      const Point2 b = graph->vertex(e->to).state.position;
      out << "<line x1=\"" << m.x(a.x) << "\" y1=\"" << m.y(a.y) << "\" x2=\""
          << m.x(b.x) << "\" y2=\"" << m.y(b.y) << "\"/>\n";
    }
    out << "</g>\n";
  }

  // Obstacles and representative points.
  const Workspace w = s.workspace();
  for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
    out << "<polygon fill=\"#555555\" stroke=\"#222222\" points=\"";
    for (const Point2& v : w.obstacles[i].vertices) {
      out << m.x(v.x) << "," << m.y(v.y) << " ";
    }
    out << "\"/>\n";
    const Point2& zeta = w.representative_points[i];
    out << "<circle cx=\"" << m.x(zeta.x) << "\" cy=\"" << m.y(zeta.y)
        << "\" r=\"2.5\" fill=\"black\"/>\n";
  }

  // Tree edges colored by the child node's class.
  if (graph != nullptr) {
    std::map<SigKey, std::size_t> color_of;
    for (const Vertex& v : graph->vertices()) {
      for (const auto& [key, n] : v.nodes) {
        if (!n->parent) continue;
        auto [it, inserted] =
            color_of.emplace(key, color_of.size() % std::size(kClassColors));
        const Point2 a = graph->vertex(n->parent->vertex_id).state.position;
        const Point2 b = v.state.position;
        out << "<line stroke=\"" << kClassColors[it->second]
            << "\" stroke-width=\"0.8\" stroke-opacity=\"0.6\" x1=\""
            << m.x(a.x) << "\" y1=\"" << m.y(a.y) << "\" x2=\"" << m.x(b.x)
            << "\" y2=\"" << m.y(b.y) << "\"/>\n";
      }
    }
  }

  // Goal region and start marker.
  out << "<circle cx=\"" << m.x(s.goal.center.x) << "\" cy=\""
      << m.y(s.goal.center.y) << "\" r=\"" << s.goal.radius * m.scale
      << "\" fill=\"#2ca02c\" fill-opacity=\"0.25\" stroke=\"#2ca02c\"/>\n";
  out << "<circle cx=\"" << m.x(s.start.position.x) << "\" cy=\""
      << m.y(s.start.position.y) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";

  // Best paths, bold, one color per class.
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    const std::string color = kClassColors[i % std::size(kClassColors)];
    polyline(out, m, r.classes[i].trace,
             "stroke=\"" + color + "\" stroke-width=\"2.5\"");
  }

  // Legend.
  double ly = height + 14.0;
  out << "<text x=\"" << m.margin << "\" y=\"" << ly
      << "\" font-size=\"12\" font-family=\"monospace\">classes:</text>\n";
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    ly += 18.0;
    const std::string color = kClassColors[i % std::size(kClassColors)];
    out << "<rect x=\"" << m.margin << "\" y=\"" << ly - 10 << "\" width=\"12\""
        << " height=\"12\" fill=\"" << color << "\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), " cost %.4f", r.classes[i].cost);
    out << "<text x=\"" << m.margin + 18 << "\" y=\"" << ly
        << "\" font-size=\"12\" font-family=\"monospace\">"
        << sig_label(r.classes[i].signature) << buf << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace topoplan

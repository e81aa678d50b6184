#include "ipman/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "ipman/errors.hpp"

namespace ipman {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 640.0;
constexpr double kMargin = 64.0;
constexpr const char* kFeasibleColor = "#d9c8a0";
constexpr const char* kGeneratedColor = "#1f5fbf";

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Step between ticks: 1, 2 or 5 times a power of ten, about 5 ticks per axis.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::vector<std::vector<Vertex>> region_outline(const Region& region) {
  if (region.dimension() != 2) throw ShapeError("outline: unsupported dimension (2-D only)");
  if (region.kind() != Region::Kind::UnionOfBoxes) {
    const Box& b = region.bounding_box();
    return {{Vertex{b.lower[0], b.lower[1]}, Vertex{b.upper[0], b.lower[1]},
             Vertex{b.upper[0], b.upper[1]}, Vertex{b.lower[0], b.upper[1]}}};
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& b : region.boxes()) {
    xs.insert(xs.end(), {b.lower[0], b.upper[0]});
    ys.insert(ys.end(), {b.lower[1], b.upper[1]});
  }
  xs = unique_sorted(std::move(xs));
  ys = unique_sorted(std::move(ys));
  const std::size_t nx = xs.size() - 1;
  const std::size_t ny = ys.size() - 1;
  auto inside = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny)) return false;
    const double c[2] = {0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])};
    return region.contains(c);
  };

  // Directed boundary edges on the compressed grid, interior on the left.
  using Node = std::pair<long, long>;
  std::multimap<Node, Node> edges;
  for (long i = 0; i < static_cast<long>(nx); ++i) {
    for (long j = 0; j < static_cast<long>(ny); ++j) {
      if (!inside(i, j)) continue;
      if (!inside(i, j - 1)) edges.emplace(Node{i, j}, Node{i + 1, j});
      if (!inside(i + 1, j)) edges.emplace(Node{i + 1, j}, Node{i + 1, j + 1});
      if (!inside(i, j + 1)) edges.emplace(Node{i + 1, j + 1}, Node{i, j + 1});
      if (!inside(i - 1, j)) edges.emplace(Node{i, j + 1}, Node{i, j});
    }
  }

  std::vector<std::vector<Vertex>> loops;
  while (!edges.empty()) {
    std::vector<Node> chain;
    auto it = edges.begin();
    const Node start = it->first;
    Node cur = it->second;
    chain.push_back(start);
    edges.erase(it);
    while (cur != start) {
      chain.push_back(cur);
      auto next = edges.find(cur);
      if (next == edges.end()) throw StateError("outline: open boundary chain");
      cur = next->second;
      edges.erase(next);
    }
    // Drop vertices where the boundary goes straight through.
    std::vector<Vertex> loop;
    const std::size_t n = chain.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Node& a = chain[(k + n - 1) % n];
      const Node& b = chain[k];
      const Node& c = chain[(k + 1) % n];
      const long cross = (b.first - a.first) * (c.second - b.second) -
                         (b.second - a.second) * (c.first - b.first);
      if (cross != 0) loop.push_back({xs[b.first], ys[b.second]});
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::string render_svg_scatter(const Matrix2& feasible, const Matrix2& generated,
                               const Region& region) {
  if (region.dimension() != 2) throw ShapeError("scatter plot: unsupported dimension (2-D only)");
  for (const Matrix2* m : {&feasible, &generated}) {
    if (!m->empty() && m->cols() != 2) throw ShapeError("scatter plot: unsupported dimension (2-D only)");
  }

  const Box& bb = region.bounding_box();
  double lo[2] = {bb.lower[0], bb.lower[1]};
  double hi[2] = {bb.upper[0], bb.upper[1]};
  for (const Matrix2* m : {&feasible, &generated}) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      for (int c = 0; c < 2; ++c) {
        lo[c] = std::min(lo[c], (*m)(r, c));
        hi[c] = std::max(hi[c], (*m)(r, c));
      }
    }
  }
  for (int c = 0; c < 2; ++c) {
    const double pad = 0.05 * std::max(hi[c] - lo[c], 1e-9);
    lo[c] -= pad;
    hi[c] += pad;
  }
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - lo[0]) / (hi[0] - lo[0]) * plot_w; };
  auto py = [&](double y) { return kHeight - kMargin - (y - lo[1]) / (hi[1] - lo[1]) * plot_h; };

  std::string s;
  auto out = std::back_inserter(s);
  fmt::format_to(out,
                 "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
                 "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n"
                 "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                 kWidth, kHeight);

  // Axes with ticks.
  fmt::format_to(out,
                 "<g id=\"axes\" stroke=\"#444\" fill=\"none\">\n"
                 "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n",
                 kMargin, kMargin, plot_w, plot_h);
  std::string labels;
  auto lab = std::back_inserter(labels);
  for (int c = 0; c < 2; ++c) {
    const double step = nice_step(hi[c] - lo[c]);
    for (double t = std::ceil(lo[c] / step) * step; t <= hi[c] + 1e-9; t += step) {
      const double v = std::abs(t) < 1e-12 ? 0.0 : t;
      if (c == 0) {
        fmt::format_to(out, "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n",
                       px(v), kHeight - kMargin, kHeight - kMargin + 5);
        fmt::format_to(lab, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                       px(v), kHeight - kMargin + 20, v);
      } else {
        fmt::format_to(out, "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n",
                       kMargin - 5, py(v), kMargin);
        fmt::format_to(lab, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n",
                       kMargin - 8, py(v) + 4, v);
      }
    }
  }
  s += "</g>\n<g id=\"tick-labels\" fill=\"#222\">\n" + labels + "</g>\n";
  fmt::format_to(out,
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">x1</text>\n"
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 {:.2f} {:.2f})\">x2</text>\n",
                 kWidth / 2, kHeight - 16.0, 18.0, kHeight / 2, 18.0, kHeight / 2);

  // Region outline.
  s += "<g id=\"region\" fill=\"none\" stroke=\"#8a6d3b\" stroke-width=\"1.5\">\n";
  for (const auto& loop : region_outline(region)) {
    s += "<path d=\"";
    for (std::size_t k = 0; k < loop.size(); ++k) {
      fmt::format_to(out, "{}{:.2f},{:.2f} ", k == 0 ? "M" : "L", px(loop[k][0]), py(loop[k][1]));
    }
    s += "Z\"/>\n";
  }
  s += "</g>\n";

  auto series = [&](const char* id, const Matrix2& pts, const char* color, double radius,
                    double opacity) {
    fmt::format_to(out, "<g id=\"{}\" fill=\"{}\" fill-opacity=\"{:.2f}\">\n", id, color, opacity);
    for (std::size_t r = 0; r < pts.rows(); ++r) {
      fmt::format_to(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.1f}\"/>\n", px(pts(r, 0)),
                     py(pts(r, 1)), radius);
    }
    s += "</g>\n";
  };
  series("feasible", feasible, kFeasibleColor, 1.6, 0.7);
  series("generated", generated, kGeneratedColor, 2.0, 0.8);

  // Legend.
  const double lx = kWidth - kMargin - 130;
  const double ly = kMargin + 12;
  fmt::format_to(out,
                 "<g id=\"legend\">\n"
                 "<rect x=\"{0:.2f}\" y=\"{1:.2f}\" width=\"124\" height=\"44\" fill=\"white\" "
                 "stroke=\"#999\"/>\n"
                 "<circle cx=\"{2:.2f}\" cy=\"{3:.2f}\" r=\"4\" fill=\"{6}\"/>\n"
                 "<text x=\"{4:.2f}\" y=\"{5:.2f}\">feasible</text>\n"
                 "<circle cx=\"{2:.2f}\" cy=\"{7:.2f}\" r=\"4\" fill=\"{8}\"/>\n"
                 "<text x=\"{4:.2f}\" y=\"{9:.2f}\">generated</text>\n"
                 "</g>\n",
                 lx, ly - 8, lx + 12, ly + 4, lx + 24, ly + 8, kFeasibleColor, ly + 24,
                 kGeneratedColor, ly + 28);
  s += "</svg>\n";
  return s;
}

void emit_svg_scatter(const Matrix2& feasible, const Matrix2& generated, const Region& region,
                      const std::filesystem::path& path) {
  const std::string svg = render_svg_scatter(feasible, generated, region);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << svg;
}

}  // namespace ipman

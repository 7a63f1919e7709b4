#include <algorithm>
#include <cmath>
#include <cstdio>

#include "covctl/scenario.hpp"

namespace covctl {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string points_attr(const std::vector<Point2>& pts) {
    std::string out;
    for (const Point2& p : pts) out += num(p.x) + "," + num(p.y) + " ";
    if (!out.empty()) out.pop_back();
    return out;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string emit_svg(const ConvexPolygon& region, const VoronoiDiagram& diagram,
                     const Configuration& positions, const DensityField& phi, const SvgOptions& options) {
    double x0 = region[0].x, x1 = x0, y0 = region[0].y, y1 = y0;
    for (const Point2& v : region.vertices()) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double pad = 0.05 * span;
    const double stroke = 0.004 * span;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"" + num(x0 - pad) + " " +
         num(-(y1 + pad)) + " " + num(x1 - x0 + 2 * pad) + " " + num(y1 - y0 + 2 * pad) + "\">\n";
    if (!options.title.empty()) s += "<title>" + escape(options.title) + "</title>\n";
    s += "<defs><clipPath id=\"region\"><polygon points=\"" + points_attr(region.vertices()) +
         "\"/></clipPath></defs>\n";
    // Flip y so that the drawing uses the usual orientation.
    s += "<g transform=\"scale(1,-1)\">\n";

    if (options.shade_density && !phi.is_uniform() && options.grid > 0) {
        const int g = options.grid;
        const double dx = (x1 - x0) / g, dy = (y1 - y0) / g;
        std::vector<double> v(static_cast<std::size_t>(g * g));
        double vmax = 0.0;
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                const double val = phi({x0 + (a + 0.5) * dx, y0 + (b + 0.5) * dy});
                v[static_cast<std::size_t>(a * g + b)] = val;
                vmax = std::max(vmax, val);
            }
        s += "<g clip-path=\"url(#region)\" stroke=\"none\">\n";
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                const double w = vmax > 0.0 ? v[static_cast<std::size_t>(a * g + b)] / vmax : 0.0;
                if (w < 1e-3) continue;
                s += "<rect x=\"" + num(x0 + a * dx) + "\" y=\"" + num(y0 + b * dy) + "\" width=\"" + num(dx) +
                     "\" height=\"" + num(dy) + "\" fill=\"#3060c0\" fill-opacity=\"" + num(0.6 * w) + "\"/>\n";
            }
        s += "</g>\n";
    }

    s += "<polygon points=\"" + points_attr(region.vertices()) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"" +
         num(stroke) + "\"/>\n";
    s += "<g class=\"cells\" stroke=\"#444\" stroke-width=\"" + num(0.6 * stroke) + "\">\n";
    for (const auto& [key, seg] : diagram.faces)
        s += "<line x1=\"" + num(seg.a.x) + "\" y1=\"" + num(seg.a.y) + "\" x2=\"" + num(seg.b.x) + "\" y2=\"" +
             num(seg.b.y) + "\"/>\n";
    s += "</g>\n";
    s += "<g class=\"trails\" fill=\"none\" stroke=\"#c04020\" stroke-width=\"" + num(0.4 * stroke) + "\">\n";
    for (const auto& trail : options.trails)
        if (trail.size() > 1) s += "<polyline points=\"" + points_attr(trail) + "\"/>\n";
    s += "</g>\n";
    s += "<g class=\"agents\" fill=\"black\">\n";
    for (const Point2& p : positions)
        s += "<circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) + "\" r=\"" + num(2.5 * stroke) + "\"/>\n";
    s += "</g>\n</g>\n</svg>\n";
    return s;
}

}  // namespace covctl

// Copyright 2026 The tbcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace tbc::tools {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

/// Self-contained line plot with axis ranges taken from the data.
inline std::string line_plot_svg(const std::string &title, const std::string &xlabel, const std::string &ylabel,
                                 const std::vector<Series> &series) {
    const double w = 640.0, h = 400.0, ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                    "font-size=\"12\">\n<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
    s += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(h - mb) + "\" x2=\"" + svg_num(w - mr) + "\" y2=\"" +
         svg_num(h - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(mt) + "\" x2=\"" + svg_num(ml) + "\" y2=\"" +
         svg_num(h - mb) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        s += "<text x=\"" + svg_num(px(xv)) + "\" y=\"" + svg_num(h - mb + 16) + "\" text-anchor=\"middle\">" +
             svg_num(xv) + "</text>\n";
        s += "<text x=\"" + svg_num(ml - 6) + "\" y=\"" + svg_num(py(yv) + 4) + "\" text-anchor=\"end\">" +
             svg_num(yv) + "</text>\n";
    }
    s += "<text x=\"" + svg_num((ml + w - mr) / 2) + "\" y=\"" + svg_num(h - 12) + "\" text-anchor=\"middle\">" +
         xlabel + "</text>\n";
    s += "<text x=\"16\" y=\"" + svg_num((mt + h - mb) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         svg_num((mt + h - mb) / 2) + ")\">" + ylabel + "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char *c = colors[i % 6];
        std::string pts;
        for (std::size_t k = 0; k < series[i].x.size(); ++k) {
            pts += svg_num(px(series[i].x[k])) + "," + svg_num(py(series[i].y[k])) + " ";
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        s += "<text x=\"" + svg_num(w - mr - 4) + "\" y=\"" + svg_num(mt + 14 * (i + 1)) + "\" text-anchor=\"end\" fill=\"" +
             c + "\">" + series[i].label + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace tbc::tools

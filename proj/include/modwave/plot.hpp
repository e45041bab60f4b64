#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "modwave/errors.hpp"
#include "modwave/io.hpp"

namespace modwave {

// Minimal log-log SVG line plot for norm trajectories with optional slope guides.
class svg_plot {
  public:
    svg_plot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(const std::string& name, const std::vector<std::pair<double, double>>& xy) {
        series_.push_back({name, xy});
    }

    // straight guide line of given log-log slope through (x0, y0)
    void add_guide(const std::string& name, double slope, double x0, double y0) {
        guides_.push_back({name, slope, x0, y0});
    }

    void write(const std::string& path) const {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_)
            for (const auto& [x, y] : s.xy) {
                if (!(x > 0.0) || !(y > 0.0)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (!(xmax > xmin) || !(ymax > ymin)) {
            xmin = ymin = 0.1;
            xmax = ymax = 10.0;
        }

        const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
        auto px = [&](double x) {
            return ml + (std::log10(x) - std::log10(xmin)) /
                            (std::log10(xmax) - std::log10(xmin)) * (W - ml - mr);
        };
        auto py = [&](double y) {
            return H - mb - (std::log10(y) - std::log10(ymin)) /
                                (std::log10(ymax) - std::log10(ymin)) * (H - mt - mb);
        };

        std::ofstream out(path, std::ios::binary);
        if (!out) throw config_error("cannot write " + path);
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
            << "' viewBox='0 0 " << W << " " << H << "'>\n";
        out << "<rect width='100%' height='100%' fill='white'/>\n";
        out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title_
            << "</text>\n";
        out << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='12'>"
            << xlabel_ << "</text>\n";
        out << "<text x='16' y='" << H / 2
            << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << H / 2 << ")'>"
            << ylabel_ << "</text>\n";
        out << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
            << H - mt - mb << "' fill='none' stroke='black'/>\n";

        // decade ticks
        for (int d = static_cast<int>(std::ceil(std::log10(xmin)));
             d <= static_cast<int>(std::floor(std::log10(xmax))); ++d) {
            const double x = px(std::pow(10.0, d));
            out << "<line x1='" << x << "' y1='" << H - mb << "' x2='" << x << "' y2='" << mt
                << "' stroke='#dddddd'/>\n";
            out << "<text x='" << x << "' y='" << H - mb + 16
                << "' text-anchor='middle' font-size='10'>1e" << d << "</text>\n";
        }
        for (int d = static_cast<int>(std::ceil(std::log10(ymin)));
             d <= static_cast<int>(std::floor(std::log10(ymax))); ++d) {
            const double y = py(std::pow(10.0, d));
            out << "<line x1='" << ml << "' y1='" << y << "' x2='" << W - mr << "' y2='" << y
                << "' stroke='#dddddd'/>\n";
            out << "<text x='" << ml - 6 << "' y='" << y + 3
                << "' text-anchor='end' font-size='10'>1e" << d << "</text>\n";
        }

        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                       "#ff7f0e", "#8c564b"};
        int ci = 0;
        double legend_y = mt + 14;
        for (const auto& s : series_) {
            const char* col = colors[ci++ % 6];
            out << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
            for (const auto& [x, y] : s.xy)
                if (x > 0.0 && y > 0.0) out << px(x) << ',' << py(y) << ' ';
            out << "'/>\n";
            out << "<text x='" << W - mr - 8 << "' y='" << legend_y
                << "' text-anchor='end' font-size='11' fill='" << col << "'>" << s.name
                << "</text>\n";
            legend_y += 14;
        }
        for (const auto& g : guides_) {
            const char* col = colors[ci++ % 6];
            const double x1 = xmin, x2 = xmax;
            const double y1 = g.y0 * std::pow(x1 / g.x0, g.slope);
            const double y2 = g.y0 * std::pow(x2 / g.x0, g.slope);
            out << "<line x1='" << px(x1) << "' y1='" << py(std::clamp(y1, ymin, ymax))
                << "' x2='" << px(x2) << "' y2='" << py(std::clamp(y2, ymin, ymax))
                << "' stroke='" << col << "' stroke-dasharray='6,4'/>\n";
            out << "<text x='" << W - mr - 8 << "' y='" << legend_y
                << "' text-anchor='end' font-size='11' fill='" << col << "'>" << g.name
                << "</text>\n";
            legend_y += 14;
        }
        out << "</svg>\n";
    }

  private:
    struct series {
        std::string name;
        std::vector<std::pair<double, double>> xy;
    };
    struct guide {
        std::string name;
        double slope, x0, y0;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<series> series_;
    std::vector<guide> guides_;
};

inline void plot_probes(const std::string& path, const std::string& title,
                        const std::vector<norm_probe>& probes,
                        const std::vector<std::pair<std::string, double>>& guides = {}) {
    svg_plot plot(title, "1 + t", "norm");
    for (const char* who : {"u", "v", "w"}) {
        for (auto kind : {norm_kind::l2, norm_kind::linf}) {
            std::vector<std::pair<double, double>> xy;
            for (const auto& p : probes) {
                if (p.unknown != who) continue;
                const double v = kind == norm_kind::l2 ? p.n.l2 : p.n.linf;
                if (p.t > 0.0 && v > 0.0) xy.emplace_back(1.0 + p.t, v);
            }
            if (!xy.empty())
                plot.add_series(std::string(who) + (kind == norm_kind::l2 ? " L2" : " Linf"), xy);
        }
    }
    // anchor guides at the first probe past t = 10
    for (const auto& [name, slope] : guides) {
        for (const auto& p : probes) {
            if (p.t >= 10.0 && p.n.linf > 0.0) {
                plot.add_guide(name, slope, 1.0 + p.t, p.n.linf);
                break;
            }
        }
    }
    plot.write(path);
}

} // namespace modwave

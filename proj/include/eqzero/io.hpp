#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eqzero/domain.hpp"

namespace eqzero {

inline constexpr const char* version_string = "eqzero 0.1.0";

/// Shortest round-trip decimal representation (std::to_chars).
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Column-oriented CSV with a leading versioned comment line and a header
/// line naming the columns (units noted in the comment).  The numeric body is
/// byte-reproducible for a fixed configuration and seed.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view header,
              std::string_view units_note = "") {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << "# " << version_string;
        if (!units_note.empty()) out_ << " | " << units_note;
        out_ << "\n" << header << "\n";
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
    }

    void raw_row(const std::string& line) { out_ << line << '\n'; }

private:
    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Minimal SVG line plots: axes, ticks, one polyline per series.

struct PlotSeries {
    std::vector<double> x, y;
    std::string color = "#1f6fb2";
};

inline void write_svg_line_plot(const std::filesystem::path& path, const std::string& title,
                                const std::string& xlabel, const std::string& ylabel,
                                const std::vector<PlotSeries>& series) {
    const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 5.0;
        const double yv = ymin + (ymax - ymin) * k / 5.0;
        char xbuf[32], ybuf[32];
        std::snprintf(xbuf, sizeof xbuf, "%.4g", xv);
        std::snprintf(ybuf, sizeof ybuf, "%.4g", yv);
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << sx(xv) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << xbuf << "</text>\n"
            << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml << "\" y2=\""
            << sy(yv) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << ybuf << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n"
        << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Domain description files.  Line-oriented `key value...` text:
//
//   label  ellipse-half
//   c      1.0
//   c0     0.0 0.0
//   tail   0.5 0.0
//   weight constant:1.0
//
// `tail` lists re/im pairs for c_1..c_K of Psi(w) = c w + c0 + sum c_k w^-k.
// `weight` is `constant:<v>` or `exp_cos:<amplitude>`.  `#` starts a comment.

struct DomainFile {
    DomainSpec domain;
    WeightSpec weight;
};

inline WeightSpec parse_weight_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    double v = 1.0;
    if (colon != std::string::npos) {
        try {
            v = std::stod(spec.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("weight: cannot parse parameter in '" + spec + "'");
        }
    }
    if (kind == "constant") {
        if (!(v > 0.0)) throw ConfigError("weight: constant value must be positive");
        return WeightSpec::constant(v);
    }
    if (kind == "exp_cos") return WeightSpec::exp_cos(v);
    throw ConfigError("weight: unknown kind '" + kind + "' (expected constant or exp_cos)");
}

inline DomainFile parse_domain_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open domain file " + path.string());
    double c = 0.0;
    bool have_c = false;
    Complex c0(0.0);
    std::vector<Complex> tail;
    std::string label = path.stem().string();
    WeightSpec weight = WeightSpec::constant(1.0);

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto need = [&](double& slot) {
            if (!(ss >> slot))
                throw ConfigError("domain file " + path.string() + ":" + std::to_string(lineno) +
                                  ": key '" + key + "' expects numeric values");
        };
        if (key == "c") {
            need(c);
            have_c = true;
        } else if (key == "c0") {
            double re = 0, im = 0;
            need(re);
            need(im);
            c0 = Complex(re, im);
        } else if (key == "tail") {
            double re, im;
            while (ss >> re) {
                if (!(ss >> im))
                    throw ConfigError("domain file " + path.string() + ":" + std::to_string(lineno) +
                                      ": key 'tail' expects re/im pairs");
                tail.emplace_back(re, im);
            }
        } else if (key == "weight") {
            std::string spec;
            if (!(ss >> spec))
                throw ConfigError("domain file " + path.string() + ":" + std::to_string(lineno) +
                                  ": key 'weight' expects a specifier");
            weight = parse_weight_spec(spec);
        } else if (key == "label") {
            ss >> label;
        } else {
            throw ConfigError("domain file " + path.string() + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        }
    }
    if (!have_c) throw ConfigError("domain file " + path.string() + ": missing key 'c'");
    try {
        return DomainFile{DomainSpec(c, c0, std::move(tail), label), weight};
    } catch (const DegenerateBoundary& e) {
        throw ConfigError("domain file " + path.string() + ": " + e.what());
    }
}

/// Resolves a --domain argument: a built-in name (`disk`, `ellipse:<m>`,
/// `perturbed-disk`) or a path to a domain file.
inline DomainFile resolve_domain(const std::string& arg) {
    if (arg == "disk") return {DomainSpec::disk(), WeightSpec::constant(1.0)};
    if (arg == "perturbed-disk") return {DomainSpec::perturbed_disk(), WeightSpec::constant(1.0)};
    if (arg.rfind("ellipse:", 0) == 0) {
        double m = 0.0;
        try {
            m = std::stod(arg.substr(8));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse ellipse parameter in '" + arg + "'");
        }
        try {
            return {DomainSpec::ellipse(m), WeightSpec::constant(1.0)};
        } catch (const DegenerateBoundary& e) {
            throw ConfigError(e.what());
        }
    }
    if (std::filesystem::exists(arg)) return parse_domain_file(arg);
    throw ConfigError("domain '" + arg + "': not a built-in name and no such file");
}

} // namespace eqzero

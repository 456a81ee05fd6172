#pragma once

// CSV emission/parsing for trajectory records and the standard figure set.
// Values are printed with 15 significant digits; plots are derived from the
// record columns only, so they can be regenerated from the CSV alone.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "funnelsim/boundary.hpp"
#include "funnelsim/feasibility.hpp"
#include "funnelsim/reference.hpp"
#include "funnelsim/sim.hpp"
#include "funnelsim/svg_plot.hpp"

namespace funnelsim {

inline const char* kTrajectoryHeader =
    "t,y0,y1,y2,y3,psi,e0,e1,e2,e3,w0,w1,w2,w3,k0,k1,k2,k3,"
    "rho0,rho1,rho2,rho3,u_raw,u_sat,d0,d1,d2,d3,zref,dzref,d2zref,d3zref";

namespace detail {

inline void append_num(std::string& line, double v, bool first = false) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.14e", v);
    if (!first) line += ',';
    line += buf;
}

}  // namespace detail

inline void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out) {
    out << kTrajectoryHeader << '\n';
    std::string line;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        line.clear();
        detail::append_num(line, rec.t[i], true);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.y[i][j]);
        detail::append_num(line, rec.psi[i]);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.e[i][j]);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.w[i][j]);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.k[i][j]);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.rho[i][j]);
        detail::append_num(line, rec.uRaw[i]);
        detail::append_num(line, rec.uSat[i]);
        for (int j = 0; j < 4; ++j) detail::append_num(line, rec.d[i][j]);
        detail::append_num(line, rec.zref[i]);
        detail::append_num(line, rec.dzref[i]);
        detail::append_num(line, rec.d2zref[i]);
        detail::append_num(line, rec.d3zref[i]);
        out << line << '\n';
    }
}

inline TrajectoryRecord read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trajectory CSV: missing header");
    }
    if (line != kTrajectoryHeader) {
        throw std::runtime_error("trajectory CSV: unexpected header '" + line + "'");
    }
    TrajectoryRecord rec;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        vals.reserve(32);
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
        if (vals.size() != 32) {
            throw std::runtime_error("trajectory CSV: expected 32 columns, got " +
                                     std::to_string(vals.size()));
        }
        std::size_t c = 0;
        rec.t.push_back(vals[c++]);
        rec.y.push_back({vals[c], vals[c + 1], vals[c + 2], vals[c + 3]});
        c += 4;
        rec.psi.push_back(vals[c++]);
        auto take4 = [&]() {
            std::array<double, 4> a{vals[c], vals[c + 1], vals[c + 2], vals[c + 3]};
            c += 4;
            return a;
        };
        rec.e.push_back(take4());
        rec.w.push_back(take4());
        rec.k.push_back(take4());
        rec.rho.push_back(take4());
        rec.uRaw.push_back(vals[c++]);
        rec.uSat.push_back(vals[c++]);
        rec.d.push_back(take4());
        rec.zref.push_back(vals[c++]);
        rec.dzref.push_back(vals[c++]);
        rec.d2zref.push_back(vals[c++]);
        rec.d3zref.push_back(vals[c++]);
    }
    return rec;
}

inline void write_reference_csv(const ReferencePath& path, double step, double horizon,
                                std::ostream& out) {
    out << "t,z,dz,d2z,d3z,d4z\n";
    std::string line;
    for (double t = 0.0; t <= horizon + 1e-12; t += step) {
        const RefSample s = path.sample(t);
        line.clear();
        detail::append_num(line, t, true);
        detail::append_num(line, s.z);
        detail::append_num(line, s.dz);
        detail::append_num(line, s.d2z);
        detail::append_num(line, s.d3z);
        detail::append_num(line, s.d4z);
        out << line << '\n';
    }
}

inline void write_boundary_csv(const FunnelSchedule& sched, double step, double horizon,
                               std::ostream& out) {
    out << "t,rho,rho_dot,phi,phi_dot\n";
    std::string line;
    for (double t = 0.0; t <= horizon + 1e-12; t += step) {
        const WidthSample w = sched.width(t);
        const PhiSample p = sched.phi(t);
        line.clear();
        detail::append_num(line, t, true);
        detail::append_num(line, w.rho);
        detail::append_num(line, w.rhoDot);
        detail::append_num(line, p.phi);
        detail::append_num(line, p.phiDot);
        out << line << '\n';
    }
}

inline void write_margin_csv(const TradeoffReport& rep, std::ostream& out) {
    out << "t,lhs\n";
    std::string line;
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        line.clear();
        detail::append_num(line, rep.times[i], true);
        detail::append_num(line, rep.lhs[i]);
        out << line << '\n';
    }
}

// The standard figure set: one file per error channel with its +-rho
// envelope, the control input with the saturation lines, a 4-panel state
// figure, and the tracked altitude against the reference.
inline std::vector<std::pair<std::string, std::string>> render_standard_plots(
    const TrajectoryRecord& rec, double saturationLimit = 40.0) {
    std::vector<std::pair<std::string, std::string>> files;
    auto column = [&](auto member, int j) {
        std::vector<double> v(rec.size());
        for (std::size_t i = 0; i < rec.size(); ++i) v[i] = (rec.*member)[i][j];
        return v;
    };

    static const char* errorColors[4] = {"#1f77b4", "#2ca02c", "#9467bd", "#d62728"};
    for (int ch = 0; ch < 4; ++ch) {
        Axes ax;
        ax.title = "error e" + std::to_string(ch) + " and funnel boundary";
        ax.xlabel = "t (s)";
        ax.ylabel = "e" + std::to_string(ch);
        std::vector<double> rho = column(&TrajectoryRecord::rho, ch);
        std::vector<double> rhoNeg(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) rhoNeg[i] = -rho[i];
        ax.series.push_back({"e" + std::to_string(ch), rec.t,
                             column(&TrajectoryRecord::e, ch), errorColors[ch], 1.4, false});
        ax.series.push_back({"+rho", rec.t, rho, "#7f7f7f", 1.1, true});
        ax.series.push_back({"-rho", rec.t, rhoNeg, "#7f7f7f", 1.1, true});
        files.emplace_back("e" + std::to_string(ch) + ".svg", render_svg(ax));
    }

    {
        Axes ax;
        ax.title = "control input";
        ax.xlabel = "t (s)";
        ax.ylabel = "u";
        std::vector<double> hi(rec.size(), saturationLimit), lo(rec.size(), -saturationLimit);
        ax.series.push_back({"u_sat", rec.t, rec.uSat, "#d62728", 1.4, false});
        ax.series.push_back({"u_raw", rec.t, rec.uRaw, "#1f77b4", 1.0, false});
        ax.series.push_back({"+limit", rec.t, hi, "#7f7f7f", 1.1, true});
        ax.series.push_back({"-limit", rec.t, lo, "#7f7f7f", 1.1, true});
        files.emplace_back("input.svg", render_svg(ax));
    }

    {
        std::vector<Axes> panels(4);
        const char* names[4] = {"deflection angle", "sideslip", "yaw angle", "yaw rate"};
        for (int p = 0; p < 4; ++p) {
            panels[p].title = names[p];
            panels[p].xlabel = "t (s)";
            panels[p].ylabel = p == 3 ? "rad/s" : "rad";
        }
        panels[0].series.push_back({"", rec.t, column(&TrajectoryRecord::y, 1), "#1f77b4", 1.3, false});
        panels[1].series.push_back({"", rec.t, column(&TrajectoryRecord::y, 2), "#2ca02c", 1.3, false});
        panels[2].series.push_back({"", rec.t, rec.psi, "#9467bd", 1.3, false});
        panels[3].series.push_back({"", rec.t, column(&TrajectoryRecord::y, 3), "#d62728", 1.3, false});
        files.emplace_back("states.svg", render_svg(panels, 2, 1100, 700));
    }

    {
        Axes ax;
        ax.title = "altitude tracking";
        ax.xlabel = "t (s)";
        ax.ylabel = "z (m)";
        ax.series.push_back({"z", rec.t, column(&TrajectoryRecord::y, 0), "#1f77b4", 1.4, false});
        ax.series.push_back({"z_ref", rec.t, rec.zref, "#d62728", 1.2, true});
        files.emplace_back("tracking.svg", render_svg(ax));
    }
    return files;
}

inline void write_standard_plots(const TrajectoryRecord& rec, const std::string& dir,
                                 double saturationLimit = 40.0) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : render_standard_plots(rec, saturationLimit)) {
        std::ofstream out(std::filesystem::path(dir) / name);
        if (!out) throw std::runtime_error("cannot write plot file '" + name + "'");
        out << content;
    }
}

}  // namespace funnelsim

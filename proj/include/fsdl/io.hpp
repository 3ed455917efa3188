#pragma once

// Plain-text outputs: CSV with 17 significant digits and snapshot files
// ('#' header lines, then whitespace-separated rows). Files are written to a
// temporary sibling and renamed into place.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "fsdl/ks1d.hpp"
#include "fsdl/ksfluid2d.hpp"
#include "fsdl/limit_lab.hpp"

namespace fsdl {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw IoError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw IoError("not a number: '" + s + "'");
    return v;
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, so a partially written file is never visible at `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw IoError("missing CSV column " + name);
    }
    double number(std::size_t row, const std::string& name) const { return parse_double(rows.at(row).at(column(name))); }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) throw IoError("CSV row has " + std::to_string(cells.size()) + " cells");
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw IoError("CSV without header");
    return t;
}

inline const std::vector<std::string>& monitor_columns() {
    static const std::vector<std::string> cols = {
        "t",          "dt",       "mass",        "c_mass",   "max_n",     "argmax_n",    "min_n",
        "min_c",      "s",        "cs_integral", "ns_integral", "q",     "gradc_q_integral", "gradc_lq",
        "hess_weighted", "p",     "n_lp",        "r",        "u_lr",      "gradc_mixed"};
    return cols;
}

inline std::string monitors_csv(std::span<const MonitorRecord> series) {
    std::string out;
    const auto& cols = monitor_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
    out += '\n';
    for (const auto& m : series) {
        const double v[] = {m.t,     m.dt,     m.mass,          m.c_mass,           m.max_n,
                            static_cast<double>(m.argmax_n),    m.min_n,            m.min_c,
                            m.s,     m.cs_integral, m.ns_integral, m.q,             m.gradc_q_integral,
                            m.gradc_lq, m.hess_weighted, m.p,   m.n_lp,             m.r,
                            m.u_lr,  m.gradc_mixed};
        for (std::size_t k = 0; k < std::size(v); ++k) out += (k ? "," : "") + format_double(v[k]);
        out += '\n';
    }
    return out;
}

inline std::vector<MonitorRecord> read_monitors_csv(const std::string& text) {
    const CsvTable t = parse_csv(text);
    if (t.header != monitor_columns()) throw IoError("unexpected monitor CSV header");
    std::vector<MonitorRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::vector<double> v;
        for (const auto& cell : t.rows[r]) v.push_back(parse_double(cell));
        MonitorRecord m;
        m.t = v[0];
        m.dt = v[1];
        m.mass = v[2];
        m.c_mass = v[3];
        m.max_n = v[4];
        m.argmax_n = static_cast<std::size_t>(v[5]);
        m.min_n = v[6];
        m.min_c = v[7];
        m.s = v[8];
        m.cs_integral = v[9];
        m.ns_integral = v[10];
        m.q = v[11];
        m.gradc_q_integral = v[12];
        m.gradc_lq = v[13];
        m.hess_weighted = v[14];
        m.p = v[15];
        m.n_lp = v[16];
        m.r = v[17];
        m.u_lr = v[18];
        m.gradc_mixed = v[19];
        out.push_back(m);
    }
    return out;
}

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols = {"param",     "sup_n_C0",    "sup_c_C0_tail", "l2_c_H1_tail", "sup_u_C0",
                                                  "max_density", "argmax_x", "argmax_t",      "verdict"};
    return cols;
}

inline std::string sweep_csv(const SweepReport& rep) {
    std::string out;
    const auto& cols = sweep_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
    out += '\n';
    for (const auto& r : rep.rows) {
        const double v[] = {r.param,       r.norms.sup_n_C0, r.norms.sup_c_C0_tail, r.norms.l2_c_H1_tail,
                            r.norms.sup_u_C0, r.max_density, r.argmax_x,           r.argmax_t};
        for (double x : v) out += format_double(x) + ",";
        std::string verdict = r.verdict;
        for (char& ch : verdict)
            if (ch == ',' || ch == '\n') ch = ';';
        out += verdict + '\n';
    }
    return out;
}

inline std::string quasi_blowup_probes_csv(const QuasiBlowupReport& rep) {
    std::string out = "D,eps,argmax_x,argmax_t,n_eps,M,verdict\n";
    for (const auto& r : rep.rows)
        for (const auto& p : r.probes) {
            std::string verdict = p.tracking_exceeded ? kTrackingExceeded : (p.pass ? "pass" : "fail");
            out += format_double(r.D) + "," + format_double(p.eps) + "," + format_double(r.argmax_x) + "," +
                   format_double(r.argmax_t) + "," + format_double(p.value) + "," + format_double(rep.M) + "," +
                   verdict + "\n";
        }
    return out;
}

inline std::string small_data_csv(const SmallDataReport& rep) {
    std::string out = "eps,n_lp0,gradc_lq0,u_lr0,n_lp_max,gradc_lq_max,u_lr_max,steps,verdict\n";
    for (const auto& r : rep.rows) {
        const double v[] = {r.eps, r.n_lp0, r.gradc_lq0, r.u_lr0, r.n_lp_max, r.gradc_lq_max, r.u_lr_max};
        for (double x : v) out += format_double(x) + ",";
        out += std::to_string(r.steps) + "," + (r.bounded ? "bounded" : (r.abort_reason.empty() ? "unbounded" : "aborted")) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

struct SnapshotData {
    int dim = 1;
    std::size_t nx = 0, ny = 1;
    double t = 0.0;
    std::vector<std::string> fields;
    std::vector<std::vector<double>> columns;  // one per field

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t k = 0; k < fields.size(); ++k)
            if (fields[k] == name) return columns[k];
        throw IoError("snapshot has no field " + name);
    }
};

inline std::string format_snapshot(const SnapshotData& s) {
    std::string out = "# fsdl snapshot\n";
    out += s.dim == 1 ? "# grid 1d " + std::to_string(s.nx) + "\n"
                      : "# grid 2d " + std::to_string(s.nx) + " " + std::to_string(s.ny) + "\n";
    out += "# time " + format_double(s.t) + "\n# fields";
    for (const auto& f : s.fields) out += " " + f;
    out += '\n';
    const std::size_t rows = s.columns.empty() ? 0 : s.columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < s.columns.size(); ++k) out += (k ? " " : "") + format_double(s.columns[k][i]);
        out += '\n';
    }
    return out;
}

inline SnapshotData snapshot_data(const State1D& s) {
    const Grid1D& g = s.n.grid();
    SnapshotData d;
    d.dim = 1;
    d.nx = g.n_cells();
    d.t = s.t;
    d.fields = {"x", "n", "c"};
    d.columns.resize(3);
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
        d.columns[0].push_back(g.center(i));
        d.columns[1].push_back(s.n[i]);
        d.columns[2].push_back(s.c[i]);
    }
    return d;
}

inline SnapshotData snapshot_data(const State2D& s) {
    const Grid2D& g = s.n.grid();
    const Field2D uc = cell_velocity(s.u);
    SnapshotData d;
    d.dim = 2;
    d.nx = g.nx();
    d.ny = g.ny();
    d.t = s.t;
    d.fields = {"x", "y", "n", "c", "ux", "uy", "p"};
    d.columns.resize(7);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            d.columns[0].push_back(g.center_x(i));
            d.columns[1].push_back(g.center_y(j));
            d.columns[2].push_back(s.n[k]);
            d.columns[3].push_back(s.c[k]);
            d.columns[4].push_back(uc.component(0)[k]);
            d.columns[5].push_back(uc.component(1)[k]);
            d.columns[6].push_back(s.p[k]);
        }
    return d;
}

inline SnapshotData parse_snapshot(const std::string& text) {
    SnapshotData d;
    std::istringstream in(text);
    std::string line;
    bool have_grid = false, have_time = false, have_fields = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, tag;
            ls >> hash >> tag;
            if (tag == "grid") {
                std::string dim;
                ls >> dim;
                if (dim == "1d") {
                    d.dim = 1;
                    ls >> d.nx;
                } else if (dim == "2d") {
                    d.dim = 2;
                    ls >> d.nx >> d.ny;
                } else {
                    throw IoError("snapshot: bad grid line");
                }
                if (!ls) throw IoError("snapshot: bad grid line");
                have_grid = true;
            } else if (tag == "time") {
                std::string t;
                ls >> t;
                d.t = parse_double(t);
                have_time = true;
            } else if (tag == "fields") {
                std::string f;
                while (ls >> f) d.fields.push_back(f);
                d.columns.assign(d.fields.size(), {});
                have_fields = true;
            }
            continue;
        }
        if (!have_fields) throw IoError("snapshot: data before field header");
        std::string cell;
        std::size_t k = 0;
        while (ls >> cell) {
            if (k >= d.columns.size()) throw IoError("snapshot: too many values in row");
            d.columns[k++].push_back(parse_double(cell));
        }
        if (k != d.columns.size()) throw IoError("snapshot: too few values in row");
    }
    if (!have_grid || !have_time || !have_fields) throw IoError("snapshot: incomplete header");
    const std::size_t expect = d.nx * d.ny;
    for (const auto& c : d.columns)
        if (c.size() != expect) throw IoError("snapshot: row count does not match grid");
    return d;
}

}  // namespace fsdl

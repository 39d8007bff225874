#include "icesim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "icesim/errors.hpp"

namespace icesim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string material_fingerprint(const MaterialModel& model) { return fingerprint(material_to_json(model).dump()); }

SnapshotHeader make_header(const SimConfig& cfg, const Stepper& stepper, const SimState& state) {
    SnapshotHeader h;
    h.dimension = cfg.dimension;
    h.nx = cfg.nx;
    h.nz = cfg.nz;
    h.width = cfg.width;
    h.height = cfg.height;
    h.tau = stepper.config().tau;
    h.R = stepper.family().R();
    h.c_R = stepper.c_R();
    h.material = material_fingerprint(stepper.family().model());
    h.k = state.k;
    h.t = state.t;
    h.U_Omega = state.U_Omega;
    h.p = state.p;
    return h;
}

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& h, const Grid& grid,
                    const SimState& state) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# icesim snapshot\n";
    out << "# dimension=" << h.dimension << " nx=" << h.nx << " nz=" << h.nz << " width=" << format_double(h.width)
        << " height=" << format_double(h.height) << '\n';
    out << "# tau=" << format_double(h.tau) << " R=" << format_double(h.R) << " c_R=" << format_double(h.c_R) << '\n';
    out << "# material=" << h.material << '\n';
    out << "# k=" << h.k << " t=" << format_double(h.t) << " U_Omega=" << format_double(h.U_Omega)
        << " p=" << format_double(h.p) << '\n';
    write_field_rows(out, grid, {"theta", "U", "chi"}, {&state.theta, &state.U, &state.chi});
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError(where + ": unreadable number '" + s + "'");
    }
    if (used != s.size()) throw InputError(where + ": unreadable number '" + s + "'");
    return v;
}

}  // namespace

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open snapshot " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::vector<std::string> columns;
    Snapshot snap;
    const std::string where = path.filename().string();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string tok;
            while (is >> tok) {
                const auto eq = tok.find('=');
                if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        if (columns.empty()) {
            columns = split(line, ',');
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != columns.size()) throw InputError(where + ": ragged row");
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const double v = to_double(cells[c], where);
            if (columns[c] == "theta") snap.theta.push_back(v);
            if (columns[c] == "U") snap.U.push_back(v);
            if (columns[c] == "chi") snap.chi.push_back(v);
        }
    }
    auto need = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw InputError(where + ": header lacks '" + key + "'");
        return it->second;
    };
    auto& h = snap.header;
    h.dimension = static_cast<int>(to_double(need("dimension"), where));
    h.nx = static_cast<int>(to_double(need("nx"), where));
    h.nz = static_cast<int>(to_double(need("nz"), where));
    h.width = to_double(need("width"), where);
    h.height = to_double(need("height"), where);
    h.tau = to_double(need("tau"), where);
    h.R = to_double(need("R"), where);
    h.c_R = to_double(need("c_R"), where);
    h.material = need("material");
    h.k = static_cast<int>(to_double(need("k"), where));
    h.t = to_double(need("t"), where);
    h.U_Omega = to_double(need("U_Omega"), where);
    h.p = to_double(need("p"), where);
    const std::size_t n = static_cast<std::size_t>(h.nx) * static_cast<std::size_t>(h.nz);
    if (snap.theta.size() != n || snap.U.size() != n || snap.chi.size() != n) {
        throw InputError(where + ": field length does not match the grid in the header");
    }
    return snap;
}

std::string header_mismatch(const SnapshotHeader& a, const SnapshotHeader& b) {
    std::ostringstream os;
    if (a.dimension != b.dimension || a.nx != b.nx || a.nz != b.nz) os << "grid shape";
    else if (a.width != b.width || a.height != b.height) os << "grid extent";
    else if (a.tau != b.tau) os << "tau";
    else if (a.R != b.R) os << "R";
    else if (a.c_R != b.c_R) os << "c_R";
    else if (a.material != b.material) os << "material";
    const std::string what = os.str();
    return what.empty() ? what : what + " differs from the run configuration";
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) return c;
    }
    throw InputError("table has no column '" + name + "'");
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    Table t;
    std::string line;
    const std::string where = path.filename().string();
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty()) {
            t.columns = split(line, ',');
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) throw InputError(where + ": ragged row");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(to_double(c, where));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace icesim

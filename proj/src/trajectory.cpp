#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "covctl/errors.hpp"
#include "covctl/scenario.hpp"

namespace covctl {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out(1);
    bool in_quotes = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (in_quotes) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                out.back() += '"';
                ++k;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

double field_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "not a number: '" + s + "'");
    return v;
}

std::optional<double> field_optional(const std::string& s, std::size_t line) {
    if (s.empty()) return std::nullopt;
    return field_double(s, line);
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(std::ostream& out, bool with_theta) : out_(out), with_theta_(with_theta) {
    out_ << (with_theta_ ? "t,id,x,y,theta,HV,HV1,HV2,residual,event\n" : "t,id,x,y,HV,HV1,HV2,residual,event\n");
    out_.flush();
}

void TrajectoryWriter::write_row(const TrajectoryRow& r) {
    out_ << num(r.t) << ',' << r.id << ',' << num(r.x) << ',' << num(r.y) << ',';
    if (with_theta_) out_ << (r.theta ? num(*r.theta) : "") << ',';
    out_ << num(r.hv) << ',' << (r.hv1 ? num(*r.hv1) : "") << ',' << (r.hv2 ? num(*r.hv2) : "") << ','
         << num(r.residual) << ',' << quoted(r.event) << '\n';
}

void TrajectoryWriter::write(const TrajectoryRecord& r) {
    for (std::size_t i = 0; i < r.positions.size(); ++i) {
        TrajectoryRow row;
        row.t = r.t;
        row.id = i;
        row.x = r.positions[i].x;
        row.y = r.positions[i].y;
        if (i < r.headings.size()) row.theta = r.headings[i];
        row.hv = r.cost.total;
        row.hv1 = r.cost.quantization;
        row.hv2 = r.cost.displacement;
        row.residual = r.residual;
        row.event = r.event;
        write_row(row);
    }
    out_.flush();
}

std::vector<TrajectoryRow> read_trajectory(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(1, "empty trajectory file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool theta = false;
    if (line == "t,id,x,y,theta,HV,HV1,HV2,residual,event")
        theta = true;
    else if (line != "t,id,x,y,HV,HV1,HV2,residual,event")
        throw ParseError(1, "unexpected trajectory header");
    const std::size_t width = theta ? 10 : 9;
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = csv_fields(line);
        if (f.size() != width) throw ParseError(lineno, "expected " + std::to_string(width) + " fields");
        TrajectoryRow r;
        std::size_t k = 0;
        r.t = field_double(f[k++], lineno);
        std::uint64_t id = 0;
        const auto [ptr, ec] = std::from_chars(f[k].data(), f[k].data() + f[k].size(), id);
        if (ec != std::errc() || ptr != f[k].data() + f[k].size()) throw ParseError(lineno, "bad agent id");
        ++k;
        r.id = id;
        r.x = field_double(f[k++], lineno);
        r.y = field_double(f[k++], lineno);
        if (theta) r.theta = field_optional(f[k++], lineno);
        r.hv = field_double(f[k++], lineno);
        r.hv1 = field_optional(f[k++], lineno);
        r.hv2 = field_optional(f[k++], lineno);
        r.residual = field_double(f[k++], lineno);
        r.event = f[k];
        rows.push_back(std::move(r));
    }
    return rows;
}

DescentCheck check_descent(const std::vector<TrajectoryRow>& rows, double tol) {
    DescentCheck c;
    std::optional<double> prev;
    for (const TrajectoryRow& r : rows) {
        if (r.id != 0) continue;  // one value per snapshot
        const bool energy = r.event.rfind("E=", 0) == 0;
        const double v = energy ? std::stod(r.event.substr(2)) : r.hv;
        if (c.column.empty()) c.column = energy ? "E" : "HV";
        if (prev) {
            ++c.checked;
            const double rise = v - *prev;
            if (rise > tol * (1.0 + std::abs(*prev)) && rise > c.worst_increase) {
                c.ok = false;
                c.worst_increase = rise;
                c.at_time = r.t;
            }
        }
        prev = v;
    }
    return c;
}

}  // namespace covctl

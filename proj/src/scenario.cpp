#include "covctl/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "covctl/errors.hpp"

namespace covctl {

namespace {

const std::vector<std::pair<Algorithm, const char*>> kAlgorithms{
    {Algorithm::LloydContinuous, "lloyd-continuous"},
    {Algorithm::LloydMap, "lloyd-map"},
    {Algorithm::PCenter, "pcenter"},
    {Algorithm::Pd, "pd"},
    {Algorithm::Unicycle, "unicycle"},
    {Algorithm::LocalRounds, "local-rounds"},
    {Algorithm::DistI, "dist-I"},
    {Algorithm::DistII, "dist-II"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string points_text(const std::vector<Point2>& pts) {
    std::string out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k) out += "; ";
        out += num(pts[k].x) + "," + num(pts[k].y);
    }
    return out;
}

std::string list_text(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += "; ";
        out += num(xs[k]);
    }
    return out;
}

struct Entry {
    std::string value;
    std::size_t line;
};

// Parsed sections with the line of each key and each section header.
class Document {
public:
    explicit Document(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        std::size_t line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') throw ParseError(line, "unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (!kSections.count(section)) throw ParseError(line, "unknown section [" + section + "]");
                if (section_lines_.count(section)) throw ParseError(line, "duplicate section [" + section + "]");
                section_lines_[section] = line;
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ParseError(line, "expected key = value");
            if (section.empty()) throw ParseError(line, "key outside of any section");
            const std::string key = trim(s.substr(0, eq));
            if (key.empty()) throw ParseError(line, "empty key");
            auto& keys = entries_[section];
            if (keys.count(key)) throw ParseError(line, "duplicate key '" + key + "'");
            keys[key] = {trim(s.substr(eq + 1)), line};
        }
        last_line_ = line;
    }

    bool has_section(const std::string& s) const { return section_lines_.count(s) > 0; }
    std::size_t section_line(const std::string& s) const {
        const auto it = section_lines_.find(s);
        return it == section_lines_.end() ? last_line_ : it->second;
    }

    const Entry* find(const std::string& section, const std::string& key) {
        used_[section].insert(key);
        const auto s = entries_.find(section);
        if (s == entries_.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    const Entry& require(const std::string& section, const std::string& key) {
        if (!has_section(section)) throw ParseError(last_line_, "missing section [" + section + "]");
        const Entry* e = find(section, key);
        if (!e) throw ParseError(section_line(section), "missing key '" + key + "' in [" + section + "]");
        return *e;
    }

    void reject_unused() const {
        for (const auto& [section, keys] : entries_) {
            const auto u = used_.find(section);
            for (const auto& [key, entry] : keys)
                if (u == used_.end() || !u->second.count(key))
                    throw ParseError(entry.line, "unknown key '" + key + "' in [" + section + "]");
        }
    }

private:
    inline static const std::set<std::string> kSections{
        "scenario", "region", "agents", "density", "performance", "algorithm", "network"};
    std::map<std::string, std::map<std::string, Entry>> entries_;
    std::map<std::string, std::size_t> section_lines_;
    std::map<std::string, std::set<std::string>> used_;
    std::size_t last_line_ = 0;
};

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const std::string t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ParseError(line, "not a number: '" + t + "'");
    if (!std::isfinite(v)) throw ParseError(line, "number is not finite: '" + t + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    const std::string t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ParseError(line, "not a non-negative integer: '" + t + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

Point2 parse_point(const std::string& s, std::size_t line) {
    const auto xy = split(s, ',');
    if (xy.size() != 2) throw ParseError(line, "expected x,y but got '" + trim(s) + "'");
    return {parse_double(xy[0], line), parse_double(xy[1], line)};
}

std::vector<Point2> parse_points(const Entry& e) {
    std::vector<Point2> out;
    for (const auto& part : split(e.value, ';')) {
        if (part.empty()) continue;
        out.push_back(parse_point(part, e.line));
    }
    return out;
}

std::vector<double> parse_list(const Entry& e) {
    std::vector<double> out;
    for (const auto& part : split(e.value, ';')) {
        if (part.empty()) continue;
        out.push_back(parse_double(part, e.line));
    }
    return out;
}

[[noreturn]] void invalid(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

void read_double(Document& doc, const char* section, const char* key, double& out, bool positive) {
    if (const Entry* e = doc.find(section, key)) {
        out = parse_double(e->value, e->line);
        if (positive && !(out > 0.0)) invalid(e->line, std::string(key) + " must be positive");
        if (!positive && out < 0.0) invalid(e->line, std::string(key) + " must be non-negative");
    }
}

void read_count(Document& doc, const char* section, const char* key, std::size_t& out) {
    if (const Entry* e = doc.find(section, key)) out = parse_unsigned(e->value, e->line);
}

DensityField parse_density(Document& doc) {
    if (!doc.has_section("density")) return DensityField::uniform();
    const Entry& kind = doc.require("density", "kind");
    const std::size_t line = kind.line;
    auto get = [&](const char* key, double fallback) {
        const Entry* e = doc.find("density", key);
        return e ? parse_double(e->value, e->line) : fallback;
    };
    auto r_from_r2 = [&](double fallback) {
        const double r2 = get("r2", fallback * fallback);
        if (r2 < 0.0) invalid(line, "r2 must be non-negative");
        return std::sqrt(r2);
    };
    try {
        if (kind.value == "uniform") return DensityField::uniform();
        if (kind.value == "gaussian") {
            Point2 c{0, 0};
            if (const Entry* e = doc.find("density", "center")) c = parse_point(e->value, e->line);
            return density::Gaussian{c, get("gain", 1.0)};
        }
        if (kind.value == "line") return density::Line{get("a", 1), get("b", 0), get("c", 0), get("k", 1)};
        if (kind.value == "ellipse") {
            density::Ellipse d{get("a", 1), get("b", 1), get("xc", 0), get("yc", 0), 1.0, get("k", 1)};
            d.r = r_from_r2(1.0);
            return d;
        }
        if (kind.value == "disk") {
            density::Disk d{get("a", 1), get("b", 1), get("xc", 0), get("yc", 0), 1.0, get("k", 1), get("ell", 10)};
            d.r = r_from_r2(1.0);
            return d;
        }
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        invalid(line, e.what());
    }
    throw ParseError(line, "unknown density kind '" + kind.value + "'");
}

std::string density_text(const DensityField& phi) {
    std::string out = "[density]\nkind = " + phi.name() + "\n";
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, density::Gaussian>) {
                out += "center = " + num(d.center.x) + "," + num(d.center.y) + "\n";
                out += "gain = " + num(d.gain) + "\n";
            } else if constexpr (std::is_same_v<T, density::Line>) {
                out += "a = " + num(d.a) + "\nb = " + num(d.b) + "\nc = " + num(d.c) + "\nk = " + num(d.k) + "\n";
            } else if constexpr (std::is_same_v<T, density::Ellipse> || std::is_same_v<T, density::Disk>) {
                out += "a = " + num(d.a) + "\nb = " + num(d.b) + "\nxc = " + num(d.xc) + "\nyc = " + num(d.yc) +
                       "\nr2 = " + num(d.r * d.r) + "\nk = " + num(d.k) + "\n";
                if constexpr (std::is_same_v<T, density::Disk>) out += "ell = " + num(d.ell) + "\n";
            }
        },
        phi.variant());
    return out;
}

}  // namespace

std::string to_string(Algorithm a) {
    for (const auto& [alg, name] : kAlgorithms)
        if (alg == a) return name;
    return "?";
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
    for (const auto& [alg, name] : kAlgorithms)
        if (s == name) return alg;
    return std::nullopt;
}

SensingPerformance PerformanceSpec::make() const {
    return power == 2.0 ? SensingPerformance::quadratic() : SensingPerformance::power(power);
}

CoverageProblem ScenarioConfig::problem() const { return {region, density, performance.make()}; }

Configuration ScenarioConfig::initial_positions() const {
    if (positions) return *positions;
    double x0 = region[0].x, x1 = x0, y0 = region[0].y, y1 = y0;
    for (const Point2& v : region.vertices()) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    std::seed_seq s{seed, std::uint64_t{17}};
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    Configuration out;
    for (std::size_t attempts = 0; out.size() < n; ++attempts) {
        if (attempts > 1000 * (n + 10)) throw ValidationError("cannot place agents with the requested separation");
        const Point2 q{ux(rng), uy(rng)};
        if (!region.contains(q, 0.0)) continue;
        bool ok = true;
        for (const Point2& p : out) ok = ok && distance(p, q) > min_separation;
        if (ok) out.push_back(q);
    }
    return out;
}

std::vector<double> ScenarioConfig::initial_headings() const {
    if (!headings.empty()) return headings;
    std::seed_seq s{seed, std::uint64_t{23}};
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    std::vector<double> out(n);
    for (double& h : out) h = u(rng);
    return out;
}

BehaviorOptions ScenarioConfig::behavior() const {
    BehaviorOptions b;
    b.schedule = schedule;
    b.messages = messages;
    b.horizon = horizon;
    b.tol = tol;
    b.seed = seed;
    b.delta0 = delta0;
    b.fairness_bound = fairness_bound;
    b.motion_fraction = motion_fraction;
    b.monitor_period = monitor_period;
    return b;
}

ScenarioConfig parse_scenario(const std::string& text) {
    Document doc(text);
    ScenarioConfig cfg;

    if (const Entry* e = doc.find("scenario", "name")) cfg.name = e->value;
    if (const Entry* e = doc.find("scenario", "seed")) cfg.seed = parse_unsigned(e->value, e->line);

    const Entry& verts = doc.require("region", "vertices");
    try {
        cfg.region = ConvexPolygon::from_vertices(parse_points(verts));
    } catch (const ValidationError& e) {
        invalid(verts.line, e.what());
    }

    const Entry& n = doc.require("agents", "n");
    cfg.n = parse_unsigned(n.value, n.line);
    if (cfg.n == 0) invalid(n.line, "n must be at least 1");
    if (const Entry* e = doc.find("agents", "min_separation")) cfg.min_separation = parse_double(e->value, e->line);
    if (const Entry* e = doc.find("agents", "positions")) {
        cfg.positions = parse_points(*e);
        if (cfg.positions->size() != cfg.n)
            invalid(e->line, "expected " + std::to_string(cfg.n) + " positions, got " +
                                 std::to_string(cfg.positions->size()));
        for (std::size_t i = 0; i < cfg.n; ++i)
            if (!cfg.region.contains((*cfg.positions)[i]))
                invalid(e->line, "agent " + std::to_string(i) + " lies outside the region");
    }
    if (const Entry* e = doc.find("agents", "headings")) {
        cfg.headings = parse_list(*e);
        if (cfg.headings.size() != cfg.n) invalid(e->line, "expected one heading per agent");
    }
    if (const Entry* e = doc.find("agents", "clock_rates")) {
        cfg.schedule.clock_rates = parse_list(*e);
        if (cfg.schedule.clock_rates.size() != cfg.n) invalid(e->line, "expected one clock rate per agent");
        for (double r : cfg.schedule.clock_rates)
            if (!(r > 0.0)) invalid(e->line, "clock rates must be positive");
    }

    cfg.density = parse_density(doc);
    if (const Entry* e = doc.find("performance", "power")) {
        cfg.performance.power = parse_double(e->value, e->line);
        if (!(cfg.performance.power >= 1.0)) invalid(e->line, "power must be at least 1");
    }

    if (const Entry* e = doc.find("algorithm", "name")) {
        const auto a = algorithm_from_string(e->value);
        if (!a) throw ParseError(e->line, "unknown algorithm '" + e->value + "'");
        cfg.algorithm = *a;
    }
    read_double(doc, "algorithm", "k_prop", cfg.k_prop, true);
    read_double(doc, "algorithm", "k_deriv", cfg.k_deriv, true);
    read_double(doc, "algorithm", "delta0", cfg.delta0, true);
    read_double(doc, "algorithm", "delta", cfg.delta, true);
    read_double(doc, "algorithm", "h", cfg.h, true);
    read_count(doc, "algorithm", "max_steps", cfg.max_steps);
    read_double(doc, "algorithm", "tol", cfg.tol, false);
    read_double(doc, "algorithm", "horizon", cfg.horizon, true);

    read_double(doc, "network", "gap_min", cfg.schedule.gap_min, true);
    read_double(doc, "network", "gap_max", cfg.schedule.gap_max, true);
    read_double(doc, "network", "latency", cfg.messages.latency, false);
    read_double(doc, "network", "jitter", cfg.messages.jitter, false);
    read_double(doc, "network", "staleness_budget", cfg.messages.staleness_budget, true);
    read_count(doc, "network", "max_requeries", cfg.messages.max_requeries);
    read_count(doc, "network", "fairness_bound", cfg.fairness_bound);
    read_double(doc, "network", "monitor_period", cfg.monitor_period, true);
    read_double(doc, "network", "motion_fraction", cfg.motion_fraction, true);
    if (!(cfg.schedule.gap_max > cfg.schedule.gap_min))
        invalid(doc.section_line("network"), "gap_max must exceed gap_min");
    if (cfg.fairness_bound == 0) invalid(doc.section_line("network"), "fairness_bound must be positive");
    if (!(cfg.motion_fraction < 1.0)) invalid(doc.section_line("network"), "motion_fraction must be below 1");

    doc.reject_unused();
    return cfg;
}

std::string to_text(const ScenarioConfig& cfg) {
    std::string out;
    out += "[scenario]\n";
    if (!cfg.name.empty()) out += "name = " + cfg.name + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n\n";
    out += "[region]\nvertices = " + points_text(cfg.region.vertices()) + "\n\n";
    out += "[agents]\nn = " + std::to_string(cfg.n) + "\n";
    if (cfg.positions) out += "positions = " + points_text(*cfg.positions) + "\n";
    out += "min_separation = " + num(cfg.min_separation) + "\n";
    if (!cfg.headings.empty()) out += "headings = " + list_text(cfg.headings) + "\n";
    if (!cfg.schedule.clock_rates.empty()) out += "clock_rates = " + list_text(cfg.schedule.clock_rates) + "\n";
    out += "\n" + density_text(cfg.density) + "\n";
    out += "[performance]\npower = " + num(cfg.performance.power) + "\n\n";
    out += "[algorithm]\nname = " + to_string(cfg.algorithm) + "\n";
    out += "k_prop = " + num(cfg.k_prop) + "\n";
    out += "k_deriv = " + num(cfg.k_deriv) + "\n";
    out += "delta0 = " + num(cfg.delta0) + "\n";
    out += "delta = " + num(cfg.delta) + "\n";
    out += "h = " + num(cfg.h) + "\n";
    out += "max_steps = " + std::to_string(cfg.max_steps) + "\n";
    out += "tol = " + num(cfg.tol) + "\n";
    out += "horizon = " + num(cfg.horizon) + "\n\n";
    out += "[network]\n";
    out += "gap_min = " + num(cfg.schedule.gap_min) + "\n";
    out += "gap_max = " + num(cfg.schedule.gap_max) + "\n";
    out += "latency = " + num(cfg.messages.latency) + "\n";
    out += "jitter = " + num(cfg.messages.jitter) + "\n";
    if (std::isfinite(cfg.messages.staleness_budget))
        out += "staleness_budget = " + num(cfg.messages.staleness_budget) + "\n";
    out += "max_requeries = " + std::to_string(cfg.messages.max_requeries) + "\n";
    out += "fairness_bound = " + std::to_string(cfg.fairness_bound) + "\n";
    out += "monitor_period = " + num(cfg.monitor_period) + "\n";
    out += "motion_fraction = " + num(cfg.motion_fraction) + "\n";
    return out;
}

}  // namespace covctl

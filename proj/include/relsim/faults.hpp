#pragma once

#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "relsim/model.hpp"
#include "relsim/parser.hpp"
#include "relsim/rng.hpp"
#include "relsim/validate.hpp"

namespace relsim {

// Fault-time distribution. Times are hours throughout.
struct Distribution {
    enum class Kind { exponential, weibull } kind = Kind::exponential;
    double rate = 0.0;     // exponential: 1/hour
    double shape = 0.0;    // weibull: dimensionless
    double scale_h = 0.0;  // weibull: hours
    // When the table spelled the weibull scale as a characteristic rate
    // (1/hour), the raw published value is kept here; 0 means the scale was
    // given directly in hours.
    double raw_char_rate = 0.0;

    static Distribution exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
        Distribution d;
        d.kind = Kind::exponential;
        d.rate = rate;
        return d;
    }
    static Distribution weibull(double shape, double scale_h) {
        if (!(shape > 0.0)) throw std::invalid_argument("weibull shape must be > 0");
        if (!(scale_h > 0.0)) throw std::invalid_argument("weibull scale must be > 0");
        Distribution d;
        d.kind = Kind::weibull;
        d.shape = shape;
        d.scale_h = scale_h;
        return d;
    }

    // Inverse-CDF sample from u uniform on (0, 1].
    double sample_from_unit(double u) const {
        if (kind == Kind::exponential) return -std::log(u) / rate;
        return scale_h * std::pow(-std::log(u), 1.0 / shape);
    }
    double sample(CounterRng& rng) const { return sample_from_unit(rng.next_unit()); }

    double cdf(double t) const {
        if (t <= 0.0) return 0.0;
        if (kind == Kind::exponential) return 1.0 - std::exp(-rate * t);
        return 1.0 - std::exp(-std::pow(t / scale_h, shape));
    }

    double mean() const {
        if (kind == Kind::exponential) return 1.0 / rate;
        return scale_h * std::tgamma(1.0 + 1.0 / shape);
    }
};

// One resolved fault-table row: a distribution bound to a hardware fault
// event of one component instance, deliverable through the system port the
// instance's fault port is bound to.
struct FaultAnnotation {
    std::string instance;
    std::string port;   // the instance's fault port
    std::string event;
    std::string system_port;  // bound boundary port used for delivery
    Distribution distribution;
    std::string from_state;  // informational
    std::string to_state;    // informational
    std::uint64_t identity = 0;  // content hash; keys the sampling substream
    int source_line = 0;
};

struct FaultTable {
    std::vector<FaultAnnotation> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }
};

namespace detail {

inline bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, match = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            match = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++match;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    for (auto& f : fields) {
        std::size_t b = f.find_first_not_of(" \t");
        std::size_t e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
    }
    return fields;
}

inline double parse_number(const std::string& text, const std::string& unit, int line,
                           const char* what) {
    if (text.empty()) throw ParseError(unit, {line, 1}, std::string("missing ") + what);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
        throw ParseError(unit, {line, 1},
                         std::string("malformed ") + what + " '" + text + "'");
    return v;
}

}  // namespace detail

inline std::uint64_t fault_row_identity(const std::string& instance, const std::string& port,
                                        const std::string& event) {
    return fnv1a(event, fnv1a(port, fnv1a(instance)) * 0x100000001b3ull);
}

// Parses a `.faults.csv` unit and resolves every row against the composite.
// `instance` accepts glob patterns (*, ?), expanded in instance declaration
// order. Each resolved (instance, port) pair must be reachable from a bound
// system input port. Throws ParseError on malformed rows, unknown targets,
// non-positive parameters, or duplicate (instance, event) rows.
inline FaultTable parse_fault_table(const SourceUnit& unit, const CompositeDef& composite,
                                    const ModelLibrary& library) {
    if (unit.kind != SourceKind::fault_table)
        throw ParseError(unit.path, {1, 1}, "not a fault table unit");

    // (instance, port) -> system port bound to it
    std::map<std::pair<std::string, std::string>, std::string> bound;
    for (const auto& b : composite.bindings)
        bound[{b.instance, b.port}] = b.system_port;

    FaultTable table;
    std::set<std::pair<std::string, std::string>> seen;  // (instance, port.event)
    bool header_seen = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= unit.text.size()) {
        std::size_t eol = unit.text.find('\n', pos);
        std::string line = unit.text.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? unit.text.size() + 1 : eol + 1;
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = detail::split_csv_line(line);
        if (!header_seen) {
            if (fields.size() < 8 || fields[0] != "instance" || fields[1] != "port" ||
                fields[2] != "event" || fields[3] != "dist")
                throw ParseError(unit.path, {line_no, 1},
                                 "expected header "
                                 "'instance,port,event,dist,param1,param2,from_state,to_state'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 8)
            throw ParseError(unit.path, {line_no, 1},
                             "expected 8 fields, got " + std::to_string(fields.size()));
        const std::string& pattern = fields[0];
        const std::string& port = fields[1];
        const std::string& event = fields[2];
        const std::string& dist = fields[3];

        Distribution distribution;
        try {
            if (dist == "exp") {
                distribution = Distribution::exponential(
                    detail::parse_number(fields[4], unit.path, line_no, "rate"));
            } else if (dist == "weibull") {
                distribution = Distribution::weibull(
                    detail::parse_number(fields[4], unit.path, line_no, "shape"),
                    detail::parse_number(fields[5], unit.path, line_no, "scale"));
            } else if (dist == "weibull_rate") {
                double shape = detail::parse_number(fields[4], unit.path, line_no, "shape");
                double char_rate =
                    detail::parse_number(fields[5], unit.path, line_no, "characteristic rate");
                if (!(char_rate > 0.0))
                    throw std::invalid_argument("characteristic rate must be > 0");
                distribution = Distribution::weibull(shape, 1.0 / char_rate);
                distribution.raw_char_rate = char_rate;
            } else {
                throw ParseError(unit.path, {line_no, 1},
                                 "unknown distribution '" + dist +
                                     "' (expected exp, weibull or weibull_rate)");
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(unit.path, {line_no, 1}, e.what());
        }

        std::vector<std::string> matched;
        for (const auto& inst : composite.instances)
            if (detail::glob_match(pattern, inst.name)) matched.push_back(inst.name);
        if (matched.empty())
            throw ParseError(unit.path, {line_no, 1},
                             "instance pattern '" + pattern + "' matches no instance");

        for (const auto& instance : matched) {
            const InstanceDecl* inst = composite.find_instance(instance);
            const StatechartDef* chart = library.find_statechart(inst->statechart);
            const PortDef* pdef = chart ? chart->find_port(port) : nullptr;
            if (!pdef)
                throw ParseError(unit.path, {line_no, 1},
                                 "unknown port '" + instance + "." + port + "'");
            const InterfaceDef* iface = library.find_interface(pdef->interface);
            const EventDecl* edef = iface ? iface->find_event(event) : nullptr;
            if (!edef)
                throw ParseError(unit.path, {line_no, 1},
                                 "unknown event '" + event + "' on port '" + instance + "." +
                                     port + "'");
            if (pdef->effective_direction(edef->direction) != EventDirection::in)
                throw ParseError(unit.path, {line_no, 1},
                                 "event '" + event + "' is not an input on port '" + instance +
                                     "." + port + "'");
            auto bit = bound.find({instance, port});
            if (bit == bound.end())
                throw ParseError(unit.path, {line_no, 1},
                                 "port '" + instance + "." + port +
                                     "' is not bound to a system port");
            if (!seen.insert({instance, event}).second)
                throw ParseError(unit.path, {line_no, 1},
                                 "duplicate fault row for '" + instance + "." + event + "'");
            FaultAnnotation row;
            row.instance = instance;
            row.port = port;
            row.event = event;
            row.system_port = bit->second;
            row.distribution = distribution;
            row.from_state = fields[6];
            row.to_state = fields[7];
            row.identity = fault_row_identity(instance, port, event);
            row.source_line = line_no;
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

// [time in hours] one inverse-CDF draw from the distribution.
inline double sample_fault_time(const Distribution& d, CounterRng& rng) {
    return d.sample(rng);
}

// Replaces every Weibull row with an exponential row of equal mean and
// multiplies all rates by `rate_scale` (time axis scaling). Used to build
// the Markovian model variant the CTMC oracle can solve exactly.
inline FaultTable make_all_exponential(const FaultTable& table, double rate_scale = 1.0) {
    FaultTable out = table;
    for (auto& row : out.rows) {
        double rate = 1.0 / row.distribution.mean();
        row.distribution = Distribution::exponential(rate * rate_scale);
    }
    return out;
}

}  // namespace relsim

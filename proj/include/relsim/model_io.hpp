#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "relsim/faults.hpp"
#include "relsim/parser.hpp"
#include "relsim/validate.hpp"

namespace relsim {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline SourceUnit load_source_unit(const std::filesystem::path& path) {
    return make_source_unit(path.string(), read_text_file(path));
}

// A fully parsed model directory: interface files first, then statecharts,
// then the composite. File import lists are informational; resolution is
// directory-driven and deterministic (lexicographic file order).
struct LoadedModel {
    ModelLibrary library;
    std::vector<std::vector<InterfaceDef>> interface_units;  // per .gi file
    std::optional<CompositeDef> composite;
    std::vector<std::filesystem::path> files;  // everything parsed, load order

    // Full validation; parse errors have already been thrown by load time.
    ValidationReport validate() const {
        ValidationReport report;
        for (const auto& [name, chart] : library.statecharts) {
            auto r = validate_statechart(chart, library);
            report.insert(report.end(), r.begin(), r.end());
        }
        if (composite) {
            auto r = validate_composite(*composite, library);
            report.insert(report.end(), r.begin(), r.end());
        }
        return report;
    }
};

// Loads every .gi / .gsc / .gcd under `dir` (non-recursive). Throws
// ParseError on the first syntax or resolution error, ModelError when the
// directory holds no composite or more than one.
inline LoadedModel load_model_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw ModelError("model directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> gi, gsc, gcd;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".gi")
            gi.push_back(entry.path());
        else if (ext == ".gsc")
            gsc.push_back(entry.path());
        else if (ext == ".gcd")
            gcd.push_back(entry.path());
    }
    auto by_name = [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    };
    std::sort(gi.begin(), gi.end(), by_name);
    std::sort(gsc.begin(), gsc.end(), by_name);
    std::sort(gcd.begin(), gcd.end(), by_name);

    LoadedModel model;
    for (const auto& path : gi) {
        auto unit = load_source_unit(path);
        auto interfaces = parse_interfaces(unit);
        for (auto& iface : interfaces) {
            if (model.library.interfaces.count(iface.name))
                throw ParseError(unit.path, iface.pos,
                                 "interface '" + iface.name + "' already defined");
            model.library.interfaces.emplace(iface.name, iface);
        }
        model.interface_units.push_back(std::move(interfaces));
        model.files.push_back(path);
    }
    for (const auto& path : gsc) {
        auto unit = load_source_unit(path);
        auto chart = parse_statechart(unit, model.library);
        if (model.library.statecharts.count(chart.name))
            throw ParseError(unit.path, chart.pos,
                             "statechart '" + chart.name + "' already defined");
        model.library.statecharts.emplace(chart.name, std::move(chart));
        model.files.push_back(path);
    }
    for (const auto& path : gcd) {
        auto unit = load_source_unit(path);
        if (model.composite)
            throw ModelError("model directory '" + dir.string() +
                             "' holds more than one composite");
        model.composite = parse_composite(unit, model.library);
        model.files.push_back(path);
    }
    return model;
}

}  // namespace relsim

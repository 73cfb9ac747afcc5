#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relsim {

// 1-based source position; {0,0} means "unknown / synthesized".
struct SourcePos {
    int line = 0;
    int col = 0;

    bool known() const { return line > 0; }
};

// A single validation finding. `path` names the model element
// ("Epas/channel#3", "SensorStatechart/main/Ok/transition#1"), `pos` points
// into the source text when the element came from a parsed file.
struct Diagnostic {
    std::string path;
    SourcePos pos;
    std::string message;
};

using ValidationReport = std::vector<Diagnostic>;

inline std::string format_diagnostic(const Diagnostic& d) {
    std::string s = d.path;
    if (d.pos.known()) {
        s += ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col);
    }
    s += ": " + d.message;
    return s;
}

// Syntax or resolution failure inside a single source unit. Parsing stops at
// the first error; there is no recovery.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string unit, SourcePos pos, const std::string& message)
        : std::runtime_error(unit + ":" + std::to_string(pos.line) + ":" +
                             std::to_string(pos.col) + ": " + message),
          unit_(std::move(unit)),
          pos_(pos),
          message_(message) {}

    const std::string& unit() const { return unit_; }
    SourcePos pos() const { return pos_; }
    const std::string& message() const { return message_; }

private:
    std::string unit_;
    SourcePos pos_;
    std::string message_;
};

// Structural misuse of model-level operations (compiling an invalid
// composite, delivering an event on an unknown port, ...).
class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime failures of the stochastic layers (livelock cap, non-absorbing
// model, impossible condition, degenerate samples).
class SimulationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace relsim

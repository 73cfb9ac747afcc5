#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relsim/diagnostics.hpp"

namespace relsim {

// Scaled variant of the bundled redundant-steering architecture: n_uc
// controller/diagnostic/uC sides with sensors_per_uc sensors each.
struct BenchmarkSpec {
    std::size_t n_uc = 2;
    std::size_t sensors_per_uc = 3;
};

struct GeneratedModel {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

namespace detail {

inline void write_file(GeneratedModel& model, const std::string& name,
                       const std::string& text) {
    auto path = model.dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    model.files.push_back(path);
}

inline std::string side_label(std::size_t index) {
    return std::string(1, static_cast<char>('A' + index));
}

}  // namespace detail

// Writes a complete model directory (interfaces, charts, composite, fault
// table) for the spec. generate_benchmark(2, 3) reproduces the bundled
// model's structure. Voting generalizes to: wrong output on two drifts, or
// one drift with the healthy sensors reduced to a non-majority of the online
// set; a side loses assist when its uC dies or every sensor is offline; the
// system self-steers on any side's wrong output and loses assist when every
// side has.
inline GeneratedModel generate_benchmark(const BenchmarkSpec& spec,
                                         const std::filesystem::path& dir) {
    if (spec.n_uc < 1 || spec.sensors_per_uc < 1)
        throw std::invalid_argument("benchmark spec requires n_uc >= 1 and sensors_per_uc >= 1");
    if (spec.n_uc > 26)
        throw std::invalid_argument("benchmark spec supports at most 26 uC sides");

    GeneratedModel model;
    model.dir = dir;
    std::filesystem::create_directories(dir);
    if (spec.sensors_per_uc % 2 == 0)
        model.warnings.push_back("sensors_per_uc = " + std::to_string(spec.sensors_per_uc) +
                                 " is even; voting ties resolve against the healthy sensors");

    const std::size_t n = spec.n_uc;
    const std::size_t k = spec.sensors_per_uc;

    detail::write_file(model, "Interfaces.gi", R"(package bench

interface UCFault {
    out event shutdown
}

interface SensorFault {
    out event det
    out event latent
}

interface DiagnosticStatus {
    out event Error
    out event Warning
}

interface Eval {
    out event SS
    out event SLoA
}

interface DiagnosticOutput {
    out event WrongOutput
}

interface Monitor {
    out event warning
    out event loa
    out event selfsteering
}
)");

    detail::write_file(model, "SensorStatechart.gsc", R"(package bench
import "Interfaces.gi"

statechart SensorStatechart [
    port HWFault: requires SensorFault
    port SensorFault: provides SensorFault
] {
    region main {
        initial Ok
        state Ok {
            on HWFault.det / raise SensorFault.det -> Off
            on HWFault.latent / raise SensorFault.latent -> LatentFailure
        }
        state Off {
        }
        state LatentFailure {
        }
    }
}
)");

    detail::write_file(model, "UCStatechart.gsc", R"(package bench
import "Interfaces.gi"

statechart UCStatechart [
    port HWFault: requires UCFault
    port Fault: provides UCFault
] {
    region main {
        initial On
        state On {
            on HWFault.shutdown / raise Fault.shutdown -> Off
        }
        state Off {
        }
    }
}
)");

    {
        std::ostringstream os;
        os << "package bench\nimport \"Interfaces.gi\"\n\n";
        os << "// Voting rule: wrong output on two drifts, or one drift once the healthy\n";
        os << "// sensors are no longer a strict majority of the online set (ties lose).\n";
        os << "statechart DiagnosticStatechart [\n";
        for (std::size_t i = 1; i <= k; ++i)
            os << "    port S" << i << "HW: requires SensorFault\n";
        os << "    port DiagnosticOutput: provides DiagnosticOutput\n";
        os << "    port DiagnosticStatus: provides DiagnosticStatus\n";
        os << "] {\n";
        os << "    var ok_num: integer := " << k << "\n";
        os << "    var drift_num: integer := 0\n";
        os << "    var on_num: integer := " << k << "\n";
        os << "    region counting {\n        initial Count\n        state Count {\n";
        for (std::size_t i = 1; i <= k; ++i) {
            os << "            on S" << i
               << "HW.det / on_num := on_num - 1; ok_num := ok_num - 1 -> Count\n";
            os << "            on S" << i
               << "HW.latent / drift_num := drift_num + 1; ok_num := ok_num - 1 -> Count\n";
        }
        os << "        }\n    }\n";
        const char* wrong_guard =
            "drift_num >= 2 || (drift_num >= 1 && ok_num <= drift_num)";
        os << "    region status {\n        initial Healthy\n        state Healthy {\n";
        os << "            [" << wrong_guard
           << "] / raise DiagnosticOutput.WrongOutput -> VotingBroken\n";
        os << "            [on_num == 0] / raise DiagnosticStatus.Error -> AllOff\n";
        os << "            [on_num < " << k
           << "] / raise DiagnosticStatus.Warning -> Degraded\n";
        os << "        }\n        state Degraded {\n";
        os << "            [" << wrong_guard
           << "] / raise DiagnosticOutput.WrongOutput -> VotingBroken\n";
        os << "            [on_num == 0] / raise DiagnosticStatus.Error -> AllOff\n";
        os << "        }\n        state VotingBroken {\n        }\n        state AllOff {\n"
              "        }\n    }\n}\n";
        detail::write_file(model, "DiagnosticStatechart.gsc", os.str());
    }

    detail::write_file(model, "MainctrlStatechart.gsc", R"(package bench
import "Interfaces.gi"

statechart MainctrlStatechart [
    port DiagnosticOutput: requires DiagnosticOutput
    port DiagnosticStatus: requires DiagnosticStatus
    port UCHW: requires UCFault
    port Monitor: provides Monitor
] {
    region main {
        initial NormalOperation
        state NormalOperation {
            on DiagnosticOutput.WrongOutput / raise Monitor.selfsteering -> LatentError
            on UCHW.shutdown / raise Monitor.loa -> AssistLoss
            on DiagnosticStatus.Error / raise Monitor.loa -> AssistLoss
            on DiagnosticStatus.Warning / raise Monitor.warning -> NormalOperation
        }
        state AssistLoss {
        }
        state LatentError {
        }
    }
}
)");

    {
        std::ostringstream os;
        os << "package bench\nimport \"Interfaces.gi\"\n\n";
        os << "// System states: self-steering on any side's wrong output, loss of assist\n";
        os << "// once all " << n << " side(s) have stopped assisting.\n";
        os << "statechart EvaluationStatechart [\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    port " << detail::side_label(s) << "Monitor: requires Monitor\n";
        os << "    port Eval: provides Eval\n";
        os << "] {\n";
        os << "    var loa_num: integer := 0\n";
        os << "    region main {\n        initial Operation\n        state Operation {\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "            on " << detail::side_label(s)
               << "Monitor.selfsteering / raise Eval.SS -> SelfSteering\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "            on " << detail::side_label(s) << "Monitor.loa [loa_num >= "
               << n - 1 << "] / raise Eval.SLoA -> LossOfAssist\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "            on " << detail::side_label(s)
               << "Monitor.loa / loa_num := loa_num + 1 -> Operation\n";
        os << "        }\n        state SelfSteering {\n        }\n"
              "        state LossOfAssist {\n        }\n    }\n}\n";
        detail::write_file(model, "EvaluationStatechart.gsc", os.str());
    }

    {
        std::ostringstream os;
        os << "package bench\n";
        os << "import \"Interfaces.gi\"\n";
        os << "import \"SensorStatechart.gsc\"\n";
        os << "import \"DiagnosticStatechart.gsc\"\n";
        os << "import \"UCStatechart.gsc\"\n";
        os << "import \"MainctrlStatechart.gsc\"\n";
        os << "import \"EvaluationStatechart.gsc\"\n\n";
        os << "cascade Bench" << n << "x" << k << " [\n";
        os << "    port State: provides Eval\n";
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 1; i <= k; ++i)
                os << "    port S" << i << detail::side_label(s)
                   << "Fault: requires SensorFault\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    port UC" << detail::side_label(s) << "Fault: requires UCFault\n";
        os << "] {\n";
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 1; i <= k; ++i)
                os << "    component S" << i << detail::side_label(s)
                   << ": SensorStatechart\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    component Diag" << detail::side_label(s) << ": DiagnosticStatechart\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    component UC" << detail::side_label(s) << ": UCStatechart\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    component " << detail::side_label(s) << "CTRL: MainctrlStatechart\n";
        os << "    component Ev: EvaluationStatechart\n";
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 1; i <= k; ++i) {
                std::string name = "S" + std::to_string(i) + detail::side_label(s);
                os << "    bind " << name << "Fault->" << name << ".HWFault\n";
            }
        for (std::size_t s = 0; s < n; ++s)
            os << "    bind UC" << detail::side_label(s) << "Fault->UC"
               << detail::side_label(s) << ".HWFault\n";
        os << "    bind State->Ev.Eval\n";
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t i = 1; i <= k; ++i)
                os << "    channel [S" << i << detail::side_label(s)
                   << ".SensorFault] -o)- [Diag" << detail::side_label(s) << ".S" << i
                   << "HW]\n";
        for (std::size_t s = 0; s < n; ++s) {
            os << "    channel [Diag" << detail::side_label(s) << ".DiagnosticOutput] -o)- ["
               << detail::side_label(s) << "CTRL.DiagnosticOutput]\n";
            os << "    channel [Diag" << detail::side_label(s) << ".DiagnosticStatus] -o)- ["
               << detail::side_label(s) << "CTRL.DiagnosticStatus]\n";
        }
        for (std::size_t s = 0; s < n; ++s)
            os << "    channel [UC" << detail::side_label(s) << ".Fault] -o)- ["
               << detail::side_label(s) << "CTRL.UCHW]\n";
        for (std::size_t s = 0; s < n; ++s)
            os << "    channel [" << detail::side_label(s) << "CTRL.Monitor] -o)- [Ev."
               << detail::side_label(s) << "Monitor]\n";
        os << "    evaluation Ev {\n";
        os << "        SelfSteering -> SelfSteering\n";
        os << "        LossOfAssist -> LossOfAssist\n";
        os << "    }\n}\n";
        detail::write_file(model, "Bench.gcd", os.str());
    }

    detail::write_file(model, "bench.faults.csv",
                       "# Fault occurrence distributions replicated per instance.\n"
                       "instance,port,event,dist,param1,param2,from_state,to_state\n"
                       "S*,HWFault,det,exp,1.0e-8,,Ok,Off\n"
                       "S*,HWFault,latent,exp,1.0e-9,,Ok,LatentFailure\n"
                       "UC*,HWFault,shutdown,weibull_rate,1.5,0.1e-9,On,Off\n");
    return model;
}

}  // namespace relsim

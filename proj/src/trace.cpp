#include "cstar/trace.hpp"

#include <cstdlib>
#include <string_view>

namespace cstar {

TraceLevel trace_level_from_env() {
    const char* v = std::getenv("RCG_LOG");
    return (v && std::string_view(v) == "debug") ? TraceLevel::Debug : TraceLevel::Info;
}

void TraceLog::emit(double t, const std::string& kind, const nlohmann::ordered_json& payload, int robot,
                    bool debug_only) {
    if (debug_only && level_ != TraceLevel::Debug) return;
    nlohmann::ordered_json line;
    line["t"] = t;
    line["kind"] = kind;
    if (robot >= 0) line["robot"] = robot;
    for (const auto& [k, v] : payload.items()) line[k] = v;
    lines_.push_back(line.dump());
}

std::string TraceLog::str() const {
    std::string out;
    for (const std::string& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

}  // namespace cstar

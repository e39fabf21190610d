#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cstar {

enum class TraceLevel { Info, Debug };

/// Reads RCG_LOG (debug|info); anything else means info.
TraceLevel trace_level_from_env();

/// JSON-lines event stream. Every line starts with "t" and "kind".
class TraceLog {
public:
    explicit TraceLog(TraceLevel level = trace_level_from_env()) : level_(level) {}

    TraceLevel level() const { return level_; }
    void emit(double t, const std::string& kind, const nlohmann::ordered_json& payload, int robot = -1,
              bool debug_only = false);
    const std::vector<std::string>& lines() const { return lines_; }
    std::string str() const;

private:
    TraceLevel level_;
    std::vector<std::string> lines_;
};

}  // namespace cstar

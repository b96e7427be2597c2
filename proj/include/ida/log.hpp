// Leveled stderr logging, gated by the IDA_SIM_LOG environment variable
// (off|error|warn|info|debug; default warn).
#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace ida::log {

enum class Level { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

inline Level level() {
    static Level lv = [] {
        const char* env = std::getenv("IDA_SIM_LOG");
        if (!env) return Level::warn;
        if (!std::strcmp(env, "off")) return Level::off;
        if (!std::strcmp(env, "error")) return Level::error;
        if (!std::strcmp(env, "warn")) return Level::warn;
        if (!std::strcmp(env, "info")) return Level::info;
        if (!std::strcmp(env, "debug")) return Level::debug;
        return Level::warn;
    }();
    return lv;
}

inline void emit(Level lv, const char* tag, const std::string& msg) {
    if (level() >= lv) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { emit(Level::error, "error", msg); }
inline void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

} // namespace ida::log

#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string_view>

namespace threatcrawl {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

inline std::atomic<LogLevel>& log_threshold() {
    static std::atomic<LogLevel> level{LogLevel::Warn};
    return level;
}

inline void log_message(LogLevel level, std::string_view msg) {
    if (level < log_threshold().load()) return;
    static std::mutex mu;
    static constexpr const char* names[] = {"debug", "info", "warn", "error"};
    std::lock_guard lock(mu);
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void log_debug(std::string_view msg) { log_message(LogLevel::Debug, msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::Info, msg); }
inline void log_warn(std::string_view msg) { log_message(LogLevel::Warn, msg); }
inline void log_error(std::string_view msg) { log_message(LogLevel::Error, msg); }

}  // namespace threatcrawl

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <string_view>
#include <vector>

#include "threatcrawl/robots.hpp"

namespace threatcrawl {

enum class WorkerRole { Retriever, Extractor };
enum class WorkerState { Idle, Fetching, WaitingDelay, Extracting, Classifying, Stopped, Errored };

std::string_view worker_role_name(WorkerRole role);
std::string_view worker_state_name(WorkerState state);
bool is_terminal(WorkerState state);

// Whether `role` may move from `from` to `to`. Any live state may go to
// Stopped or Errored; terminal states go nowhere.
bool transition_allowed(WorkerRole role, WorkerState from, WorkerState to);

struct WorkerRecord {
    int worker_id = 0;
    WorkerRole role = WorkerRole::Retriever;
    WorkerState state = WorkerState::Idle;
    SteadyClock::time_point since{};
};

struct StateTransition {
    int worker_id = 0;
    WorkerState from = WorkerState::Idle;
    WorkerState to = WorkerState::Idle;
    SteadyClock::time_point at{};
};

// Worker state registry and stop switch. Workers report transitions; the
// monitor is the only writer of the registry.
class Monitor {
public:
    int register_worker(WorkerRole role);

    // Throws std::logic_error on a transition the role does not allow.
    // Re-entering the current state is a no-op.
    void report(int worker_id, WorkerState to);

    // Idempotent. Raises the stop flag seen by every worker.
    void request_stop();
    bool stop_requested() const { return stop_.load(); }
    const std::atomic<bool>& stop_flag() const { return stop_; }

    // True once every registered worker is Stopped or Errored.
    bool wait_all_terminal(std::chrono::duration<double> timeout);

    std::vector<WorkerRecord> snapshot() const;
    std::vector<StateTransition> transitions() const;
    std::size_t live_workers() const;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<int, WorkerRecord> workers_;
    std::vector<StateTransition> log_;
    std::atomic<bool> stop_{false};
    int next_id_ = 1;
};

}  // namespace threatcrawl

#include "threatcrawl/monitor.hpp"

#include <stdexcept>
#include <string>

namespace threatcrawl {

std::string_view worker_role_name(WorkerRole role) {
    return role == WorkerRole::Retriever ? "retriever" : "extractor";
}

std::string_view worker_state_name(WorkerState state) {
    switch (state) {
        case WorkerState::Idle: return "Idle";
        case WorkerState::Fetching: return "Fetching";
        case WorkerState::WaitingDelay: return "WaitingDelay";
        case WorkerState::Extracting: return "Extracting";
        case WorkerState::Classifying: return "Classifying";
        case WorkerState::Stopped: return "Stopped";
        case WorkerState::Errored: return "Errored";
    }
    return "?";
}

bool is_terminal(WorkerState state) { return state == WorkerState::Stopped || state == WorkerState::Errored; }

bool transition_allowed(WorkerRole role, WorkerState from, WorkerState to) {
    using S = WorkerState;
    if (is_terminal(from)) return false;
    if (is_terminal(to)) return true;
    if (role == WorkerRole::Retriever) {
        switch (from) {
            case S::Idle: return to == S::Fetching || to == S::WaitingDelay;
            case S::Fetching: return to == S::WaitingDelay || to == S::Idle;
            case S::WaitingDelay: return to == S::Fetching || to == S::Idle;
            default: return false;
        }
    }
    switch (from) {
        case S::Idle: return to == S::Extracting;
        case S::Extracting: return to == S::Classifying || to == S::Idle;
        case S::Classifying: return to == S::Idle || to == S::Extracting;
        default: return false;
    }
}

int Monitor::register_worker(WorkerRole role) {
    std::lock_guard lock(mu_);
    int id = next_id_++;
    auto now = SteadyClock::now();
    workers_[id] = WorkerRecord{id, role, WorkerState::Idle, now};
    return id;
}

void Monitor::report(int worker_id, WorkerState to) {
    {
        std::lock_guard lock(mu_);
        auto it = workers_.find(worker_id);
        if (it == workers_.end()) throw std::logic_error("unknown worker " + std::to_string(worker_id));
        auto& rec = it->second;
        if (rec.state == to) return;
        if (!transition_allowed(rec.role, rec.state, to)) {
            throw std::logic_error("worker " + std::to_string(worker_id) + ": " +
                                   std::string(worker_state_name(rec.state)) + " -> " +
                                   std::string(worker_state_name(to)) + " not allowed");
        }
        auto now = SteadyClock::now();
        log_.push_back({worker_id, rec.state, to, now});
        rec.state = to;
        rec.since = now;
    }
    cv_.notify_all();
}

void Monitor::request_stop() {
    stop_.store(true);
    cv_.notify_all();
}

bool Monitor::wait_all_terminal(std::chrono::duration<double> timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] {
        for (const auto& [id, rec] : workers_) {
            if (!is_terminal(rec.state)) return false;
        }
        return true;
    });
}

std::vector<WorkerRecord> Monitor::snapshot() const {
    std::lock_guard lock(mu_);
    std::vector<WorkerRecord> out;
    for (const auto& [id, rec] : workers_) out.push_back(rec);
    return out;
}

std::vector<StateTransition> Monitor::transitions() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::size_t Monitor::live_workers() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [id, rec] : workers_) {
        if (!is_terminal(rec.state)) ++n;
    }
    return n;
}

}  // namespace threatcrawl

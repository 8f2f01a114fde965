#include "socsim/inference/router.hpp"

#include <algorithm>
#include <cmath>

#include "socsim/core/error.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

Router::Router(RouterConfig cfg, std::uint64_t master_seed)
    : cfg_(std::move(cfg)), master_seed_(master_seed) {
    if (cfg_.policy == "surrogate_fraction") {
        if (cfg_.surrogate_fraction < 0.0 || cfg_.surrogate_fraction > 1.0) {
            raise(Errc::InvalidFraction,
                  "surrogate_fraction " + std::to_string(cfg_.surrogate_fraction));
        }
    } else if (cfg_.policy != "fidelity_first" && cfg_.policy != "weighted") {
        raise(Errc::InvalidConfig, "unknown routing policy '" + cfg_.policy + "'");
    }
}

void Router::add_backend(const std::string& id, int fidelity_rank, std::uint64_t capacity,
                         double weight) {
    slots_.push_back(BackendSlot{id, fidelity_rank, capacity, weight, 0});
}

void Router::bind_task(const std::string& task_class, const std::string& backend_id) {
    slot(backend_id); // existence check
    auto& list = task_backends_[task_class];
    if (std::find(list.begin(), list.end(), backend_id) == list.end()) {
        list.push_back(backend_id);
    }
}

Router::BackendSlot& Router::slot(const std::string& id) {
    for (auto& s : slots_) {
        if (s.id == id) return s;
    }
    raise(Errc::InvalidConfig, "backend '" + id + "' is not registered");
}

bool Router::has_task(const std::string& task_class) const {
    auto it = task_backends_.find(task_class);
    return it != task_backends_.end() && !it->second.empty();
}

std::vector<std::string> Router::bound_backends(const std::string& task_class) const {
    auto it = task_backends_.find(task_class);
    return it == task_backends_.end() ? std::vector<std::string>{} : it->second;
}

std::uint64_t Router::inflight(const std::string& backend_id) const {
    for (const auto& s : slots_) {
        if (s.id == backend_id) return s.inflight;
    }
    return 0;
}

std::string Router::route(const std::string& task_class, std::uint64_t request_seq) {
    auto it = task_backends_.find(task_class);
    if (it == task_backends_.end() || it->second.empty()) {
        raise(Errc::NoBackendAvailable, "no backend bound for task '" + task_class + "'");
    }
    std::string chosen;
    if (cfg_.policy == "surrogate_fraction") {
        chosen = route_fraction(task_class);
    } else if (cfg_.policy == "weighted") {
        chosen = route_weighted(it->second, request_seq);
    } else {
        chosen = route_fidelity(it->second);
    }
    ++slot(chosen).inflight;
    return chosen;
}

std::string Router::route_fidelity(const std::vector<std::string>& ids) {
    std::vector<BackendSlot*> order;
    for (const auto& id : ids) order.push_back(&slot(id));
    std::sort(order.begin(), order.end(), [](const BackendSlot* a, const BackendSlot* b) {
        if (a->fidelity_rank != b->fidelity_rank) return a->fidelity_rank < b->fidelity_rank;
        return a->id < b->id;
    });
    for (BackendSlot* s : order) {
        if (s->inflight < s->capacity) return s->id;
    }
    if (!cfg_.queue_wait) {
        raise(Errc::NoBackendAvailable, "all backends at capacity");
    }
    // Queue-wait: spill onto the least-loaded backend, fidelity order on ties.
    BackendSlot* best = order.front();
    for (BackendSlot* s : order) {
        if (s->inflight < best->inflight) best = s;
    }
    return best->id;
}

std::string Router::route_weighted(const std::vector<std::string>& ids, std::uint64_t seq) {
    std::vector<BackendSlot*> avail;
    double total = 0.0;
    for (const auto& id : ids) {
        BackendSlot* s = &slot(id);
        if (s->inflight < s->capacity) {
            avail.push_back(s);
            total += s->weight;
        }
    }
    if (avail.empty()) {
        if (!cfg_.queue_wait) {
            raise(Errc::NoBackendAvailable, "all backends at capacity");
        }
        for (const auto& id : ids) {
            avail.push_back(&slot(id));
            total += slot(id).weight;
        }
    }
    if (total <= 0.0) {
        raise(Errc::InvalidConfig, "weighted policy requires positive weights");
    }
    const double u = core::RngStream(master_seed_, "route_weighted", seq).next_double() * total;
    double acc = 0.0;
    for (BackendSlot* s : avail) {
        acc += s->weight;
        if (u < acc) return s->id;
    }
    return avail.back()->id;
}

std::string Router::route_fraction(const std::string& task_class) {
    if (cfg_.surrogate_backend.empty() || cfg_.primary_backend.empty()) {
        raise(Errc::InvalidConfig, "surrogate_fraction policy needs surrogate and primary backends");
    }
    const std::uint64_t c = fraction_counters_[task_class]++;
    const double f = cfg_.surrogate_fraction;
    const bool to_surrogate =
        std::floor(double(c + 1) * f) - std::floor(double(c) * f) >= 1.0;
    return to_surrogate ? cfg_.surrogate_backend : cfg_.primary_backend;
}

void Router::complete_batch() {
    for (auto& s : slots_) s.inflight = 0;
}

} // namespace socsim::inference

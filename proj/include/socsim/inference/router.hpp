#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace socsim::inference {

struct RouterConfig {
    std::string policy = "fidelity_first"; // fidelity_first | weighted | surrogate_fraction
    double surrogate_fraction = 0.0;       // fraction routed to surrogate_backend
    std::string surrogate_backend;         // surrogate_fraction policy
    std::string primary_backend;           // surrogate_fraction policy
    bool queue_wait = true;                // all-at-capacity: wait (spill) vs error
};

// Deterministic dispatch across registered backends.
//  - fidelity_first: highest fidelity rank with a free logical slot.
//  - weighted: weight-proportional draw among free backends, keyed by the
//    request sequence number so the choice is order-independent.
//  - surrogate_fraction(f): a counter stride sends exactly
//    floor((c+1)f)-floor(cf) of each task's requests to the surrogate, the
//    rest to the primary; every prefix of length c holds round(c*f)
//    surrogate picks.
// Logical inflight counts are batch-scoped: route() fills slots, and
// complete_batch() clears them when the bulk dispatch finishes.
class Router {
public:
    struct BackendSlot {
        std::string id;
        int fidelity_rank = 1;
        std::uint64_t capacity = 64;
        double weight = 1.0;
        std::uint64_t inflight = 0;
    };

    Router(RouterConfig cfg, std::uint64_t master_seed);

    void add_backend(const std::string& id, int fidelity_rank, std::uint64_t capacity, double weight);
    void bind_task(const std::string& task_class, const std::string& backend_id);

    // Picks a backend for one request. Throws NoBackendAvailable if nothing
    // is bound, or if all bound backends are at capacity with queue_wait off.
    std::string route(const std::string& task_class, std::uint64_t request_seq);

    void complete_batch();
    std::uint64_t inflight(const std::string& backend_id) const;
    bool has_task(const std::string& task_class) const;
    std::vector<std::string> bound_backends(const std::string& task_class) const;

private:
    BackendSlot& slot(const std::string& id);
    std::string route_fidelity(const std::vector<std::string>& ids);
    std::string route_weighted(const std::vector<std::string>& ids, std::uint64_t seq);
    std::string route_fraction(const std::string& task_class);

    RouterConfig cfg_;
    std::uint64_t master_seed_;
    std::vector<BackendSlot> slots_;
    std::map<std::string, std::vector<std::string>> task_backends_;
    std::map<std::string, std::uint64_t> fraction_counters_;
};

} // namespace socsim::inference

#include "ordering.hpp"

#include <algorithm>
#include <set>

namespace ibsim::decision::detail {

std::vector<std::string> chance_topological_order(const InfluenceDiagram& d) {
    std::vector<std::string> topo;
    std::set<std::string> done;
    while (topo.size() < d.chances.size()) {
        bool progressed = false;
        for (const auto& cn : d.chances) {
            if (done.contains(cn.id)) continue;
            const bool ready = std::all_of(cn.parents.begin(), cn.parents.end(), [&](const std::string& p) {
                return d.find_decision(p) != nullptr || done.contains(p);
            });
            if (ready) {
                topo.push_back(cn.id);
                done.insert(cn.id);
                progressed = true;
                break;
            }
        }
        if (!progressed) break;  // cyclic; callers validate first
    }
    return topo;
}

std::vector<std::vector<std::string>> observation_batches(const InfluenceDiagram& d) {
    const auto topo = chance_topological_order(d);
    std::vector<std::vector<std::string>> batches;
    std::set<std::string> placed;
    for (const auto& did : d.decision_order) {
        const auto* dn = d.find_decision(did);
        std::vector<std::string> batch;
        if (dn) {
            std::set<std::string> wanted(dn->observes.begin(), dn->observes.end());
            for (const auto& c : topo) {
                if (wanted.contains(c) && placed.insert(c).second) batch.push_back(c);
            }
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace ibsim::decision::detail

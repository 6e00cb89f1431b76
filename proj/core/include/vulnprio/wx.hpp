#pragma once

#include <cstdint>
#include <map>

#include "vulnprio/feed.hpp"

namespace vulnprio::wx {

/// Weaponized-exploit count: distinct exploit references, no upper bound.
struct WxCount {
    std::uint64_t count = 0;
    std::map<ReferenceSource, std::uint64_t> per_source;

    friend bool operator==(const WxCount&, const WxCount&) = default;
};

class WxTable {
public:
    /// CVEs absent from the feed count zero.
    WxCount lookup(const CveId& cve) const;
    const std::map<CveId, WxCount>& entries() const { return counts_; }
    std::uint64_t total() const;

    /// Sums two tables built from disjoint shards.
    static WxTable merge(const WxTable& a, const WxTable& b);

private:
    friend WxTable count_wx(const feed::ReferenceGroups& groups);
    std::map<CveId, WxCount> counts_;
};

/// Counts entries flagged as exploits. Expects URL-deduplicated groups.
WxTable count_wx(const feed::ReferenceGroups& groups);

}  // namespace vulnprio::wx

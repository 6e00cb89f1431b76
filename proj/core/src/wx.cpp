#include "vulnprio/wx.hpp"

#include <numeric>
#include <stdexcept>

namespace vulnprio::wx {
namespace {

void check_reconciled(const CveId& cve, const WxCount& wx) {
    std::uint64_t sum = 0;
    for (const auto& [source, n] : wx.per_source) sum += n;
    if (sum != wx.count) throw std::logic_error("per-source WX does not reconcile for " + cve.str());
}

}  // namespace

WxCount WxTable::lookup(const CveId& cve) const {
    auto it = counts_.find(cve);
    return it == counts_.end() ? WxCount{} : it->second;
}

std::uint64_t WxTable::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const auto& kv) { return acc + kv.second.count; });
}

WxTable WxTable::merge(const WxTable& a, const WxTable& b) {
    WxTable out = a;
    for (const auto& [cve, wx] : b.counts_) {
        WxCount& slot = out.counts_[cve];
        slot.count += wx.count;
        for (const auto& [source, n] : wx.per_source) slot.per_source[source] += n;
        check_reconciled(cve, slot);
    }
    return out;
}

WxTable count_wx(const feed::ReferenceGroups& groups) {
    WxTable table;
    for (const auto& [cve, refs] : groups) {
        WxCount wx;
        for (const feed::ReferenceEntry& ref : refs) {
            if (!ref.is_exploit) continue;
            ++wx.count;
            ++wx.per_source[ref.source];
        }
        check_reconciled(cve, wx);
        if (wx.count > 0) table.counts_.emplace(cve, std::move(wx));
    }
    return table;
}

}  // namespace vulnprio::wx

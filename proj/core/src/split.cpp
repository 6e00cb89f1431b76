#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "vulnprio/triage.hpp"

namespace vulnprio::triage {
namespace {

std::size_t train_size(double fraction, std::size_t n) {
    // The epsilon keeps products like 0.8 * 10 from landing just below an integer.
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) return 0;
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r <= limit) return r % bound;
    }
}

Partition split_indices(std::span<const int> labels, const SplitOptions& options) {
    const std::size_t n = labels.size();
    if (n < 5) {
        throw MlError(MlError::Kind::CorpusTooSmall,
                      "need at least 5 labeled examples to split, got " + std::to_string(n));
    }
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw MlError(MlError::Kind::InvalidFraction, "train fraction must lie strictly between 0 and 1");
    }

    std::mt19937_64 rng(options.seed);
    Partition p;
    if (!options.stratified) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        seeded_shuffle(std::span<std::size_t>(order), rng);
        const std::size_t cut = train_size(options.train_fraction, n);
        p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
        p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    } else {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
        for (auto& [label, members] : by_class) {
            seeded_shuffle(std::span<std::size_t>(members), rng);
            const std::size_t cut = train_size(options.train_fraction, members.size());
            p.train.insert(p.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(cut));
            p.test.insert(p.test.end(), members.begin() + static_cast<std::ptrdiff_t>(cut), members.end());
        }
    }
    if (p.train.empty() || p.test.empty()) {
        throw MlError(MlError::Kind::InvalidFraction, "split leaves an empty train or test set");
    }
    return p;
}

}  // namespace vulnprio::triage

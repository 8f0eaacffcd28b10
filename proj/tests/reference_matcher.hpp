#pragma once

// Naive double-auction matcher used as the oracle for the real book: a flat
// vector of resting orders, a full linear scan per fill, no indexes. Kept
// deliberately independent of dmsim::Book internals.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "dmsim/order_book.hpp"

namespace refmatch {

struct RefTrade {
    dmsim::Tick price = 0;
    std::int64_t volume = 0;
    std::int64_t time = 0;
    dmsim::OrderId maker = 0;
    dmsim::OrderId taker = 0;

    friend bool operator==(const RefTrade&, const RefTrade&) = default;
};

class ReferenceBook {
public:
    std::vector<RefTrade> submit_limit(dmsim::Order order, std::int64_t now) {
        order.submit_time = now;
        std::vector<RefTrade> trades = match(order.side, order.volume, order.id, now,
                                             order.price, /*priced=*/true);
        for (const RefTrade& t : trades) order.volume -= t.volume;
        if (order.volume > 0) resting_.push_back(order);
        return trades;
    }

    std::vector<RefTrade> submit_market(dmsim::Side side, std::int64_t volume,
                                        dmsim::OrderId id, std::int64_t now) {
        return match(side, volume, id, now, 0, /*priced=*/false);
    }

    std::vector<dmsim::Order> expire(std::int64_t now) {
        std::vector<dmsim::Order> removed;
        std::vector<dmsim::Order> kept;
        for (const dmsim::Order& o : resting_) {
            if (o.submit_time + o.lifetime <= now) removed.push_back(o);
            else kept.push_back(o);
        }
        resting_ = std::move(kept);
        return removed;
    }

    [[nodiscard]] std::optional<dmsim::Tick> last_trade() const { return last_trade_; }

    /// Resting orders sorted the way dmsim::Book::all_resting reports them:
    /// bids best-first, then asks best-first, submission order within a level.
    [[nodiscard]] std::vector<dmsim::Order> sorted_book() const {
        std::vector<dmsim::Order> out = resting_;
        std::stable_sort(out.begin(), out.end(), [](const dmsim::Order& a, const dmsim::Order& b) {
            if (a.side != b.side) return a.side == dmsim::Side::buy;
            if (a.price != b.price)
                return a.side == dmsim::Side::buy ? a.price > b.price : a.price < b.price;
            return false;  // stable sort keeps submission order
        });
        return out;
    }

private:
    // One fill at a time: scan every resting order for the best opposite
    // price (earliest submission wins ties), trade against it, repeat.
    std::vector<RefTrade> match(dmsim::Side taker_side, std::int64_t remaining,
                                dmsim::OrderId taker_id, std::int64_t now, dmsim::Tick limit,
                                bool priced) {
        std::vector<RefTrade> trades;
        while (remaining > 0) {
            std::size_t best = resting_.size();
            for (std::size_t i = 0; i < resting_.size(); ++i) {
                const dmsim::Order& o = resting_[i];
                if (o.side != dmsim::opposite(taker_side)) continue;
                if (priced) {
                    if (taker_side == dmsim::Side::buy && o.price > limit) continue;
                    if (taker_side == dmsim::Side::sell && o.price < limit) continue;
                }
                if (best == resting_.size()) {
                    best = i;
                } else if (taker_side == dmsim::Side::buy
                               ? o.price < resting_[best].price
                               : o.price > resting_[best].price) {
                    best = i;
                }
            }
            if (best == resting_.size()) break;
            dmsim::Order& maker = resting_[best];
            const std::int64_t fill = std::min(remaining, maker.volume);
            trades.push_back(RefTrade{maker.price, fill, now, maker.id, taker_id});
            maker.volume -= fill;
            remaining -= fill;
            last_trade_ = maker.price;
            if (maker.volume == 0)
                resting_.erase(resting_.begin() + static_cast<std::ptrdiff_t>(best));
        }
        return trades;
    }

    std::vector<dmsim::Order> resting_;
    std::optional<dmsim::Tick> last_trade_;
};

}  // namespace refmatch

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dmsim {

using Tick = std::int64_t;
using OrderId = std::uint64_t;
using AgentId = std::int32_t;

enum class Side { buy, sell };

[[nodiscard]] constexpr Side opposite(Side s) noexcept {
    return s == Side::buy ? Side::sell : Side::buy;
}

enum class OrderKind { limit, market };

/// A limit or market order. Prices are integer tick counts; market orders
/// carry neither price nor lifetime.
struct Order {
    OrderId id = 0;
    Side side = Side::buy;
    OrderKind kind = OrderKind::limit;
    Tick price = 0;               ///< limit orders only
    std::int64_t volume = 0;      ///< shares; reduced in place by fills
    std::int64_t submit_time = 0;
    std::int64_t lifetime = 0;    ///< limit orders only, seconds
    AgentId owner = -1;
};

[[nodiscard]] inline Order make_limit_order(OrderId id, Side side, Tick price,
                                            std::int64_t volume, std::int64_t submit_time,
                                            std::int64_t lifetime, AgentId owner = -1) {
    return Order{id, side, OrderKind::limit, price, volume, submit_time, lifetime, owner};
}

[[nodiscard]] inline Order make_market_order(OrderId id, Side side, std::int64_t volume,
                                             std::int64_t submit_time, AgentId owner = -1) {
    return Order{id, side, OrderKind::market, 0, volume, submit_time, 0, owner};
}

/// One execution. Trades print at the resting (maker) order's price.
struct Trade {
    Tick price_tick = 0;
    double price = 0.0;
    std::int64_t volume = 0;
    std::int64_t time = 0;
    OrderId maker_order_id = 0;
    OrderId taker_order_id = 0;
};

struct BookLevel {
    Tick price = 0;
    Side side = Side::buy;
    std::int64_t volume = 0;
};

/// Aggregate per-level volumes around the midpoint at one instant.
struct BookSnapshot {
    std::int64_t time = 0;
    std::vector<BookLevel> levels;  ///< sorted ascending by price
};

/// Double-auction limit order book with price-time priority, FIFO within a
/// price level, and lifetime expiry. Single-writer; snapshots are value
/// copies.
class Book {
public:
    explicit Book(double tick_size = 0.01) : tick_size_(tick_size) {
        if (!(tick_size > 0.0))
            throw std::invalid_argument("Book: tick_size must be positive");
    }

    /// Submits a limit order. A crossing limit executes against the best
    /// opposite levels up to its own price; any remainder rests. Order ids
    /// must be strictly increasing, which rules out duplicates.
    std::vector<Trade> submit_limit(const Order& order, std::int64_t now) {
        if (order.kind != OrderKind::limit)
            throw std::invalid_argument("submit_limit: order is not a limit order");
        if (order.volume < 1)
            throw std::invalid_argument("submit_limit: volume must be >= 1");
        if (order.price < 1)
            throw std::invalid_argument("submit_limit: price must be >= 1 tick");
        if (order.lifetime < 1)
            throw std::invalid_argument("submit_limit: lifetime must be >= 1 second");
        claim_id(order.id);

        std::vector<Trade> trades;
        std::int64_t remaining = order.volume;
        if (order.side == Side::buy) {
            remaining = match_against(asks_, order, remaining, now, trades,
                                      [&](Tick level) { return level <= order.price; });
        } else {
            remaining = match_against(bids_, order, remaining, now, trades,
                                      [&](Tick level) { return level >= order.price; });
        }
        if (remaining > 0) {
            Order resting = order;
            resting.volume = remaining;
            resting.submit_time = now;
            rest(resting);
        }
        return trades;
    }

    /// Executes a market order against the opposite side, best price
    /// outward, FIFO within each level. Whatever cannot fill is discarded.
    std::vector<Trade> submit_market(const Order& order, std::int64_t now) {
        if (order.kind != OrderKind::market)
            throw std::invalid_argument("submit_market: order is not a market order");
        if (order.volume < 1)
            throw std::invalid_argument("submit_market: volume must be >= 1");
        claim_id(order.id);

        std::vector<Trade> trades;
        if (order.side == Side::buy) {
            match_against(asks_, order, order.volume, now, trades, [](Tick) { return true; });
        } else {
            match_against(bids_, order, order.volume, now, trades, [](Tick) { return true; });
        }
        return trades;
    }

    /// Removes every resting order whose lifetime is over: an order expires
    /// at the first second >= submit_time + lifetime. Call once per second,
    /// after that second's submissions.
    std::vector<Order> expire(std::int64_t now) {
        std::vector<Order> removed;
        while (!expiry_.empty() && expiry_.begin()->first <= now) {
            for (OrderId id : expiry_.begin()->second) {
                auto loc = location_.find(id);
                if (loc == location_.end()) continue;  // already fully filled
                const auto [side, price] = loc->second;
                removed.push_back(take_out(side, price, id));
            }
            expiry_.erase(expiry_.begin());
        }
        return removed;
    }

    [[nodiscard]] std::optional<Tick> best_bid() const {
        if (bids_.empty()) return std::nullopt;
        return bids_.begin()->first;
    }

    [[nodiscard]] std::optional<Tick> best_ask() const {
        if (asks_.empty()) return std::nullopt;
        return asks_.begin()->first;
    }

    /// Distance in ticks between the best quotes; at least 1 at rest.
    [[nodiscard]] std::optional<Tick> spread() const {
        const auto bid = best_bid();
        const auto ask = best_ask();
        if (!bid || !ask) return std::nullopt;
        return *ask - *bid;
    }

    /// Per-level volumes within `depth` ticks of the midpoint (or of the
    /// only populated best quote), sorted ascending by price.
    [[nodiscard]] BookSnapshot volume_profile(std::int64_t now, int depth) const {
        if (depth < 1) throw std::invalid_argument("volume_profile: depth must be >= 1");
        BookSnapshot snap;
        snap.time = now;
        const auto bid = best_bid();
        const auto ask = best_ask();
        if (!bid && !ask) return snap;
        double mid = 0.0;
        if (bid && ask) mid = 0.5 * static_cast<double>(*bid + *ask);
        else mid = static_cast<double>(bid ? *bid : *ask);

        for (auto it = bids_.rbegin(); it != bids_.rend(); ++it) {  // ascending price
            if (static_cast<double>(it->first) < mid - depth) continue;
            snap.levels.push_back(BookLevel{it->first, Side::buy, level_volume(it->second)});
        }
        for (const auto& [price, queue] : asks_) {
            if (static_cast<double>(price) > mid + depth) break;
            snap.levels.push_back(BookLevel{price, Side::sell, level_volume(queue)});
        }
        return snap;
    }

    /// Unoccupied ticks strictly between occupied levels, within the first
    /// `depth` ticks beyond the best price of the given side.
    [[nodiscard]] int gap_count(Side side, int depth) const {
        if (depth < 1) throw std::invalid_argument("gap_count: depth must be >= 1");
        int gaps = 0;
        if (side == Side::sell) {
            if (asks_.empty()) return 0;
            auto it = asks_.begin();
            Tick prev = it->first;
            const Tick limit = prev + depth;
            for (++it; it != asks_.end() && prev < limit; ++it) {
                gaps += static_cast<int>(std::max<Tick>(0, std::min(it->first - 1, limit) - prev));
                prev = it->first;
            }
        } else {
            if (bids_.empty()) return 0;
            auto it = bids_.begin();
            Tick prev = it->first;
            const Tick limit = prev - depth;
            for (++it; it != bids_.end() && prev > limit; ++it) {
                gaps += static_cast<int>(std::max<Tick>(0, prev - std::max(it->first + 1, limit)));
                prev = it->first;
            }
        }
        return gaps;
    }

    [[nodiscard]] std::optional<double> last_trade_price() const { return last_trade_price_; }
    [[nodiscard]] std::optional<Tick> last_trade_tick() const { return last_trade_tick_; }

    [[nodiscard]] std::int64_t bid_volume() const { return bid_volume_; }
    [[nodiscard]] std::int64_t ask_volume() const { return ask_volume_; }
    [[nodiscard]] std::int64_t total_volume() const { return bid_volume_ + ask_volume_; }
    [[nodiscard]] std::size_t resting_orders() const { return location_.size(); }

    /// Every resting order: bids from best downward, then asks from best
    /// upward, FIFO within each level.
    [[nodiscard]] std::vector<Order> all_resting() const {
        std::vector<Order> out;
        out.reserve(location_.size());
        for (const auto& [price, queue] : bids_)
            out.insert(out.end(), queue.begin(), queue.end());
        for (const auto& [price, queue] : asks_)
            out.insert(out.end(), queue.begin(), queue.end());
        return out;
    }

    [[nodiscard]] double tick_size() const { return tick_size_; }
    [[nodiscard]] double to_price(Tick tick) const { return static_cast<double>(tick) * tick_size_; }
    [[nodiscard]] Tick to_tick(double price) const {
        return static_cast<Tick>(std::llround(price / tick_size_));
    }

private:
    using LevelQueue = std::deque<Order>;
    using BidMap = std::map<Tick, LevelQueue, std::greater<>>;  // best bid first
    using AskMap = std::map<Tick, LevelQueue>;                  // best ask first

    void claim_id(OrderId id) {
        if (id_seen_ && id <= max_id_)
            throw std::invalid_argument("Book: order ids must be strictly increasing");
        max_id_ = id;
        id_seen_ = true;
    }

    static std::int64_t level_volume(const LevelQueue& queue) {
        std::int64_t v = 0;
        for (const Order& o : queue) v += o.volume;
        return v;
    }

    template <typename MapT, typename CrossesFn>
    std::int64_t match_against(MapT& levels, const Order& taker, std::int64_t remaining,
                               std::int64_t now, std::vector<Trade>& trades, CrossesFn crosses) {
        while (remaining > 0 && !levels.empty()) {
            auto level_it = levels.begin();
            if (!crosses(level_it->first)) break;
            LevelQueue& queue = level_it->second;
            while (remaining > 0 && !queue.empty()) {
                Order& maker = queue.front();
                const std::int64_t fill = std::min(remaining, maker.volume);
                trades.push_back(Trade{level_it->first, to_price(level_it->first), fill, now,
                                       maker.id, taker.id});
                maker.volume -= fill;
                remaining -= fill;
                side_volume(maker.side) -= fill;
                last_trade_tick_ = level_it->first;
                last_trade_price_ = to_price(level_it->first);
                if (maker.volume == 0) {
                    location_.erase(maker.id);
                    queue.pop_front();
                }
            }
            if (queue.empty()) levels.erase(level_it);
        }
        return remaining;
    }

    void rest(const Order& order) {
        if (order.side == Side::buy) {
            bids_[order.price].push_back(order);
        } else {
            asks_[order.price].push_back(order);
        }
        side_volume(order.side) += order.volume;
        location_.emplace(order.id, std::pair{order.side, order.price});
        expiry_[order.submit_time + order.lifetime].push_back(order.id);
    }

    Order take_out(Side side, Tick price, OrderId id) {
        LevelQueue* queue = nullptr;
        if (side == Side::buy) {
            queue = &bids_.at(price);
        } else {
            queue = &asks_.at(price);
        }
        auto it = std::find_if(queue->begin(), queue->end(),
                               [&](const Order& o) { return o.id == id; });
        Order out = *it;
        queue->erase(it);
        side_volume(side) -= out.volume;
        location_.erase(id);
        if (queue->empty()) {
            if (side == Side::buy) bids_.erase(price);
            else asks_.erase(price);
        }
        return out;
    }

    std::int64_t& side_volume(Side side) {
        return side == Side::buy ? bid_volume_ : ask_volume_;
    }

    double tick_size_;
    BidMap bids_;
    AskMap asks_;
    std::unordered_map<OrderId, std::pair<Side, Tick>> location_;
    std::map<std::int64_t, std::vector<OrderId>> expiry_;
    std::optional<double> last_trade_price_;
    std::optional<Tick> last_trade_tick_;
    std::int64_t bid_volume_ = 0;
    std::int64_t ask_volume_ = 0;
    OrderId max_id_ = 0;
    bool id_seen_ = false;
};

}  // namespace dmsim

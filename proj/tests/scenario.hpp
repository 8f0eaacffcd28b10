#pragma once

// Randomized matcher scenarios: the same event stream is replayed into
// dmsim::Book and the naive ReferenceBook, and every observable is compared
// with zero tolerance.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>

#include "dmsim/order_book.hpp"
#include "dmsim/random.hpp"
#include "reference_matcher.hpp"

namespace refmatch {

struct ScenarioOutcome {
    bool ok = true;
    std::string detail;
    std::int64_t trades = 0;
};

/// Replays one random scenario of at most `max_orders` submissions through
/// both matchers. Returns ok = false with a description on the first
/// divergence in trades, expiries, final book or last trade price.
inline ScenarioOutcome run_matcher_scenario(std::uint64_t seed, int max_orders = 50) {
    dmsim::Rng rng(seed);
    dmsim::Book book;
    ReferenceBook ref;
    ScenarioOutcome out;

    const auto fail = [&](const std::string& what, std::int64_t event_no) {
        out.ok = false;
        std::ostringstream ss;
        ss << "seed " << seed << ", event " << event_no << ": " << what;
        out.detail = ss.str();
        return out;
    };

    std::int64_t now = 0;
    dmsim::OrderId next_id = 1;
    const int orders = 1 + static_cast<int>(dmsim::uniform01(rng) * max_orders);
    for (int e = 0; e < orders; ++e) {
        const dmsim::Side side =
            dmsim::uniform01(rng) < 0.5 ? dmsim::Side::buy : dmsim::Side::sell;
        std::vector<dmsim::Trade> got;
        std::vector<RefTrade> want;
        if (dmsim::uniform01(rng) < 0.3) {
            const auto volume = static_cast<std::int64_t>(1 + dmsim::uniform01(rng) * 14);
            const dmsim::OrderId id = next_id++;
            got = book.submit_market(dmsim::make_market_order(id, side, volume, now), now);
            want = ref.submit_market(side, volume, id, now);
        } else {
            const auto price = static_cast<dmsim::Tick>(990 + dmsim::uniform01(rng) * 21);
            const auto volume = static_cast<std::int64_t>(1 + dmsim::uniform01(rng) * 9);
            const auto lifetime = static_cast<std::int64_t>(1 + dmsim::uniform01(rng) * 29);
            const dmsim::Order o =
                dmsim::make_limit_order(next_id++, side, price, volume, now, lifetime);
            got = book.submit_limit(o, now);
            want = ref.submit_limit(o, now);
        }
        out.trades += static_cast<std::int64_t>(got.size());
        if (got.size() != want.size()) return fail("trade count differs", e);
        for (std::size_t i = 0; i < got.size(); ++i) {
            const RefTrade g{got[i].price_tick, got[i].volume, got[i].time,
                             got[i].maker_order_id, got[i].taker_order_id};
            if (!(g == want[i])) return fail("trade differs", e);
        }

        if (dmsim::uniform01(rng) < 0.5) {
            ++now;
            auto got_exp = book.expire(now);
            auto want_exp = ref.expire(now);
            const auto by_id = [](const dmsim::Order& a, const dmsim::Order& b) {
                return a.id < b.id;
            };
            std::sort(got_exp.begin(), got_exp.end(), by_id);
            std::sort(want_exp.begin(), want_exp.end(), by_id);
            if (got_exp.size() != want_exp.size()) return fail("expiry count differs", e);
            for (std::size_t i = 0; i < got_exp.size(); ++i) {
                if (got_exp[i].id != want_exp[i].id ||
                    got_exp[i].volume != want_exp[i].volume)
                    return fail("expired order differs", e);
            }
        }

        // structural invariant: never crossed at rest
        const auto bid = book.best_bid();
        const auto ask = book.best_ask();
        if (bid && ask && *bid >= *ask) return fail("book is crossed", e);
    }

    const auto got_book = book.all_resting();
    const auto want_book = ref.sorted_book();
    if (got_book.size() != want_book.size()) return fail("final book size differs", orders);
    for (std::size_t i = 0; i < got_book.size(); ++i) {
        if (got_book[i].id != want_book[i].id || got_book[i].price != want_book[i].price ||
            got_book[i].volume != want_book[i].volume ||
            got_book[i].side != want_book[i].side)
            return fail("final book differs", orders);
    }
    const auto got_last = book.last_trade_tick();
    const auto want_last = ref.last_trade();
    if (got_last.has_value() != want_last.has_value() ||
        (got_last && *got_last != *want_last))
        return fail("last trade differs", orders);
    return out;
}

}  // namespace refmatch

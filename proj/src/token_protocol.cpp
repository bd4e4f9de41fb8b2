#include "fanet/token_protocol.hpp"

#include "fanet/error.hpp"

#include <algorithm>
#include <string>

namespace fanet {

namespace {

void check_table(const UavState& state, const Token& token)
{
    if (token.node_count() != state.node_count()) {
        throw ProtocolError("token " + std::to_string(token.token_id) + " carries " +
                            std::to_string(token.node_count()) + " entries, expected " +
                            std::to_string(state.node_count()));
    }
    for (std::size_t i = 0; i < token.table.size(); ++i) {
        if (token.table[i].uav.index() != i) {
            throw ProtocolError("token table entry " + std::to_string(i) + " names the wrong UAV");
        }
    }
}

void mark_busy(UavState& state, UavId who, double until)
{
    if (who.is_broadcast() || who == state.id || who.index() >= state.busy_until.size()) {
        return;
    }
    auto& slot = state.busy_until[who.index()];
    slot = std::max(slot, until);
}

void clear_busy(UavState& state, UavId who)
{
    if (!who.is_broadcast() && who.index() < state.busy_until.size()) {
        state.busy_until[who.index()] = 0.0;
    }
}

}  // namespace

UavState::UavState(UavId self, std::size_t node_count, const Position& pos)
    : id(self), true_pos(pos), cache(empty_table(node_count)), busy_until(node_count, 0.0)
{
}

bool UavState::is_busy(UavId other, double now) const noexcept
{
    return other.index() < busy_until.size() && now < busy_until[other.index()];
}

bool UavState::holds(std::uint32_t token_id) const noexcept
{
    return std::any_of(held_tokens.begin(), held_tokens.end(),
                       [&](const Token& t) { return t.token_id == token_id; });
}

void update_own_entry(UavState& state, double now)
{
    ++state.own_counter;
    auto& own = state.cache[state.id.index()];
    own.pos = state.true_pos;
    own.counter = state.own_counter;
    own.updated_at = now;
}

LocationTable merge_cache(const LocationTable& cache, const LocationTable& table)
{
    if (cache.size() != table.size()) {
        throw ProtocolError("cannot merge tables of length " + std::to_string(cache.size()) +
                            " and " + std::to_string(table.size()));
    }
    LocationTable merged = cache;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (table[i].counter > merged[i].counter) {
            merged[i] = table[i];
        }
    }
    return merged;
}

Token update_token(const UavState& state, Token token)
{
    if (!token.destination || *token.destination != state.id) {
        throw ProtocolError("node " + std::to_string(state.id.value) +
                            " does not possess token " + std::to_string(token.token_id));
    }
    token.table = merge_cache(token.table, state.cache);
    token.table[state.id.index()] = state.cache[state.id.index()];
    ++token.hop_count;
    return token;
}

ProtocolAction select_next_uav(const UavState& state, std::span<const UavId> neighbors,
                               const Token& token, double now, bool after_hold)
{
    std::vector<UavId> candidates;
    candidates.reserve(neighbors.size());
    bool others_busy = false;
    for (const auto n : neighbors) {
        if (n == state.id) continue;
        if (state.is_busy(n, now)) {
            others_busy = others_busy || n != token.source;
        } else {
            candidates.push_back(n);
        }
    }
    if (candidates.empty()) {
        return HoldToken{token};
    }
    // Bouncing straight back would only be forced by a neighbour that is
    // momentarily busy; wait one hold interval for it first.
    if (!after_hold && others_busy && candidates.size() == 1 && candidates[0] == token.source) {
        return HoldToken{token};
    }
    if (candidates.size() > 1) {
        std::erase(candidates, token.source);
    }
    const auto staleness = [&](UavId c) {
        const auto counter = c.index() < token.table.size() ? token.table[c.index()].counter : 0U;
        return std::pair{counter, c.value};
    };
    const auto target = *std::min_element(candidates.begin(), candidates.end(),
                                          [&](UavId a, UavId b) { return staleness(a) < staleness(b); });
    Token out = token;
    out.source = state.id;
    out.destination = target;
    return SendToken{target, std::move(out)};
}

std::vector<ProtocolAction> on_receive_frame(UavState& state, const Frame& frame, bool success,
                                             double now, std::span<const UavId> neighbors,
                                             const ProtocolParams& params)
{
    if (!success) {
        return {};
    }
    std::vector<ProtocolAction> actions;
    switch (frame.kind) {
    case FrameKind::Rts:
    case FrameKind::Cts: {
        const double until = now + params.control_busy_window;
        mark_busy(state, frame.src, until);
        mark_busy(state, frame.dst, until);
        if (frame.kind == FrameKind::Rts && frame.dst == state.id) {
            actions.emplace_back(SendCts{frame.src});
        }
        break;
    }
    case FrameKind::TokenFrame: {
        if (!frame.token) {
            throw ProtocolError("token frame without a token");
        }
        const Token& incoming = *frame.token;
        check_table(state, incoming);
        if (frame.dst != state.id) {
            // Overheard: read-only with respect to the token.
            state.cache = merge_cache(state.cache, incoming.table);
            clear_busy(state, frame.src);
            clear_busy(state, frame.dst);
            break;
        }
        if (state.holds(incoming.token_id)) {
            throw ProtocolError("token " + std::to_string(incoming.token_id) +
                                " delivered to a node that already holds it");
        }
        update_own_entry(state, now);
        Token token = update_token(state, incoming);
        state.cache = merge_cache(state.cache, token.table);
        clear_busy(state, frame.src);
        auto next = select_next_uav(state, neighbors, token, now);
        if (auto* send = std::get_if<SendToken>(&next)) {
            actions.emplace_back(SendRts{send->target});
            actions.push_back(std::move(next));
        } else {
            state.held_tokens.push_back(std::get<HoldToken>(next).token);
            actions.push_back(std::move(next));
        }
        break;
    }
    }
    return actions;
}

std::vector<ProtocolAction> retry_held_tokens(UavState& state, std::span<const UavId> neighbors,
                                              double now)
{
    std::vector<ProtocolAction> actions;
    std::vector<Token> still_held;
    for (auto& token : state.held_tokens) {
        auto next = select_next_uav(state, neighbors, token, now, true);
        if (auto* send = std::get_if<SendToken>(&next)) {
            actions.emplace_back(SendRts{send->target});
            actions.push_back(std::move(next));
        } else {
            still_held.push_back(std::move(token));
        }
    }
    state.held_tokens = std::move(still_held);
    return actions;
}

}  // namespace fanet

#include "fanet/sim_engine.hpp"

#include "fanet/error.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace fanet {

std::string_view to_string(EventKind k) noexcept
{
    switch (k) {
    case EventKind::FrameDelivery:
        return "frame_delivery";
    case EventKind::MobilityStep:
        return "mobility_step";
    case EventKind::SelfUpdate:
        return "self_update";
    case EventKind::RetryHeld:
        return "retry_held";
    case EventKind::Retransmit:
        return "retransmit";
    case EventKind::HandshakeAbort:
        return "handshake_abort";
    case EventKind::ChannelClear:
        return "channel_clear";
    case EventKind::MetricsSample:
        return "metrics_sample";
    case EventKind::End:
        return "end";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// EventQueue

const Event& EventQueue::push(Event ev)
{
    if (ev.time < now_) {
        throw InvariantViolation("event '" + std::string(to_string(ev.kind)) +
                                 "' scheduled in the past");
    }
    ev.seq = next_seq_++;
    heap_.push(ev);
    return heap_.top();
}

Event EventQueue::pop()
{
    Event ev = heap_.top();
    heap_.pop();
    if (popped_any_ && (ev.time < now_ || (ev.time == now_ && ev.seq < last_seq_))) {
        throw InvariantViolation("event processed out of (time, seq) order");
    }
    popped_any_ = true;
    now_ = ev.time;
    last_seq_ = ev.seq;
    return ev;
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<Event> plan_deliveries(const Frame& frame, std::span<const Position> positions,
                                   double comm_range)
{
    std::vector<Event> out;
    const auto& from = positions[frame.src.index()];
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i == frame.src.index()) continue;
        if (in_range(from, positions[i], comm_range)) {
            Event ev;
            ev.time = frame.tx_end;
            ev.kind = EventKind::FrameDelivery;
            ev.node = UavId{static_cast<std::uint32_t>(i)};
            ev.frame_id = frame.id;
            out.push_back(ev);
        }
    }
    return out;
}

bool resolve_reception(const Frame& frame, std::span<const Interval> interfering, double snr_db,
                       const McsProfile& mcs, const LinkModel& model, RngStream& rng)
{
    if (frame.channel == Channel::Control) {
        return true;
    }
    for (const auto& other : interfering) {
        if (frame.tx_start < other.end && other.start < frame.tx_end) {
            return false;
        }
    }
    return bernoulli(rng, frame_success_probability(snr_db, mcs, frame.payload_bits, model));
}

RunReport run(const ScenarioConfig& config, EngineOptions options)
{
    Engine engine(config, std::move(options));
    return engine.run();
}

// ---------------------------------------------------------------------------
// Engine

bool Engine::FrameRecord::audible_at(UavId r) const
{
    return std::binary_search(audience.begin(), audience.end(), r);
}

Engine::Engine(ScenarioConfig config, EngineOptions options)
    : cfg_(std::move(config)), opts_(std::move(options))
{
    cfg_.validate();
    const std::size_t n = cfg_.node_count;
    if (opts_.topology && opts_.topology->size() != n) {
        throw ConfigError("fixed topology size does not match node_count");
    }
    if (opts_.topology && !opts_.topology->is_symmetric()) {
        throw ConfigError("fixed topology must be symmetric with an empty diagonal");
    }
    if (opts_.initial_positions) {
        if (opts_.initial_positions->size() != n) {
            throw ConfigError("initial_positions size does not match node_count");
        }
        for (const auto& p : *opts_.initial_positions) {
            if (!is_finite(p) || !cfg_.arena.contains(p)) {
                throw ConfigError("initial position outside the arena");
            }
        }
    }
    token_airtime_ = cfg_.token_airtime();
    control_airtime_ = cfg_.control_airtime();
    params_.control_busy_window = cfg_.busy_window();
    initialize();
}

void Engine::schedule(double time, EventKind kind, UavId node, std::uint64_t frame_id,
                      std::uint32_t token_id)
{
    Event ev;
    ev.time = time;
    ev.kind = kind;
    ev.node = node;
    ev.frame_id = frame_id;
    ev.token_id = token_id;
    queue_.push(ev);
}

void Engine::initialize()
{
    const std::size_t n = cfg_.node_count;
    mobility_rng_.reserve(n);
    loss_rng_.reserve(n);
    protocol_rng_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const UavId id{static_cast<std::uint32_t>(i)};
        mobility_rng_.push_back(rng_stream(cfg_.seed, id, RngPurpose::Mobility));
        loss_rng_.push_back(rng_stream(cfg_.seed, id, RngPurpose::Loss));
        protocol_rng_.push_back(rng_stream(cfg_.seed, id, RngPurpose::Protocol));
    }
    const auto positions = opts_.initial_positions
                               ? *opts_.initial_positions
                               : random_positions(n, cfg_.arena, mobility_rng_);
    nodes_.reserve(n);
    radios_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes_.emplace_back(UavId{static_cast<std::uint32_t>(i)}, n, positions[i]);
    }

    if (opts_.trace) {
        *opts_.trace << kTraceHeader << '\n';
    }
    if (opts_.position_trace) {
        *opts_.position_trace << "# time node x y z\n";
    }

    // End goes first so nothing else scheduled for the same instant runs.
    schedule(cfg_.sim_duration, EventKind::End);

    for (auto& node : nodes_) {
        update_own_entry(node, 0.0);
        trace(node.id, "self_update");
    }
    for (std::uint32_t t = 1; t <= cfg_.number_of_tokens; ++t) {
        const UavId holder = initial_token_holder(t, cfg_.node_count, cfg_.number_of_tokens);
        nodes_[holder.index()].held_tokens.push_back(
            new_token(t, holder, n, nodes_[holder.index()].true_pos, 0.0));
        trace(holder, "token_created", t);
    }
    for (auto& node : nodes_) {
        if (!node.held_tokens.empty()) {
            radios_[node.id.index()].retry_scheduled = true;
            const double jitter = uniform01(protocol_rng_[node.id.index()]) * control_airtime_;
            schedule(jitter, EventKind::RetryHeld, node.id);
        }
    }
    if (cfg_.mobility.step_interval < cfg_.sim_duration) {
        schedule(cfg_.mobility.step_interval, EventKind::MobilityStep);
    }
    if (1.0 / cfg_.sample_rate_hz < cfg_.sim_duration) {
        schedule(1.0 / cfg_.sample_rate_hz, EventKind::MetricsSample);
    }
    if (opts_.check_invariants) {
        last_counters_.assign(n * n, 0);
        verify_invariants();
    }
}

RunReport Engine::run()
{
    while (step()) {
    }
    return report_;
}

bool Engine::step()
{
    if (finished_) {
        return false;
    }
    if (queue_.empty()) {
        throw InvariantViolation("event queue drained before the end event");
    }
    const Event ev = queue_.pop();
    now_ = ev.time;
    dispatch(ev);
    if (opts_.check_invariants) {
        verify_invariants();
    }
    if (opts_.observer) {
        opts_.observer(*this, ev);
    }
    return !finished_;
}

void Engine::dispatch(const Event& ev)
{
    switch (ev.kind) {
    case EventKind::FrameDelivery:
        on_delivery(ev);
        break;
    case EventKind::MobilityStep:
        on_mobility_step();
        break;
    case EventKind::SelfUpdate:
        update_own_entry(nodes_[ev.node.index()], now_);
        trace(ev.node, "self_update");
        break;
    case EventKind::RetryHeld:
        on_retry_held(ev.node);
        break;
    case EventKind::Retransmit:
        on_retransmit(ev.node, ev.token_id);
        break;
    case EventKind::HandshakeAbort:
        abort_handshake(ev.node, ev.frame_id);
        break;
    case EventKind::ChannelClear:
        on_channel_clear(ev.node);
        break;
    case EventKind::MetricsSample:
        take_sample();
        // Indexed rather than accumulated, so the grid does not drift.
        if (const double next = static_cast<double>(++sample_index_ + 1) / cfg_.sample_rate_hz;
            next < cfg_.sim_duration) {
            schedule(next, EventKind::MetricsSample);
        }
        break;
    case EventKind::End:
        if (cfg_.sim_duration > 0.0) {
            take_sample();
            report_.sim_time = cfg_.sim_duration;
        }
        report_.finalize();
        finished_ = true;
        break;
    }
}

const AdjacencyMatrix& Engine::adjacency()
{
    if (!adjacency_) {
        if (opts_.topology) {
            adjacency_ = *opts_.topology;
        } else {
            std::vector<Position> positions;
            positions.reserve(nodes_.size());
            for (const auto& node : nodes_) positions.push_back(node.true_pos);
            adjacency_ = build_adjacency(positions, cfg_.comm_range);
        }
    }
    return *adjacency_;
}

std::vector<UavId> Engine::neighbours_of(UavId n) { return find_neighbours(adjacency(), n); }

bool Engine::linked(UavId a, UavId b) { return adjacency().linked(a.index(), b.index()); }

void Engine::transmit(Frame frame)
{
    frame.id = next_frame_id_++;
    frame.tx_start = now_;
    frame.tx_end = now_ + (frame.channel == Channel::Data ? token_airtime_ : control_airtime_);

    FrameRecord rec;
    rec.audience = neighbours_of(frame.src);
    for (const auto r : rec.audience) {
        schedule(frame.tx_end, EventKind::FrameDelivery, r, frame.id);
    }
    rec.pending = rec.audience.size();
    // The addressee always resolves the frame, in range or not, so every
    // sent frame has exactly one outcome.
    if (!frame.dst.is_broadcast() && !rec.audible_at(frame.dst)) {
        schedule(frame.tx_end, EventKind::FrameDelivery, frame.dst, frame.id);
        ++rec.pending;
    }

    const char* what = frame.kind == FrameKind::Rts ? "tx_rts"
                       : frame.kind == FrameKind::Cts ? "tx_cts"
                                                      : "tx_token";
    trace(frame.src, what, frame.token ? frame.token->token_id : 0, frame.dst);

    if (frame.channel == Channel::Data) {
        // Frames that ended more than one airtime ago cannot overlap anything
        // still to be delivered.
        while (!history_.empty() && history_.front().interval.end + token_airtime_ < now_) {
            history_.pop_front();
        }
        DataTx tx{frame.id, frame.src, {frame.tx_start, frame.tx_end},
                  std::vector<char>(nodes_.size(), 0)};
        for (const auto r : rec.audience) {
            tx.audible[r.index()] = 1;
            // Physical carrier sense on the data channel.
            auto& nav = radios_[r.index()].nav_until;
            nav = std::max(nav, frame.tx_end);
        }
        history_.push_back(std::move(tx));
    }
    const auto id = frame.id;
    rec.frame = std::move(frame);
    auto& channel = rec.frame.channel == Channel::Data ? data_ : control_;
    channel.in_flight.emplace(id, std::move(rec));
}

void Engine::pump(UavId n)
{
    auto& radio = radios_[n.index()];
    if (radio.phase == RadioPhase::Idle && !radio.queue.empty() && now_ < radio.quiet_until()) {
        if (!radio.clear_scheduled) {
            radio.clear_scheduled = true;
            schedule(radio.quiet_until(), EventKind::ChannelClear, n);
        }
        return;
    }
    while (radio.phase == RadioPhase::Idle && !radio.queue.empty()) {
        PendingExchange ex = std::move(radio.queue.front());
        radio.queue.pop_front();
        if (!linked(n, ex.target)) {
            trace(n, "target_lost", ex.token.token_id, ex.target);
            Token token = std::move(ex.token);
            token.source = ex.previous_source;
            token.destination = n;
            hold(n, std::move(token));
            continue;
        }
        Frame rts;
        rts.channel = Channel::Control;
        rts.kind = FrameKind::Rts;
        rts.src = n;
        rts.dst = ex.target;
        rts.payload_bits = cfg_.control_frame_bits;
        radio.active = std::move(ex);
        radio.phase = RadioPhase::AwaitCts;
        radio.rts_frame_id = next_frame_id_;
        transmit(std::move(rts));
    }
}

void Engine::hold(UavId n, Token token)
{
    trace(n, "hold", token.token_id);
    nodes_[n.index()].held_tokens.push_back(std::move(token));
    schedule_retry(n);
}

void Engine::schedule_retry(UavId n)
{
    auto& radio = radios_[n.index()];
    if (radio.retry_scheduled) {
        return;
    }
    radio.retry_scheduled = true;
    const double jitter = 0.5 + uniform01(protocol_rng_[n.index()]);
    schedule(now_ + cfg_.hold_retry_interval() * jitter, EventKind::RetryHeld, n);
}

void Engine::apply_actions(UavId n, std::vector<ProtocolAction>& actions, UavId previous_source)
{
    for (auto& action : actions) {
        if (auto* send = std::get_if<SendToken>(&action)) {
            trace(n, "forward", send->token.token_id, send->target);
            radios_[n.index()].queue.push_back(
                PendingExchange{std::move(send->token), send->target, previous_source, 0});
        } else if (auto* held = std::get_if<HoldToken>(&action)) {
            trace(n, "hold", held->token.token_id);
            schedule_retry(n);
        }
    }
    pump(n);
}

void Engine::on_delivery(const Event& ev)
{
    auto* channel = &data_;
    auto it = data_.in_flight.find(ev.frame_id);
    if (it == data_.in_flight.end()) {
        channel = &control_;
        it = control_.in_flight.find(ev.frame_id);
        if (it == control_.in_flight.end()) {
            throw InvariantViolation("delivery for a frame that is not in flight");
        }
    }
    // std::map nodes are stable, so the record survives transmissions made
    // while it is being handled.
    const FrameRecord& rec = it->second;
    const UavId r = ev.node;
    if (rec.injected) {
        on_injected_delivery(rec, r);
    } else if (rec.frame.channel == Channel::Control) {
        on_control_delivery(rec, r, rec.audible_at(r));
    } else {
        on_data_delivery(rec, r, rec.audible_at(r));
    }
    if (--it->second.pending == 0) {
        channel->in_flight.erase(it);
    }
}

void Engine::on_control_delivery(const FrameRecord& rec, UavId r, bool audible)
{
    const Frame& f = rec.frame;
    const bool addressed = f.dst == r;
    if (addressed) {
        ++report_.control.sent;
        if (audible) {
            ++report_.control.received;
        } else {
            ++report_.control.corrupted;
        }
    }
    if (!audible) {
        if (addressed && f.kind == FrameKind::Cts) {
            abort_handshake(r, radios_[r.index()].rts_frame_id);
        }
        return;
    }
    trace(r, f.kind == FrameKind::Rts ? "rx_rts" : "rx_cts", 0, f.src);
    auto& radio = radios_[r.index()];
    if (!addressed) {
        // Virtual carrier sense. An overheard RTS only defers until its CTS
        // is due (the request may be refused); an overheard CTS covers the
        // whole data frame it announces.
        const double quiet = f.kind == FrameKind::Rts ? control_airtime_ : token_airtime_;
        radio.nav_until = std::max(radio.nav_until, now_ + quiet);
    }
    auto actions = on_receive_frame(nodes_[r.index()], f, true, now_, neighbours_of(r), params_);
    for (const auto& action : actions) {
        if (const auto* cts = std::get_if<SendCts>(&action)) {
            if (radio.phase == RadioPhase::Idle && now_ >= radio.quiet_until()) {
                radio.reserved_until = now_ + control_airtime_ + token_airtime_;
                Frame reply;
                reply.channel = Channel::Control;
                reply.kind = FrameKind::Cts;
                reply.src = r;
                reply.dst = cts->target;
                reply.payload_bits = cfg_.control_frame_bits;
                transmit(std::move(reply));
            } else {
                // Busy, reserved or deferring: stay silent, the requester
                // gives up when the CTS would have arrived.
                trace(r, "refuse_cts", 0, cts->target);
                schedule(now_ + control_airtime_, EventKind::HandshakeAbort, cts->target, f.id);
            }
        }
    }
    if (f.kind == FrameKind::Cts && addressed) {
        if (radio.phase == RadioPhase::AwaitCts && radio.active && radio.active->target == f.src &&
            now_ < radio.nav_until) {
            abort_handshake(r, radio.rts_frame_id);
        } else if (radio.phase == RadioPhase::AwaitCts && radio.active && radio.active->target == f.src) {
            Frame data;
            data.channel = Channel::Data;
            data.kind = FrameKind::TokenFrame;
            data.src = r;
            data.dst = radio.active->target;
            data.payload_bits = cfg_.token_frame_bits();
            data.token = radio.active->token;
            radio.phase = RadioPhase::SendingData;
            radio.data_frame_id = next_frame_id_;
            transmit(std::move(data));
        }
    }
}

void Engine::on_data_delivery(const FrameRecord& rec, UavId r, bool audible)
{
    const Frame& f = rec.frame;
    const bool addressed = f.dst == r;
    bool success = false;
    bool collided = false;
    if (audible) {
        std::vector<Interval> interfering;
        for (const auto& tx : history_) {
            if (tx.frame_id == f.id) continue;
            if (tx.src != r && !tx.audible[r.index()]) continue;
            if (f.tx_start < tx.interval.end && tx.interval.start < f.tx_end) {
                interfering.push_back(tx.interval);
            }
        }
        collided = !interfering.empty();
        success = resolve_reception(f, interfering, cfg_.snr_db, cfg_.mcs(), cfg_.link(),
                                    loss_rng_[r.index()]);
    }
    const std::uint32_t token_id = f.token->token_id;

    if (!addressed) {
        if (!success) {
            ++report_.overheard_lost;
            return;
        }
        ++report_.overheard_received;
        trace(r, "overhear", token_id, f.src);
        std::optional<Token> before;
        if (opts_.check_invariants) before = *f.token;
        try {
            on_receive_frame(nodes_[r.index()], f, true, now_, {}, params_);
        } catch (const ProtocolError&) {
            ++report_.malformed_dropped;
            trace(r, "malformed", token_id, f.src);
        }
        if (before && *before != *f.token) {
            throw InvariantViolation("overhearing modified token " + std::to_string(token_id));
        }
        return;
    }

    ++report_.data.sent;
    radios_[r.index()].reserved_until = 0.0;
    if (!success) {
        if (collided) {
            ++report_.data.collided;
            trace(r, "rx_collision", token_id, f.src);
        } else {
            ++report_.data.corrupted;
            trace(r, "rx_corrupt", token_id, f.src);
        }
        finish_exchange(f.src, f.id, false);
        pump(r);
        return;
    }

    ++report_.data.received;
    report_.payload_bits_delivered += f.payload_bits;
    trace(r, "rx_token", token_id, f.src);
    finish_exchange(f.src, f.id, true);
    auto actions = on_receive_frame(nodes_[r.index()], f, true, now_, neighbours_of(r), params_);
    apply_actions(r, actions, f.src);
}

void Engine::on_injected_delivery(const FrameRecord& rec, UavId r)
{
    try {
        auto actions = on_receive_frame(nodes_[r.index()], rec.frame, true, now_, neighbours_of(r),
                                        params_);
        apply_actions(r, actions, rec.frame.src);
    } catch (const ProtocolError&) {
        ++report_.malformed_dropped;
        trace(r, "malformed", rec.frame.token ? rec.frame.token->token_id : 0, rec.frame.src);
    }
}

void Engine::finish_exchange(UavId sender, std::uint64_t frame_id, bool success)
{
    auto& radio = radios_[sender.index()];
    if (radio.phase != RadioPhase::SendingData || radio.data_frame_id != frame_id || !radio.active) {
        throw InvariantViolation("data outcome for an exchange the sender is not running");
    }
    PendingExchange ex = std::move(*radio.active);
    radio.active.reset();
    radio.phase = RadioPhase::Idle;
    if (!success) {
        ++ex.attempts;
        if (ex.attempts < cfg_.retry_cap) {
            const double backoff =
                token_airtime_ + uniform(loss_rng_[sender.index()], 0.0, 0.5 * token_airtime_);
            const auto token_id = ex.token.token_id;
            radio.awaiting_retransmit.push_back(std::move(ex));
            schedule(now_ + backoff, EventKind::Retransmit, sender, 0, token_id);
        } else {
            Token token = std::move(ex.token);
            token.source = ex.previous_source;
            token.destination = sender;
            hold(sender, std::move(token));
        }
    }
    pump(sender);
}

void Engine::abort_handshake(UavId sender, std::uint64_t rts_frame_id)
{
    auto& radio = radios_[sender.index()];
    if (radio.phase != RadioPhase::AwaitCts || radio.rts_frame_id != rts_frame_id ||
        !radio.active) {
        return;
    }
    ++report_.handshake_aborts;
    PendingExchange ex = std::move(*radio.active);
    radio.active.reset();
    radio.phase = RadioPhase::Idle;
    trace(sender, "abort", ex.token.token_id, ex.target);
    Token token = std::move(ex.token);
    token.source = ex.previous_source;
    token.destination = sender;
    hold(sender, std::move(token));
    pump(sender);
}

void Engine::on_mobility_step()
{
    std::vector<Position> positions;
    positions.reserve(nodes_.size());
    for (const auto& node : nodes_) positions.push_back(node.true_pos);
    const auto moved = step_mobility(positions, cfg_.mobility, cfg_.arena, mobility_rng_);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nodes_[i].true_pos = moved[i];
        if (opts_.position_trace) {
            *opts_.position_trace << format_double(now_) << ' ' << i << ' '
                                  << format_double(moved[i].x) << ' ' << format_double(moved[i].y)
                                  << ' ' << format_double(moved[i].z) << '\n';
        }
    }
    if (!opts_.topology) {
        adjacency_.reset();
    }
    for (const auto& node : nodes_) {
        schedule(now_, EventKind::SelfUpdate, node.id);
    }
    if (const double next = static_cast<double>(++mobility_index_ + 1) * cfg_.mobility.step_interval;
        next < cfg_.sim_duration) {
        schedule(next, EventKind::MobilityStep);
    }
}

void Engine::on_retry_held(UavId n)
{
    auto& radio = radios_[n.index()];
    radio.retry_scheduled = false;
    auto& state = nodes_[n.index()];
    if (state.held_tokens.empty()) {
        return;
    }
    std::vector<std::pair<std::uint32_t, UavId>> sources;
    for (const auto& t : state.held_tokens) sources.emplace_back(t.token_id, t.source);
    auto actions = retry_held_tokens(state, neighbours_of(n), now_);
    for (auto& action : actions) {
        if (auto* send = std::get_if<SendToken>(&action)) {
            const auto src = std::find_if(sources.begin(), sources.end(), [&](const auto& s) {
                return s.first == send->token.token_id;
            });
            trace(n, "forward", send->token.token_id, send->target);
            radio.queue.push_back(PendingExchange{std::move(send->token), send->target,
                                                  src->second, 0});
        }
    }
    if (!state.held_tokens.empty()) {
        schedule_retry(n);
    }
    pump(n);
}

void Engine::on_channel_clear(UavId n)
{
    radios_[n.index()].clear_scheduled = false;
    pump(n);
}

void Engine::on_retransmit(UavId n, std::uint32_t token_id)
{
    auto& radio = radios_[n.index()];
    const auto it = std::find_if(radio.awaiting_retransmit.begin(), radio.awaiting_retransmit.end(),
                                 [&](const PendingExchange& ex) { return ex.token.token_id == token_id; });
    if (it == radio.awaiting_retransmit.end()) {
        throw InvariantViolation("retransmission of a token the node is not waiting on");
    }
    ++report_.retransmissions;
    trace(n, "retransmit", token_id, it->target);
    radio.queue.push_front(std::move(*it));
    radio.awaiting_retransmit.erase(it);
    pump(n);
}

void Engine::take_sample()
{
    MetricSample s;
    s.time = now_;
    s.throughput_bps = now_ > 0.0 ? static_cast<double>(report_.payload_bits_delivered) / now_ : 0.0;
    s.received_packet_ratio = received_packet_ratio(report_);
    s.location_error_m = location_error(nodes_, cfg_.arena);
    s.cache_age_s = mean_cache_age(nodes_, now_);
    report_.samples.push_back(s);
}

std::vector<TokenPlace> Engine::token_places() const
{
    std::vector<TokenPlace> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const UavId id{static_cast<std::uint32_t>(i)};
        for (const auto& t : nodes_[i].held_tokens) out.push_back({t.token_id, id, TokenPlaceKind::Held});
        const auto& radio = radios_[i];
        for (const auto& ex : radio.queue) out.push_back({ex.token.token_id, id, TokenPlaceKind::Queued});
        if (radio.active) out.push_back({radio.active->token.token_id, id, TokenPlaceKind::Active});
        for (const auto& ex : radio.awaiting_retransmit) {
            out.push_back({ex.token.token_id, id, TokenPlaceKind::AwaitingRetransmit});
        }
    }
    return out;
}

void Engine::inject_frame(Frame frame, UavId receiver)
{
    if (receiver.index() >= nodes_.size()) {
        throw DomainError("injected frame receiver out of range");
    }
    frame.id = next_frame_id_++;
    FrameRecord rec;
    rec.audience = {receiver};
    rec.pending = 1;
    rec.injected = true;
    schedule(std::max(now_, frame.tx_end), EventKind::FrameDelivery, receiver, frame.id);
    const auto id = frame.id;
    rec.frame = std::move(frame);
    auto& channel = rec.frame.channel == Channel::Data ? data_ : control_;
    channel.in_flight.emplace(id, std::move(rec));
}

void Engine::verify_invariants()
{
    const std::size_t n = nodes_.size();
    std::vector<int> seen(cfg_.number_of_tokens + 1, 0);
    for (const auto& place : token_places()) {
        if (place.token_id == 0 || place.token_id > cfg_.number_of_tokens) {
            throw InvariantViolation("unknown token id " + std::to_string(place.token_id));
        }
        ++seen[place.token_id];
    }
    for (std::uint32_t t = 1; t <= cfg_.number_of_tokens; ++t) {
        if (seen[t] != 1) {
            throw InvariantViolation("token " + std::to_string(t) + " found in " +
                                     std::to_string(seen[t]) + " places at t=" +
                                     format_double(now_));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = nodes_[i];
        if (node.cache[i].counter != node.own_counter) {
            throw InvariantViolation("node " + std::to_string(i) + " own entry out of sync");
        }
        for (std::size_t u = 0; u < n; ++u) {
            const auto c = node.cache[u].counter;
            if (c > nodes_[u].own_counter) {
                throw InvariantViolation("node " + std::to_string(i) + " holds a counter for " +
                                         std::to_string(u) + " ahead of its owner");
            }
            auto& last = last_counters_[i * n + u];
            if (c < last) {
                throw InvariantViolation("counter for " + std::to_string(u) + " went backwards at node " +
                                         std::to_string(i));
            }
            last = c;
        }
    }
}

void Engine::trace(UavId node, std::string_view event, std::uint32_t token_id,
                   std::optional<UavId> peer)
{
    if (!opts_.trace) {
        return;
    }
    const auto& state = nodes_[node.index()];
    std::size_t known = 0;
    for (const auto& e : state.cache) known += e.counter > 0 ? 1 : 0;
    auto& out = *opts_.trace;
    out << format_double(now_) << ' ' << node.value << ' ' << event << ' ';
    if (token_id) out << token_id; else out << '-';
    out << ' ';
    if (peer && !peer->is_broadcast()) out << peer->value; else out << '-';
    out << ' ' << state.own_counter << ' ' << known << '\n';
}

}  // namespace fanet

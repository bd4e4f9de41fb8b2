#pragma once

#include "fanet/core_model.hpp"
#include "fanet/metrics.hpp"
#include "fanet/mobility.hpp"
#include "fanet/phy_link.hpp"
#include "fanet/rng.hpp"
#include "fanet/scenario.hpp"
#include "fanet/token_protocol.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

namespace fanet {

enum class EventKind : std::uint8_t {
    FrameDelivery,
    MobilityStep,
    SelfUpdate,
    RetryHeld,
    Retransmit,
    HandshakeAbort,
    ChannelClear,
    MetricsSample,
    End,
};

std::string_view to_string(EventKind k) noexcept;

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::End;
    UavId node;
    std::uint64_t frame_id = 0;
    std::uint32_t token_id = 0;
};

/// Min-queue on (time, seq). seq is assigned on push, so events scheduled for
/// the same instant run in scheduling order.
class EventQueue {
public:
    /// Throws InvariantViolation when `time` lies before the last popped event.
    const Event& push(Event ev);
    Event pop();

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    double now() const noexcept { return now_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
    std::uint64_t last_seq_ = 0;
    bool popped_any_ = false;
};

/// Delivery events (time = frame.tx_end) for every node within comm_range of
/// the sender at transmit start. The sender never receives its own frame.
std::vector<Event> plan_deliveries(const Frame& frame, std::span<const Position> positions,
                                   double comm_range);

struct Interval {
    double start = 0.0;
    double end = 0.0;
};

/// Reception outcome at one receiver. Control frames always succeed. A data
/// frame fails when any interval in `interfering` overlaps it; otherwise the
/// outcome is a Bernoulli draw with frame_success_probability.
bool resolve_reception(const Frame& frame, std::span<const Interval> interfering, double snr_db,
                       const McsProfile& mcs, const LinkModel& model, RngStream& rng);

enum class TokenPlaceKind : std::uint8_t { Held, Queued, Active, AwaitingRetransmit };

struct TokenPlace {
    std::uint32_t token_id = 0;
    UavId node;
    TokenPlaceKind kind = TokenPlaceKind::Held;
};

class Engine;

struct EngineOptions {
    std::ostream* trace = nullptr;           // protocol event trace
    std::ostream* position_trace = nullptr;  // time node x y z per mobility step
    bool check_invariants = false;           // verify after every event, throw on failure
    std::optional<std::vector<Position>> initial_positions;
    /// Replaces range-based links (for enumerated static topologies).
    std::optional<AdjacencyMatrix> topology;
    std::function<void(const Engine&, const Event&)> observer;
};

inline constexpr std::string_view kTraceHeader = "# time node event token peer own_counter known";

/// One scenario, single-threaded, deterministic for a given config and seed.
class Engine {
public:
    explicit Engine(ScenarioConfig config, EngineOptions options = {});

    /// Processes events until the end of the run and returns the final report.
    RunReport run();

    /// Processes one event. Returns false once the run has ended.
    bool step();

    bool finished() const noexcept { return finished_; }
    double now() const noexcept { return now_; }
    const ScenarioConfig& config() const noexcept { return cfg_; }
    const std::vector<UavState>& nodes() const noexcept { return nodes_; }
    const RunReport& report() const noexcept { return report_; }
    const AdjacencyMatrix& adjacency();

    /// Successful addressed token deliveries so far.
    std::uint64_t forwards() const noexcept { return report_.data.received; }

    std::vector<TokenPlace> token_places() const;

    /// Delivers an arbitrary frame to `receiver` at frame.tx_end (or now, if
    /// later). Outside the normal exchange bookkeeping; used to feed malformed
    /// input to a node.
    void inject_frame(Frame frame, UavId receiver);

private:
    struct PendingExchange {
        Token token;                // already re-addressed to `target`
        UavId target;
        UavId previous_source;      // restored if the token falls back to held
        std::uint32_t attempts = 0; // data transmissions made so far
    };

    enum class RadioPhase : std::uint8_t { Idle, AwaitCts, SendingData };

    struct Radio {
        std::deque<PendingExchange> queue;
        std::optional<PendingExchange> active;
        RadioPhase phase = RadioPhase::Idle;
        std::uint64_t rts_frame_id = 0;
        std::uint64_t data_frame_id = 0;
        std::vector<PendingExchange> awaiting_retransmit;
        bool retry_scheduled = false;
        double nav_until = 0.0;       // overheard exchange still occupying the air
        double reserved_until = 0.0;  // CTS sent, data frame expected until then
        bool clear_scheduled = false;

        double quiet_until() const noexcept { return std::max(nav_until, reserved_until); }
    };

    struct FrameRecord {
        Frame frame;
        std::vector<UavId> audience;  // sorted
        std::size_t pending = 0;
        bool injected = false;

        bool audible_at(UavId r) const;
    };

    struct ChannelState {
        Channel channel;
        std::map<std::uint64_t, FrameRecord> in_flight;
    };

    struct DataTx {
        std::uint64_t frame_id;
        UavId src;
        Interval interval;
        std::vector<char> audible;
    };

    void initialize();
    void dispatch(const Event& ev);
    void schedule(double time, EventKind kind, UavId node = {}, std::uint64_t frame_id = 0,
                  std::uint32_t token_id = 0);

    std::vector<UavId> neighbours_of(UavId n);
    bool linked(UavId a, UavId b);

    void transmit(Frame frame);
    void pump(UavId n);
    void hold(UavId n, Token token);
    void schedule_retry(UavId n);
    void apply_actions(UavId n, std::vector<ProtocolAction>& actions, UavId previous_source);
    void finish_exchange(UavId sender, std::uint64_t frame_id, bool success);
    void abort_handshake(UavId sender, std::uint64_t rts_frame_id);

    void on_delivery(const Event& ev);
    void on_control_delivery(const FrameRecord& rec, UavId r, bool audible);
    void on_data_delivery(const FrameRecord& rec, UavId r, bool audible);
    void on_injected_delivery(const FrameRecord& rec, UavId r);
    void on_mobility_step();
    void on_retry_held(UavId n);
    void on_retransmit(UavId n, std::uint32_t token_id);
    void on_channel_clear(UavId n);
    void take_sample();

    void verify_invariants();
    void trace(UavId node, std::string_view event, std::uint32_t token_id = 0,
               std::optional<UavId> peer = std::nullopt);

    ScenarioConfig cfg_;
    EngineOptions opts_;
    ProtocolParams params_;
    double now_ = 0.0;
    bool finished_ = false;

    EventQueue queue_;
    std::vector<UavState> nodes_;
    std::vector<Radio> radios_;
    std::vector<RngStream> mobility_rng_;
    std::vector<RngStream> loss_rng_;
    std::vector<RngStream> protocol_rng_;
    std::optional<AdjacencyMatrix> adjacency_;

    ChannelState data_{Channel::Data, {}};
    ChannelState control_{Channel::Control, {}};
    std::deque<DataTx> history_;  // data frames in start order
    std::uint64_t next_frame_id_ = 1;

    std::uint64_t sample_index_ = 0;
    std::uint64_t mobility_index_ = 0;
    double token_airtime_ = 0.0;
    double control_airtime_ = 0.0;
    RunReport report_;
    std::vector<std::uint32_t> last_counters_;
};

/// Convenience wrapper: validated config in, final report out.
RunReport run(const ScenarioConfig& config, EngineOptions options = {});

}  // namespace fanet

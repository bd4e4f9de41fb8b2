#pragma once

#include "fanet/core_model.hpp"
#include "fanet/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fanet {

struct MobilityConfig {
    double v_max = 10.0;          // m/s
    double step_interval = 0.1;   // s

    bool operator==(const MobilityConfig&) const = default;
};

/// Symmetric n x n link matrix with an empty diagonal.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }
    bool linked(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j] != 0; }

    /// Sets both directions; self links are ignored.
    void set(std::size_t i, std::size_t j, bool value);

    bool is_symmetric() const noexcept;
    bool operator==(const AdjacencyMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<unsigned char> bits_;
};

/// Uniform placement inside the arena, one draw per node from that node's stream.
std::vector<Position> random_positions(std::size_t n, const Arena& arena,
                                       std::span<RngStream> streams);

/// Moves every node by an independent random displacement (uniform direction
/// on the sphere, uniform speed in [0, v_max]) and reflects at arena faces.
/// `streams[i]` drives node i.
std::vector<Position> step_mobility(std::span<const Position> positions, const MobilityConfig& cfg,
                                    const Arena& arena, std::span<RngStream> streams);

/// Folds one coordinate back into [lo, hi] by mirror reflection.
double reflect_into(double c, double lo, double hi) noexcept;

AdjacencyMatrix build_adjacency(std::span<const Position> positions, double comm_range);

/// Throws DomainError when id >= adj.size().
std::vector<UavId> find_neighbours(const AdjacencyMatrix& adj, UavId id);

}  // namespace fanet

#include "fanet/mobility.hpp"

#include "fanet/error.hpp"
#include "fanet/phy_link.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fanet {

void AdjacencyMatrix::set(std::size_t i, std::size_t j, bool value)
{
    if (i == j) {
        return;
    }
    bits_[i * n_ + j] = value ? 1 : 0;
    bits_[j * n_ + i] = value ? 1 : 0;
}

bool AdjacencyMatrix::is_symmetric() const noexcept
{
    for (std::size_t i = 0; i < n_; ++i) {
        if (linked(i, i)) return false;
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (linked(i, j) != linked(j, i)) return false;
        }
    }
    return true;
}

std::vector<Position> random_positions(std::size_t n, const Arena& arena,
                                       std::span<RngStream> streams)
{
    if (streams.size() < n) {
        throw DomainError("one mobility stream per node required");
    }
    std::vector<Position> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& rng = streams[i];
        out[i].x = uniform(rng, arena.min.x, arena.max.x);
        out[i].y = uniform(rng, arena.min.y, arena.max.y);
        out[i].z = uniform(rng, arena.min.z, arena.max.z);
    }
    return out;
}

double reflect_into(double c, double lo, double hi) noexcept
{
    if (hi <= lo) {
        return lo;
    }
    // Mirror repeatedly; a single step never exceeds one arena width in
    // practice, but the loop keeps the result inside for any displacement.
    while (c < lo || c > hi) {
        if (c > hi) c = 2.0 * hi - c;
        if (c < lo) c = 2.0 * lo - c;
    }
    return c;
}

std::vector<Position> step_mobility(std::span<const Position> positions, const MobilityConfig& cfg,
                                    const Arena& arena, std::span<RngStream> streams)
{
    if (streams.size() < positions.size()) {
        throw DomainError("one mobility stream per node required");
    }
    std::vector<Position> out(positions.begin(), positions.end());
    if (cfg.v_max <= 0.0) {
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& rng = streams[i];
        const double cos_theta = uniform(rng, -1.0, 1.0);
        const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double speed = uniform(rng, 0.0, cfg.v_max);
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
        const double len = speed * cfg.step_interval;
        out[i].x = reflect_into(out[i].x + len * sin_theta * std::cos(phi), arena.min.x, arena.max.x);
        out[i].y = reflect_into(out[i].y + len * sin_theta * std::sin(phi), arena.min.y, arena.max.y);
        out[i].z = reflect_into(out[i].z + len * cos_theta, arena.min.z, arena.max.z);
    }
    return out;
}

AdjacencyMatrix build_adjacency(std::span<const Position> positions, double comm_range)
{
    if (!(comm_range > 0.0)) {
        throw DomainError("communication range must be positive");
    }
    AdjacencyMatrix adj(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            adj.set(i, j, in_range(positions[i], positions[j], comm_range));
        }
    }
    return adj;
}

std::vector<UavId> find_neighbours(const AdjacencyMatrix& adj, UavId id)
{
    if (id.index() >= adj.size()) {
        throw DomainError("node " + std::to_string(id.value) + " outside adjacency of size " +
                          std::to_string(adj.size()));
    }
    std::vector<UavId> out;
    for (std::size_t j = 0; j < adj.size(); ++j) {
        if (adj.linked(id.index(), j)) {
            out.push_back(UavId{static_cast<std::uint32_t>(j)});
        }
    }
    return out;
}

}  // namespace fanet

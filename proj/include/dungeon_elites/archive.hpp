#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "fitness.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace dungeon_elites {

struct Elite {
    IndividualTree tree;
    FitnessBreakdown fitness;
    DescriptorPair descriptors;
};

enum class OfferOutcome { Inserted, Replaced, RejectedWorse, OutOfRange };

struct InsertionStats {
    std::size_t attempts = 0;
    std::size_t inserts = 0;
    std::size_t replacements = 0;
    std::size_t out_of_range = 0;
    std::size_t rejected = 0;
    friend bool operator==(const InsertionStats&, const InsertionStats&) = default;
};

// 5x5 MAP-Elites grid over (leniency, exploration).
class ElitesArchive {
public:
    static constexpr int kCells = kBinsPerAxis * kBinsPerAxis;

    OfferOutcome offer(const IndividualTree& tree, const FitnessBreakdown& fitness, const DescriptorPair& descriptors) {
        ++stats_.attempts;
        const auto b = bin(descriptors);
        if (!b) {
            ++stats_.out_of_range;
            return OfferOutcome::OutOfRange;
        }
        auto& cell = cells_[static_cast<std::size_t>(b->flat())];
        if (!cell) {
            cell = Elite{tree, fitness, descriptors};
            ++stats_.inserts;
            return OfferOutcome::Inserted;
        }
        if (fitness.total < cell->fitness.total) {
            *cell = Elite{tree, fitness, descriptors};
            ++stats_.replacements;
            return OfferOutcome::Replaced;
        }
        ++stats_.rejected;
        return OfferOutcome::RejectedWorse;
    }

    OfferOutcome offer(const Elite& e) { return offer(e.tree, e.fitness, e.descriptors); }

    const std::optional<Elite>& cell(BinIndex b) const { return cells_[static_cast<std::size_t>(b.flat())]; }

    // Row-major: L1..L5, and E1..E5 within each row.
    std::vector<std::pair<BinIndex, const Elite*>> occupied_cells() const {
        std::vector<std::pair<BinIndex, const Elite*>> out;
        for (int i = 0; i < kCells; ++i)
            if (cells_[static_cast<std::size_t>(i)]) out.emplace_back(BinIndex::from_flat(i), &*cells_[static_cast<std::size_t>(i)]);
        return out;
    }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (const auto& c : cells_) n += c.has_value();
        return n;
    }

    // Binary tournament over occupied cells, drawn with replacement. Returns a
    // copy of the winner; ties go to the first competitor.
    IndividualTree sample_parent(Rng& rng) const {
        const auto occupied = occupied_cells();
        if (occupied.empty()) throw EmptyArchive();
        const Elite* first = occupied[rng.index(occupied.size())].second;
        const Elite* second = occupied[rng.index(occupied.size())].second;
        return second->fitness.total < first->fitness.total ? second->tree : first->tree;
    }

    std::array<std::optional<double>, kCells> cell_totals() const {
        std::array<std::optional<double>, kCells> out;
        for (int i = 0; i < kCells; ++i)
            if (const auto& c = cells_[static_cast<std::size_t>(i)]) out[static_cast<std::size_t>(i)] = c->fitness.total;
        return out;
    }

    const InsertionStats& stats() const { return stats_; }

private:
    std::array<std::optional<Elite>, kCells> cells_;
    InsertionStats stats_;
};

}  // namespace dungeon_elites

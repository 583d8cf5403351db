#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "decoder.hpp"

namespace dungeon_elites {

struct Bounds {
    int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
};

inline Bounds bounds(const LevelGrid& grid) {
    Bounds b;
    bool first = true;
    auto grow = [&](GridCoord c) {
        if (first) {
            b = {c.x, c.x, c.y, c.y};
            first = false;
            return;
        }
        b.min_x = std::min(b.min_x, c.x);
        b.max_x = std::max(b.max_x, c.x);
        b.min_y = std::min(b.min_y, c.y);
        b.max_y = std::max(b.max_y, c.y);
    };
    for (const auto& [c, r] : grid.rooms) grow(c);
    for (const auto& [c, r] : grid.corridors) grow(c);
    return b;
}

// Token shown for one grid cell in the text view.
inline std::string cell_token(const LevelGrid& grid, GridCoord c) {
    if (auto it = grid.rooms.find(c); it != grid.rooms.end()) {
        const PlacedRoom& r = it->second;
        if (c == grid.start) return "S";
        if (grid.goal && c == *grid.goal) return "G";
        if (r.room_type.is_key()) return "k" + std::to_string(r.room_type.id);
        if (r.enemies > 0) return std::to_string(r.enemies);
        return "#";
    }
    if (auto it = grid.corridors.find(c); it != grid.corridors.end()) {
        if (it->second.lock_id) return "|" + std::to_string(*it->second.lock_id) + "|";
        return c.x % 2 != 0 ? "-" : "|";
    }
    return "";
}

// One fixed-width column per grid cell, one line per grid row.
inline std::string render_text(const LevelGrid& grid) {
    const Bounds b = bounds(grid);
    std::size_t width = 1;
    for (int y = b.min_y; y <= b.max_y; ++y)
        for (int x = b.min_x; x <= b.max_x; ++x) width = std::max(width, cell_token(grid, {x, y}).size());
    std::ostringstream out;
    for (int y = b.min_y; y <= b.max_y; ++y) {
        std::string line;
        for (int x = b.min_x; x <= b.max_x; ++x) {
            std::string t = cell_token(grid, {x, y});
            const std::size_t pad = width - t.size();
            line += std::string(pad / 2, ' ') + t + std::string(pad - pad / 2, ' ');
            if (x != b.max_x) line += ' ';
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
    return out.str();
}

namespace detail {

inline constexpr std::array<const char*, 8> kLockPalette{"#e6b800", "#2e7d32", "#1565c0", "#6a1b9a",
                                                         "#ef6c00", "#00838f", "#ad1457", "#5d4037"};

inline const char* lock_colour(int id) { return kLockPalette[static_cast<std::size_t>(id - 1) % kLockPalette.size()]; }

// White for a safe room, deeper red as the count approaches the level maximum.
inline std::string enemy_fill(int enemies, int max_enemies) {
    if (enemies <= 0 || max_enemies <= 0) return "#ffffff";
    const double t = 0.25 + 0.75 * static_cast<double>(enemies) / max_enemies;
    const int gb = static_cast<int>(255.0 * (1.0 - t));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#ff%02x%02x", gb, gb);
    return buf;
}

}  // namespace detail

inline std::string render_svg(const LevelGrid& grid, int cell_px = 24) {
    const Bounds b = bounds(grid);
    const int w = (b.max_x - b.min_x + 1) * cell_px;
    const int h = (b.max_y - b.min_y + 1) * cell_px;
    int max_enemies = 0;
    for (const auto& [c, r] : grid.rooms) max_enemies = std::max(max_enemies, r.enemies);
    auto px = [&](int v, int lo) { return (v - lo) * cell_px; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\">\n";
    s << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#f4f4f4\"/>\n";
    const int inset = cell_px / 4;
    for (const auto& [c, corridor] : grid.corridors) {
        const char* fill = corridor.lock_id ? detail::lock_colour(*corridor.lock_id) : "#9e9e9e";
        s << "  <rect class=\"corridor\" x=\"" << px(c.x, b.min_x) + inset << "\" y=\"" << px(c.y, b.min_y) + inset
          << "\" width=\"" << cell_px - 2 * inset << "\" height=\"" << cell_px - 2 * inset << "\" fill=\"" << fill
          << "\"/>\n";
    }
    for (const auto& [c, r] : grid.rooms) {
        const int x = px(c.x, b.min_x), y = px(c.y, b.min_y);
        const bool is_goal = grid.goal && c == *grid.goal;
        const std::string fill = is_goal ? "#7b1fa2" : detail::enemy_fill(r.enemies, max_enemies);
        s << "  <rect class=\"room\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_px << "\" height=\""
          << cell_px << "\" fill=\"" << fill << "\" stroke=\"#212121\"><title>enemies: " << r.enemies
          << "</title></rect>\n";
        if (c == grid.start || is_goal) {
            s << "  <rect x=\"" << x + inset << "\" y=\"" << y + inset << "\" width=\"" << cell_px - 2 * inset
              << "\" height=\"" << cell_px - 2 * inset << "\" fill=\"" << (is_goal ? "#ffffff" : "#7b1fa2")
              << "\"/>\n";
        }
        if (r.room_type.is_key()) {
            s << "  <circle class=\"key\" cx=\"" << x + cell_px / 2 << "\" cy=\"" << y + cell_px / 2 << "\" r=\""
              << cell_px / 4 << "\" fill=\"" << detail::lock_colour(r.room_type.id) << "\" stroke=\"#212121\"/>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace dungeon_elites

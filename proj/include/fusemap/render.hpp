#pragma once

#include <string>

#include "fusemap/leak.hpp"
#include "fusemap/memory.hpp"

namespace fusemap {

enum class RenderView { logical_bits, physical_bits, physical_pvc };

// Glyphs: '#' = 1, '.' = 0, 'T' = test row, 'c' = calibration row,
// 'x' = dummy column. Planes are laid west to east separated by a space,
// with '|' marking the address spine between planes 11 and 12.
//
// physical_bits shows both bitcells of every unit cell (two character rows
// per unit row); physical_pvc shows one OR'd cell per unit row.
std::string render(const FuseMemory& mem, RenderView view);

// Inverse of the physical_bits render: reads an art frame back into a
// memory. The frame must match render()'s dimensions and furniture.
FuseMemory parse_art(const std::string& text);

// Built-in demo art (cat face and arrow) drawn on the lower pair half of
// every plane, standing in for the pattern used on real test devices.
FuseMemory demo_pattern();

// Frame dimensions of the physical views, in characters.
int physical_bits_frame_height();
int physical_frame_width();

}  // namespace fusemap

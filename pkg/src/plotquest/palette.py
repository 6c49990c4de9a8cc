"""Fixed 73-color palette used for series marks and legend previews.

Colors are addressed by integer id (their index in PALETTE). Legend
association and bar-to-series matching compare ids, never RGB values,
so corrupted ids simply fail to match.
"""

from __future__ import annotations

PALETTE: list[tuple[str, str]] = [
    ("Dark Cyan", "#008b8b"),
    ("Crimson", "#dc143c"),
    ("Dark Orange", "#ff8c00"),
    ("Royal Blue", "#4169e1"),
    ("Forest Green", "#228b22"),
    ("Dark Violet", "#9400d3"),
    ("Goldenrod", "#daa520"),
    ("Indian Red", "#cd5c5c"),
    ("Steel Blue", "#4682b4"),
    ("Olive", "#808000"),
    ("Teal", "#008080"),
    ("Maroon", "#800000"),
    ("Navy", "#000080"),
    ("Dark Salmon", "#e9967a"),
    ("Sea Green", "#2e8b57"),
    ("Slate Blue", "#6a5acd"),
    ("Chocolate", "#d2691e"),
    ("Cadet Blue", "#5f9ea0"),
    ("Dark Khaki", "#bdb76b"),
    ("Medium Orchid", "#ba55d3"),
    ("Firebrick", "#b22222"),
    ("Dodger Blue", "#1e90ff"),
    ("Dark Olive Green", "#556b2f"),
    ("Orchid", "#da70d6"),
    ("Sienna", "#a0522d"),
    ("Light Sea Green", "#20b2aa"),
    ("Dark Magenta", "#8b008b"),
    ("Peru", "#cd853f"),
    ("Medium Sea Green", "#3cb371"),
    ("Indigo", "#4b0082"),
    ("Rosy Brown", "#bc8f8f"),
    ("Dark Slate Blue", "#483d8b"),
    ("Olive Drab", "#6b8e23"),
    ("Pale Violet Red", "#db7093"),
    ("Saddle Brown", "#8b4513"),
    ("Turquoise", "#40e0d0"),
    ("Purple", "#800080"),
    ("Tan", "#d2b48c"),
    ("Spring Green", "#00ff7f"),
    ("Cornflower Blue", "#6495ed"),
    ("Tomato", "#ff6347"),
    ("Medium Aquamarine", "#66cdaa"),
    ("Dark Red", "#8b0000"),
    ("Sky Blue", "#87ceeb"),
    ("Dark Sea Green", "#8fbc8f"),
    ("Blue Violet", "#8a2be2"),
    ("Khaki", "#f0e68c"),
    ("Salmon", "#fa8072"),
    ("Medium Blue", "#0000cd"),
    ("Yellow Green", "#9acd32"),
    ("Plum", "#dda0dd"),
    ("Burlywood", "#deb887"),
    ("Medium Turquoise", "#48d1cc"),
    ("Red", "#ff0000"),
    ("Light Coral", "#f08080"),
    ("Deep Sky Blue", "#00bfff"),
    ("Lime Green", "#32cd32"),
    ("Magenta", "#ff00ff"),
    ("Gold", "#ffd700"),
    ("Coral", "#ff7f50"),
    ("Aquamarine", "#7fffd4"),
    ("Brown", "#a52a2a"),
    ("Light Sky Blue", "#87cefa"),
    ("Green", "#008000"),
    ("Violet", "#ee82ee"),
    ("Sandy Brown", "#f4a460"),
    ("Powder Blue", "#b0e0e6"),
    ("Hot Pink", "#ff69b4"),
    ("Midnight Blue", "#191970"),
    ("Orange Red", "#ff4500"),
    ("Medium Purple", "#9370db"),
    ("Dark Goldenrod", "#b8860b"),
    ("Deep Pink", "#ff1493"),
]

N_COLORS = len(PALETTE)


def color_name(color_id: int) -> str:
    return PALETTE[color_id][0]


def color_hex(color_id: int) -> str:
    return PALETTE[color_id][1]

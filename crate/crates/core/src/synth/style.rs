//! Visual style parameters and the seeded style diversifier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SynthError;

/// Categorical color schemes modeled on ColorBrewer and Tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    Tableau10,
    Category10,
    Set1,
    Set2,
    Dark2,
    Paired,
    Pastel1,
    Accent,
}

/// A palette color with a human-readable name used in generated questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedColor {
    pub hex: &'static str,
    pub name: &'static str,
}

const fn c(hex: &'static str, name: &'static str) -> NamedColor {
    NamedColor { hex, name }
}

const TABLEAU10: [NamedColor; 10] = [
    c("#4e79a7", "blue"),
    c("#f28e2b", "orange"),
    c("#e15759", "red"),
    c("#76b7b2", "teal"),
    c("#59a14f", "green"),
    c("#edc948", "yellow"),
    c("#b07aa1", "purple"),
    c("#ff9da7", "pink"),
    c("#9c755f", "brown"),
    c("#bab0ac", "gray"),
];

const CATEGORY10: [NamedColor; 10] = [
    c("#1f77b4", "blue"),
    c("#ff7f0e", "orange"),
    c("#2ca02c", "green"),
    c("#d62728", "red"),
    c("#9467bd", "purple"),
    c("#8c564b", "brown"),
    c("#e377c2", "pink"),
    c("#7f7f7f", "gray"),
    c("#bcbd22", "olive"),
    c("#17becf", "cyan"),
];

const SET1: [NamedColor; 9] = [
    c("#e41a1c", "red"),
    c("#377eb8", "blue"),
    c("#4daf4a", "green"),
    c("#984ea3", "purple"),
    c("#ff7f00", "orange"),
    c("#ffff33", "yellow"),
    c("#a65628", "brown"),
    c("#f781bf", "pink"),
    c("#999999", "gray"),
];

const SET2: [NamedColor; 8] = [
    c("#66c2a5", "teal"),
    c("#fc8d62", "orange"),
    c("#8da0cb", "lavender"),
    c("#e78ac3", "pink"),
    c("#a6d854", "lime"),
    c("#ffd92f", "yellow"),
    c("#e5c494", "tan"),
    c("#b3b3b3", "gray"),
];

const DARK2: [NamedColor; 8] = [
    c("#1b9e77", "teal"),
    c("#d95f02", "orange"),
    c("#7570b3", "purple"),
    c("#e7298a", "magenta"),
    c("#66a61e", "green"),
    c("#e6ab02", "mustard"),
    c("#a6761d", "brown"),
    c("#666666", "gray"),
];

const PAIRED: [NamedColor; 10] = [
    c("#a6cee3", "light blue"),
    c("#1f78b4", "blue"),
    c("#b2df8a", "light green"),
    c("#33a02c", "green"),
    c("#fb9a99", "pink"),
    c("#e31a1c", "red"),
    c("#fdbf6f", "light orange"),
    c("#ff7f00", "orange"),
    c("#cab2d6", "lavender"),
    c("#6a3d9a", "purple"),
];

const PASTEL1: [NamedColor; 9] = [
    c("#fbb4ae", "salmon"),
    c("#b3cde3", "light blue"),
    c("#ccebc5", "mint"),
    c("#decbe4", "lilac"),
    c("#fed9a6", "peach"),
    c("#ffffcc", "cream"),
    c("#e5d8bd", "beige"),
    c("#fddaec", "light pink"),
    c("#f2f2f2", "light gray"),
];

const ACCENT: [NamedColor; 8] = [
    c("#7fc97f", "green"),
    c("#beaed4", "lavender"),
    c("#fdc086", "peach"),
    c("#ffff99", "yellow"),
    c("#386cb0", "blue"),
    c("#f0027f", "magenta"),
    c("#bf5b17", "brown"),
    c("#666666", "gray"),
];

impl Palette {
    pub const ALL: [Palette; 8] = [
        Palette::Tableau10,
        Palette::Category10,
        Palette::Set1,
        Palette::Set2,
        Palette::Dark2,
        Palette::Paired,
        Palette::Pastel1,
        Palette::Accent,
    ];

    pub fn colors(self) -> &'static [NamedColor] {
        match self {
            Palette::Tableau10 => &TABLEAU10,
            Palette::Category10 => &CATEGORY10,
            Palette::Set1 => &SET1,
            Palette::Set2 => &SET2,
            Palette::Dark2 => &DARK2,
            Palette::Paired => &PAIRED,
            Palette::Pastel1 => &PASTEL1,
            Palette::Accent => &ACCENT,
        }
    }

    /// Color of the `i`-th series (or pie category).
    pub fn color(self, i: usize) -> NamedColor {
        let colors = self.colors();
        colors[i % colors.len()]
    }

    pub fn name_of(self, hex: &str) -> Option<&'static str> {
        self.colors()
            .iter()
            .find(|c| c.hex.eq_ignore_ascii_case(hex))
            .map(|c| c.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineDash {
    Solid,
    Dotted,
    Dashed,
}

impl LineDash {
    pub fn dasharray(self) -> Option<&'static str> {
        match self {
            LineDash::Solid => None,
            LineDash::Dotted => Some("2,3"),
            LineDash::Dashed => Some("6,4"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegendMarker {
    Rect,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    None,
    Horizontal,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
    pub left: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins {
            top: 50.0,
            right: 30.0,
            bottom: 60.0,
            left: 70.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleParams {
    pub palette: Palette,
    /// Fraction of the band width covered by a bar (or bar group).
    pub bar_thickness: f64,
    /// Gap between bars of one group, as a fraction of the bar width.
    pub bar_gap: f64,
    pub line_dash: LineDash,
    pub legend_marker: LegendMarker,
    pub grid: Grid,
    pub show_data_labels: bool,
    pub font_px: u32,
    pub margins: Margins,
}

pub const BAR_THICKNESS_RANGE: (f64, f64) = (0.4, 0.9);
pub const BAR_GAP_RANGE: (f64, f64) = (0.05, 0.4);
pub const FONT_PX_RANGE: (u32, u32) = (9, 16);

impl Default for StyleParams {
    fn default() -> Self {
        StyleParams {
            palette: Palette::Tableau10,
            bar_thickness: 0.7,
            bar_gap: 0.1,
            line_dash: LineDash::Solid,
            legend_marker: LegendMarker::Rect,
            grid: Grid::Horizontal,
            show_data_labels: false,
            font_px: 12,
            margins: Margins::default(),
        }
    }
}

impl StyleParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let in_range = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
        if !in_range(self.bar_thickness, BAR_THICKNESS_RANGE) {
            return Err(SynthError::InvalidStyle("bar_thickness outside [0.4, 0.9]"));
        }
        if !in_range(self.bar_gap, BAR_GAP_RANGE) {
            return Err(SynthError::InvalidStyle("bar_gap outside [0.05, 0.4]"));
        }
        if !(FONT_PX_RANGE.0..=FONT_PX_RANGE.1).contains(&self.font_px) {
            return Err(SynthError::InvalidStyle("font_px outside [9, 16]"));
        }
        let m = self.margins;
        if [m.top, m.right, m.bottom, m.left]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(SynthError::InvalidStyle("negative margin"));
        }
        Ok(())
    }
}

fn frac(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    crate::number::round2(rng.gen_range(lo..=hi)).clamp(lo, hi)
}

/// Draws every style field from the seed.
pub fn diversify_style(rng_seed: u64) -> StyleParams {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ 0x5eed_57e1);
    let palette = Palette::ALL[rng.gen_range(0..Palette::ALL.len())];
    let bar_thickness = frac(&mut rng, BAR_THICKNESS_RANGE);
    let bar_gap = frac(&mut rng, BAR_GAP_RANGE);
    let line_dash = [LineDash::Solid, LineDash::Dotted, LineDash::Dashed][rng.gen_range(0..3)];
    let legend_marker = if rng.gen_bool(0.5) {
        LegendMarker::Rect
    } else {
        LegendMarker::Circle
    };
    let grid = [Grid::None, Grid::Horizontal, Grid::Both][rng.gen_range(0..3)];
    let show_data_labels = rng.gen_bool(0.5);
    let font_px = rng.gen_range(FONT_PX_RANGE.0..=FONT_PX_RANGE.1);
    let margins = Margins {
        top: rng.gen_range(40..=80) as f64,
        right: rng.gen_range(15..=50) as f64,
        bottom: rng.gen_range(50..=90) as f64,
        left: rng.gen_range(60..=100) as f64,
    };
    StyleParams {
        palette,
        bar_thickness,
        bar_gap,
        line_dash,
        legend_marker,
        grid,
        show_data_labels,
        font_px,
        margins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn palettes_have_eight_distinct_colors() {
        for p in Palette::ALL {
            let hexes: HashSet<_> = p.colors().iter().map(|c| c.hex).collect();
            let names: HashSet<_> = p.colors().iter().map(|c| c.name).collect();
            assert!(hexes.len() >= 8, "{p:?}");
            assert_eq!(names.len(), p.colors().len(), "{p:?}");
        }
    }

    #[test]
    fn style_ranges_and_determinism() {
        for seed in 0..500 {
            let s = diversify_style(seed);
            s.validate().unwrap();
            assert_eq!(s, diversify_style(seed));
        }
    }

    #[test]
    fn adjacent_seeds_differ() {
        let differing = (0..1000u64)
            .filter(|&s| diversify_style(s) != diversify_style(s + 1))
            .count();
        assert!(differing as f64 / 1000.0 > 0.99, "{differing}");
    }
}

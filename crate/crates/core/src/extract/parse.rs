//! SVG reading: selector matching, translate composition and mark geometry.

use roxmltree::{Document, Node};
use serde::{Deserialize, Serialize};

use super::profile::{CompiledProfile, SelectorProfile};
use super::ExtractError;
use crate::geom::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkKind {
    Bar,
    Point,
    Slice,
}

/// Slice geometry in degrees clockwise from twelve o'clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceGeometry {
    pub center: (f64, f64),
    pub radius: f64,
    pub start: f64,
    pub sweep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedMark {
    pub kind: MarkKind,
    pub series: Option<String>,
    pub x: Option<String>,
    pub bbox: Rect,
    pub color: Option<String>,
    /// Value carried by the profile's value attribute, if any.
    pub value: Option<f64>,
    pub slice: Option<SliceGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedLabel {
    pub series: Option<String>,
    pub x: Option<String>,
    pub text: String,
    pub pos: (f64, f64),
}

/// A tick's absolute pixel position along its axis, and its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedTick {
    pub pixel: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedLegendItem {
    pub name: String,
    pub color: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedLine {
    pub series: Option<String>,
    pub color: Option<String>,
}

/// Everything the extractor reads from one SVG, in document order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParsedChart {
    pub title: Option<String>,
    pub x_title: Option<String>,
    pub y_title: Option<String>,
    pub plot_area: Option<Rect>,
    pub marks: Vec<ParsedMark>,
    pub lines: Vec<ParsedLine>,
    pub labels: Vec<ParsedLabel>,
    pub x_ticks: Vec<ParsedTick>,
    pub y_ticks: Vec<ParsedTick>,
    pub legend: Vec<ParsedLegendItem>,
}

fn malformed(msg: impl Into<String>) -> ExtractError {
    ExtractError::MalformedSvg(msg.into())
}

fn numbers(text: &str) -> Vec<f64> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .filter_map(|s| s.parse().ok())
        .collect()
}

/// Parses a `transform` attribute, accepting only translations.
fn parse_translate(transform: &str) -> Result<(f64, f64), ExtractError> {
    let mut total = (0.0, 0.0);
    let mut rest = transform.trim();
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| malformed(format!("bad transform {transform:?}")))?;
        let close = rest
            .find(')')
            .ok_or_else(|| malformed(format!("bad transform {transform:?}")))?;
        let name = rest[..open].trim();
        if name != "translate" {
            return Err(malformed(format!("unsupported transform {name:?}")));
        }
        let args = numbers(&rest[open + 1..close]);
        match args.as_slice() {
            [x] => total.0 += x,
            [x, y] => {
                total.0 += x;
                total.1 += y;
            }
            _ => return Err(malformed(format!("bad translate arguments in {transform:?}"))),
        }
        rest = rest[close + 1..].trim_start_matches(|c: char| c == ',' || c.is_whitespace());
    }
    Ok(total)
}

/// Sum of translations on the node and all its ancestors.
fn offset(node: Node) -> Result<(f64, f64), ExtractError> {
    let mut dx = 0.0;
    let mut dy = 0.0;
    for n in node.ancestors() {
        if let Some(t) = n.attribute("transform") {
            let (x, y) = parse_translate(t)?;
            dx += x;
            dy += y;
        }
    }
    Ok((dx, dy))
}

fn num_attr(node: Node, name: &str) -> f64 {
    node.attribute(name)
        .and_then(|v| numbers(v.trim_end_matches("px")).first().copied())
        .unwrap_or(0.0)
}

fn text_content(node: Node) -> String {
    let joined: String = node
        .descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect();
    joined.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase `#rrggbb` for hex and `rgb()` colors; other values lowercased.
pub fn normalize_color(raw: &str) -> Option<String> {
    let c = raw.trim().to_ascii_lowercase();
    if c.is_empty() || c == "none" || c == "transparent" {
        return None;
    }
    if let Some(hex) = c.strip_prefix('#') {
        if hex.len() == 3 {
            let expanded: String = hex.chars().flat_map(|ch| [ch, ch]).collect();
            return Some(format!("#{expanded}"));
        }
        return Some(c);
    }
    if let Some(inner) = c.strip_prefix("rgb(").and_then(|s| s.strip_suffix(')')) {
        let parts = numbers(inner);
        if parts.len() == 3 {
            let b = |v: f64| v.round().clamp(0.0, 255.0) as u8;
            return Some(format!("#{:02x}{:02x}{:02x}", b(parts[0]), b(parts[1]), b(parts[2])));
        }
    }
    Some(c)
}

fn style_prop<'a>(node: Node<'a, '_>, prop: &str) -> Option<&'a str> {
    node.attribute("style")?.split(';').find_map(|decl| {
        let (k, v) = decl.split_once(':')?;
        (k.trim() == prop).then(|| v.trim())
    })
}

fn paint(node: Node, prop: &str) -> Option<String> {
    style_prop(node, prop)
        .or_else(|| node.attribute(prop))
        .and_then(normalize_color)
}

/// Own fill, else the first descendant with a fill or stroke.
fn item_color(node: Node) -> Option<String> {
    paint(node, "fill").or_else(|| {
        node.descendants()
            .skip(1)
            .filter(|n| n.is_element() && n.tag_name().name() != "text")
            .find_map(|n| paint(n, "fill").or_else(|| paint(n, "stroke")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Seg {
    Move(f64, f64),
    Line(f64, f64),
    Arc { large: bool, sweep: bool, to: (f64, f64) },
    Close,
}

fn tokenize_path(d: &str) -> Result<Vec<(char, Vec<f64>)>, ExtractError> {
    let mut out: Vec<(char, Vec<f64>)> = Vec::new();
    let re = regex_lite();
    for m in re.find_iter(d) {
        let tok = m.as_str();
        let first = tok.chars().next().unwrap_or(' ');
        if first.is_ascii_alphabetic() && !matches!(first, 'e' | 'E') {
            out.push((first, Vec::new()));
        } else {
            let v: f64 = tok
                .parse()
                .map_err(|_| malformed(format!("bad number {tok:?} in path")))?;
            out.last_mut()
                .ok_or_else(|| malformed("path data must start with a command"))?
                .1
                .push(v);
        }
    }
    Ok(out)
}

fn regex_lite() -> &'static regex::Regex {
    static RE: once_cell::sync::Lazy<regex::Regex> = once_cell::sync::Lazy::new(|| {
        regex::Regex::new(r"[MmLlHhVvAaZzCcSsQqTt]|[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?").expect("valid regex")
    });
    &RE
}

/// Absolute segments for the subset M, L, H, V, A, Z (either case).
fn path_segments(d: &str) -> Result<Vec<Seg>, ExtractError> {
    let mut segs = Vec::new();
    let (mut cx, mut cy) = (0.0, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for (cmd, args) in tokenize_path(d)? {
        let rel = cmd.is_ascii_lowercase();
        let base = |x: f64, y: f64, cx: f64, cy: f64| if rel { (cx + x, cy + y) } else { (x, y) };
        match cmd.to_ascii_uppercase() {
            'M' | 'L' => {
                if args.len() % 2 != 0 || args.is_empty() {
                    return Err(malformed(format!("bad {cmd} arguments")));
                }
                for (i, p) in args.chunks(2).enumerate() {
                    let (x, y) = base(p[0], p[1], cx, cy);
                    if i == 0 && cmd.eq_ignore_ascii_case(&'M') {
                        segs.push(Seg::Move(x, y));
                        (sx, sy) = (x, y);
                    } else {
                        segs.push(Seg::Line(x, y));
                    }
                    (cx, cy) = (x, y);
                }
            }
            'H' => {
                for x in args {
                    cx = if rel { cx + x } else { x };
                    segs.push(Seg::Line(cx, cy));
                }
            }
            'V' => {
                for y in args {
                    cy = if rel { cy + y } else { y };
                    segs.push(Seg::Line(cx, cy));
                }
            }
            'A' => {
                if args.len() % 7 != 0 || args.is_empty() {
                    return Err(malformed("bad arc arguments"));
                }
                for a in args.chunks(7) {
                    let to = base(a[5], a[6], cx, cy);
                    segs.push(Seg::Arc {
                        large: a[3] != 0.0,
                        sweep: a[4] != 0.0,
                        to,
                    });
                    (cx, cy) = to;
                }
            }
            'Z' => {
                segs.push(Seg::Close);
                (cx, cy) = (sx, sy);
            }
            other => return Err(malformed(format!("unsupported path command {other:?}"))),
        }
    }
    Ok(segs)
}

fn angle_of(center: (f64, f64), p: (f64, f64)) -> f64 {
    let deg = (p.0 - center.0).atan2(-(p.1 - center.1)).to_degrees();
    deg.rem_euclid(360.0)
}

/// Reads a `M c L p A .. Z` sector. Returns `None` for other shapes.
fn slice_geometry(segs: &[Seg]) -> Option<SliceGeometry> {
    let center = match segs.first()? {
        Seg::Move(x, y) => (*x, *y),
        _ => return None,
    };
    let first = match segs.get(1)? {
        Seg::Line(x, y) => (*x, *y),
        _ => return None,
    };
    let radius = ((first.0 - center.0).powi(2) + (first.1 - center.1).powi(2)).sqrt();
    let start = angle_of(center, first);
    let mut prev = start;
    let mut sweep = 0.0;
    let mut arcs = 0;
    for seg in &segs[2..] {
        match seg {
            Seg::Arc {
                large,
                sweep: clockwise,
                to,
            } => {
                let a = angle_of(center, *to);
                let mut delta = (a - prev).rem_euclid(360.0);
                if !clockwise {
                    delta = (360.0 - delta).rem_euclid(360.0);
                }
                if *large && delta < 1e-6 {
                    delta = 360.0;
                }
                sweep += delta;
                prev = a;
                arcs += 1;
            }
            Seg::Line(x, y) if (x - center.0).abs() < 1e-6 && (y - center.1).abs() < 1e-6 => {}
            Seg::Close => {}
            _ => return None,
        }
    }
    (arcs > 0).then_some(SliceGeometry {
        center,
        radius,
        start,
        sweep: sweep.min(360.0),
    })
}

fn sector_bbox(g: &SliceGeometry) -> Rect {
    let mut pts = vec![g.center];
    let at = |deg: f64| {
        let rad = deg.to_radians();
        (g.center.0 + g.radius * rad.sin(), g.center.1 - g.radius * rad.cos())
    };
    pts.push(at(g.start));
    pts.push(at(g.start + g.sweep));
    let mut q = (g.start / 90.0).ceil() * 90.0;
    while q < g.start + g.sweep {
        pts.push(at(q));
        q += 90.0;
    }
    bbox_of(&pts)
}

fn bbox_of(pts: &[(f64, f64)]) -> Rect {
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Rect::new(min_x, min_y, max_x - min_x, max_y - min_y)
}

fn path_bbox(segs: &[Seg]) -> Option<Rect> {
    let pts: Vec<(f64, f64)> = segs
        .iter()
        .filter_map(|s| match s {
            Seg::Move(x, y) | Seg::Line(x, y) => Some((*x, *y)),
            Seg::Arc { to, .. } => Some(*to),
            Seg::Close => None,
        })
        .collect();
    (!pts.is_empty()).then(|| bbox_of(&pts))
}

/// Bounding box of a measured element in absolute coordinates.
fn element_geometry(node: Node) -> Result<(Rect, Option<SliceGeometry>), ExtractError> {
    let (dx, dy) = offset(node)?;
    let shift = |r: Rect| Rect::new(r.x + dx, r.y + dy, r.width, r.height);
    match node.tag_name().name() {
        "rect" => Ok((
            shift(Rect::new(
                num_attr(node, "x"),
                num_attr(node, "y"),
                num_attr(node, "width"),
                num_attr(node, "height"),
            )),
            None,
        )),
        "circle" | "ellipse" => {
            let (cx, cy) = (num_attr(node, "cx"), num_attr(node, "cy"));
            let (rx, ry) = if node.tag_name().name() == "circle" {
                (num_attr(node, "r"), num_attr(node, "r"))
            } else {
                (num_attr(node, "rx"), num_attr(node, "ry"))
            };
            Ok((shift(Rect::new(cx - rx, cy - ry, 2.0 * rx, 2.0 * ry)), None))
        }
        "path" => {
            let d = node.attribute("d").ok_or_else(|| malformed("path without d"))?;
            let segs = path_segments(d)?;
            if let Some(mut g) = slice_geometry(&segs) {
                g.center = (g.center.0 + dx, g.center.1 + dy);
                return Ok((sector_bbox(&g), Some(g)));
            }
            let bbox = path_bbox(&segs).ok_or_else(|| malformed("empty path"))?;
            Ok((shift(bbox), None))
        }
        other => Err(malformed(format!("cannot measure <{other}> mark"))),
    }
}

/// Absolute anchor point of a text-bearing element.
fn anchor(node: Node) -> Result<(f64, f64), ExtractError> {
    let (dx, dy) = offset(node)?;
    Ok((dx + num_attr(node, "x"), dy + num_attr(node, "y")))
}

/// Reads `svg` with `profile`. Fails with `NoMarksFound` when no bar, point
/// or slice matches.
pub fn parse_chart_svg(svg: &str, profile: &SelectorProfile) -> Result<ParsedChart, ExtractError> {
    let p: CompiledProfile = profile.compile()?;
    let doc = Document::parse(svg).map_err(|e| malformed(e.to_string()))?;
    let attr = |n: Node, name: &str| n.attribute(name).map(str::to_string);
    let value_attr = profile.value_attr.as_deref();
    let mut out = ParsedChart::default();
    for node in doc.descendants().filter(Node::is_element) {
        let kind = if p.bar.matches(node) {
            Some(MarkKind::Bar)
        } else if p.point.matches(node) {
            Some(MarkKind::Point)
        } else if p.slice.matches(node) {
            Some(MarkKind::Slice)
        } else {
            None
        };
        if let Some(kind) = kind {
            let (bbox, slice) = element_geometry(node)?;
            if kind == MarkKind::Slice && slice.is_none() {
                return Err(malformed("slice path is not a circular sector"));
            }
            out.marks.push(ParsedMark {
                kind,
                series: attr(node, &profile.series_attr),
                x: attr(node, &profile.x_attr),
                bbox,
                color: paint(node, "fill").or_else(|| paint(node, "stroke")),
                value: value_attr
                    .and_then(|a| node.attribute(a))
                    .and_then(crate::number::parse_value),
                slice,
            });
            continue;
        }
        if p.line.matches(node) {
            out.lines.push(ParsedLine {
                series: attr(node, &profile.series_attr),
                color: paint(node, "stroke").or_else(|| paint(node, "fill")),
            });
        } else if p.label.matches(node) {
            out.labels.push(ParsedLabel {
                series: attr(node, &profile.series_attr),
                x: attr(node, &profile.x_attr),
                text: text_content(node),
                pos: anchor(node)?,
            });
        } else if p.x_tick.matches(node) {
            out.x_ticks.push(ParsedTick {
                pixel: anchor(node)?.0,
                label: text_content(node),
            });
        } else if p.y_tick.matches(node) {
            out.y_ticks.push(ParsedTick {
                pixel: anchor(node)?.1,
                label: text_content(node),
            });
        } else if p.legend_item.matches(node) {
            out.legend.push(ParsedLegendItem {
                name: text_content(node),
                color: item_color(node),
            });
        } else if p.chart_title.matches(node) {
            out.title.get_or_insert_with(|| text_content(node));
        } else if p.x_title.matches(node) {
            out.x_title.get_or_insert_with(|| text_content(node));
        } else if p.y_title.matches(node) {
            out.y_title.get_or_insert_with(|| text_content(node));
        } else if p.plot_area.matches(node) && out.plot_area.is_none() {
            out.plot_area = Some(element_geometry(node)?.0);
        }
    }
    if out.marks.is_empty() {
        return Err(ExtractError::NoMarksFound);
    }
    Ok(out)
}

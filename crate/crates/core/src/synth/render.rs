use std::fmt::Write;

use super::axis::{nice_axis, NiceAxis};
use super::class;
use super::style::{Grid, LegendMarker, StyleParams};
use super::{AxisTick, ChartSpec, ChartType, LegendEntry, MarkRecord, RenderedChart, SliceAngles, SynthError, XTick};
use crate::geom::{fmt_px, round_px, Rect};
use crate::number::{format_fixed_trimmed, format_number, group_thousands};

const LEGEND_WIDTH: f64 = 140.0;
const POINT_RADIUS: f64 = 3.5;
const MIN_PLOT: f64 = 100.0;

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Tick label text: trimmed to the axis precision, grouped by thousands from
/// 10,000 up, with the column unit attached.
pub(crate) fn tick_label(value: f64, decimals: usize, unit: Option<&str>) -> String {
    let mut body = format_fixed_trimmed(value, decimals);
    if value.abs() >= 10_000.0 {
        body = group_thousands(&body);
    }
    with_unit(body, unit)
}

/// Attaches a unit: `%` as a suffix, anything else as a prefix after the
/// sign.
pub(crate) fn with_unit(body: String, unit: Option<&str>) -> String {
    match unit {
        Some("%") => format!("{body}%"),
        Some(u) => match body.strip_prefix('-') {
            Some(abs) => format!("-{u}{abs}"),
            None => format!("{u}{body}"),
        },
        None => body,
    }
}

/// Point on a circle of radius `r` at `deg` degrees clockwise from twelve
/// o'clock, relative to the center.
pub(crate) fn polar(r: f64, deg: f64) -> (f64, f64) {
    let rad = deg.to_radians();
    (r * rad.sin(), -r * rad.cos())
}

/// Bounding box of a pie sector centered at `(cx, cy)`.
pub(crate) fn sector_bbox(cx: f64, cy: f64, r: f64, start: f64, end: f64) -> Rect {
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    let mut push = |deg: f64| {
        let (x, y) = polar(r, deg);
        xs.push(x);
        ys.push(y);
    };
    push(start);
    push(end);
    for quarter in 0..=4 {
        let deg = quarter as f64 * 90.0;
        if deg > start && deg < end {
            push(deg);
        }
    }
    let min_x = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_x = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_y = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let max_y = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Rect::new(cx + min_x, cy + min_y, max_x - min_x, max_y - min_y)
}

struct Ctx<'a> {
    spec: &'a ChartSpec,
    style: &'a StyleParams,
    plot: Rect,
    svg: String,
    marks: Vec<MarkRecord>,
    labels: String,
    axes: String,
}

impl Ctx<'_> {
    fn label(&mut self, series: &str, x: &str, lx: f64, ly: f64, value: f64) {
        let _ = writeln!(
            self.labels,
            r#"<text class="{}" {}="{}" {}="{}" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            class::MARK_LABEL,
            class::ATTR_SERIES,
            escape(series),
            class::ATTR_X,
            escape(x),
            fmt_px(lx),
            fmt_px(ly),
            escape(&with_unit(format_number(value), self.spec.table.y_unit())),
        );
    }
}

/// Renders a chart spec into SVG plus its provenance sidecar.
pub fn render(spec: &ChartSpec) -> Result<RenderedChart, SynthError> {
    spec.validate()?;
    let style = &spec.style;
    let chart_type = spec.chart_type;
    let (w, h) = (spec.canvas.width, spec.canvas.height);
    let m = style.margins;
    let legend_w = if chart_type.has_legend() { LEGEND_WIDTH } else { 0.0 };
    let plot = Rect::new(m.left, m.top, w - m.left - m.right - legend_w, h - m.top - m.bottom);
    if plot.width < MIN_PLOT || plot.height < MIN_PLOT {
        return Err(SynthError::CanvasTooSmall {
            width: plot.width,
            height: plot.height,
        });
    }

    let mut ctx = Ctx {
        spec,
        style,
        plot,
        svg: String::new(),
        marks: Vec::new(),
        labels: String::new(),
        axes: String::new(),
    };
    let _ = writeln!(
        ctx.svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif" font-size="{2}">"#,
        fmt_px(w),
        fmt_px(h),
        style.font_px
    );
    let _ = writeln!(
        ctx.svg,
        r##"<rect class="background" width="{}" height="{}" fill="#ffffff"/>"##,
        fmt_px(w),
        fmt_px(h)
    );
    let title = spec.table.title().map(str::to_string);
    if let Some(t) = &title {
        let _ = writeln!(
            ctx.svg,
            r#"<text class="{}" x="{}" y="{}" text-anchor="middle" font-weight="bold" font-size="{}">{}</text>"#,
            class::CHART_TITLE,
            fmt_px(w / 2.0),
            fmt_px((m.top * 0.4).max(14.0)),
            style.font_px + 4,
            escape(t)
        );
    }
    let _ = writeln!(
        ctx.svg,
        r#"<g class="plot" transform="translate({},{})">"#,
        fmt_px(plot.x),
        fmt_px(plot.y)
    );
    let _ = writeln!(
        ctx.svg,
        r#"<rect class="{}" x="0" y="0" width="{}" height="{}" fill="none"/>"#,
        class::PLOT_AREA,
        fmt_px(plot.width),
        fmt_px(plot.height)
    );

    let series = spec.table.series_names();
    let x_labels = spec.table.x_labels();
    let (axis_ticks, x_ticks) = match chart_type {
        ChartType::Pie => {
            draw_pie(&mut ctx, &x_labels);
            (Vec::new(), Vec::new())
        }
        _ => {
            let values = spec.table.values();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let axis = if chart_type.is_bar() {
                nice_axis(lo.min(0.0), hi.max(0.0))
            } else {
                nice_axis(lo, hi)
            };
            draw_grid(&mut ctx, &axis, x_labels.len());
            if chart_type.is_bar() {
                draw_bars(&mut ctx, &axis, &series, &x_labels);
            } else {
                draw_lines(&mut ctx, &axis, &series, &x_labels);
            }
            let y_ticks = draw_y_axis(&mut ctx, &axis);
            let x_ticks = draw_x_axis(&mut ctx, &x_labels);
            (y_ticks, x_ticks)
        }
    };
    if style.show_data_labels {
        let labels = std::mem::take(&mut ctx.labels);
        ctx.svg.push_str(&labels);
    }
    ctx.svg.push_str("</g>\n");
    let axes = std::mem::take(&mut ctx.axes);
    ctx.svg.push_str(&axes);
    if chart_type != ChartType::Pie {
        let titles = ctx.axis_titles();
        ctx.svg.push_str(&titles);
    }

    let x_title = spec.table.x_name().to_string();
    let y_title = spec.table.y_name().to_string();
    let legend = draw_legend(&mut ctx, &series, &x_labels, &x_title, &y_title);
    ctx.svg.push_str("</svg>\n");

    Ok(RenderedChart {
        svg: ctx.svg,
        chart_type,
        canvas: spec.canvas,
        palette: style.palette,
        title,
        x_title,
        y_title,
        plot_area: plot,
        marks: ctx.marks,
        axis_ticks,
        x_ticks,
        legend,
    })
}

impl Ctx<'_> {
    /// Axis titles for cartesian charts.
    fn axis_titles(&self) -> String {
        let mut s = String::new();
        let plot = self.plot;
        let _ = writeln!(
            s,
            r#"<text class="{}" {}="x" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            class::AXIS_TITLE,
            class::ATTR_AXIS,
            fmt_px(plot.center_x()),
            fmt_px(self.spec.canvas.height - self.style.margins.bottom * 0.25),
            escape(self.spec.table.x_name())
        );
        let _ = writeln!(
            s,
            r#"<text class="{}" {}="y" x="{}" y="{}" text-anchor="start">{}</text>"#,
            class::AXIS_TITLE,
            class::ATTR_AXIS,
            fmt_px((plot.x - self.style.margins.left * 0.8).max(2.0)),
            fmt_px(plot.y - 10.0),
            escape(self.spec.table.y_name())
        );
        s
    }
}

fn y_rel(axis: &NiceAxis, plot_h: f64, v: f64) -> f64 {
    (v - axis.min) / (axis.max - axis.min) * plot_h
}

fn draw_grid(ctx: &mut Ctx, axis: &NiceAxis, bands: usize) {
    let (pw, ph) = (ctx.plot.width, ctx.plot.height);
    if ctx.style.grid == Grid::None {
        return;
    }
    for t in &axis.ticks {
        let y = round_px(ph - y_rel(axis, ph, *t));
        let _ = writeln!(
            ctx.svg,
            r##"<line class="grid-line" x1="0" x2="{}" y1="{}" y2="{}" stroke="#e0e0e0"/>"##,
            fmt_px(pw),
            fmt_px(y),
            fmt_px(y)
        );
    }
    if ctx.style.grid == Grid::Both {
        let band = pw / bands as f64;
        for i in 0..bands {
            let x = round_px(i as f64 * band + band / 2.0);
            let _ = writeln!(
                ctx.svg,
                r##"<line class="grid-line" x1="{}" x2="{}" y1="0" y2="{}" stroke="#e0e0e0"/>"##,
                fmt_px(x),
                fmt_px(x),
                fmt_px(ph)
            );
        }
    }
}

fn draw_bars(ctx: &mut Ctx, axis: &NiceAxis, series: &[String], x_labels: &[String]) {
    let plot = ctx.plot;
    let band = plot.width / x_labels.len() as f64;
    let group_w = band * ctx.style.bar_thickness;
    let k = series.len() as f64;
    let bar_w = group_w / (k + (k - 1.0) * ctx.style.bar_gap);
    let offset = (band - group_w) / 2.0;
    let palette = ctx.style.palette;
    for (i, x) in x_labels.iter().enumerate() {
        for (j, s) in series.iter().enumerate() {
            let Some(v) = ctx.spec.table.value(x, s) else {
                continue;
            };
            let color = palette.color(j).hex;
            let bx = round_px(i as f64 * band + offset + j as f64 * bar_w * (1.0 + ctx.style.bar_gap));
            let bw = round_px(bar_w);
            let bh = round_px(y_rel(axis, plot.height, v));
            let by = round_px(plot.height - bh);
            let _ = writeln!(
                ctx.svg,
                r#"<rect class="{}" {}="{}" {}="{}" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                class::MARK_BAR,
                class::ATTR_SERIES,
                escape(s),
                class::ATTR_X,
                escape(x),
                fmt_px(bx),
                fmt_px(by),
                fmt_px(bw),
                fmt_px(bh),
                color
            );
            ctx.label(s, x, bx + bw / 2.0, by - 4.0, v);
            ctx.marks.push(MarkRecord {
                series: s.clone(),
                x_label: x.clone(),
                value: v,
                bbox: Rect::new(plot.x + bx, plot.y + by, bw, bh),
                color: color.to_string(),
                angles: None,
            });
        }
    }
}

fn draw_lines(ctx: &mut Ctx, axis: &NiceAxis, series: &[String], x_labels: &[String]) {
    let plot = ctx.plot;
    let band = plot.width / x_labels.len() as f64;
    let palette = ctx.style.palette;
    let dash = ctx
        .style
        .line_dash
        .dasharray()
        .map(|d| format!(r#" stroke-dasharray="{d}""#))
        .unwrap_or_default();
    for (j, s) in series.iter().enumerate() {
        let color = palette.color(j).hex;
        let pts: Vec<(String, f64, f64, f64)> = x_labels
            .iter()
            .enumerate()
            .filter_map(|(i, x)| {
                let v = ctx.spec.table.value(x, s)?;
                let cx = round_px(i as f64 * band + band / 2.0);
                let cy = round_px(plot.height - y_rel(axis, plot.height, v));
                Some((x.clone(), v, cx, cy))
            })
            .collect();
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, (_, _, cx, cy))| format!("{}{},{}", if i == 0 { "M" } else { "L" }, fmt_px(*cx), fmt_px(*cy)))
            .collect();
        let _ = writeln!(
            ctx.svg,
            r#"<path class="{}" {}="{}" d="{}" fill="none" stroke="{}" stroke-width="2"{}/>"#,
            class::MARK_LINE,
            class::ATTR_SERIES,
            escape(s),
            d.join(""),
            color,
            dash
        );
        for (x, v, cx, cy) in pts {
            let _ = writeln!(
                ctx.svg,
                r#"<circle class="{}" {}="{}" {}="{}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                class::MARK_POINT,
                class::ATTR_SERIES,
                escape(s),
                class::ATTR_X,
                escape(&x),
                fmt_px(cx),
                fmt_px(cy),
                POINT_RADIUS,
                color
            );
            ctx.label(s, &x, cx, cy - 8.0, v);
            ctx.marks.push(MarkRecord {
                series: s.clone(),
                x_label: x,
                value: v,
                bbox: Rect::new(
                    plot.x + cx - POINT_RADIUS,
                    plot.y + cy - POINT_RADIUS,
                    2.0 * POINT_RADIUS,
                    2.0 * POINT_RADIUS,
                ),
                color: color.to_string(),
                angles: None,
            });
        }
    }
}

fn draw_pie(ctx: &mut Ctx, x_labels: &[String]) {
    let plot = ctx.plot;
    let values = ctx.spec.table.values();
    let total: f64 = values.iter().sum();
    let series = ctx.spec.table.y_name().to_string();
    let r = round_px(plot.width.min(plot.height) / 2.0 - 8.0);
    let (cx, cy) = (round_px(plot.width / 2.0), round_px(plot.height / 2.0));
    let _ = writeln!(
        ctx.svg,
        r#"<g class="pie" transform="translate({},{})">"#,
        fmt_px(cx),
        fmt_px(cy)
    );
    let mut start = 0.0;
    let n = values.len();
    for (i, (x, v)) in x_labels.iter().zip(&values).enumerate() {
        let end = if i + 1 == n { 360.0 } else { start + v / total * 360.0 };
        let sweep = end - start;
        let color = ctx.style.palette.color(i).hex;
        let (x1, y1) = polar(r, start);
        let (x2, y2) = polar(r, end);
        let p = |a: f64, b: f64| format!("{},{}", fmt_px(a), fmt_px(b));
        let d = if sweep >= 359.99 {
            let (xm, ym) = polar(r, start + 180.0);
            format!(
                "M0,0L{}A{r},{r} 0 1,1 {}A{r},{r} 0 1,1 {}Z",
                p(x1, y1),
                p(xm, ym),
                p(x1, y1),
                r = fmt_px(r)
            )
        } else {
            format!(
                "M0,0L{}A{r},{r} 0 {},1 {}Z",
                p(x1, y1),
                if sweep > 180.0 { 1 } else { 0 },
                p(x2, y2),
                r = fmt_px(r)
            )
        };
        let _ = writeln!(
            ctx.svg,
            r##"<path class="{}" {}="{}" {}="{}" d="{}" fill="{}" stroke="#ffffff"/>"##,
            class::MARK_SLICE,
            class::ATTR_SERIES,
            escape(&series),
            class::ATTR_X,
            escape(x),
            d,
            color
        );
        let (lx, ly) = polar(r * 0.65, start + sweep / 2.0);
        ctx.label(&series, x, cx + lx, cy + ly, *v);
        ctx.marks.push(MarkRecord {
            series: series.clone(),
            x_label: x.clone(),
            value: *v,
            bbox: sector_bbox(plot.x + cx, plot.y + cy, r, start, end),
            color: color.to_string(),
            angles: Some(SliceAngles { start, end }),
        });
        start = end;
    }
    ctx.svg.push_str("</g>\n");
}

fn draw_y_axis(ctx: &mut Ctx, axis: &NiceAxis) -> Vec<AxisTick> {
    let plot = ctx.plot;
    let unit = ctx.spec.table.y_unit().map(str::to_string);
    let mut ticks = Vec::new();
    let mut group = String::new();
    let _ = writeln!(
        group,
        r#"<g class="axis axis-y" transform="translate({},{})">"#,
        fmt_px(plot.x),
        fmt_px(plot.y)
    );
    for t in &axis.ticks {
        let y = round_px(plot.height - y_rel(axis, plot.height, *t));
        let label = tick_label(*t, axis.decimals, unit.as_deref());
        let _ = writeln!(
            group,
            r##"<g class="{}" transform="translate(0,{})"><line x2="-6" stroke="#333333"/><text x="-9" dy="0.32em" text-anchor="end">{}</text></g>"##,
            class::AXIS_Y_TICK,
            fmt_px(y),
            escape(&label)
        );
        ticks.push(AxisTick {
            pixel: plot.y + y,
            label,
            value: *t,
        });
    }
    group.push_str("</g>\n");
    ctx.axes.push_str(&group);
    ticks
}

fn draw_x_axis(ctx: &mut Ctx, x_labels: &[String]) -> Vec<XTick> {
    let plot = ctx.plot;
    let band = plot.width / x_labels.len() as f64;
    let mut group = String::new();
    let _ = writeln!(
        group,
        r#"<g class="axis axis-x" transform="translate({},{})">"#,
        fmt_px(plot.x),
        fmt_px(plot.bottom())
    );
    let mut ticks = Vec::new();
    for (i, x) in x_labels.iter().enumerate() {
        let cx = round_px(i as f64 * band + band / 2.0);
        let _ = writeln!(
            group,
            r##"<g class="{}" transform="translate({},0)"><line y2="6" stroke="#333333"/><text y="9" dy="0.71em" text-anchor="middle">{}</text></g>"##,
            class::AXIS_X_TICK,
            fmt_px(cx),
            escape(x)
        );
        ticks.push(XTick {
            pixel: plot.x + cx,
            label: x.clone(),
        });
    }
    group.push_str("</g>\n");
    ctx.axes.push_str(&group);
    ticks
}

fn draw_legend(
    ctx: &mut Ctx,
    series: &[String],
    x_labels: &[String],
    x_title: &str,
    y_title: &str,
) -> Vec<LegendEntry> {
    let chart_type = ctx.spec.chart_type;
    if !chart_type.has_legend() {
        return Vec::new();
    }
    let names = if chart_type == ChartType::Pie { x_labels } else { series };
    let m = ctx.style.margins;
    let lx = ctx.spec.canvas.width - m.right - LEGEND_WIDTH + 12.0;
    let mut ly = ctx.plot.y;
    let palette = ctx.style.palette;
    let mut out = String::new();
    if chart_type == ChartType::Pie {
        let _ = writeln!(
            out,
            r#"<text class="{}" {}="x" x="{}" y="{}" font-weight="bold">{}</text>"#,
            class::AXIS_TITLE,
            class::ATTR_AXIS,
            fmt_px(lx),
            fmt_px(ly),
            escape(x_title)
        );
        let _ = writeln!(
            out,
            r#"<text class="{}" {}="y" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            class::AXIS_TITLE,
            class::ATTR_AXIS,
            fmt_px(ctx.plot.center_x()),
            fmt_px(ctx.plot.bottom() + m.bottom * 0.5),
            escape(y_title)
        );
        ly += 12.0;
    }
    let _ = writeln!(
        out,
        r#"<g class="legend" transform="translate({},{})">"#,
        fmt_px(lx),
        fmt_px(ly)
    );
    let size = ctx.style.font_px as f64;
    let mut entries = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let color = palette.color(i);
        let marker = match ctx.style.legend_marker {
            LegendMarker::Rect => format!(
                r#"<rect width="{0}" height="{0}" fill="{1}"/>"#,
                fmt_px(size),
                color.hex
            ),
            LegendMarker::Circle => format!(
                r#"<circle cx="{0}" cy="{0}" r="{0}" fill="{1}"/>"#,
                fmt_px(size / 2.0),
                color.hex
            ),
        };
        let _ = writeln!(
            out,
            r#"<g class="{}" transform="translate(0,{})">{}<text x="{}" y="{}">{}</text></g>"#,
            class::LEGEND_ITEM,
            fmt_px(i as f64 * (size + 8.0)),
            marker,
            fmt_px(size + 6.0),
            fmt_px(size * 0.85),
            escape(name)
        );
        entries.push(LegendEntry {
            name: name.clone(),
            color: color.hex.to_string(),
            color_name: color.name.to_string(),
        });
    }
    out.push_str("</g>\n");
    ctx.svg.push_str(&out);
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{Canvas, ChartSpec, Margins, StyleParams};
    use crate::table::{ChartReadyTable, Column};

    fn style_with_plot_height(plot_h: f64) -> StyleParams {
        StyleParams {
            margins: Margins {
                top: 50.0,
                right: 30.0,
                bottom: 600.0 - 50.0 - plot_h,
                left: 70.0,
            },
            ..StyleParams::default()
        }
    }

    #[test]
    fn bar_height_follows_linear_scale() {
        let t = ChartReadyTable::simple(None, "k", Column::numeric("v", None), &[("a", 50.0), ("b", 100.0)]).unwrap();
        let spec = ChartSpec::new(
            ChartType::SimpleBar,
            t,
            style_with_plot_height(200.0),
            Canvas::default(),
        )
        .unwrap();
        let chart = render(&spec).unwrap();
        assert_eq!(chart.plot_area.height, 200.0);
        assert_eq!(chart.axis_ticks.first().unwrap().value, 0.0);
        assert_eq!(chart.axis_ticks.last().unwrap().value, 100.0);
        assert!((chart.marks[0].bbox.height - 100.0).abs() <= 0.5);
        assert!((chart.marks[1].bbox.height - 200.0).abs() <= 0.5);
    }

    #[test]
    fn equal_pie_slices_are_quarters() {
        let t = ChartReadyTable::simple(
            None,
            "k",
            Column::numeric("v", None),
            &[("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)],
        )
        .unwrap();
        let spec = ChartSpec::new(ChartType::Pie, t, StyleParams::default(), Canvas::default()).unwrap();
        let chart = render(&spec).unwrap();
        assert_eq!(chart.marks.len(), 4);
        let total: f64 = chart.marks.iter().map(|m| m.angles.unwrap().sweep()).sum();
        assert!((total - 360.0).abs() <= 0.01);
        for m in &chart.marks {
            assert!((m.angles.unwrap().sweep() - 90.0).abs() <= 0.1);
        }
        assert_eq!(chart.legend.len(), 4);
    }

    #[test]
    fn grouped_bar_mark_count() {
        let t = ChartReadyTable::grouped(
            Some("Output"),
            "year",
            "plant",
            Column::numeric("tons", None),
            &[
                ("2001", "north", 1.0),
                ("2001", "south", 2.0),
                ("2002", "north", 3.0),
                ("2002", "south", 4.0),
                ("2003", "north", 5.0),
                ("2003", "south", 6.0),
            ],
        )
        .unwrap();
        let spec = ChartSpec::new(ChartType::GroupedBar, t, StyleParams::default(), Canvas::default()).unwrap();
        let chart = render(&spec).unwrap();
        assert_eq!(chart.marks.len(), 6);
        assert_eq!(chart.legend.len(), 2);
        assert_eq!(chart.x_labels(), vec!["2001", "2002", "2003"]);
        assert!(chart.svg.contains(r#"class="chart-title""#));
        assert_eq!(render(&spec).unwrap().svg, chart.svg);
    }

    #[test]
    fn small_canvas_rejected() {
        let t = ChartReadyTable::simple(None, "k", Column::numeric("v", None), &[("a", 1.0)]).unwrap();
        let spec = ChartSpec::new(
            ChartType::SimpleBar,
            t,
            StyleParams::default(),
            Canvas {
                width: 180.0,
                height: 600.0,
            },
        )
        .unwrap();
        assert!(matches!(render(&spec), Err(SynthError::CanvasTooSmall { .. })));
    }

    #[test]
    fn escapes_text() {
        let t = ChartReadyTable::simple(
            Some("A & B <c>"),
            "k",
            Column::numeric("v", None),
            &[("x\"y", 1.0), ("p&q", 2.0)],
        )
        .unwrap();
        let spec = ChartSpec::new(ChartType::SimpleBar, t, StyleParams::default(), Canvas::default()).unwrap();
        let chart = render(&spec).unwrap();
        assert!(roxmltree::Document::parse(&chart.svg).is_ok());
        assert!(chart.svg.contains("A &amp; B &lt;c&gt;"));
    }

    #[test]
    fn tick_labels_carry_units() {
        assert_eq!(tick_label(20000.0, 0, Some("$")), "$20,000");
        assert_eq!(tick_label(-5.0, 0, Some("$")), "-$5");
        assert_eq!(tick_label(0.5, 1, Some("%")), "0.5%");
    }
}

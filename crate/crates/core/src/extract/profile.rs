//! CSS-like selectors naming the parts of a chart SVG.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExtractError;
use crate::synth::class;

/// One compound selector: optional tag, any number of `.class` parts and
/// `[attr]` / `[attr=value]` filters. A comma separates alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    alternatives: Vec<Compound>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Compound {
    tag: Option<String>,
    classes: Vec<String>,
    attrs: Vec<(String, Option<String>)>,
}

impl Selector {
    pub fn parse(text: &str) -> Result<Self, ExtractError> {
        let alternatives = text
            .split(',')
            .map(|alt| Compound::parse(alt.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if alternatives.is_empty() {
            return Err(ExtractError::InvalidProfile(format!("empty selector {text:?}")));
        }
        Ok(Selector { alternatives })
    }

    pub fn matches(&self, node: roxmltree::Node) -> bool {
        node.is_element() && self.alternatives.iter().any(|c| c.matches(node))
    }
}

impl Compound {
    fn parse(text: &str) -> Result<Self, ExtractError> {
        let bad = || ExtractError::InvalidProfile(format!("cannot parse selector {text:?}"));
        if text.is_empty() {
            return Err(bad());
        }
        let mut tag = None;
        let mut classes = Vec::new();
        let mut attrs = Vec::new();
        let mut rest = text;
        let ident_end = |s: &str| s.find(['.', '[']).unwrap_or(s.len());
        let end = ident_end(rest);
        if end > 0 {
            tag = Some(rest[..end].to_string());
            rest = &rest[end..];
        }
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('.') {
                let end = ident_end(r);
                if end == 0 {
                    return Err(bad());
                }
                classes.push(r[..end].to_string());
                rest = &r[end..];
            } else if let Some(r) = rest.strip_prefix('[') {
                let close = r.find(']').ok_or_else(bad)?;
                let inner = &r[..close];
                let (name, value) = match inner.split_once('=') {
                    Some((n, v)) => (n.trim(), Some(v.trim().trim_matches(['"', '\'']).to_string())),
                    None => (inner.trim(), None),
                };
                if name.is_empty() {
                    return Err(bad());
                }
                attrs.push((name.to_string(), value));
                rest = &r[close + 1..];
            } else {
                return Err(bad());
            }
        }
        Ok(Compound { tag, classes, attrs })
    }

    fn matches(&self, node: roxmltree::Node) -> bool {
        if let Some(tag) = &self.tag {
            if node.tag_name().name() != tag {
                return false;
            }
        }
        let node_classes: Vec<&str> = node
            .attribute("class")
            .map(|c| c.split_whitespace().collect())
            .unwrap_or_default();
        if !self.classes.iter().all(|c| node_classes.contains(&c.as_str())) {
            return false;
        }
        self.attrs
            .iter()
            .all(|(name, value)| match (node.attribute(name.as_str()), value) {
                (Some(_), None) => true,
                (Some(actual), Some(want)) => actual == want,
                (None, _) => false,
            })
    }
}

/// Selectors and attribute names used to read a chart SVG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorProfile {
    pub bar: String,
    pub slice: String,
    pub point: String,
    pub line: String,
    pub label: String,
    pub x_tick: String,
    pub y_tick: String,
    pub legend_item: String,
    pub chart_title: String,
    pub x_title: String,
    pub y_title: String,
    pub plot_area: String,
    pub series_attr: String,
    pub x_attr: String,
    /// Attribute carrying a mark's value verbatim, for corpora that have one.
    #[serde(default)]
    pub value_attr: Option<String>,
}

impl Default for SelectorProfile {
    /// Matches the class taxonomy written by the chart renderer.
    fn default() -> Self {
        let c = |s: &str| format!(".{s}");
        SelectorProfile {
            bar: c(class::MARK_BAR),
            slice: c(class::MARK_SLICE),
            point: c(class::MARK_POINT),
            line: c(class::MARK_LINE),
            label: c(class::MARK_LABEL),
            x_tick: c(class::AXIS_X_TICK),
            y_tick: c(class::AXIS_Y_TICK),
            legend_item: c(class::LEGEND_ITEM),
            chart_title: c(class::CHART_TITLE),
            x_title: format!(".{}[{}=x]", class::AXIS_TITLE, class::ATTR_AXIS),
            y_title: format!(".{}[{}=y]", class::AXIS_TITLE, class::ATTR_AXIS),
            plot_area: c(class::PLOT_AREA),
            series_attr: class::ATTR_SERIES.into(),
            x_attr: class::ATTR_X.into(),
            value_attr: None,
        }
    }
}

/// Parsed selectors, ready for matching.
pub(crate) struct CompiledProfile {
    pub bar: Selector,
    pub slice: Selector,
    pub point: Selector,
    pub line: Selector,
    pub label: Selector,
    pub x_tick: Selector,
    pub y_tick: Selector,
    pub legend_item: Selector,
    pub chart_title: Selector,
    pub x_title: Selector,
    pub y_title: Selector,
    pub plot_area: Selector,
}

impl SelectorProfile {
    pub fn from_json_str(s: &str) -> Result<Self, ExtractError> {
        let p: SelectorProfile = serde_json::from_str(s).map_err(|e| ExtractError::InvalidProfile(e.to_string()))?;
        p.compile()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, ExtractError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExtractError::InvalidProfile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub(crate) fn compile(&self) -> Result<CompiledProfile, ExtractError> {
        if self.series_attr.trim().is_empty() || self.x_attr.trim().is_empty() {
            return Err(ExtractError::InvalidProfile("empty attribute name".into()));
        }
        Ok(CompiledProfile {
            bar: Selector::parse(&self.bar)?,
            slice: Selector::parse(&self.slice)?,
            point: Selector::parse(&self.point)?,
            line: Selector::parse(&self.line)?,
            label: Selector::parse(&self.label)?,
            x_tick: Selector::parse(&self.x_tick)?,
            y_tick: Selector::parse(&self.y_tick)?,
            legend_item: Selector::parse(&self.legend_item)?,
            chart_title: Selector::parse(&self.chart_title)?,
            x_title: Selector::parse(&self.x_title)?,
            y_title: Selector::parse(&self.y_title)?,
            plot_area: Selector::parse(&self.plot_area)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_match(svg: &str, sel: &str) -> bool {
        let doc = roxmltree::Document::parse(svg).unwrap();
        let sel = Selector::parse(sel).unwrap();
        doc.descendants().any(|n| sel.matches(n))
    }

    #[test]
    fn selector_forms() {
        let svg = r#"<svg><rect class="a b" data-k="1"/><text class="t" data-axis="x"/></svg>"#;
        assert!(first_match(svg, ".a"));
        assert!(first_match(svg, "rect.a.b"));
        assert!(!first_match(svg, "circle.a"));
        assert!(first_match(svg, "rect[data-k]"));
        assert!(first_match(svg, ".t[data-axis=x]"));
        assert!(!first_match(svg, ".t[data-axis=y]"));
        assert!(first_match(svg, "circle, text.t"));
    }

    #[test]
    fn rejects_bad_selectors() {
        for s in ["", ".", "a[", "[=x]", "a..b"] {
            assert!(Selector::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn default_profile_round_trips_json() {
        let p = SelectorProfile::default();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(SelectorProfile::from_json_str(&json).unwrap(), p);
        assert!(SelectorProfile::from_json_str(r#"{"bar":""}"#).is_err());
    }
}

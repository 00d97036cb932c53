//! Numeric cell parsing and the canonical number format shared by tables,
//! data labels and task targets.

use once_cell::sync::Lazy;
use regex::Regex;

const CURRENCY: [char; 5] = ['$', '€', '£', '¥', '₹'];

static PLAIN: Lazy<Regex> = Lazy::new(|| Regex::new(r"^[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)?(?:\.\d+)?$").unwrap());

/// A number parsed out of a text cell, with whatever unit affix was stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedNumber {
    pub value: f64,
    pub unit: Option<String>,
}

/// Parses a cell as a number after stripping one leading currency symbol,
/// thousands separators and one trailing `%`.
pub fn parse_number(text: &str) -> Option<ParsedNumber> {
    let mut s = text.trim();
    let mut unit = None;
    let mut negative_prefix = false;
    if let Some(rest) = s.strip_prefix('-') {
        if rest.starts_with(CURRENCY) {
            negative_prefix = true;
            s = rest;
        }
    }
    if let Some(c) = s.chars().next() {
        if CURRENCY.contains(&c) {
            unit = Some(c.to_string());
            s = s[c.len_utf8()..].trim_start();
        }
    }
    if let Some(rest) = s.strip_suffix('%') {
        if unit.is_some() {
            return None;
        }
        unit = Some("%".to_string());
        s = rest.trim_end();
    }
    if s.is_empty() || !s.bytes().any(|b| b.is_ascii_digit()) || !PLAIN.is_match(s) {
        return None;
    }
    let value: f64 = s.replace(',', "").parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    let value = if negative_prefix { -value } else { value };
    Some(ParsedNumber { value, unit })
}

/// Convenience wrapper returning only the value.
pub fn parse_value(text: &str) -> Option<f64> {
    parse_number(text).map(|p| p.value)
}

/// Rounds half away from zero to two decimal places.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Canonical number rendering: at most two decimals, trailing zeros
/// trimmed, no thousands separators, never `-0`.
pub fn format_number(v: f64) -> String {
    format_fixed_trimmed(round2(v), 2)
}

/// Renders with `decimals` places and trims trailing zeros.
pub fn format_fixed_trimmed(v: f64, decimals: usize) -> String {
    let mut s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Number of digits after the decimal point in a rendered number.
pub fn decimals_in(text: &str) -> usize {
    let digits: String = text.chars().filter(|c| c.is_ascii_digit() || *c == '.').collect();
    digits.split_once('.').map_or(0, |(_, frac)| frac.len())
}

/// Inserts `,` thousands separators into an already formatted number.
pub fn group_thousands(formatted: &str) -> String {
    let (sign, body) = match formatted.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", formatted),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let mut grouped = String::new();
    for (i, c) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(c);
    }
    match frac {
        Some(f) => format!("{sign}{grouped}.{f}"),
        None => format!("{sign}{grouped}"),
    }
}

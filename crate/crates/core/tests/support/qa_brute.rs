//! Brute-force evaluator for the 90 reasoning templates.
//!
//! Works from the source table, the chart type and the palette only; never
//! from rendered marks. Order statistics are found by counting rather than
//! sorting, and every lookup is a linear scan.
//!
//! Conventions shared with the production answers: x labels run left to
//! right in table order, series (and pie segments) take palette colors in
//! table order, bars run group by group, argmax/argmin ties go to the
//! leftmost label, mode ties to the smallest value, differences are
//! absolute and numbers use the crate's display format.

use std::collections::BTreeMap;

use chartcorpus::number::format_number;
use chartcorpus::synth::{ChartType, Palette};
use chartcorpus::table::ChartReadyTable;

pub struct Data {
    pub ct: ChartType,
    pub xs: Vec<String>,
    pub names: Vec<String>,
    /// Series colors; pie segment colors for pies.
    pub colors: Vec<String>,
    pub v: Vec<Vec<f64>>,
}

impl Data {
    pub fn new(table: &ChartReadyTable, ct: ChartType, palette: Palette) -> Data {
        let xs = table.x_labels();
        let names = table.series_names();
        let v: Vec<Vec<f64>> = names
            .iter()
            .map(|s| xs.iter().map(|x| table.value(x, s).expect("complete table")).collect())
            .collect();
        let count = if ct == ChartType::Pie { xs.len() } else { names.len() };
        let colors = (0..count).map(|i| palette.color(i).name.to_string()).collect();
        Data {
            ct,
            xs,
            names,
            colors,
            v,
        }
    }

    fn n(&self) -> usize {
        self.xs.len()
    }

    fn k(&self) -> usize {
        self.names.len()
    }

    fn all(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for s in &self.v {
            for x in s {
                out.push(*x);
            }
        }
        out
    }

    /// Bars left to right: each x group in turn, series within a group.
    fn bars(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for x in 0..self.n() {
            for s in 0..self.k() {
                out.push(self.v[s][x]);
            }
        }
        out
    }

    fn group(&self, x: usize) -> Vec<f64> {
        (0..self.k()).map(|s| self.v[s][x]).collect()
    }
}

fn largest(v: &[f64]) -> f64 {
    let mut m = v[0];
    for x in v {
        if *x > m {
            m = *x;
        }
    }
    m
}

fn smallest(v: &[f64]) -> f64 {
    let mut m = v[0];
    for x in v {
        if *x < m {
            m = *x;
        }
    }
    m
}

fn total(v: &[f64]) -> f64 {
    let mut t = 0.0;
    for x in v {
        t += x;
    }
    t
}

fn average(v: &[f64]) -> f64 {
    total(v) / v.len() as f64
}

/// The `r`-th smallest value (0-based), by counting.
fn kth(v: &[f64], r: usize) -> f64 {
    for x in v {
        let below = v.iter().filter(|y| *y < x).count();
        let equal = v.iter().filter(|y| *y == x).count();
        if below <= r && r < below + equal {
            return *x;
        }
    }
    unreachable!("rank within range")
}

fn med(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        kth(v, n / 2)
    } else {
        (kth(v, n / 2 - 1) + kth(v, n / 2)) / 2.0
    }
}

fn most_frequent(v: &[f64]) -> f64 {
    let mut best: Option<(usize, f64)> = None;
    for x in v {
        let c = v.iter().filter(|y| *y == x).count();
        best = match best {
            Some((bc, bx)) if bc > c || (bc == c && bx <= *x) => Some((bc, bx)),
            _ => Some((c, *x)),
        };
    }
    best.expect("non-empty").1
}

fn first_index_of(v: &[f64], target: f64) -> usize {
    let mut i = 0;
    while v[i] != target {
        i += 1;
    }
    i
}

fn out(x: f64) -> Option<String> {
    if x.is_finite() {
        Some(format_number(x))
    } else {
        None
    }
}

fn div(a: f64, b: f64) -> Option<String> {
    if b == 0.0 {
        None
    } else {
        out(a / b)
    }
}

fn yes(b: bool) -> Option<String> {
    Some(String::from(if b { "Yes" } else { "No" }))
}

/// Answer for template `id` with `slots`, or `None` when it does not apply.
pub fn brute_answer(d: &Data, id: u8, slots: &BTreeMap<String, String>) -> Option<String> {
    let ct = d.ct;
    let (n, k) = (d.n(), d.k());
    let pie = ct == ChartType::Pie;
    let gb = ct == ChartType::GroupedBar;
    let bar = ct == ChartType::SimpleBar || gb;
    let line = ct == ChartType::LineSingle || ct == ChartType::LineMulti;
    let col = gb || ct == ChartType::LineMulti;
    let ser = !pie;
    let slot = |key: &str| slots.get(key).map(|s| s.as_str());
    let variant = slot("variant").unwrap_or("");
    let find = |list: &[String], key: &str| -> Option<usize> {
        let want = slot(key)?;
        list.iter().position(|s| s == want)
    };
    let color = |key: &str| if col { find(&d.colors, key) } else { None };
    let legend = |key: &str| find(&d.names, key);
    let x = |key: &str| find(&d.xs, key);
    let number = |key: &str| -> Option<f64> { slot(key)?.parse().ok() };
    let pair = |a: Option<usize>, b: Option<usize>| match (a, b) {
        (Some(a), Some(b)) if a != b => Some((a, b)),
        _ => None,
    };
    let bars = if bar { d.bars() } else { Vec::new() };
    let nb = bars.len();
    let all = d.all();

    match id {
        1 if gb && n >= 2 => out(d.group(1)[0]),
        2 if gb && n >= 2 => out(d.group(n - 2)[k - 1]),
        3 if gb && k >= 2 => out(d.group(n - 1)[k - 2]),
        4 if gb && k >= 2 => out(d.group(0)[k - 2]),
        5 if bar => out(bars[0]),
        6 if bar => out(bars[nb - 1]),
        7 if bar && nb >= 2 => out(bars[1]),
        8 if bar && nb >= 2 => out(bars[nb - 2]),
        9..=12 if bar && nb >= 2 => {
            let target = if id % 2 == 1 { largest(&bars) } else { smallest(&bars) };
            let hits: Vec<usize> = (0..nb).filter(|i| bars[*i] == target).collect();
            let b = if id <= 10 { hits[0] } else { hits[hits.len() - 1] };
            Some(d.xs[b / k].clone())
        }
        13 => out(d.v[color("color")?][0]),
        14 => out(d.v[color("color")?][n - 1]),
        15 if n >= 2 => out(d.v[color("color")?][1]),
        16 if n >= 2 => out(d.v[color("color")?][n - 2]),
        17 | 55 if pie => Some(d.xs[find(&d.colors, "color")?].clone()),
        17 | 55 => Some(d.names[color("color")?].clone()),
        18 if pie => Some(d.colors[x("legend")?].clone()),
        18 if col => Some(d.colors[legend("legend")?].clone()),
        19 if k == 1 => {
            let (i, j) = pair(x("x1"), x("x2"))?;
            let (a, b) = (d.v[0][i], d.v[0][j]);
            if a == b {
                None
            } else if a > b {
                Some(d.xs[i].clone())
            } else {
                Some(d.xs[j].clone())
            }
        }
        20 => {
            let by = number("n")?;
            if by == 0.0 {
                return None;
            }
            out((largest(&all) + smallest(&all)) / by)
        }
        21 if line => {
            let s = &d.v[legend("legend")?];
            Some(d.xs[first_index_of(s, largest(s))].clone())
        }
        22 if ser => {
            let s = &d.v[legend("legend")?];
            out(largest(s) - smallest(s))
        }
        23 if pie => {
            let t = number("value")?;
            let s = &d.v[0];
            if !s.contains(&t) || t >= largest(s) {
                return None;
            }
            out(s.iter().filter(|v| **v > t).sum())
        }
        24 if all.len() >= 3 => {
            let m = all.len();
            out(kth(&all, m - 1) + kth(&all, m - 2) + kth(&all, m - 3))
        }
        25 if ser && n >= 3 => {
            let s = &d.v[legend("legend")?];
            match variant {
                "median" => out(med(s)),
                "mode" => out(most_frequent(s)),
                _ => None,
            }
        }
        26 if ser => out(smallest(&d.v[legend("legend")?])),
        27 if ser => {
            let s = &d.v[legend("legend")?];
            match variant {
                "largest" => out(largest(s)),
                "smallest" => out(smallest(s)),
                _ => None,
            }
        }
        28 | 32 if ser && n >= 2 => {
            let s = &d.v[legend("legend")?];
            let want = slot("value")?;
            for i in 0..n {
                for j in i + 1..n {
                    let got = if id == 28 {
                        s[i] + s[j]
                    } else if s[i] != s[j] {
                        (s[i] - s[j]).abs()
                    } else {
                        continue;
                    };
                    if out(got).as_deref() == Some(want) {
                        return Some(format!("{} and {}", d.xs[i], d.xs[j]));
                    }
                }
            }
            None
        }
        29 if ser && n >= 3 => {
            let s = &d.v[legend("legend")?];
            out(kth(s, n - 2) + kth(s, 1))
        }
        30 if ser && n >= 2 => {
            let s = &d.v[legend("legend")?];
            // Rank by value, descending; equal values keep label order.
            let rank = |i: usize| (0..n).filter(|j| s[*j] > s[i] || (s[*j] == s[i] && *j < i)).count();
            (0..n).find(|i| rank(*i) == 1).map(|i| d.xs[i].clone())
        }
        31 if ser && n >= 4 && n % 2 == 0 => {
            let s = &d.v[legend("legend")?];
            out(kth(s, n / 2 - 1) + kth(s, n / 2))
        }
        33 if ser && n >= 2 => {
            let s = &d.v[legend("legend")?];
            let (i, j) = (x("x1")?, x("x2")?);
            if i >= j {
                return None;
            }
            out(average(&s[i..=j]))
        }
        34 if ser => {
            let s = &d.v[legend("legend")?];
            out((largest(s) + smallest(s)) / 2.0)
        }
        35 if ser => {
            let (a, b) = pair(legend("legend1"), legend("legend2"))?;
            out(average(&d.v[a]) + average(&d.v[b]))
        }
        36 if ser => {
            let (a, b) = pair(legend("legend1"), legend("legend2"))?;
            let (hi, lo) = (largest(&d.v[a]), smallest(&d.v[b]));
            match variant {
                "sum" => out(hi + lo),
                "difference" => out((hi - lo).abs()),
                _ => None,
            }
        }
        37 | 42 | 43 if ser => {
            let (a, b) = pair(legend("legend1"), legend("legend2"))?;
            let gaps: Vec<f64> = (0..n).map(|i| (d.v[a][i] - d.v[b][i]).abs()).collect();
            match (id, variant) {
                (37, "maximum") => Some(d.xs[first_index_of(&gaps, largest(&gaps))].clone()),
                (37, "minimum") => Some(d.xs[first_index_of(&gaps, smallest(&gaps))].clone()),
                (42, _) => out(largest(&gaps) + smallest(&gaps)),
                (43, "maximum") => out(largest(&gaps)),
                (43, "minimum") => out(smallest(&gaps)),
                _ => None,
            }
        }
        38 if ser => {
            let s = &d.v[legend("legend")?];
            Some(d.xs[first_index_of(s, smallest(s))].clone())
        }
        39 => {
            let target = match variant {
                "largest" => largest(&all),
                "smallest" => smallest(&all),
                _ => return None,
            };
            (0..n)
                .find(|i| (0..k).any(|s| d.v[s][*i] == target))
                .map(|i| d.xs[i].clone())
        }
        40 if ser && n >= 3 => out(d.v.iter().map(|s| med(s)).sum()),
        41 => {
            let t = number("value")?;
            if !all.contains(&t) || t >= largest(&all) {
                return None;
            }
            let above: Vec<f64> = all.iter().copied().filter(|v| *v > t).collect();
            out(average(&above))
        }
        44 if pie && n >= 2 => div(largest(&d.v[0]), smallest(&d.v[0])),
        45 if pie && n >= 2 => {
            let s = &d.v[0];
            match variant {
                "largest" => div(kth(s, n - 1), kth(s, n - 2)),
                "smallest" => div(kth(s, 1), kth(s, 0)),
                _ => None,
            }
        }
        46 if bar && nb >= 2 => out((bars[0] - bars[nb - 1]).abs()),
        47 if gb && n >= 2 => out(total(&d.group(1))),
        48 if gb => out(total(&d.group(n - 1))),
        49 if bar && nb >= 2 => div(bars[0], bars[1]),
        50 if gb => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            out((d.v[a][n - 1] - d.v[b][0]).abs())
        }
        51 if gb => out(average(&d.v[color("color")?])),
        52 if gb => {
            let t = number("N")?;
            Some(d.v[color("color")?].iter().filter(|v| **v > t).count().to_string())
        }
        53 if gb && n >= 2 => out(average(&d.group(n - 2))),
        54 if gb => {
            let t = number("N")?;
            Some(d.group(0).iter().filter(|v| **v > t).count().to_string())
        }
        56 => out(med(&d.v[color("color")?])),
        57 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            out((total(&d.v[a]) + total(&d.v[b])) / 2.0)
        }
        58 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            out((med(&d.v[a]) + med(&d.v[b])) / 2.0)
        }
        59 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            let gaps: Vec<f64> = (0..n).map(|i| (d.v[a][i] - d.v[b][i]).abs()).collect();
            out(smallest(&gaps))
        }
        60 if gb => div(d.group(0)[0], d.group(0)[k - 1]),
        61 => out(largest(&d.v[color("color")?])),
        62 => out(smallest(&d.v[color("color")?])),
        63 => out(total(&d.v[color("color")?])),
        64 if gb && n >= 2 => out((largest(&d.group(0)) - largest(&d.group(1))).abs()),
        65 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            out(d.v[a][0] + d.v[b][n - 1])
        }
        66 if gb && n >= 2 => {
            let s = &d.v[color("color")?];
            out(kth(s, 1) - kth(s, 0))
        }
        67 => {
            let s = &d.v[color("color")?];
            out((largest(s) + smallest(s)) / 2.0)
        }
        68 => out(d.v[color("color")?][x("x")?]),
        69 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            let i = x("x")?;
            let both = d.v[a][i] + d.v[b][i];
            match variant {
                "sum" => out(both),
                "average" => out(both / 2.0),
                _ => None,
            }
        }
        70 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            out(largest(&d.v[a]) + largest(&d.v[b]))
        }
        71 if col => {
            let pick = match variant {
                "highest" => {
                    let best = largest(&d.v.iter().map(|s| largest(s)).collect::<Vec<_>>());
                    (0..k).find(|s| largest(&d.v[*s]) == best)
                }
                "smallest" => {
                    let best = smallest(&d.v.iter().map(|s| smallest(s)).collect::<Vec<_>>());
                    (0..k).find(|s| smallest(&d.v[*s]) == best)
                }
                _ => None,
            }?;
            Some(d.colors[pick].clone())
        }
        72 => {
            let s = &d.v[color("color")?];
            let shared = (0..n).filter(|i| (0..n).any(|j| j != *i && s[j] == s[*i])).count();
            Some(shared.to_string())
        }
        73 if n >= 2 => {
            let s = &d.v[color("color")?];
            out(s[n - 1] + s[n - 2])
        }
        74 if all.len() >= 2 => out(kth(&all, 0) * kth(&all, 1)),
        75 => {
            let s = &d.v[color("color")?];
            out(smallest(s) + med(s))
        }
        76 if ct == ChartType::LineMulti => {
            let s = &d.v[color("color")?];
            Some(d.xs[first_index_of(s, largest(s))].clone())
        }
        77 if ct == ChartType::LineMulti && n >= 3 => out(average(&d.v[color("color")?][n - 3..])),
        78 => {
            let t = number("N")?;
            Some(d.v[color("color")?].iter().filter(|v| **v > t).count().to_string())
        }
        79 if gb => {
            let s = &d.v[color("color")?];
            let back = match variant {
                "second" => 2,
                "third" => 3,
                _ => return None,
            };
            if n < back {
                return None;
            }
            div(kth(s, n - 1), kth(s, n - back))
        }
        80 if gb && k >= 3 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            let c = color("color3")?;
            if c == a || c == b {
                return None;
            }
            yes(smallest(&d.v[a]) + smallest(&d.v[b]) > largest(&d.v[c]))
        }
        81 if gb => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            yes(med(&d.v[a]) > med(&d.v[b]))
        }
        82 if gb => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            yes(med(&d.v[a]) > largest(&d.v[b]))
        }
        83 if gb && n >= 2 => {
            let (i, j) = (x("x1")?, x("x2")?);
            if i >= j {
                return None;
            }
            let s = &d.v[color("color")?];
            out(s[i] * s[j])
        }
        84 if ct == ChartType::SimpleBar && nb >= 4 && nb % 2 == 0 => {
            let m = nb / 2;
            yes(bars[m - 1] + bars[m] > bars[0] + bars[nb - 1])
        }
        85 if gb => {
            let (a, b) = (color("color1")?, color("color2")?);
            let (i, j) = (x("x1")?, x("x2")?);
            if a == b && i == j {
                return None;
            }
            div(d.v[a][i], d.v[b][j])
        }
        86 if gb => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            yes(total(&d.v[a]) > total(&d.v[b]))
        }
        87 if gb && n >= 2 => {
            let (a, b) = pair(color("color1"), color("color2"))?;
            let low = |s: &[f64]| kth(s, 0) + kth(s, 1);
            out((low(&d.v[a]) - low(&d.v[b])).abs())
        }
        88 if gb && n >= 2 => {
            let s = &d.v[color("color")?];
            let low = kth(s, 0) + kth(s, 1);
            let high = kth(s, n - 1) + kth(s, n - 2);
            match variant {
                "sum of two smallest" => out(low),
                "sum of two largest" => out(high),
                "average of two smallest" => out(low / 2.0),
                "average of two largest" => out(high / 2.0),
                _ => None,
            }
        }
        89 if pie => {
            let (a, b) = pair(find(&d.colors, "color1"), find(&d.colors, "color2"))?;
            div(d.v[0][a], d.v[0][b])
        }
        90 if pie => Some(d.xs[find(&d.colors, "color")?].clone()),
        _ => None,
    }
}

/// Every slot assignment from the oracle's own domains, for templates whose
/// slots are colors, legends, x labels, divisors and variants. `None` for
/// templates with value or threshold slots.
pub fn brute_domain(d: &Data, id: u8) -> Option<Vec<BTreeMap<String, String>>> {
    let t = chartcorpus::tasks::qa::template(id)?;
    let pie = d.ct == ChartType::Pie;
    let legends = if pie { d.xs.clone() } else { d.names.clone() };
    let mut keys: Vec<(String, Vec<String>)> = Vec::new();
    if !t.variants.is_empty() {
        keys.push(("variant".into(), t.variants.iter().map(|s| s.to_string()).collect()));
    }
    let names = |prefix: &str, count: usize| -> Vec<String> {
        if count == 1 {
            vec![prefix.to_string()]
        } else {
            (1..=count).map(|i| format!("{prefix}{i}")).collect()
        }
    };
    use chartcorpus::tasks::SlotType as S;
    let count = |ty: S| t.slots.iter().filter(|s| **s == ty).count();
    if count(S::Value) + count(S::Threshold) > 0 {
        return None;
    }
    for key in names("color", count(S::Color)).into_iter().take(count(S::Color)) {
        keys.push((key, d.colors.clone()));
    }
    for key in names("legend", count(S::LegendLabel))
        .into_iter()
        .take(count(S::LegendLabel))
    {
        keys.push((key, legends.clone()));
    }
    for key in names("x", count(S::XAxisLabel)).into_iter().take(count(S::XAxisLabel)) {
        keys.push((key, d.xs.clone()));
    }
    if count(S::Divisor) > 0 {
        keys.push(("n".into(), (2..=5).map(|v: i32| v.to_string()).collect()));
    }
    let mut out = vec![BTreeMap::new()];
    for (key, values) in keys {
        let mut next = Vec::new();
        for partial in &out {
            for v in &values {
                let mut m = partial.clone();
                m.insert(key.clone(), v.clone());
                next.push(m);
            }
        }
        out = next;
    }
    Some(out)
}

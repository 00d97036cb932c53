//! Typed data tables and the preprocessing that turns arbitrary imported
//! tables into chart-ready ones.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::number::{format_number, parse_number};

/// Maximum number of rows a chart-ready table may hold.
pub const MAX_CHART_ROWS: usize = 8;

/// Maximum number of series kept when a grouping column is chosen.
pub const MAX_GROUPS: usize = 4;

const NUMERIC_SHARE: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("no rows survive preprocessing")]
    EmptyTable,
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedInput { row: usize, expected: usize, found: usize },
    #[error("column {0} has an empty name")]
    EmptyColumnName(usize),
    #[error("duplicate column name {0:?}")]
    DuplicateColumnName(String),
    #[error("cell ({row}, {column}) does not match the kind of its column")]
    CellKind { row: usize, column: usize },
    #[error("table has no numeric column")]
    NoNumericColumn,
    #[error("table has no categorical column")]
    NoCategoricalColumn,
    #[error("invalid chart-ready table: {0}")]
    NotChartReady(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Column {
    pub fn categorical(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical,
            unit: None,
        }
    }

    pub fn numeric(name: impl Into<String>, unit: Option<&str>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
            unit: unit.map(str::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    /// Canonical rendering: text verbatim, numbers via [`format_number`].
    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(v) => format_number(*v),
        }
    }
}

/// A rectangular table whose columns are either categorical or numeric.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    title: Option<String>,
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn new(title: Option<String>, columns: Vec<Column>, rows: Vec<Vec<Cell>>) -> Result<Self, TableError> {
        let mut seen = HashSet::new();
        for (i, c) in columns.iter().enumerate() {
            if c.name.trim().is_empty() {
                return Err(TableError::EmptyColumnName(i));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(TableError::DuplicateColumnName(c.name.clone()));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(TableError::RaggedInput {
                    row: r,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
            for (c, cell) in row.iter().enumerate() {
                let ok = match (columns[c].kind, cell) {
                    (ColumnKind::Numeric, Cell::Number(v)) => v.is_finite(),
                    (ColumnKind::Categorical, Cell::Text(_)) => true,
                    _ => false,
                };
                if !ok {
                    return Err(TableError::CellKind { row: r, column: c });
                }
            }
        }
        let title = title.filter(|t| !t.trim().is_empty());
        Ok(DataTable { title, columns, rows })
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn with_title(mut self, title: Option<String>) -> Self {
        self.title = title.filter(|t| !t.trim().is_empty());
        self
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn numeric_columns(&self) -> Vec<usize> {
        self.kind_columns(ColumnKind::Numeric)
    }

    pub fn categorical_columns(&self) -> Vec<usize> {
        self.kind_columns(ColumnKind::Categorical)
    }

    fn kind_columns(&self, kind: ColumnKind) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].kind == kind)
            .collect()
    }

    /// Header plus canonically rendered cells (no units).
    pub fn to_text_grid(&self) -> Vec<Vec<String>> {
        let mut grid = vec![self.columns.iter().map(|c| c.name.clone()).collect()];
        grid.extend(self.rows.iter().map(|r| r.iter().map(Cell::render).collect()));
        grid
    }

    /// Header plus cells rendered back the way an imported sheet would show
    /// them: full precision, with each numeric column's unit re-attached.
    pub fn to_raw_grid(&self) -> Vec<Vec<String>> {
        let mut grid = vec![self.columns.iter().map(|c| c.name.clone()).collect()];
        for row in &self.rows {
            grid.push(
                row.iter()
                    .zip(&self.columns)
                    .map(|(cell, col)| match cell {
                        Cell::Text(s) => s.clone(),
                        Cell::Number(v) => {
                            let body = format!("{v}");
                            match col.unit.as_deref() {
                                Some("%") => format!("{body}%"),
                                Some(u) => match body.strip_prefix('-') {
                                    Some(abs) => format!("-{u}{abs}"),
                                    None => format!("{u}{body}"),
                                },
                                None => body,
                            }
                        }
                    })
                    .collect(),
            );
        }
        grid
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut raw = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| TableError::Csv(e.to_string()))?;
            raw.push(rec.iter().map(str::to_string).collect());
        }
        infer_column_kinds(&raw)
    }

    pub fn from_json_str(s: &str) -> Result<Self, TableError> {
        let doc: TableJson = serde_json::from_str(s).map_err(|e| TableError::Json(e.to_string()))?;
        doc.into_table()
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(TableJson::from_table(self)).expect("table json")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&TableJson::from_table(self)).expect("table json")
    }
}

impl Serialize for DataTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableJson::from_table(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DataTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        TableJson::deserialize(d)?
            .into_table()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ColumnJson {
    Name(String),
    Full(Column),
}

/// `{"title"?, "columns": [...], "rows": [[...]]}`. Columns are either bare
/// names (kinds are then inferred) or `{name, kind, unit?}` objects.
#[derive(Serialize, Deserialize)]
struct TableJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    columns: Vec<ColumnJson>,
    rows: Vec<Vec<Value>>,
}

impl TableJson {
    fn from_table(t: &DataTable) -> Self {
        TableJson {
            title: t.title.clone(),
            columns: t.columns.iter().cloned().map(ColumnJson::Full).collect(),
            rows: t
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| match c {
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Number(v) => serde_json::Number::from_f64(*v)
                                .map(Value::Number)
                                .unwrap_or(Value::Null),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    fn into_table(self) -> Result<DataTable, TableError> {
        let typed = self.columns.iter().all(|c| matches!(c, ColumnJson::Full(_)));
        if !typed {
            let header: Vec<String> = self
                .columns
                .iter()
                .map(|c| match c {
                    ColumnJson::Name(n) => n.clone(),
                    ColumnJson::Full(c) => c.name.clone(),
                })
                .collect();
            let mut raw = vec![header];
            for row in &self.rows {
                raw.push(row.iter().map(json_cell_text).collect());
            }
            return Ok(infer_column_kinds(&raw)?.with_title(self.title));
        }
        let columns: Vec<Column> = self
            .columns
            .into_iter()
            .map(|c| match c {
                ColumnJson::Full(c) => c,
                ColumnJson::Name(_) => unreachable!(),
            })
            .collect();
        let mut rows = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.into_iter().enumerate() {
            let mut cells = Vec::with_capacity(row.len());
            for (c, v) in row.into_iter().enumerate() {
                let kind = columns.get(c).map(|c| c.kind);
                let cell = match (kind, v) {
                    (Some(ColumnKind::Numeric), Value::Number(n)) => Cell::Number(n.as_f64().unwrap_or(f64::NAN)),
                    (Some(ColumnKind::Numeric), Value::String(s)) => match parse_number(&s) {
                        Some(p) => Cell::Number(p.value),
                        None => return Err(TableError::CellKind { row: r, column: c }),
                    },
                    (_, v) => Cell::Text(json_cell_text(&v)),
                };
                cells.push(cell);
            }
            rows.push(cells);
        }
        DataTable::new(self.title, columns, rows)
    }
}

fn json_cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn is_year_like(s: &str) -> bool {
    s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit())
}

/// Assigns each column a kind from its content and converts numeric cells.
///
/// `raw[0]` is the header. A column is numeric when at least 90% of its
/// non-empty cells parse as numbers; columns made only of four-digit years
/// stay categorical. Rows whose numeric cells fail to parse are dropped.
pub fn infer_column_kinds(raw: &[Vec<String>]) -> Result<DataTable, TableError> {
    let Some((header, body)) = raw.split_first() else {
        return Err(TableError::EmptyTable);
    };
    if header.is_empty() {
        return Err(TableError::EmptyTable);
    }
    for (i, row) in body.iter().enumerate() {
        if row.len() != header.len() {
            return Err(TableError::RaggedInput {
                row: i + 1,
                expected: header.len(),
                found: row.len(),
            });
        }
    }
    if body.is_empty() {
        return Err(TableError::EmptyTable);
    }

    let mut columns = Vec::with_capacity(header.len());
    let mut parsed: Vec<Vec<Option<f64>>> = Vec::with_capacity(header.len());
    for (c, name) in header.iter().enumerate() {
        let cells: Vec<&str> = body.iter().map(|r| r[c].trim()).collect();
        let non_empty: Vec<&str> = cells.iter().copied().filter(|s| !s.is_empty()).collect();
        let numbers: Vec<Option<_>> = cells.iter().map(|s| parse_number(s)).collect();
        let hits = numbers.iter().filter(|n| n.is_some()).count();
        let years = !non_empty.is_empty() && non_empty.iter().all(|s| is_year_like(s));
        let numeric = hits > 0 && !years && hits as f64 >= NUMERIC_SHARE * non_empty.len() as f64;
        if numeric {
            let mut counts: Vec<(String, usize)> = Vec::new();
            for unit in numbers.iter().flatten().filter_map(|n| n.unit.clone()) {
                match counts.iter_mut().find(|(u, _)| *u == unit) {
                    Some((_, n)) => *n += 1,
                    None => counts.push((unit, 1)),
                }
            }
            let unit = counts
                .iter()
                .fold(None::<&(String, usize)>, |best, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                })
                .map(|(u, _)| u.clone());
            columns.push(Column {
                name: name.trim().to_string(),
                kind: ColumnKind::Numeric,
                unit,
            });
            parsed.push(numbers.into_iter().map(|n| n.map(|p| p.value)).collect());
        } else {
            columns.push(Column::categorical(name.trim()));
            parsed.push(vec![None; cells.len()]);
        }
    }

    let mut rows = Vec::new();
    'rows: for (r, row) in body.iter().enumerate() {
        let mut cells = Vec::with_capacity(row.len());
        for (c, col) in columns.iter().enumerate() {
            match col.kind {
                ColumnKind::Numeric => match parsed[c][r] {
                    Some(v) => cells.push(Cell::Number(v)),
                    None => continue 'rows,
                },
                ColumnKind::Categorical => cells.push(Cell::Text(row[c].trim().to_string())),
            }
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(TableError::EmptyTable);
    }
    DataTable::new(None, columns, rows)
}

/// A projection of a table onto one categorical x column, an optional
/// categorical group column and one numeric y column, small enough to chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChartReadyJson", into = "ChartReadyJson")]
pub struct ChartReadyTable {
    base: DataTable,
    x_column: usize,
    group_column: Option<usize>,
    y_column: usize,
}

#[derive(Serialize, Deserialize)]
struct ChartReadyJson {
    base: DataTable,
    x_column: usize,
    #[serde(default)]
    group_column: Option<usize>,
    y_column: usize,
}

impl TryFrom<ChartReadyJson> for ChartReadyTable {
    type Error = TableError;
    fn try_from(j: ChartReadyJson) -> Result<Self, TableError> {
        ChartReadyTable::new(j.base, j.x_column, j.group_column, j.y_column)
    }
}

impl From<ChartReadyTable> for ChartReadyJson {
    fn from(t: ChartReadyTable) -> Self {
        ChartReadyJson {
            base: t.base,
            x_column: t.x_column,
            group_column: t.group_column,
            y_column: t.y_column,
        }
    }
}

impl ChartReadyTable {
    pub fn new(
        base: DataTable,
        x_column: usize,
        group_column: Option<usize>,
        y_column: usize,
    ) -> Result<Self, TableError> {
        let bad = |m: &str| Err(TableError::NotChartReady(m.to_string()));
        let n = base.columns.len();
        if x_column >= n || y_column >= n || group_column.is_some_and(|g| g >= n) {
            return bad("column index out of range");
        }
        if base.columns[x_column].kind != ColumnKind::Categorical
            || group_column.is_some_and(|g| base.columns[g].kind != ColumnKind::Categorical)
        {
            return bad("x and group columns must be categorical");
        }
        if base.columns[y_column].kind != ColumnKind::Numeric {
            return bad("y column must be numeric");
        }
        if group_column == Some(x_column) || x_column == y_column {
            return bad("x, group and y columns must differ");
        }
        if base.rows.is_empty() {
            return Err(TableError::EmptyTable);
        }
        if base.rows.len() > MAX_CHART_ROWS {
            return bad("more than 8 rows");
        }
        let mut keys = HashSet::new();
        for row in &base.rows {
            let x = row[x_column].render();
            if x.trim().is_empty() {
                return bad("empty x label");
            }
            let g = group_column.map(|g| row[g].render());
            if g.as_ref().is_some_and(|g| g.trim().is_empty()) {
                return bad("empty group label");
            }
            if !keys.insert((x, g)) {
                return bad("duplicate (x, group) pair");
            }
        }
        Ok(ChartReadyTable {
            base,
            x_column,
            group_column,
            y_column,
        })
    }

    /// Builds a single-series table from `(label, value)` pairs.
    pub fn simple(title: Option<&str>, x_name: &str, y: Column, points: &[(&str, f64)]) -> Result<Self, TableError> {
        let rows = points
            .iter()
            .map(|(x, v)| vec![Cell::text(*x), Cell::Number(*v)])
            .collect();
        let base = DataTable::new(title.map(str::to_string), vec![Column::categorical(x_name), y], rows)?;
        ChartReadyTable::new(base, 0, None, 1)
    }

    /// Builds a grouped table from `(x, group, value)` triples.
    pub fn grouped(
        title: Option<&str>,
        x_name: &str,
        group_name: &str,
        y: Column,
        points: &[(&str, &str, f64)],
    ) -> Result<Self, TableError> {
        let rows = points
            .iter()
            .map(|(x, g, v)| vec![Cell::text(*x), Cell::text(*g), Cell::Number(*v)])
            .collect();
        let base = DataTable::new(
            title.map(str::to_string),
            vec![Column::categorical(x_name), Column::categorical(group_name), y],
            rows,
        )?;
        ChartReadyTable::new(base, 0, Some(1), 2)
    }

    pub fn base(&self) -> &DataTable {
        &self.base
    }

    pub fn x_column(&self) -> usize {
        self.x_column
    }

    pub fn group_column(&self) -> Option<usize> {
        self.group_column
    }

    pub fn y_column(&self) -> usize {
        self.y_column
    }

    pub fn is_grouped(&self) -> bool {
        self.group_column.is_some()
    }

    pub fn x_name(&self) -> &str {
        &self.base.columns[self.x_column].name
    }

    pub fn y_name(&self) -> &str {
        &self.base.columns[self.y_column].name
    }

    pub fn y_unit(&self) -> Option<&str> {
        self.base.columns[self.y_column].unit.as_deref()
    }

    pub fn title(&self) -> Option<&str> {
        self.base.title()
    }

    pub fn row_count(&self) -> usize {
        self.base.rows.len()
    }

    /// Distinct x labels in first-appearance order.
    pub fn x_labels(&self) -> Vec<String> {
        distinct(self.base.rows.iter().map(|r| r[self.x_column].render()))
    }

    /// Series names in first-appearance order; the y column name when
    /// ungrouped.
    pub fn series_names(&self) -> Vec<String> {
        match self.group_column {
            Some(g) => distinct(self.base.rows.iter().map(|r| r[g].render())),
            None => vec![self.y_name().to_string()],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.base
            .rows
            .iter()
            .map(|r| r[self.y_column].as_number().expect("numeric y"))
            .collect()
    }

    /// `(x, series, value)` triples in row order.
    pub fn triples(&self) -> Vec<(String, String, f64)> {
        let y_name = self.y_name().to_string();
        self.base
            .rows
            .iter()
            .map(|r| {
                (
                    r[self.x_column].render(),
                    self.group_column.map_or_else(|| y_name.clone(), |g| r[g].render()),
                    r[self.y_column].as_number().expect("numeric y"),
                )
            })
            .collect()
    }

    pub fn value(&self, x: &str, series: &str) -> Option<f64> {
        self.triples()
            .into_iter()
            .find(|(tx, ts, _)| tx == x && ts == series)
            .map(|(_, _, v)| v)
    }

    /// Wide layout: the x column followed by one numeric column per series.
    /// Ungrouped tables keep their two columns. Incomplete x rows are
    /// dropped.
    pub fn to_wide(&self) -> DataTable {
        let series = self.series_names();
        let y = &self.base.columns[self.y_column];
        let mut columns = vec![Column::categorical(self.x_name())];
        for s in &series {
            columns.push(Column {
                name: s.clone(),
                kind: ColumnKind::Numeric,
                unit: y.unit.clone(),
            });
        }
        let lookup: HashMap<(String, String), f64> = self.triples().into_iter().map(|(x, s, v)| ((x, s), v)).collect();
        let rows = self
            .x_labels()
            .into_iter()
            .filter_map(|x| {
                let mut row = vec![Cell::Text(x.clone())];
                for s in &series {
                    row.push(Cell::Number(*lookup.get(&(x.clone(), s.clone()))?));
                }
                Some(row)
            })
            .collect();
        DataTable::new(self.base.title.clone(), columns, rows).expect("wide table from valid chart-ready table")
    }
}

fn distinct(items: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    items.filter(|s| seen.insert(s.clone())).collect()
}

/// Splits a table into chart-ready tables.
///
/// One numeric y column and one categorical x column are drawn from the
/// seed, plus (half of the time, when a second categorical column exists) a
/// grouping column. Long results are cut into consecutive windows of at most
/// [`MAX_CHART_ROWS`] rows.
pub fn decompose(table: &DataTable, rng_seed: u64) -> Result<Vec<ChartReadyTable>, TableError> {
    let numeric = table.numeric_columns();
    let categorical = table.categorical_columns();
    if numeric.is_empty() {
        return Err(TableError::NoNumericColumn);
    }
    if categorical.is_empty() {
        return Err(TableError::NoCategoricalColumn);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let y = *numeric.choose(&mut rng).expect("non-empty");
    let mut cats = categorical.clone();
    cats.shuffle(&mut rng);
    let x = cats[0];
    let group = if cats.len() >= 2 && rng.gen_bool(0.5) {
        Some(cats[1])
    } else {
        None
    };

    let y_col = table.columns[y].clone();
    if let Some(g) = group {
        if let Some(out) = decompose_grouped(table, x, g, &y_col, y)? {
            return Ok(out);
        }
    }

    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for row in &table.rows {
        let label = row[x].render();
        if label.trim().is_empty() || !seen.insert(label.clone()) {
            continue;
        }
        points.push((label, row[y].clone()));
    }
    if points.is_empty() {
        return Err(TableError::EmptyTable);
    }
    points
        .chunks(MAX_CHART_ROWS)
        .map(|chunk| {
            let rows = chunk
                .iter()
                .map(|(l, v)| vec![Cell::Text(l.clone()), v.clone()])
                .collect();
            let base = DataTable::new(table.title.clone(), vec![table.columns[x].clone(), y_col.clone()], rows)?;
            ChartReadyTable::new(base, 0, None, 1)
        })
        .collect()
}

fn decompose_grouped(
    table: &DataTable,
    x: usize,
    g: usize,
    y_col: &Column,
    y: usize,
) -> Result<Option<Vec<ChartReadyTable>>, TableError> {
    let mut cells: BTreeMap<(String, String), Cell> = BTreeMap::new();
    let mut xs = Vec::new();
    let mut groups = Vec::new();
    for row in &table.rows {
        let (xl, gl) = (row[x].render(), row[g].render());
        if xl.trim().is_empty() || gl.trim().is_empty() {
            continue;
        }
        if !xs.contains(&xl) {
            xs.push(xl.clone());
        }
        if !groups.contains(&gl) {
            groups.push(gl.clone());
        }
        cells.entry((xl, gl)).or_insert_with(|| row[y].clone());
    }
    groups.truncate(MAX_GROUPS);
    if groups.len() < 2 {
        return Ok(None);
    }
    let complete: Vec<String> = xs
        .into_iter()
        .filter(|xl| groups.iter().all(|gl| cells.contains_key(&(xl.clone(), gl.clone()))))
        .collect();
    if complete.is_empty() {
        return Ok(None);
    }
    let per_window = MAX_CHART_ROWS / groups.len();
    let out = complete
        .chunks(per_window)
        .map(|chunk| {
            let mut rows = Vec::new();
            for xl in chunk {
                for gl in &groups {
                    rows.push(vec![
                        Cell::Text(xl.clone()),
                        Cell::Text(gl.clone()),
                        cells[&(xl.clone(), gl.clone())].clone(),
                    ]);
                }
            }
            let base = DataTable::new(
                table.title.clone(),
                vec![table.columns[x].clone(), table.columns[g].clone(), y_col.clone()],
                rows,
            )?;
            ChartReadyTable::new(base, 0, Some(1), 2)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn separators_are_stripped() {
        let t = infer_column_kinds(&grid(&[&["year", "pop"], &["2001", "1,200"], &["2002", "1,350"]])).unwrap();
        assert_eq!(t.columns()[0].kind, ColumnKind::Categorical);
        assert_eq!(t.columns()[1].kind, ColumnKind::Numeric);
        let pop: Vec<f64> = t.rows().iter().map(|r| r[1].as_number().unwrap()).collect();
        assert_eq!(pop, vec![1200.0, 1350.0]);
    }

    #[test]
    fn text_only_column_is_categorical() {
        let t = infer_column_kinds(&grid(&[&["name"], &["a"], &["b"]])).unwrap();
        assert_eq!(t.columns().len(), 1);
        assert_eq!(t.columns()[0].kind, ColumnKind::Categorical);
    }

    #[test]
    fn percent_unit_recorded() {
        let t = infer_column_kinds(&grid(&[&["share"], &["5%"], &["7%"], &["9%"]])).unwrap();
        let col = &t.columns()[0];
        assert_eq!(col.kind, ColumnKind::Numeric);
        assert_eq!(col.unit.as_deref(), Some("%"));
        let v: Vec<f64> = t.rows().iter().map(|r| r[0].as_number().unwrap()).collect();
        assert_eq!(v, vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn footnote_cells_drop_rows() {
        let mut rows = vec![vec!["k".to_string(), "v".to_string()]];
        for i in 0..10 {
            rows.push(vec![format!("r{i}"), i.to_string()]);
        }
        rows.push(vec!["note".into(), "n/a".into()]);
        let t = infer_column_kinds(&rows).unwrap();
        assert_eq!(t.columns()[1].kind, ColumnKind::Numeric);
        assert_eq!(t.rows().len(), 10);
    }

    #[test]
    fn errors() {
        assert_eq!(
            infer_column_kinds(&grid(&[&["a", "b"], &["1"]])),
            Err(TableError::RaggedInput {
                row: 1,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(infer_column_kinds(&grid(&[&["a"]])), Err(TableError::EmptyTable));
        let t = infer_column_kinds(&grid(&[&["a", "v"], &["x", ""], &["y", "2"]])).unwrap();
        assert_eq!(t.rows().len(), 1);
        assert!(matches!(
            infer_column_kinds(&grid(&[&["a", "a"], &["x", "1"]])),
            Err(TableError::DuplicateColumnName(_))
        ));
    }

    fn long_table(n: usize) -> DataTable {
        let mut raw = vec![vec!["city".to_string(), "sales".to_string()]];
        for i in 0..n {
            raw.push(vec![format!("c{i}"), format!("{}", i * 3)]);
        }
        infer_column_kinds(&raw).unwrap()
    }

    #[test]
    fn ten_rows_split_eight_two() {
        let out = decompose(&long_table(10), 3).unwrap();
        let sizes: Vec<usize> = out.iter().map(|t| t.row_count()).collect();
        assert_eq!(sizes, vec![8, 2]);
        assert_eq!(out[1].x_labels(), vec!["c8", "c9"]);
    }

    #[test]
    fn decompose_requires_kinds() {
        let t = infer_column_kinds(&grid(&[&["name"], &["a"]])).unwrap();
        assert_eq!(decompose(&t, 0), Err(TableError::NoNumericColumn));
        let t = infer_column_kinds(&grid(&[&["v"], &["1"]])).unwrap();
        assert_eq!(decompose(&t, 0), Err(TableError::NoCategoricalColumn));
    }

    #[test]
    fn decompose_is_deterministic() {
        let t = infer_column_kinds(&grid(&[
            &["country", "sector", "gdp", "jobs"],
            &["A", "farm", "1", "10"],
            &["A", "tech", "2", "20"],
            &["B", "farm", "3", "30"],
        ]))
        .unwrap();
        for seed in 0..20 {
            let a = decompose(&t, seed).unwrap();
            let b = decompose(&t, seed).unwrap();
            assert_eq!(a, b);
            for out in &a {
                assert!(out.row_count() <= MAX_CHART_ROWS);
                assert_eq!(out.base().numeric_columns().len(), 1);
            }
        }
    }

    #[test]
    fn grouped_drops_incomplete_x() {
        let t = infer_column_kinds(&grid(&[
            &["country", "sector", "gdp"],
            &["A", "farm", "1"],
            &["A", "tech", "2"],
            &["B", "farm", "3"],
            &["C", "farm", "4"],
            &["C", "tech", "5"],
        ]))
        .unwrap();
        let grouped = (0..50)
            .flat_map(|s| decompose(&t, s).unwrap())
            .find(|c| c.is_grouped())
            .expect("some seed groups");
        let xs = grouped.x_labels();
        if grouped.x_name() == "country" {
            assert_eq!(xs, vec!["A", "C"]);
        }
        assert_eq!(grouped.to_wide().rows().len(), grouped.x_labels().len());
    }

    #[test]
    fn json_round_trip_and_untyped_import() {
        let t = long_table(3).with_title(Some("Sales".into()));
        let back = DataTable::from_json_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
        let untyped = r#"{"columns":["k","v"],"rows":[["a","5%"],["b",7]]}"#;
        let t = DataTable::from_json_str(untyped).unwrap();
        assert_eq!(t.columns()[1].unit.as_deref(), Some("%"));
        assert_eq!(t.rows()[1][1], Cell::Number(7.0));
    }

    #[test]
    fn csv_import() {
        let csv = "name,amount\n\"Smith, J\",\"$1,000\"\nLee,$20\n";
        let t = DataTable::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(t.rows()[0][0], Cell::text("Smith, J"));
        assert_eq!(t.rows()[0][1], Cell::Number(1000.0));
        assert_eq!(t.columns()[1].unit.as_deref(), Some("$"));
        assert!(matches!(
            DataTable::from_csv_reader("a,b\n1\n".as_bytes()),
            Err(TableError::RaggedInput { .. })
        ));
    }
}

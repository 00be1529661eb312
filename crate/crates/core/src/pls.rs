//! Partial Latin squares as sets of (row, column, symbol) triples, plus the
//! `.pls` grid text format.

use std::fmt;

use thiserror::Error;

/// A point of `[n]^3`: symbol `symbol` placed at cell `(row, col)`.
///
/// Coordinates are 1-based, matching the text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub row: u16,
    pub col: u16,
    pub symbol: u16,
}

impl Triple {
    pub const fn new(row: u16, col: u16, symbol: u16) -> Self {
        Triple { row, col, symbol }
    }

    /// Coordinate along axis `d` (0 = row, 1 = column, 2 = symbol), 1-based.
    pub fn coord(&self, d: usize) -> u16 {
        match d {
            0 => self.row,
            1 => self.col,
            2 => self.symbol,
            _ => panic!("axis {d} out of range"),
        }
    }

    pub fn in_range(&self, n: usize) -> bool {
        [self.row, self.col, self.symbol]
            .iter()
            .all(|&c| c >= 1 && (c as usize) <= n)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.row, self.col, self.symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlsError {
    #[error("grid length must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("grid length {0} exceeds the supported maximum of 255")]
    GridTooLarge(usize),
    #[error("triple {0} is outside [1, {1}]^3")]
    OutOfRange(Triple, usize),
    #[error("cell ({0}, {1}) is assigned more than once")]
    DuplicateCell(u16, u16),
    #[error("Latin square condition violated by {0} and {1}")]
    LatinViolation(Triple, Triple),
    #[error("{0} appears in both sets")]
    NotDisjoint(Triple),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid partial Latin square: {0}")]
    Invalid(#[from] PlsError),
}

/// Number of coordinates in which `v` and `w` differ.
pub fn hamming_distance(v: Triple, w: Triple) -> u8 {
    (v.row != w.row) as u8 + (v.col != w.col) as u8 + (v.symbol != w.symbol) as u8
}

/// Tracks which (row, col), (row, symbol) and (col, symbol) pairs are taken.
/// Two triples are at distance <= 1 exactly when they share one of these.
struct Occupancy {
    n: usize,
    cell: Vec<Option<Triple>>,
    row_sym: Vec<Option<Triple>>,
    col_sym: Vec<Option<Triple>>,
}

impl Occupancy {
    fn new(n: usize) -> Self {
        Occupancy {
            n,
            cell: vec![None; n * n],
            row_sym: vec![None; n * n],
            col_sym: vec![None; n * n],
        }
    }

    fn keys(&self, t: Triple) -> [usize; 3] {
        let (r, c, s) = (t.row as usize - 1, t.col as usize - 1, t.symbol as usize - 1);
        [r * self.n + c, r * self.n + s, c * self.n + s]
    }

    /// First recorded triple that conflicts with `t`, if any.
    fn conflict(&self, t: Triple) -> Option<Triple> {
        let [rc, rs, cs] = self.keys(t);
        self.cell[rc].or(self.row_sym[rs]).or(self.col_sym[cs])
    }

    fn add(&mut self, t: Triple) {
        let [rc, rs, cs] = self.keys(t);
        self.cell[rc] = Some(t);
        self.row_sym[rs] = Some(t);
        self.col_sym[cs] = Some(t);
    }
}

fn check_range(n: usize, triples: &[Triple]) -> Result<(), PlsError> {
    match triples.iter().find(|t| !t.in_range(n)) {
        Some(&t) => Err(PlsError::OutOfRange(t, n)),
        None => Ok(()),
    }
}

/// First pair of triples in `triples` at Hamming distance below two.
fn first_conflict(n: usize, triples: &[Triple]) -> Option<(Triple, Triple)> {
    let mut occ = Occupancy::new(n);
    for &t in triples {
        if let Some(prev) = occ.conflict(t) {
            return Some((prev, t));
        }
        occ.add(t);
    }
    None
}

/// True iff every pair of triples is at Hamming distance at least two.
pub fn is_pls_set(n: usize, triples: &[Triple]) -> Result<bool, PlsError> {
    check_range(n, triples)?;
    Ok(first_conflict(n, triples).is_none())
}

/// True iff every triple of `s` is at distance at least two from every
/// triple of `l`. The two sets must be disjoint.
pub fn are_compatible(n: usize, s: &[Triple], l: &[Triple]) -> Result<bool, PlsError> {
    check_range(n, s)?;
    check_range(n, l)?;
    let given: std::collections::HashSet<Triple> = l.iter().copied().collect();
    if let Some(&t) = s.iter().find(|t| given.contains(t)) {
        return Err(PlsError::NotDisjoint(t));
    }
    let mut occ = Occupancy::new(n);
    for &t in l {
        occ.add(t);
    }
    Ok(s.iter().all(|&t| occ.conflict(t).is_none()))
}

/// A partial Latin square: the pre-assigned triples of an extension problem.
///
/// Triples are kept sorted by cell, so two instances with the same content
/// compare equal regardless of construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlsInstance {
    n: usize,
    given: Vec<Triple>,
}

impl PlsInstance {
    pub fn new(n: usize, mut given: Vec<Triple>) -> Result<Self, PlsError> {
        if n < 2 {
            return Err(PlsError::GridTooSmall(n));
        }
        if n > 255 {
            return Err(PlsError::GridTooLarge(n));
        }
        check_range(n, &given)?;
        given.sort();
        if let Some(w) = given.windows(2).find(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col)) {
            return Err(PlsError::DuplicateCell(w[1].row, w[1].col));
        }
        if let Some((a, b)) = first_conflict(n, &given) {
            return Err(PlsError::LatinViolation(a, b));
        }
        Ok(PlsInstance { n, given })
    }

    pub fn empty(n: usize) -> Result<Self, PlsError> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn given(&self) -> &[Triple] {
        &self.given
    }

    pub fn len(&self) -> usize {
        self.given.len()
    }

    pub fn is_empty(&self) -> bool {
        self.given.is_empty()
    }

    /// Row-major grid of symbols, 0 for empty cells.
    pub fn to_grid(&self) -> Vec<u16> {
        let mut grid = vec![0u16; self.n * self.n];
        for t in &self.given {
            grid[(t.row as usize - 1) * self.n + (t.col as usize - 1)] = t.symbol;
        }
        grid
    }

    /// Builds an instance from a row-major grid (0 = empty).
    pub fn from_grid(n: usize, grid: &[u16]) -> Result<Self, PlsError> {
        assert_eq!(grid.len(), n * n, "grid must have n*n entries");
        let given = grid
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(i, &s)| Triple::new((i / n + 1) as u16, (i % n + 1) as u16, s))
            .collect();
        Self::new(n, given)
    }

    /// The union of this instance with an extension `s`, validated as a PLS.
    pub fn extended(&self, s: &[Triple]) -> Result<PlsInstance, PlsError> {
        let mut all = self.given.clone();
        all.extend_from_slice(s);
        PlsInstance::new(self.n, all)
    }

    /// True when every cell is filled.
    pub fn is_complete(&self) -> bool {
        self.given.len() == self.n * self.n
    }
}

/// Reads a `.pls` grid without checking the Latin square condition.
///
/// Returns `(n, row-major grid)`.
pub fn parse_grid(text: &str) -> Result<(usize, Vec<u16>), ParseError> {
    let malformed = |line: usize, reason: String| ParseError::Malformed { line, reason };
    if !text.ends_with('\n') {
        let last = text.lines().count().max(1);
        return Err(malformed(last, "missing trailing newline".into()));
    }
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(1, "empty input".into()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| malformed(1, format!("expected grid length, found {header:?}")))?;
    if n < 2 {
        return Err(PlsError::GridTooSmall(n).into());
    }
    if n > 255 {
        return Err(PlsError::GridTooLarge(n).into());
    }
    let mut grid = Vec::with_capacity(n * n);
    for row in 0..n {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| malformed(line_no, format!("expected {n} rows, found {row}")))?;
        let before = grid.len();
        for tok in line.split_whitespace() {
            let v: u16 = tok
                .parse()
                .map_err(|_| malformed(line_no, format!("not a symbol: {tok:?}")))?;
            if v as usize > n {
                return Err(malformed(line_no, format!("symbol {v} exceeds {n}")));
            }
            grid.push(v);
        }
        if grid.len() - before != n {
            return Err(malformed(
                line_no,
                format!("expected {n} entries, found {}", grid.len() - before),
            ));
        }
    }
    if let Some((i, extra)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(malformed(n + 2 + i, format!("unexpected trailing content {extra:?}")));
    }
    Ok((n, grid))
}

/// Parses and validates a `.pls` instance.
pub fn parse_instance(text: &str) -> Result<PlsInstance, ParseError> {
    let (n, grid) = parse_grid(text)?;
    Ok(PlsInstance::from_grid(n, &grid)?)
}

pub fn serialize_grid(n: usize, grid: &[u16]) -> String {
    let mut out = format!("{n}\n");
    for row in grid.chunks(n) {
        let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn serialize_instance(inst: &PlsInstance) -> String {
    serialize_grid(inst.n(), &inst.to_grid())
}

//! Grid (arc) presentations of Legendrian fronts.
//!
//! A grid of size `g` carries one X and one O marker in every column and
//! every row. Column `i` holds its X at row `x[i]` and its O at row `o[i]`;
//! rows are counted from the bottom. The knot runs vertically from X to O
//! inside each column and horizontally from O to X inside each row, with
//! vertical segments passing over horizontal ones. Rotating the grid 45
//! degrees counterclockwise gives the front: a cell `(c, r)` lands at
//! `(c - r, c + r)` in `(x, z)` coordinates, NW-type corners become left
//! cusps and SE-type corners become right cusps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Auto,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDiagram {
    pub g: usize,
    pub x: Vec<usize>,
    pub o: Vec<usize>,
    #[serde(default)]
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    X,
    O,
}

/// A marker visited while walking a component in its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub col: usize,
    pub row: usize,
    pub marker: Marker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerKind {
    LeftCusp,
    RightCusp,
    /// Local maximum or minimum of the front; no cusp.
    Smooth,
}

/// A crossing of a vertical segment (column) over a horizontal one (row).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCrossing {
    pub col: usize,
    pub row: usize,
    pub sign: i32,
}

fn check_perm(field: &'static str, v: &[usize], g: usize) -> Result<()> {
    let mut seen = vec![usize::MAX; g];
    for (col, &row) in v.iter().enumerate() {
        if row >= g {
            return Err(Error::OutOfRange { field, column: col, value: row, size: g });
        }
        if seen[row] != usize::MAX {
            return Err(Error::NotPermutation { field, value: row, first: seen[row], second: col });
        }
        seen[row] = col;
    }
    Ok(())
}

/// Parses a grid from its JSON form and validates it as a knot.
pub fn parse_grid(text: &str) -> Result<GridDiagram> {
    parse_grid_with(text, false)
}

/// Parses a grid; links are accepted only when `allow_links` is set.
pub fn parse_grid_with(text: &str, allow_links: bool) -> Result<GridDiagram> {
    let d: GridDiagram = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    d.validate(allow_links)?;
    Ok(d)
}

impl GridDiagram {
    /// Builds and validates a knot grid with the default orientation.
    pub fn new(x: Vec<usize>, o: Vec<usize>) -> Result<Self> {
        let d = GridDiagram { g: x.len(), x, o, orientation: Orientation::Auto };
        d.validate(false)?;
        Ok(d)
    }

    pub fn new_link(x: Vec<usize>, o: Vec<usize>) -> Result<Self> {
        let d = GridDiagram { g: x.len(), x, o, orientation: Orientation::Auto };
        d.validate(true)?;
        Ok(d)
    }

    /// The 2x2 grid of the standard tb = -1 unknot.
    pub fn unknot() -> Self {
        GridDiagram { g: 2, x: vec![1, 0], o: vec![0, 1], orientation: Orientation::Auto }
    }

    pub fn validate(&self, allow_links: bool) -> Result<()> {
        if self.g == 0 {
            return Err(Error::Malformed("grid size must be positive".into()));
        }
        if self.x.len() != self.g || self.o.len() != self.g {
            return Err(Error::Malformed(format!(
                "expected {} entries in x and o, got {} and {}",
                self.g,
                self.x.len(),
                self.o.len()
            )));
        }
        check_perm("x_cells", &self.x, self.g)?;
        check_perm("o_cells", &self.o, self.g)?;
        if let Some(col) = (0..self.g).find(|&i| self.x[i] == self.o[i]) {
            return Err(Error::MarkerCollision { column: col, row: self.x[col] });
        }
        let n = self.component_count();
        if n != 1 && !allow_links {
            return Err(Error::MultiComponent(n));
        }
        Ok(())
    }

    pub fn reversed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Auto => Orientation::Reversed,
            Orientation::Reversed => Orientation::Auto,
        };
        GridDiagram { orientation, ..self.clone() }
    }

    fn inverse(v: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; v.len()];
        for (i, &r) in v.iter().enumerate() {
            inv[r] = i;
        }
        inv
    }

    /// Column sequences of each component, following X -> O inside columns.
    fn column_cycles(&self) -> Vec<Vec<usize>> {
        let x_of_row = Self::inverse(&self.x);
        let mut seen = vec![false; self.g];
        let mut cycles = Vec::new();
        for start in 0..self.g {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                cycle.push(c);
                c = x_of_row[self.o[c]];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn component_count(&self) -> usize {
        self.column_cycles().len()
    }

    /// Markers of every component in traversal order.
    pub fn traversal(&self) -> Vec<Vec<Corner>> {
        self.column_cycles()
            .into_iter()
            .map(|cycle| {
                let mut corners: Vec<Corner> = cycle
                    .iter()
                    .flat_map(|&c| {
                        [
                            Corner { col: c, row: self.x[c], marker: Marker::X },
                            Corner { col: c, row: self.o[c], marker: Marker::O },
                        ]
                    })
                    .collect();
                if self.orientation == Orientation::Reversed {
                    corners.reverse();
                }
                corners
            })
            .collect()
    }

    pub fn corner_kind(&self, col: usize, row: usize) -> CornerKind {
        let x_of_row = Self::inverse(&self.x);
        let o_of_row = Self::inverse(&self.o);
        // Column partner and row partner of the marker at (col, row).
        let (v_other, h_other) = if self.x[col] == row {
            (self.o[col], o_of_row[row])
        } else {
            (self.x[col], x_of_row[row])
        };
        let goes_up = v_other > row;
        let goes_right = h_other > col;
        match (goes_right, goes_up) {
            (true, false) => CornerKind::LeftCusp,
            (false, true) => CornerKind::RightCusp,
            _ => CornerKind::Smooth,
        }
    }

    /// Crossings of column segments over row segments.
    pub fn crossings(&self) -> Vec<GridCrossing> {
        let x_of_row = Self::inverse(&self.x);
        let o_of_row = Self::inverse(&self.o);
        let mut out = Vec::new();
        for col in 0..self.g {
            let (lo, hi) = (self.x[col].min(self.o[col]), self.x[col].max(self.o[col]));
            // X -> O: up when the O sits above.
            let v_up = self.o[col] > self.x[col];
            for row in lo + 1..hi {
                let (a, b) = (x_of_row[row], o_of_row[row]);
                if a.min(b) < col && col < a.max(b) {
                    // O -> X: right when the X sits right of the O.
                    let h_right = a > b;
                    // Rotated directions: vertical up -> (-1, 1), horizontal right -> (1, 1).
                    let over: (i32, i32) = if v_up { (-1, 1) } else { (1, -1) };
                    let under: (i32, i32) = if h_right { (1, 1) } else { (-1, -1) };
                    // Reversal flips both strands, leaving the sign alone.
                    let sign = (over.0 * under.1 - over.1 * under.0).signum();
                    out.push(GridCrossing { col, row, sign });
                }
            }
        }
        out
    }

    fn cusp_counts(&self) -> (i64, i64, i64) {
        // (right cusps, down cusps, up cusps)
        let (mut right, mut down, mut up) = (0, 0, 0);
        for comp in self.traversal() {
            for corner in comp {
                // Incoming segment is horizontal at an X (auto orientation).
                let incoming_horizontal =
                    (corner.marker == Marker::X) == (self.orientation == Orientation::Auto);
                let is_down = match self.corner_kind(corner.col, corner.row) {
                    CornerKind::LeftCusp => incoming_horizontal,
                    CornerKind::RightCusp => {
                        right += 1;
                        !incoming_horizontal
                    }
                    CornerKind::Smooth => continue,
                };
                if is_down {
                    down += 1;
                } else {
                    up += 1;
                }
            }
        }
        (right, down, up)
    }

    pub fn right_cusp_count(&self) -> usize {
        self.cusp_counts().0 as usize
    }

    pub fn writhe(&self) -> i64 {
        self.crossings().iter().map(|c| c.sign as i64).sum()
    }

    /// Commutes columns `i` and `i + 1` (indices mod g are not wrapped).
    pub fn commute_columns(&self, i: usize) -> Result<Self> {
        if i + 1 >= self.g {
            return Err(Error::IllegalGridMove(format!("no column {} to commute with {i}", i + 1)));
        }
        let span = |c: usize| (self.x[c].min(self.o[c]), self.x[c].max(self.o[c]));
        if interleaved(span(i), span(i + 1)) {
            return Err(Error::IllegalGridMove(format!(
                "columns {i} and {} have interleaving segments",
                i + 1
            )));
        }
        let mut d = self.clone();
        d.x.swap(i, i + 1);
        d.o.swap(i, i + 1);
        Ok(d)
    }

    /// Commutes rows `j` and `j + 1`.
    pub fn commute_rows(&self, j: usize) -> Result<Self> {
        if j + 1 >= self.g {
            return Err(Error::IllegalGridMove(format!("no row {} to commute with {j}", j + 1)));
        }
        let x_of_row = Self::inverse(&self.x);
        let o_of_row = Self::inverse(&self.o);
        let span = |r: usize| (x_of_row[r].min(o_of_row[r]), x_of_row[r].max(o_of_row[r]));
        if interleaved(span(j), span(j + 1)) {
            return Err(Error::IllegalGridMove(format!(
                "rows {j} and {} have interleaving segments",
                j + 1
            )));
        }
        let swap = |r: usize| if r == j { j + 1 } else if r == j + 1 { j } else { r };
        let mut d = self.clone();
        d.x = d.x.iter().map(|&r| swap(r)).collect();
        d.o = d.o.iter().map(|&r| swap(r)).collect();
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }
}

/// Spans that block a commutation. A shared endpoint blocks it too: swapping
/// would drag a corner across the other segment.
fn interleaved(a: (usize, usize), b: (usize, usize)) -> bool {
    if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
        return true;
    }
    let strictly_inside = |p: usize, s: (usize, usize)| s.0 < p && p < s.1;
    strictly_inside(a.0, b) != strictly_inside(a.1, b)
        || strictly_inside(b.0, a) != strictly_inside(b.1, a)
}

/// Front Thurston-Bennequin number: writhe minus the number of right cusps.
pub fn thurston_bennequin(d: &GridDiagram) -> Result<i64> {
    thurston_bennequin_with(d, false)
}

/// As [`thurston_bennequin`]; with `allow_links` the total link value is returned.
pub fn thurston_bennequin_with(d: &GridDiagram, allow_links: bool) -> Result<i64> {
    let n = d.component_count();
    if n != 1 && !allow_links {
        return Err(Error::MultiComponent(n));
    }
    Ok(d.writhe() - d.right_cusp_count() as i64)
}

/// Rotation number `(down cusps - up cusps) / 2`.
pub fn rotation_number(d: &GridDiagram) -> i64 {
    let (_, down, up) = d.cusp_counts();
    (down - up) / 2
}

/// Grid of the max-tb positive torus knot `T(2, 2k+1)`.
///
/// Its front is two stacked eyes joined by `2k + 1` crossings between the
/// middle strands, so `tb = 2k - 1` and `r = 0`.
pub fn torus_knot_grid(k: usize) -> Result<GridDiagram> {
    if k == 0 {
        return Err(Error::InvalidArgument("torus knot T(2, 2k+1) needs k >= 1".into()));
    }
    let n = 2 * k + 3;
    let x = std::iter::once(0).chain((1..n).rev()).collect();
    let o = (0..n - 1).rev().chain(std::iter::once(n - 1)).collect();
    GridDiagram::new(x, o)
}

use crate::geometry::{Point, Rect};

/// Uniform grid of square cells over a window, each cell holding the indices
/// of the points that fall in it. Pair and range queries only visit the 3×3
/// block of cells around a point, so radii must not exceed the cell side.
#[derive(Debug, Clone)]
pub struct CellIndex {
    x0: f64,
    y0: f64,
    side: f64,
    cols: usize,
    rows: usize,
    /// `start[c]..start[c + 1]` indexes `order` for cell `c`.
    start: Vec<u32>,
    order: Vec<u32>,
    /// Positions permuted into cell order, for locality.
    sorted: Vec<Point>,
}

impl CellIndex {
    pub fn new(points: &[Point], bounds: &Rect, side: f64) -> Self {
        assert!(side > 0.0, "cell side must be positive");
        let cols = ((bounds.width() / side).ceil() as usize).max(1);
        let rows = ((bounds.height() / side).ceil() as usize).max(1);
        let mut idx = CellIndex {
            x0: bounds.x0,
            y0: bounds.y0,
            side,
            cols,
            rows,
            start: vec![0; cols * rows + 1],
            order: vec![0; points.len()],
            sorted: Vec::with_capacity(points.len()),
        };
        let cell_of: Vec<u32> = points.iter().map(|p| idx.cell_of(p) as u32).collect();
        for &c in &cell_of {
            idx.start[c as usize + 1] += 1;
        }
        for c in 0..cols * rows {
            idx.start[c + 1] += idx.start[c];
        }
        let mut fill = idx.start.clone();
        for (i, &c) in cell_of.iter().enumerate() {
            let slot = &mut fill[c as usize];
            idx.order[*slot as usize] = i as u32;
            *slot += 1;
        }
        idx.sorted = idx.order.iter().map(|&i| points[i as usize]).collect();
        idx
    }

    fn coords(&self, p: &Point) -> (usize, usize) {
        let cx = ((p.x - self.x0) / self.side).floor();
        let cy = ((p.y - self.y0) / self.side).floor();
        let cx = (cx.max(0.0) as usize).min(self.cols - 1);
        let cy = (cy.max(0.0) as usize).min(self.rows - 1);
        (cx, cy)
    }

    pub fn cell_of(&self, p: &Point) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.cols + cx
    }

    pub fn num_cells(&self) -> usize {
        self.cols * self.rows
    }

    /// Indices of the points stored in cell `c`.
    pub fn cell_members(&self, c: usize) -> &[u32] {
        &self.order[self.start[c] as usize..self.start[c + 1] as usize]
    }

    /// Calls `f(i, j)` with `i < j` once for every unordered pair at
    /// Euclidean distance ≤ `r` (compared as squared distances).
    pub fn for_each_pair_within(&self, r: f64, mut f: impl FnMut(usize, usize)) {
        assert!(r <= self.side, "query radius exceeds cell side");
        let r2 = r * r;
        // forward half of the 3×3 stencil; the own cell is handled separately
        const FORWARD: [(isize, isize); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];
        for cy in 0..self.rows {
            for cx in 0..self.cols {
                let c = cy * self.cols + cx;
                let (a0, a1) = (self.start[c] as usize, self.start[c + 1] as usize);
                for a in a0..a1 {
                    let pa = self.sorted[a];
                    for b in a + 1..a1 {
                        if pa.dist2(&self.sorted[b]) <= r2 {
                            emit(&mut f, self.order[a], self.order[b]);
                        }
                    }
                }
                for (dx, dy) in FORWARD {
                    let nx = cx as isize + dx;
                    let ny = cy as isize + dy;
                    if nx < 0 || nx >= self.cols as isize || ny >= self.rows as isize {
                        continue;
                    }
                    let d = ny as usize * self.cols + nx as usize;
                    let (b0, b1) = (self.start[d] as usize, self.start[d + 1] as usize);
                    for a in a0..a1 {
                        let pa = self.sorted[a];
                        for b in b0..b1 {
                            if pa.dist2(&self.sorted[b]) <= r2 {
                                emit(&mut f, self.order[a], self.order[b]);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Calls `f(i)` for every stored point within distance `r` of `q`.
    pub fn for_each_near(&self, q: &Point, r: f64, mut f: impl FnMut(usize)) {
        assert!(r <= self.side, "query radius exceeds cell side");
        let r2 = r * r;
        let (cx, cy) = self.coords(q);
        for ny in cy.saturating_sub(1)..=(cy + 1).min(self.rows - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1) {
                let d = ny * self.cols + nx;
                for k in self.start[d] as usize..self.start[d + 1] as usize {
                    if q.dist2(&self.sorted[k]) <= r2 {
                        f(self.order[k] as usize);
                    }
                }
            }
        }
    }
}

#[inline]
fn emit(f: &mut impl FnMut(usize, usize), a: u32, b: u32) {
    if a < b {
        f(a as usize, b as usize)
    } else {
        f(b as usize, a as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::sample_ppp;
    use crate::rng::SeedSpec;

    #[test]
    fn every_point_in_exactly_one_cell() {
        let r = Rect::new(0.0, 7.3, 0.0, 4.1).unwrap();
        let ps = sample_ppp(3.0, &r, &SeedSpec::new(11)).unwrap();
        let idx = CellIndex::new(&ps.points, &r, 1.0);
        let mut seen = vec![0u8; ps.len()];
        for c in 0..idx.num_cells() {
            for &i in idx.cell_members(c) {
                seen[i as usize] += 1;
                assert_eq!(idx.cell_of(&ps.points[i as usize]), c);
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn range_query_matches_scan() {
        let r = Rect::square(6.0).unwrap();
        let ps = sample_ppp(4.0, &r, &SeedSpec::new(12)).unwrap();
        let idx = CellIndex::new(&ps.points, &r, 1.0);
        for q in [Point::new(0.0, 0.0), Point::new(3.3, 2.2), Point::new(6.0, 5.5)] {
            let mut got = Vec::new();
            idx.for_each_near(&q, 1.0, |i| got.push(i));
            got.sort_unstable();
            let want: Vec<usize> = (0..ps.len()).filter(|&i| q.dist2(&ps.points[i]) <= 1.0).collect();
            assert_eq!(got, want);
        }
    }
}

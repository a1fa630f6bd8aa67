//! Planar primitives: points, closed axis-aligned rectangles, sup-norm
//! annuli, square tessellations and the segment intersection predicate.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Sup-norm (L∞) distance.
    #[inline]
    pub fn sup_dist(&self, other: &Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let finite = [x0, x1, y0, y1].iter().all(|v| v.is_finite());
        if !finite || x0 >= x1 || y0 >= y1 {
            return param_err(format!("invalid rectangle [{x0},{x1}]x[{y0},{y1}]"));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// `[0, side]²`.
    pub fn square(side: f64) -> Result<Self> {
        Rect::new(0.0, side, 0.0, side)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// The rectangle grown by `margin` on every side.
    pub fn expand(&self, margin: f64) -> Rect {
        Rect {
            x0: self.x0 - margin,
            x1: self.x1 + margin,
            y0: self.y0 - margin,
            y1: self.y1 + margin,
        }
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    /// Euclidean distance from `p` to the rectangle (0 inside).
    pub fn dist_to(&self, p: &Point) -> f64 {
        let dx = (self.x0 - p.x).max(0.0).max(p.x - self.x1);
        let dy = (self.y0 - p.y).max(0.0).max(p.y - self.y1);
        (dx * dx + dy * dy).sqrt()
    }
}

/// `Λ_c(r_out) \ Λ_c(r_in)` for closed sup-norm boxes `Λ_c(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareAnnulus {
    pub center: Point,
    pub r_in: f64,
    pub r_out: f64,
}

impl SquareAnnulus {
    pub fn new(center: Point, r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return param_err(format!("annulus radii must satisfy 0 < r_in < r_out, got {r_in}, {r_out}"));
        }
        Ok(SquareAnnulus { center, r_in, r_out })
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        let d = self.center.sup_dist(p);
        d > self.r_in && d <= self.r_out
    }

    pub fn outer_box(&self) -> Rect {
        Rect {
            x0: self.center.x - self.r_out,
            x1: self.center.x + self.r_out,
            y0: self.center.y - self.r_out,
            y1: self.center.y + self.r_out,
        }
    }

    /// Conservative disjointness test. Exact for concentric annuli, for
    /// annuli whose outer boxes do not meet, and for one annulus sitting
    /// inside the other's hole; any other configuration reports `false`.
    pub fn is_disjoint_from(&self, other: &SquareAnnulus) -> bool {
        if self.center == other.center {
            return self.r_out <= other.r_in || other.r_out <= self.r_in;
        }
        let (a, b) = (self.outer_box(), other.outer_box());
        // Closed boxes: touching counts as meeting.
        if a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0 {
            return true;
        }
        let d = self.center.sup_dist(&other.center);
        d + other.r_out <= self.r_in || d + self.r_out <= other.r_in
    }
}

/// Cover `rect` by `side × side` squares in row-major order (rows bottom to
/// top, left to right within a row).
pub fn tessellate(rect: &Rect, side: f64) -> Result<Vec<Rect>> {
    if !(side > 0.0 && side.is_finite()) {
        return param_err(format!("tessellation side must be positive, got {side}"));
    }
    let cols = exact_multiple(rect.width(), side)
        .ok_or_else(|| Error::Tessellation(format!("width {} is not a multiple of {side}", rect.width())))?;
    let rows = exact_multiple(rect.height(), side)
        .ok_or_else(|| Error::Tessellation(format!("height {} is not a multiple of {side}", rect.height())))?;
    let mut out = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            // Snap the last row/column to the rectangle so the union is exact.
            let x0 = rect.x0 + c as f64 * side;
            let x1 = if c + 1 == cols { rect.x1 } else { rect.x0 + (c + 1) as f64 * side };
            let y0 = rect.y0 + r as f64 * side;
            let y1 = if r + 1 == rows { rect.y1 } else { rect.y0 + (r + 1) as f64 * side };
            out.push(Rect { x0, x1, y0, y1 });
        }
    }
    Ok(out)
}

/// `Some(k)` when `len = k · side` up to rounding, `k ≥ 1`.
pub(crate) fn exact_multiple(len: f64, side: f64) -> Option<usize> {
    let k = (len / side).round();
    if k < 1.0 {
        return None;
    }
    let tol = 1e-9 * len.abs().max(1.0);
    ((k * side - len).abs() <= tol).then_some(k as usize)
}

#[inline]
fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

#[inline]
fn within_box(a: &Point, b: &Point, p: &Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True iff the closed segments `[a1, a2]` and `[b1, b2]` share a point.
/// Orientation signs are computed with exact adaptive predicates.
pub fn segment_intersects(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = orient(&b1, &b2, &a1);
    let d2 = orient(&b1, &b2, &a2);
    let d3 = orient(&a1, &a2, &b1);
    let d4 = orient(&a1, &a2, &b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && within_box(&b1, &b2, &a1))
        || (d2 == 0.0 && within_box(&b1, &b2, &a2))
        || (d3 == 0.0 && within_box(&a1, &a2, &b1))
        || (d4 == 0.0 && within_box(&a1, &a2, &b2))
}

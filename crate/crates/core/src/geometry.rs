use serde::{Deserialize, Serialize};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn square(side: f64) -> Self {
        Self {
            x_min: 0.0,
            x_max: side,
            y_min: 0.0,
            y_max: side,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x_min.is_finite()
            && self.x_max.is_finite()
            && self.y_min.is_finite()
            && self.y_max.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Point at arc length `s` along the boundary, starting at the
    /// `(x_min, y_min)` corner and running counterclockwise.
    pub fn perimeter_point(&self, s: f64) -> Point {
        let (w, h) = (self.width(), self.height());
        let s = s.rem_euclid(self.perimeter());
        if s <= w {
            Point::new(self.x_min + s, self.y_min)
        } else if s <= w + h {
            Point::new(self.x_max, self.y_min + (s - w))
        } else if s <= 2.0 * w + h {
            Point::new(self.x_max - (s - w - h), self.y_max)
        } else {
            Point::new(self.x_min, self.y_max - (s - 2.0 * w - h))
        }
    }

    /// Distance from `p` to the nearest boundary edge (0 on the boundary).
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let dx = (p.x - self.x_min).abs().min((p.x - self.x_max).abs());
        let dy = (p.y - self.y_min).abs().min((p.y - self.y_max).abs());
        let on_x_edge = p.y >= self.y_min && p.y <= self.y_max;
        let on_y_edge = p.x >= self.x_min && p.x <= self.x_max;
        match (on_x_edge, on_y_edge) {
            (true, true) => dx.min(dy),
            (true, false) => dx,
            (false, true) => dy,
            (false, false) => dx.hypot(dy),
        }
    }
}

//! Synthetic reflectivity scenes described in TOML.
//!
//! ```toml
//! width = 64
//! height = 64
//! background = 1.0
//!
//! [[rects]]
//! x = 0
//! y = 0
//! width = 32
//! height = 32
//! value = 0.1
//!
//! [[gradients]]            # log-linear ramp between two values
//! region = { x = 32, y = 0, width = 32, height = 16 }
//! from = 0.5
//! to = 5.0
//! vertical = false
//!
//! [[lines]]                # 1-pixel wide segment
//! x0 = 0
//! y0 = 40
//! x1 = 63
//! y1 = 40
//! value = 8.0
//!
//! [[points]]
//! x = 50
//! y = 50
//! value = 10.0
//!
//! [[changes]]
//! region = { x = 40, y = 40, width = 8, height = 8 }
//! first_date = 5
//! last_date = 9
//! gain = 4.0
//! ```
//!
//! Elements are painted in the order rects, gradients, lines, points.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{IntensityImage, Rect};
use crate::stack::ChangeEvent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGradient {
    pub region: Rect,
    pub from: f64,
    pub to: f64,
    #[serde(default)]
    pub vertical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLine {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePoint {
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub background: f64,
    #[serde(default)]
    pub rects: Vec<SceneRect>,
    #[serde(default)]
    pub gradients: Vec<SceneGradient>,
    #[serde(default)]
    pub lines: Vec<SceneLine>,
    #[serde(default)]
    pub points: Vec<ScenePoint>,
    #[serde(default)]
    pub changes: Vec<ChangeEvent>,
    /// Area known to be homogeneous, for ENL measurements.
    #[serde(default)]
    pub homogeneous_region: Option<Rect>,
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} reflectivity {v} must be > 0")))
    }
}

impl Scene {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("scene: {}", e.message())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene fields are always representable in TOML")
    }

    /// The 128x128 evaluation scene: four blocks spanning 20 dB (0.1 to 10),
    /// a log ramp, thin lines and a few point targets, without changes.
    pub fn reference() -> Self {
        let rect = |x, y, width, height, value| SceneRect {
            x,
            y,
            width,
            height,
            value,
        };
        let line = |x0, y0, x1, y1, value| SceneLine {
            x0,
            y0,
            x1,
            y1,
            value,
        };
        Scene {
            width: 128,
            height: 128,
            background: 1.0,
            rects: vec![
                rect(0, 0, 64, 64, 0.1),
                rect(64, 0, 64, 64, 10.0),
                rect(0, 64, 64, 64, 0.3),
                rect(80, 80, 32, 32, 3.0),
            ],
            gradients: vec![SceneGradient {
                region: Rect::new(64, 64, 64, 12),
                from: 0.1,
                to: 10.0,
                vertical: false,
            }],
            lines: vec![
                line(8, 32, 56, 32, 3.0),
                line(96, 4, 96, 60, 0.1),
                line(4, 120, 60, 72, 3.0),
                line(24, 64, 24, 127, 0.1),
                line(64, 118, 127, 118, 10.0),
            ],
            points: vec![
                ScenePoint {
                    x: 20,
                    y: 48,
                    value: 10.0,
                },
                ScenePoint {
                    x: 44,
                    y: 100,
                    value: 10.0,
                },
            ],
            changes: vec![],
            homogeneous_region: Some(Rect::new(4, 4, 48, 24)),
        }
    }

    /// Paints the reflectivity map.
    pub fn render(&self) -> Result<IntensityImage> {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 {
            return Err(Error::Dimension(format!("{w}x{h} scene is empty")));
        }
        positive(self.background, "background")?;
        let mut data = vec![self.background; w * h];
        for r in &self.rects {
            positive(r.value, "rect")?;
            let rect = Rect::new(r.x, r.y, r.width, r.height);
            if !rect.fits_in(w, h) {
                return Err(Error::Bounds(rect.to_string()));
            }
            for y in r.y..r.y + r.height {
                data[y * w + r.x..y * w + r.x + r.width].fill(r.value);
            }
        }
        for g in &self.gradients {
            positive(g.from, "gradient")?;
            positive(g.to, "gradient")?;
            if !g.region.fits_in(w, h) {
                return Err(Error::Bounds(g.region.to_string()));
            }
            let steps = if g.vertical { g.region.height } else { g.region.width };
            let (la, lb) = (g.from.ln(), g.to.ln());
            for y in g.region.y..g.region.y + g.region.height {
                for x in g.region.x..g.region.x + g.region.width {
                    let i = if g.vertical { y - g.region.y } else { x - g.region.x };
                    let t = if steps > 1 { i as f64 / (steps - 1) as f64 } else { 0.0 };
                    data[y * w + x] = (la + t * (lb - la)).exp();
                }
            }
        }
        for l in &self.lines {
            positive(l.value, "line")?;
            if l.x0.max(l.x1) >= w || l.y0.max(l.y1) >= h {
                return Err(Error::Bounds(format!(
                    "line ({},{})-({},{})",
                    l.x0, l.y0, l.x1, l.y1
                )));
            }
            for (x, y) in bresenham(l.x0 as i64, l.y0 as i64, l.x1 as i64, l.y1 as i64) {
                data[y as usize * w + x as usize] = l.value;
            }
        }
        for p in &self.points {
            positive(p.value, "point")?;
            if p.x >= w || p.y >= h {
                return Err(Error::Bounds(format!("point ({},{})", p.x, p.y)));
            }
            data[p.y * w + p.x] = p.value;
        }
        IntensityImage::new(w, h, data)
    }
}

fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<(i64, i64)> {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = ((x1 - x0).signum(), (y1 - y0).signum());
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    let mut out = Vec::new();
    loop {
        out.push((x, y));
        if x == x1 && y == y1 {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scene_spans_twenty_db() {
        let v = Scene::reference().render().unwrap();
        assert_eq!(v.dims(), (128, 128));
        let lo = v.data().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.data().iter().cloned().fold(0.0, f64::max);
        assert!((10.0 * (hi / lo).log10() - 20.0).abs() < 1e-9);
        assert_eq!(v.get(30, 32), 3.0);
        assert_eq!(v.get(96, 30), 0.1);
    }

    #[test]
    fn toml_round_trip_and_bounds() {
        let s = Scene::reference();
        assert_eq!(Scene::from_toml(&s.to_toml()).unwrap(), s);
        let mut bad = s.clone();
        bad.points.push(ScenePoint {
            x: 500,
            y: 0,
            value: 1.0,
        });
        assert!(matches!(bad.render(), Err(Error::Bounds(_))));
    }

    #[test]
    fn diagonal_line_is_connected() {
        let pts = bresenham(0, 0, 5, 3);
        assert_eq!(pts.first(), Some(&(0, 0)));
        assert_eq!(pts.last(), Some(&(5, 3)));
        for w in pts.windows(2) {
            assert!((w[1].0 - w[0].0).abs() <= 1 && (w[1].1 - w[0].1).abs() <= 1);
        }
    }
}

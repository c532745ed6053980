use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowShape {
    Ellipse { a: f64, b: f64 },
    Polygon,
}

/// One planar cell. `boundary` is a counter-clockwise polygon through the
/// cell outline (curved edges subdivided); imported meshes carry none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub centroid: [f64; 2],
    pub area: f64,
    pub boundary: Option<Vec<[f64; 2]>>,
}

impl Element {
    /// Largest distance from the centroid to the outline, or the radius of
    /// the equal-area disk when no outline is known.
    pub fn radius(&self) -> f64 {
        match &self.boundary {
            Some(poly) => poly
                .iter()
                .map(|p| (p[0] - self.centroid[0]).hypot(p[1] - self.centroid[1]))
                .fold(0.0, f64::max),
            None => (self.area / PI).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarWindowMesh {
    pub elements: Vec<Element>,
    pub shape: WindowShape,
}

/// Cumulative radial breakpoints `ρₖ = 1 − (1 − k/n)²`: spacing shrinks like
/// the square of the distance to the rim.
fn graded_radii(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let s = 1.0 - k as f64 / n as f64;
            1.0 - s * s
        })
        .collect()
}

/// Polar-mapped mesh of the ellipse `x²/a² + y²/b² ≤ 1` with `n` rings graded
/// toward the rim. Ring `k` is split into `4·max(2, ⌈n ρₖ⌉)` sectors.
pub fn build_ellipse_mesh(a: f64, b: f64, n: usize) -> Result<PlanarWindowMesh> {
    ensure_domain!(b > 0.0 && b <= a, "ellipse needs 0 < b <= a, got a={a}, b={b}");
    ensure_domain!(n >= 8, "mesh resolution must be at least 8, got {n}");
    let radii = graded_radii(n);
    let map = |rho: f64, phi: f64| [a * rho * phi.cos(), b * rho * phi.sin()];
    let mut elements = Vec::new();
    for k in 1..=n {
        let (r1, r2) = (radii[k - 1], radii[k]);
        let sectors = 4 * ((n as f64 * r2).ceil() as usize).max(2);
        let dphi = 2.0 * PI / sectors as f64;
        let arc_pieces = ((dphi / (PI / 48.0)).ceil() as usize).max(3);
        for s in 0..sectors {
            let (p1, p2) = (s as f64 * dphi, (s + 1) as f64 * dphi);
            let area = 0.5 * a * b * (r2 * r2 - r1 * r1) * dphi;
            let radial = (r2.powi(3) - r1.powi(3)) / 3.0 / (0.5 * (r2 * r2 - r1 * r1) * dphi);
            let centroid = [
                a * radial * (p2.sin() - p1.sin()),
                b * radial * (p1.cos() - p2.cos()),
            ];
            let mut poly = Vec::with_capacity(2 * arc_pieces + 2);
            for i in 0..=arc_pieces {
                poly.push(map(r2, p1 + dphi * i as f64 / arc_pieces as f64));
            }
            if r1 > 0.0 {
                for i in (0..=arc_pieces).rev() {
                    poly.push(map(r1, p1 + dphi * i as f64 / arc_pieces as f64));
                }
            } else {
                poly.push([0.0, 0.0]);
            }
            elements.push(Element {
                centroid,
                area,
                boundary: Some(poly),
            });
        }
    }
    Ok(PlanarWindowMesh {
        elements,
        shape: WindowShape::Ellipse { a, b },
    })
}

impl PlanarWindowMesh {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    /// Analytic area of the window, when the shape is known.
    pub fn analytic_area(&self) -> Option<f64> {
        match self.shape {
            WindowShape::Ellipse { a, b } => Some(PI * a * b),
            WindowShape::Polygon => None,
        }
    }

    /// Index of the element whose centroid is closest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, e) in self.elements.iter().enumerate() {
            let d = (e.centroid[0] - x).hypot(e.centroid[1] - y);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Text form: one element per line, `x y area`, `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# centroid_x centroid_y area\n");
        for e in &self.elements {
            let _ = writeln!(out, "{:.17e} {:.17e} {:.17e}", e.centroid[0], e.centroid[1], e.area);
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    /// Reads the text form. The result has no element outlines, so the solver
    /// falls back to equal-area disks for self-terms.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut elements = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 3 {
                return Err(Error::Domain(format!(
                    "mesh line {}: expected `x y area`, got {:?}",
                    lineno + 1,
                    body
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::Domain(format!("mesh line {}: {e}: {s:?}", lineno + 1))
                })
            };
            let (x, y, area) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            ensure_domain!(area > 0.0, "mesh line {}: non-positive area {area}", lineno + 1);
            elements.push(Element {
                centroid: [x, y],
                area,
                boundary: None,
            });
        }
        ensure_domain!(!elements.is_empty(), "mesh file contains no elements");
        Ok(Self {
            elements,
            shape: WindowShape::Polygon,
        })
    }
}

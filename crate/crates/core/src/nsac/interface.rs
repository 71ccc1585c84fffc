//! Zero level set of `c` by marching squares on the cell centres.
//!
//! Squares straddling the periodic seam are skipped, so an interface that
//! crosses the box boundary comes back as open chains.

use std::collections::HashMap;

use serde::Serialize;

use super::grid::Grid;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFit {
    pub center: Vec2,
    pub radius: f64,
    /// Length-weighted RMS of `|x − center| − radius` over the vertices.
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let mut l: f64 = self.points.windows(2).map(|w| dist(w[0], w[1])).sum();
        if self.closed && self.points.len() > 1 {
            l += dist(self.points[0], *self.points.last().unwrap());
        }
        l
    }

    /// Shoelace area, positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|k| {
                let (a, b) = (self.points[k], self.points[(k + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            * 0.5
    }

    fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interface {
    /// All pieces, longest first.
    pub pieces: Vec<Polyline>,
    /// Fit to the longest piece when it is a near-circular closed loop.
    pub circle: Option<CircleFit>,
}

impl Interface {
    pub fn main(&self) -> &Polyline {
        &self.pieces[0]
    }

    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(Polyline::length).sum()
    }
}

/// `rms / radius` below which the main loop counts as a circle.
pub const CIRCULARITY_TOL: f64 = 0.05;

fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Kåsa fit: least squares for `x² + y² + D x + E y + F = 0`, each vertex
/// weighted by half the length of its adjacent segments.
pub fn fit_circle(line: &Polyline) -> Option<CircleFit> {
    let n = line.points.len();
    if n < 3 {
        return None;
    }
    let mut w = vec![0.0; n];
    for (k, (a, b)) in line.segments().enumerate() {
        let l = 0.5 * dist(a, b);
        w[k] += l;
        w[(k + 1) % n] += l;
    }
    // centre the data for conditioning
    let wsum: f64 = w.iter().sum();
    let mx = line.points.iter().zip(&w).map(|(p, w)| p[0] * w).sum::<f64>() / wsum;
    let my = line.points.iter().zip(&w).map(|(p, w)| p[1] * w).sum::<f64>() / wsum;
    let mut a = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (p, &wk) in line.points.iter().zip(&w) {
        let (x, y) = (p[0] - mx, p[1] - my);
        let row = [x, y, 1.0];
        let z = -(x * x + y * y);
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] += wk * row[r] * row[c];
            }
            rhs[r] += wk * row[r] * z;
        }
    }
    let sol = solve3(a, rhs)?;
    let (cx, cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let radius = r2.sqrt();
    let center = [cx + mx, cy + my];
    let rms = (line
        .points
        .iter()
        .zip(&w)
        .map(|(p, wk)| wk * (dist(*p, center) - radius).powi(2))
        .sum::<f64>()
        / wsum)
        .sqrt();
    Some(CircleFit { center, radius, rms })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Edge ids: horizontal edge `(i, j)–(i+1, j)` is `2 (j nx + i)`, vertical
/// edge `(i, j)–(i, j+1)` is `2 (j nx + i) + 1`.
fn h_edge(nx: usize, i: usize, j: usize) -> usize {
    2 * (j * nx + i)
}

fn v_edge(nx: usize, i: usize, j: usize) -> usize {
    2 * (j * nx + i) + 1
}

pub fn extract_interface(c: &[f64], grid: &Grid) -> Result<Interface> {
    let (nx, ny) = (grid.nx, grid.ny);
    let inside = |i: usize, j: usize| c[grid.idx(i, j)] > 0.0;
    let mut points: HashMap<usize, Vec2> = HashMap::new();
    let mut links: HashMap<usize, Vec<usize>> = HashMap::new();

    let mut crossing = |e: usize, (i0, j0): (usize, usize), (i1, j1): (usize, usize)| {
        points.entry(e).or_insert_with(|| {
            let (a, b) = (c[grid.idx(i0, j0)], c[grid.idx(i1, j1)]);
            let t = a / (a - b);
            let (p, q) = (grid.center(i0, j0), grid.center(i1, j1));
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        });
        e
    };

    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let corners = [inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)];
            // bottom, right, top, left
            let mut cut = Vec::with_capacity(4);
            if corners[0] != corners[1] {
                cut.push(crossing(h_edge(nx, i, j), (i, j), (i + 1, j)));
            }
            if corners[1] != corners[2] {
                cut.push(crossing(v_edge(nx, i + 1, j), (i + 1, j), (i + 1, j + 1)));
            }
            if corners[2] != corners[3] {
                cut.push(crossing(h_edge(nx, i, j + 1), (i, j + 1), (i + 1, j + 1)));
            }
            if corners[3] != corners[0] {
                cut.push(crossing(v_edge(nx, i, j), (i, j), (i, j + 1)));
            }
            let pairs: Vec<(usize, usize)> = match cut.len() {
                2 => vec![(cut[0], cut[1])],
                4 => {
                    let mean = 0.25
                        * (c[grid.idx(i, j)]
                            + c[grid.idx(i + 1, j)]
                            + c[grid.idx(i + 1, j + 1)]
                            + c[grid.idx(i, j + 1)]);
                    // Saddle: keep the phase of the centre connected.
                    if (mean > 0.0) == corners[0] {
                        vec![(cut[0], cut[1]), (cut[2], cut[3])]
                    } else {
                        vec![(cut[0], cut[3]), (cut[1], cut[2])]
                    }
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                links.entry(a).or_default().push(b);
                links.entry(b).or_default().push(a);
            }
        }
    }
    if links.is_empty() {
        return Err(Error::NoInterface);
    }

    let mut keys: Vec<usize> = links.keys().copied().collect();
    keys.sort_unstable();
    let mut visited = std::collections::HashSet::new();
    let mut pieces = Vec::new();
    // Open chains first, starting from their endpoints.
    let starts: Vec<usize> = keys
        .iter()
        .copied()
        .filter(|k| links[k].len() == 1)
        .chain(keys.iter().copied())
        .collect();
    for start in starts {
        if visited.contains(&start) {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start);
        let mut cur = start;
        let closed;
        loop {
            let next = links[&cur].iter().copied().find(|n| !visited.contains(n));
            match next {
                Some(n) => {
                    visited.insert(n);
                    chain.push(n);
                    cur = n;
                }
                None => {
                    closed = chain.len() > 2 && links[&cur].contains(&start);
                    break;
                }
            }
        }
        pieces.push(Polyline {
            points: chain.iter().map(|e| points[e]).collect(),
            closed,
        });
    }
    pieces.sort_by(|a, b| b.length().total_cmp(&a.length()));
    let main = &pieces[0];
    let circle = if main.closed {
        fit_circle(main).filter(|f| f.rms < CIRCULARITY_TOL * f.radius)
    } else {
        None
    };
    Ok(Interface { pieces, circle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::config::BoundaryMode;
    use crate::Profile;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid {
            nx: n,
            ny: n,
            h: 1.0 / n as f64,
            origin: [0.0, 0.0],
            mode: BoundaryMode::Periodic,
        }
    }

    fn sample(g: &Grid, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
        (0..g.len()).map(|k| f(g.center(k % g.nx, k / g.nx))).collect()
    }

    #[test]
    fn circle_radius_to_second_order() {
        let p = Profile::quartic();
        let eps = 1.0 / 32.0;
        let mut errs = Vec::new();
        for n in [64, 128] {
            let g = grid(n);
            let c = sample(&g, |x| p.eval((0.25 - (x[0] - 0.5).hypot(x[1] - 0.53)) / eps));
            let iface = extract_interface(&c, &g).unwrap();
            let fit = iface.circle.unwrap();
            assert!(iface.main().closed);
            assert!((fit.center[0] - 0.5).abs() < 1e-4 && (fit.center[1] - 0.53).abs() < 1e-4);
            let e = (fit.radius - 0.25).abs();
            assert!(e < 2.0 * g.h * g.h, "{n}: {e}");
            errs.push(e);
        }
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn single_phase_has_no_interface() {
        let g = grid(16);
        assert!(matches!(
            extract_interface(&vec![1.0; g.len()], &g),
            Err(Error::NoInterface)
        ));
    }

    #[test]
    fn ellipse_perimeter() {
        let (a, b) = (0.3, 0.15);
        let g = grid(256);
        let c = sample(&g, |x| 1.0 - ((x[0] - 0.5) / a).powi(2) - ((x[1] - 0.5) / b).powi(2));
        let iface = extract_interface(&c, &g).unwrap();
        let hh = ((a - b) / (a + b)).powi(2);
        let ramanujan = PI * (a + b) * (1.0 + 3.0 * hh / (10.0 + (4.0 - 3.0 * hh).sqrt()));
        let l = iface.main().length();
        assert!((l / ramanujan - 1.0).abs() < 0.01, "{l} vs {ramanujan}");
        assert!(iface.circle.is_none());
        assert!((iface.main().signed_area().abs() - PI * a * b).abs() < 1e-3);
    }

    #[test]
    fn stripe_gives_open_chains() {
        let g = grid(32);
        let c = sample(&g, |x| 0.25 - (x[0] - 0.5).abs());
        let iface = extract_interface(&c, &g).unwrap();
        assert_eq!(iface.pieces.len(), 2);
        assert!(iface.pieces.iter().all(|p| !p.closed));
        assert!(iface.circle.is_none());
    }

    #[test]
    fn kasa_fit_is_exact_on_circle_points() {
        let pts: Vec<Vec2> = (0..20)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 20.0;
                [1.0 + 0.3 * t.cos(), -2.0 + 0.3 * t.sin()]
            })
            .collect();
        let fit = fit_circle(&Polyline {
            points: pts,
            closed: true,
        })
        .unwrap();
        assert!((fit.radius - 0.3).abs() < 1e-12);
        assert!((fit.center[0] - 1.0).abs() < 1e-12 && (fit.center[1] + 2.0).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
    }
}

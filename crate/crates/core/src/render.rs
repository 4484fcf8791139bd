//! SVG rendering of the simplex partition induced by a coupling on
//! three-valued distributions. Every barycentric point is a
//! distribution; coloring each point by the value the coupling assigns
//! it draws the random partition directly.
//!
//! For the clock coupling the region containing a point a is
//! argmin_i E_i / a_i, so the three region boundaries are the chords
//! through the pivot U (barycentric coordinates proportional to the
//! clocks) and each corner. For the race coupling the regions are
//! star-like but not convex; cells are colored by evaluating the
//! sampler against one shared event stream.

use crate::couplings::CouplingKind;
use crate::dist::Universe;
use crate::error::{Error, Result};
use crate::randomness::{ClockTable, PoissonStream, GENERATOR_NAME};

pub const MAX_RESOLUTION: u32 = 2000;

const COLORS: [&str; 3] = ["#e07a5f", "#3d8bbb", "#e9c46a"];

/// Barycentric coordinates of the pivot: the unique point where
/// E_i / a_i is constant, i.e. a proportional to the clocks.
pub fn pivot_from_clocks(clocks: [f64; 3]) -> [f64; 3] {
    let total: f64 = clocks.iter().sum();
    [clocks[0] / total, clocks[1] / total, clocks[2] / total]
}

/// One rendered panel: a triangular grid of `resolution^2` equal-area
/// cells, each colored by the value the coupling assigns to its sample
/// point. Corner cells sample the corner itself, so a point mass at i
/// is always colored i.
#[derive(Clone, Debug)]
pub struct SimplexRender {
    resolution: u32,
    kind: CouplingKind,
    seed: u64,
    cells: Vec<u8>,
    pivot: Option<[f64; 3]>,
}

/// Vertex (i, j) of the triangular grid: row i from corner 0, offset j
/// toward corner 2.
fn vertex(r: u32, i: u32, j: u32) -> [f64; 3] {
    let r = r as f64;
    [
        (r - i as f64) / r,
        (i - j) as f64 / r,
        j as f64 / r,
    ]
}

fn centroid(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    [
        (a[0] + b[0] + c[0]) / 3.0,
        (a[1] + b[1] + c[1]) / 3.0,
        (a[2] + b[2] + c[2]) / 3.0,
    ]
}

/// Enumerates the subdivision cells in a fixed row-major order,
/// yielding each cell's three vertices and its sample point.
fn cells_of(resolution: u32) -> Vec<([[f64; 3]; 3], [f64; 3])> {
    let r = resolution;
    let mut out = Vec::with_capacity((r * r) as usize);
    for i in 0..r {
        for j in 0..=i {
            let tri = [vertex(r, i, j), vertex(r, i + 1, j), vertex(r, i + 1, j + 1)];
            let sample = if i == 0 {
                [1.0, 0.0, 0.0]
            } else if i == r - 1 && j == 0 {
                [0.0, 1.0, 0.0]
            } else if i == r - 1 && j == i {
                [0.0, 0.0, 1.0]
            } else {
                centroid(tri[0], tri[1], tri[2])
            };
            out.push((tri, sample));
            if j < i {
                let tri = [vertex(r, i, j), vertex(r, i, j + 1), vertex(r, i + 1, j + 1)];
                out.push((tri, centroid(tri[0], tri[1], tri[2])));
            }
        }
    }
    out
}

pub fn render_simplex(kind: CouplingKind, seed: u64, resolution: u32) -> Result<SimplexRender> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::DomainError(format!(
            "resolution must be in 1..={MAX_RESOLUTION}, got {resolution}"
        )));
    }
    let universe = Universe::new(["0", "1", "2"])?;
    let cells_geo = cells_of(resolution);
    let mut cells = Vec::with_capacity(cells_geo.len());
    let mut pivot = None;
    match kind {
        CouplingKind::Clock => {
            let table = ClockTable::generate(&universe, seed);
            let e = [
                table.clock(crate::dist::AtomId(0)),
                table.clock(crate::dist::AtomId(1)),
                table.clock(crate::dist::AtomId(2)),
            ];
            pivot = Some(pivot_from_clocks(e));
            for (_, a) in &cells_geo {
                let mut best = 0u8;
                let mut best_ratio = f64::INFINITY;
                for (i, &ai) in a.iter().enumerate() {
                    if ai > 0.0 {
                        let ratio = e[i] / ai;
                        if ratio < best_ratio {
                            best_ratio = ratio;
                            best = i as u8;
                        }
                    }
                }
                cells.push(best);
            }
        }
        CouplingKind::Race => {
            let mut stream = PoissonStream::new(&universe, seed);
            let mut events = Vec::new();
            for (_, a) in &cells_geo {
                let mut k = 0usize;
                let value = loop {
                    if k == events.len() {
                        let e = stream.next_event();
                        events.push((e.atom.0 as usize, e.height));
                    }
                    let (atom, height) = events[k];
                    if height <= a[atom] {
                        break atom as u8;
                    }
                    k += 1;
                };
                cells.push(value);
            }
        }
        CouplingKind::Star => {
            return Err(Error::DomainError(
                "simplex rendering covers couplings i and ii only".into(),
            ));
        }
    }
    Ok(SimplexRender {
        resolution,
        kind,
        seed,
        cells,
        pivot,
    })
}

impl SimplexRender {
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn pivot(&self) -> Option<[f64; 3]> {
        self.pivot
    }

    /// Fraction of cells per region. Cells have equal area, so this is
    /// the area split of the panel.
    pub fn region_areas(&self) -> [f64; 3] {
        let mut counts = [0usize; 3];
        for &c in &self.cells {
            counts[c as usize] += 1;
        }
        let total = self.cells.len() as f64;
        [
            counts[0] as f64 / total,
            counts[1] as f64 / total,
            counts[2] as f64 / total,
        ]
    }

    /// Chord c runs from corner c through the pivot to the opposite
    /// edge, ending at (0 in coordinate c, U_j / (1 - U_c) elsewhere).
    pub fn chords(&self) -> Option<[[[f64; 3]; 2]; 3]> {
        let u = self.pivot?;
        let mut out = [[[0.0; 3]; 2]; 3];
        for c in 0..3 {
            let mut corner = [0.0; 3];
            corner[c] = 1.0;
            let mut far = [0.0; 3];
            for j in 0..3 {
                if j != c {
                    far[j] = u[j] / (1.0 - u[c]);
                }
            }
            out[c] = [corner, far];
        }
        Some(out)
    }

    pub fn to_svg(&self) -> String {
        let side = 640.0f64;
        let pad = 40.0f64;
        let height = side * 3f64.sqrt() / 2.0;
        let corners = [
            [pad + side / 2.0, pad],
            [pad, pad + height],
            [pad + side, pad + height],
        ];
        let map = |a: [f64; 3]| {
            let x = a[0] * corners[0][0] + a[1] * corners[1][0] + a[2] * corners[2][0];
            let y = a[0] * corners[0][1] + a[1] * corners[1][1] + a[2] * corners[2][1];
            (x, y)
        };
        let width = side + 2.0 * pad;
        let total_height = height + 2.0 * pad;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<!-- coupling: {} | seed: {} | resolution: {} | rng: {} -->\n",
            self.kind.token(),
            self.seed,
            self.resolution,
            GENERATOR_NAME
        ));
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{total_height:.0}\" viewBox=\"0 0 {width:.0} {total_height:.0}\">\n"
        ));
        for ((tri, _), &value) in cells_of(self.resolution).iter().zip(&self.cells) {
            let pts: Vec<String> = tri
                .iter()
                .map(|&v| {
                    let (x, y) = map(v);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let color = COLORS[value as usize];
            svg.push_str(&format!(
                "<polygon points=\"{}\" fill=\"{color}\" stroke=\"{color}\" stroke-width=\"0.4\"/>\n",
                pts.join(" ")
            ));
        }
        if let Some(chords) = self.chords() {
            for chord in chords {
                let (x1, y1) = map(chord[0]);
                let (x2, y2) = map(chord[1]);
                svg.push_str(&format!(
                    "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#222\" stroke-width=\"2\"/>\n"
                ));
            }
        }
        if let Some(u) = self.pivot {
            let (x, y) = map(u);
            svg.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"#222\"/>\n"
            ));
        }
        let outline: Vec<String> = corners
            .iter()
            .map(|&[x, y]| format!("{x:.2},{y:.2}"))
            .collect();
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#222\" stroke-width=\"2\"/>\n",
            outline.join(" ")
        ));
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_clocks_pivot_at_centroid() {
        let u = pivot_from_clocks([1.0, 1.0, 1.0]);
        for ui in u {
            assert!((ui - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn corner_cells_keep_their_own_color() {
        for seed in [1u64, 7, 42, 9999] {
            for kind in [CouplingKind::Clock, CouplingKind::Race] {
                let render = render_simplex(kind, seed, 16).unwrap();
                let cells = render.cells();
                // Row-major cell order: first cell touches corner 0.
                assert_eq!(cells[0], 0, "seed {seed}");
                // Corner 1 cell is the first in the last row.
                let r = 16u32;
                let last_row_start: u32 = (0..r - 1).map(|i| 2 * i + 1).sum();
                assert_eq!(cells[last_row_start as usize], 1, "seed {seed}");
                assert_eq!(*cells.last().unwrap(), 2, "seed {seed}");
            }
        }
    }

    #[test]
    fn cell_count_is_resolution_squared() {
        let render = render_simplex(CouplingKind::Clock, 3, 12).unwrap();
        assert_eq!(render.cells().len(), 144);
        let areas = render.region_areas();
        assert!((areas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chords_pass_through_the_pivot() {
        let render = render_simplex(CouplingKind::Clock, 5, 8).unwrap();
        let u = render.pivot().unwrap();
        for (c, chord) in render.chords().unwrap().into_iter().enumerate() {
            assert_eq!(chord[0][c], 1.0);
            assert_eq!(chord[1][c], 0.0);
            // U = (1 - t) corner + t far with t = 1 - U_c.
            let t = 1.0 - u[c];
            for j in 0..3 {
                let point = (1.0 - t) * chord[0][j] + t * chord[1][j];
                assert!((point - u[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_simplex(CouplingKind::Race, 77, 24).unwrap();
        let b = render_simplex(CouplingKind::Race, 77, 24).unwrap();
        assert_eq!(a.cells(), b.cells());
        assert_eq!(a.to_svg(), b.to_svg());
    }

    #[test]
    fn star_and_bad_resolutions_are_rejected() {
        assert!(render_simplex(CouplingKind::Star, 1, 16).is_err());
        assert!(render_simplex(CouplingKind::Clock, 1, 0).is_err());
        assert!(render_simplex(CouplingKind::Clock, 1, MAX_RESOLUTION + 1).is_err());
    }

    #[test]
    fn svg_has_expected_structure() {
        let render = render_simplex(CouplingKind::Clock, 11, 8).unwrap();
        let svg = render.to_svg();
        assert!(svg.starts_with("<!-- coupling: ii | seed: 11 | resolution: 8"));
        assert!(svg.contains("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<line ").count(), 3);
        assert_eq!(svg.matches("<circle ").count(), 1);
        assert_eq!(svg.matches("<polygon ").count(), 64 + 1);

        let race = render_simplex(CouplingKind::Race, 11, 8).unwrap().to_svg();
        assert_eq!(race.matches("<line ").count(), 0);
        assert_eq!(race.matches("<circle ").count(), 0);
    }

    #[test]
    fn clock_region_areas_average_one_third() {
        // Expected area of region i equals E[a_i] = 1/3 over a uniform
        // pivot; the centroid grid is symmetric under relabeling, so the
        // estimator is unbiased. 4 sigma band from the across-seed spread.
        let n_seeds = 1_000u64;
        let mut sums = [0.0f64; 3];
        let mut sq_sums = [0.0f64; 3];
        for seed in 0..n_seeds {
            let areas = render_simplex(CouplingKind::Clock, seed, 48)
                .unwrap()
                .region_areas();
            for i in 0..3 {
                sums[i] += areas[i];
                sq_sums[i] += areas[i] * areas[i];
            }
        }
        let n = n_seeds as f64;
        for i in 0..3 {
            let mean = sums[i] / n;
            let var = (sq_sums[i] / n - mean * mean).max(0.0);
            let stderr = (var / n).sqrt();
            assert!(
                (mean - 1.0 / 3.0).abs() <= 4.0 * stderr,
                "region {i}: mean {mean}, stderr {stderr}"
            );
        }
    }
}

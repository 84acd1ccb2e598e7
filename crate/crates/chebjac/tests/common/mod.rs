#![allow(dead_code)]
//! Dense reference implementation used by the integration suites.
//!
//! The operator is assembled as an explicit matrix over the unknowns with
//! boundary conditions folded into the matrix and right-hand side, from
//! tap tables written out here by hand. Sweeps and solves then follow the
//! textbook formulas on plain vectors. Nothing below calls the library's
//! fused kernels, so agreement is evidence, not tautology.

use chebjac::{Field, Grid, Layout, Problem, StencilSpec};

/// Dense form of a problem: `mat * x = rhs` over the unknowns in row-major
/// order, with `diag` the splitting diagonal (the stencil's center
/// coefficient, which boundary folding may shift inside `mat`).
pub struct Dense {
    pub n: usize,
    pub mat: Vec<f64>,
    pub rhs: Vec<f64>,
    pub diag: f64,
    sites: Vec<[isize; 3]>,
    grid: Grid,
}

/// Stencil taps as (offset, coefficient) pairs plus the center coefficient.
fn tap_table(spec: &StencilSpec, h: f64) -> (Vec<([isize; 3], f64)>, f64) {
    let h2 = h * h;
    let mut taps = Vec::new();
    if spec.dims() == 3 {
        let c = 1.0 / h2;
        for (a, s) in [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)] {
            let mut off = [0isize; 3];
            off[a as usize] = s;
            taps.push((off, c));
        }
        return (taps, -6.0 / h2);
    }
    let (a, b) = (spec.a() as f64, spec.b() as f64);
    if spec.reach() == 2 {
        let s = 1.0 / (24.0 * b * h2);
        let near = 32.0 * a * s;
        let far = -2.0 * a * s;
        let diag_near = 16.0 * (b - a) * s;
        let diag_far = -(b - a) * s;
        for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            taps.push(([di, dj, 0], near));
            taps.push(([2 * di, 2 * dj, 0], far));
        }
        for (di, dj) in [(-1, -1), (-1, 1), (1, -1), (1, 1)] {
            taps.push(([di, dj, 0], diag_near));
            taps.push(([2 * di, 2 * dj, 0], diag_far));
        }
        (taps, -60.0 * (a + b) * s)
    } else {
        let side = a / (b * h2);
        let diag = (b - a) / (2.0 * b * h2);
        for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            taps.push(([di, dj, 0], side));
        }
        if diag != 0.0 {
            for (di, dj) in [(-1, -1), (-1, 1), (1, -1), (1, 1)] {
                taps.push(([di, dj, 0], diag));
            }
        }
        (taps, -2.0 * (a + b) / (b * h2))
    }
}

/// Result of folding a tap site through the boundary conditions: either a
/// scaled reference to an unknown plus a constant, or pure constant.
struct Folded {
    site: Option<[isize; 3]>,
    scale: f64,
    constant: f64,
}

/// Pushes `site` back into the unknown box axis by axis. Mirrors handle
/// Neumann faces, the affine rule handles cell Dirichlet faces, and any
/// vertex-layout site left outside the open interior is a stored boundary
/// sample. Sites outside on several axes assume all faces share one
/// boundary function, which every test problem here honors.
fn fold(grid: &Grid, mut site: [isize; 3]) -> Folded {
    let dims = grid.dims();
    let mut scale = 1.0;
    let mut constant = 0.0;
    for a in 0..dims {
        let n = grid.zones(a) as isize;
        let (lo, hi) = grid.unknown_range(a);
        while site[a] < lo || site[a] > hi {
            let side_lo = site[a] < lo;
            let face = if side_lo {
                &grid.bc(a).lo
            } else {
                &grid.bc(a).hi
            };
            match (grid.layout(), face) {
                (Layout::Vertex, chebjac::FaceBc::Dirichlet(_)) => {
                    // Stored node or sampled ghost: a plain boundary value.
                    let g = boundary_value(grid, site);
                    return Folded {
                        site: None,
                        scale: 0.0,
                        constant: constant + scale * g,
                    };
                }
                (Layout::Vertex, chebjac::FaceBc::Neumann) => {
                    site[a] = if side_lo { -site[a] } else { 2 * n - site[a] };
                }
                (Layout::Cell, chebjac::FaceBc::Neumann) => {
                    site[a] = if side_lo {
                        -site[a] - 1
                    } else {
                        2 * n - 1 - site[a]
                    };
                }
                (Layout::Cell, chebjac::FaceBc::Dirichlet(f)) => {
                    // ghost = 2 g(face) - u(adjacent cell).
                    let mut pos = [0.0f64; 3];
                    for t in 0..dims {
                        pos[t] = grid.coord(t, site[t]);
                    }
                    pos[a] = if side_lo { 0.0 } else { grid.extent(a) };
                    constant += scale * 2.0 * f(pos[0], pos[1], pos[2]);
                    scale = -scale;
                    site[a] = if side_lo { 0 } else { n - 1 };
                }
            }
        }
    }
    Folded {
        site: Some(site),
        scale,
        constant,
    }
}

/// Boundary sample at a vertex-layout site outside the open interior,
/// using the face function of the first out-of-interior axis (all test
/// problems share one function across faces).
fn boundary_value(grid: &Grid, site: [isize; 3]) -> f64 {
    let dims = grid.dims();
    let mut pos = [0.0f64; 3];
    for t in 0..dims {
        pos[t] = grid.coord(t, site[t]);
    }
    for a in 0..dims {
        let (lo, hi) = grid.unknown_range(a);
        if site[a] < lo || site[a] > hi {
            let face = if site[a] < lo {
                &grid.bc(a).lo
            } else {
                &grid.bc(a).hi
            };
            if let chebjac::FaceBc::Dirichlet(f) = face {
                return f(pos[0], pos[1], pos[2]);
            }
        }
    }
    panic!("site {site:?} is not on a Dirichlet boundary");
}

impl Dense {
    pub fn assemble(problem: &Problem) -> Dense {
        let grid = problem.grid().clone();
        let dims = grid.dims();
        let (taps, diag) = tap_table(problem.stencil(), grid.h());

        let mut sites = Vec::new();
        problem.rhs().for_each_unknown(|i, j, k, _| {
            sites.push([i, j, k]);
        });
        let n = sites.len();
        let index = |s: [isize; 3]| -> usize {
            sites
                .iter()
                .position(|t| *t == s)
                .expect("folded site is an unknown")
        };

        let mut mat = vec![0.0f64; n * n];
        let mut rhs = vec![0.0f64; n];
        for (row, &site) in sites.iter().enumerate() {
            rhs[row] = problem.rhs().at(site[0], site[1], site[2]);
            mat[row * n + row] += diag;
            for &(off, c) in &taps {
                let mut q = site;
                for a in 0..dims {
                    q[a] += off[a];
                }
                let f = fold(&grid, q);
                if let Some(s) = f.site {
                    mat[row * n + index(s)] += c * f.scale;
                }
                rhs[row] -= c * f.constant;
            }
        }
        Dense {
            n,
            mat,
            rhs,
            diag,
            sites,
            grid,
        }
    }

    pub fn extract(&self, u: &Field) -> Vec<f64> {
        self.sites.iter().map(|s| u.at(s[0], s[1], s[2])).collect()
    }

    pub fn inject(&self, v: &[f64], reach: usize) -> Field {
        assert_eq!(v.len(), self.n);
        let mut f = Field::zeros(&self.grid, reach).unwrap();
        let mut it = v.iter();
        f.map_unknowns(|_, _, _, _| *it.next().unwrap());
        f
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0f64; self.n];
        for r in 0..self.n {
            let row = &self.mat[r * self.n..(r + 1) * self.n];
            out[r] = row.iter().zip(u).map(|(a, x)| a * x).sum();
        }
        out
    }

    pub fn jacobi_sweep(&self, u: &[f64], omega: f64) -> Vec<f64> {
        let au = self.apply(u);
        (0..self.n)
            .map(|r| u[r] + omega / self.diag * (self.rhs[r] - au[r]))
            .collect()
    }

    /// In-place lexicographic SOR sweep, the Gauss-Seidel oracle at ω = 1.
    pub fn sor_sweep(&self, u: &mut [f64], omega: f64) {
        for r in 0..self.n {
            let row = &self.mat[r * self.n..(r + 1) * self.n];
            let au: f64 = row.iter().zip(u.iter()).map(|(a, x)| a * x).sum();
            u[r] += omega / self.diag * (self.rhs[r] - au);
        }
    }

    /// Exact discrete solution by LU with partial pivoting. Requires at
    /// least one Dirichlet face (the all-Neumann matrix is singular).
    pub fn solve(&self) -> Vec<f64> {
        lu_solve(&self.mat, &self.rhs)
    }
}

pub fn lu_solve(mat: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let mut x = b.to_vec();
    let mut piv: Vec<usize> = (0..n).collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| {
                a[piv[i] * n + c]
                    .abs()
                    .total_cmp(&a[piv[j] * n + c].abs())
            })
            .unwrap();
        piv.swap(c, p);
        let pc = piv[c];
        let d = a[pc * n + c];
        assert!(d.abs() > 0.0, "singular matrix at column {c}");
        for r in c + 1..n {
            let pr = piv[r];
            let m = a[pr * n + c] / d;
            if m == 0.0 {
                continue;
            }
            a[pr * n + c] = 0.0;
            for k in c + 1..n {
                a[pr * n + k] -= m * a[pc * n + k];
            }
            x[pr] -= m * x[pc];
        }
    }
    let mut out = vec![0.0f64; n];
    for c in (0..n).rev() {
        let pc = piv[c];
        let mut s = x[pc];
        for k in c + 1..n {
            s -= a[pc * n + k] * out[k];
        }
        out[c] = s / a[pc * n + c];
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn l2_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Deterministic pseudo-random numbers in [-0.5, 0.5) for test fields.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

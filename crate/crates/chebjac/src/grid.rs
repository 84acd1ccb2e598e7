//! Uniform Cartesian grids, halo-padded scalar fields, and boundary filling.
//!
//! Two node layouts are supported. `Vertex` places nodes on face corners,
//! N+1 per axis at spacing L/N, with the outermost nodes carrying Dirichlet
//! data. `Cell` places N zone centers per axis at (i+1/2)L/N. Any grid with
//! a Neumann face uses the cell layout, so mirror reflection about the face
//! is exact; Dirichlet data on a cell-layout face enters through linear
//! ghost extrapolation.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Boundary-value function of physical position (x, y, z). In 2D, z = 0.
pub type BoundaryFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Node placement along every axis of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// N+1 nodes per axis on zone corners; boundary nodes hold Dirichlet values.
    Vertex,
    /// N nodes per axis on zone centers; faces lie between node and ghost.
    Cell,
}

/// Boundary condition on a single face.
#[derive(Clone)]
pub enum FaceBc {
    /// Values prescribed by a function of position, sampled wherever the
    /// halo needs them: at ghost coordinates for vertex layouts, at the
    /// face pierce point (for extrapolation) on cell layouts.
    Dirichlet(BoundaryFn),
    /// Zero normal derivative, realized as mirror reflection.
    Neumann,
}

impl FaceBc {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, FaceBc::Dirichlet(_))
    }

    /// Dirichlet boundary with the same constant on the whole face.
    pub fn dirichlet_const(value: f64) -> Self {
        FaceBc::Dirichlet(Arc::new(move |_, _, _| value))
    }

    /// Dirichlet boundary sampled from a function of position.
    pub fn dirichlet(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FaceBc::Dirichlet(Arc::new(f))
    }
}

impl std::fmt::Debug for FaceBc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaceBc::Dirichlet(_) => f.write_str("Dirichlet(..)"),
            FaceBc::Neumann => f.write_str("Neumann"),
        }
    }
}

/// Boundary conditions on the low and high faces of one axis.
#[derive(Clone, Debug)]
pub struct AxisBc {
    pub lo: FaceBc,
    pub hi: FaceBc,
}

impl AxisBc {
    pub fn neumann() -> Self {
        AxisBc {
            lo: FaceBc::Neumann,
            hi: FaceBc::Neumann,
        }
    }

    pub fn dirichlet(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        AxisBc {
            lo: FaceBc::Dirichlet(f.clone()),
            hi: FaceBc::Dirichlet(f),
        }
    }

    pub fn face(&self, side: Side) -> &FaceBc {
        match side {
            Side::Lo => &self.lo,
            Side::Hi => &self.hi,
        }
    }

    pub fn has_neumann(&self) -> bool {
        !self.lo.is_dirichlet() || !self.hi.is_dirichlet()
    }

    pub fn has_dirichlet(&self) -> bool {
        self.lo.is_dirichlet() || self.hi.is_dirichlet()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// Uniform Cartesian mesh: zone counts, physical extents, layout, and
/// boundary conditions. Spacing is uniform and identical on every axis.
#[derive(Clone, Debug)]
pub struct Grid {
    dims: usize,
    zones: [usize; 3],
    extent: [f64; 3],
    layout: Layout,
    bc: [AxisBc; 3],
}

impl Grid {
    /// Builds a grid with `zones[a]` zones on axis `a`. `zones`, `extent`,
    /// and `bc` must all have length 2 or 3. Spacing extent/zones must agree
    /// across axes to within 1e-12 relative.
    pub fn new(layout: Layout, zones: &[usize], extent: &[f64], bc: Vec<AxisBc>) -> Result<Grid> {
        let dims = zones.len();
        if !(2..=3).contains(&dims) {
            return Err(Error::config(format!("dims must be 2 or 3, got {dims}")));
        }
        if extent.len() != dims || bc.len() != dims {
            return Err(Error::config(
                "zones, extent, and bc must have matching lengths",
            ));
        }
        let mut z = [1usize; 3];
        let mut e = [0.0f64; 3];
        for a in 0..dims {
            if zones[a] < 4 {
                return Err(Error::config(format!(
                    "axis {a} has {} zones; at least 4 required",
                    zones[a]
                )));
            }
            if !(extent[a] > 0.0) || !extent[a].is_finite() {
                return Err(Error::config(format!("axis {a} extent must be positive")));
            }
            z[a] = zones[a];
            e[a] = extent[a];
        }
        let h0 = e[0] / z[0] as f64;
        for a in 1..dims {
            let ha = e[a] / z[a] as f64;
            if ((ha - h0) / h0).abs() > 1e-12 {
                return Err(Error::config(format!(
                    "spacing must be uniform across axes (axis 0: {h0}, axis {a}: {ha})"
                )));
            }
        }
        let mut bcs: [AxisBc; 3] = std::array::from_fn(|_| AxisBc::neumann());
        for (a, axis_bc) in bc.into_iter().enumerate() {
            bcs[a] = axis_bc;
        }
        Ok(Grid {
            dims,
            zones: z,
            extent: e,
            layout,
            bc: bcs,
        })
    }

    /// Square/cube of unit extent.
    pub fn unit(layout: Layout, dims: usize, n: usize, bc: Vec<AxisBc>) -> Result<Grid> {
        Grid::new(layout, &vec![n; dims], &vec![1.0; dims], bc)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Zones on axis `a` (the user-facing resolution N).
    pub fn zones(&self, a: usize) -> usize {
        self.zones[a]
    }

    pub fn extent(&self, a: usize) -> f64 {
        self.extent[a]
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn bc(&self, a: usize) -> &AxisBc {
        &self.bc[a]
    }

    /// Uniform spacing L/N (both layouts).
    pub fn h(&self) -> f64 {
        self.extent[0] / self.zones[0] as f64
    }

    /// Stored nodes per axis: N+1 on vertex layouts, N on cell layouts.
    /// Axes beyond `dims` report 1.
    pub fn nodes(&self, a: usize) -> usize {
        if a >= self.dims {
            return 1;
        }
        match self.layout {
            Layout::Vertex => self.zones[a] + 1,
            Layout::Cell => self.zones[a],
        }
    }

    /// Physical coordinate of logical node index `i` on axis `a`.
    /// Ghost indices (negative or past the last node) extrapolate the
    /// uniform spacing. Axes beyond `dims` sit at 0.
    pub fn coord(&self, a: usize, i: isize) -> f64 {
        if a >= self.dims {
            return 0.0;
        }
        let h = self.h();
        match self.layout {
            Layout::Vertex => i as f64 * h,
            Layout::Cell => (i as f64 + 0.5) * h,
        }
    }

    /// Logical index range of unknowns on axis `a`, inclusive.
    /// Vertex-layout Dirichlet faces pin their boundary node, which is then
    /// not an unknown; every cell-layout node is an unknown.
    pub fn unknown_range(&self, a: usize) -> (isize, isize) {
        if a >= self.dims {
            return (0, 0);
        }
        let n = self.zones[a] as isize;
        match self.layout {
            Layout::Cell => (0, n - 1),
            Layout::Vertex => {
                let lo = if self.bc[a].lo.is_dirichlet() { 1 } else { 0 };
                let hi = if self.bc[a].hi.is_dirichlet() { n - 1 } else { n };
                (lo, hi)
            }
        }
    }

    /// Number of unknowns over all axes.
    pub fn unknown_count(&self) -> usize {
        let mut count = 1usize;
        for a in 0..self.dims {
            let (lo, hi) = self.unknown_range(a);
            count *= (hi - lo + 1) as usize;
        }
        count
    }

    pub fn is_pure_neumann(&self) -> bool {
        (0..self.dims).all(|a| !self.bc[a].lo.is_dirichlet() && !self.bc[a].hi.is_dirichlet())
    }

    /// True if the two grids index the same unknowns (bc functions are not
    /// compared).
    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dims == other.dims
            && self.layout == other.layout
            && self.zones == other.zones
            && (0..self.dims).all(|a| (self.extent[a] - other.extent[a]).abs() <= 1e-12)
    }
}

/// Scalar field over a grid, stored row-major with an explicit halo of
/// `reach` ghost layers on every face, so sweep kernels never branch on
/// boundaries.
#[derive(Clone)]
pub struct Field {
    grid: Grid,
    reach: usize,
    len: [usize; 3],
    stride: [usize; 3],
    data: Vec<f64>,
    // Face-value planes for cell-layout Dirichlet faces, sampled lazily.
    face_cache: [[Option<Vec<f64>>; 2]; 3],
    // Vertex-layout Dirichlet ghost planes are constants; sampled once.
    const_ghosts_done: bool,
}

impl Field {
    /// Zero-initialized field with a halo `reach` ghost layers deep.
    /// Dirichlet data on a cell-layout face requires reach 1: the ghost
    /// extrapolation 2 g(face) − u(adjacent) defines only one layer.
    pub fn zeros(grid: &Grid, reach: usize) -> Result<Field> {
        if !(1..=2).contains(&reach) {
            return Err(Error::config(format!(
                "halo width must be 1 or 2, got {reach}"
            )));
        }
        if grid.layout() == Layout::Cell && reach > 1 {
            for a in 0..grid.dims() {
                if grid.bc(a).has_dirichlet() {
                    return Err(Error::config(
                        "Dirichlet data on a cell-layout axis supports only reach-1 stencils",
                    ));
                }
            }
        }
        let mut len = [1usize; 3];
        for a in 0..3 {
            let halo = if a < grid.dims() { reach } else { 0 };
            len[a] = grid.nodes(a) + 2 * halo;
        }
        let stride = [len[1] * len[2], len[2], 1];
        let total = len[0] * len[1] * len[2];
        Ok(Field {
            grid: grid.clone(),
            reach,
            len,
            stride,
            data: vec![0.0; total],
            face_cache: std::array::from_fn(|_| [None, None]),
            const_ghosts_done: false,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn reach(&self) -> usize {
        self.reach
    }

    fn halo(&self, a: usize) -> usize {
        if a < self.grid.dims() {
            self.reach
        } else {
            0
        }
    }

    /// Flat offset of logical node (i, j, k); ghost indices are negative or
    /// past the last node. In 2D pass k = 0.
    #[inline]
    pub fn idx(&self, i: isize, j: isize, k: isize) -> usize {
        let si = (i + self.halo(0) as isize) as usize;
        let sj = (j + self.halo(1) as isize) as usize;
        let sk = (k + self.halo(2) as isize) as usize;
        si * self.stride[0] + sj * self.stride[1] + sk * self.stride[2]
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize, k: isize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, k: isize, v: f64) {
        let p = self.idx(i, j, k);
        self.data[p] = v;
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn stride(&self, a: usize) -> usize {
        self.stride[a]
    }

    /// Applies `f(i, j, k, value)` over the unknowns in row-major order.
    pub fn map_unknowns(&mut self, mut f: impl FnMut(isize, isize, isize, f64) -> f64) {
        let dims = self.grid.dims();
        let (i0, i1) = self.grid.unknown_range(0);
        let (j0, j1) = self.grid.unknown_range(1);
        let (k0, k1) = if dims == 3 {
            self.grid.unknown_range(2)
        } else {
            (0, 0)
        };
        for i in i0..=i1 {
            for j in j0..=j1 {
                for k in k0..=k1 {
                    let p = self.idx(i, j, k);
                    self.data[p] = f(i, j, k, self.data[p]);
                }
            }
        }
    }

    /// Visits the unknowns in row-major order.
    pub fn for_each_unknown(&self, mut f: impl FnMut(isize, isize, isize, f64)) {
        let dims = self.grid.dims();
        let (i0, i1) = self.grid.unknown_range(0);
        let (j0, j1) = self.grid.unknown_range(1);
        let (k0, k1) = if dims == 3 {
            self.grid.unknown_range(2)
        } else {
            (0, 0)
        };
        for i in i0..=i1 {
            for j in j0..=j1 {
                for k in k0..=k1 {
                    f(i, j, k, self.at(i, j, k));
                }
            }
        }
    }

    /// Mean over the unknowns, accumulated in row-major order.
    pub fn unknown_mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        self.for_each_unknown(|_, _, _, v| {
            sum += v;
            count += 1;
        });
        sum / count as f64
    }

    /// Subtracts the unknown mean; used to pin the free constant of pure
    /// Neumann problems.
    pub fn subtract_unknown_mean(&mut self) -> f64 {
        let mean = self.unknown_mean();
        self.map_unknowns(|_, _, _, v| v - mean);
        mean
    }

    /// Writes vertex-layout Dirichlet boundary nodes from their face
    /// functions. No-op for cell layouts (faces hold no nodes there).
    pub fn set_dirichlet_nodes(&mut self) {
        if self.grid.layout() != Layout::Vertex {
            return;
        }
        let dims = self.grid.dims();
        for axis in 0..dims {
            for side in [Side::Lo, Side::Hi] {
                let f = match self.grid.bc(axis).face(side) {
                    FaceBc::Dirichlet(f) => f.clone(),
                    FaceBc::Neumann => continue,
                };
                let plane: isize = match side {
                    Side::Lo => 0,
                    Side::Hi => self.grid.zones(axis) as isize,
                };
                let (t1, t2) = transverse(axis);
                let n1 = self.grid.nodes(t1) as isize;
                let n2 = self.grid.nodes(t2) as isize;
                for j in 0..n1 {
                    for k in 0..n2 {
                        let mut pos = [0.0f64; 3];
                        pos[axis] = self.grid.coord(axis, plane);
                        pos[t1] = self.grid.coord(t1, j);
                        pos[t2] = self.grid.coord(t2, k);
                        let v = f(pos[0], pos[1], pos[2]);
                        let mut lidx = [0isize; 3];
                        lidx[axis] = plane;
                        lidx[t1] = j;
                        lidx[t2] = k;
                        self.set(lidx[0], lidx[1], lidx[2], v);
                    }
                }
            }
        }
    }

    /// Populates the halo from the boundary conditions.
    ///
    /// Neumann faces mirror interior values about the face. Vertex-layout
    /// Dirichlet faces sample their boundary function at the exact ghost
    /// coordinates (constant in time, so sampled once). Cell-layout
    /// Dirichlet faces extrapolate: ghost = 2 g(face) − u(adjacent).
    /// Faces are processed in axis order with the full transverse extent,
    /// so edge and corner ghosts are finally owned by the last axis that
    /// covers them; the result depends only on interior values, making the
    /// fill idempotent.
    pub fn fill_ghosts(&mut self) {
        let dims = self.grid.dims();
        let layout = self.grid.layout();
        for axis in 0..dims {
            for side in [Side::Lo, Side::Hi] {
                let bc = self.grid.bc(axis).face(side).clone();
                match bc {
                    FaceBc::Neumann => self.mirror_face(axis, side),
                    FaceBc::Dirichlet(f) => match layout {
                        Layout::Vertex => {
                            if !self.const_ghosts_done {
                                self.sample_vertex_ghosts(axis, side, &f);
                            }
                        }
                        Layout::Cell => self.extrapolate_cell_face(axis, side, &f),
                    },
                }
            }
        }
        self.const_ghosts_done = true;
    }

    fn mirror_face(&mut self, axis: usize, side: Side) {
        let n = self.grid.zones(axis) as isize;
        let layout = self.grid.layout();
        for g in 1..=self.halo(axis) as isize {
            let (ghost, src) = match (side, layout) {
                // Reflection about node 0 / node N (vertex) or about the
                // face between ghost and first cell (cell).
                (Side::Lo, Layout::Vertex) => (-g, g),
                (Side::Hi, Layout::Vertex) => (n + g, n - g),
                (Side::Lo, Layout::Cell) => (-g, g - 1),
                (Side::Hi, Layout::Cell) => (n - 1 + g, n - g),
            };
            self.copy_plane(axis, ghost, src);
        }
    }

    /// Copies the full stored plane `src` of `axis` onto plane `dst`.
    fn copy_plane(&mut self, axis: usize, dst: isize, src: isize) {
        let (t1, t2) = transverse(axis);
        let (l1, l2) = (self.len[t1], self.len[t2]);
        let (s1, s2) = (self.stride[t1], self.stride[t2]);
        let sa = self.stride[axis];
        let halo = self.halo(axis) as isize;
        let d0 = (dst + halo) as usize * sa;
        let s0 = (src + halo) as usize * sa;
        for a in 0..l1 {
            for b in 0..l2 {
                let off = a * s1 + b * s2;
                self.data[d0 + off] = self.data[s0 + off];
            }
        }
    }

    fn sample_vertex_ghosts(&mut self, axis: usize, side: Side, f: &BoundaryFn) {
        let n = self.grid.zones(axis) as isize;
        let (t1, t2) = transverse(axis);
        let halo1 = self.halo(t1) as isize;
        let halo2 = self.halo(t2) as isize;
        let (l1, l2) = (self.len[t1] as isize, self.len[t2] as isize);
        for g in 1..=self.halo(axis) as isize {
            let ghost = match side {
                Side::Lo => -g,
                Side::Hi => n + g,
            };
            for a in 0..l1 {
                for b in 0..l2 {
                    let mut pos = [0.0f64; 3];
                    pos[axis] = self.grid.coord(axis, ghost);
                    pos[t1] = self.grid.coord(t1, a - halo1);
                    pos[t2] = self.grid.coord(t2, b - halo2);
                    let v = f(pos[0], pos[1], pos[2]);
                    let mut lidx = [0isize; 3];
                    lidx[axis] = ghost;
                    lidx[t1] = a - halo1;
                    lidx[t2] = b - halo2;
                    self.set(lidx[0], lidx[1], lidx[2], v);
                }
            }
        }
    }

    fn extrapolate_cell_face(&mut self, axis: usize, side: Side, f: &BoundaryFn) {
        let n = self.grid.zones(axis) as isize;
        let (ghost, adj, face_coord) = match side {
            Side::Lo => (-1isize, 0isize, 0.0),
            Side::Hi => (n, n - 1, self.grid.extent(axis)),
        };
        let (t1, t2) = transverse(axis);
        let halo1 = self.halo(t1) as isize;
        let halo2 = self.halo(t2) as isize;
        let (l1, l2) = (self.len[t1], self.len[t2]);
        let side_ix = match side {
            Side::Lo => 0,
            Side::Hi => 1,
        };
        if self.face_cache[axis][side_ix].is_none() {
            let mut plane = vec![0.0f64; l1 * l2];
            for a in 0..l1 {
                for b in 0..l2 {
                    let mut pos = [0.0f64; 3];
                    pos[axis] = face_coord;
                    pos[t1] = self.grid.coord(t1, a as isize - halo1);
                    pos[t2] = self.grid.coord(t2, b as isize - halo2);
                    plane[a * l2 + b] = f(pos[0], pos[1], pos[2]);
                }
            }
            self.face_cache[axis][side_ix] = Some(plane);
        }
        let plane = self.face_cache[axis][side_ix].take().expect("just cached");
        for a in 0..l1 {
            for b in 0..l2 {
                let mut gi = [0isize; 3];
                gi[axis] = ghost;
                gi[t1] = a as isize - halo1;
                gi[t2] = b as isize - halo2;
                let mut ai = gi;
                ai[axis] = adj;
                let v = 2.0 * plane[a * l2 + b] - self.at(ai[0], ai[1], ai[2]);
                self.set(gi[0], gi[1], gi[2], v);
            }
        }
        self.face_cache[axis][side_ix] = Some(plane);
    }
}

fn transverse(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Max over unknowns of |u − v|, the residual norm used throughout.
pub fn inf_norm_diff(u: &Field, v: &Field) -> Result<f64> {
    if !u.grid().same_shape(v.grid()) {
        return Err(Error::config("inf_norm_diff requires identically shaped grids"));
    }
    let mut max = 0.0f64;
    u.for_each_unknown(|i, j, k, a| {
        let d = (a - v.at(i, j, k)).abs();
        if d > max {
            max = d;
        }
    });
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell_neumann_2d(n: usize) -> Grid {
        Grid::unit(Layout::Cell, 2, n, vec![AxisBc::neumann(), AxisBc::neumann()]).unwrap()
    }

    #[test]
    fn constant_field_neumann_halo_is_constant() {
        let grid = cell_neumann_2d(4);
        let mut f = Field::zeros(&grid, 2).unwrap();
        f.map_unknowns(|_, _, _, _| 7.5);
        f.fill_ghosts();
        for i in -2..6isize {
            for j in -2..6isize {
                assert_eq!(f.at(i, j, 0), 7.5, "halo at ({i},{j})");
            }
        }
    }

    #[test]
    fn vertex_dirichlet_halo_matches_analytic_samples() {
        let g = |x: f64, y: f64, _z: f64| -(x * y).exp();
        let grid = Grid::unit(
            Layout::Vertex,
            2,
            6,
            vec![AxisBc::dirichlet(g), AxisBc::dirichlet(g)],
        )
        .unwrap();
        let mut f = Field::zeros(&grid, 1).unwrap();
        f.map_unknowns(|i, j, _, _| {
            g(grid.coord(0, i), grid.coord(1, j), 0.0)
        });
        f.set_dirichlet_nodes();
        f.fill_ghosts();
        let h = grid.h();
        for j in -1..=7isize {
            let expect = g(-h, j as f64 * h, 0.0);
            assert!((f.at(-1, j, 0) - expect).abs() < 1e-15, "lo ghost at j={j}");
        }
        for i in -1..=7isize {
            let expect = g(i as f64 * h, 7.0 * h, 0.0);
            assert!((f.at(i, 7, 0) - expect).abs() < 1e-15, "hi ghost at i={i}");
        }
    }

    #[test]
    fn mixed_4x4_linear_field_halo_by_hand() {
        // u = x on 4x4 cells over the unit square, Dirichlet(u=x) in x,
        // Neumann in y. Centers sit at x = 0.125, 0.375, 0.625, 0.875.
        // Ghost extrapolation continues the linear exactly:
        //   lo: 2*0 - 0.125 = -0.125, hi: 2*1 - 0.875 = 1.125,
        // and the y mirror copies rows unchanged.
        let grid = Grid::unit(
            Layout::Cell,
            2,
            4,
            vec![
                AxisBc::dirichlet(|x, _, _| x),
                AxisBc::neumann(),
            ],
        )
        .unwrap();
        let mut f = Field::zeros(&grid, 1).unwrap();
        f.map_unknowns(|i, _, _, _| grid.coord(0, i));
        f.fill_ghosts();
        for j in 0..4isize {
            assert!((f.at(-1, j, 0) - (-0.125)).abs() < 1e-15);
            assert!((f.at(4, j, 0) - 1.125).abs() < 1e-15);
        }
        // y halos mirror the adjacent rows.
        for i in 0..4isize {
            let x = grid.coord(0, i);
            assert_eq!(f.at(i, -1, 0), x);
            assert_eq!(f.at(i, 4, 0), x);
        }
        // Mixed corners are the mirror of the x ghosts.
        assert_eq!(f.at(-1, -1, 0), f.at(-1, 0, 0));
        assert_eq!(f.at(4, 4, 0), f.at(4, 3, 0));
    }

    #[test]
    fn fill_ghosts_twice_is_bit_identical() {
        let g = |x: f64, y: f64, z: f64| x + 2.0 * y - z;
        let grid = Grid::new(
            Layout::Cell,
            &[4, 5, 4],
            &[0.8, 1.0, 0.8],
            vec![
                AxisBc {
                    lo: FaceBc::Neumann,
                    hi: FaceBc::dirichlet(g),
                },
                AxisBc::neumann(),
                AxisBc {
                    lo: FaceBc::Neumann,
                    hi: FaceBc::dirichlet(g),
                },
            ],
        )
        .unwrap();
        let mut f = Field::zeros(&grid, 1).unwrap();
        let mut t = 0.0f64;
        f.map_unknowns(|_, _, _, _| {
            t += 1.0;
            (t * 0.7).sin()
        });
        f.fill_ghosts();
        let first = f.data().to_vec();
        f.fill_ghosts();
        assert_eq!(first, f.data(), "second fill changed the halo");
    }

    #[test]
    fn neumann_mirror_preserves_even_symmetry() {
        // Field symmetric about the x faces stays symmetric including ghosts.
        let grid = cell_neumann_2d(6);
        let mut f = Field::zeros(&grid, 2).unwrap();
        f.map_unknowns(|i, j, _, _| {
            let x = grid.coord(0, i) - 0.5;
            (std::f64::consts::PI * x).cos() + 0.1 * j as f64
        });
        f.fill_ghosts();
        for j in 0..6isize {
            for g in 1..=2isize {
                assert_eq!(f.at(-g, j, 0), f.at(g - 1, j, 0));
                assert_eq!(f.at(5 + g, j, 0), f.at(6 - g, j, 0));
            }
        }
    }

    #[test]
    fn inf_norm_diff_examples() {
        let grid = cell_neumann_2d(8);
        let mut u = Field::zeros(&grid, 1).unwrap();
        let v = Field::zeros(&grid, 1).unwrap();
        assert_eq!(inf_norm_diff(&u, &v).unwrap(), 0.0);
        u.set(3, 5, 0, 1e-3);
        assert_eq!(inf_norm_diff(&u, &v).unwrap(), 1e-3);
        assert_eq!(inf_norm_diff(&v, &u).unwrap(), 1e-3);
    }

    #[test]
    fn inf_norm_diff_matches_scalar_loop() {
        let grid = cell_neumann_2d(8);
        let mut u = Field::zeros(&grid, 1).unwrap();
        let mut v = Field::zeros(&grid, 1).unwrap();
        let mut s = 1u64;
        let mut next = move || {
            // Small LCG; only determinism matters here.
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        u.map_unknowns(|_, _, _, _| next());
        v.map_unknowns(|_, _, _, _| next());
        let mut expect = 0.0f64;
        u.for_each_unknown(|i, j, k, a| {
            expect = expect.max((a - v.at(i, j, k)).abs());
        });
        assert_eq!(inf_norm_diff(&u, &v).unwrap(), expect);
    }

    #[test]
    fn cell_dirichlet_rejects_wide_halo() {
        let grid = Grid::unit(
            Layout::Cell,
            2,
            4,
            vec![AxisBc::dirichlet(|x, _, _| x), AxisBc::neumann()],
        )
        .unwrap();
        assert!(Field::zeros(&grid, 2).is_err());
        assert!(Field::zeros(&grid, 1).is_ok());
    }

    #[test]
    fn grid_rejects_tiny_and_anisotropic() {
        assert!(Grid::unit(Layout::Cell, 2, 3, vec![AxisBc::neumann(); 2]).is_err());
        assert!(Grid::new(
            Layout::Cell,
            &[4, 8],
            &[1.0, 1.0],
            vec![AxisBc::neumann(), AxisBc::neumann()]
        )
        .is_err());
    }
}

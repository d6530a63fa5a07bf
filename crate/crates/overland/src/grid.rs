//! Structured grid, cell-centered fields, flow state and topography.
//!
//! Fields are stored row-major with a one-cell ghost ring on every side;
//! interior cell (i, j) has i in 0..nx, j in 0..ny and ghosts live at
//! index -1 and nx (resp. ny). 1D problems are the same code with ny = 1.

/// Uniform structured grid. Cell (i, j) is centered at
/// (origin_x + (i + 1/2) dx, origin_y + (j + 1/2) dy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuredGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl StructuredGrid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin_x: f64, origin_y: f64) -> Self {
        assert!(nx >= 1 && ny >= 1, "grid must have at least one cell per direction");
        assert!(dx > 0.0 && dy > 0.0, "cell sizes must be positive");
        StructuredGrid { nx, ny, dx, dy, origin_x, origin_y }
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin_x + (i as f64 + 0.5) * self.dx,
            self.origin_y + (j as f64 + 0.5) * self.dy,
        )
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.ny == 1
    }
}

/// Cell-centered scalar field with a one-cell ghost ring.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &StructuredGrid) -> Self {
        Field {
            nx: grid.nx,
            ny: grid.ny,
            data: vec![0.0; (grid.nx + 2) * (grid.ny + 2)],
        }
    }

    /// Build a field from a function of the interior cell index.
    pub fn from_fn(grid: &StructuredGrid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut field = Field::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                field.set(i as isize, j as isize, f(i, j));
            }
        }
        field
    }

    pub fn constant(grid: &StructuredGrid, value: f64) -> Self {
        Field::from_fn(grid, |_, _| value)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    fn raw(&self, i: isize, j: isize) -> usize {
        debug_assert!(i >= -1 && i <= self.nx as isize, "i = {i} out of range");
        debug_assert!(j >= -1 && j <= self.ny as isize, "j = {j} out of range");
        (j + 1) as usize * (self.nx + 2) + (i + 1) as usize
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        self.data[self.raw(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, value: f64) {
        let k = self.raw(i, j);
        self.data[k] = value;
    }

    /// Full ghosted row j (j may be -1 or ny), length nx + 2.
    #[inline]
    pub fn row(&self, j: isize) -> &[f64] {
        let start = self.raw(-1, j);
        &self.data[start..start + self.nx + 2]
    }

    /// Gather the full ghosted column i into `out` (length ny + 2).
    pub fn gather_column(&self, i: isize, out: &mut Vec<f64>) {
        out.clear();
        for j in -1..=self.ny as isize {
            out.push(self.get(i, j));
        }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Row-major stride of the ghosted storage.
    pub(crate) fn stride(&self) -> usize {
        self.nx + 2
    }

    pub fn min_interior(&self) -> f64 {
        let mut m = f64::INFINITY;
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                m = m.min(self.get(i, j));
            }
        }
        m
    }

    pub fn max_interior(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                m = m.max(self.get(i, j));
            }
        }
        m
    }

    pub fn max_abs_interior(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.ny as isize {
            for i in 0..self.nx as isize {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }
}

/// Conserved flow variables: depth h and discharges (hu, hv).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub h: Field,
    pub qx: Field,
    pub qy: Field,
    pub time: f64,
}

impl FlowState {
    pub fn new(grid: &StructuredGrid) -> Self {
        FlowState {
            h: Field::zeros(grid),
            qx: Field::zeros(grid),
            qy: Field::zeros(grid),
            time: 0.0,
        }
    }
}

/// Bed elevation per cell. Slopes are never stored; they enter through the
/// reconstructed interface values and the centered source term.
#[derive(Debug, Clone, PartialEq)]
pub struct Topography {
    pub z: Field,
}

impl Topography {
    pub fn flat(grid: &StructuredGrid) -> Self {
        Topography { z: Field::zeros(grid) }
    }

    pub fn from_fn(grid: &StructuredGrid, f: impl FnMut(usize, usize) -> f64) -> Self {
        Topography { z: Field::from_fn(grid, f) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Gravitational acceleration [m/s^2].
    pub g: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { g: 9.81 }
    }
}

/// Guarded velocity u = q / h; zero below the dry threshold.
#[inline]
pub fn primitive_velocity(h: f64, q: f64, h_dry: f64) -> f64 {
    if h >= h_dry {
        q / h
    } else {
        0.0
    }
}

/// Total water volume, accumulated row-major (fixed deterministic order).
pub fn total_water_volume(state: &FlowState, grid: &StructuredGrid) -> f64 {
    let area = grid.cell_area();
    let mut volume = 0.0;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            volume += state.h.get(i, j) * area;
        }
    }
    volume
}

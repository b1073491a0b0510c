//! Structured triangulation of the periodic cell [0, Λ] × [h₀, H].
//!
//! Grid columns are i = 0..=nx and rows r = 0..=ny. Column 0 is identified
//! with column nx and carries no basis nodes. Basis nodes are numbered with
//! the non-bottom rows first, row by row, followed by the bottom row.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Top,
    Bottom,
}

#[derive(Clone, Debug)]
pub struct PeriodicCellMesh {
    lambda: f64,
    h0: f64,
    top: f64,
    h_target: f64,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    nodes: Vec<[f64; 2]>,
    node_class: Vec<NodeClass>,
    triangles: Vec<[usize; 3]>,
    tri_coords: Vec<[[f64; 2]; 3]>,
}

/// Ordering of basis nodes relative to the natural row-major grid order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOrdering {
    pub m: usize,
    pub m_prime: usize,
    /// `perm[natural] = basis index`, natural index = r·nx + (i−1).
    pub perm: Vec<usize>,
}

impl NodeOrdering {
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (k, &p) in self.perm.iter().enumerate() {
            inv[p] = k;
        }
        inv
    }
}

/// Mesh with nx = ceil(Λ/h) columns and ny = ceil((H−h₀)/h) rows.
pub fn build_periodic_mesh(lambda: f64, h0: f64, top: f64, h: f64) -> Result<PeriodicCellMesh> {
    if !(lambda > 0.0 && top > h0) {
        return Err(Error::Parameter(format!("degenerate cell: Λ = {lambda}, band [{h0}, {top}]")));
    }
    if !(h > 0.0 && h <= top - h0 && h <= lambda) {
        return Err(Error::Parameter(format!("mesh size h = {h} outside (0, min(Λ, H−h0)]")));
    }
    let nx = (lambda / h - 1e-12).ceil() as usize;
    let ny = ((top - h0) / h - 1e-12).ceil() as usize;
    let mut mesh = PeriodicCellMesh::structured(lambda, h0, top, nx.max(2), ny.max(1))?;
    mesh.h_target = h;
    Ok(mesh)
}

impl PeriodicCellMesh {
    /// Mesh with explicit column and row counts.
    pub fn structured(lambda: f64, h0: f64, top: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 1 || !(lambda > 0.0) || !(top > h0) {
            return Err(Error::Parameter(format!("structured mesh needs nx >= 2, ny >= 1, got {nx} x {ny}")));
        }
        let dx = lambda / nx as f64;
        let dy = (top - h0) / ny as f64;
        let m = nx * ny;
        let mut nodes = vec![[0.0; 2]; m + nx];
        let mut node_class = vec![NodeClass::Interior; m + nx];
        for r in 0..=ny {
            for i in 1..=nx {
                let k = dof(nx, ny, i, r);
                nodes[k] = [i as f64 * dx, h0 + r as f64 * dy];
                node_class[k] = if r == 0 {
                    NodeClass::Bottom
                } else if r == ny {
                    NodeClass::Top
                } else {
                    NodeClass::Interior
                };
            }
        }
        // Top row keeps exact H.
        for i in 1..=nx {
            nodes[dof(nx, ny, i, ny)][1] = top;
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        let mut tri_coords = Vec::with_capacity(2 * nx * ny);
        let pt = |i: usize, r: usize| [i as f64 * dx, if r == ny { top } else { h0 + r as f64 * dy }];
        for c in 0..nx {
            for r in 0..ny {
                let (a, b, cc, d) = ((c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1));
                for tri in [[a, b, cc], [a, cc, d]] {
                    triangles.push(tri.map(|(i, r)| dof(nx, ny, i, r)));
                    tri_coords.push(tri.map(|(i, r)| pt(i, r)));
                }
            }
        }
        Ok(Self {
            lambda,
            h0,
            top,
            h_target: dx.max(dy),
            nx,
            ny,
            dx,
            dy,
            nodes,
            node_class,
            triangles,
            tri_coords,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn h_target(&self) -> f64 {
        self.h_target
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Number of non-bottom basis nodes.
    pub fn m(&self) -> usize {
        self.nx * self.ny
    }

    /// Total number of basis nodes.
    pub fn m_prime(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    /// Basis node coordinates; the node of column nx sits at x₁ = Λ.
    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn node_class(&self) -> &[NodeClass] {
        &self.node_class
    }

    /// Triangles as basis-node indices (periodic wrap already applied).
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Unwrapped vertex coordinates of each triangle.
    pub fn triangle_coords(&self) -> &[[[f64; 2]; 3]] {
        &self.tri_coords
    }

    /// Triangles are stored column by column; this is the range of column c.
    pub fn column_triangles(&self, c: usize) -> std::ops::Range<usize> {
        2 * c * self.ny..2 * (c + 1) * self.ny
    }

    /// Basis index of grid point (i, r), i ∈ 0..=nx, r ∈ 0..=ny.
    pub fn dof(&self, i: usize, r: usize) -> usize {
        dof(self.nx, self.ny, i, r)
    }

    /// Top-boundary basis nodes ordered by column 1..=nx.
    pub fn top_nodes(&self) -> Vec<usize> {
        (1..=self.nx).map(|i| self.dof(i, self.ny)).collect()
    }

    /// Bottom-boundary basis nodes ordered by column 1..=nx.
    pub fn bottom_nodes(&self) -> Vec<usize> {
        (1..=self.nx).map(|i| self.dof(i, 0)).collect()
    }

    /// Triangle containing x (x₁ taken modulo Λ, x₂ clamped to the band)
    /// and the barycentric coordinates of x in it.
    pub fn locate(&self, x: [f64; 2]) -> (usize, [f64; 3]) {
        let x1 = x[0].rem_euclid(self.lambda);
        let fx = x1 / self.dx;
        let fy = ((x[1] - self.h0) / self.dy).clamp(0.0, self.ny as f64);
        let c = (fx.floor() as usize).min(self.nx - 1);
        let r = (fy.floor() as usize).min(self.ny - 1);
        let (xi, eta) = (fx - c as f64, fy - r as f64);
        let base = 2 * (c * self.ny + r);
        if xi >= eta {
            (base, [1.0 - xi, xi - eta, eta])
        } else {
            (base + 1, [1.0 - eta, xi, eta - xi])
        }
    }

    /// Natural-to-basis permutation and the counts M, M′.
    pub fn node_ordering(&self) -> NodeOrdering {
        let mut perm = Vec::with_capacity(self.m_prime());
        for r in 0..=self.ny {
            for i in 1..=self.nx {
                perm.push(self.dof(i, r));
            }
        }
        NodeOrdering { m: self.m(), m_prime: self.m_prime(), perm }
    }

    /// Plain-text dump: "x y class" per node, then "i j k" per triangle.
    pub fn write_text(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# nodes {}", self.nodes.len())?;
        for (p, c) in self.nodes.iter().zip(&self.node_class) {
            let tag = match c {
                NodeClass::Interior => "interior",
                NodeClass::Top => "top",
                NodeClass::Bottom => "bottom",
            };
            writeln!(out, "{} {} {}", p[0], p[1], tag)?;
        }
        writeln!(out, "# triangles {}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Basis node count M, M′ and the ordering permutation.
pub fn node_ordering(mesh: &PeriodicCellMesh) -> NodeOrdering {
    mesh.node_ordering()
}

#[inline]
fn dof(nx: usize, ny: usize, i: usize, r: usize) -> usize {
    let i = if i == 0 { nx } else { i };
    if r == 0 {
        nx * ny + i - 1
    } else {
        (r - 1) * nx + i - 1
    }
}

//! Uneven radial mesh with mandatory nodes on layer interfaces.
//!
//! Nodes `r_0 < r_1 < ... < r_{N-1}` cover `[r_min, r_max]`; the step
//! `h_i = r_i - r_{i-1}` is indexed by its right node, so `h_1` is the first
//! step and `h_{N-1}` the last. Every interface between two layers is a node
//! (a *contact node*) and its index is recorded in [`RadialMesh::contacts`].

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{half, Scalar};

/// Minimum number of cells per layer; the contact stencil reaches two nodes
/// to each side and its neighbours must stay tridiagonal.
pub const MIN_CELLS_PER_LAYER: usize = 4;

/// Minimum index distance between consecutive members of `{0} ∪ I* ∪ {N-1}`.
pub const MIN_CONTACT_GAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub r_start: f64,
    pub r_end: f64,
    #[serde(rename = "material")]
    pub material_id: String,
    pub cells: usize,
}

impl LayerSpec {
    pub fn new(r_start: f64, r_end: f64, material_id: impl Into<String>, cells: usize) -> Self {
        Self {
            r_start,
            r_end,
            material_id: material_id.into(),
            cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh<T = f64> {
    nodes: Vec<T>,
    contacts: Vec<usize>,
    cell_layer: Vec<usize>,
    materials: Vec<String>,
    layers: Option<Vec<LayerSpec>>,
}

/// Builds the mesh with a piecewise-constant step inside each layer.
pub fn build_mesh(layers: &[LayerSpec]) -> Result<RadialMesh<f64>> {
    RadialMesh::from_layers(layers)
}

impl<T: Scalar> RadialMesh<T> {
    pub fn from_layers(layers: &[LayerSpec]) -> Result<Self> {
        validate_layers(layers)?;
        let total_cells: usize = layers.iter().map(|l| l.cells).sum();
        let mut nodes = Vec::with_capacity(total_cells + 1);
        let mut contacts = Vec::with_capacity(layers.len().saturating_sub(1));
        let mut cell_layer = Vec::with_capacity(total_cells);
        nodes.push(T::from_f64_exact(layers[0].r_start));
        for (k, layer) in layers.iter().enumerate() {
            let start = T::from_f64_exact(layer.r_start);
            let width = T::from_f64_exact(layer.r_end) - start.clone();
            let cells = T::from_usize(layer.cells);
            for j in 1..layer.cells {
                nodes.push(start.clone() + width.clone() * T::from_usize(j) / cells.clone());
            }
            nodes.push(T::from_f64_exact(layer.r_end));
            cell_layer.extend(std::iter::repeat_n(k, layer.cells));
            if k + 1 < layers.len() {
                contacts.push(nodes.len() - 1);
            }
        }
        let mesh = Self {
            nodes,
            contacts,
            cell_layer,
            materials: layers.iter().map(|l| l.material_id.clone()).collect(),
            layers: Some(layers.to_vec()),
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Builds a mesh from an explicit node list (graded or randomized steps).
    ///
    /// `interfaces` are the contact node indices; layer `k` spans the nodes
    /// between consecutive entries of `{0} ∪ interfaces ∪ {N-1}` and uses
    /// `materials[k]`.
    pub fn from_nodes(nodes: Vec<T>, interfaces: &[usize], materials: &[String]) -> Result<Self> {
        if materials.len() != interfaces.len() + 1 {
            return Err(Error::Structure(format!(
                "{} interfaces need {} materials, got {}",
                interfaces.len(),
                interfaces.len() + 1,
                materials.len()
            )));
        }
        let n = nodes.len();
        if n < 5 {
            return Err(Error::Structure(format!("mesh needs at least 5 nodes, got {n}")));
        }
        let mut cell_layer = Vec::with_capacity(n - 1);
        let mut layer = 0;
        for cell in 0..n - 1 {
            if layer < interfaces.len() && cell >= interfaces[layer] {
                layer += 1;
            }
            cell_layer.push(layer);
        }
        let mesh = Self {
            nodes,
            contacts: interfaces.to_vec(),
            cell_layer,
            materials: materials.to_vec(),
            layers: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n < 5 {
            return Err(Error::Structure(format!("mesh needs at least 5 nodes, got {n}")));
        }
        if self.nodes[0] <= T::zero() {
            return Err(Error::Domain(format!(
                "r_min must be positive, got {:?}",
                self.nodes[0].to_f64_lossy()
            )));
        }
        for i in 1..n {
            if !(self.nodes[i] > self.nodes[i - 1]) || !self.nodes[i].is_finite_value() {
                return Err(Error::Structure(format!("nodes not strictly increasing at index {i}")));
            }
        }
        let mut prev = 0;
        for &c in self.contacts.iter().chain(std::iter::once(&(n - 1))) {
            if c <= prev || c - prev < MIN_CONTACT_GAP {
                return Err(Error::Spacing(format!(
                    "contact/boundary nodes {prev} and {c} are closer than {MIN_CONTACT_GAP} steps"
                )));
            }
            prev = c;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &T {
        &self.nodes[i]
    }

    pub fn r_min(&self) -> &T {
        &self.nodes[0]
    }

    pub fn r_max(&self) -> &T {
        &self.nodes[self.nodes.len() - 1]
    }

    /// Sorted contact node indices `I*`.
    pub fn contacts(&self) -> &[usize] {
        &self.contacts
    }

    /// Number of contact nodes `K`.
    pub fn contact_count(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_contact(&self, i: usize) -> bool {
        self.contacts.binary_search(&i).is_ok()
    }

    pub fn layer_count(&self) -> usize {
        self.materials.len()
    }

    /// Layer index of the cell `[r_cell, r_{cell+1}]`.
    pub fn layer_of_cell(&self, cell: usize) -> usize {
        self.cell_layer[cell]
    }

    pub fn material_of_layer(&self, layer: usize) -> &str {
        &self.materials[layer]
    }

    pub fn layers(&self) -> Option<&[LayerSpec]> {
        self.layers.as_deref()
    }

    /// Layers on the left and right of node `i` (equal except at contacts).
    pub fn layers_at_node(&self, i: usize) -> (usize, usize) {
        let last = self.cell_layer.len() - 1;
        let left = self.cell_layer[i.saturating_sub(1).min(last)];
        let right = self.cell_layer[i.min(last)];
        (left, right)
    }

    /// Step `h_i = r_i - r_{i-1}`, defined for `1 <= i <= N-1`.
    pub fn step(&self, i: usize) -> T {
        debug_assert!(i >= 1 && i < self.nodes.len());
        self.nodes[i].clone() - self.nodes[i - 1].clone()
    }

    pub fn steps(&self) -> Vec<T> {
        (1..self.nodes.len()).map(|i| self.step(i)).collect()
    }

    /// `(ħ_i, r_{i-1/2}, r_{i+1/2})` for interior node `i`.
    pub fn geometry(&self, i: usize) -> Result<(T, T, T)> {
        let n = self.nodes.len();
        if i == 0 || i + 1 >= n {
            return Err(Error::Index {
                index: i,
                range: format!("1..={}", n - 2),
            });
        }
        let r = &self.nodes;
        let hbar = (self.step(i + 1) + self.step(i)) * half::<T>();
        let r_minus = (r[i].clone() + r[i - 1].clone()) * half::<T>();
        let r_plus = (r[i].clone() + r[i + 1].clone()) * half::<T>();
        Ok((hbar, r_minus, r_plus))
    }

    /// True when the step is constant inside every layer, i.e. the scheme is
    /// in its second-order regime. Graded meshes are flagged as first-order.
    pub fn is_piecewise_uniform(&self) -> bool {
        let tol = 1e-9;
        let mut i = 1;
        let n = self.nodes.len();
        while i < n {
            let layer = self.cell_layer[i - 1];
            let h0 = self.step(i).to_f64_lossy();
            let mut j = i + 1;
            while j < n && self.cell_layer[j - 1] == layer {
                let h = self.step(j).to_f64_lossy();
                if (h - h0).abs() > tol * h0 {
                    return false;
                }
                j += 1;
            }
            i = j;
        }
        true
    }

    pub fn to_f64(&self) -> RadialMesh<f64> {
        RadialMesh {
            nodes: self.nodes.iter().map(Scalar::to_f64_lossy).collect(),
            contacts: self.contacts.clone(),
            cell_layer: self.cell_layer.clone(),
            materials: self.materials.clone(),
            layers: self.layers.clone(),
        }
    }
}

impl RadialMesh<f64> {
    /// Exact counterpart: layer-built meshes are re-subdivided in rational
    /// arithmetic, node-built meshes take the exact value of every node.
    pub fn to_exact(&self) -> RadialMesh<BigRational> {
        if let Some(layers) = &self.layers {
            return RadialMesh::from_layers(layers).expect("layers were validated for f64");
        }
        RadialMesh {
            nodes: crate::scalar::to_exact(&self.nodes),
            contacts: self.contacts.clone(),
            cell_layer: self.cell_layer.clone(),
            materials: self.materials.clone(),
            layers: None,
        }
    }
}

fn validate_layers(layers: &[LayerSpec]) -> Result<()> {
    let first = layers
        .first()
        .ok_or_else(|| Error::Structure("at least one layer is required".into()))?;
    if !(first.r_start > 0.0) {
        return Err(Error::Domain(format!("r_min must be positive, got {}", first.r_start)));
    }
    for (k, layer) in layers.iter().enumerate() {
        if !layer.r_start.is_finite() || !layer.r_end.is_finite() || !(layer.r_start < layer.r_end) {
            return Err(Error::Structure(format!(
                "layer {k} has r_start {} not below r_end {}",
                layer.r_start, layer.r_end
            )));
        }
        if layer.cells < MIN_CELLS_PER_LAYER {
            return Err(Error::Spacing(format!(
                "layer {k} has {} cells, at least {MIN_CELLS_PER_LAYER} are required",
                layer.cells
            )));
        }
        if k > 0 && layers[k - 1].r_end != layer.r_start {
            return Err(Error::Structure(format!(
                "layer {} ends at {} but layer {k} starts at {}",
                k - 1,
                layers[k - 1].r_end,
                layer.r_start
            )));
        }
    }
    Ok(())
}

//! Point-group labels for product states and computed eigenvectors.
//!
//! The reflections `P : (x,y) → (−x,−y)`, `Px : (x,y) → (−x,y)` and
//! `Py : (x,y) → (x,−y)` act on a product state `|n_x, n_y⟩` with the signs
//! `(−1)^(n_x+n_y)`, `(−1)^n_x` and `(−1)^n_y`. When `αx = αy` the
//! Hamiltonian also commutes with the diagonal reflections and the 90°
//! rotations, which generate C₄ᵥ.
//!
//! Antiunitary operations (`T`, `Ax = T Px`, `Ay = T Py`) have no matrix
//! representation here; their consequence, a spectrum closed under complex
//! conjugation, is checked on computed spectra instead.

use std::fmt;

use faer::c64;

use crate::eigensolver::Spectrum;
use crate::error::{invalid, Result};
use crate::hamiltonian2d::{BasisIndex, ProductBasis};

/// Spatial symmetry operations on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpatialOp {
    /// `E`
    Identity,
    /// `P : (x,y) → (−x,−y)`, also the C₂ rotation.
    Inversion,
    /// `Px : (x,y) → (−x,y)`
    ReflectX,
    /// `Py : (x,y) → (x,−y)`
    ReflectY,
    /// `σd : (x,y) → (y,x)`
    Swap,
    /// `σd' : (x,y) → (−y,−x)`
    AntiSwap,
    /// `ψ(x,y) → ψ(y,−x)`
    Rotate90,
    /// `ψ(x,y) → ψ(−y,x)`
    Rotate270,
}

impl SpatialOp {
    pub fn name(self) -> &'static str {
        match self {
            SpatialOp::Identity => "E",
            SpatialOp::Inversion => "P",
            SpatialOp::ReflectX => "Px",
            SpatialOp::ReflectY => "Py",
            SpatialOp::Swap => "sigma_d",
            SpatialOp::AntiSwap => "sigma_d'",
            SpatialOp::Rotate90 => "C4",
            SpatialOp::Rotate270 => "C4^3",
        }
    }

    /// Sign picked up by `|n_x, n_y⟩` under the three axis parities, or
    /// `None` for operations that exchange the axes.
    pub fn parity_sign(self, n: BasisIndex) -> Option<i8> {
        let sx = if n.nx.is_multiple_of(2) { 1 } else { -1 };
        let sy = if n.ny.is_multiple_of(2) { 1 } else { -1 };
        match self {
            SpatialOp::Identity => Some(1),
            SpatialOp::Inversion => Some(sx * sy),
            SpatialOp::ReflectX => Some(sx),
            SpatialOp::ReflectY => Some(sy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Ci,
    D2h,
    /// `{E, C₂, σd, σd'}`: the subgroup of C₄ᵥ that leaves `xy` invariant.
    C2v,
    C4v,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Irrep {
    Ag,
    Bg,
    Au,
    Bu,
    A1,
    A2,
    B1,
    B2,
    E,
}

impl Irrep {
    pub fn name(self) -> &'static str {
        match self {
            Irrep::Ag => "Ag",
            Irrep::Bg => "Bg",
            Irrep::Au => "Au",
            Irrep::Bu => "Bu",
            Irrep::A1 => "A1",
            Irrep::A2 => "A2",
            Irrep::B1 => "B1",
            Irrep::B2 => "B2",
            Irrep::E => "E",
        }
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Group {
    pub fn elements(self) -> &'static [SpatialOp] {
        use SpatialOp::*;
        match self {
            Group::Ci => &[Identity, Inversion],
            Group::D2h => &[Identity, Inversion, ReflectX, ReflectY],
            Group::C2v => &[Identity, Inversion, Swap, AntiSwap],
            Group::C4v => &[
                Identity, Inversion, Rotate90, Rotate270, ReflectX, ReflectY, Swap, AntiSwap,
            ],
        }
    }

    pub fn irreps(self) -> &'static [Irrep] {
        use Irrep::*;
        match self {
            Group::Ci => &[Ag, Au],
            Group::D2h => &[Ag, Bg, Au, Bu],
            Group::C2v => &[A1, A2, B1, B2],
            Group::C4v => &[A1, A2, B1, B2, E],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Ci => "Ci",
            Group::D2h => "D2h",
            Group::C2v => "C2v",
            Group::C4v => "C4v",
        }
    }

    /// Character table, rows in the order of [`Group::irreps`], columns in
    /// the order of [`Group::elements`].
    pub fn character(self, irrep: Irrep, op: SpatialOp) -> i8 {
        use Irrep::*;
        let col = self
            .elements()
            .iter()
            .position(|&g| g == op)
            .expect("operation belongs to the group");
        let row: &[i8] = match (self, irrep) {
            (Group::Ci, Ag) => &[1, 1],
            (Group::Ci, Au) => &[1, -1],
            (Group::D2h, Ag) => &[1, 1, 1, 1],
            (Group::D2h, Bg) => &[1, 1, -1, -1],
            (Group::D2h, Au) => &[1, -1, 1, -1],
            (Group::D2h, Bu) => &[1, -1, -1, 1],
            (Group::C2v, A1) => &[1, 1, 1, 1],
            (Group::C2v, A2) => &[1, 1, -1, -1],
            (Group::C2v, B1) => &[1, -1, 1, -1],
            (Group::C2v, B2) => &[1, -1, -1, 1],
            // E, C2, C4, C4³, σx, σy, σd, σd'
            (Group::C4v, A1) => &[1, 1, 1, 1, 1, 1, 1, 1],
            (Group::C4v, A2) => &[1, 1, 1, 1, -1, -1, -1, -1],
            (Group::C4v, B1) => &[1, 1, -1, -1, 1, 1, -1, -1],
            (Group::C4v, B2) => &[1, 1, -1, -1, -1, -1, 1, 1],
            (Group::C4v, E) => &[2, -2, 0, 0, 0, 0, 0, 0],
            _ => panic!("{irrep} is not an irrep of {}", self.name()),
        };
        row[col]
    }

    fn dimension_of(self, irrep: Irrep) -> f64 {
        self.character(irrep, SpatialOp::Identity) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IrrepLabel {
    group: Group,
    irrep: Irrep,
}

impl IrrepLabel {
    pub fn new(group: Group, irrep: Irrep) -> Result<Self> {
        if !group.irreps().contains(&irrep) {
            return Err(invalid(format!(
                "{irrep} is not an irrep of {}",
                group.name()
            )));
        }
        Ok(Self { group, irrep })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn irrep(&self) -> Irrep {
        self.irrep
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.irrep.name())
    }
}

/// A symmetry operation represented on a discrete basis as
/// `(g v)[target[i]] = sign[i] · v[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPermutation {
    target: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(target: Vec<usize>, sign: Vec<i8>) -> Self {
        assert_eq!(target.len(), sign.len());
        Self { target, sign }
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn sign(&self) -> &[i8] {
        &self.sign
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); v.len()];
        for (i, (&t, &s)) in self.target.iter().zip(&self.sign).enumerate() {
            out[t] = v[i] * s as f64;
        }
        out
    }

    /// `Re ⟨v | g v⟩`.
    pub fn expectation(&self, v: &[c64]) -> f64 {
        self.target
            .iter()
            .zip(&self.sign)
            .enumerate()
            .map(|(i, (&t, &s))| (v[t].conj() * v[i]).re * s as f64)
            .sum()
    }
}

/// Discretizations that can represent spatial operations.
pub trait SymmetryAction {
    fn state_dimension(&self) -> usize;

    /// `None` when the discretization is not invariant under `op`
    /// (e.g. an axis exchange on an anisotropic basis).
    fn action(&self, op: SpatialOp) -> Option<SignedPermutation>;
}

/// Label of the product state `|n_x, n_y⟩`.
pub fn basis_irrep(n: BasisIndex, group: Group) -> Result<IrrepLabel> {
    let px = n.nx.is_multiple_of(2);
    let py = n.ny.is_multiple_of(2);
    let irrep = match group {
        Group::Ci => {
            if px == py {
                Irrep::Ag
            } else {
                Irrep::Au
            }
        }
        Group::D2h => match (px, py) {
            (true, true) => Irrep::Ag,
            (false, false) => Irrep::Bg,
            (true, false) => Irrep::Au,
            (false, true) => Irrep::Bu,
        },
        Group::C2v | Group::C4v => {
            return Err(invalid(format!(
                "product states are not adapted to {}; use state_irrep",
                group.name()
            )))
        }
    };
    IrrepLabel::new(group, irrep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateIrrep {
    pub label: IrrepLabel,
    /// Weight of the dominant irrep.
    pub purity: f64,
    /// `purity ≥ threshold`.
    pub definite: bool,
    pub weights: Vec<(Irrep, f64)>,
}

/// Irrep weights of `v` by character projection,
/// `w_Γ = (d_Γ/|G|) Σ_g χ_Γ(g) Re⟨v|g v⟩`, normalised by `⟨v|v⟩`.
pub fn irrep_weights(
    v: &[c64],
    action: &impl SymmetryAction,
    group: Group,
) -> Result<Vec<(Irrep, f64)>> {
    if v.len() != action.state_dimension() {
        return Err(invalid(format!(
            "vector length {} does not match basis dimension {}",
            v.len(),
            action.state_dimension()
        )));
    }
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(invalid("zero vector has no symmetry label"));
    }
    let mut expect = Vec::with_capacity(group.elements().len());
    for &op in group.elements() {
        let g = action.action(op).ok_or_else(|| {
            invalid(format!(
                "operation {} is not a symmetry of this discretization",
                op.name()
            ))
        })?;
        expect.push((op, g.expectation(v) / norm2));
    }
    let order = group.elements().len() as f64;
    Ok(group
        .irreps()
        .iter()
        .map(|&irrep| {
            let s: f64 = expect
                .iter()
                .map(|&(op, e)| group.character(irrep, op) as f64 * e)
                .sum();
            (irrep, group.dimension_of(irrep) / order * s)
        })
        .collect())
}

pub fn state_irrep(
    v: &[c64],
    action: &impl SymmetryAction,
    group: Group,
    purity_threshold: f64,
) -> Result<StateIrrep> {
    if !(purity_threshold > 0.5 && purity_threshold <= 1.0) {
        return Err(invalid(format!(
            "purity threshold must lie in (0.5, 1], got {purity_threshold}"
        )));
    }
    let weights = irrep_weights(v, action, group)?;
    let &(irrep, purity) = weights
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("every group has irreps");
    Ok(StateIrrep {
        label: IrrepLabel::new(group, irrep)?,
        purity,
        definite: purity >= purity_threshold,
        weights,
    })
}

/// A two-dimensional E doublet of C₄ᵥ found in a λ = 0 spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneratePair {
    pub indices: (usize, usize),
    pub parents: (BasisIndex, BasisIndex),
    pub energy: f64,
    pub splitting: f64,
}

/// Index of the largest-magnitude component, as a product-basis label.
pub fn dominant_component(v: &[c64], basis: &ProductBasis) -> BasisIndex {
    let (k, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .expect("non-empty vector");
    basis.index_of(k)
}

/// E-representation doublets: degenerate pairs whose dominant components
/// are `|2m, 2n+1⟩` and `|2m+1, 2n⟩` (swap images, one odd index each).
///
/// The spectrum must carry eigenvectors that are pure under the axis
/// parities; a parity-blocked solve guarantees that even inside degenerate
/// subspaces.
pub fn c4v_degenerate_pairs(
    spec: &Spectrum,
    basis: &ProductBasis,
    tol: f64,
) -> Result<Vec<DegeneratePair>> {
    if !(tol > 0.0) {
        return Err(invalid("degeneracy tolerance must be positive"));
    }
    let vectors = spec
        .eigenvectors()
        .ok_or_else(|| invalid("degenerate-pair detection needs eigenvectors"))?;
    let n = spec.len();
    let parents: Vec<BasisIndex> = (0..n)
        .map(|j| {
            let col: Vec<c64> = (0..vectors.nrows()).map(|i| vectors[(i, j)]).collect();
            dominant_component(&col, basis)
        })
        .collect();
    let values = spec.eigenvalues();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let pi = parents[i];
        if (pi.nx + pi.ny).is_multiple_of(2) {
            continue;
        }
        for j in (i + 1)..n {
            if used[j] {
                continue;
            }
            let split = (values[i] - values[j]).norm();
            if split > tol {
                continue;
            }
            let pj = parents[j];
            if pj.nx == pi.ny && pj.ny == pi.nx && pi.nx != pi.ny {
                used[i] = true;
                used[j] = true;
                pairs.push(DegeneratePair {
                    indices: (i, j),
                    parents: (pi, pj),
                    energy: 0.5 * (values[i].re + values[j].re),
                    splitting: split,
                });
                break;
            }
        }
    }
    Ok(pairs)
}

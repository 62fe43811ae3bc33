//! Liouvillian eigenvalues near the Zeno limit, stripe by stripe, through order 1/Gamma.
//!
//! Sign convention: with `L = -i[H, .] + Gamma D`, a zeroth-order mode
//! `|a><b|` in stripe `k` has eigenvalue `Gamma c_k - i (u_a - w_b)`.

mod boundary;
mod effective;
pub mod engine;
mod general;
mod markov;
mod two_qubit;

use faer::Mat;
use serde::Serialize;

use crate::error::Result;
use crate::lindblad_model::ZenoSetup;
use crate::operator_algebra::C64;

pub use boundary::{flipped_field_operators, stripe12_spectrum, stripe3_corrections, u3_operator};
pub use effective::{effective_model_stripe0, stripe0_eigenvalues, stripe0_markov_matrix, EffectiveModel};
pub use general::{
    assembled_stripe_generator, dyson_terms, eq18_correction, general_degenerate_stripe, stripe_factorized,
    stripe_nondegenerate_general, zeroth_operators,
};
pub use markov::{kolmogorov_check, KolmogorovReport, KOLMOGOROV_TOL};
pub use two_qubit::two_qubit_closed_forms;

/// Zeroth-order values closer than this fraction of the stripe's frequency spread are exactly degenerate.
pub const EXACT_DEGENERACY_REL: f64 = 1e-8;
/// Records within this fraction of the spread from a mode in another cluster are flagged.
pub const FLAG_WINDOW_REL: f64 = 0.02;
/// Default clustering window as a fraction of the spread.
pub const DEFAULT_WINDOW_REL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZenoOptions {
    /// Zeroth-order values within `window_rel * spread` are treated as one
    /// quasi-degenerate cluster and resolved together. Zero keeps only exact
    /// degeneracies, which are then resolved by the closed-form matrices.
    pub window_rel: f64,
}

impl Default for ZenoOptions {
    fn default() -> Self {
        Self { window_rel: DEFAULT_WINDOW_REL }
    }
}

impl ZenoOptions {
    pub fn exact_only() -> Self {
        Self { window_rel: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ResolverKind {
    /// Classical rate matrix of the zero stripe's diagonal sector.
    Markov,
    /// Diagonal sector of the stripe at `c = -1`.
    StripeT,
    /// Diagonal sector of the doubly degenerate stripe.
    BlockT,
    /// 2x2 mixing of the two members for an off-diagonal pair.
    PairV,
    /// Coupling block built from the first-order generator.
    Cluster,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Resolution {
    Single,
    Degenerate(ResolverKind),
    NearDegenerate,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripeKey {
    pub c: C64,
    pub members: Vec<usize>,
}

impl StripeKey {
    pub fn label(&self) -> String {
        self.members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("&")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripeRecord {
    /// Dissipator label of the class member carrying the mode.
    pub member: usize,
    pub alpha: usize,
    pub beta: usize,
    pub lambda0: C64,
    pub correction: C64,
    /// `|a>` and `|b>` of the factorized eigenvector `|a><b|`, for isolated modes.
    pub left_factor: Option<Vec<C64>>,
    pub right_factor: Option<Vec<C64>>,
    pub resolution: Resolution,
    /// Another zeroth-order value sits within the flag window outside this record's cluster,
    /// or the record came from a quasi-degenerate cluster.
    pub near_degenerate: bool,
}

impl StripeRecord {
    pub fn lambda(&self) -> C64 {
        self.lambda0 + self.correction
    }
}

#[derive(Clone, Debug)]
pub struct DegeneracyResolver {
    pub kind: ResolverKind,
    /// `(member, alpha, beta)` of the modes spanning the block, in matrix order.
    pub modes: Vec<(usize, usize, usize)>,
    pub matrix: Mat<C64>,
    /// The first-order block is `scale * matrix`; corrections are `scale * eig / Gamma`.
    pub scale: f64,
    pub resolved_corrections: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct StripeSpectrum {
    pub key: StripeKey,
    pub records: Vec<StripeRecord>,
    pub resolvers: Vec<DegeneracyResolver>,
}

impl StripeSpectrum {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.records.iter().map(|r| r.lambda()).collect()
    }

    pub fn resolver(&self, kind: ResolverKind) -> Option<&DegeneracyResolver> {
        self.resolvers.iter().find(|r| r.kind == kind)
    }
}

#[derive(Clone, Debug)]
pub struct ZenoSpectrum {
    pub gamma: f64,
    pub stripes: Vec<StripeSpectrum>,
}

impl ZenoSpectrum {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.stripes.iter().flat_map(|s| s.eigenvalues()).collect()
    }

    pub fn len(&self) -> usize {
        self.stripes.iter().map(|s| s.records.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Eigenvalues with `|Im| <= tol`.
    pub fn real_count(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|l| l.im.abs() <= tol).count()
    }
}

/// All stripes: the closed-form paths for the boundary dissipator, the
/// tensor-based paths otherwise.
pub fn zeno_spectrum(setup: &ZenoSetup, opts: &ZenoOptions) -> Result<ZenoSpectrum> {
    let gamma = setup.gamma();
    let mut stripes = Vec::new();
    if setup.basis.boundary.is_some() {
        let model = effective_model_stripe0(setup)?;
        stripes.push(stripe0_eigenvalues(&model, gamma, opts)?);
        stripes.push(stripe12_spectrum(setup, gamma, opts)?);
        stripes.push(stripe3_corrections(setup, gamma, opts)?);
    } else {
        for class in &setup.basis.classes {
            if class.len() == 1 {
                stripes.push(stripe_nondegenerate_general(class[0], setup, gamma, opts)?);
            } else {
                stripes.push(general_degenerate_stripe(class, setup, gamma, opts)?);
            }
        }
    }
    Ok(ZenoSpectrum { gamma, stripes })
}

//! Branch points of the Liouvillian spectrum along a Gamma grid.
//!
//! Eigenvalues are followed from one grid point to the next by optimal
//! assignment. Near a square-root branch point the squared difference
//! `s = (lambda_a - lambda_b)^2` of the two coalescing trajectories is
//! analytic and passes through zero, while an ordinary crossing only touches
//! zero quadratically. A cell is flagged when the straight line between the
//! two end values of `s` passes through the origin inside the cell.

use rayon::prelude::*;
use serde::Serialize;

use super::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::exact_spectrum::exact_liouvillian_spectrum;
use crate::lindblad_model::XYZChainConfig;
use crate::operator_algebra::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpScanOptions {
    /// Distance of the straight `s` segment from the origin, relative to its length.
    pub line_tol: f64,
    /// Largest allowed eigenvalue step between neighbouring grid points is
    /// `step_slope * dGamma + step_floor`.
    pub step_slope: f64,
    pub step_floor: f64,
    /// Pairs further apart than this at both ends of a cell are not examined.
    pub pair_window: f64,
}

impl Default for EpScanOptions {
    fn default() -> Self {
        Self { line_tol: 0.05, step_slope: 20.0, step_floor: 1.0, pair_window: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    /// Midpoint of the flagged cells.
    pub gamma: f64,
    /// Half the extent of the flagged cells.
    pub uncertainty: f64,
    /// Trajectory ids involved, ascending.
    pub trajectories: Vec<usize>,
}

/// A grid cell across which some eigenvalue moved further than the step bound.
/// Its assignment is unreliable and it is not searched for branch points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoarseCell {
    /// Index of the left grid point.
    pub cell: usize,
    pub gamma: f64,
    pub jump: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpScanResult {
    pub gammas: Vec<f64>,
    /// `tracks[i][t]` is trajectory `t` at grid point `i`.
    pub tracks: Vec<Vec<C64>>,
    pub branch_points: Vec<BranchPoint>,
    pub coarse_cells: Vec<CoarseCell>,
}

impl EpScanResult {
    /// Rightmost detected branch point.
    pub fn gamma_cr(&self) -> Option<f64> {
        self.branch_points.iter().map(|b| b.gamma).reduce(f64::max)
    }

    /// Fails on the first cell the grid was too coarse to track.
    pub fn ensure_resolved(&self) -> Result<()> {
        match self.coarse_cells.first() {
            Some(c) => Err(Error::GridTooCoarse { gamma: c.gamma, jump: c.jump }),
            None => Ok(()),
        }
    }
}

/// Orders the eigenvalues at each grid point so that column `t` is one
/// continuous trajectory, and lists the cells where that failed.
pub fn track_eigenvalues(gammas: &[f64], spectra: &[Vec<C64>], opts: &EpScanOptions) -> Result<(Vec<Vec<C64>>, Vec<CoarseCell>)> {
    let mut tracks: Vec<Vec<C64>> = Vec::with_capacity(spectra.len());
    let mut coarse = Vec::new();
    let Some(first) = spectra.first() else {
        return Ok((tracks, coarse));
    };
    tracks.push(first.clone());
    for i in 1..spectra.len() {
        let prev = &tracks[i - 1];
        let next = &spectra[i];
        if next.len() != prev.len() {
            return Err(Error::LengthMismatch(prev.len(), next.len()));
        }
        let n = prev.len();
        let cost: Vec<f64> = prev.iter().flat_map(|p| next.iter().map(move |q| (p - q).norm())).collect();
        let perm = min_cost_assignment(n, &cost);
        let jump = (0..n).map(|t| cost[t * n + perm[t]]).fold(0.0, f64::max);
        let bound = opts.step_slope * (gammas[i] - gammas[i - 1]) + opts.step_floor;
        if jump > bound {
            coarse.push(CoarseCell { cell: i - 1, gamma: gammas[i - 1], jump });
        }
        tracks.push(perm.iter().map(|&j| next[j]).collect());
    }
    Ok((tracks, coarse))
}

struct Hit {
    cell: usize,
    a: usize,
    b: usize,
}

fn cell_hits(tracks: &[Vec<C64>], cell: usize, opts: &EpScanOptions) -> Vec<Hit> {
    let (l, r) = (&tracks[cell], &tracks[cell + 1]);
    let n = l.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| l[x].re.total_cmp(&l[y].re));
    let mut hits = Vec::new();
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if l[b].re - l[a].re > opts.pair_window + 2.0 * (r[a] - l[a]).norm().max((r[b] - l[b]).norm()) {
                break;
            }
            let (dl, dr) = (l[a] - l[b], r[a] - r[b]);
            if dl.norm() > opts.pair_window && dr.norm() > opts.pair_window {
                continue;
            }
            let (s0, s1) = (dl * dl, dr * dr);
            let ds = s1 - s0;
            let scale = 1.0 + l[a].norm_sqr().max(l[b].norm_sqr());
            if ds.norm() <= 1e-9 * scale {
                continue;
            }
            let t = -(s0 * ds.conj()).re / ds.norm_sqr();
            // a zero sitting on the right grid point is examined by the next cell
            if !(0.0..1.0).contains(&t) {
                continue;
            }
            if t < 1e-9 {
                // zero on the left grid point: a branch point only if s changes direction across it
                let Some(p) = cell.checked_sub(1).map(|c| tracks[c][a] - tracks[c][b]) else {
                    continue;
                };
                if (p * p * s1.conj()).re >= 0.0 {
                    continue;
                }
            }
            if (s0 + ds * t).norm() <= opts.line_tol * ds.norm() {
                hits.push(Hit { cell, a: a.min(b), b: a.max(b) });
            }
        }
    }
    hits
}

/// Groups hits whose cells touch and that share a trajectory or whose pair
/// midpoints are complex conjugates, up to the drift of the midpoints across
/// the cells.
fn merge_hits(gammas: &[f64], tracks: &[Vec<C64>], hits: Vec<Hit>) -> Vec<BranchPoint> {
    struct Group {
        first: usize,
        last: usize,
        ids: Vec<usize>,
        mids: Vec<(C64, f64)>,
    }
    let mid_at = |i: usize, h: &Hit| (tracks[i][h.a] + tracks[i][h.b]) * 0.5;
    let mut groups: Vec<Group> = Vec::new();
    for h in hits {
        let m = mid_at(h.cell, &h);
        let drift = (mid_at(h.cell + 1, &h) - m).norm();
        let found = groups.iter_mut().find(|g| {
            h.cell + 1 >= g.first
                && h.cell <= g.last + 1
                && (g.ids.contains(&h.a)
                    || g.ids.contains(&h.b)
                    || g.mids.iter().any(|(x, dx)| (x.conj() - m).norm() <= 1e-6 * (1.0 + m.norm()) + drift + dx))
        });
        match found {
            Some(g) => {
                g.first = g.first.min(h.cell);
                g.last = g.last.max(h.cell);
                g.ids.extend([h.a, h.b]);
                g.mids.push((m, drift));
            }
            None => groups.push(Group { first: h.cell, last: h.cell, ids: vec![h.a, h.b], mids: vec![(m, drift)] }),
        }
    }
    let mut out: Vec<BranchPoint> = groups
        .into_iter()
        .map(|mut g| {
            g.ids.sort_unstable();
            g.ids.dedup();
            let (lo, hi) = (gammas[g.first], gammas[g.last + 1]);
            BranchPoint { gamma: 0.5 * (lo + hi), uncertainty: 0.5 * (hi - lo), trajectories: g.ids }
        })
        .collect();
    out.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    out
}

/// Branch points in already computed spectra on a grid.
pub fn detect_branch_points(gammas: &[f64], spectra: &[Vec<C64>], opts: &EpScanOptions) -> Result<EpScanResult> {
    if gammas.len() != spectra.len() {
        return Err(Error::LengthMismatch(gammas.len(), spectra.len()));
    }
    let (tracks, coarse_cells) = track_eigenvalues(gammas, spectra, opts)?;
    let hits: Vec<Hit> = (0..tracks.len().saturating_sub(1))
        .filter(|&c| !coarse_cells.iter().any(|x| x.cell == c))
        .flat_map(|c| cell_hits(&tracks, c, opts))
        .collect();
    let branch_points = merge_hits(gammas, &tracks, hits);
    Ok(EpScanResult { gammas: gammas.to_vec(), tracks, branch_points, coarse_cells })
}

/// Exact spectra over a strictly increasing Gamma grid, tracked and scanned.
pub fn ep_scan(template: &XYZChainConfig, gammas: &[f64], opts: &EpScanOptions) -> Result<EpScanResult> {
    super::check_grid(gammas)?;
    let spectra: Vec<Vec<C64>> = gammas
        .par_iter()
        .map(|&g| exact_liouvillian_spectrum(&template.with_gamma(g), false).map(|s| s.eigenvalues))
        .collect::<Result<_>>()?;
    detect_branch_points(gammas, &spectra, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::c;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn square_root_pair_is_found() {
        // eigenvalues of [[0, 1], [x - 3, 0]]: +-sqrt(x - 3)
        let g = grid(1.0, 5.0, 80);
        let spectra: Vec<Vec<C64>> = g
            .iter()
            .map(|&x| {
                let r = c(x - 3.0, 0.0).sqrt();
                vec![r, -r, c(-10.0, 0.0)]
            })
            .collect();
        let res = detect_branch_points(&g, &spectra, &EpScanOptions::default()).unwrap();
        assert_eq!(res.branch_points.len(), 1);
        let bp = &res.branch_points[0];
        assert!((bp.gamma - 3.0).abs() <= bp.uncertainty + 1e-12);
        assert_eq!(bp.trajectories, vec![0, 1]);
    }

    #[test]
    fn diagonal_family_has_no_branch_points() {
        let g = grid(0.0, 4.0, 40);
        let spectra: Vec<Vec<C64>> = g.iter().map(|&x| vec![c(x, 0.0), c(2.0, 0.0), c(-x, 1.0), c(4.0 - x, 1.0)]).collect();
        let res = detect_branch_points(&g, &spectra, &EpScanOptions::default()).unwrap();
        assert!(res.branch_points.is_empty());
    }

    #[test]
    fn large_jump_is_reported() {
        let g = [0.0, 0.1, 0.2];
        let spectra = vec![vec![c(0.0, 0.0)], vec![c(0.5, 0.0)], vec![c(50.0, 0.0)]];
        let res = detect_branch_points(&g, &spectra, &EpScanOptions::default()).unwrap();
        assert_eq!(res.coarse_cells.len(), 1);
        assert_eq!(res.coarse_cells[0].cell, 1);
        assert!(matches!(res.ensure_resolved(), Err(Error::GridTooCoarse { .. })));
    }
}

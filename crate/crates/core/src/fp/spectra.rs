use serde::Serialize;

use crate::complex::{Graph, SimplicialComplex};
use crate::error::Result;
use crate::sparse::{dense_sym_eig, SparseMatrix};

use super::{build_operators, FpOperator};

/// Spectral tolerance used for the PSD and `[0, 1]` bound verdicts.
pub const SPECTRAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct OrderSpectrum {
    pub p: usize,
    pub simplices: usize,
    pub isolated_nodes: usize,
    pub adjacency_min_eig: f64,
    pub adjacency_max_eig: f64,
    pub laplacian_min_eig: f64,
    pub laplacian_max_eig: f64,
    pub max_asymmetry: f64,
    /// `max |L_p · 1|`; only meaningful when no node is isolated.
    pub laplacian_kernel_residual: Option<f64>,
    pub psd: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectraReport {
    pub n: usize,
    pub orders: Vec<OrderSpectrum>,
    /// `max |Ã_1 − ½(D^{-1/2} A D^{-1/2} + I)|`; absent when the graph has isolated nodes.
    pub a1_identity_residual: Option<f64>,
    /// Smallest eigenvalue over every `Ã_p` and `L_p`.
    pub min_eig: f64,
    /// Largest eigenvalue over every `Ã_p` and `L_p`.
    pub max_eig: f64,
    pub psd: bool,
}

/// Eigenvalue extrema and structural checks for every order of a lifted graph.
pub fn spectra_report(g: &Graph, k: &SimplicialComplex, max_order: usize) -> Result<SpectraReport> {
    let ops = build_operators(k, max_order)?;
    let mut orders = Vec::with_capacity(ops.len());
    for op in &ops {
        let l = op.laplacian();
        let ea = dense_sym_eig(&op.a_tilde.to_dense())?.eigenvalues;
        let el = dense_sym_eig(&l.to_dense())?.eigenvalues;
        let (amin, amax) = (ea[0], ea[ea.len() - 1]);
        let (lmin, lmax) = (el[0], el[el.len() - 1]);
        let max_asymmetry = op.a_tilde.max_asymmetry().max(l.max_asymmetry());
        let kernel = (!op.has_isolated()).then(|| {
            l.spmv(&vec![1.0; l.cols()]).expect("square").iter().fold(0.0f64, |m, v| m.max(v.abs()))
        });
        let psd = amin >= -SPECTRAL_TOL
            && amax <= 1.0 + SPECTRAL_TOL
            && lmin >= -SPECTRAL_TOL
            && lmax <= 1.0 + SPECTRAL_TOL;
        orders.push(OrderSpectrum {
            p: op.order,
            simplices: k.count(op.order),
            isolated_nodes: op.isolated.iter().filter(|&&i| i).count(),
            adjacency_min_eig: amin,
            adjacency_max_eig: amax,
            laplacian_min_eig: lmin,
            laplacian_max_eig: lmax,
            max_asymmetry,
            laplacian_kernel_residual: kernel,
            psd,
        });
    }
    let a1_identity_residual = ops.first().and_then(|op| a1_identity_residual(g, op));
    let psd = orders.iter().all(|o| o.psd);
    let min_eig = orders.iter().map(|o| o.adjacency_min_eig.min(o.laplacian_min_eig)).fold(f64::INFINITY, f64::min);
    let max_eig =
        orders.iter().map(|o| o.adjacency_max_eig.max(o.laplacian_max_eig)).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectraReport { n: g.node_count(), orders, a1_identity_residual, min_eig, max_eig, psd })
}

/// `max |Ã_1 − ½(D^{-1/2} A D^{-1/2} + I)|`, or `None` if some node has degree 0.
pub fn a1_identity_residual(g: &Graph, a1: &FpOperator) -> Option<f64> {
    let deg = g.degrees();
    if deg.contains(&0) {
        return None;
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let reduced = g.adjacency_matrix().scale(&inv_sqrt, &inv_sqrt).ok()?;
    let n = g.node_count();
    let trip = (0..n).map(|i| (i, i, 0.5)).chain((0..n).flat_map(|r| {
        let (cols, vals) = reduced.row(r);
        cols.iter().zip(vals).map(move |(&c, &v)| (r, c, 0.5 * v)).collect::<Vec<_>>()
    }));
    let rhs = SparseMatrix::from_triplets(n, n, trip).ok()?;
    Some(a1.a_tilde.to_dense().max_abs_diff(&rhs.to_dense()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::clique_lift;
    use crate::synth;

    #[test]
    fn k3_report() {
        let g = synth::complete_graph(3);
        let k = clique_lift(&g, 2).unwrap();
        let r = spectra_report(&g, &k, 2).unwrap();
        assert!(r.psd);
        assert!(r.a1_identity_residual.unwrap() < 1e-15);
        assert!(r.orders[1].laplacian_kernel_residual.unwrap() < 1e-15);
        assert!((r.orders[1].adjacency_max_eig - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_nodes_skip_a1_identity() {
        let g = Graph::new(3, [(0, 1)]);
        let k = clique_lift(&g, 2).unwrap();
        let r = spectra_report(&g, &k, 2).unwrap();
        assert!(r.a1_identity_residual.is_none());
        assert!(r.orders[0].laplacian_kernel_residual.is_none());
    }
}
